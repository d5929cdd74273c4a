//! Dyadic grid model of the unit square at resolution `2^k x 2^k`.
//!
//! A compact region is a union of closed cells; an open region is the
//! interior (relative to the square) of such a union. Both are encoded
//! as cell masks. Closed cells that share an edge or a corner intersect
//! as point sets, so compact disjointness means no shared cell *and* no
//! 8-adjacency. Open interiors touching only at cell corners are
//! disconnected there, which is where the 4-adjacency convention for
//! open regions comes from.
//!
//! Erosion and dilation (8-neighborhood, clipped at the square boundary)
//! realize "compactly inside" and the minimal open neighborhood: they
//! are the monotone adjoints `K <= erode(S) iff dilate(K) <= S`.

use crate::error::{Error, Result};
use crate::mask::Mask;
use std::fmt::Write as _;

#[derive(Debug, Clone)]
pub struct DyadicGrid {
    k: u32,
    side: usize,
    marked: Vec<usize>,
}

impl DyadicGrid {
    pub fn new(k: u32) -> Result<Self> {
        if k == 0 || k > 5 {
            return Err(Error::Config(format!(
                "grid resolution k={k} out of supported range 1..=5"
            )));
        }
        Ok(DyadicGrid {
            k,
            side: 1 << k,
            marked: Vec::new(),
        })
    }

    pub fn with_marked(k: u32, marked: Vec<(usize, usize)>) -> Result<Self> {
        let mut g = DyadicGrid::new(k)?;
        for (r, c) in marked {
            if r >= g.side || c >= g.side {
                return Err(Error::Config(format!("marked cell ({r},{c}) outside grid")));
            }
            g.marked.push(g.cell(r, c));
        }
        Ok(g)
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn side(&self) -> usize {
        self.side
    }

    pub fn n_cells(&self) -> usize {
        self.side * self.side
    }

    pub fn marked(&self) -> &[usize] {
        &self.marked
    }

    pub fn cell(&self, r: usize, c: usize) -> usize {
        r * self.side + c
    }

    pub fn coords(&self, idx: usize) -> (usize, usize) {
        (idx / self.side, idx % self.side)
    }

    pub fn all_cells(&self) -> Mask {
        Mask::full(self.n_cells())
    }

    pub fn empty(&self) -> Mask {
        Mask::empty(self.n_cells())
    }

    /// 8-neighbors inside the square.
    pub fn neighbors8(&self, idx: usize) -> Vec<usize> {
        let (r, c) = self.coords(idx);
        let mut out = Vec::with_capacity(8);
        for dr in -1i64..=1 {
            for dc in -1i64..=1 {
                if dr == 0 && dc == 0 {
                    continue;
                }
                let nr = r as i64 + dr;
                let nc = c as i64 + dc;
                if nr >= 0 && nc >= 0 && (nr as usize) < self.side && (nc as usize) < self.side {
                    out.push(self.cell(nr as usize, nc as usize));
                }
            }
        }
        out
    }

    pub fn neighbors4(&self, idx: usize) -> Vec<usize> {
        let (r, c) = self.coords(idx);
        let mut out = Vec::with_capacity(4);
        if r > 0 {
            out.push(self.cell(r - 1, c));
        }
        if r + 1 < self.side {
            out.push(self.cell(r + 1, c));
        }
        if c > 0 {
            out.push(self.cell(r, c - 1));
        }
        if c + 1 < self.side {
            out.push(self.cell(r, c + 1));
        }
        out
    }

    /// Keep a cell iff all of its (clipped) 8-neighbors belong to `s`.
    pub fn erode(&self, s: &Mask) -> Mask {
        let mut out = self.empty();
        for idx in s.iter() {
            if self.neighbors8(idx).iter().all(|n| s.contains(*n)) {
                out.insert(idx);
            }
        }
        out
    }

    /// Cells of `s` plus all their 8-neighbors.
    pub fn dilate(&self, s: &Mask) -> Mask {
        let mut out = s.clone();
        for idx in s.iter() {
            for n in self.neighbors8(idx) {
                out.insert(n);
            }
        }
        out
    }

    /// Compact regions intersect as point sets iff their cell sets share
    /// a cell or touch (8-adjacency).
    pub fn compacts_disjoint(&self, a: &Mask, b: &Mask) -> bool {
        if !a.is_disjoint(b) {
            return false;
        }
        self.dilate(a).is_disjoint(b)
    }

    /// Closed complement of an open region.
    pub fn closed_complement(&self, open: &Mask) -> Mask {
        self.all_cells().difference(&self.erode(open))
    }

    /// Open complement of a compact region.
    pub fn open_complement(&self, compact: &Mask) -> Mask {
        self.all_cells().difference(&self.dilate(compact))
    }

    /// Largest compact region that fits point-wise inside the open region.
    pub fn kernel(&self, open: &Mask) -> Mask {
        self.erode(open)
    }

    /// Smallest open region whose interior contains the compact region.
    pub fn hull(&self, compact: &Mask) -> Mask {
        self.dilate(compact)
    }

    /// Connected components under the given adjacency.
    pub fn components(&self, s: &Mask, eight: bool) -> Vec<Mask> {
        let mut seen = self.empty();
        let mut comps = Vec::new();
        for start in s.iter() {
            if seen.contains(start) {
                continue;
            }
            let mut comp = self.empty();
            let mut stack = vec![start];
            seen.insert(start);
            while let Some(cur) = stack.pop() {
                comp.insert(cur);
                let nbrs = if eight {
                    self.neighbors8(cur)
                } else {
                    self.neighbors4(cur)
                };
                for n in nbrs {
                    if s.contains(n) && !seen.contains(n) {
                        seen.insert(n);
                        stack.push(n);
                    }
                }
            }
            comps.push(comp);
        }
        comps
    }

    /// True iff at least two of the given marked cells lie in one
    /// 8-connected component of `s`.
    pub fn two_marks_connected_with(&self, s: &Mask, marks: &[usize]) -> bool {
        let present: Vec<usize> = marks.iter().copied().filter(|m| s.contains(*m)).collect();
        if present.len() < 2 {
            return false;
        }
        for comp in self.components(s, true) {
            if present.iter().filter(|m| comp.contains(**m)).count() >= 2 {
                return true;
            }
        }
        false
    }

    /// Axis-aligned box `rows r0..=r1, cols c0..=c1` as a cell mask.
    pub fn box_mask(&self, r0: usize, r1: usize, c0: usize, c1: usize) -> Mask {
        let mut m = self.empty();
        for r in r0..=r1 {
            for c in c0..=c1 {
                m.insert(self.cell(r, c));
            }
        }
        m
    }

    /// All axis-aligned boxes; the structured family used by exhaustive
    /// sweeps at small k.
    pub fn all_boxes(&self) -> Vec<Mask> {
        let mut out = Vec::new();
        for r0 in 0..self.side {
            for r1 in r0..self.side {
                for c0 in 0..self.side {
                    for c1 in c0..self.side {
                        out.push(self.box_mask(r0, r1, c0, c1));
                    }
                }
            }
        }
        out
    }

    pub fn bounding_box(&self, s: &Mask) -> Option<(usize, usize, usize, usize)> {
        let mut r0 = usize::MAX;
        let mut r1 = 0;
        let mut c0 = usize::MAX;
        let mut c1 = 0;
        for idx in s.iter() {
            let (r, c) = self.coords(idx);
            r0 = r0.min(r);
            r1 = r1.max(r);
            c0 = c0.min(c);
            c1 = c1.max(c);
        }
        if r0 == usize::MAX {
            None
        } else {
            Some((r0, r1, c0, c1))
        }
    }

    /// Exact textual form: per-row runs of columns, e.g. `cells[0:0-3;2:1,5-7]`.
    pub fn format_cells(&self, s: &Mask) -> String {
        if s.is_empty() {
            return "cells[]".to_string();
        }
        let mut out = String::from("cells[");
        let mut first_row = true;
        for r in 0..self.side {
            let cols: Vec<usize> = (0..self.side).filter(|c| s.contains(self.cell(r, *c))).collect();
            if cols.is_empty() {
                continue;
            }
            if !first_row {
                out.push(';');
            }
            first_row = false;
            let _ = write!(out, "{r}:");
            let mut i = 0;
            let mut first_run = true;
            while i < cols.len() {
                let start = cols[i];
                let mut end = start;
                while i + 1 < cols.len() && cols[i + 1] == end + 1 {
                    i += 1;
                    end = cols[i];
                }
                if !first_run {
                    out.push(',');
                }
                first_run = false;
                if start == end {
                    let _ = write!(out, "{start}");
                } else {
                    let _ = write!(out, "{start}-{end}");
                }
                i += 1;
            }
        }
        out.push(']');
        out
    }

    pub fn parse_cells(&self, text: &str) -> Result<Mask> {
        let t = text.trim();
        let inner = t
            .strip_prefix("cells[")
            .and_then(|x| x.strip_suffix(']'))
            .ok_or_else(|| Error::Parse(format!("expected cells[...], got `{t}`")))?;
        let mut m = self.empty();
        if inner.trim().is_empty() {
            return Ok(m);
        }
        for row_part in inner.split(';') {
            let (row, runs) = row_part
                .split_once(':')
                .ok_or_else(|| Error::Parse(format!("bad row spec `{row_part}`")))?;
            let r: usize = row
                .trim()
                .parse()
                .map_err(|_| Error::Parse(format!("bad row `{row}`")))?;
            for run in runs.split(',') {
                let run = run.trim();
                let (a, b) = match run.split_once('-') {
                    Some((a, b)) => (a, b),
                    None => (run, run),
                };
                let c0: usize = a.trim().parse().map_err(|_| Error::Parse(format!("bad col `{a}`")))?;
                let c1: usize = b.trim().parse().map_err(|_| Error::Parse(format!("bad col `{b}`")))?;
                if r >= self.side || c1 >= self.side || c0 > c1 {
                    return Err(Error::Parse(format!("cell run out of range `{run}` in row {r}")));
                }
                for c in c0..=c1 {
                    m.insert(self.cell(r, c));
                }
            }
        }
        Ok(m)
    }

    /// `grid k=<int>` with optional `marked: (r,c) ...` on following lines.
    pub fn parse_spec(text: &str) -> Result<DyadicGrid> {
        let mut k: Option<u32> = None;
        let mut marked = Vec::new();
        for line in text.lines() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            if let Some(rest) = line.strip_prefix("grid") {
                let rest = rest.trim();
                let kv = rest
                    .strip_prefix("k=")
                    .ok_or_else(|| Error::Parse(format!("expected `grid k=<int>`, got `{line}`")))?;
                k = Some(
                    kv.trim()
                        .parse()
                        .map_err(|_| Error::Parse(format!("bad k in `{line}`")))?,
                );
            } else if let Some(rest) = line.strip_prefix("marked:") {
                marked.extend(parse_cell_list(rest)?);
            } else {
                return Err(Error::Parse(format!("unrecognized grid line `{line}`")));
            }
        }
        let k = k.ok_or_else(|| Error::Parse("missing `grid k=<int>` line".into()))?;
        DyadicGrid::with_marked(k, marked)
    }
}

/// Parse `(r,c),(r,c) ...` allowing comma or space separation between pairs.
pub fn parse_cell_list(text: &str) -> Result<Vec<(usize, usize)>> {
    let mut out = Vec::new();
    let mut rest = text.trim();
    while !rest.is_empty() {
        let start = rest
            .find('(')
            .ok_or_else(|| Error::Parse(format!("expected `(r,c)` in `{text}`")))?;
        let end = rest[start..]
            .find(')')
            .ok_or_else(|| Error::Parse(format!("unclosed `(` in `{text}`")))?
            + start;
        let body = &rest[start + 1..end];
        let (r, c) = body
            .split_once(',')
            .ok_or_else(|| Error::Parse(format!("bad cell `{body}`")))?;
        let r: usize = r.trim().parse().map_err(|_| Error::Parse(format!("bad row `{r}`")))?;
        let c: usize = c.trim().parse().map_err(|_| Error::Parse(format!("bad col `{c}`")))?;
        out.push((r, c));
        rest = rest[end + 1..].trim_start_matches([',', ' ']).trim();
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn grid(k: u32) -> DyadicGrid {
        DyadicGrid::new(k).unwrap()
    }

    #[test]
    fn erosion_of_single_cell_is_empty() {
        let g = grid(2);
        let s = Mask::singleton(16, g.cell(1, 1));
        assert!(g.erode(&s).is_empty());
        assert!(g.kernel(&s).is_empty());
    }

    #[test]
    fn erosion_keeps_boundary_corner_of_clipped_block() {
        let g = grid(2);
        let block = g.box_mask(0, 2, 0, 2);
        let e = g.erode(&block);
        // relative interior: the corner cell survives, block edges do not
        assert!(e.contains(g.cell(0, 0)));
        assert!(e.contains(g.cell(1, 1)));
        assert!(!e.contains(g.cell(0, 2)));
        assert_eq!(e.count(), 4);
    }

    #[test]
    fn full_grid_is_fixed_by_erosion_and_dilation() {
        let g = grid(3);
        let all = g.all_cells();
        assert_eq!(g.erode(&all), all);
        assert_eq!(g.dilate(&all), all);
    }

    #[test]
    fn complement_rules() {
        let g = grid(2);
        let k = Mask::singleton(16, g.cell(1, 1));
        let oc = g.open_complement(&k);
        // removes the 3x3 dilate
        assert_eq!(oc.count(), 16 - 9);
        let u = g.box_mask(0, 1, 0, 1);
        let cc = g.closed_complement(&u);
        assert_eq!(cc, g.all_cells().difference(&g.erode(&u)));
        // closed-complement(open-complement(K)) contains K
        let back = g.closed_complement(&oc);
        assert!(k.is_subset(&back));
    }

    #[test]
    fn components_split_diagonal_for_open_convention() {
        let g = grid(2);
        let s = Mask::from_indices(16, [g.cell(0, 0), g.cell(1, 1)]);
        assert_eq!(g.components(&s, true).len(), 1);
        assert_eq!(g.components(&s, false).len(), 2);
    }

    #[test]
    fn cells_roundtrip_format() {
        let g = grid(3);
        let m = Mask::from_indices(64, [g.cell(0, 0), g.cell(0, 1), g.cell(0, 2), g.cell(2, 5), g.cell(2, 7)]);
        let s = g.format_cells(&m);
        assert_eq!(s, "cells[0:0-2;2:5,7]");
        assert_eq!(g.parse_cells(&s).unwrap(), m);
        assert_eq!(g.parse_cells("cells[]").unwrap(), g.empty());
    }

    #[test]
    fn grid_spec_parse() {
        let g = DyadicGrid::parse_spec("grid k=3\nmarked: (1,1) (1,6) (6,3)\n").unwrap();
        assert_eq!(g.k(), 3);
        assert_eq!(g.marked().len(), 3);
        assert!(DyadicGrid::parse_spec("grid k=0").is_err());
    }

    proptest! {
        // K <= erode(S) iff dilate(K) <= S
        #[test]
        fn erode_dilate_adjoint(kbits in prop::collection::vec(any::<bool>(), 16),
                                sbits in prop::collection::vec(any::<bool>(), 16)) {
            let g = grid(2);
            let k = Mask::from_indices(16, kbits.iter().enumerate().filter(|(_, b)| **b).map(|(i, _)| i));
            let s = Mask::from_indices(16, sbits.iter().enumerate().filter(|(_, b)| **b).map(|(i, _)| i));
            prop_assert_eq!(k.is_subset(&g.erode(&s)), g.dilate(&k).is_subset(&s));
        }

        #[test]
        fn kernel_is_inside_and_maximal(sbits in prop::collection::vec(any::<bool>(), 16)) {
            let g = grid(2);
            let s = Mask::from_indices(16, sbits.iter().enumerate().filter(|(_, b)| **b).map(|(i, _)| i));
            let ker = g.kernel(&s);
            prop_assert!(ker.is_subset(&s));
            if s.count() <= 10 {
                // every compact point-inside s is inside the kernel
                for sub in crate::mask::subsets_of(&s) {
                    if g.dilate(&sub).is_subset(&s) {
                        prop_assert!(sub.is_subset(&ker));
                    }
                }
            }
        }
    }
}
