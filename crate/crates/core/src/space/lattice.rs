//! Finite point lattices: an explicit family of open sets over a named
//! point list, with closed sets as complements and compacts identified
//! with closeds (the compact-space surrogate).

use crate::error::{Error, Result};
use crate::mask::Mask;
use std::collections::BTreeSet;

#[derive(Debug, Clone)]
pub struct FiniteLattice {
    point_names: Vec<String>,
    opens: Vec<Mask>,
    closeds: Vec<Mask>,
    open_set: BTreeSet<Mask>,
    closed_set: BTreeSet<Mask>,
}

/// Structural diagnostics for a lattice (and, with the grid's own
/// checker, for the grid encoding). `lattice_closed` is a hard
/// precondition for the rest; the others are recorded facts, not
/// assumptions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ValidationReport {
    pub lattice_closed: bool,
    pub connected: bool,
    pub normal: bool,
    pub splitting: bool,
    pub interpolating: bool,
    pub notes: Vec<String>,
    pub counterexamples: Vec<String>,
}

impl FiniteLattice {
    pub fn new(point_names: Vec<String>, opens: Vec<Mask>) -> Result<Self> {
        if point_names.is_empty() {
            return Err(Error::MalformedLattice("empty point list".into()));
        }
        let n = point_names.len();
        {
            let mut seen = BTreeSet::new();
            for p in &point_names {
                if !seen.insert(p.clone()) {
                    return Err(Error::MalformedLattice(format!("duplicate point `{p}`")));
                }
            }
        }
        let mut dedup: BTreeSet<Mask> = BTreeSet::new();
        for o in &opens {
            if o.universe_len() != n {
                return Err(Error::MalformedLattice("open set over wrong universe".into()));
            }
            dedup.insert(o.clone());
        }
        let opens: Vec<Mask> = dedup.iter().cloned().collect();
        let closeds: Vec<Mask> = opens
            .iter()
            .map(|o| o.complement())
            .collect::<BTreeSet<Mask>>()
            .into_iter()
            .collect();
        let open_set = opens.iter().cloned().collect();
        let closed_set = closeds.iter().cloned().collect();
        Ok(FiniteLattice {
            point_names,
            opens,
            closeds,
            open_set,
            closed_set,
        })
    }

    pub fn n_points(&self) -> usize {
        self.point_names.len()
    }

    pub fn point_names(&self) -> &[String] {
        &self.point_names
    }

    pub fn x_mask(&self) -> Mask {
        Mask::full(self.n_points())
    }

    pub fn empty_mask(&self) -> Mask {
        Mask::empty(self.n_points())
    }

    /// Opens in deterministic (mask) order.
    pub fn opens(&self) -> &[Mask] {
        &self.opens
    }

    /// Closeds (= compacts) in deterministic order.
    pub fn closeds(&self) -> &[Mask] {
        &self.closeds
    }

    pub fn is_open(&self, m: &Mask) -> bool {
        self.open_set.contains(m)
    }

    pub fn is_closed(&self, m: &Mask) -> bool {
        self.closed_set.contains(m)
    }

    /// Union of all closeds contained in the open set: the maximum of the
    /// directed family of compacts under it.
    pub fn kernel(&self, open: &Mask) -> Mask {
        let mut acc = self.empty_mask();
        for c in &self.closeds {
            if c.is_subset(open) {
                acc = acc.union(c);
            }
        }
        debug_assert!(self.is_closed(&acc), "closeds are closed under union");
        acc
    }

    /// Intersection of all opens containing the closed set.
    pub fn hull(&self, closed: &Mask) -> Mask {
        let mut acc = self.x_mask();
        for o in &self.opens {
            if closed.is_subset(o) {
                acc = acc.intersect(o);
            }
        }
        debug_assert!(self.is_open(&acc), "opens are closed under intersection");
        acc
    }

    /// Smallest closed superset (topological closure).
    pub fn closure(&self, m: &Mask) -> Mask {
        let mut acc = self.x_mask();
        for c in &self.closeds {
            if m.is_subset(c) {
                acc = acc.intersect(c);
            }
        }
        acc
    }

    fn closure_violation(&self) -> Option<String> {
        if !self.open_set.contains(&self.empty_mask()) {
            return Some("missing empty set among opens".into());
        }
        if !self.open_set.contains(&self.x_mask()) {
            return Some("missing X among opens".into());
        }
        for a in &self.opens {
            for b in &self.opens {
                let u = a.union(b);
                if !self.open_set.contains(&u) {
                    return Some(format!(
                        "opens not closed under union: {} | {} = {}",
                        self.format_points(a),
                        self.format_points(b),
                        self.format_points(&u)
                    ));
                }
                let i = a.intersect(b);
                if !self.open_set.contains(&i) {
                    return Some(format!(
                        "opens not closed under intersection: {} & {} = {}",
                        self.format_points(a),
                        self.format_points(b),
                        self.format_points(&i)
                    ));
                }
            }
        }
        None
    }

    pub fn ensure_wellformed(&self) -> Result<()> {
        match self.closure_violation() {
            Some(w) => Err(Error::MalformedLattice(w)),
            None => Ok(()),
        }
    }

    /// Full structural validation. Fails hard on closure violations;
    /// everything else lands in the report.
    pub fn validate(&self) -> Result<ValidationReport> {
        self.ensure_wellformed()?;
        let mut report = ValidationReport {
            lattice_closed: true,
            connected: true,
            normal: true,
            splitting: true,
            interpolating: true,
            notes: Vec::new(),
            counterexamples: Vec::new(),
        };

        // connected: only clopen sets are empty and X
        for o in &self.opens {
            if self.is_closed(o) && !o.is_empty() && *o != self.x_mask() {
                report.connected = false;
                report
                    .counterexamples
                    .push(format!("clopen set {}", self.format_points(o)));
            }
        }

        // normal: disjoint closeds have disjoint open supersets
        'normal: for (i, c) in self.closeds.iter().enumerate() {
            for d in self.closeds.iter().skip(i + 1) {
                if !c.is_disjoint(d) {
                    continue;
                }
                let ok = self.opens.iter().any(|u| {
                    c.is_subset(u)
                        && self
                            .opens
                            .iter()
                            .any(|v| d.is_subset(v) && u.is_disjoint(v))
                });
                if !ok {
                    report.normal = false;
                    report.counterexamples.push(format!(
                        "closeds {} and {} admit no disjoint open supersets",
                        self.format_points(c),
                        self.format_points(d)
                    ));
                    break 'normal;
                }
            }
        }

        // splitting: C <= U | V implies C = K | D with closeds K <= U, D <= V
        'split: for c in &self.closeds {
            for u in &self.opens {
                for v in &self.opens {
                    if !c.is_subset(&u.union(v)) {
                        continue;
                    }
                    let ok = self.closeds.iter().any(|k| {
                        k.is_subset(c) && k.is_subset(u) && {
                            self.closeds
                                .iter()
                                .any(|d| d.is_subset(c) && d.is_subset(v) && k.union(d) == *c)
                        }
                    });
                    if !ok {
                        report.splitting = false;
                        report.counterexamples.push(format!(
                            "no splitting of C={} inside U={}, V={}",
                            self.format_points(c),
                            self.format_points(u),
                            self.format_points(v)
                        ));
                        break 'split;
                    }
                }
            }
        }

        // interpolating: K <= U implies K <= V <= cl(V) <= U for some open V
        'interp: for k in &self.closeds {
            for u in &self.opens {
                if !k.is_subset(u) {
                    continue;
                }
                let ok = self
                    .opens
                    .iter()
                    .any(|v| k.is_subset(v) && self.closure(v).is_subset(u));
                if !ok {
                    report.interpolating = false;
                    report.counterexamples.push(format!(
                        "no interpolant between K={} and U={}",
                        self.format_points(k),
                        self.format_points(u)
                    ));
                    break 'interp;
                }
            }
        }

        Ok(report)
    }

    pub fn format_points(&self, m: &Mask) -> String {
        if m.is_empty() {
            return "points[]".to_string();
        }
        let names: Vec<&str> = m.iter().map(|i| self.point_names[i].as_str()).collect();
        format!("points[{}]", names.join(" "))
    }

    pub fn parse_points(&self, text: &str) -> Result<Mask> {
        let t = text.trim();
        let inner = t
            .strip_prefix("points[")
            .and_then(|x| x.strip_suffix(']'))
            .ok_or_else(|| Error::Parse(format!("expected points[...], got `{t}`")))?;
        self.mask_from_names(inner.split_whitespace())
    }

    pub fn mask_from_names<'a, I: IntoIterator<Item = &'a str>>(&self, names: I) -> Result<Mask> {
        let mut m = self.empty_mask();
        for name in names {
            let idx = self
                .point_names
                .iter()
                .position(|p| p == name)
                .ok_or_else(|| Error::Parse(format!("unknown point `{name}`")))?;
            if m.contains(idx) {
                return Err(Error::Parse(format!("duplicate point `{name}`")));
            }
            m.insert(idx);
        }
        Ok(m)
    }

    /// Line-based lattice file: `points: a b c`, then one `open: ...` line
    /// per open set (an empty member list is the empty set).
    pub fn parse_file(text: &str) -> Result<FiniteLattice> {
        let mut names: Option<Vec<String>> = None;
        let mut open_lines: Vec<String> = Vec::new();
        for line in text.lines() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            if let Some(rest) = line.strip_prefix("points:") {
                if names.is_some() {
                    return Err(Error::Parse("duplicate `points:` line".into()));
                }
                let ns: Vec<String> = rest.split_whitespace().map(|s| s.to_string()).collect();
                names = Some(ns);
            } else if let Some(rest) = line.strip_prefix("open:") {
                open_lines.push(rest.to_string());
            } else {
                return Err(Error::Parse(format!("unrecognized lattice line `{line}`")));
            }
        }
        let names = names.ok_or_else(|| Error::Parse("missing `points:` line".into()))?;
        let lat = FiniteLattice::new(names, Vec::new())?;
        let mut opens = Vec::new();
        for l in &open_lines {
            opens.push(lat.mask_from_names(l.split_whitespace())?);
        }
        FiniteLattice::new(lat.point_names, opens)
    }
}

/// The three-point witness lattice used throughout the tests: opens
/// `{}, {a}, {a,b}, {a,c}, X`. Connected but not normal.
pub fn l3() -> FiniteLattice {
    FiniteLattice::parse_file(
        "points: a b c\nopen:\nopen: a\nopen: a b\nopen: a c\nopen: a b c\n",
    )
    .expect("l3 is well-formed")
}

/// Chain lattice on points 1..=n: opens are prefixes.
pub fn chain(n: usize) -> FiniteLattice {
    let names: Vec<String> = (1..=n).map(|i| i.to_string()).collect();
    let mut opens = vec![Mask::empty(n)];
    for i in 1..=n {
        opens.push(Mask::from_indices(n, 0..i));
    }
    FiniteLattice::new(names, opens).expect("chain is well-formed")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn l3_validation_facts() {
        let lat = l3();
        let rep = lat.validate().unwrap();
        assert!(rep.lattice_closed);
        assert!(rep.connected);
        // closeds {b} and {c} have no disjoint open supersets
        assert!(!rep.normal);
        assert!(!rep.counterexamples.is_empty());
    }

    #[test]
    fn chain_is_normal() {
        let rep = chain(3).validate().unwrap();
        assert!(rep.normal, "no disjoint nonempty closeds in a chain");
        assert!(rep.splitting);
    }

    #[test]
    fn closure_violation_is_reported() {
        // opens {}, {a}, {b}, X is missing {a} | {b}
        let names = vec!["a".to_string(), "b".to_string(), "c".to_string()];
        let opens = vec![
            Mask::empty(3),
            Mask::singleton(3, 0),
            Mask::singleton(3, 1),
            Mask::full(3),
        ];
        let lat = FiniteLattice::new(names, opens).unwrap();
        match lat.validate() {
            Err(Error::MalformedLattice(msg)) => assert!(msg.contains("union"), "{msg}"),
            other => panic!("expected MalformedLattice, got {other:?}"),
        }
    }

    #[test]
    fn kernel_and_hull() {
        let lat = l3();
        // kernel({a,b}) = {b}
        let ab = lat.mask_from_names(["a", "b"]).unwrap();
        let b = lat.mask_from_names(["b"]).unwrap();
        assert_eq!(lat.kernel(&ab), b);
        // X is both open and closed
        assert_eq!(lat.kernel(&lat.x_mask()), lat.x_mask());
        assert_eq!(lat.hull(&lat.x_mask()), lat.x_mask());
        // hull({b}) = {a,b}
        assert_eq!(lat.hull(&b), ab);
    }

    #[test]
    fn file_parse_rejects_unknowns_and_duplicates() {
        assert!(FiniteLattice::parse_file("points: a b\nopen: a z\n").is_err());
        assert!(FiniteLattice::parse_file("points: a a\nopen:\n").is_err());
        assert!(FiniteLattice::parse_file("points: a b\nopen: a a\n").is_err());
    }

    #[test]
    fn complement_is_involution() {
        let lat = l3();
        for o in lat.opens() {
            let c = o.complement();
            assert!(lat.is_closed(&c));
            assert_eq!(c.complement(), *o);
        }
    }
}
