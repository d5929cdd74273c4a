//! Deterministic probe families for classification and theorem suites.
//!
//! Lattice models are exhausted. Grid families are exponential, so the
//! probes mix structure (boxes, bands, singletons, complements) with
//! seed-fixed random masks; every check that runs over probes reports
//! how many regions it actually touched.

use crate::mask::Mask;
use crate::space::{Model, ModelKind};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeSet;

/// Deterministic compact probe masks. `extra` controls the number of
/// sampled masks on grids.
pub fn probe_masks(model: &Model, seed: u64, extra: usize) -> Vec<Mask> {
    match model.kind() {
        ModelKind::Lattice(l) => l.closeds().to_vec(),
        ModelKind::Grid(g) => {
            let mut set: BTreeSet<Mask> = BTreeSet::new();
            set.insert(g.empty());
            set.insert(g.all_cells());
            for i in 0..g.n_cells() {
                set.insert(Mask::singleton(g.n_cells(), i));
            }
            let boxes = g.all_boxes();
            if boxes.len() <= 1400 {
                set.extend(boxes);
            } else {
                // spaced selection keeps the family deterministic
                let step = boxes.len() / 1400 + 1;
                set.extend(boxes.into_iter().step_by(step));
            }
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x70726f6265);
            for _ in 0..extra {
                let density = rng.gen_range(5..95);
                let mut m = g.empty();
                for i in 0..g.n_cells() {
                    if rng.gen_range(0..100) < density {
                        m.insert(i);
                    }
                }
                set.insert(m);
            }
            set.into_iter().collect()
        }
    }
}

/// Open probe masks (lattice: the open family; grid: same masks as the
/// compact probes, read with open flavor).
pub fn open_probe_masks(model: &Model, seed: u64, extra: usize) -> Vec<Mask> {
    match model.kind() {
        ModelKind::Lattice(l) => l.opens().to_vec(),
        ModelKind::Grid(_) => probe_masks(model, seed, extra),
    }
}

/// Pairs `(a, b)` with `a` a subset of `b`, drawn from the list.
pub fn nested_pairs(masks: &[Mask], cap: usize) -> Vec<(Mask, Mask)> {
    let mut out = Vec::new();
    'outer: for (i, a) in masks.iter().enumerate() {
        for b in masks.iter().skip(i + 1) {
            if a.is_subset(b) {
                out.push((a.clone(), b.clone()));
            } else if b.is_subset(a) {
                out.push((b.clone(), a.clone()));
            }
            if out.len() >= cap {
                break 'outer;
            }
        }
    }
    out
}

/// Model-disjoint compact pairs derived deterministically from the probe
/// list (on grids the second member is pushed off the first's dilation).
pub fn disjoint_compact_pairs(model: &Model, masks: &[Mask], cap: usize) -> Vec<(Mask, Mask)> {
    let mut out = Vec::new();
    match model.kind() {
        ModelKind::Lattice(_) => {
            'outer: for (i, a) in masks.iter().enumerate() {
                for b in masks.iter().skip(i + 1) {
                    if a.is_disjoint(b) {
                        out.push((a.clone(), b.clone()));
                        if out.len() >= cap {
                            break 'outer;
                        }
                    }
                }
            }
        }
        ModelKind::Grid(g) => {
            'outer2: for (i, a) in masks.iter().enumerate() {
                if a.is_empty() {
                    continue;
                }
                for b in masks.iter().skip(i + 1) {
                    let trimmed = b.difference(&g.dilate(a));
                    if !trimmed.is_empty() {
                        out.push((a.clone(), trimmed));
                        if out.len() >= cap {
                            break 'outer2;
                        }
                    }
                }
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::space::{DyadicGrid, Model};

    #[test]
    fn probes_are_deterministic() {
        let m = Model::grid(DyadicGrid::new(3).unwrap());
        let a = probe_masks(&m, 7, 50);
        let b = probe_masks(&m, 7, 50);
        assert_eq!(a, b);
        let c = probe_masks(&m, 8, 50);
        assert_ne!(a, c);
    }

    #[test]
    fn disjoint_pairs_respect_the_model() {
        let m = Model::grid(DyadicGrid::new(2).unwrap());
        let probes = probe_masks(&m, 7, 20);
        for (a, b) in disjoint_compact_pairs(&m, &probes, 200) {
            assert!(m.compacts_disjoint(&a, &b));
        }
    }
}
