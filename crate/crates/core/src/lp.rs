//! Dense two-phase simplex over exact rationals.
//!
//! Sized for the workbench's systems: a handful of atom or cell weight
//! variables against a few hundred region constraints. Bland's rule
//! keeps the pivoting finite; everything is exact, so "optimal" means
//! optimal.

use crate::value::Rat;
use num_traits::{One, Signed, Zero};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Rel {
    Le,
    Ge,
    Eq,
}

#[derive(Debug, Clone)]
pub struct Constraint {
    pub coeffs: Vec<Rat>,
    pub rel: Rel,
    pub rhs: Rat,
}

#[derive(Debug, Clone)]
pub struct Lp {
    /// objective coefficients; the solver maximizes
    pub maximize: Vec<Rat>,
    pub constraints: Vec<Constraint>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LpOutcome {
    Optimal { x: Vec<Rat>, objective: Rat },
    Infeasible,
    Unbounded,
}

struct Tableau {
    rows: Vec<Vec<Rat>>,
    rhs: Vec<Rat>,
    basis: Vec<usize>,
    n_cols: usize,
    banned: Vec<bool>,
}

impl Tableau {
    fn reduced_costs(&self, cost: &[Rat]) -> (Vec<Rat>, Rat) {
        let m = self.rows.len();
        let mut red = cost.to_vec();
        let mut obj = Rat::zero();
        for i in 0..m {
            let cb = &cost[self.basis[i]];
            if cb.is_zero() {
                continue;
            }
            for j in 0..self.n_cols {
                let adj = cb * &self.rows[i][j];
                red[j] -= adj;
            }
            obj += cb * &self.rhs[i];
        }
        (red, obj)
    }

    fn pivot(&mut self, row: usize, col: usize) {
        let pv = self.rows[row][col].clone();
        debug_assert!(!pv.is_zero());
        for j in 0..self.n_cols {
            self.rows[row][j] = &self.rows[row][j] / &pv;
        }
        self.rhs[row] = &self.rhs[row] / &pv;
        for i in 0..self.rows.len() {
            if i == row {
                continue;
            }
            let factor = self.rows[i][col].clone();
            if factor.is_zero() {
                continue;
            }
            for j in 0..self.n_cols {
                let adj = &factor * &self.rows[row][j];
                self.rows[i][j] -= adj;
            }
            let adj = &factor * &self.rhs[row];
            self.rhs[i] -= adj;
        }
        self.basis[row] = col;
    }

    /// Maximize `cost` with Bland's rule. Returns false on unboundedness.
    fn optimize(&mut self, cost: &[Rat]) -> bool {
        loop {
            let (red, _) = self.reduced_costs(cost);
            let entering = (0..self.n_cols)
                .find(|j| !self.banned[*j] && red[*j].is_positive());
            let Some(col) = entering else {
                return true;
            };
            let mut leave: Option<(usize, Rat)> = None;
            for i in 0..self.rows.len() {
                if self.rows[i][col].is_positive() {
                    let ratio = &self.rhs[i] / &self.rows[i][col];
                    let better = match &leave {
                        None => true,
                        Some((li, lr)) => {
                            ratio < *lr || (ratio == *lr && self.basis[i] < self.basis[*li])
                        }
                    };
                    if better {
                        leave = Some((i, ratio));
                    }
                }
            }
            match leave {
                Some((row, _)) => self.pivot(row, col),
                None => return false,
            }
        }
    }
}

pub fn solve(lp: &Lp) -> LpOutcome {
    let n = lp.maximize.len();
    let m = lp.constraints.len();

    // normalize rows to nonnegative rhs
    let mut rows_in: Vec<(Vec<Rat>, Rel, Rat)> = Vec::with_capacity(m);
    for c in &lp.constraints {
        assert_eq!(c.coeffs.len(), n, "constraint arity mismatch");
        if c.rhs.is_negative() {
            let coeffs: Vec<Rat> = c.coeffs.iter().map(|x| -x.clone()).collect();
            let rel = match c.rel {
                Rel::Le => Rel::Ge,
                Rel::Ge => Rel::Le,
                Rel::Eq => Rel::Eq,
            };
            rows_in.push((coeffs, rel, -c.rhs.clone()));
        } else {
            rows_in.push((c.coeffs.clone(), c.rel, c.rhs.clone()));
        }
    }

    let n_slack = rows_in.iter().filter(|r| r.1 != Rel::Eq).count();
    let n_art = rows_in.iter().filter(|r| r.1 != Rel::Le).count();
    let n_cols = n + n_slack + n_art;

    let mut rows = vec![vec![Rat::zero(); n_cols]; m];
    let mut rhs = vec![Rat::zero(); m];
    let mut basis = vec![0usize; m];
    let mut slack_at = n;
    let mut art_at = n + n_slack;
    let mut art_cols = Vec::new();

    for (i, (coeffs, rel, b)) in rows_in.iter().enumerate() {
        for (j, a) in coeffs.iter().enumerate() {
            rows[i][j] = a.clone();
        }
        rhs[i] = b.clone();
        match rel {
            Rel::Le => {
                rows[i][slack_at] = Rat::one();
                basis[i] = slack_at;
                slack_at += 1;
            }
            Rel::Ge => {
                rows[i][slack_at] = -Rat::one();
                slack_at += 1;
                rows[i][art_at] = Rat::one();
                basis[i] = art_at;
                art_cols.push(art_at);
                art_at += 1;
            }
            Rel::Eq => {
                rows[i][art_at] = Rat::one();
                basis[i] = art_at;
                art_cols.push(art_at);
                art_at += 1;
            }
        }
    }

    let mut t = Tableau {
        rows,
        rhs,
        basis,
        n_cols,
        banned: vec![false; n_cols],
    };

    // phase 1: drive the artificials to zero
    if !art_cols.is_empty() {
        let mut cost1 = vec![Rat::zero(); n_cols];
        for a in &art_cols {
            cost1[*a] = -Rat::one();
        }
        let bounded = t.optimize(&cost1);
        debug_assert!(bounded, "phase-1 objective is bounded by zero");
        let (_, obj) = t.reduced_costs(&cost1);
        if obj.is_negative() {
            return LpOutcome::Infeasible;
        }
        // ban artificials; kick basic ones out where a substitute exists
        for i in 0..m {
            if art_cols.contains(&t.basis[i]) {
                if let Some(col) = (0..n + n_slack).find(|j| !t.rows[i][*j].is_zero()) {
                    t.pivot(i, col);
                }
            }
        }
        for a in art_cols {
            t.banned[a] = true;
        }
    }

    // phase 2
    let mut cost2 = vec![Rat::zero(); n_cols];
    cost2[..n].clone_from_slice(&lp.maximize);
    if !t.optimize(&cost2) {
        return LpOutcome::Unbounded;
    }
    let (_, objective) = t.reduced_costs(&cost2);
    let mut x = vec![Rat::zero(); n];
    for i in 0..m {
        if t.basis[i] < n {
            x[t.basis[i]] = t.rhs[i].clone();
        }
    }
    LpOutcome::Optimal { x, objective }
}

/// Feasibility of a system (zero objective).
pub fn feasible(n: usize, constraints: Vec<Constraint>) -> Option<Vec<Rat>> {
    let lp = Lp {
        maximize: vec![Rat::zero(); n],
        constraints,
    };
    match solve(&lp) {
        LpOutcome::Optimal { x, .. } => Some(x),
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::value::rat;

    fn r(n: i64) -> Rat {
        rat(n, 1)
    }

    #[test]
    fn small_max() {
        // max x + y, x + 2y <= 4, 3x + y <= 6
        let lp = Lp {
            maximize: vec![r(1), r(1)],
            constraints: vec![
                Constraint {
                    coeffs: vec![r(1), r(2)],
                    rel: Rel::Le,
                    rhs: r(4),
                },
                Constraint {
                    coeffs: vec![r(3), r(1)],
                    rel: Rel::Le,
                    rhs: r(6),
                },
            ],
        };
        match solve(&lp) {
            LpOutcome::Optimal { x, objective } => {
                assert_eq!(objective, rat(14, 5));
                assert_eq!(x, vec![rat(8, 5), rat(6, 5)]);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn equality_and_infeasible() {
        // x + y = 2, x + y <= 1 is infeasible
        let lp = Lp {
            maximize: vec![r(0), r(0)],
            constraints: vec![
                Constraint {
                    coeffs: vec![r(1), r(1)],
                    rel: Rel::Eq,
                    rhs: r(2),
                },
                Constraint {
                    coeffs: vec![r(1), r(1)],
                    rel: Rel::Le,
                    rhs: r(1),
                },
            ],
        };
        assert_eq!(solve(&lp), LpOutcome::Infeasible);
    }

    #[test]
    fn unbounded() {
        let lp = Lp {
            maximize: vec![r(1)],
            constraints: vec![Constraint {
                coeffs: vec![r(-1)],
                rel: Rel::Le,
                rhs: r(1),
            }],
        };
        assert_eq!(solve(&lp), LpOutcome::Unbounded);
    }

    /// Independent oracle: enumerate basic solutions from all ways of
    /// making n of the constraints (or sign bounds) tight, solve the
    /// square exact system, keep feasible ones.
    fn oracle(lp: &Lp) -> Option<Rat> {
        let n = lp.maximize.len();
        let mut eqs: Vec<(Vec<Rat>, Rat)> = Vec::new();
        for c in &lp.constraints {
            eqs.push((c.coeffs.clone(), c.rhs.clone()));
        }
        for i in 0..n {
            let mut row = vec![Rat::zero(); n];
            row[i] = Rat::one();
            eqs.push((row, Rat::zero()));
        }
        let total = eqs.len();
        let mut best: Option<Rat> = None;
        let mut pick = vec![0usize; n];
        fn combos(
            start: usize,
            depth: usize,
            n: usize,
            total: usize,
            pick: &mut Vec<usize>,
            eqs: &[(Vec<Rat>, Rat)],
            lp: &Lp,
            best: &mut Option<Rat>,
        ) {
            if depth == n {
                if let Some(x) = solve_square(pick, eqs, n) {
                    if is_feasible(lp, &x) {
                        let obj: Rat = lp
                            .maximize
                            .iter()
                            .zip(x.iter())
                            .map(|(c, v)| c * v)
                            .sum();
                        match best {
                            None => *best = Some(obj),
                            Some(b) => {
                                if obj > *b {
                                    *best = Some(obj);
                                }
                            }
                        }
                    }
                }
                return;
            }
            for i in start..total {
                pick[depth] = i;
                combos(i + 1, depth + 1, n, total, pick, eqs, lp, best);
            }
        }
        combos(0, 0, n, total, &mut pick, &eqs, lp, &mut best);
        best
    }

    fn solve_square(pick: &[usize], eqs: &[(Vec<Rat>, Rat)], n: usize) -> Option<Vec<Rat>> {
        let mut a: Vec<Vec<Rat>> = pick.iter().map(|i| eqs[*i].0.clone()).collect();
        let mut b: Vec<Rat> = pick.iter().map(|i| eqs[*i].1.clone()).collect();
        for col in 0..n {
            let piv = (col..n).find(|r| !a[*r][col].is_zero())?;
            a.swap(col, piv);
            b.swap(col, piv);
            let p = a[col][col].clone();
            for j in 0..n {
                a[col][j] = &a[col][j] / &p;
            }
            b[col] = &b[col] / &p;
            for r2 in 0..n {
                if r2 != col && !a[r2][col].is_zero() {
                    let f = a[r2][col].clone();
                    for j in 0..n {
                        let adj = &f * &a[col][j];
                        a[r2][j] -= adj;
                    }
                    let adj = &f * &b[col];
                    b[r2] -= adj;
                }
            }
        }
        Some(b)
    }

    fn is_feasible(lp: &Lp, x: &[Rat]) -> bool {
        if x.iter().any(|v| v.is_negative()) {
            return false;
        }
        lp.constraints.iter().all(|c| {
            let lhs: Rat = c.coeffs.iter().zip(x.iter()).map(|(a, v)| a * v).sum();
            match c.rel {
                Rel::Le => lhs <= c.rhs,
                Rel::Ge => lhs >= c.rhs,
                Rel::Eq => lhs == c.rhs,
            }
        })
    }

    #[test]
    fn matches_vertex_enumeration_oracle() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(41);
        for _ in 0..25 {
            let n = rng.gen_range(1..=3);
            let m = rng.gen_range(1..=4);
            let mut constraints = Vec::new();
            for _ in 0..m {
                let coeffs: Vec<Rat> = (0..n).map(|_| r(rng.gen_range(0..4))).collect();
                let rhs = r(rng.gen_range(0..6));
                constraints.push(Constraint {
                    coeffs,
                    rel: Rel::Le,
                    rhs,
                });
            }
            // bound the box so the oracle always has vertices
            for i in 0..n {
                let mut coeffs = vec![r(0); n];
                coeffs[i] = r(1);
                constraints.push(Constraint {
                    coeffs,
                    rel: Rel::Le,
                    rhs: r(7),
                });
            }
            let lp = Lp {
                maximize: (0..n).map(|_| r(rng.gen_range(-2..4))).collect(),
                constraints,
            };
            let expected = oracle(&lp).expect("bounded nonempty");
            match solve(&lp) {
                LpOutcome::Optimal { objective, .. } => assert_eq!(objective, expected),
                other => panic!("expected optimal, got {other:?}"),
            }
        }
    }
}
