//! Exact classification of set functions against the measure/TM/DTM
//! axioms and the finiteness taxonomy.
//!
//! Lattice models are checked exhaustively. Grid checks run over the
//! deterministic probe families; a true flag there means "no violation
//! found on the tested family", and the report records how much was
//! tested. Every false flag carries a concrete counterexample.

use crate::error::{Error, Result};
use crate::mask::Mask;
use crate::probes::{disjoint_compact_pairs, nested_pairs, open_probe_masks, probe_masks};
use crate::setfn::SetFunction;
use crate::space::{Flavor, Model, ModelKind, Region};
use crate::value::{ExtValue, Rat};
use num_traits::{Signed, Zero};
use std::collections::BTreeMap;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Flags {
    pub is_measure_restriction: bool,
    pub is_radon_surrogate: bool,
    pub is_tm: bool,
    pub is_dtm: bool,
    pub is_stm: bool,
    pub is_sdtm: bool,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Finiteness {
    pub compact_finite: bool,
    pub singleton_finite: bool,
    pub locally_finite: bool,
    pub simple: bool,
    pub finite: bool,
}

#[derive(Debug, Clone)]
pub struct Violation {
    pub axiom: &'static str,
    pub detail: String,
}

#[derive(Debug, Clone)]
pub struct ClassificationReport {
    pub name: String,
    pub flags: Flags,
    pub fin: Finiteness,
    pub norm: ExtValue,
    pub norm_exact: bool,
    pub violations: Vec<Violation>,
    pub notes: Vec<String>,
    pub tested_regions: usize,
    /// Atom weights reproducing the function, when it is a measure
    /// restriction (atom label, weight).
    pub atom_weights: Option<Vec<(String, Rat)>>,
}

impl ClassificationReport {
    pub fn violation_for(&self, axiom: &str) -> Option<&Violation> {
        self.violations.iter().find(|v| v.axiom == axiom)
    }
}

struct Ctx<'a> {
    f: &'a SetFunction,
    model: Model,
    violations: Vec<Violation>,
    notes: Vec<String>,
    seen_pos_inf: bool,
    seen_neg_inf: bool,
    seen_finite: bool,
    seen_negative: Option<String>,
    tested: usize,
}

impl<'a> Ctx<'a> {
    fn eval(&mut self, region: &Region) -> Result<ExtValue> {
        let v = self.f.value(region)?;
        self.tested += 1;
        match &v {
            ExtValue::PosInf => self.seen_pos_inf = true,
            ExtValue::NegInf => self.seen_neg_inf = true,
            ExtValue::Finite(r) => {
                self.seen_finite = true;
                if r.is_negative() && self.seen_negative.is_none() {
                    self.seen_negative =
                        Some(format!("{} = {v}", self.model.format_region(region)));
                }
            }
        }
        Ok(v)
    }

    fn try_eval(&mut self, region: &Region) -> Option<ExtValue> {
        match self.eval(region) {
            Ok(v) => Some(v),
            Err(e) => {
                self.notes
                    .push(format!("skipped {}: {e}", self.model.format_region(region)));
                None
            }
        }
    }

    fn violate(&mut self, axiom: &'static str, detail: String) {
        // one witness per axiom keeps reports readable
        if !self.violations.iter().any(|v| v.axiom == axiom) {
            self.violations.push(Violation { axiom, detail });
        }
    }
}

pub fn classify(f: &SetFunction, seed: u64, extra_probes: usize) -> Result<ClassificationReport> {
    let model = f.model().clone();
    let mut ctx = Ctx {
        f,
        model: model.clone(),
        violations: Vec::new(),
        notes: Vec::new(),
        seen_pos_inf: false,
        seen_neg_inf: false,
        seen_finite: false,
        seen_negative: None,
        tested: 0,
    };

    let compacts = probe_masks(&model, seed, extra_probes);
    let opens = open_probe_masks(&model, seed, extra_probes);

    // the empty set must vanish
    let empty = model.empty_mask();
    for flavor in [Flavor::Closed, Flavor::Open] {
        if let Some(v) = ctx.try_eval(&Region {
            flavor,
            mask: empty.clone(),
        }) {
            if !v.is_zero() {
                ctx.violate("empty-zero", format!("value on the empty set is {v}"));
            }
        }
    }

    // sweep values for range diagnostics
    for c in &compacts {
        ctx.try_eval(&Region::closed(c.clone()));
    }
    for o in &opens {
        ctx.try_eval(&Region::open(o.clone()));
    }
    if ctx.seen_pos_inf && ctx.seen_neg_inf {
        return Err(Error::MixedInfinities(f.name().to_string()));
    }
    if !ctx.seen_finite {
        ctx.violate("not-identically-infinite", "no finite value observed".into());
    }
    if let Some(w) = ctx.seen_negative.clone() {
        ctx.violate("nonneg", w);
    }

    check_additivity_on_compacts(&mut ctx, &compacts);
    check_regularity(&mut ctx, &opens, &compacts);
    check_splitting_additivity(&mut ctx, &opens, &compacts);
    let fin = finiteness(&mut ctx, &compacts);
    let (norm, norm_exact) = norm_of(&mut ctx, &compacts);
    let atom_weights = measure_restriction(&mut ctx, &opens, &compacts);

    let has = |a: &str| ctx.violations.iter().any(|v| v.axiom == a);
    let base_sound = !has("empty-zero") && !has("not-identically-infinite");
    let regular = !has("inner-regularity") && !has("outer-regularity");
    let is_dtm = base_sound && !has("nonneg") && !has("additivity-compacts") && regular;
    let is_tm = is_dtm && !has("additivity-splittings");
    let is_sdtm = base_sound && !has("additivity-compacts") && !has("net-inner") && !has("net-outer");
    let is_stm = is_sdtm && !has("additivity-splittings");
    let is_measure_restriction = is_dtm && atom_weights.is_some();
    if !is_measure_restriction && atom_weights.is_none() && !has("measure-feasibility") {
        ctx.violate(
            "measure-feasibility",
            "no nonnegative atom weights reproduce the values".into(),
        );
    }
    let flags = Flags {
        is_measure_restriction,
        is_radon_surrogate: is_measure_restriction && fin.compact_finite,
        is_tm,
        is_dtm,
        is_stm,
        is_sdtm,
    };

    Ok(ClassificationReport {
        name: f.name().to_string(),
        flags,
        fin,
        norm,
        norm_exact,
        violations: ctx.violations,
        notes: ctx.notes,
        tested_regions: ctx.tested,
        atom_weights: if is_measure_restriction { atom_weights } else { None },
    })
}

fn check_additivity_on_compacts(ctx: &mut Ctx, compacts: &[Mask]) {
    let pairs = disjoint_compact_pairs(&ctx.model, compacts, 4000);
    for (a, b) in pairs {
        let union = a.union(&b);
        let (Some(va), Some(vb), Some(vu)) = (
            ctx.try_eval(&Region::closed(a.clone())),
            ctx.try_eval(&Region::closed(b.clone())),
            ctx.try_eval(&Region::closed(union.clone())),
        ) else {
            continue;
        };
        match va.add(&vb) {
            Ok(sum) => {
                if sum != vu {
                    let model = ctx.model.clone();
                    ctx.violate(
                        "additivity-compacts",
                        format!(
                            "{} + {} = {} but union {} has value {}",
                            model.format_mask(&a),
                            model.format_mask(&b),
                            sum,
                            model.format_mask(&union),
                            vu
                        ),
                    );
                }
            }
            Err(_) => {
                // both infinities present; the range sweep already errors
            }
        }
    }
}

fn check_regularity(ctx: &mut Ctx, opens: &[Mask], compacts: &[Mask]) {
    let model = ctx.model.clone();
    match model.kind() {
        ModelKind::Lattice(_) => {
            for u in opens {
                let Some(vu) = ctx.try_eval(&Region::open(u.clone())) else {
                    continue;
                };
                let mut sup: Option<ExtValue> = None;
                for c in model.compacts_under(u) {
                    if let Some(v) = ctx.try_eval(&Region::closed(c)) {
                        sup = Some(match sup {
                            None => v,
                            Some(s) => s.max(v),
                        });
                    }
                }
                if let Some(sup) = sup {
                    if sup != vu {
                        ctx.violate(
                            "inner-regularity",
                            format!(
                                "open {} has value {vu} but supremum over compacts inside is {sup}",
                                model.format_mask(u)
                            ),
                        );
                    }
                }
                // net form: value at the family's maximal element
                let ker = model.inner_limit_compact(u);
                if let Some(vk) = ctx.try_eval(&Region::closed(ker.clone())) {
                    if vk != vu {
                        ctx.violate(
                            "net-inner",
                            format!(
                                "open {} has value {vu}, limit over compacts gives {vk} at {}",
                                model.format_mask(u),
                                model.format_mask(&ker)
                            ),
                        );
                    }
                }
            }
            for cmask in compacts {
                let Some(vc) = ctx.try_eval(&Region::closed(cmask.clone())) else {
                    continue;
                };
                let mut inf: Option<ExtValue> = None;
                for o in model.opens_over(cmask) {
                    if let Some(v) = ctx.try_eval(&Region::open(o)) {
                        inf = Some(match inf {
                            None => v,
                            Some(s) => s.min(v),
                        });
                    }
                }
                if let Some(inf) = inf {
                    if inf != vc {
                        ctx.violate(
                            "outer-regularity",
                            format!(
                                "closed {} has value {vc} but infimum over opens around it is {inf}",
                                model.format_mask(cmask)
                            ),
                        );
                    }
                }
                let hull = model.outer_limit_open(cmask);
                if let Some(vh) = ctx.try_eval(&Region::open(hull.clone())) {
                    if vh != vc {
                        ctx.violate(
                            "net-outer",
                            format!(
                                "closed {} has value {vc}, limit over opens gives {vh}",
                                model.format_mask(cmask)
                            ),
                        );
                    }
                }
            }
        }
        ModelKind::Grid(_) => {
            // the directed families attain their limits at the region's
            // own cell set, so regularity is flavor consistency
            for mask in compacts {
                let (Some(vo), Some(vc)) = (
                    ctx.try_eval(&Region::open(mask.clone())),
                    ctx.try_eval(&Region::closed(mask.clone())),
                ) else {
                    continue;
                };
                if vo != vc {
                    let detail = format!(
                        "open/closed values differ at {}: {vo} vs {vc}",
                        model.format_mask(mask)
                    );
                    ctx.violate("inner-regularity", detail.clone());
                    ctx.violate("outer-regularity", detail.clone());
                    ctx.violate("net-inner", detail.clone());
                    ctx.violate("net-outer", detail);
                }
            }
        }
    }
}

/// Additivity over disjoint splittings inside the union of the open and
/// compact families.
fn check_splitting_additivity(ctx: &mut Ctx, opens: &[Mask], compacts: &[Mask]) {
    let model = ctx.model.clone();
    match model.kind() {
        ModelKind::Lattice(_) => {
            let mut regions: Vec<Region> = Vec::new();
            regions.extend(opens.iter().cloned().map(Region::open));
            regions.extend(compacts.iter().cloned().map(Region::closed));
            for (i, a) in regions.iter().enumerate() {
                for b in regions.iter().skip(i + 1) {
                    if !a.mask.is_disjoint(&b.mask) {
                        continue;
                    }
                    let union = a.mask.union(&b.mask);
                    let mut union_regions = Vec::new();
                    if model.is_open(&union) {
                        union_regions.push(Region::open(union.clone()));
                    }
                    if model.is_closed(&union) {
                        union_regions.push(Region::closed(union.clone()));
                    }
                    for e in union_regions {
                        check_split(ctx, &e, a, b);
                    }
                }
            }
        }
        ModelKind::Grid(g) => {
            for mask in compacts.iter().chain(opens.iter()) {
                if mask.is_empty() {
                    continue;
                }
                let inner = g.erode(mask);
                // compact E = compact (E minus inner part) | open (inner part)
                for part in [inner.clone(), first_component(g, &inner)] {
                    if part.is_empty() || part == *mask {
                        continue;
                    }
                    let e = Region::closed(mask.clone());
                    let k = Region::closed(mask.difference(&part));
                    let u = Region::open(part.clone());
                    check_split(ctx, &e, &k, &u);
                    // open E = compact part | open rest
                    let e_open = Region::open(mask.clone());
                    let kc = Region::closed(part.clone());
                    let rest = Region::open(mask.difference(&part));
                    check_split(ctx, &e_open, &kc, &rest);
                }
                // open E split along its disconnection
                let comps = g.components(mask, false);
                if comps.len() >= 2 {
                    let first = comps[0].clone();
                    let rest = mask.difference(&first);
                    check_split(
                        ctx,
                        &Region::open(mask.clone()),
                        &Region::open(first),
                        &Region::open(rest),
                    );
                }
            }
        }
    }
}

fn first_component(g: &crate::space::DyadicGrid, mask: &Mask) -> Mask {
    g.components(mask, true)
        .into_iter()
        .next()
        .unwrap_or_else(|| g.empty())
}

fn check_split(ctx: &mut Ctx, e: &Region, a: &Region, b: &Region) {
    let (Some(ve), Some(va), Some(vb)) = (ctx.try_eval(e), ctx.try_eval(a), ctx.try_eval(b)) else {
        return;
    };
    if let Ok(sum) = va.add(&vb) {
        if sum != ve {
            let model = ctx.model.clone();
            ctx.violate(
                "additivity-splittings",
                format!(
                    "{} splits as {} + {}: {va} + {vb} = {sum} but whole has value {ve}",
                    model.format_region(e),
                    model.format_region(a),
                    model.format_region(b)
                ),
            );
        }
    }
}

fn finiteness(ctx: &mut Ctx, compacts: &[Mask]) -> Finiteness {
    let model = ctx.model.clone();
    let x = model.x_mask();
    let vx = ctx.try_eval(&Region::closed(x.clone()));

    let compact_finite = if ctx.f.claims().monotone {
        matches!(&vx, Some(v) if v.is_finite())
    } else {
        compacts
            .iter()
            .all(|c| matches!(ctx.try_eval(&Region::closed(c.clone())), Some(v) if v.is_finite()))
    };

    let mut singleton_finite = true;
    let mut locally_finite = true;
    match model.kind() {
        ModelKind::Lattice(l) => {
            for p in 0..l.n_points() {
                let single = Mask::singleton(l.n_points(), p);
                let ov = outer_value_in(ctx, &single);
                if !matches!(&ov, Some(v) if v.is_finite()) {
                    singleton_finite = false;
                }
                let mut local = false;
                for o in l.opens() {
                    if o.contains(p) {
                        if let Some(v) = ctx.try_eval(&Region::open(o.clone())) {
                            if v.is_finite() {
                                local = true;
                                break;
                            }
                        }
                    }
                }
                if !local {
                    locally_finite = false;
                }
            }
        }
        ModelKind::Grid(g) => {
            for c in 0..g.n_cells() {
                let single = Mask::singleton(g.n_cells(), c);
                match ctx.try_eval(&Region::open(single.clone())) {
                    Some(v) if v.is_finite() => {}
                    _ => {
                        singleton_finite = false;
                        locally_finite = false;
                    }
                }
            }
        }
    }

    let values_01 = compacts.iter().all(|c| {
        matches!(
            ctx.try_eval(&Region::closed(c.clone())),
            Some(v) if v.is_zero() || v == ExtValue::one()
        )
    });

    let nonneg = ctx.seen_negative.is_none() && !ctx.seen_neg_inf;
    let finite = nonneg && matches!(&vx, Some(v) if v.is_finite());

    Finiteness {
        compact_finite,
        singleton_finite,
        locally_finite,
        simple: values_01,
        finite,
    }
}

fn norm_of(ctx: &mut Ctx, compacts: &[Mask]) -> (ExtValue, bool) {
    let model = ctx.model.clone();
    match model.kind() {
        ModelKind::Lattice(_) => {
            let mut best = ExtValue::zero();
            for c in compacts {
                if let Some(v) = ctx.try_eval(&Region::closed(c.clone())) {
                    best = best.max(v.abs());
                }
            }
            (best, true)
        }
        ModelKind::Grid(_) => {
            let claims = ctx.f.claims();
            if claims.monotone && claims.nonneg {
                match ctx.try_eval(&Region::closed(model.x_mask())) {
                    Some(v) => (v, true),
                    None => (ExtValue::PosInf, false),
                }
            } else if model.universe_len() <= 16 {
                let mut best = ExtValue::zero();
                for sub in crate::mask::subsets_of(&model.x_mask()) {
                    if let Some(v) = ctx.try_eval(&Region::closed(sub)) {
                        best = best.max(v.abs());
                    }
                }
                (best, true)
            } else {
                let mut best = ExtValue::zero();
                for c in compacts {
                    if let Some(v) = ctx.try_eval(&Region::closed(c.clone())) {
                        best = best.max(v.abs());
                    }
                }
                ctx.notes
                    .push("norm is a probe maximum, not certified exact".into());
                (best, false)
            }
        }
    }
}

fn measure_restriction(
    ctx: &mut Ctx,
    opens: &[Mask],
    compacts: &[Mask],
) -> Option<Vec<(String, Rat)>> {
    let model = ctx.model.clone();
    match model.kind() {
        ModelKind::Lattice(l) => {
            // atoms of the algebra generated by the opens: point classes
            // by open-membership signature
            let n = l.n_points();
            let mut atoms: Vec<Mask> = Vec::new();
            for p in 0..n {
                let sig: Vec<bool> = l.opens().iter().map(|o| o.contains(p)).collect();
                let mut placed = false;
                for a in atoms.iter_mut() {
                    let q = a.first().unwrap();
                    let qsig: Vec<bool> = l.opens().iter().map(|o| o.contains(q)).collect();
                    if qsig == sig {
                        a.insert(p);
                        placed = true;
                        break;
                    }
                }
                if !placed {
                    atoms.push(Mask::singleton(n, p));
                }
            }
            let mut constraints = Vec::new();
            let mut regions: Vec<Region> = Vec::new();
            regions.extend(opens.iter().cloned().map(Region::open));
            regions.extend(compacts.iter().cloned().map(Region::closed));
            for r in &regions {
                let Some(v) = ctx.try_eval(r) else {
                    return None;
                };
                let ExtValue::Finite(rhs) = v else {
                    ctx.violate(
                        "measure-feasibility",
                        format!(
                            "infinite value at {} defeats finite atom weights",
                            model.format_region(r)
                        ),
                    );
                    return None;
                };
                let coeffs: Vec<Rat> = atoms
                    .iter()
                    .map(|a| {
                        if a.is_subset(&r.mask) {
                            Rat::from_integer(1.into())
                        } else {
                            Rat::zero()
                        }
                    })
                    .collect();
                constraints.push(crate::lp::Constraint {
                    coeffs,
                    rel: crate::lp::Rel::Eq,
                    rhs,
                });
            }
            match crate::lp::feasible(atoms.len(), constraints) {
                Some(w) => Some(
                    atoms
                        .iter()
                        .zip(w)
                        .map(|(a, wt)| (model.format_mask(a), wt))
                        .collect(),
                ),
                None => {
                    ctx.violate(
                        "measure-feasibility",
                        "atom-weight system over the open/closed families is infeasible".into(),
                    );
                    None
                }
            }
        }
        ModelKind::Grid(g) => {
            // cells are the atoms, and a cell measure is pinned by its
            // singleton values
            let mut weights = Vec::with_capacity(g.n_cells());
            for c in 0..g.n_cells() {
                let single = Mask::singleton(g.n_cells(), c);
                match ctx.try_eval(&Region::closed(single)) {
                    Some(ExtValue::Finite(r)) if !r.is_negative() => weights.push(r),
                    Some(v) => {
                        ctx.violate(
                            "measure-feasibility",
                            format!("cell ({},{}) has weight {v}", g.coords(c).0, g.coords(c).1),
                        );
                        return None;
                    }
                    None => return None,
                }
            }
            for mask in compacts.iter().chain(opens.iter()) {
                let mut sum = Rat::zero();
                for i in mask.iter() {
                    sum += &weights[i];
                }
                for flavor in [Flavor::Closed, Flavor::Open] {
                    let Some(v) = ctx.try_eval(&Region {
                        flavor,
                        mask: mask.clone(),
                    }) else {
                        continue;
                    };
                    if v != ExtValue::Finite(sum.clone()) {
                        ctx.violate(
                            "measure-feasibility",
                            format!(
                                "value {v} at {} differs from its cell-weight sum {}",
                                model.format_mask(mask),
                                ExtValue::Finite(sum.clone())
                            ),
                        );
                        return None;
                    }
                }
            }
            Some(
                weights
                    .into_iter()
                    .enumerate()
                    .filter(|(_, w)| !w.is_zero())
                    .map(|(c, w)| {
                        let (r, col) = g.coords(c);
                        (format!("({r},{col})"), w)
                    })
                    .collect(),
            )
        }
    }
}

fn outer_value_in(ctx: &mut Ctx, mask: &Mask) -> Option<ExtValue> {
    let model = ctx.model.clone();
    match model.kind() {
        ModelKind::Lattice(_) => {
            let mut best: Option<ExtValue> = None;
            for o in model.opens_over(mask) {
                if let Some(v) = ctx.try_eval(&Region::open(o)) {
                    best = Some(match best {
                        None => v,
                        Some(b) => b.min(v),
                    });
                }
            }
            best
        }
        ModelKind::Grid(_) => ctx.try_eval(&Region::open(mask.clone())),
    }
}

/// Outer value of an arbitrary point/cell set: the infimum of open
/// values around it. Defines singleton-finiteness when singletons are
/// not model regions.
pub fn outer_value(f: &SetFunction, mask: &Mask) -> Result<ExtValue> {
    let model = f.model().clone();
    match model.kind() {
        ModelKind::Lattice(_) => {
            let mut best: Option<ExtValue> = None;
            for o in model.opens_over(mask) {
                let v = f.on_open(&o)?;
                best = Some(match best {
                    None => v,
                    Some(b) => b.min(v),
                });
            }
            best.ok_or_else(|| Error::Config("no open superset; X should always qualify".into()))
        }
        ModelKind::Grid(_) => f.on_open(mask),
    }
}

#[derive(Debug, Clone)]
pub struct SuperadditivityReport {
    pub monotone_ok: bool,
    pub superadditive_ok: bool,
    pub strict_witness: Option<String>,
    pub violations: Vec<String>,
    pub tested_pairs: usize,
}

/// Monotonicity on comparable pairs and superadditivity over disjoint
/// families inside a host; records a strict-inequality witness when one
/// exists.
pub fn check_superadditive_monotone(
    f: &SetFunction,
    seed: u64,
    extra_probes: usize,
) -> Result<SuperadditivityReport> {
    let model = f.model().clone();
    let compacts = probe_masks(&model, seed, extra_probes);
    let mut violations = Vec::new();
    let mut strict_witness = None;
    let mut tested = 0;

    let mut monotone_ok = true;
    for (a, b) in nested_pairs(&compacts, 4000) {
        let va = f.on_compact(&a)?;
        let vb = f.on_compact(&b)?;
        tested += 1;
        if va > vb {
            monotone_ok = false;
            violations.push(format!(
                "monotonicity fails: {} has value {va} above {} with value {vb}",
                model.format_mask(&a),
                model.format_mask(&b)
            ));
            break;
        }
    }
    // open-flavor comparisons too
    let opens = open_probe_masks(&model, seed, extra_probes / 2);
    for (a, b) in nested_pairs(&opens, 2000) {
        let va = f.on_open(&a)?;
        let vb = f.on_open(&b)?;
        tested += 1;
        if va > vb {
            monotone_ok = false;
            violations.push(format!(
                "monotonicity fails on opens: {} above {}",
                model.format_mask(&a),
                model.format_mask(&b)
            ));
            break;
        }
    }

    let mut superadditive_ok = true;
    let pairs = disjoint_compact_pairs(&model, &compacts, 2000);
    for (a, b) in pairs {
        let host = model.x_mask();
        let va = f.on_compact(&a)?;
        let vb = f.on_compact(&b)?;
        let vh = f.on_compact(&host)?;
        tested += 1;
        if let Ok(sum) = va.add(&vb) {
            if vh < sum {
                superadditive_ok = false;
                violations.push(format!(
                    "superadditivity fails: {} + {} exceed the host value {vh}",
                    model.format_mask(&a),
                    model.format_mask(&b)
                ));
                break;
            }
            if strict_witness.is_none() && vh > sum {
                strict_witness = Some(format!(
                    "strict: host value {vh} > {va} + {vb} for {} and {}",
                    model.format_mask(&a),
                    model.format_mask(&b)
                ));
            }
        }
    }

    Ok(SuperadditivityReport {
        monotone_ok,
        superadditive_ok,
        strict_witness,
        violations,
        tested_pairs: tested,
    })
}

/// Extend raw closed-set values to the whole model: opens by inner
/// maxima, closeds re-derived by outer minima. Conflicts between the
/// re-derived and raw closed values are returned as text witnesses.
pub fn regularize(raw: &SetFunction, name: &str) -> Result<(SetFunction, Vec<String>)> {
    let model = raw.model().clone();
    match model.kind() {
        ModelKind::Lattice(l) => {
            let mut open_table: BTreeMap<Mask, ExtValue> = BTreeMap::new();
            for u in l.opens() {
                let mut best = ExtValue::zero();
                let mut found = false;
                for c in model.compacts_under(u) {
                    let v = raw.on_compact(&c)?;
                    if !found || v > best {
                        best = v;
                        found = true;
                    }
                }
                open_table.insert(u.clone(), best);
            }
            let mut closed_table: BTreeMap<Mask, ExtValue> = BTreeMap::new();
            let mut conflicts = Vec::new();
            for cmask in l.closeds() {
                let mut inf: Option<ExtValue> = None;
                for o in model.opens_over(cmask) {
                    let v = open_table.get(&o).expect("all opens tabled").clone();
                    inf = Some(match inf {
                        None => v,
                        Some(b) => b.min(v),
                    });
                }
                let derived = inf.expect("X is an open superset");
                let original = raw.on_compact(cmask)?;
                if derived != original {
                    conflicts.push(format!(
                        "regularity conflict at {}: raw {original}, re-derived {derived}",
                        model.format_mask(cmask)
                    ));
                }
                closed_table.insert(cmask.clone(), derived);
            }
            Ok((
                SetFunction::from_tables(&model, name, open_table, closed_table),
                conflicts,
            ))
        }
        ModelKind::Grid(_) => Ok((
            SetFunction::regularized(raw, name),
            Vec::new(),
        )),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::space::lattice::l3;
    use crate::value::rat;

    fn l3_beta_gamma(beta: Rat, gamma: Rat) -> (Model, SetFunction) {
        let model = Model::lattice(l3());
        let l = model.as_lattice().unwrap();
        let mut closed = BTreeMap::new();
        for c in l.closeds() {
            // points are a=0, b=1, c=2
            let mut v = Rat::zero();
            if c.contains(1) {
                v += &beta;
            }
            if c.contains(2) {
                v += &gamma;
            }
            closed.insert(c.clone(), ExtValue::Finite(v));
        }
        let raw = SetFunction::from_tables(&model, "raw", BTreeMap::new(), closed);
        let (f, conflicts) = regularize(&raw, "beta-gamma").unwrap();
        assert!(conflicts.is_empty());
        (model, f)
    }

    #[test]
    fn l3_dtm_with_atom_weights() {
        let (_, f) = l3_beta_gamma(rat(1, 3), rat(1, 5));
        let rep = classify(&f, 7, 0).unwrap();
        assert!(rep.flags.is_dtm, "{:?}", rep.violations);
        assert!(rep.flags.is_measure_restriction);
        let w = rep.atom_weights.unwrap();
        // weight 0 at the open point a, beta at b, gamma at c
        let find = |name: &str| {
            w.iter()
                .find(|(n, _)| n.contains(name))
                .map(|(_, wt)| wt.clone())
        };
        assert_eq!(find("a"), Some(Rat::zero()));
        assert_eq!(find("b"), Some(rat(1, 3)));
        assert_eq!(find("c"), Some(rat(1, 5)));
        assert_eq!(rep.norm, ExtValue::ratio(8, 15));
    }

    #[test]
    fn zero_function_classifies_everything() {
        let model = Model::lattice(l3());
        let z = SetFunction::zero(&model);
        let rep = classify(&z, 7, 0).unwrap();
        assert!(rep.flags.is_measure_restriction);
        assert!(rep.flags.is_tm && rep.flags.is_dtm && rep.flags.is_stm && rep.flags.is_sdtm);
        assert!(rep.norm.is_zero());
        assert!(rep.fin.simple && rep.fin.finite);
    }

    #[test]
    fn regularize_flags_conflicts() {
        // raw: 0 on every proper closed, 1 on X; open values regularize
        // to 0 except X, so {b,c} re-derives to 1
        let model = Model::lattice(l3());
        let l = model.as_lattice().unwrap();
        let mut closed = BTreeMap::new();
        for c in l.closeds() {
            let v = if *c == model.x_mask() {
                ExtValue::one()
            } else {
                ExtValue::zero()
            };
            closed.insert(c.clone(), v);
        }
        let raw = SetFunction::from_tables(&model, "raw", BTreeMap::new(), closed);
        let (f, conflicts) = regularize(&raw, "conflicted").unwrap();
        assert_eq!(conflicts.len(), 1, "{conflicts:?}");
        assert!(conflicts[0].contains("raw 0, re-derived 1"));
        let bc = l.mask_from_names(["b", "c"]).unwrap();
        assert_eq!(f.on_compact(&bc).unwrap(), ExtValue::one());
    }

    #[test]
    fn regularize_is_idempotent_on_dtms() {
        let (model, f) = l3_beta_gamma(rat(1, 2), rat(1, 2));
        let (g, conflicts) = regularize(&f, "again").unwrap();
        assert!(conflicts.is_empty());
        let l = model.as_lattice().unwrap();
        let mut regions = Vec::new();
        for o in l.opens() {
            regions.push(Region::open(o.clone()));
        }
        for c in l.closeds() {
            regions.push(Region::closed(c.clone()));
        }
        assert!(f.agrees_with_on(&g, &regions).unwrap().is_none());
    }

    #[test]
    fn injected_monotonicity_violation_is_caught() {
        let model = Model::lattice(l3());
        let l = model.as_lattice().unwrap();
        let mut closed = BTreeMap::new();
        let mut open = BTreeMap::new();
        for c in l.closeds() {
            // bigger sets get smaller values: blatantly non-monotone
            closed.insert(
                c.clone(),
                ExtValue::from_int(3 - c.count() as i64),
            );
        }
        for o in l.opens() {
            open.insert(o.clone(), ExtValue::from_int(3 - o.count() as i64));
        }
        let f = SetFunction::from_tables(&model, "bad", open, closed);
        let rep = check_superadditive_monotone(&f, 7, 0).unwrap();
        assert!(!rep.monotone_ok);
        assert!(!rep.violations.is_empty());
    }
}
