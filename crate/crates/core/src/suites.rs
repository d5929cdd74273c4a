//! Named theorem suites over instances, emitting report rows, plus the
//! cross-resolution convergence study.
//!
//! Suites: `nutil` (cover-infimum laws, Radon part, cover formulas,
//! finiteness equivalences), `propdec` (subtraction and the
//! Radon/proper decomposition), `proper` (properness criteria and cone
//! closure), `order` (order preservation and the Radon-domination
//! corollaries, over instance pairs), `modularity` (modularity iff
//! signed Radon), `structure` (extreme-point split, point masses,
//! finitely-many-values equivalences).

use crate::classify::{classify, outer_value};
use crate::decomp::{
    decompose_proper, decompose_signed, is_proper, is_proper_signed, jordan_parts,
    modularity_check, modularity_check_signed, point_mass, subtract_dtm, subtract_stm,
    zero_open_cover,
};
use crate::error::{Error, Result};
use crate::instances::{parse_instance, Instance};
use crate::mask::{subsets_of, Mask};
use crate::probes::{disjoint_compact_pairs, nested_pairs, probe_masks};
use crate::report::{ReportRow, Verdict};
use crate::search::tilde_search;
use crate::setfn::{SearchParams, SetFunction, SignedPair};
use crate::space::{Model, ModelKind};
use crate::transforms::{
    finiteness_equivalences, maximality_check, open_cover_formulas, radon_part,
};
use crate::value::{ExtValue, Rat};
use num_traits::{One, Zero};
use rayon::prelude::*;

pub const SUITE_NAMES: [&str; 6] = [
    "nutil",
    "propdec",
    "proper",
    "order",
    "modularity",
    "structure",
];

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub model: Model,
    pub instances: Vec<Instance>,
    pub suites: Vec<String>,
    pub seed: u64,
    pub budget: u64,
    pub threads: Option<usize>,
}

#[derive(Debug, Clone, Copy)]
pub struct SuiteCtx {
    pub seed: u64,
    pub params: SearchParams,
    /// number of sampled probe regions on grids
    pub extra: usize,
}

impl SuiteCtx {
    pub fn from_budget(seed: u64, budget: u64) -> Self {
        SuiteCtx {
            seed,
            params: SearchParams {
                exact_cells: 16,
                budget,
            },
            extra: (budget as usize).clamp(30, 20_000),
        }
    }
}

/// Run the configured suites over the configured instances. Tasks run in
/// parallel but rows are merged in configuration order, so a fixed
/// configuration byte-reproduces its report at any thread count.
pub fn run_check(cfg: &RunConfig) -> Result<Vec<ReportRow>> {
    let ctx = SuiteCtx::from_budget(cfg.seed, cfg.budget);
    let mut tasks: Vec<(String, usize)> = Vec::new();
    for suite in &cfg.suites {
        if !SUITE_NAMES.contains(&suite.as_str()) {
            return Err(Error::Config(format!("unknown suite `{suite}`")));
        }
        for i in 0..cfg.instances.len() {
            tasks.push((suite.clone(), i));
        }
    }

    let run_task = |(suite, idx): &(String, usize)| -> Result<Vec<ReportRow>> {
        let inst = &cfg.instances[*idx];
        match suite.as_str() {
            "nutil" => suite_nutil(inst, &ctx),
            "propdec" => suite_propdec(inst, &ctx),
            "proper" => suite_proper(inst, &ctx),
            "order" => suite_order(inst, &cfg.instances, &ctx),
            "modularity" => suite_modularity(inst, &ctx),
            "structure" => suite_structure(inst, &ctx),
            _ => unreachable!(),
        }
    };

    let results: Vec<Result<Vec<ReportRow>>> = match cfg.threads {
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| Error::Config(format!("thread pool: {e}")))?;
            pool.install(|| tasks.par_iter().map(run_task).collect())
        }
        None => tasks.par_iter().map(run_task).collect(),
    };

    let mut rows = Vec::new();
    for r in results {
        rows.extend(r?);
    }
    Ok(rows)
}

/// The compact family a grid suite sweeps: everything at 16 cells or
/// fewer, the probe family beyond that.
fn tilde_family(model: &Model, ctx: &SuiteCtx) -> Vec<Mask> {
    match model.kind() {
        ModelKind::Lattice(l) => l.closeds().to_vec(),
        ModelKind::Grid(_) if model.universe_len() <= 16 => subsets_of(&model.x_mask()),
        ModelKind::Grid(_) => probe_masks(model, ctx.seed, ctx.extra),
    }
}

fn tilde_at(f: &SetFunction, k: &Mask, ctx: &SuiteCtx) -> Result<ExtValue> {
    let out = tilde_search(f, k, ctx.params)?;
    out.exact_value().ok_or_else(|| Error::SearchBudgetExceeded {
        context: "cover infimum".into(),
        lo: out.lo.to_string(),
        hi: out.hi.to_string(),
    })
}

fn plain_or_skip<'a>(
    inst: &'a Instance,
    suite: &str,
    rows: &mut Vec<ReportRow>,
) -> Option<&'a SetFunction> {
    match inst {
        Instance::Plain(f) => Some(f),
        Instance::Signed(_) => {
            rows.push(ReportRow::skipped(
                suite,
                "plain-input-required",
                &inst.name(),
                "signed presentation; suite runs on plain inputs",
            ));
            None
        }
    }
}

fn suite_nutil(inst: &Instance, ctx: &SuiteCtx) -> Result<Vec<ReportRow>> {
    const S: &str = "nutil";
    let mut rows = Vec::new();
    let Some(f) = plain_or_skip(inst, S, &mut rows) else {
        return Ok(rows);
    };
    let name = inst.name();
    let model = f.model().clone();

    if !(f.claims().nonneg && f.claims().monotone && f.claims().additive) {
        rows.push(ReportRow::skipped(
            S,
            "cover-infimum-hypotheses",
            &name,
            "input is not claimed monotone/additive/nonnegative",
        ));
        return Ok(rows);
    }

    // empty set
    let empty_val = tilde_at(f, &model.empty_mask(), ctx)?;
    rows.push(ReportRow::check(
        S,
        "tilde-empty-zero",
        &name,
        empty_val.is_zero(),
        format!("value {empty_val}"),
    ));

    let family = tilde_family(&model, ctx);
    // dominated by the input on every tested compact
    let mut dominated = true;
    let mut witness = String::new();
    let mut tilde_vals: Vec<ExtValue> = Vec::with_capacity(family.len());
    for k in &family {
        let tv = tilde_at(f, k, ctx)?;
        let fv = f.on_compact(k)?;
        if tv > fv {
            dominated = false;
            witness = format!("{}: {tv} above {fv}", model.format_mask(k));
        }
        tilde_vals.push(tv);
    }
    rows.push(ReportRow::check(
        S,
        "tilde-dominated",
        &name,
        dominated,
        witness,
    ));
    rows.push(ReportRow::new(
        S,
        "tilde-family-size",
        &name,
        Verdict::Pass,
        format!("{} compacts tested", family.len()),
    ));

    // monotone on nested pairs
    let mut ok = true;
    let mut witness = String::new();
    for (a, b) in nested_pairs(&family, 2000) {
        let va = tilde_at(f, &a, ctx)?;
        let vb = tilde_at(f, &b, ctx)?;
        if va > vb {
            ok = false;
            witness = format!(
                "{} inside {} but {va} > {vb}",
                model.format_mask(&a),
                model.format_mask(&b)
            );
            break;
        }
    }
    rows.push(ReportRow::check(S, "tilde-monotone", &name, ok, witness));

    // subadditive on arbitrary pairs
    let mut ok = true;
    let mut witness = String::new();
    'sub: for (i, a) in family.iter().enumerate().take(60) {
        for b in family.iter().skip(i + 1).take(60) {
            let u = a.union(b);
            let (vu, va, vb) = (
                tilde_at(f, &u, ctx)?,
                tilde_at(f, a, ctx)?,
                tilde_at(f, b, ctx)?,
            );
            if let Ok(sum) = va.add(&vb) {
                if vu > sum {
                    ok = false;
                    witness = format!(
                        "union of {} and {} has {vu} above {va}+{vb}",
                        model.format_mask(a),
                        model.format_mask(b)
                    );
                    break 'sub;
                }
            }
        }
    }
    rows.push(ReportRow::check(S, "tilde-subadditive", &name, ok, witness));

    // exact-cover form: certificates use pieces inside the target with
    // union exactly the target
    let mut ok = true;
    let mut witness = String::new();
    for k in family.iter().take(50) {
        let out = tilde_search(f, k, ctx.params)?;
        let mut union = model.empty_mask();
        for p in &out.pieces {
            if !p.is_subset(k) {
                ok = false;
                witness = format!("piece escapes {}", model.format_mask(k));
            }
            union = union.union(p);
        }
        if !k.is_empty() && union != *k {
            ok = false;
            witness = format!("cover of {} is not exact", model.format_mask(k));
        }
    }
    rows.push(ReportRow::check(S, "tilde-exact-cover-form", &name, ok, witness));

    // additive on model-disjoint pairs
    let mut ok = true;
    let mut witness = String::new();
    for (a, b) in disjoint_compact_pairs(&model, &family, 1000) {
        let u = a.union(&b);
        let (vu, va, vb) = (
            tilde_at(f, &u, ctx)?,
            tilde_at(f, &a, ctx)?,
            tilde_at(f, &b, ctx)?,
        );
        if let Ok(sum) = va.add(&vb) {
            if vu != sum {
                ok = false;
                witness = format!(
                    "disjoint {} and {}: {vu} vs {va}+{vb}",
                    model.format_mask(&a),
                    model.format_mask(&b)
                );
                break;
            }
        }
    }
    rows.push(ReportRow::check(S, "tilde-additive-disjoint", &name, ok, witness));

    // compact-finiteness propagates
    let f_cf = f.on_compact(&model.x_mask())?.is_finite();
    let t_cf = tilde_at(f, &model.x_mask(), ctx)?.is_finite();
    rows.push(ReportRow::check(
        S,
        "tilde-compact-finite-propagates",
        &name,
        !f_cf || t_cf,
        format!("input finite at X: {f_cf}, transform finite at X: {t_cf}"),
    ));

    // Radon part diagnostics
    let (m, diag) = radon_part(f, ctx.params, ctx.seed)?;
    rows.push(ReportRow::check(
        S,
        "radon-part-below-input",
        &name,
        diag.below_input,
        diag.below_witness.clone().unwrap_or_default(),
    ));
    rows.push(ReportRow::check(
        S,
        "radon-part-subadditive-on-opens",
        &name,
        diag.subadditive_on_opens,
        "",
    ));
    let m_rep = classify(&m, ctx.seed, 30)?;
    rows.push(ReportRow::check(
        S,
        "radon-part-is-dtm",
        &name,
        m_rep.flags.is_dtm,
        m_rep
            .violations
            .first()
            .map(|v| v.detail.clone())
            .unwrap_or_default(),
    ));

    // finiteness equivalences
    let fe = finiteness_equivalences(f, ctx.params, ctx.seed)?;
    rows.push(ReportRow::check(
        S,
        "finiteness-equivalences",
        &name,
        fe.three_way_equivalent(),
        format!(
            "singleton-finite {}, transform compact-finite {}, radon part compact-finite {}",
            fe.singleton_finite, fe.tilde_compact_finite, fe.radon_compact_finite
        ),
    ));

    // cover formulas at X when finite there
    if f.on_open(&model.x_mask())?.is_finite() {
        let formulas = open_cover_formulas(f, &model.x_mask(), ctx.params, ctx.seed)?;
        rows.push(ReportRow::check(
            S,
            "cover-formulas-agree",
            &name,
            formulas.all_agree(),
            format!(
                "mixed {} compact {} open {} exact-open {} m {}",
                formulas.mixed,
                formulas.compact_covers,
                formulas.open_covers,
                formulas.open_exact_covers,
                formulas.m_value
            ),
        ));
    } else {
        rows.push(ReportRow::skipped(
            S,
            "cover-formulas-agree",
            &name,
            "input is infinite at X",
        ));
    }

    // LP maximality against the Radon part
    let rep = classify(f, ctx.seed, 20)?;
    if rep.fin.singleton_finite {
        let targets: Vec<Mask> = tilde_family(&model, ctx).into_iter().take(12).collect();
        let results = maximality_check(f, &m, &targets, ctx.seed)?;
        let all = results.iter().all(|r| r.consistent);
        let detail = results
            .iter()
            .find(|r| !r.consistent)
            .map(|r| {
                format!(
                    "at {}: lp {} vs m {}",
                    model.format_mask(&r.target),
                    r.lp_optimum,
                    r.m_value
                )
            })
            .unwrap_or_else(|| format!("{} targets", results.len()));
        rows.push(ReportRow::check(S, "radon-part-lp-maximal", &name, all, detail));
    } else {
        rows.push(ReportRow::skipped(
            S,
            "radon-part-lp-maximal",
            &name,
            "input is not singleton-finite",
        ));
    }

    Ok(rows)
}

fn suite_propdec(inst: &Instance, ctx: &SuiteCtx) -> Result<Vec<ReportRow>> {
    const S: &str = "propdec";
    let mut rows = Vec::new();
    if let Instance::Signed(pair) = inst {
        // signed inputs: variation parts and the signed decomposition
        let name = inst.name();
        match jordan_parts(pair, ctx.params, ctx.seed) {
            Ok((_, recon)) => {
                rows.push(ReportRow::check(S, "jordan-parts-reconstruct", &name, recon, ""));
            }
            Err(Error::NormInfinite) => rows.push(ReportRow::skipped(
                S,
                "jordan-parts-reconstruct",
                &name,
                "a part has infinite norm",
            )),
            Err(e) => return Err(e),
        }
        match decompose_signed(pair, ctx.params, ctx.seed) {
            Ok(d) => {
                rows.push(ReportRow::check(
                    S,
                    "signed-decomposition-reconstruction",
                    &name,
                    d.reconstruction_ok,
                    "",
                ));
                rows.push(ReportRow::check(
                    S,
                    "signed-decomposition-remainder-proper",
                    &name,
                    d.proper_is_proper,
                    "",
                ));
            }
            Err(Error::HypothesisViolated(msg)) => rows.push(ReportRow::skipped(
                S,
                "signed-decomposition-reconstruction",
                &name,
                msg,
            )),
            Err(e) => return Err(e),
        }
        return Ok(rows);
    }
    let Some(f) = plain_or_skip(inst, S, &mut rows) else {
        return Ok(rows);
    };
    let name = inst.name();
    let model = f.model().clone();
    let rep = classify(f, ctx.seed, 20)?;
    if !rep.fin.singleton_finite {
        rows.push(ReportRow::skipped(
            S,
            "proper-decomposition",
            &name,
            "input is not singleton-finite",
        ));
        return Ok(rows);
    }

    // subtraction sanity: nu - nu = 0 and nu - nu/2 = nu/2
    let self_diff = subtract_dtm(f, f, ctx.params, ctx.seed)?;
    rows.push(ReportRow::check(
        S,
        "difference-self-is-zero",
        &name,
        self_diff.lambda.on_compact(&model.x_mask())?.is_zero(),
        "",
    ));
    if rep.fin.finite {
        let half = SetFunction::scaled(Rat::new(1.into(), 2.into()), f)?;
        let out = subtract_dtm(f, &half, ctx.params, ctx.seed)?;
        let mut ok = out.report.flags.is_dtm && out.consistency_ok;
        let mut witness = out.witness.clone().unwrap_or_default();
        for k in probe_masks(&model, ctx.seed, 20).iter().take(30) {
            if out.lambda.on_compact(k)? != half.on_compact(k)? {
                ok = false;
                witness = format!("half-difference differs at {}", model.format_mask(k));
                break;
            }
        }
        rows.push(ReportRow::check(S, "difference-half-recovers", &name, ok, witness));
        rows.push(ReportRow::check(
            S,
            "difference-reconstruction",
            &name,
            out.reconstruction_ok == Some(true),
            "",
        ));
        // topological-measure difference: nu - nu/2 stays a TM when nu is
        if rep.flags.is_tm {
            let (lam, lam_rep) = subtract_stm(f, &half, ctx.seed)?;
            let mut ok = lam_rep.flags.is_tm;
            let mut witness = lam_rep
                .violations
                .first()
                .map(|v| format!("{}: {}", v.axiom, v.detail))
                .unwrap_or_default();
            for k in probe_masks(&model, ctx.seed, 10).iter().take(20) {
                if lam.on_compact(k)? != half.on_compact(k)? {
                    ok = false;
                    witness = format!("difference differs from half at {}", model.format_mask(k));
                    break;
                }
            }
            rows.push(ReportRow::check(S, "tm-difference-is-tm", &name, ok, witness));
        }
    }

    let d = decompose_proper(f, ctx.params, ctx.seed)?;
    rows.push(ReportRow::check(
        S,
        "decomposition-reconstruction",
        &name,
        d.reconstruction_ok,
        d.reconstruction_witness.clone().unwrap_or_default(),
    ));
    rows.push(ReportRow::check(
        S,
        "decomposition-radon-below",
        &name,
        d.radon_below_input,
        "",
    ));
    rows.push(ReportRow::check(
        S,
        "decomposition-remainder-proper",
        &name,
        d.proper_verdict.proper,
        d.proper_verdict.witness.clone().unwrap_or_default(),
    ));
    rows.push(ReportRow::check(
        S,
        "decomposition-unique-in-family",
        &name,
        d.uniqueness.unique_in_family,
        d.uniqueness.note.clone(),
    ));

    // idempotence: the parts decompose trivially
    let dm = decompose_proper(&d.radon, ctx.params, ctx.seed)?;
    let radon_fixed = dm.proper.on_compact(&model.x_mask())?.is_zero();
    rows.push(ReportRow::check(
        S,
        "radon-part-decomposes-trivially",
        &name,
        radon_fixed,
        "",
    ));
    let dz = decompose_proper(&d.proper, ctx.params, ctx.seed)?;
    let proper_fixed = dz.radon.on_compact(&model.x_mask())?.is_zero();
    rows.push(ReportRow::check(
        S,
        "proper-part-decomposes-trivially",
        &name,
        proper_fixed,
        "",
    ));

    Ok(rows)
}

fn suite_proper(inst: &Instance, ctx: &SuiteCtx) -> Result<Vec<ReportRow>> {
    const S: &str = "proper";
    let mut rows = Vec::new();
    let name = inst.name();
    match inst {
        Instance::Signed(pair) => {
            let v = is_proper_signed(pair, ctx.params, ctx.seed)?;
            rows.push(ReportRow::new(
                S,
                "signed-properness-verdict",
                &name,
                Verdict::Pass,
                format!("proper: {}", v.proper),
            ));
            return Ok(rows);
        }
        Instance::Plain(f) => {
            let model = f.model().clone();
            let v = is_proper(f, ctx.params, ctx.seed)?;
            rows.push(ReportRow::new(
                S,
                "properness-verdict",
                &name,
                Verdict::Pass,
                format!("proper: {} (hypotheses held: {})", v.proper, v.hypothesis_ok),
            ));
            if v.proper {
                let cert_ok = v.zero_cover.is_some() && !v.per_compact.is_empty();
                rows.push(ReportRow::check(
                    S,
                    "proper-zero-cover-certificates",
                    &name,
                    cert_ok,
                    format!("{} per-compact certificates", v.per_compact.len()),
                ));
                if let Some(ok) = v.open_cover_ok {
                    rows.push(ReportRow::check(S, "proper-open-cover-form", &name, ok, ""));
                }

                // cone closure: sums, positive scalings, differences
                let sum = SetFunction::combine(Rat::one(), f, Rat::one(), f)?;
                let sum_proper = is_proper(&sum, ctx.params, ctx.seed)?.proper;
                rows.push(ReportRow::check(S, "sum-of-propers-proper", &name, sum_proper, ""));
                for a in [Rat::new(1.into(), 2.into()), Rat::new(2.into(), 1.into())] {
                    let scaled = SetFunction::scaled(a.clone(), f)?;
                    let ok = is_proper(&scaled, ctx.params, ctx.seed)?.proper;
                    rows.push(ReportRow::check(
                        S,
                        "scaled-proper-proper",
                        &name,
                        ok,
                        format!("factor {a}"),
                    ));
                }
                let rep = classify(f, ctx.seed, 10)?;
                if rep.fin.finite {
                    let diff = SignedPair::new(f.clone(), f.clone(), &format!("{name}-{name}"))?;
                    let ok = is_proper_signed(&diff, ctx.params, ctx.seed)?.proper;
                    rows.push(ReportRow::check(
                        S,
                        "difference-of-propers-proper",
                        &name,
                        ok,
                        "",
                    ));
                }
            } else {
                rows.push(ReportRow::check(
                    S,
                    "improper-witness",
                    &name,
                    v.witness.is_some(),
                    v.witness.clone().unwrap_or_default(),
                ));
            }
            let _ = model;
        }
    }
    Ok(rows)
}

fn values_le(a: &SetFunction, b: &SetFunction, masks: &[Mask]) -> Result<Option<String>> {
    for k in masks {
        let va = a.on_compact(k)?;
        let vb = b.on_compact(k)?;
        if va > vb {
            return Ok(Some(format!(
                "{} has {va} above {vb} at {}",
                a.name(),
                vb,
            )));
        }
    }
    Ok(None)
}

fn suite_order(inst: &Instance, all: &[Instance], ctx: &SuiteCtx) -> Result<Vec<ReportRow>> {
    const S: &str = "order";
    let mut rows = Vec::new();
    let name = inst.name();
    let Some(mu) = inst.as_plain() else {
        rows.push(ReportRow::skipped(
            S,
            "order-pairs",
            &name,
            "signed presentations enter through the modularity corollaries",
        ));
        return Ok(rows);
    };
    let model = mu.model().clone();
    let probes = probe_masks(&model, ctx.seed, 30);
    let mu_rep = classify(mu, ctx.seed, 20)?;

    let mut compared = 0;
    for other in all {
        let Some(nu) = other.as_plain() else { continue };
        if nu.name() == mu.name() {
            continue;
        }
        if values_le(mu, nu, &probes)?.is_some() {
            continue; // not dominated; pair inapplicable
        }
        compared += 1;
        let pair_name = format!("{} <= {}", name, other.name());
        if !mu_rep.fin.singleton_finite {
            rows.push(ReportRow::skipped(
                S,
                "radon-order-preserved",
                &pair_name,
                "lower instance is not singleton-finite",
            ));
            continue;
        }
        let dmu = decompose_proper(mu, ctx.params, ctx.seed)?;
        let dnu = decompose_proper(nu, ctx.params, ctx.seed)?;
        let m_ok = values_le(&dmu.radon, &dnu.radon, &probes)?;
        rows.push(ReportRow::check(
            S,
            "radon-order-preserved",
            &pair_name,
            m_ok.is_none(),
            m_ok.unwrap_or_default(),
        ));
        let nu_rep = classify(nu, ctx.seed, 20)?;
        if nu_rep.fin.finite {
            let p_ok = values_le(&dmu.proper, &dnu.proper, &probes)?;
            rows.push(ReportRow::check(
                S,
                "proper-order-preserved",
                &pair_name,
                p_ok.is_none(),
                p_ok.unwrap_or_default(),
            ));
        }
        // domination by a finite Radon measure collapses the remainder
        if nu_rep.flags.is_radon_surrogate && nu_rep.fin.finite {
            let collapsed = dmu.proper.on_compact(&model.x_mask())?.is_zero();
            rows.push(ReportRow::check(
                S,
                "below-finite-radon-is-radon",
                &pair_name,
                collapsed && mu_rep.flags.is_measure_restriction,
                format!(
                    "proper part at X: {}, measure flag: {}",
                    dmu.proper.on_compact(&model.x_mask())?,
                    mu_rep.flags.is_measure_restriction
                ),
            ));
            // |mu| below a Radon measure is Radon
            let tv = SetFunction::tot_var(
                crate::setfn::CompactSource::Restrict(mu.clone()),
                ctx.params,
            );
            let abs_below = values_le(&tv, nu, &probes)?;
            if abs_below.is_none() {
                let d_abs = decompose_proper(&tv, ctx.params, ctx.seed);
                let ok = match d_abs {
                    Ok(d) => d.proper.on_compact(&model.x_mask())?.is_zero(),
                    Err(_) => false,
                };
                rows.push(ReportRow::check(
                    S,
                    "abs-below-radon-is-radon",
                    &pair_name,
                    ok,
                    "",
                ));
            }
        }
    }
    if compared == 0 {
        rows.push(ReportRow::skipped(
            S,
            "order-pairs",
            &name,
            "no dominating partner instance in the configuration",
        ));
    }
    Ok(rows)
}

fn suite_modularity(inst: &Instance, ctx: &SuiteCtx) -> Result<Vec<ReportRow>> {
    const S: &str = "modularity";
    let mut rows = Vec::new();
    let name = inst.name();
    match inst {
        Instance::Plain(f) => {
            let rep = classify(f, ctx.seed, 20)?;
            if !rep.fin.singleton_finite {
                rows.push(ReportRow::skipped(
                    S,
                    "modular-iff-radon",
                    &name,
                    "input is not singleton-finite",
                ));
                return Ok(rows);
            }
            let out = modularity_check(f, ctx.seed)?;
            let d = decompose_proper(f, ctx.params, ctx.seed)?;
            let proper_zero = d.proper.on_compact(&f.model().x_mask())?.is_zero();
            rows.push(ReportRow::check(
                S,
                "modular-iff-radon",
                &name,
                out.modular == proper_zero,
                format!(
                    "modular: {} ({} pairs), proper part vanishes: {}",
                    out.modular, out.tested_pairs, proper_zero
                ),
            ));
            if !out.modular {
                rows.push(ReportRow::check(
                    S,
                    "modularity-witness",
                    &name,
                    out.witness.is_some(),
                    out.witness.clone().unwrap_or_default(),
                ));
            }
            // a modular proper input must be zero
            let v = is_proper(f, ctx.params, ctx.seed)?;
            if v.proper {
                let zero = f.on_compact(&f.model().x_mask())?.is_zero();
                rows.push(ReportRow::check(
                    S,
                    "modular-proper-is-zero",
                    &name,
                    !out.modular || zero,
                    format!("modular: {}, zero: {zero}", out.modular),
                ));
            }
        }
        Instance::Signed(pair) => {
            let out = modularity_check_signed(pair, ctx.seed)?;
            let d = decompose_signed(pair, ctx.params, ctx.seed)?;
            let proper_fn = d.proper.combined()?;
            let mut proper_zero = true;
            for k in probe_masks(pair.model(), ctx.seed, 20) {
                if !proper_fn.on_compact(&k)?.is_zero() {
                    proper_zero = false;
                    break;
                }
            }
            rows.push(ReportRow::check(
                S,
                "modular-iff-radon",
                &name,
                out.modular == proper_zero,
                format!(
                    "modular: {} ({} pairs), proper part vanishes: {proper_zero}",
                    out.modular, out.tested_pairs
                ),
            ));
            if !out.modular {
                rows.push(ReportRow::check(
                    S,
                    "modularity-witness",
                    &name,
                    out.witness.is_some(),
                    out.witness.clone().unwrap_or_default(),
                ));
            }
        }
    }
    Ok(rows)
}

fn suite_structure(inst: &Instance, ctx: &SuiteCtx) -> Result<Vec<ReportRow>> {
    const S: &str = "structure";
    let mut rows = Vec::new();
    let Some(f) = plain_or_skip(inst, S, &mut rows) else {
        return Ok(rows);
    };
    let name = inst.name();
    let model = f.model().clone();
    let rep = classify(f, ctx.seed, 20)?;

    // convex split from the decomposition, when both parts carry mass
    if rep.fin.finite && rep.fin.singleton_finite {
        let d = decompose_proper(f, ctx.params, ctx.seed)?;
        let x = model.x_mask();
        let (mx, px, fx) = (
            d.radon.on_compact(&x)?,
            d.proper.on_compact(&x)?,
            f.on_compact(&x)?,
        );
        match (mx.as_rat(), px.as_rat(), fx.as_rat()) {
            (Some(m_x), Some(p_x), Some(f_x))
                if !m_x.is_zero() && !p_x.is_zero() && !f_x.is_zero() =>
            {
                let a = m_x / f_x;
                let b = p_x / f_x;
                let nu1 = SetFunction::scaled(f_x / m_x, &d.radon)?;
                let nu2 = SetFunction::scaled(f_x / p_x, &d.proper)?;
                let recombined = SetFunction::combine(a.clone(), &nu1, b.clone(), &nu2)?;
                let mut ok = &a + &b == Rat::one();
                let mut witness = String::new();
                for k in probe_masks(&model, ctx.seed, 20) {
                    if recombined.on_compact(&k)? != f.on_compact(&k)? {
                        ok = false;
                        witness = format!("convex split differs at {}", model.format_mask(&k));
                        break;
                    }
                }
                rows.push(ReportRow::check(S, "convex-split-reconstructs", &name, ok, witness));
            }
            _ => {
                rows.push(ReportRow::skipped(
                    S,
                    "convex-split-reconstructs",
                    &name,
                    "a decomposition part is zero or infinite; input is already extreme-candidate",
                ));
            }
        }
    }

    // simple inputs with a unit singleton are point masses
    if rep.fin.simple {
        let mut found = None;
        match model.kind() {
            ModelKind::Lattice(l) => {
                for p in 0..l.n_points() {
                    let single = Mask::singleton(l.n_points(), p);
                    if l.is_closed(&single) && f.on_compact(&single)? == ExtValue::one() {
                        found = Some(p);
                        break;
                    }
                }
            }
            ModelKind::Grid(g) => {
                for c in 0..g.n_cells() {
                    let single = Mask::singleton(g.n_cells(), c);
                    if f.on_compact(&single)? == ExtValue::one() {
                        found = Some(c);
                        break;
                    }
                }
            }
        }
        if let Some(idx) = found {
            let pm = point_mass(&model, idx, "point-mass")?;
            let mut ok = true;
            let mut witness = String::new();
            for k in probe_masks(&model, ctx.seed, 20) {
                if pm.on_compact(&k)? != f.on_compact(&k)? {
                    ok = false;
                    witness = format!("differs from the point mass at {}", model.format_mask(&k));
                    break;
                }
            }
            rows.push(ReportRow::check(S, "unit-singleton-is-point-mass", &name, ok, witness));
        } else {
            // finitely-many-values equivalences: proper iff a zero open
            // cover exists iff all singleton outer values vanish
            let proper = is_proper(f, ctx.params, ctx.seed)?.proper;
            let cover = zero_open_cover(f, ctx.seed)?;
            let mut singletons_zero = true;
            let n = model.universe_len();
            for i in 0..n {
                let single = Mask::singleton(n, i);
                if !outer_value(f, &single)?.is_zero() {
                    singletons_zero = false;
                    break;
                }
            }
            let ok = proper == cover.is_some() && proper == singletons_zero;
            rows.push(ReportRow::check(
                S,
                "finitely-many-values-equivalences",
                &name,
                ok,
                format!(
                    "proper {}, zero open cover {}, singleton outer values vanish {}",
                    proper,
                    cover.is_some(),
                    singletons_zero
                ),
            ));
        }
    }

    Ok(rows)
}

#[derive(Debug, Clone)]
pub struct ConvergenceRow {
    pub k: u32,
    pub instance: String,
    pub radon_at_x: String,
    pub tilde_at_x: String,
    pub proper: bool,
}

/// Evaluate the decomposition quantities for an instance family across
/// grid resolutions.
pub fn convergence(
    family: &str,
    k_range: std::ops::RangeInclusive<u32>,
    seed: u64,
    budget: u64,
) -> Result<Vec<ConvergenceRow>> {
    let ctx = SuiteCtx::from_budget(seed, budget);
    let mut rows = Vec::new();
    for k in k_range {
        let model = Model::grid(crate::space::DyadicGrid::new(k)?);
        let inst = parse_instance(&model, family)?;
        let Some(f) = inst.as_plain() else {
            return Err(Error::Config("convergence runs on plain instances".into()));
        };
        let x = model.x_mask();
        let (m, _) = radon_part(f, ctx.params, ctx.seed)?;
        let m_x = m.on_compact(&x)?;
        let t_x = tilde_at(f, &x, &ctx)?;
        let proper = is_proper(f, ctx.params, ctx.seed)?.proper;
        rows.push(ConvergenceRow {
            k,
            instance: family.to_string(),
            radon_at_x: m_x.to_string(),
            tilde_at_x: t_x.to_string(),
            proper,
        });
    }
    Ok(rows)
}

pub fn convergence_csv(rows: &[ConvergenceRow]) -> String {
    let mut out = String::from("k,instance,radon_at_x,tilde_at_x,proper\n");
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            r.k, r.instance, r.radon_at_x, r.tilde_at_x, r.proper
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::report;
    use crate::space::DyadicGrid;

    fn cfg(k: u32, names: &[&str], suites: &[&str]) -> RunConfig {
        let model = Model::grid(DyadicGrid::new(k).unwrap());
        let instances = names
            .iter()
            .map(|n| parse_instance(&model, n).unwrap())
            .collect();
        RunConfig {
            model,
            instances,
            suites: suites.iter().map(|s| s.to_string()).collect(),
            seed: 7,
            budget: 600,
            threads: None,
        }
    }

    #[test]
    fn nutil_on_lebesgue_k2() {
        let cfg = cfg(2, &["lebesgue"], &["nutil"]);
        let rows = run_check(&cfg).unwrap();
        assert!(rows.iter().all(|r| r.verdict != Verdict::Fail), "{rows:#?}");
        assert_eq!(report::exit_code(&rows), 0);
    }

    #[test]
    fn modularity_on_aarnes_k3() {
        let cfg = cfg(3, &["aarnes"], &["modularity"]);
        let rows = run_check(&cfg).unwrap();
        assert!(rows.iter().any(|r| r.statement == "modularity-witness"));
        assert!(rows.iter().all(|r| r.verdict != Verdict::Fail), "{rows:#?}");
    }

    #[test]
    fn reports_byte_reproduce_across_threads() {
        let one = {
            let mut c = cfg(2, &["lebesgue", "aarnes"], &["propdec", "proper"]);
            c.threads = Some(1);
            report::to_csv(&run_check(&c).unwrap())
        };
        let four = {
            let mut c = cfg(2, &["lebesgue", "aarnes"], &["propdec", "proper"]);
            c.threads = Some(4);
            report::to_csv(&run_check(&c).unwrap())
        };
        assert_eq!(one, four);
    }
}
