//! Set functions on the opens and closeds of a model.
//!
//! Lattice-backed functions carry complete value tables. Grid-backed
//! functions are evaluator rules over compact cell sets, memoized on
//! demand (the compact family is exponential, so only reachable regions
//! are ever evaluated). Open values on the grid are the inner limits of
//! the directed compact family, which is the value at the region's own
//! cell set; on the lattice they are honest maxima over the closed
//! family.

use crate::error::{Error, Result};
use crate::mask::Mask;
use crate::space::{Flavor, Model, ModelKind, Region};
use crate::value::{ExtValue, Rat};
use num_traits::Signed;
use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::{Arc, RwLock};

/// Constructor-declared structural hints. Engines use them for exact
/// shortcuts; the classification and theorem suites verify the actual
/// axioms against the model, so a wrong claim surfaces as a failed
/// report row rather than silent nonsense.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Claims {
    pub nonneg: bool,
    pub monotone: bool,
    pub additive: bool,
}

impl Claims {
    pub fn all() -> Self {
        Claims {
            nonneg: true,
            monotone: true,
            additive: true,
        }
    }

    pub fn none() -> Self {
        Claims {
            nonneg: false,
            monotone: false,
            additive: false,
        }
    }
}

/// A signed set function given on compacts only: the raw material of the
/// variation transforms.
#[derive(Clone)]
pub enum CompactSource {
    /// Restriction of a full set function to compacts.
    Restrict(SetFunction),
    /// Difference `f - g` on compacts.
    Diff(SetFunction, SetFunction),
    /// Pointwise negation.
    Neg(Box<CompactSource>),
}

impl CompactSource {
    pub fn model(&self) -> Model {
        match self {
            CompactSource::Restrict(f) => f.model().clone(),
            CompactSource::Diff(f, _) => f.model().clone(),
            CompactSource::Neg(s) => s.model(),
        }
    }

    pub fn eval(&self, mask: &Mask) -> Result<ExtValue> {
        match self {
            CompactSource::Restrict(f) => f.on_compact(mask),
            CompactSource::Diff(f, g) => f.on_compact(mask)?.sub(&g.on_compact(mask)?),
            CompactSource::Neg(s) => Ok(s.eval(mask)?.neg()),
        }
    }

    pub fn negated(&self) -> CompactSource {
        CompactSource::Neg(Box::new(self.clone()))
    }

    pub fn claims(&self) -> Claims {
        match self {
            CompactSource::Restrict(f) => f.claims(),
            CompactSource::Diff(f, g) => Claims {
                nonneg: false,
                monotone: false,
                additive: f.claims().additive && g.claims().additive,
            },
            CompactSource::Neg(s) => Claims {
                nonneg: false,
                monotone: false,
                additive: s.claims().additive,
            },
        }
    }

    pub fn describe(&self) -> String {
        match self {
            CompactSource::Restrict(f) => f.name().to_string(),
            CompactSource::Diff(f, g) => format!("{}-{}", f.name(), g.name()),
            CompactSource::Neg(s) => format!("-({})", s.describe()),
        }
    }
}

/// A signed set function presented as an ordered difference of two
/// nonnegative ones. The workbench never ingests a bare signed table:
/// the decomposition hypotheses are phrased through such presentations,
/// which keeps them decidable.
#[derive(Clone, Debug)]
pub struct SignedPair {
    pub pos: SetFunction,
    pub neg: SetFunction,
    pub name: String,
}

impl SignedPair {
    pub fn new(pos: SetFunction, neg: SetFunction, name: &str) -> Result<Self> {
        if !pos.model().same_model(neg.model()) {
            return Err(Error::Config("signed pair over different models".into()));
        }
        Ok(SignedPair {
            pos,
            neg,
            name: name.into(),
        })
    }

    pub fn model(&self) -> &Model {
        self.pos.model()
    }

    /// The difference as a set function (errors surface at evaluation
    /// when both parts are infinite on a region).
    pub fn combined(&self) -> Result<SetFunction> {
        let one = Rat::from_integer(1.into());
        let minus = -one.clone();
        Ok(SetFunction::combine(one, &self.pos, minus, &self.neg)?.with_name(&self.name))
    }

    pub fn source(&self) -> CompactSource {
        CompactSource::Diff(self.pos.clone(), self.neg.clone())
    }

    pub fn negated(&self) -> SignedPair {
        SignedPair {
            pos: self.neg.clone(),
            neg: self.pos.clone(),
            name: format!("-({})", self.name),
        }
    }
}

/// Search limits for the cover/packing engines.
#[derive(Debug, Clone, Copy)]
pub struct SearchParams {
    /// Hosts with at most this many cells are searched exactly.
    pub exact_cells: usize,
    /// Node budget for sampled verification work.
    pub budget: u64,
}

impl Default for SearchParams {
    fn default() -> Self {
        SearchParams {
            exact_cells: 16,
            budget: 20_000,
        }
    }
}

pub(crate) enum Rule {
    Zero,
    Table {
        open: BTreeMap<Mask, ExtValue>,
        closed: BTreeMap<Mask, ExtValue>,
    },
    CellWeights(Vec<Rat>),
    Aarnes {
        marks: Vec<usize>,
    },
    InfinityMark(usize),
    Combine {
        a: Rat,
        f: SetFunction,
        b: Rat,
        g: SetFunction,
    },
    /// Inner-regularized extension of raw closed values (lattice).
    Regularized {
        raw: SetFunction,
    },
    /// `nu - mu` on compacts, extended by inner regularity.
    CompactDiff {
        nu: SetFunction,
        mu: SetFunction,
    },
    /// Cover-infimum transform of a monotone additive base.
    Tilde {
        base: SetFunction,
        params: SearchParams,
    },
    /// Positive variation of a compact source.
    PosVar {
        src: CompactSource,
        params: SearchParams,
    },
    /// Total variation of a compact source.
    TotVar {
        src: CompactSource,
        params: SearchParams,
    },
}

pub(crate) struct SfInner {
    model: Model,
    name: String,
    rule: Rule,
    claims: Claims,
    /// Additive cell weights known to minorize the closed values; the
    /// certified lower bound of the cover search.
    minorant: Option<Vec<Rat>>,
    memo: RwLock<HashMap<(Flavor, Mask), ExtValue>>,
}

#[derive(Clone)]
pub struct SetFunction(pub(crate) Arc<SfInner>);

impl fmt::Debug for SetFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "SetFunction({})", self.name())
    }
}

impl SetFunction {
    fn build(
        model: Model,
        name: String,
        rule: Rule,
        claims: Claims,
        minorant: Option<Vec<Rat>>,
    ) -> Self {
        SetFunction(Arc::new(SfInner {
            model,
            name,
            rule,
            claims,
            minorant,
            memo: RwLock::new(HashMap::new()),
        }))
    }

    pub fn zero(model: &Model) -> Self {
        Self::build(model.clone(), "zero".into(), Rule::Zero, Claims::all(), None)
    }

    pub fn from_tables(
        model: &Model,
        name: &str,
        open: BTreeMap<Mask, ExtValue>,
        closed: BTreeMap<Mask, ExtValue>,
    ) -> Self {
        Self::build(
            model.clone(),
            name.into(),
            Rule::Table { open, closed },
            Claims::none(),
            None,
        )
    }

    pub fn cell_weights(model: &Model, name: &str, weights: Vec<Rat>) -> Result<Self> {
        let g = model
            .as_grid()
            .ok_or_else(|| Error::Config("cell weights need a grid model".into()))?;
        if weights.len() != g.n_cells() {
            return Err(Error::Config(format!(
                "expected {} weights, got {}",
                g.n_cells(),
                weights.len()
            )));
        }
        if let Some(w) = weights.iter().find(|w| w.is_negative()) {
            return Err(Error::NegativeWeight(w.to_string()));
        }
        Ok(Self::build(
            model.clone(),
            name.into(),
            Rule::CellWeights(weights.clone()),
            Claims::all(),
            Some(weights),
        ))
    }

    pub fn aarnes(model: &Model, name: &str, marks: Vec<usize>) -> Result<Self> {
        model
            .as_grid()
            .ok_or_else(|| Error::Config("aarnes instances need a grid model".into()))?;
        Ok(Self::build(
            model.clone(),
            name.into(),
            Rule::Aarnes { marks },
            Claims::all(),
            None,
        ))
    }

    pub fn infinity_mark(model: &Model, name: &str, mark: usize) -> Result<Self> {
        model
            .as_grid()
            .ok_or_else(|| Error::Config("infinity instances need a grid model".into()))?;
        Ok(Self::build(
            model.clone(),
            name.into(),
            Rule::InfinityMark(mark),
            Claims::all(),
            None,
        ))
    }

    pub fn combine(a: Rat, f: &SetFunction, b: Rat, g: &SetFunction) -> Result<Self> {
        if !f.model().same_model(g.model()) {
            return Err(Error::Config("combining functions over different models".into()));
        }
        let nonneg_coeffs = !a.is_negative() && !b.is_negative();
        let claims = Claims {
            nonneg: nonneg_coeffs && f.claims().nonneg && g.claims().nonneg,
            monotone: nonneg_coeffs && f.claims().monotone && g.claims().monotone,
            additive: f.claims().additive && g.claims().additive,
        };
        let minorant = if nonneg_coeffs {
            match (f.minorant(), g.minorant()) {
                (Some(wf), Some(wg)) => Some(
                    wf.iter()
                        .zip(wg.iter())
                        .map(|(x, y)| &a * x + &b * y)
                        .collect(),
                ),
                _ => None,
            }
        } else {
            None
        };
        let name = format!("{}*{}+{}*{}", a, f.name(), b, g.name());
        Ok(Self::build(
            f.model().clone(),
            name,
            Rule::Combine {
                a,
                f: f.clone(),
                b,
                g: g.clone(),
            },
            claims,
            minorant,
        ))
    }

    pub fn scaled(a: Rat, f: &SetFunction) -> Result<Self> {
        let zero = SetFunction::zero(f.model());
        SetFunction::combine(a, f, Rat::from_integer(0.into()), &zero)
    }

    /// Extend raw closed values to the whole model by inner maxima on
    /// opens and outer minima on closeds (lattice models).
    pub fn regularized(raw: &SetFunction, name: &str) -> Self {
        Self::build(
            raw.model().clone(),
            name.into(),
            Rule::Regularized { raw: raw.clone() },
            Claims {
                nonneg: raw.claims().nonneg,
                monotone: true,
                additive: false,
            },
            None,
        )
    }

    pub fn compact_diff(nu: &SetFunction, mu: &SetFunction, name: &str) -> Result<Self> {
        if !nu.model().same_model(mu.model()) {
            return Err(Error::Config("difference over different models".into()));
        }
        Ok(Self::build(
            nu.model().clone(),
            name.into(),
            Rule::CompactDiff {
                nu: nu.clone(),
                mu: mu.clone(),
            },
            // monotone/nonneg hold under the subtraction theorem's
            // hypotheses; callers verify them before relying on it
            Claims {
                nonneg: true,
                monotone: true,
                additive: nu.claims().additive && mu.claims().additive,
            },
            None,
        ))
    }

    pub fn tilde_of(base: &SetFunction, params: SearchParams) -> Self {
        let name = format!("tilde({})", base.name());
        let minorant = base.minorant().cloned();
        Self::build(
            base.model().clone(),
            name,
            Rule::Tilde {
                base: base.clone(),
                params,
            },
            Claims::all(),
            minorant,
        )
    }

    pub fn pos_var(src: CompactSource, params: SearchParams) -> Self {
        let model = src.model();
        let name = format!("({})+", src.describe());
        let minorant = match &src {
            CompactSource::Restrict(f) if f.claims().monotone && f.claims().nonneg => {
                f.minorant().cloned()
            }
            _ => None,
        };
        Self::build(
            model,
            name,
            Rule::PosVar { src, params },
            Claims {
                nonneg: true,
                monotone: true,
                additive: false,
            },
            minorant,
        )
    }

    pub fn tot_var(src: CompactSource, params: SearchParams) -> Self {
        let model = src.model();
        let name = format!("|{}|", src.describe());
        Self::build(
            model,
            name,
            Rule::TotVar { src, params },
            Claims {
                nonneg: true,
                monotone: true,
                additive: false,
            },
            None,
        )
    }

    pub fn with_name(&self, name: &str) -> SetFunction {
        // shares the memo through the inner clone-on-rename
        let inner = &self.0;
        Self::build(
            inner.model.clone(),
            name.into(),
            match &inner.rule {
                Rule::Zero => Rule::Zero,
                Rule::Table { open, closed } => Rule::Table {
                    open: open.clone(),
                    closed: closed.clone(),
                },
                Rule::CellWeights(w) => Rule::CellWeights(w.clone()),
                Rule::Aarnes { marks } => Rule::Aarnes { marks: marks.clone() },
                Rule::InfinityMark(m) => Rule::InfinityMark(*m),
                Rule::Combine { a, f, b, g } => Rule::Combine {
                    a: a.clone(),
                    f: f.clone(),
                    b: b.clone(),
                    g: g.clone(),
                },
                Rule::Regularized { raw } => Rule::Regularized { raw: raw.clone() },
                Rule::CompactDiff { nu, mu } => Rule::CompactDiff {
                    nu: nu.clone(),
                    mu: mu.clone(),
                },
                Rule::Tilde { base, params } => Rule::Tilde {
                    base: base.clone(),
                    params: *params,
                },
                Rule::PosVar { src, params } => Rule::PosVar {
                    src: src.clone(),
                    params: *params,
                },
                Rule::TotVar { src, params } => Rule::TotVar {
                    src: src.clone(),
                    params: *params,
                },
            },
            inner.claims,
            inner.minorant.clone(),
        )
    }

    pub fn model(&self) -> &Model {
        &self.0.model
    }

    pub fn name(&self) -> &str {
        &self.0.name
    }

    pub fn claims(&self) -> Claims {
        self.0.claims
    }

    pub fn minorant(&self) -> Option<&Vec<Rat>> {
        self.0.minorant.as_ref()
    }

    pub fn minorant_sum(&self, mask: &Mask) -> ExtValue {
        match self.minorant() {
            None => ExtValue::zero(),
            Some(w) => {
                let mut acc = Rat::from_integer(0.into());
                for i in mask.iter() {
                    acc += &w[i];
                }
                ExtValue::Finite(acc)
            }
        }
    }

    pub fn on_compact(&self, mask: &Mask) -> Result<ExtValue> {
        self.value(&Region::closed(mask.clone()))
    }

    pub fn on_open(&self, mask: &Mask) -> Result<ExtValue> {
        self.value(&Region::open(mask.clone()))
    }

    pub fn value(&self, region: &Region) -> Result<ExtValue> {
        let key = (region.flavor, region.mask.clone());
        if let Some(v) = self.0.memo.read().unwrap().get(&key) {
            return Ok(v.clone());
        }
        let v = self.compute(region)?;
        self.0.memo.write().unwrap().entry(key).or_insert(v.clone());
        Ok(v)
    }

    fn compute(&self, region: &Region) -> Result<ExtValue> {
        let model = self.model();
        let mask = &region.mask;
        match &self.0.rule {
            Rule::Zero => Ok(ExtValue::zero()),
            Rule::Table { open, closed } => {
                let table = match region.flavor {
                    Flavor::Open => open,
                    Flavor::Closed => closed,
                };
                table
                    .get(mask)
                    .cloned()
                    .ok_or_else(|| Error::NotTotal(model.format_region(region)))
            }
            Rule::CellWeights(w) => {
                let mut acc = Rat::from_integer(0.into());
                for i in mask.iter() {
                    acc += &w[i];
                }
                Ok(ExtValue::Finite(acc))
            }
            Rule::Aarnes { marks } => {
                let g = model.as_grid().expect("aarnes rule on grid");
                if g.two_marks_connected_with(mask, marks) {
                    Ok(ExtValue::one())
                } else {
                    Ok(ExtValue::zero())
                }
            }
            Rule::InfinityMark(m) => {
                if mask.contains(*m) {
                    Ok(ExtValue::PosInf)
                } else {
                    Ok(ExtValue::zero())
                }
            }
            Rule::Combine { a, f, b, g } => {
                let fv = f.value(region)?.scale(a);
                let gv = g.value(region)?.scale(b);
                fv.add(&gv)
            }
            Rule::Regularized { raw } => match (model.kind(), region.flavor) {
                (ModelKind::Lattice(_), Flavor::Open) => {
                    let mut best = ExtValue::zero();
                    let mut found = false;
                    for c in model.compacts_under(mask) {
                        let v = raw.on_compact(&c)?;
                        if !found || v > best {
                            best = v;
                            found = true;
                        }
                    }
                    Ok(best)
                }
                (ModelKind::Lattice(_), Flavor::Closed) => {
                    let mut best: Option<ExtValue> = None;
                    for o in model.opens_over(mask) {
                        let v = self.on_open(&o)?;
                        best = Some(match best {
                            None => v,
                            Some(b) => b.min(v),
                        });
                    }
                    Ok(best.expect("X is always an open superset"))
                }
                (ModelKind::Grid(_), _) => raw.on_compact(mask),
            },
            Rule::CompactDiff { nu, mu } => match (model.kind(), region.flavor) {
                (_, Flavor::Closed) => nu.on_compact(mask)?.sub(&mu.on_compact(mask)?),
                (ModelKind::Lattice(_), Flavor::Open) => {
                    let mut best = ExtValue::zero();
                    for c in model.compacts_under(mask) {
                        let v = self.on_compact(&c)?;
                        best = best.max(v);
                    }
                    Ok(best)
                }
                (ModelKind::Grid(_), Flavor::Open) => self.on_compact(mask),
            },
            Rule::Tilde { base, params } => match (model.kind(), region.flavor) {
                (_, Flavor::Closed) => {
                    let out = crate::search::tilde_search(base, mask, *params)?;
                    out.exact_value().ok_or_else(|| Error::SearchBudgetExceeded {
                        context: format!("tilde({}) at {}", base.name(), model.format_mask(mask)),
                        lo: out.lo.to_string(),
                        hi: out.hi.to_string(),
                    })
                }
                (ModelKind::Lattice(_), Flavor::Open) => {
                    let mut best = ExtValue::zero();
                    for c in model.compacts_under(mask) {
                        best = best.max(self.on_compact(&c)?);
                    }
                    Ok(best)
                }
                (ModelKind::Grid(_), Flavor::Open) => self.on_compact(mask),
            },
            Rule::PosVar { src, params } => match region.flavor {
                Flavor::Open => crate::search::pos_var_on_open(src, mask, *params),
                Flavor::Closed => {
                    let outer = model.outer_limit_open(mask);
                    crate::search::pos_var_on_open(src, &outer, *params)
                }
            },
            Rule::TotVar { src, params } => match region.flavor {
                Flavor::Open => {
                    let out = crate::search::packing_search(src, mask, *params)?;
                    out.exact_value().ok_or_else(|| Error::SearchBudgetExceeded {
                        context: format!("|{}| at {}", src.describe(), model.format_mask(mask)),
                        lo: out.lo.to_string(),
                        hi: out.hi.to_string(),
                    })
                }
                Flavor::Closed => {
                    let outer = model.outer_limit_open(mask);
                    self.on_open(&outer)
                }
            },
        }
    }

    /// Values agree on the given regions; first mismatch as witness.
    pub fn agrees_with_on(
        &self,
        other: &SetFunction,
        regions: &[Region],
    ) -> Result<Option<(Region, ExtValue, ExtValue)>> {
        for r in regions {
            let a = self.value(r)?;
            let b = other.value(r)?;
            if a != b {
                return Ok(Some((r.clone(), a, b)));
            }
        }
        Ok(None)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::space::lattice::l3;
    use crate::value::rat;

    #[test]
    fn zero_function_is_zero_everywhere() {
        let m = Model::lattice(l3());
        let z = SetFunction::zero(&m);
        for o in m.as_lattice().unwrap().opens() {
            assert!(z.on_open(o).unwrap().is_zero());
        }
    }

    #[test]
    fn cell_weights_sum_and_reject_negative() {
        let g = crate::space::DyadicGrid::new(2).unwrap();
        let m = Model::grid(g);
        let w = vec![rat(1, 16); 16];
        let f = SetFunction::cell_weights(&m, "u", w).unwrap();
        assert_eq!(f.on_compact(&m.x_mask()).unwrap(), ExtValue::one());
        let mut bad = vec![rat(1, 16); 16];
        bad[3] = rat(-1, 16);
        assert!(matches!(
            SetFunction::cell_weights(&m, "bad", bad),
            Err(Error::NegativeWeight(_))
        ));
    }

    #[test]
    fn combine_is_pointwise() {
        let g = crate::space::DyadicGrid::new(2).unwrap();
        let m = Model::grid(g);
        let f = SetFunction::cell_weights(&m, "u", vec![rat(1, 16); 16]).unwrap();
        let h = SetFunction::combine(rat(1, 2), &f, rat(3, 2), &f).unwrap();
        assert_eq!(h.on_compact(&m.x_mask()).unwrap(), ExtValue::from_int(2));
        assert!(h.minorant().is_some());
    }
}
