//! Instance constructors and the textual registry.
//!
//! Registry names: `lebesgue[:uniform <t>|:weights <q>,...]`,
//! `aarnes[:(r,c),(r,c),(r,c)]`, `infdtm[:(r,c)]`, `zero`,
//! `mix:<a>*<NAME>+<b>*<NAME>`, `signed:<NAME>-<NAME>`. Bare `lebesgue`
//! means uniform total mass 1; bare `aarnes` uses the canonical marked
//! triple for the grid's resolution.

use crate::classify::{classify, ClassificationReport};
use crate::error::{Error, Result};
use crate::mask::Mask;
use crate::setfn::{SetFunction, SignedPair};
use crate::space::grid::parse_cell_list;
use crate::space::{Model, ModelKind};
use crate::value::{ExtValue, Rat};
use num_traits::Signed;
use std::collections::BTreeMap;

#[derive(Clone, Debug)]
pub enum Instance {
    Plain(SetFunction),
    Signed(SignedPair),
}

impl Instance {
    pub fn name(&self) -> String {
        match self {
            Instance::Plain(f) => f.name().to_string(),
            Instance::Signed(p) => p.name.clone(),
        }
    }

    pub fn model(&self) -> &Model {
        match self {
            Instance::Plain(f) => f.model(),
            Instance::Signed(p) => p.model(),
        }
    }

    pub fn as_plain(&self) -> Option<&SetFunction> {
        match self {
            Instance::Plain(f) => Some(f),
            Instance::Signed(_) => None,
        }
    }
}

/// Cell-weight measure on the grid.
pub fn lebesgue_cells(model: &Model, weights: Vec<Rat>, name: &str) -> Result<SetFunction> {
    SetFunction::cell_weights(model, name, weights)
}

pub fn lebesgue_uniform(model: &Model, total: Rat, name: &str) -> Result<SetFunction> {
    let g = model
        .as_grid()
        .ok_or_else(|| Error::Config("lebesgue instances need a grid model".into()))?;
    if total.is_negative() {
        return Err(Error::NegativeWeight(total.to_string()));
    }
    let n = g.n_cells();
    let w = total / Rat::from_integer(n.into());
    lebesgue_cells(model, vec![w; n], name)
}

/// Canonical marked triple at resolution `k`: off the boundary ring from
/// `k = 3` on; at `k = 2` three pairwise non-adjacent cells only exist
/// on the boundary, so the corner triple is used there.
pub fn default_marks(k: u32) -> Vec<(usize, usize)> {
    let side = 1usize << k;
    if k <= 2 {
        vec![(0, 0), (0, side - 1), (side - 1, 0)]
    } else {
        vec![
            (1, 1),
            (1, side - 2),
            (side - 2, side / 2 - 1),
        ]
    }
}

/// Simple quasi-measure from three marked cells: a compact region is
/// valued 1 iff at least two marks share one of its 8-connected
/// components (a connected compact holding two marks contains a
/// hole-free path compact holding them); open regions take the
/// regularized inner value.
pub fn aarnes_qm(model: &Model, marks: Vec<(usize, usize)>, name: &str) -> Result<SetFunction> {
    let g = model
        .as_grid()
        .ok_or_else(|| Error::Config("aarnes instances need a grid model".into()))?;
    if marks.len() != 3 {
        return Err(Error::BadMarkedCells(format!(
            "expected three marked cells, got {}",
            marks.len()
        )));
    }
    let side = g.side();
    let mut idxs = Vec::new();
    for (r, c) in &marks {
        if *r >= side || *c >= side {
            return Err(Error::BadMarkedCells(format!("({r},{c}) outside the grid")));
        }
        // boundary-ring exclusion guarantees zero-valued neighborhoods;
        // at k = 2 no interior non-adjacent triple exists, so it is waived
        if g.k() >= 3 && (*r == 0 || *c == 0 || *r == side - 1 || *c == side - 1) {
            return Err(Error::BadMarkedCells(format!(
                "({r},{c}) lies on the boundary ring"
            )));
        }
        idxs.push(g.cell(*r, *c));
    }
    for i in 0..3 {
        for j in (i + 1)..3 {
            let a = Mask::singleton(g.n_cells(), idxs[i]);
            let b = Mask::singleton(g.n_cells(), idxs[j]);
            if !g.compacts_disjoint(&a, &b) {
                return Err(Error::BadMarkedCells(format!(
                    "marked cells {:?} and {:?} touch",
                    marks[i], marks[j]
                )));
            }
        }
    }
    SetFunction::aarnes(model, name, idxs)
}

/// The non-singleton-finite instance: the positive variation of
/// `K -> inf` when the marked cell is inside, `0` otherwise.
pub fn infinity_dtm(model: &Model, mark: (usize, usize), name: &str) -> Result<SetFunction> {
    let g = model
        .as_grid()
        .ok_or_else(|| Error::Config("infinity instances need a grid model".into()))?;
    if mark.0 >= g.side() || mark.1 >= g.side() {
        return Err(Error::Config(format!("mark {mark:?} outside the grid")));
    }
    SetFunction::infinity_mark(model, name, g.cell(mark.0, mark.1))
}

/// Pointwise rational combination.
pub fn combine(a: Rat, f: &SetFunction, b: Rat, g: &SetFunction) -> Result<SetFunction> {
    SetFunction::combine(a, f, b, g)
}

/// Every closed-set value table over the grid `values`, regularized and
/// classified; returns the ones whose DTM flag holds, tagged by report.
pub fn enumerate_dtms(
    model: &Model,
    values: &[ExtValue],
    budget: u64,
    seed: u64,
) -> Result<Vec<(SetFunction, ClassificationReport)>> {
    let ModelKind::Lattice(l) = model.kind() else {
        return Err(Error::Config("enumeration runs on lattice models".into()));
    };
    if values.is_empty() {
        return Ok(Vec::new());
    }
    let closeds = l.closeds().to_vec();
    let n = closeds.len();
    if n > 12 {
        return Err(Error::BudgetExceeded(format!(
            "{n} closed sets is beyond the enumeration cap of 12"
        )));
    }
    let total = (values.len() as u64).checked_pow(n as u32);
    match total {
        Some(t) if t <= budget => {}
        _ => {
            return Err(Error::BudgetExceeded(format!(
                "{}^{n} tables exceed the budget {budget}",
                values.len()
            )))
        }
    }

    let mut found = Vec::new();
    let count = (values.len() as u64).pow(n as u32);
    for code in 0..count {
        let mut c = code;
        let mut table: BTreeMap<Mask, ExtValue> = BTreeMap::new();
        for cl in &closeds {
            let v = values[(c % values.len() as u64) as usize].clone();
            c /= values.len() as u64;
            table.insert(cl.clone(), v);
        }
        // a set function vanishes on the empty set
        if !table[&l.empty_mask()].is_zero() {
            continue;
        }
        let raw = SetFunction::from_tables(model, &format!("enum#{code}"), BTreeMap::new(), table);
        let (f, conflicts) = crate::classify::regularize(&raw, &format!("enum#{code}"))?;
        if !conflicts.is_empty() {
            continue;
        }
        let rep = classify(&f, seed, 0)?;
        if rep.flags.is_dtm {
            found.push((f, rep));
        }
    }
    Ok(found)
}

fn parse_rat(s: &str) -> Result<Rat> {
    match ExtValue::parse(s)? {
        ExtValue::Finite(r) => Ok(r),
        v => Err(Error::Parse(format!("expected a finite rational, got {v}"))),
    }
}

/// Parse a registry name into an instance on the model.
pub fn parse_instance(model: &Model, text: &str) -> Result<Instance> {
    let t = text.trim();
    if let Some(rest) = t.strip_prefix("mix:") {
        let (a, f, b, g) = parse_mix(model, rest)?;
        let combined = combine(a, &f, b, &g)?.with_name(t);
        return Ok(Instance::Plain(combined));
    }
    if let Some(rest) = t.strip_prefix("signed:") {
        let (pos, neg) = parse_signed(model, rest)?;
        return Ok(Instance::Signed(SignedPair::new(pos, neg, t)?));
    }
    Ok(Instance::Plain(parse_plain(model, t)?))
}

fn parse_plain(model: &Model, t: &str) -> Result<SetFunction> {
    let (head, args) = match t.split_once(':') {
        Some((h, a)) => (h.trim(), Some(a.trim())),
        None => (t, None),
    };
    match head {
        "zero" => Ok(SetFunction::zero(model).with_name(t)),
        "lebesgue" => match args {
            None => lebesgue_uniform(model, Rat::from_integer(1.into()), t),
            Some(a) => {
                if let Some(total) = a.strip_prefix("uniform") {
                    lebesgue_uniform(model, parse_rat(total.trim())?, t)
                } else if let Some(ws) = a.strip_prefix("weights") {
                    let weights: Result<Vec<Rat>> =
                        ws.trim().split(',').map(|w| parse_rat(w.trim())).collect();
                    lebesgue_cells(model, weights?, t)
                } else {
                    Err(Error::Parse(format!("unrecognized lebesgue arguments `{a}`")))
                }
            }
        },
        "aarnes" => {
            let marks = match args {
                None => {
                    let g = model
                        .as_grid()
                        .ok_or_else(|| Error::Config("aarnes instances need a grid model".into()))?;
                    default_marks(g.k())
                }
                Some(a) => parse_cell_list(a)?,
            };
            aarnes_qm(model, marks, t)
        }
        "infdtm" => {
            let mark = match args {
                None => (1, 1),
                Some(a) => {
                    let cells = parse_cell_list(a)?;
                    if cells.len() != 1 {
                        return Err(Error::Parse("infdtm takes one marked cell".into()));
                    }
                    cells[0]
                }
            };
            infinity_dtm(model, mark, t)
        }
        other => Err(Error::Parse(format!("unknown instance constructor `{other}`"))),
    }
}

fn parse_mix(model: &Model, rest: &str) -> Result<(Rat, SetFunction, Rat, SetFunction)> {
    // <a>*<NAME>+<b>*<NAME>; component names contain no `+<rat>*`
    let mut split_at = None;
    for (i, ch) in rest.char_indices() {
        if ch == '+' && looks_like_term(&rest[i + 1..]) {
            split_at = Some(i);
            break;
        }
    }
    let i = split_at.ok_or_else(|| Error::Parse(format!("expected a*NAME+b*NAME in `{rest}`")))?;
    let (a, f) = parse_term(model, &rest[..i])?;
    let (b, g) = parse_term(model, &rest[i + 1..])?;
    Ok((a, f, b, g))
}

fn looks_like_term(s: &str) -> bool {
    match s.split_once('*') {
        Some((coeff, _)) => parse_rat(coeff.trim()).is_ok(),
        None => false,
    }
}

fn parse_term(model: &Model, s: &str) -> Result<(Rat, SetFunction)> {
    let (coeff, name) = s
        .split_once('*')
        .ok_or_else(|| Error::Parse(format!("expected <rat>*<instance> in `{s}`")))?;
    Ok((parse_rat(coeff.trim())?, parse_plain(model, name.trim())?))
}

fn parse_signed(model: &Model, rest: &str) -> Result<(SetFunction, SetFunction)> {
    for (i, ch) in rest.char_indices() {
        if ch == '-' && i > 0 {
            if let (Ok(pos), Ok(neg)) = (
                parse_plain(model, rest[..i].trim()),
                parse_plain(model, rest[i + 1..].trim()),
            ) {
                return Ok((pos, neg));
            }
        }
    }
    Err(Error::Parse(format!("expected NAME-NAME in `{rest}`")))
}

/// Set-function file for lattice models: one `C a b = 1/3` or `O a = inf`
/// line per region.
pub fn parse_setfn_file(model: &Model, text: &str, name: &str) -> Result<SetFunction> {
    let ModelKind::Lattice(l) = model.kind() else {
        return Err(Error::Config("set-function files describe lattice models".into()));
    };
    let mut open: BTreeMap<Mask, ExtValue> = BTreeMap::new();
    let mut closed: BTreeMap<Mask, ExtValue> = BTreeMap::new();
    for line in text.lines() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (lhs, rhs) = line
            .split_once('=')
            .ok_or_else(|| Error::Parse(format!("missing `=` in `{line}`")))?;
        let value = ExtValue::parse(rhs.trim())?;
        let mut parts = lhs.trim().split_whitespace();
        let flavor = parts
            .next()
            .ok_or_else(|| Error::Parse(format!("missing flavor in `{line}`")))?;
        let mask = l.mask_from_names(parts)?;
        let table = match flavor {
            "C" => &mut closed,
            "O" => &mut open,
            other => return Err(Error::Parse(format!("flavor must be C or O, got `{other}`"))),
        };
        if table.insert(mask, value).is_some() {
            return Err(Error::Parse(format!("duplicate entry `{line}`")));
        }
    }
    Ok(SetFunction::from_tables(model, name, open, closed))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::space::DyadicGrid;
    use num_traits::Zero;

    fn grid_model(k: u32) -> Model {
        Model::grid(DyadicGrid::new(k).unwrap())
    }

    #[test]
    fn aarnes_values() {
        let m = grid_model(3);
        let g = m.as_grid().unwrap();
        let a = aarnes_qm(&m, vec![(1, 1), (1, 6), (6, 3)], "a").unwrap();
        assert_eq!(a.on_compact(&m.x_mask()).unwrap(), ExtValue::one());
        let single = Mask::singleton(64, g.cell(1, 1));
        assert!(a.on_compact(&single).unwrap().is_zero());
        // the tripod pieces each hold one mark
        let p1 = g.box_mask(0, 3, 0, 3);
        let p2 = g.box_mask(0, 3, 4, 7);
        let p3 = g.box_mask(4, 7, 0, 7);
        for p in [p1, p2, p3] {
            assert!(a.on_compact(&p).unwrap().is_zero());
        }
    }

    #[test]
    fn aarnes_validation() {
        let m = grid_model(3);
        // adjacent marks
        assert!(matches!(
            aarnes_qm(&m, vec![(1, 1), (1, 2), (6, 3)], "bad"),
            Err(Error::BadMarkedCells(_))
        ));
        // boundary ring at k >= 3
        assert!(matches!(
            aarnes_qm(&m, vec![(0, 0), (1, 6), (6, 3)], "bad"),
            Err(Error::BadMarkedCells(_))
        ));
        // boundary triple allowed at k = 2
        let m2 = grid_model(2);
        assert!(aarnes_qm(&m2, default_marks(2), "ok").is_ok());
    }

    #[test]
    fn infinity_dtm_values() {
        let m = grid_model(2);
        let g = m.as_grid().unwrap();
        let f = infinity_dtm(&m, (1, 1), "inf").unwrap();
        // the open 3x3 block around the cell admits a compact through it
        let block = g.box_mask(0, 2, 0, 2);
        assert_eq!(f.on_open(&block).unwrap(), ExtValue::PosInf);
        // a compact avoiding the mark's dilation is valued zero
        let avoid = g.box_mask(3, 3, 3, 3);
        assert!(f.on_compact(&avoid).unwrap().is_zero());
        assert!(f.on_compact(&m.empty_mask()).unwrap().is_zero());
    }

    #[test]
    fn registry_round_trips() {
        let m = grid_model(3);
        let inst = parse_instance(
            &m,
            "mix:1/2*lebesgue+1/2*aarnes:(1,1),(1,6),(6,3)",
        )
        .unwrap();
        let f = inst.as_plain().unwrap();
        assert_eq!(f.on_compact(&m.x_mask()).unwrap(), ExtValue::one());
        let signed = parse_instance(&m, "signed:lebesgue-aarnes").unwrap();
        match signed {
            Instance::Signed(p) => {
                assert_eq!(p.pos.on_compact(&m.x_mask()).unwrap(), ExtValue::one())
            }
            _ => panic!("expected signed"),
        }
        assert!(parse_instance(&m, "nonsense:1").is_err());
    }

    #[test]
    fn lebesgue_uniform_total() {
        let m = grid_model(2);
        let f = parse_instance(&m, "lebesgue:uniform 2").unwrap();
        assert_eq!(
            f.as_plain().unwrap().on_compact(&m.x_mask()).unwrap(),
            ExtValue::from_int(2)
        );
    }

    #[test]
    fn enumeration_on_l3() {
        let model = Model::lattice(crate::space::lattice::l3());
        let grid = [ExtValue::zero(), ExtValue::ratio(1, 2), ExtValue::one()];
        let found = enumerate_dtms(&model, &grid, 100_000, 7).unwrap();
        assert!(!found.is_empty());
        for (f, rep) in &found {
            assert!(rep.flags.is_dtm);
            // every DTM on this lattice is a measure restriction with
            // zero weight at the open point
            assert!(
                rep.flags.is_measure_restriction,
                "{} is not a measure restriction",
                f.name()
            );
            let w = rep.atom_weights.as_ref().unwrap();
            let a_weight = w.iter().find(|(n, _)| n.contains('a'));
            if let Some((_, wt)) = a_weight {
                assert!(wt.is_zero());
            }
        }
    }

    #[test]
    fn chain_enumeration_yields_point_masses() {
        let model = Model::lattice(crate::space::lattice::chain(3));
        let grid = [ExtValue::zero(), ExtValue::one()];
        let found = enumerate_dtms(&model, &grid, 100_000, 7).unwrap();
        for (_, rep) in &found {
            assert!(rep.flags.is_measure_restriction);
        }
        assert!(enumerate_dtms(&model, &[], 10, 7).unwrap().is_empty());
    }
}
