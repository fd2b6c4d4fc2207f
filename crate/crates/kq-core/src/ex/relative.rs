//! The relative construction `Ex_Y X = Ex X ×_{Ex Y} Y` and the P-structure on
//! its unit.
//!
//! `Ex_Y X` is computed as the sub-object of `Ex X` of cells `x` with
//! `f x j^0 = f x`. Each cell carries its filtration level, the least `k` with
//! `x j^k = x`. A relative cell `x` at level `k` is paired with `x r^k`; it is of
//! type I exactly when that cell is degenerate.

use std::collections::{BTreeMap, HashSet};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::kpos::{sd_face, JoinMap};
use super::object::{datum_is_degenerate, filtration_level, in_filtration, ExObject};
use super::sd::{precompose, Datum, SdSimplex};
use crate::error::{Error, Result};
use crate::pstructure::{CellId, PStructure, ValidationReport};
use crate::sset::{Cell, SimplicialMap, SimplicialSet};

/// `Ex_Y X` with its structure maps and filtration levels.
#[derive(Clone, Debug)]
pub struct ExRel {
    pub f: SimplicialMap,
    pub ex: ExObject,
    pub set: Arc<SimplicialSet>,
    /// `Ex_Y X → Ex X`.
    pub inclusion: SimplicialMap,
    /// `X → Ex_Y X`.
    pub unit: SimplicialMap,
    /// `Ex_Y X → Y`, reading `f x` on the chain `{0} ⊂ {0,1} ⊂ …`.
    pub to_base: SimplicialMap,
    /// Filtration level of each non-degenerate cell.
    pub levels: Vec<Vec<usize>>,
    renumber: Vec<Vec<u32>>,
}

impl ExRel {
    pub fn trunc(&self) -> usize {
        self.ex.trunc
    }

    pub fn base(&self) -> &Arc<SimplicialSet> {
        &self.ex.base
    }

    pub fn datum_of(&self, c: &Cell) -> Datum {
        self.ex.datum_of(&self.inclusion.apply(c))
    }

    pub fn cell_of(&self, n: usize, datum: &[Cell]) -> Result<Cell> {
        let c = self.ex.cell_of(n, datum)?;
        match self.renumber[c.base_dim()][c.base as usize] {
            u32::MAX => Err(Error::Precondition("cell lies outside Ex_Y X".into())),
            i => Ok(Cell { word: c.word, base: i }),
        }
    }

    /// `|J^k_n|` for `k = 0..=n`, degenerate cells included, per dimension.
    pub fn filtration_sizes(&self) -> Vec<Vec<usize>> {
        (0..=self.trunc())
            .map(|n| {
                let cells = self.set.all_cells(n);
                (0..=n)
                    .map(|k| {
                        cells.iter().filter(|c| in_filtration(self.base(), n, &self.datum_of(c), k as isize)).count()
                    })
                    .collect()
            })
            .collect()
    }

    /// Whether the cells of level zero are exactly the unit image, dimension by
    /// dimension, degenerate cells included.
    pub fn base_level_is_unit_image(&self) -> bool {
        (0..=self.unit.source.dim_bound().min(self.trunc())).all(|n| {
            let image: HashSet<Cell> = self.unit.source.all_cells(n).iter().map(|c| self.unit.apply(c)).collect();
            let level0: HashSet<Cell> = self
                .set
                .all_cells(n)
                .into_iter()
                .filter(|c| in_filtration(self.base(), n, &self.datum_of(c), 0))
                .collect();
            image.len() == self.unit.source.all_cells(n).len() && image == level0
        })
    }
}

/// `Ex_Y X` for `f: X → Y`, truncated at `trunc`.
pub fn ex_rel(f: &SimplicialMap, trunc: usize) -> Result<ExRel> {
    let y = &f.target;
    if trunc > y.dim_bound() && !y.is_complete() {
        return Err(Error::Truncation(format!("Y is known up to {} but {trunc} is needed", y.dim_bound())));
    }
    let ex = ExObject::new(&f.source, trunc)?;
    let over = |d: &[Cell]| -> Datum { d.iter().map(|c| f.apply(c)).collect() };
    let keep: Vec<Vec<bool>> = (0..=trunc)
        .map(|n| (0..ex.set.count(n) as u32).map(|i| in_filtration(y, n, &over(ex.datum(n, i)), 0)).collect())
        .collect();
    let (set, inclusion) = ex.set.subobject(&keep)?;
    let mut renumber: Vec<Vec<u32>> = Vec::new();
    for row in &keep {
        let mut next = 0u32;
        renumber.push(
            row.iter()
                .map(|&k| {
                    if k {
                        next += 1;
                        next - 1
                    } else {
                        u32::MAX
                    }
                })
                .collect(),
        );
    }
    let ex_unit = ex.unit()?;
    let unit_asg = ex_unit
        .assignment
        .iter()
        .map(|row| {
            row.iter()
                .map(|c| {
                    let i = renumber[c.base_dim()][c.base as usize];
                    debug_assert_ne!(i, u32::MAX);
                    Cell { word: c.word, base: i }
                })
                .collect()
        })
        .collect();
    let unit = SimplicialMap::new_unchecked(ex_unit.source.clone(), set.clone(), unit_asg);
    let mut to_base = Vec::new();
    let mut levels = Vec::new();
    for n in 0..=trunc {
        let start = SdSimplex::get(n).initial_chain();
        let mut row = Vec::new();
        let mut lv = Vec::new();
        for i in 0..set.count(n) as u32 {
            let d = ex.datum(n, inclusion.at(n, i).base);
            row.push(f.apply(&d[start]));
            lv.push(filtration_level(&f.source, n, d));
        }
        to_base.push(row);
        levels.push(lv);
    }
    let to_base = SimplicialMap::new_unchecked(set.clone(), y.clone(), to_base);
    Ok(ExRel { f: f.clone(), ex, set, inclusion, unit, to_base, levels, renumber })
}

/// How a relative cell is used by the P-structure.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CellClass {
    Base,
    TypeOne,
    TypeTwo,
}

/// One of the eight properties of `P` checked cell by cell.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PointCheck {
    pub point: usize,
    pub statement: String,
    pub instances: usize,
    pub failures: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PropertyReport {
    pub points: Vec<PointCheck>,
}

impl PropertyReport {
    pub fn passed(&self) -> bool {
        self.points.iter().all(|p| p.failures.is_empty())
    }
}

const STATEMENTS: [&str; 8] = [
    "x at level k: d_{k+1} P x = x",
    "x in J^h iff P x in J^h, for every h <= n",
    "x in J^{k-1} implies x r^k degenerate",
    "P P x is degenerate",
    "x degenerate, in X, or of type I implies P x degenerate",
    "x at level k >= 1: d_i P x in J^{k-1} for i <= k",
    "x at level k: d_i P x degenerate or of type I for k+1 < i <= n+1",
    "x of type I iff P x degenerate",
];

/// Per-dimension class counts.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassCounts {
    pub base: usize,
    pub type_one: usize,
    pub type_two: usize,
    /// Type II cells in the top dimension, whose partners lie above the truncation.
    pub beyond_ceiling: usize,
}

/// The classification, the P-structure below the ceiling and the property checks.
#[derive(Clone, Debug)]
pub struct ExUnitStructure {
    pub rel: ExRel,
    pub ceiling: usize,
    /// `Ex_Y X` without its top-dimensional type II cells.
    pub bounded: Arc<SimplicialSet>,
    pub structure: PStructure,
    pub validation: ValidationReport,
    pub classes: Vec<Vec<CellClass>>,
    pub counts: Vec<ClassCounts>,
    pub properties: PropertyReport,
}

/// Cells of the form `y r^k` with `y` at level at most `k`, per dimension, used as
/// the defining test for type I.
fn type_one_forms(rel: &ExRel) -> Vec<HashSet<Datum>> {
    let x = rel.base();
    let mut out = vec![HashSet::new(); rel.trunc() + 1];
    for n in 0..rel.trunc() {
        for c in rel.set.all_cells(n) {
            let d = rel.datum_of(&c);
            let lvl = filtration_level(x, n, &d);
            for k in lvl..=n {
                out[n + 1].insert(precompose(x, &d, &JoinMap::contraction(n, k)));
            }
        }
    }
    out
}

/// Classifies `X → Ex_Y X`, builds and validates its P-structure below the
/// truncation and checks the eight properties of `P` on every cell.
pub fn classify_and_pstructure(f: &SimplicialMap, trunc: usize) -> Result<ExUnitStructure> {
    if trunc < 1 {
        return Err(Error::Truncation("the classification needs trunc ≥ 1".into()));
    }
    let rel = ex_rel(f, trunc)?;
    let x = rel.base().clone();
    let forms = type_one_forms(&rel);
    let p_of = |n: usize, d: &[Cell]| -> (usize, Datum) {
        let k = filtration_level(&x, n, d);
        (k, precompose(&x, d, &JoinMap::contraction(n, k)))
    };
    let mut classes = Vec::new();
    let mut counts = Vec::new();
    let mut pairing: BTreeMap<CellId, CellId> = BTreeMap::new();
    let mut keep: Vec<Vec<bool>> = Vec::new();
    for n in 0..=trunc {
        let mut row = Vec::new();
        let mut cnt = ClassCounts::default();
        let mut kp = Vec::new();
        for i in 0..rel.set.count(n) as u32 {
            let d = rel.datum_of(&Cell::nondeg(n, i));
            let class = if rel.levels[n][i as usize] == 0 {
                cnt.base += 1;
                CellClass::Base
            } else if datum_is_degenerate(&x, n + 1, &p_of(n, &d).1) {
                cnt.type_one += 1;
                CellClass::TypeOne
            } else {
                cnt.type_two += 1;
                CellClass::TypeTwo
            };
            let beyond = class == CellClass::TypeTwo && n == trunc;
            if beyond {
                cnt.beyond_ceiling += 1;
            } else if class == CellClass::TypeTwo {
                let pc = rel.cell_of(n + 1, &p_of(n, &d).1)?;
                if pc.is_degenerate() {
                    return Err(Error::Internal("P of a type II cell is degenerate".into()));
                }
                pairing.insert((n, i), (n + 1, pc.base));
            }
            kp.push(!beyond);
            row.push(class);
        }
        classes.push(row);
        counts.push(cnt);
        keep.push(kp);
    }

    let (bounded, _) = rel.set.subobject(&keep)?;
    let mut renum: Vec<Vec<u32>> = Vec::new();
    for row in &keep {
        let mut next = 0;
        renum.push(row.iter().map(|&k| if k { next += 1; next - 1 } else { u32::MAX }).collect());
    }
    let cof_asg = rel
        .unit
        .assignment
        .iter()
        .map(|row| row.iter().map(|c| Cell { word: c.word, base: renum[c.base_dim()][c.base as usize] }).collect())
        .collect();
    let cofibration = SimplicialMap::new_unchecked(rel.unit.source.clone(), bounded.clone(), cof_asg);
    let pairing = pairing
        .into_iter()
        .map(|((d, i), (e, j))| ((d, renum[d][i as usize]), (e, renum[e][j as usize])))
        .collect();
    let structure = PStructure::new(cofibration, pairing)?;
    let validation = structure.validate()?;

    let properties = check_properties(&rel, &forms);
    Ok(ExUnitStructure { ceiling: trunc, bounded, structure, validation, classes, counts, properties, rel })
}

fn check_properties(rel: &ExRel, forms: &[HashSet<Datum>]) -> PropertyReport {
    let x = rel.base();
    let mut points: Vec<PointCheck> = STATEMENTS
        .iter()
        .enumerate()
        .map(|(i, s)| PointCheck { point: i + 1, statement: s.to_string(), instances: 0, failures: Vec::new() })
        .collect();
    let mut record = |p: usize, ok: bool, what: &dyn Fn() -> String| {
        points[p - 1].instances += 1;
        if !ok && points[p - 1].failures.len() < 16 {
            points[p - 1].failures.push(what());
        }
    };
    let type_one = |n: usize, d: &Datum| -> bool {
        !datum_is_degenerate(x, n, d) && filtration_level(x, n, d) > 0 && forms[n].contains(d)
    };
    for n in 0..=rel.trunc() {
        for c in rel.set.all_cells(n) {
            let name = || rel.set.describe(&c);
            let d = rel.datum_of(&c);
            let k = filtration_level(x, n, &d);
            let p = precompose(x, &d, &JoinMap::contraction(n, k));
            let p_degenerate = datum_is_degenerate(x, n + 1, &p);

            record(1, precompose(x, &p, &sd_face(n + 1, k + 1)) == d, &|| name());
            for h in 0..=n {
                let same = in_filtration(x, n, &d, h as isize) == in_filtration(x, n + 1, &p, h as isize);
                record(2, same, &|| format!("{} at h = {h}", name()));
            }
            for kk in 1..=n {
                if in_filtration(x, n, &d, kk as isize - 1) {
                    let deg = datum_is_degenerate(x, n + 1, &precompose(x, &d, &JoinMap::contraction(n, kk)));
                    record(3, deg, &|| format!("{} with k = {kk}", name()));
                }
            }
            let k2 = filtration_level(x, n + 1, &p);
            let pp = precompose(x, &p, &JoinMap::contraction(n + 1, k2));
            record(4, datum_is_degenerate(x, n + 2, &pp), &|| name());
            if c.is_degenerate() || k == 0 || type_one(n, &d) {
                record(5, p_degenerate, &|| name());
            }
            if k >= 1 {
                for i in 0..=k {
                    let face = precompose(x, &p, &sd_face(n + 1, i));
                    record(6, in_filtration(x, n, &face, k as isize - 1), &|| format!("{} face {i}", name()));
                }
            }
            for i in k + 2..=n + 1 {
                let face = precompose(x, &p, &sd_face(n + 1, i));
                let ok = datum_is_degenerate(x, n, &face) || type_one(n, &face);
                record(7, ok, &|| format!("{} face {i}", name()));
            }
            if !c.is_degenerate() && k > 0 {
                record(8, type_one(n, &d) == p_degenerate, &|| name());
            }
        }
    }
    PropertyReport { points }
}
