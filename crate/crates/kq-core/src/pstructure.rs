//! P-structures: recipes presenting a cofibration as iterated horn attachments.
//!
//! Relative non-degenerate cells of `A ↪ B` are split into type I and type II, with
//! a bijection `P` from type II to type I such that each type II cell `x` is the
//! unique face `d_i(Px)`. Heights are computed by depth-first search over the
//! antecedent relation, which detects cycles instead of iterating forever.
//!
//! Height conventions: cells of `A` report height 0. Every other cell has height
//! `k ≥ 1`, the least `k` with `Ant^k` empty; a relative cell whose antecedents all
//! lie in `A` therefore has height 2 (and weak height 1).

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::path::Path;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::delta::{combinations, injection_with_image, injections, OrdinalMap};
use crate::error::{Error, Result};
use crate::lifting::corner_product;
use crate::sset::{
    cell_ref, generator, horn, is_isomorphism, parse_cell_ref, pushout, simplex, simplex_cell,
    vertex_name, Cell, CellRef, GeneratorKind, MapFile, Pushout, SetFile, SimplicialMap, SimplicialSet,
};

/// A non-degenerate cell `(dim, index)`.
pub type CellId = (usize, u32);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Role {
    Base,
    TypeOne,
    TypeTwo,
    Unassigned,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Variant {
    /// All antecedents, closed under faces.
    Full,
    /// Only type II cells among the immediate antecedents.
    TypeTwo,
}

#[derive(Clone, Debug)]
pub struct PStructure {
    pub cofibration: SimplicialMap,
    /// Type II cell ↦ its type I partner.
    pub pairing: BTreeMap<CellId, CellId>,
    in_base: Vec<Vec<bool>>,
    inverse: HashMap<CellId, CellId>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "result", rename_all = "snake_case")]
pub enum Height {
    Finite { height: usize },
    Infinite { cycle: Vec<String> },
}

impl Height {
    pub fn value(&self) -> Option<usize> {
        match self {
            Height::Finite { height } => Some(*height),
            Height::Infinite { .. } => None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Condition {
    Partition,
    Dimension,
    UniqueFace,
    FiniteHeight,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub condition: Condition,
    pub witness: String,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub passed: bool,
    pub type_one: usize,
    pub type_two: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub violation: Option<Violation>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_weak_height: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_height: Option<usize>,
}

/// Raw heights of every non-degenerate cell (`None` when infinite) and the first
/// cycle met.
struct HeightTable {
    raw: Vec<Vec<Option<usize>>>,
    cycle: Option<Vec<CellId>>,
}

impl PStructure {
    pub fn new(cofibration: SimplicialMap, pairing: BTreeMap<CellId, CellId>) -> Result<PStructure> {
        if !cofibration.is_levelwise_injective() {
            return Err(Error::NotInjective("a P-structure needs a cofibration".into()));
        }
        let b = &cofibration.target;
        for (&(d, i), &(e, j)) in &pairing {
            if d > b.dim_bound() || i as usize >= b.count(d) || e > b.dim_bound() || j as usize >= b.count(e) {
                return Err(Error::IndexOutOfRange { index: i.max(j) as usize, dim: d.max(e) });
            }
        }
        let in_base = cofibration.image_mask();
        let mut inverse = HashMap::new();
        for (&x, &y) in &pairing {
            inverse.entry(y).or_insert(x);
        }
        Ok(PStructure { cofibration, pairing, in_base, inverse })
    }

    pub fn target(&self) -> &Arc<SimplicialSet> {
        &self.cofibration.target
    }

    pub fn role(&self, (d, i): CellId) -> Role {
        if self.in_base[d][i as usize] {
            Role::Base
        } else if self.pairing.contains_key(&(d, i)) {
            Role::TypeTwo
        } else if self.inverse.contains_key(&(d, i)) {
            Role::TypeOne
        } else {
            Role::Unassigned
        }
    }

    pub fn name(&self, (d, i): CellId) -> String {
        self.target().name(d, i).to_string()
    }

    fn p_cell(&self, x: CellId) -> Cell {
        let (e, j) = self.pairing[&x];
        Cell::nondeg(e, j)
    }

    /// The unique `i` with `d_i(Px) = x`, if there is exactly one.
    pub fn face_index(&self, x: CellId) -> Option<usize> {
        let p = self.p_cell(x);
        if p.dim() == 0 {
            return None;
        }
        let target = Cell::nondeg(x.0, x.1);
        let hits: Vec<usize> = (0..=p.dim()).filter(|&i| self.target().act(&p, &OrdinalMap::face_map(p.dim() + 1, i)) == target).collect();
        (hits.len() == 1).then(|| hits[0])
    }

    /// Immediate antecedents of a non-degenerate cell.
    fn ant_of(&self, x: CellId, variant: Variant) -> Result<BTreeSet<Cell>> {
        let b = self.target();
        match self.role(x) {
            Role::Base => Ok(BTreeSet::new()),
            Role::TypeOne => self.ant_of(self.inverse[&x], variant),
            Role::Unassigned => Err(Error::Precondition(format!("{} has no role", self.name(x)))),
            Role::TypeTwo => {
                let i = self
                    .face_index(x)
                    .ok_or_else(|| Error::Precondition(format!("{} is not a unique face of its partner", self.name(x))))?;
                let p = self.p_cell(x);
                let n = p.dim();
                let mut out = BTreeSet::new();
                for j in (0..=n).filter(|&j| j != i) {
                    let c = b.act(&p, &OrdinalMap::face_map(n + 1, j));
                    match variant {
                        Variant::TypeTwo => {
                            if !c.is_degenerate() && self.role((c.dim(), c.base)) == Role::TypeTwo {
                                out.insert(c);
                            }
                        }
                        Variant::Full => {
                            let size = c.dim() + 1;
                            for k in 1..=size {
                                for inj in injections(k, size) {
                                    out.insert(b.act(&c, &inj));
                                }
                            }
                        }
                    }
                }
                Ok(out)
            }
        }
    }

    /// `Ant(b)` (or `Ant_II(b)`) of an arbitrary cell.
    pub fn ant(&self, b: &Cell, variant: Variant) -> Result<BTreeSet<Cell>> {
        self.ant_of((b.base_dim(), b.base), variant)
    }

    /// `Ant^k(b)` for `k ≥ 1`.
    pub fn ant_sets(&self, b: &Cell, variant: Variant, k: usize) -> Result<BTreeSet<Cell>> {
        if k < 1 {
            return Err(Error::Precondition("antecedent iteration starts at 1".into()));
        }
        let mut cur = self.ant(b, variant)?;
        for _ in 1..k {
            let mut next = BTreeSet::new();
            for c in &cur {
                next.extend(self.ant(c, variant)?);
            }
            cur = next;
        }
        Ok(cur)
    }

    fn heights(&self, variant: Variant) -> Result<HeightTable> {
        let b = self.target();
        let mut table = HeightTable {
            raw: (0..=b.dim_bound()).map(|d| vec![None; b.count(d)]).collect(),
            cycle: None,
        };
        // 0 unvisited, 1 on the stack, 2 finished.
        let mut state: Vec<Vec<u8>> = (0..=b.dim_bound()).map(|d| vec![0; b.count(d)]).collect();
        let mut edges: HashMap<CellId, Vec<CellId>> = HashMap::new();
        let mut stack: Vec<CellId> = Vec::new();
        for root in b.nondeg_cells() {
            self.visit(root, variant, &mut table, &mut state, &mut edges, &mut stack)?;
        }
        Ok(table)
    }

    fn visit(
        &self,
        v: CellId,
        variant: Variant,
        table: &mut HeightTable,
        state: &mut [Vec<u8>],
        edges: &mut HashMap<CellId, Vec<CellId>>,
        stack: &mut Vec<CellId>,
    ) -> Result<()> {
        match state[v.0][v.1 as usize] {
            2 => return Ok(()),
            1 => {
                if table.cycle.is_none() {
                    let start = stack.iter().position(|&s| s == v).expect("cycle start is on the stack");
                    table.cycle = Some(stack[start..].to_vec());
                }
                return Ok(());
            }
            _ => {}
        }
        state[v.0][v.1 as usize] = 1;
        stack.push(v);
        let next: Vec<CellId> = {
            let set: BTreeSet<CellId> = self.ant_of(v, variant)?.iter().map(|c| (c.base_dim(), c.base)).collect();
            set.into_iter().collect()
        };
        let mut h = Some(1usize);
        for &w in &next {
            self.visit(w, variant, table, state, edges, stack)?;
            h = match (h, state[w.0][w.1 as usize], table.raw[w.0][w.1 as usize]) {
                (Some(a), 2, Some(b)) => Some(a.max(b + 1)),
                _ => None,
            };
        }
        edges.insert(v, next);
        stack.pop();
        table.raw[v.0][v.1 as usize] = h;
        state[v.0][v.1 as usize] = 2;
        Ok(())
    }

    fn report(&self, table: &HeightTable, x: CellId) -> Height {
        if self.role(x) == Role::Base {
            return Height::Finite { height: 0 };
        }
        match table.raw[x.0][x.1 as usize] {
            Some(h) => Height::Finite { height: h },
            None => Height::Infinite {
                cycle: table.cycle.as_ref().map(|c| c.iter().map(|&y| self.name(y)).collect()).unwrap_or_default(),
            },
        }
    }

    /// (Weak) P-height of a cell; cells of `A` report 0.
    pub fn p_height(&self, b: &Cell, variant: Variant) -> Result<Height> {
        let table = self.heights(variant)?;
        Ok(self.report(&table, (b.base_dim(), b.base)))
    }

    fn fail(&self, condition: Condition, x: CellId, detail: String) -> ValidationReport {
        ValidationReport {
            passed: false,
            type_one: self.inverse.len(),
            type_two: self.pairing.len(),
            violation: Some(Violation { condition, witness: self.name(x), detail }),
            max_weak_height: None,
            max_height: None,
        }
    }

    /// Checks the partition, then dimensions, unique faces and finite heights.
    pub fn validate(&self) -> Result<ValidationReport> {
        let b = self.target();
        for (&x, &y) in &self.pairing {
            if self.in_base[x.0][x.1 as usize] || self.in_base[y.0][y.1 as usize] {
                return Ok(self.fail(Condition::Partition, x, "paired cell lies in the base".into()));
            }
            if self.pairing.contains_key(&y) {
                return Ok(self.fail(Condition::Partition, y, "cell is both type I and type II".into()));
            }
            if self.inverse[&y] != x {
                return Ok(self.fail(Condition::Partition, y, "P is not injective".into()));
            }
        }
        if let Some(x) = b.nondeg_cells().find(|&x| self.role(x) == Role::Unassigned) {
            return Ok(self.fail(Condition::Partition, x, "relative cell is neither type I nor type II".into()));
        }
        for (&x, &y) in &self.pairing {
            if y.0 != x.0 + 1 {
                return Ok(self.fail(Condition::Dimension, x, format!("partner {} has dimension {}", self.name(y), y.0)));
            }
        }
        for &x in self.pairing.keys() {
            if self.face_index(x).is_none() {
                return Ok(self.fail(Condition::UniqueFace, x, format!("not a unique face of {}", self.name(self.pairing[&x]))));
            }
        }
        let weak = self.heights(Variant::TypeTwo)?;
        let mut max_weak = 0;
        for &x in self.pairing.keys() {
            match self.report(&weak, x) {
                Height::Finite { height } => max_weak = max_weak.max(height),
                Height::Infinite { cycle } => {
                    return Ok(self.fail(Condition::FiniteHeight, x, format!("antecedent cycle {}", cycle.join(" → "))));
                }
            }
        }
        let full = self.heights(Variant::Full)?;
        let mut max_full = 0;
        for x in b.nondeg_cells() {
            match self.report(&full, x) {
                Height::Finite { height } => max_full = max_full.max(height),
                Height::Infinite { .. } => {
                    return Err(Error::Internal(format!(
                        "{} has infinite height although all weak heights are finite",
                        self.name(x)
                    )));
                }
            }
        }
        Ok(ValidationReport {
            passed: true,
            type_one: self.inverse.len(),
            type_two: self.pairing.len(),
            violation: None,
            max_weak_height: Some(max_weak),
            max_height: Some(max_full),
        })
    }

    /// Groups the horn attachments by height.
    pub fn compile(&self) -> Result<AnodynePresentation> {
        let report = self.validate()?;
        if !report.passed {
            return Err(Error::Precondition(format!("P-structure fails validation: {:?}", report.violation)));
        }
        let b = self.target();
        let table = self.heights(Variant::Full)?;
        let height = |x: CellId| match self.report(&table, x) {
            Height::Finite { height } => height,
            Height::Infinite { .. } => unreachable!("validated structures have finite heights"),
        };
        let mut stages: BTreeMap<usize, Vec<Attachment>> = BTreeMap::new();
        for (&u, &pu) in &self.pairing {
            let h = height(u);
            let i = self.face_index(u).expect("validated");
            let n = pu.0;
            let top = Cell::nondeg(n, pu.1);
            let mut attaching = BTreeMap::new();
            for size in 1..=n {
                for vs in combinations(n + 1, size) {
                    if size == n && !vs.contains(&i) {
                        continue;
                    }
                    let c = b.act(&top, &injection_with_image(&vs, n + 1)?);
                    if height((c.base_dim(), c.base)) >= h {
                        return Err(Error::Internal(format!(
                            "horn of {} meets {} at height {h}",
                            self.name(pu),
                            b.describe(&c)
                        )));
                    }
                    attaching.insert(vertex_name(&vs, n), cell_ref(b, &c));
                }
            }
            stages.entry(h).or_default().push(Attachment { n, i, type_two: self.name(u), type_one: self.name(pu), attaching });
        }
        Ok(AnodynePresentation {
            cofibration: MapFile::inline(&self.cofibration),
            stages: stages.into_iter().map(|(height, attachments)| Stage { height, attachments }).collect(),
        })
    }

    /// Type II cells with their partners and face indices, ordered by height and
    /// then by cell, so every horn is present before it is filled.
    pub fn attachment_order(&self) -> Result<Vec<(CellId, CellId, usize)>> {
        let report = self.validate()?;
        if !report.passed {
            return Err(Error::Precondition(format!("P-structure fails validation: {:?}", report.violation)));
        }
        let table = self.heights(Variant::Full)?;
        let mut out: Vec<(usize, CellId, CellId, usize)> = self
            .pairing
            .iter()
            .map(|(&u, &pu)| {
                let h = self.report(&table, u).value().expect("validated structures have finite heights");
                (h, u, pu, self.face_index(u).expect("validated"))
            })
            .collect();
        out.sort();
        Ok(out.into_iter().map(|(_, u, pu, i)| (u, pu, i)).collect())
    }

    /// The structure inherited by `C → B ∐_A C` along `g: A → C`.
    pub fn pushout_along(&self, g: &SimplicialMap) -> Result<(Pushout, PStructure)> {
        let po = pushout(&self.cofibration, g)?;
        let mut pairing = BTreeMap::new();
        for (&x, &y) in &self.pairing {
            let (px, py) = (po.from_b.at(x.0, x.1), po.from_b.at(y.0, y.1));
            if px.is_degenerate() || py.is_degenerate() {
                return Err(Error::Internal("pushout collapsed a relative cell".into()));
            }
            pairing.insert((x.0, px.base), (y.0, py.base));
        }
        let ps = PStructure::new(po.from_c.clone(), pairing)?;
        Ok((po, ps))
    }
}

/// One horn `Λ^i[n]` glued along `attaching`, adding `type_two` and `type_one`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Attachment {
    pub n: usize,
    pub i: usize,
    pub type_two: String,
    pub type_one: String,
    /// Horn cell (named by its vertices) ↦ cell of the previous stage.
    pub attaching: BTreeMap<String, CellRef>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Stage {
    pub height: usize,
    pub attachments: Vec<Attachment>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnodynePresentation {
    pub cofibration: MapFile,
    pub stages: Vec<Stage>,
}

/// Where a well-formed presentation stops agreeing with its target.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReplayFailure {
    pub stage: usize,
    /// The cell that is missing or misplaced.
    pub witness: String,
    pub detail: String,
}

/// A P-structure by cell names: type II cell ↦ its type I partner.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct PStructureFile {
    pub pairs: BTreeMap<String, String>,
}

impl PStructureFile {
    pub fn from_structure(ps: &PStructure) -> PStructureFile {
        PStructureFile { pairs: ps.pairing.iter().map(|(&x, &y)| (ps.name(x), ps.name(y))).collect() }
    }

    /// Resolves the names in the target of `cofibration`.
    pub fn to_structure(&self, cofibration: SimplicialMap) -> Result<PStructure> {
        let b = cofibration.target.clone();
        let find = |n: &str| b.lookup(n).ok_or_else(|| Error::Parse(format!("unknown cell {n}")));
        let pairing = self.pairs.iter().map(|(x, y)| Ok((find(x)?, find(y)?))).collect::<Result<_>>()?;
        PStructure::new(cofibration, pairing)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("structures serialize")
    }

    pub fn from_json(s: &str) -> Result<PStructureFile> {
        serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))
    }
}

/// The rebuilt object, every intermediate stage, and the comparison isomorphism
/// onto the original target.
#[derive(Clone, Debug)]
pub struct Replay {
    pub stages: Vec<Arc<SimplicialSet>>,
    pub comparison: SimplicialMap,
}

fn rename(x: &SimplicialSet, renames: &HashMap<String, String>) -> Result<SimplicialSet> {
    let mut f = SetFile::from_set(x);
    let sub = |s: &String| renames.get(s).cloned().unwrap_or_else(|| s.clone());
    for names in f.cells.values_mut() {
        for n in names.iter_mut() {
            *n = sub(n);
        }
    }
    f.faces = f
        .faces
        .into_iter()
        .map(|(k, fs)| (sub(&k), fs.into_iter().map(|(w, base)| (w, sub(&base))).collect()))
        .collect();
    f.to_set()
}

impl AnodynePresentation {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("presentations serialize")
    }

    pub fn from_json(s: &str) -> Result<AnodynePresentation> {
        serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn attachment_count(&self) -> usize {
        self.stages.iter().map(|s| s.attachments.len()).sum()
    }

    /// Rebuilds the target by pushouts of horn inclusions, starting from the image
    /// of the cofibration, and compares it with the original cell by cell.
    pub fn replay(&self) -> Result<Replay> {
        self.try_replay()?
            .map_err(|f| Error::Precondition(format!("replay fails at {} (stage {}): {}", f.witness, f.stage, f.detail)))
    }

    /// As [`AnodynePresentation::replay`], separating malformed input (`Err`) from a
    /// well-formed presentation that does not rebuild the target (`Ok(Err(_))`).
    pub fn try_replay(&self) -> Result<std::result::Result<Replay, ReplayFailure>> {
        let f = self.cofibration.to_map(Path::new("."))?;
        let b = f.target.clone();
        let (mut current, _) = b.subobject(&f.image_mask())?;
        let mut stages = vec![current.clone()];
        for stage in &self.stages {
            let prev = current.clone();
            for at in &stage.attachments {
                let (h, inc) = generator(GeneratorKind::Horn, at.n, Some(at.i))?;
                let inc = inc.expect("horns come with their inclusion");
                let mut asg = Vec::new();
                for d in 0..=h.dim_bound() {
                    let mut row = Vec::new();
                    for name in h.names(d) {
                        let r = at
                            .attaching
                            .get(name)
                            .ok_or_else(|| Error::Parse(format!("attachment for {} lacks {name}", at.type_one)))?;
                        if prev.lookup(&r.1).is_none() {
                            return Ok(Err(ReplayFailure {
                                stage: stage.height,
                                witness: r.1.clone(),
                                detail: format!("{} attaches along {} before it exists", at.type_one, r.1),
                            }));
                        }
                        row.push(parse_cell_ref(&current, r)?);
                    }
                    asg.push(row);
                }
                let attach = SimplicialMap::new(h, current.clone(), asg)?;
                let po = pushout(&inc, &attach)?;
                let top = po.from_b.at(at.n, 0);
                let face = po.set.act(&top, &OrdinalMap::face_map(at.n + 1, at.i));
                let renames = HashMap::from([
                    (po.set.name(at.n, top.base).to_string(), at.type_one.clone()),
                    (po.set.name(at.n - 1, face.base).to_string(), at.type_two.clone()),
                ]);
                current = Arc::new(rename(&po.set, &renames)?);
            }
            stages.push(current.clone());
        }
        let last = self.stages.last().map_or(0, |s| s.height);
        let fail = |witness: &str, detail: String| Ok(Err(ReplayFailure { stage: last, witness: witness.to_string(), detail }));
        for d in 0..=b.dim_bound() {
            if let Some(name) = b.names(d).iter().find(|n| current.lookup(n).is_none()) {
                return fail(name, "cell of the target is never attached".into());
            }
        }
        let mut asg = Vec::new();
        for d in 0..=current.dim_bound() {
            let mut row = Vec::new();
            for name in current.names(d) {
                let Some((e, j)) = b.lookup(name) else {
                    return fail(name, "replay produced a cell unknown to the target".into());
                };
                if e != d {
                    return fail(name, format!("attached in dimension {d} but has dimension {e} in the target"));
                }
                row.push(Cell::nondeg(d, j));
            }
            asg.push(row);
        }
        let comparison = match SimplicialMap::new(current.clone(), b, asg) {
            Ok(c) => c,
            Err(e) => return fail("", format!("faces disagree with the target: {e}")),
        };
        if !is_isomorphism(&comparison) {
            return fail("", "replay is not isomorphic to the target".into());
        }
        Ok(Ok(Replay { stages, comparison }))
    }
}

/// The one-pair structure on `Λ^i[n] ↪ Δ[n]`.
pub fn horn_pstructure(n: usize, i: usize) -> Result<PStructure> {
    let (_, inc) = generator(GeneratorKind::Horn, n, Some(i))?;
    let inc = inc.expect("horns come with their inclusion");
    let full = inc.target.clone();
    let missing: Vec<usize> = (0..=n).filter(|&v| v != i).collect();
    let (d, face) = full.lookup(&vertex_name(&missing, n)).expect("simplex has every face");
    let pairing = BTreeMap::from([((d, face), (n, 0))]);
    PStructure::new(inc, pairing)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CornerRecipe {
    /// Valid for `k < m`.
    Direct,
    /// The direct recipe with both orders reversed; valid for `k > 0`.
    Reversed,
}

fn direct_insertion(chain: &[(usize, usize)], k: usize) -> Option<Vec<(usize, usize)>> {
    let q = chain.iter().position(|&(_, r)| r == k + 1)?;
    let col = chain[q].0;
    if q > 0 && chain[q - 1] == (col, k) {
        return None;
    }
    let mut out = chain.to_vec();
    out.insert(q, (col, k));
    Some(out)
}

/// For a relative chain in `[n] × [m]`: its `P`-image when it is type II.
///
/// The direct recipe looks at the first point `(b, k+1)` of row `k+1`: the chain is
/// type II exactly when `(b, k)` is missing, and `P` inserts it.
pub fn corner_insertion(chain: &[(usize, usize)], n: usize, k: usize, m: usize, recipe: CornerRecipe) -> Option<Vec<(usize, usize)>> {
    match recipe {
        CornerRecipe::Direct => direct_insertion(chain, k),
        CornerRecipe::Reversed => {
            let flip = |&(a, r): &(usize, usize)| (n - a, m - r);
            let rev: Vec<(usize, usize)> = chain.iter().rev().map(flip).collect();
            direct_insertion(&rev, m - k).map(|c| c.iter().rev().map(flip).collect())
        }
    }
}

/// A corner map `∂Δ[n] □ Λ^k[m]` with its Moss structure.
#[derive(Clone, Debug)]
pub struct CornerStructure {
    pub structure: PStructure,
    /// Vertex chain of each non-degenerate cell of `Δ[n] × Δ[m]`.
    pub chains: Vec<Vec<Vec<(usize, usize)>>>,
}

impl CornerStructure {
    pub fn cell_of_chain(&self, chain: &[(usize, usize)]) -> Option<CellId> {
        self.chains
            .iter()
            .enumerate()
            .find_map(|(d, row)| row.iter().position(|c| c == chain).map(|i| (d, i as u32)))
    }
}

/// The canonical recipe: direct when `k < m`, reversed for `k = m`.
pub fn corner_pstructure(n: usize, k: usize, m: usize) -> Result<CornerStructure> {
    let recipe = if k < m { CornerRecipe::Direct } else { CornerRecipe::Reversed };
    corner_pstructure_with(n, k, m, recipe)
}

pub fn corner_pstructure_with(n: usize, k: usize, m: usize, recipe: CornerRecipe) -> Result<CornerStructure> {
    if m == 0 || k > m {
        return Err(Error::Precondition(format!("no horn Λ^{k}[{m}]")));
    }
    match recipe {
        CornerRecipe::Direct if k >= m => return Err(Error::Precondition("the direct recipe needs k < m".into())),
        CornerRecipe::Reversed if k == 0 => return Err(Error::Precondition("the reversed recipe needs k > 0".into())),
        _ => {}
    }
    let (_, bd) = generator(GeneratorKind::Boundary, n, None)?;
    let (_, hn) = generator(GeneratorKind::Horn, m, Some(k))?;
    let corner = corner_product(&bd.expect("boundary inclusion"), &hn.expect("horn inclusion"))?;
    let prod = &corner.codomain;
    let b = prod.set.clone();
    let vertex = |c: &Cell, t: usize| {
        let v = b.act(c, &OrdinalMap::constant(1, c.dim() + 1, t));
        (prod.proj1.apply(&v).base as usize, prod.proj2.apply(&v).base as usize)
    };
    let chains: Vec<Vec<Vec<(usize, usize)>>> = (0..=b.dim_bound())
        .map(|d| (0..b.count(d) as u32).map(|i| (0..=d).map(|t| vertex(&Cell::nondeg(d, i), t)).collect()).collect())
        .collect();
    let in_base = corner.map.image_mask();
    let mut pairing = BTreeMap::new();
    for (d, i) in b.nondeg_cells() {
        if in_base[d][i as usize] {
            continue;
        }
        if let Some(pc) = corner_insertion(&chains[d][i as usize], n, k, m, recipe) {
            let cols: Vec<usize> = pc.iter().map(|p| p.0).collect();
            let rows: Vec<usize> = pc.iter().map(|p| p.1).collect();
            let c = prod
                .pair(&simplex_cell(n, &cols)?, &simplex_cell(m, &rows)?)
                .ok_or_else(|| Error::Internal(format!("inserted chain {pc:?} is not a cell")))?;
            if c.is_degenerate() {
                return Err(Error::Internal(format!("inserted chain {pc:?} is degenerate")));
            }
            pairing.insert((d, i), (d + 1, c.base));
        }
    }
    Ok(CornerStructure { structure: PStructure::new(corner.map, pairing)?, chains })
}

/// The inclusion `Λ^i[n] ↪ Δ[n]` as a plain map, for callers building structures
/// by hand.
pub fn horn_inclusion(n: usize, i: usize) -> Result<SimplicialMap> {
    let h = Arc::new(horn(n, i)?);
    let full = Arc::new(simplex(n));
    crate::sset::inclusion_by_name(&h, &full)
}

/// Searches for a P-structure on `cofibration` by elementary expansions: a pair
/// `(u, y)` may be added once every face of `y` other than its unique face `u` is
/// present. Depth-first with a visited set; `Ok(None)` when the relative cells
/// cannot be exhausted, `Err` when more than `node_limit` states are explored.
pub fn search_pstructure(cofibration: &SimplicialMap, node_limit: usize) -> Result<Option<PStructure>> {
    if !cofibration.is_levelwise_injective() {
        return Err(Error::NotInjective("a P-structure needs a cofibration".into()));
    }
    let b = cofibration.target.clone();
    let mut present = cofibration.image_mask();
    let remaining = present.iter().flatten().filter(|&&p| !p).count();
    let mut search = ExpansionSearch { b, visited: std::collections::HashSet::new(), nodes: 0, node_limit, stack: Vec::new() };
    if search.run(&mut present, remaining)? {
        let pairing = search.stack.into_iter().collect();
        let ps = PStructure::new(cofibration.clone(), pairing)?;
        Ok(Some(ps))
    } else {
        Ok(None)
    }
}

struct ExpansionSearch {
    b: Arc<SimplicialSet>,
    visited: std::collections::HashSet<Vec<Vec<bool>>>,
    nodes: usize,
    node_limit: usize,
    stack: Vec<(CellId, CellId)>,
}

impl ExpansionSearch {
    fn has(present: &[Vec<bool>], c: &Cell) -> bool {
        present[c.base_dim()][c.base as usize]
    }

    fn candidates(&self, present: &[Vec<bool>]) -> Vec<(CellId, CellId)> {
        let mut out = Vec::new();
        for d in 1..=self.b.dim_bound() {
            for y in 0..self.b.count(d) as u32 {
                if present[d][y as usize] {
                    continue;
                }
                let faces = self.b.faces_of(d, y);
                for (i, u) in faces.iter().enumerate() {
                    if u.is_degenerate() || Self::has(present, u) || faces.iter().filter(|f| *f == u).count() != 1 {
                        continue;
                    }
                    if faces.iter().enumerate().all(|(j, f)| j == i || Self::has(present, f)) {
                        out.push(((d - 1, u.base), (d, y)));
                    }
                }
            }
        }
        out
    }

    fn run(&mut self, present: &mut Vec<Vec<bool>>, remaining: usize) -> Result<bool> {
        if remaining == 0 {
            return Ok(true);
        }
        if !self.visited.insert(present.clone()) {
            return Ok(false);
        }
        self.nodes += 1;
        if self.nodes > self.node_limit {
            return Err(Error::Internal(format!("P-structure search exceeded {} states", self.node_limit)));
        }
        for (u, y) in self.candidates(present) {
            present[u.0][u.1 as usize] = true;
            present[y.0][y.1 as usize] = true;
            self.stack.push((u, y));
            if self.run(present, remaining - 2)? {
                return Ok(true);
            }
            self.stack.pop();
            present[u.0][u.1 as usize] = false;
            present[y.0][y.1 as usize] = false;
        }
        Ok(false)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn horn_structure() {
        let ps = horn_pstructure(2, 1).unwrap();
        let rep = ps.validate().unwrap();
        assert!(rep.passed, "{rep:?}");
        let (&u, _) = ps.pairing.iter().next().unwrap();
        let uc = Cell::nondeg(u.0, u.1);
        assert!(ps.ant(&uc, Variant::TypeTwo).unwrap().is_empty());
        assert_eq!(ps.p_height(&uc, Variant::TypeTwo).unwrap(), Height::Finite { height: 1 });
        assert_eq!(ps.p_height(&uc, Variant::Full).unwrap(), Height::Finite { height: 2 });
        assert_eq!(ps.p_height(&Cell::nondeg(0, 0), Variant::Full).unwrap(), Height::Finite { height: 0 });
        let pres = ps.compile().unwrap();
        assert_eq!(pres.stages.len(), 1);
        assert_eq!(pres.attachment_count(), 1);
        pres.replay().unwrap();
    }

    #[test]
    fn spec_chains() {
        let c = corner_insertion(&[(0, 0), (1, 2)], 1, 1, 2, CornerRecipe::Direct).unwrap();
        assert_eq!(c, vec![(0, 0), (1, 1), (1, 2)]);
        assert!(corner_insertion(&[(0, 0), (1, 1), (1, 2)], 1, 1, 2, CornerRecipe::Direct).is_none());
    }

    #[test]
    fn small_corner_validates_and_replays() {
        let cs = corner_pstructure(1, 1, 2).unwrap();
        let rep = cs.structure.validate().unwrap();
        assert!(rep.passed, "{rep:?}");
        let pres = cs.structure.compile().unwrap();
        assert!(pres.stages.len() > 1);
        let r = pres.replay().unwrap();
        assert_eq!(r.comparison.source.nondeg_counts(), cs.structure.target().nondeg_counts());
    }

    #[test]
    fn wrong_dimension_is_reported() {
        let inc = horn_inclusion(2, 1).unwrap();
        let full = inc.target.clone();
        let (d, face) = full.lookup("02").unwrap();
        // The top cell paired downwards with the missing face.
        let ps = PStructure::new(inc.clone(), BTreeMap::from([((2, 0), (d, face))])).unwrap();
        let rep = ps.validate().unwrap();
        assert_eq!(rep.violation.unwrap().condition, Condition::Dimension);
    }
}
