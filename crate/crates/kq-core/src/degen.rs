//! Degeneracy quotients and degeneracy-detecting maps.
//!
//! A map `p: A → B` is a degeneracy quotient when it is surjective and its fibres
//! are exactly the classes of the relation generated by `a ∼ σ* t* a` whenever
//! `p(a)` is `σ`-degenerate (`t` a section of `σ`). The relation is closed
//! under all simplicial operators; [`Congruence`] computes that closure
//! dimension by dimension and re-extracts an Eilenberg–Zilber presentation of the
//! quotient, naming each class after its lexicographically least member.

use std::collections::HashMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::delta::{all_monotone, compose, compose_unchecked, degeneracy_divides, injections, sections, surjections, OrdinalMap};
use crate::error::{Error, Result};
use crate::sset::{pullback, Cell, FiniteCategory, Nerve, Pullback, SetBuilder, SimplicialMap, SimplicialSet};

/// Asks for `cell` to become `sigma`-degenerate.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CollapseDatum {
    pub cell: Cell,
    pub sigma: OrdinalMap,
}

fn check_sigma(c: &Cell, sigma: &OrdinalMap) -> Result<()> {
    if !sigma.is_surjective() {
        return Err(Error::NotSurjective(format!("{sigma:?}")));
    }
    if sigma.source_dim() != c.dim() {
        return Err(Error::SizeMismatch(format!("{sigma:?} does not start at dimension {}", c.dim())));
    }
    Ok(())
}

/// `c = σ* y` for some `y`, read off the normal form.
pub fn sigma_degenerate_by_word(c: &Cell, sigma: &OrdinalMap) -> Result<bool> {
    check_sigma(c, sigma)?;
    Ok(degeneracy_divides(sigma, &c.word)?.is_some())
}

/// Every face `i* c` with `σ ∘ i` non-injective is degenerate.
pub fn sigma_degenerate_by_faces(x: &SimplicialSet, c: &Cell, sigma: &OrdinalMap) -> Result<bool> {
    check_sigma(c, sigma)?;
    let size = c.dim() + 1;
    for k in 1..=size {
        for i in injections(k, size) {
            if !compose_unchecked(sigma, &i).is_injective() && !x.act(c, &i).is_degenerate() {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Decides `σ`-degeneracy both ways and fails if the two disagree.
pub fn is_sigma_degenerate(x: &SimplicialSet, c: &Cell, sigma: &OrdinalMap) -> Result<bool> {
    let a = sigma_degenerate_by_word(c, sigma)?;
    let b = sigma_degenerate_by_faces(x, c, sigma)?;
    if a != b {
        return Err(Error::Internal(format!("σ-degeneracy routes disagree on {c:?} for {sigma:?}")));
    }
    Ok(a)
}

/// First non-degenerate source cell sent to a degenerate cell.
pub fn first_degenerate_image(f: &SimplicialMap) -> Option<(usize, u32)> {
    f.source.nondeg_cells().find(|&(d, i)| f.at(d, i).is_degenerate())
}

pub fn degeneracy_detecting(f: &SimplicialMap) -> bool {
    first_degenerate_image(f).is_none()
}

/// An equivalence relation on the cells of `X` up to a dimension, closed under
/// simplicial operators.
pub struct Congruence<'a> {
    x: &'a SimplicialSet,
    bound: usize,
    cells: Vec<Vec<Cell>>,
    index: Vec<HashMap<Cell, usize>>,
    parent: Vec<Vec<usize>>,
    operators: HashMap<(usize, usize), Vec<OrdinalMap>>,
    generators: usize,
}

impl<'a> Congruence<'a> {
    /// The discrete relation on cells of dimension `≤ bound`.
    pub fn new(x: &'a SimplicialSet, bound: usize) -> Self {
        let cells: Vec<Vec<Cell>> = (0..=bound).map(|d| x.all_cells(d)).collect();
        let index = cells.iter().map(|cs| cs.iter().enumerate().map(|(i, c)| (*c, i)).collect()).collect();
        let parent = cells.iter().map(|cs| (0..cs.len()).collect()).collect();
        Congruence { x, bound, cells, index, parent, operators: HashMap::new(), generators: 0 }
    }

    pub fn bound(&self) -> usize {
        self.bound
    }

    /// Number of generating pairs that were not already related.
    pub fn generator_count(&self) -> usize {
        self.generators
    }

    fn find(&mut self, d: usize, mut i: usize) -> usize {
        let p = &mut self.parent[d];
        let mut root = i;
        while p[root] != root {
            root = p[root];
        }
        while p[i] != root {
            let next = p[i];
            p[i] = root;
            i = next;
        }
        root
    }

    fn position(&self, c: &Cell) -> usize {
        self.index[c.dim()][c]
    }

    /// Class root of a cell; roots are the least member.
    pub fn root(&mut self, c: &Cell) -> Cell {
        let d = c.dim();
        let i = self.position(c);
        let r = self.find(d, i);
        self.cells[d][r]
    }

    pub fn related(&mut self, a: &Cell, b: &Cell) -> bool {
        a.dim() == b.dim() && self.root(a) == self.root(b)
    }

    fn union(&mut self, d: usize, a: usize, b: usize) {
        let (ra, rb) = (self.find(d, a), self.find(d, b));
        if ra != rb {
            let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
            self.parent[d][hi] = lo;
        }
    }

    /// Adds `a ∼ b` and every `θ* a ∼ θ* b`.
    ///
    /// The relation is kept closed, so a pair that is already related contributes
    /// nothing new.
    pub fn identify(&mut self, a: &Cell, b: &Cell) {
        let n = a.dim();
        debug_assert_eq!(n, b.dim());
        if n > self.bound || self.related(a, b) {
            return;
        }
        self.generators += 1;
        for d in 0..=self.bound {
            let ops = self
                .operators
                .entry((d, n))
                .or_insert_with(|| all_monotone(d + 1, n + 1))
                .clone();
            for theta in &ops {
                let (ta, tb) = (self.x.act(a, theta), self.x.act(b, theta));
                if ta != tb {
                    let (ia, ib) = (self.position(&ta), self.position(&tb));
                    self.union(d, ia, ib);
                }
            }
        }
    }

    /// Imposes `a ∼ σ* t* a` for every section `t` of `σ`.
    pub fn make_degenerate(&mut self, a: &Cell, sigma: &OrdinalMap) -> Result<()> {
        for t in sections(sigma)? {
            let b = self.x.act(a, &compose(&t, sigma)?);
            self.identify(a, &b);
        }
        Ok(())
    }

    /// Number of classes in each dimension.
    pub fn class_counts(&mut self) -> Vec<usize> {
        (0..=self.bound)
            .map(|d| (0..self.cells[d].len()).filter(|&i| self.find(d, i) == i).count())
            .collect()
    }

    /// Members of each class in dimension `d`, classes ordered by least member.
    pub fn classes(&mut self, d: usize) -> Vec<Vec<Cell>> {
        let mut groups: Vec<(usize, Vec<Cell>)> = Vec::new();
        let mut slot: HashMap<usize, usize> = HashMap::new();
        for i in 0..self.cells[d].len() {
            let r = self.find(d, i);
            let s = *slot.entry(r).or_insert_with(|| {
                groups.push((r, Vec::new()));
                groups.len() - 1
            });
            groups[s].1.push(self.cells[d][i]);
        }
        groups.into_iter().map(|g| g.1).collect()
    }

    /// The quotient `X/∼` truncated at the relation's bound.
    pub fn quotient(&mut self, x: &Arc<SimplicialSet>) -> Result<Collapse> {
        debug_assert!(std::ptr::eq(Arc::as_ptr(x), self.x));
        let bound = self.bound;
        // For each root: a degenerate member if there is one.
        let mut degen_member: Vec<HashMap<usize, Cell>> = vec![HashMap::new(); bound + 1];
        for d in 0..=bound {
            for i in 0..self.cells[d].len() {
                let c = self.cells[d][i];
                if c.is_degenerate() {
                    let r = self.find(d, i);
                    degen_member[d].entry(r).or_insert(c);
                }
            }
        }
        let mut new_index: Vec<HashMap<usize, u32>> = vec![HashMap::new(); bound + 1];
        let mut representatives: Vec<Vec<Cell>> = vec![Vec::new(); bound + 1];
        let mut b = SetBuilder::new(bound, self.x.is_complete());
        for d in 0..=bound {
            for i in 0..self.cells[d].len() {
                if self.find(d, i) != i || degen_member[d].contains_key(&i) {
                    continue;
                }
                let rep = self.cells[d][i];
                let faces = if d == 0 {
                    Vec::new()
                } else {
                    let mut fs = Vec::with_capacity(d + 1);
                    for k in 0..=d {
                        let f = self.x.face(&rep, k)?;
                        fs.push(self.normal_form(&f, &degen_member, &new_index));
                    }
                    fs
                };
                let idx = b.add_cell(d, self.x.name(d, rep.base).to_string(), faces)?;
                new_index[d].insert(i, idx);
                representatives[d].push(rep);
            }
        }
        let set = Arc::new(b.build());
        let asg = (0..=bound.min(self.x.dim_bound()))
            .map(|d| {
                (0..self.x.count(d) as u32)
                    .map(|i| self.normal_form(&Cell::nondeg(d, i), &degen_member, &new_index))
                    .collect()
            })
            .collect();
        let quotient = SimplicialMap::new(x.clone(), set.clone(), asg)?;
        Ok(Collapse { set, quotient, representatives })
    }

    fn normal_form(&mut self, c: &Cell, degen_member: &[HashMap<usize, Cell>], new_index: &[HashMap<usize, u32>]) -> Cell {
        let d = c.dim();
        let i = self.position(c);
        let r = self.find(d, i);
        match degen_member[d].get(&r) {
            None => Cell::nondeg(d, new_index[d][&r]),
            Some(m) => {
                let inner = self.normal_form(&Cell::nondeg(m.base_dim(), m.base), degen_member, new_index);
                Cell { word: compose_unchecked(&inner.word, &m.word), base: inner.base }
            }
        }
    }
}

/// A quotient together with the least representative of each non-degenerate
/// class.
#[derive(Clone, Debug)]
pub struct Collapse {
    pub set: Arc<SimplicialSet>,
    pub quotient: SimplicialMap,
    /// `representatives[d][q]` is the cell of `X` naming the `q`-th non-degenerate
    /// `d`-cell of the quotient.
    pub representatives: Vec<Vec<Cell>>,
}

fn check_datum(x: &SimplicialSet, datum: &CollapseDatum) -> Result<()> {
    let c = &datum.cell;
    if c.is_degenerate() {
        return Err(Error::Precondition(format!("collapse datum {c:?} is degenerate")));
    }
    if c.dim() > x.dim_bound() || c.base as usize >= x.count(c.dim()) {
        return Err(Error::IndexOutOfRange { index: c.base as usize, dim: c.dim() });
    }
    check_sigma(c, &datum.sigma)
}

fn collapse_within(x: &Arc<SimplicialSet>, data: &[CollapseDatum]) -> Result<Collapse> {
    let mut rel = Congruence::new(x, x.dim_bound());
    for datum in data {
        check_datum(x, datum)?;
        rel.make_degenerate(&datum.cell, &datum.sigma)?;
    }
    rel.quotient(x)
}

/// The universal map out of `X` making each `cell` `sigma`-degenerate.
///
/// A truncated `X` must extend at least one dimension above every collapsed cell.
pub fn collapse(x: &Arc<SimplicialSet>, data: &[CollapseDatum]) -> Result<Collapse> {
    if !x.is_complete() {
        if let Some(top) = data.iter().map(|d| d.cell.dim()).max() {
            if top + 1 > x.dim_bound() {
                return Err(Error::Truncation(format!(
                    "collapsing a {top}-cell needs dim_bound at least {} on a truncated set",
                    top + 1
                )));
            }
        }
    }
    collapse_within(x, data)
}

/// `f = detecting ∘ quotient`.
#[derive(Clone, Debug)]
pub struct DegenFactorization {
    pub quotient: SimplicialMap,
    pub detecting: SimplicialMap,
}

/// Factors `f` as a degeneracy quotient followed by a degeneracy-detecting map.
pub fn factor_degen(f: &SimplicialMap) -> Result<DegenFactorization> {
    let data: Vec<CollapseDatum> = f
        .source
        .nondeg_cells()
        .filter_map(|(d, i)| {
            let y = f.at(d, i);
            y.is_degenerate().then_some(CollapseDatum { cell: Cell::nondeg(d, i), sigma: y.word })
        })
        .collect();
    let col = collapse_within(&f.source, &data)?;
    let asg = col.representatives.iter().map(|row| row.iter().map(|r| f.apply(r)).collect()).collect();
    let detecting = SimplicialMap::new(col.set.clone(), f.target.clone(), asg)?;
    if detecting.after(&col.quotient)? != *f {
        return Err(Error::Internal("factorization does not recompose".into()));
    }
    if let Some((d, i)) = first_degenerate_image(&detecting) {
        return Err(Error::Internal(format!("right factor degenerates {}", col.set.name(d, i))));
    }
    Ok(DegenFactorization { quotient: col.quotient, detecting })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DqFailure {
    /// A non-degenerate target cell outside the image.
    NotSurjective { dim: usize, cell: String },
    /// Two cells with the same image that the relation does not identify.
    SplitFibre { dim: usize, first: String, second: String },
}

/// Outcome of testing fibres against the generated relation.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DqCertificate {
    pub holds: bool,
    pub checked_dim: usize,
    pub class_counts: Vec<usize>,
    pub generators: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub failure: Option<DqFailure>,
}

/// Decides whether `p` is a degeneracy quotient, up to one dimension above the
/// source's bound when the source is complete.
pub fn dq_certificate(p: &SimplicialMap) -> Result<DqCertificate> {
    let a = &p.source;
    let checked_dim = if a.is_complete() { a.dim_bound() + 1 } else { a.dim_bound() };
    let mut rel = Congruence::new(a, checked_dim);
    let fail = |rel: &mut Congruence, failure| DqCertificate {
        holds: false,
        checked_dim,
        class_counts: rel.class_counts(),
        generators: rel.generator_count(),
        failure: Some(failure),
    };
    let hit = p.image_mask();
    if let Some((d, i)) = p.target.nondeg_cells().find(|&(d, i)| d >= hit.len() || !hit[d][i as usize]) {
        let failure = DqFailure::NotSurjective { dim: d, cell: p.target.name(d, i).to_string() };
        return Ok(fail(&mut rel, failure));
    }
    for d in 0..=checked_dim {
        for c in a.all_cells(d) {
            let w = p.apply(&c).word;
            if !w.is_surjective() || w.domain_size() == w.codomain_size() {
                continue;
            }
            for m in 0..d {
                for sigma in surjections(d + 1, m + 1) {
                    if degeneracy_divides(&sigma, &w)?.is_some() {
                        rel.make_degenerate(&c, &sigma)?;
                    }
                }
            }
        }
    }
    for d in 0..=checked_dim {
        let mut first: HashMap<Cell, Cell> = HashMap::new();
        for c in a.all_cells(d) {
            let img = p.apply(&c);
            match first.get(&img) {
                None => {
                    first.insert(img, c);
                }
                Some(o) => {
                    let o = *o;
                    if !rel.related(&o, &c) {
                        let failure = DqFailure::SplitFibre { dim: d, first: a.describe(&o), second: a.describe(&c) };
                        return Ok(fail(&mut rel, failure));
                    }
                }
            }
        }
    }
    Ok(DqCertificate {
        holds: true,
        checked_dim,
        class_counts: rel.class_counts(),
        generators: rel.generator_count(),
        failure: None,
    })
}

/// First non-degenerate `a` with `p(a)` degenerate but `f(a)` not.
pub fn condition_d_violation(p: &SimplicialMap, f: &SimplicialMap) -> Option<(usize, u32)> {
    p.source
        .nondeg_cells()
        .find(|&(d, i)| p.at(d, i).is_degenerate() && !f.at(d, i).is_degenerate())
}

/// The unique `g` with `g ∘ p = f`, if it exists; `p` must be a degeneracy
/// quotient.
pub fn factors_through(p: &SimplicialMap, f: &SimplicialMap) -> Result<Option<SimplicialMap>> {
    if !(Arc::ptr_eq(&p.source, &f.source) || p.source == f.source) {
        return Err(Error::SizeMismatch("maps have different sources".into()));
    }
    let cert = dq_certificate(p)?;
    if !cert.holds {
        return Err(Error::Precondition(format!("not a degeneracy quotient: {:?}", cert.failure)));
    }
    if condition_d_violation(p, f).is_some() {
        return Ok(None);
    }
    let b = &p.target;
    let mut pre: Vec<Vec<Option<(usize, u32)>>> = (0..=b.dim_bound()).map(|d| vec![None; b.count(d)]).collect();
    for (d, i) in p.source.nondeg_cells() {
        let y = p.at(d, i);
        if !y.is_degenerate() {
            pre[d][y.base as usize].get_or_insert((d, i));
        }
    }
    let mut asg = Vec::new();
    for row in &pre {
        let mut out = Vec::new();
        for slot in row {
            let (d, i) = slot.ok_or_else(|| Error::Internal("quotient misses a cell".into()))?;
            out.push(f.at(d, i));
        }
        asg.push(out);
    }
    let g = SimplicialMap::new(b.clone(), f.target.clone(), asg).map_err(|e| Error::Internal(e.to_string()))?;
    if g.after(p)? != *f {
        return Err(Error::Internal("factorization does not recompose".into()));
    }
    Ok(Some(g))
}

/// The nerve map induced by a retraction of a finite poset.
#[derive(Clone, Debug)]
pub struct RetractionQuotient {
    pub source: Nerve,
    pub target: Nerve,
    pub map: SimplicialMap,
    /// Object indices of `P` forming the image, in order.
    pub image: Vec<usize>,
    pub certificate: DqCertificate,
}

fn order_matrix(p: &FiniteCategory) -> Vec<Vec<bool>> {
    let n = p.objects.len();
    let mut le = vec![vec![false; n]; n];
    for m in &p.morphisms {
        le[m.source][m.target] = true;
    }
    le
}

/// `N(P) → N(πP)` for an idempotent monotone `π` that lies entirely below or
/// entirely above the identity.
pub fn poset_retraction_quotient(poset: &FiniteCategory, pi: &[usize], dim_bound: usize) -> Result<RetractionQuotient> {
    if !poset.is_poset() {
        return Err(Error::Precondition("category is not a poset".into()));
    }
    let n = poset.objects.len();
    if pi.len() != n || pi.iter().any(|&v| v >= n) {
        return Err(Error::SizeMismatch("retraction must send each object to an object".into()));
    }
    let le = order_matrix(poset);
    let name = |i: usize| poset.objects[i].clone();
    if let Some(x) = (0..n).find(|&x| pi[pi[x]] != pi[x]) {
        return Err(Error::Precondition(format!("not idempotent at {}", name(x))));
    }
    for x in 0..n {
        for y in 0..n {
            if le[x][y] && !le[pi[x]][pi[y]] {
                return Err(Error::Precondition(format!("not monotone on {} ≤ {}", name(x), name(y))));
            }
        }
    }
    let below = (0..n).all(|x| le[pi[x]][x]);
    let above = (0..n).all(|x| le[x][pi[x]]);
    if !below && !above {
        return Err(Error::Precondition("retraction is neither below nor above the identity".into()));
    }
    let mut image: Vec<usize> = pi.to_vec();
    image.sort_unstable();
    image.dedup();
    let slot: HashMap<usize, usize> = image.iter().enumerate().map(|(k, &o)| (o, k)).collect();
    let sub = FiniteCategory::from_poset(image.iter().map(|&o| name(o)).collect(), |a, b| le[image[a]][image[b]]);
    let source = Nerve::new(poset.clone(), dim_bound)?;
    let target = Nerve::new(sub, dim_bound)?;
    let asg = (0..=dim_bound)
        .map(|d| {
            (0..source.set.count(d) as u32)
                .map(|i| {
                    let chain: Vec<usize> = source.chain_of(d, i).iter().map(|&o| slot[&pi[o]]).collect();
                    target.cell_of_chain(&chain)
                })
                .collect()
        })
        .collect();
    let map = SimplicialMap::new(source.set.clone(), target.set.clone(), asg)?;
    let certificate = dq_certificate(&map)?;
    Ok(RetractionQuotient { source, target, map, image, certificate })
}

/// A pullback of a degeneracy quotient and the verdict on its new projection.
#[derive(Clone, Debug)]
pub struct PullbackCheck {
    pub pullback: Pullback,
    pub certificate: DqCertificate,
}

/// Pulls `p: A → B` back along `f: X → B` and certifies `A ×_B X → X`.
pub fn pullback_preserves_dq_check(p: &SimplicialMap, f: &SimplicialMap) -> Result<PullbackCheck> {
    let base = dq_certificate(p)?;
    if !base.holds {
        return Err(Error::Precondition(format!("not a degeneracy quotient: {:?}", base.failure)));
    }
    let pb = pullback(p, f)?;
    let certificate = dq_certificate(&pb.proj2)?;
    Ok(PullbackCheck { pullback: pb, certificate })
}
