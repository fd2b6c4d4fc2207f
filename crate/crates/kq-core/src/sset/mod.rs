//! Truncated simplicial sets in Eilenberg–Zilber presentation.
//!
//! A [`SimplicialSet`] stores, per dimension up to its `dim_bound`, the list of
//! non-degenerate cells and for each of them its faces in normal form. Every cell
//! is a [`Cell`]: a surjective degeneracy word applied to a non-degenerate base.
//! Degeneracy is therefore decidable by construction, and two cells are equal
//! exactly when their normal forms are.
//!
//! A set is `complete` when it has no non-degenerate cells above `dim_bound`, so
//! that its bound may be raised for free. Generators, nerves of finite posets and
//! their subdivisions are complete; `Ex` objects are truncations.

mod category;
mod format;
mod generators;
mod hom;
mod iso;
mod limits;
mod pushout;
mod semi;

pub use category::{nerve, FiniteCategory, Morphism, Nerve};
pub use format::{cell_ref, load_map, load_set, parse_cell_ref, CellRef, MapFile, SetFile, SetSource};
pub use generators::{boundary, generator, horn, inclusion_by_name, simplex, simplex_cell, simplex_map, vertex_name, GeneratorKind};
pub use hom::{for_each_map, hom_set, BoundaryIndex, SearchControl};
pub use iso::{find_isomorphism, is_isomorphism};
pub use limits::{product, product_map, pullback, Product, Pullback};
pub use pushout::{pushout, Pushout};
pub use semi::{forget_degeneracies, free_simplicial, slice_category, slice_category_with_operators, SemiSimplicialSet};

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::delta::{compose_unchecked, epi_mono_factor, surjections, OrdinalMap};
use crate::error::{Error, Result};

/// A cell in normal form: `word^* base` with `word` surjective and `base` the index
/// of a non-degenerate cell of dimension `word.target_dim()`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Cell {
    pub word: OrdinalMap,
    pub base: u32,
}

impl Cell {
    pub fn nondeg(dim: usize, index: u32) -> Cell {
        Cell { word: OrdinalMap::identity(dim + 1), base: index }
    }

    pub fn dim(&self) -> usize {
        self.word.source_dim()
    }

    pub fn base_dim(&self) -> usize {
        self.word.target_dim()
    }

    pub fn is_degenerate(&self) -> bool {
        self.word.domain_size() != self.word.codomain_size()
    }
}

impl fmt::Debug for Cell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_degenerate() {
            write!(f, "{:?}*#{}@{}", self.word.values(), self.base, self.base_dim())
        } else {
            write!(f, "#{}@{}", self.base, self.base_dim())
        }
    }
}

/// A violated simplicial identity `d_i d_j x = d_{j-1} d_i x`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IdentityViolation {
    pub cell: String,
    pub i: usize,
    pub j: usize,
}

/// Dimension-truncated simplicial set in Eilenberg–Zilber presentation.
#[derive(Clone, PartialEq, Eq)]
pub struct SimplicialSet {
    dim_bound: usize,
    complete: bool,
    names: Vec<Vec<String>>,
    faces: Vec<Vec<Vec<Cell>>>,
    index: HashMap<String, (usize, u32)>,
}

impl fmt::Debug for SimplicialSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "SimplicialSet(bound={}, counts={:?})", self.dim_bound, self.nondeg_counts())
    }
}

/// Incremental constructor for [`SimplicialSet`].
#[derive(Clone, Debug)]
pub struct SetBuilder {
    dim_bound: usize,
    complete: bool,
    names: Vec<Vec<String>>,
    faces: Vec<Vec<Vec<Cell>>>,
    index: HashMap<String, (usize, u32)>,
}

impl SetBuilder {
    pub fn new(dim_bound: usize, complete: bool) -> Self {
        SetBuilder {
            dim_bound,
            complete,
            names: vec![Vec::new(); dim_bound + 1],
            faces: vec![Vec::new(); dim_bound + 1],
            index: HashMap::new(),
        }
    }

    /// Adds a non-degenerate cell and returns its index within its dimension.
    pub fn add_cell(&mut self, dim: usize, name: impl Into<String>, faces: Vec<Cell>) -> Result<u32> {
        let name = name.into();
        if dim > self.dim_bound {
            return Err(Error::InvalidSet(format!("cell {name} above dim_bound {}", self.dim_bound)));
        }
        let expected = if dim == 0 { 0 } else { dim + 1 };
        if faces.len() != expected {
            return Err(Error::InvalidSet(format!("cell {name} needs {expected} faces, got {}", faces.len())));
        }
        for (i, f) in faces.iter().enumerate() {
            if f.dim() + 1 != dim || !f.word.is_surjective() {
                return Err(Error::InvalidSet(format!("face {i} of {name} is not a normal form of dimension {}", dim - 1)));
            }
            if f.base as usize >= self.names[f.base_dim()].len() {
                return Err(Error::InvalidSet(format!("face {i} of {name} refers to a missing cell")));
            }
        }
        if self.index.contains_key(&name) {
            return Err(Error::InvalidSet(format!("duplicate identifier {name}")));
        }
        let idx = self.names[dim].len() as u32;
        self.index.insert(name.clone(), (dim, idx));
        self.names[dim].push(name);
        self.faces[dim].push(faces);
        Ok(idx)
    }

    pub fn count(&self, dim: usize) -> usize {
        self.names[dim].len()
    }

    pub fn lookup(&self, name: &str) -> Option<(usize, u32)> {
        self.index.get(name).copied()
    }

    pub fn build(self) -> SimplicialSet {
        SimplicialSet {
            dim_bound: self.dim_bound,
            complete: self.complete,
            names: self.names,
            faces: self.faces,
            index: self.index,
        }
    }
}

impl SimplicialSet {
    pub fn empty(dim_bound: usize) -> Self {
        SetBuilder::new(dim_bound, true).build()
    }

    pub fn dim_bound(&self) -> usize {
        self.dim_bound
    }

    pub fn is_complete(&self) -> bool {
        self.complete
    }

    /// Number of non-degenerate cells in dimension `d` (zero above the bound).
    pub fn count(&self, d: usize) -> usize {
        self.names.get(d).map_or(0, |v| v.len())
    }

    /// Non-degenerate counts per dimension with trailing zeros removed.
    pub fn nondeg_counts(&self) -> Vec<usize> {
        let mut v: Vec<usize> = self.names.iter().map(|n| n.len()).collect();
        while v.last() == Some(&0) {
            v.pop();
        }
        v
    }

    pub fn total_nondeg(&self) -> usize {
        self.names.iter().map(|n| n.len()).sum()
    }

    /// Largest dimension holding a non-degenerate cell.
    pub fn top_dim(&self) -> Option<usize> {
        (0..=self.dim_bound).rev().find(|&d| self.count(d) > 0)
    }

    pub fn name(&self, dim: usize, idx: u32) -> &str {
        &self.names[dim][idx as usize]
    }

    pub fn names(&self, dim: usize) -> &[String] {
        self.names.get(dim).map_or(&[], |v| v.as_slice())
    }

    pub fn lookup(&self, name: &str) -> Option<(usize, u32)> {
        self.index.get(name).copied()
    }

    /// Stored face table of a non-degenerate cell.
    pub fn faces_of(&self, dim: usize, idx: u32) -> &[Cell] {
        &self.faces[dim][idx as usize]
    }

    /// Readable rendering of a cell, e.g. `s[0,0,1](ab)`.
    pub fn describe(&self, c: &Cell) -> String {
        let n = self.name(c.base_dim(), c.base);
        if c.is_degenerate() {
            format!("s{:?}({n})", c.word.values())
        } else {
            n.to_string()
        }
    }

    /// Iterator over `(dim, idx)` of all non-degenerate cells, by dimension.
    pub fn nondeg_cells(&self) -> impl Iterator<Item = (usize, u32)> + '_ {
        (0..=self.dim_bound).flat_map(move |d| (0..self.count(d) as u32).map(move |i| (d, i)))
    }

    /// `theta^* c` for a monotone `theta: [k] → [dim c]`, in normal form.
    pub fn act(&self, c: &Cell, theta: &OrdinalMap) -> Cell {
        debug_assert_eq!(theta.codomain_size(), c.word.domain_size());
        let g = compose_unchecked(&c.word, theta);
        let em = epi_mono_factor(&g);
        let r = self.restrict(c.base_dim(), c.base, &em.mono);
        Cell { word: compose_unchecked(&r.word, &em.epi), base: r.base }
    }

    /// Restriction of a non-degenerate cell along an injection.
    fn restrict(&self, p: usize, idx: u32, mono: &OrdinalMap) -> Cell {
        if mono.domain_size() == mono.codomain_size() {
            return Cell::nondeg(p, idx);
        }
        let vals = mono.values();
        let mut i = 0usize;
        while i < vals.len() && vals[i] as usize == i {
            i += 1;
        }
        let f = self.faces[p][idx as usize][i];
        let rest: Vec<usize> = vals.iter().map(|&v| if (v as usize) < i { v as usize } else { v as usize - 1 }).collect();
        let rest = OrdinalMap::new(rest.len(), p, &rest).expect("restriction of an injection");
        self.act(&f, &rest)
    }

    /// `d_i c` in normal form.
    pub fn face(&self, c: &Cell, i: usize) -> Result<Cell> {
        let n = c.dim();
        if n == 0 || i > n {
            return Err(Error::IndexOutOfRange { index: i, dim: n });
        }
        Ok(self.act(c, &OrdinalMap::face_map(n + 1, i)))
    }

    /// `s_i c` in normal form.
    pub fn degenerate(&self, c: &Cell, i: usize) -> Result<Cell> {
        let n = c.dim();
        if i > n || n + 2 > crate::delta::MAX_ORDINAL {
            return Err(Error::IndexOutOfRange { index: i, dim: n });
        }
        Ok(Cell { word: compose_unchecked(&c.word, &OrdinalMap::degeneracy_map(n + 2, i)), base: c.base })
    }

    /// Every cell (degenerate or not) of dimension `d`, sorted.
    pub fn all_cells(&self, d: usize) -> Vec<Cell> {
        let mut out = Vec::new();
        for p in 0..=d.min(self.dim_bound) {
            let n = self.count(p) as u32;
            if n == 0 {
                continue;
            }
            for s in surjections(d + 1, p + 1) {
                for b in 0..n {
                    out.push(Cell { word: s, base: b });
                }
            }
        }
        out.sort();
        out
    }

    /// Changes the truncation level. Raising it requires a complete set.
    pub fn with_dim_bound(&self, bound: usize) -> Result<SimplicialSet> {
        if bound > self.dim_bound && !self.complete {
            return Err(Error::Truncation(format!(
                "cannot raise the bound of a truncated set from {} to {bound}",
                self.dim_bound
            )));
        }
        let mut b = SetBuilder::new(bound, self.complete && self.top_dim().map_or(true, |t| t <= bound));
        for d in 0..=bound.min(self.dim_bound) {
            for i in 0..self.count(d) {
                b.add_cell(d, self.names[d][i].clone(), self.faces[d][i].clone())?;
            }
        }
        Ok(b.build())
    }

    /// Checks normal forms of the face table and all simplicial identities.
    pub fn validate(&self) -> std::result::Result<(), SetDefect> {
        for (d, idx) in self.nondeg_cells() {
            if d == 0 {
                continue;
            }
            for (i, f) in self.faces[d][idx as usize].iter().enumerate() {
                if f.dim() + 1 != d || !f.word.is_surjective() || f.base as usize >= self.count(f.base_dim()) {
                    return Err(SetDefect::BadFace { cell: self.name(d, idx).to_string(), i });
                }
            }
        }
        for (d, idx) in self.nondeg_cells() {
            if d < 2 {
                continue;
            }
            let x = Cell::nondeg(d, idx);
            for j in 1..=d {
                for i in 0..j {
                    let a = self.face(&self.face(&x, j).unwrap(), i).unwrap();
                    let b = self.face(&self.face(&x, i).unwrap(), j - 1).unwrap();
                    if a != b {
                        return Err(SetDefect::Identity(IdentityViolation {
                            cell: self.name(d, idx).to_string(),
                            i,
                            j,
                        }));
                    }
                }
            }
        }
        Ok(())
    }

    /// Sub-simplicial set on the given non-degenerate cells (closed under faces),
    /// returned with its inclusion.
    pub fn subobject(self: &Arc<Self>, keep: &[Vec<bool>]) -> Result<(Arc<SimplicialSet>, SimplicialMap)> {
        let mut b = SetBuilder::new(self.dim_bound, self.complete);
        let mut renum: Vec<Vec<u32>> = vec![Vec::new(); self.dim_bound + 1];
        let mut back: Vec<Vec<Cell>> = vec![Vec::new(); self.dim_bound + 1];
        for d in 0..=self.dim_bound {
            renum[d] = vec![u32::MAX; self.count(d)];
            for i in 0..self.count(d) {
                if !keep[d][i] {
                    continue;
                }
                let mut fs = Vec::new();
                for f in &self.faces[d][i] {
                    let r = renum[f.base_dim()][f.base as usize];
                    if r == u32::MAX {
                        return Err(Error::InvalidSet(format!(
                            "subobject is not closed under faces at {}",
                            self.names[d][i]
                        )));
                    }
                    fs.push(Cell { word: f.word, base: r });
                }
                renum[d][i] = b.add_cell(d, self.names[d][i].clone(), fs)?;
                back[d].push(Cell::nondeg(d, i as u32));
            }
        }
        let sub = Arc::new(b.build());
        let inc = SimplicialMap::new_unchecked(sub.clone(), self.clone(), back);
        Ok((sub, inc))
    }
}

/// Why a presented simplicial set is invalid.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SetDefect {
    BadFace { cell: String, i: usize },
    Identity(IdentityViolation),
}

impl fmt::Display for SetDefect {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SetDefect::BadFace { cell, i } => write!(f, "face {i} of {cell} is not a valid normal form"),
            SetDefect::Identity(v) => write!(
                f,
                "simplicial identity d_{} d_{} = d_{} d_{} fails on {}",
                v.i,
                v.j,
                v.j - 1,
                v.i,
                v.cell
            ),
        }
    }
}

/// A morphism of simplicial sets, given on non-degenerate source cells.
#[derive(Clone)]
pub struct SimplicialMap {
    pub source: Arc<SimplicialSet>,
    pub target: Arc<SimplicialSet>,
    pub assignment: Vec<Vec<Cell>>,
}

impl fmt::Debug for SimplicialMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "SimplicialMap({:?} -> {:?}, {:?})", self.source, self.target, self.assignment)
    }
}

impl PartialEq for SimplicialMap {
    fn eq(&self, other: &Self) -> bool {
        self.assignment == other.assignment
            && (Arc::ptr_eq(&self.source, &other.source) || self.source == other.source)
            && (Arc::ptr_eq(&self.target, &other.target) || self.target == other.target)
    }
}

/// Where a candidate morphism fails face compatibility.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MapDefect {
    pub cell: String,
    pub face: usize,
}

impl SimplicialMap {
    pub fn new_unchecked(source: Arc<SimplicialSet>, target: Arc<SimplicialSet>, assignment: Vec<Vec<Cell>>) -> Self {
        SimplicialMap { source, target, assignment }
    }

    /// Builds a map and checks dimensions and face compatibility.
    pub fn new(source: Arc<SimplicialSet>, target: Arc<SimplicialSet>, assignment: Vec<Vec<Cell>>) -> Result<Self> {
        let m = SimplicialMap { source, target, assignment };
        m.check_shape()?;
        if let Err(d) = m.check_faces() {
            return Err(Error::InvalidMorphism(format!("face {} of {} is not preserved", d.face, d.cell)));
        }
        Ok(m)
    }

    fn check_shape(&self) -> Result<()> {
        let s = &self.source;
        if self.assignment.len() != s.dim_bound() + 1 {
            return Err(Error::InvalidMorphism("assignment does not cover every dimension".into()));
        }
        if let Some(top) = s.top_dim() {
            if top > self.target.dim_bound() && !self.target.is_complete() {
                return Err(Error::Truncation("target truncated below the source's dimension".into()));
            }
        }
        for d in 0..=s.dim_bound() {
            if self.assignment[d].len() != s.count(d) {
                return Err(Error::InvalidMorphism(format!("dimension {d} has the wrong number of cells")));
            }
            for c in &self.assignment[d] {
                if c.dim() != d || !c.word.is_surjective() || c.base as usize >= self.target.count(c.base_dim()) {
                    return Err(Error::InvalidMorphism(format!("invalid image cell {c:?} in dimension {d}")));
                }
            }
        }
        Ok(())
    }

    /// Checks `f(d_i x) = d_i f(x)` on every non-degenerate source cell.
    pub fn check_faces(&self) -> std::result::Result<(), MapDefect> {
        for (d, idx) in self.source.nondeg_cells() {
            if d == 0 {
                continue;
            }
            let fx = self.assignment[d][idx as usize];
            for (i, f) in self.source.faces_of(d, idx).iter().enumerate() {
                if self.apply(f) != self.target.face(&fx, i).unwrap() {
                    return Err(MapDefect { cell: self.source.name(d, idx).to_string(), face: i });
                }
            }
        }
        Ok(())
    }

    pub fn identity(x: &Arc<SimplicialSet>) -> Self {
        let assignment = (0..=x.dim_bound())
            .map(|d| (0..x.count(d) as u32).map(|i| Cell::nondeg(d, i)).collect())
            .collect();
        SimplicialMap { source: x.clone(), target: x.clone(), assignment }
    }

    #[inline]
    pub fn apply(&self, c: &Cell) -> Cell {
        let img = &self.assignment[c.base_dim()][c.base as usize];
        if c.is_degenerate() {
            self.target.act(img, &c.word)
        } else {
            *img
        }
    }

    pub fn at(&self, dim: usize, idx: u32) -> Cell {
        self.assignment[dim][idx as usize]
    }

    /// `self ∘ other`.
    pub fn after(&self, other: &SimplicialMap) -> Result<SimplicialMap> {
        if !(Arc::ptr_eq(&other.target, &self.source) || *other.target == *self.source) {
            return Err(Error::SizeMismatch("maps are not composable".into()));
        }
        let assignment = other.assignment.iter().map(|row| row.iter().map(|c| self.apply(c)).collect()).collect();
        Ok(SimplicialMap { source: other.source.clone(), target: self.target.clone(), assignment })
    }

    /// Non-degenerate cells go to distinct non-degenerate cells.
    pub fn is_levelwise_injective(&self) -> bool {
        let mut seen = std::collections::HashSet::new();
        self.assignment.iter().flatten().all(|c| !c.is_degenerate() && seen.insert((c.base_dim(), c.base)))
    }

    /// Every non-degenerate target cell is hit by a non-degenerate source cell.
    pub fn is_surjective_on_nondeg(&self) -> bool {
        let mut hit: Vec<Vec<bool>> = (0..=self.target.dim_bound()).map(|d| vec![false; self.target.count(d)]).collect();
        for c in self.assignment.iter().flatten() {
            if !c.is_degenerate() {
                hit[c.base_dim()][c.base as usize] = true;
            }
        }
        hit.iter().flatten().all(|&h| h)
    }

    /// For a levelwise injection: which target cells lie in the image.
    pub fn image_mask(&self) -> Vec<Vec<bool>> {
        let mut hit: Vec<Vec<bool>> = (0..=self.target.dim_bound()).map(|d| vec![false; self.target.count(d)]).collect();
        for c in self.assignment.iter().flatten() {
            if !c.is_degenerate() && c.base_dim() <= self.target.dim_bound() {
                hit[c.base_dim()][c.base as usize] = true;
            }
        }
        hit
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn face_examples() {
        let d1 = Arc::new(simplex(1));
        let edge = Cell::nondeg(1, 0);
        // s_0 of the edge, then d_0.
        let s0 = d1.degenerate(&edge, 0).unwrap();
        assert_eq!(d1.face(&s0, 0).unwrap(), edge);
        let v0 = Cell::nondeg(0, 0);
        let sv = d1.degenerate(&v0, 0).unwrap();
        assert_eq!(d1.face(&sv, 1).unwrap(), v0);
        assert_eq!(d1.face(&edge, 0).unwrap(), *d1.faces_of(1, 0).first().unwrap());
        assert!(d1.face(&v0, 0).is_err());
    }

    #[test]
    fn degeneracy_examples() {
        let d0 = simplex(0);
        let v = Cell::nondeg(0, 0);
        let s = d0.degenerate(&v, 0).unwrap();
        assert_eq!(s.word, OrdinalMap::degeneracy_map(2, 0));
        let ss = d0.degenerate(&s, 1).unwrap();
        assert_eq!(ss.word.domain_size() - ss.word.codomain_size(), 2);
        let d2 = simplex(2);
        let top = Cell::nondeg(2, 0);
        for i in 0..=2 {
            let s = d2.degenerate(&top, i).unwrap();
            assert_eq!(d2.face(&s, i).unwrap(), top);
            assert_eq!(d2.face(&s, i + 1).unwrap(), top);
        }
    }

    #[test]
    fn identities_hold_for_generators() {
        for n in 0..5 {
            simplex(n).validate().unwrap();
            boundary(n).validate().unwrap();
            for k in 0..=n {
                horn(n, k).unwrap().validate().unwrap();
            }
        }
    }

    #[test]
    fn broken_identity_is_reported() {
        let mut b = SetBuilder::new(2, true);
        for v in ["a", "b", "c"] {
            b.add_cell(0, v, vec![]).unwrap();
        }
        let e = |t: u32, s: u32| vec![Cell::nondeg(0, t), Cell::nondeg(0, s)];
        b.add_cell(1, "ab", e(1, 0)).unwrap();
        b.add_cell(1, "ac", e(2, 0)).unwrap();
        b.add_cell(1, "bc", e(2, 1)).unwrap();
        // Faces listed in the wrong order.
        b.add_cell(2, "abc", vec![Cell::nondeg(1, 0), Cell::nondeg(1, 1), Cell::nondeg(1, 2)]).unwrap();
        let x = b.build();
        assert!(matches!(x.validate(), Err(SetDefect::Identity(_))));
    }

    #[test]
    fn normal_forms_are_idempotent() {
        let x = product(&Arc::new(simplex(1)), &Arc::new(simplex(2))).unwrap().set;
        for d in 0..=4 {
            for c in x.all_cells(d) {
                let again = x.act(&c, &OrdinalMap::identity(d + 1));
                assert_eq!(again, c);
            }
        }
    }
}
