//! Barycentric subdivision.
//!
//! `Sd Δ[n]` is the nerve of `K[n]`. For a general `X` the non-degenerate
//! `d`-cells of `Sd X` are pairs `(x, S_0 ⊊ … ⊊ S_d = [p])` with `x` a
//! non-degenerate `p`-cell: attaching `Sd Δ[p]` along `Sd ∂Δ[p]` adds exactly the
//! chains that reach the top element. Faces that drop the top land in the
//! subdivision of a face of `x` and are normalised there.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use serde::{Deserialize, Serialize};

use super::kpos::{elements_of, initial_segment, kpos_category, max_element, subset_name, JoinMap, Subset};
use crate::delta::{compose, injection_with_image, OrdinalMap};
use crate::error::{Error, Result};
use crate::sset::{
    free_simplicial, is_isomorphism, simplex, slice_category_with_operators, Cell, Nerve, SemiSimplicialSet, SetBuilder,
    SimplicialMap, SimplicialSet,
};

/// `Sd Δ[n]` with its chains and a flat, dimension-major numbering of its
/// non-degenerate cells.
pub struct SdSimplex {
    pub n: usize,
    pub nerve: Nerve,
    chains: Vec<Vec<Subset>>,
    offsets: Vec<usize>,
}

static SD_SIMPLICES: OnceLock<Mutex<HashMap<usize, Arc<SdSimplex>>>> = OnceLock::new();
static PULLBACK_TABLES: OnceLock<Mutex<HashMap<JoinMap, Arc<Vec<(OrdinalMap, usize)>>>>> = OnceLock::new();

impl SdSimplex {
    /// Shared instance for `n`.
    pub fn get(n: usize) -> Arc<SdSimplex> {
        let cache = SD_SIMPLICES.get_or_init(Default::default);
        if let Some(s) = cache.lock().expect("cache lock").get(&n) {
            return s.clone();
        }
        let built = Arc::new(SdSimplex::build(n));
        cache.lock().expect("cache lock").entry(n).or_insert(built).clone()
    }

    fn build(n: usize) -> SdSimplex {
        let nerve = Nerve::new(kpos_category(n), n).expect("K[n] is a poset");
        let mut chains = Vec::new();
        let mut offsets = Vec::new();
        for d in 0..=n {
            offsets.push(chains.len());
            for i in 0..nerve.set.count(d) as u32 {
                chains.push(nerve.chain_of(d, i).into_iter().map(|e| (e + 1) as Subset).collect());
            }
        }
        offsets.push(chains.len());
        SdSimplex { n, nerve, chains, offsets }
    }

    pub fn set(&self) -> &Arc<SimplicialSet> {
        &self.nerve.set
    }

    /// Number of non-degenerate cells.
    pub fn len(&self) -> usize {
        self.chains.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn flat(&self, d: usize, idx: u32) -> usize {
        self.offsets[d] + idx as usize
    }

    pub fn unflat(&self, flat: usize) -> (usize, u32) {
        let d = self.chains[flat].len() - 1;
        (d, (flat - self.offsets[d]) as u32)
    }

    pub fn chain(&self, flat: usize) -> &[Subset] {
        &self.chains[flat]
    }

    /// Flat indices of the non-degenerate cells of dimension `d`.
    pub fn range(&self, d: usize) -> std::ops::Range<usize> {
        self.offsets[d]..self.offsets[d + 1]
    }

    /// Normal form of a weakly increasing chain: the degeneracy word and the flat
    /// index of the underlying strict chain.
    pub fn locate(&self, chain: &[Subset]) -> (OrdinalMap, usize) {
        let elems: Vec<usize> = chain.iter().map(|&s| s as usize - 1).collect();
        let c = self.nerve.cell_of_chain(&elems);
        (c.word, self.flat(c.base_dim(), c.base))
    }

    /// The flat index of the chain `{0} ⊂ {0,1} ⊂ … ⊂ [n]`.
    pub fn initial_chain(&self) -> usize {
        let ch: Vec<Subset> = (0..=self.n).map(initial_segment).collect();
        self.locate(&ch).1
    }
}

/// For `φ: K[m] → K[n]`, where each non-degenerate cell of `Sd Δ[m]` goes under `N φ`.
pub fn pullback_table(phi: &JoinMap) -> Arc<Vec<(OrdinalMap, usize)>> {
    let cache = PULLBACK_TABLES.get_or_init(Default::default);
    if let Some(t) = cache.lock().expect("cache lock").get(phi) {
        return t.clone();
    }
    let (src, tgt) = (SdSimplex::get(phi.source_n), SdSimplex::get(phi.target_n));
    let table: Vec<(OrdinalMap, usize)> = (0..src.len())
        .map(|c| {
            let image: Vec<Subset> = src.chain(c).iter().map(|&s| phi.apply(s)).collect();
            tgt.locate(&image)
        })
        .collect();
    let table = Arc::new(table);
    cache.lock().expect("cache lock").entry(phi.clone()).or_insert(table).clone()
}

/// A map `Sd Δ[n] → X` listed on the flat cells of `Sd Δ[n]`.
pub type Datum = Vec<Cell>;

/// `datum ∘ N φ`.
pub fn precompose(x: &SimplicialSet, datum: &[Cell], phi: &JoinMap) -> Datum {
    pullback_table(phi)
        .iter()
        .map(|(w, b)| if w.is_identity() { datum[*b] } else { x.act(&datum[*b], w) })
        .collect()
}

/// Value of a datum on an arbitrary weakly increasing chain.
pub fn evaluate(x: &SimplicialSet, n: usize, datum: &[Cell], chain: &[Subset]) -> Cell {
    let (w, b) = SdSimplex::get(n).locate(chain);
    if w.is_identity() {
        datum[b]
    } else {
        x.act(&datum[b], &w)
    }
}

/// The datum of a map `Sd Δ[n] → X`.
pub fn datum_of_map(f: &SimplicialMap) -> Datum {
    f.assignment.iter().flatten().copied().collect()
}

/// The map `Sd Δ[n] → X` of a datum.
pub fn map_of_datum(x: &Arc<SimplicialSet>, n: usize, datum: &[Cell]) -> SimplicialMap {
    let sd = SdSimplex::get(n);
    let asg = (0..=n).map(|d| sd.range(d).map(|c| datum[c]).collect()).collect();
    SimplicialMap::new_unchecked(sd.set().clone(), x.clone(), asg)
}

/// `Sd Δ[n]` as a simplicial set.
pub fn sd_simplex(n: usize) -> Arc<SimplicialSet> {
    SdSimplex::get(n).set().clone()
}

/// Direct image of a subset along a monotone map.
pub fn image_of(f: &OrdinalMap, s: Subset) -> Subset {
    elements_of(s).into_iter().fold(0, |acc, i| acc | 1 << f.at(i))
}

fn maxes_map(chain: &[Subset], target_size: usize) -> OrdinalMap {
    let v: Vec<usize> = chain.iter().map(|&s| max_element(s)).collect();
    OrdinalMap::new(v.len(), target_size, &v).expect("maxima of a chain increase")
}

/// Strict chains `S_0 ⊊ … ⊊ S_d = [p]`, bottom first.
fn chains_to_top(p: usize, d: usize) -> Vec<Vec<Subset>> {
    fn extend(left: usize, acc: &mut Vec<Subset>, out: &mut Vec<Vec<Subset>>) {
        if left == 0 {
            out.push(acc.iter().rev().copied().collect());
            return;
        }
        let cur = *acc.last().unwrap();
        for s in 1..cur {
            if s & !cur == 0 {
                acc.push(s);
                extend(left - 1, acc, out);
                acc.pop();
            }
        }
    }
    let top = initial_segment(p);
    let mut out = Vec::new();
    extend(d, &mut vec![top], &mut out);
    out.sort();
    out
}

/// `Sd X` for a complete `X`, with the data needed for `Sd` of maps and for the
/// last-vertex map.
pub struct Subdivision {
    pub source: Arc<SimplicialSet>,
    pub set: Arc<SimplicialSet>,
    cells: Vec<Vec<(usize, u32, Vec<Subset>)>>,
    index: HashMap<(usize, u32, Vec<Subset>), u32>,
}

impl Subdivision {
    /// The cell `(x, chain)` in normal form, for any cell `x` of the source and
    /// any weakly increasing chain in `K[dim x]`.
    pub fn cell_at(&self, x: &Cell, chain: &[Subset]) -> Cell {
        let p = x.base_dim();
        let moved: Vec<Subset> = chain.iter().map(|&s| image_of(&x.word, s)).collect();
        let top = *moved.last().expect("non-empty chain");
        let elems = elements_of(top);
        let inj = injection_with_image(&elems, p + 1).expect("subset of [p]");
        let r = self.source.act(&Cell::nondeg(p, x.base), &inj);
        let mut strict: Vec<Subset> = Vec::new();
        let mut word = Vec::with_capacity(moved.len());
        for &s in &moved {
            let mut rel: Subset = 0;
            for (pos, &e) in elems.iter().enumerate() {
                if s >> e & 1 == 1 {
                    rel |= 1 << r.word.at(pos);
                }
            }
            if strict.last() != Some(&rel) {
                strict.push(rel);
            }
            word.push(strict.len() - 1);
        }
        let w = OrdinalMap::new(word.len(), strict.len(), &word).expect("compression word");
        let base = self.index[&(r.base_dim(), r.base, strict)];
        Cell { word: w, base }
    }

    /// `(x, chain)` of a non-degenerate cell.
    pub fn parts(&self, d: usize, idx: u32) -> (usize, u32, &[Subset]) {
        let (p, x, ch) = &self.cells[d][idx as usize];
        (*p, *x, ch)
    }

    /// The last-vertex map `Sd X → X`.
    pub fn last_vertex(&self) -> SimplicialMap {
        let asg = self
            .cells
            .iter()
            .map(|row| {
                row.iter()
                    .map(|(p, x, ch)| self.source.act(&Cell::nondeg(*p, *x), &maxes_map(ch, p + 1)))
                    .collect()
            })
            .collect();
        SimplicialMap::new_unchecked(self.set.clone(), self.source.clone(), asg)
    }

    /// `Sd f: Sd X → Sd Y`, where `self` subdivides `X` and `target` subdivides `Y`.
    pub fn map(&self, f: &SimplicialMap, target: &Subdivision) -> Result<SimplicialMap> {
        if *f.source != *self.source || *f.target != *target.source {
            return Err(Error::SizeMismatch("map does not match the subdivisions".into()));
        }
        let asg = self
            .cells
            .iter()
            .map(|row| row.iter().map(|(p, x, ch)| target.cell_at(&f.at(*p, *x), ch)).collect())
            .collect();
        Ok(SimplicialMap::new_unchecked(self.set.clone(), target.set.clone(), asg))
    }
}

/// Barycentric subdivision of a complete simplicial set.
pub fn sd(x: &Arc<SimplicialSet>) -> Result<Subdivision> {
    if !x.is_complete() {
        return Err(Error::Truncation("subdivision needs every non-degenerate cell".into()));
    }
    let top = x.top_dim().unwrap_or(0);
    let mut sub = Subdivision {
        source: x.clone(),
        set: Arc::new(SimplicialSet::empty(0)),
        cells: vec![Vec::new(); top + 1],
        index: HashMap::new(),
    };
    let mut b = SetBuilder::new(top, true);
    for d in 0..=top {
        for p in d..=top {
            let chains = chains_to_top(p, d);
            for xi in 0..x.count(p) as u32 {
                let xc = Cell::nondeg(p, xi);
                for ch in &chains {
                    let faces = if d == 0 {
                        Vec::new()
                    } else {
                        (0..=d)
                            .map(|i| {
                                let mut f = ch.clone();
                                f.remove(i);
                                sub.cell_at(&xc, &f)
                            })
                            .collect()
                    };
                    let names: Vec<String> = ch.iter().map(|&s| subset_name(s, p)).collect();
                    let name = format!("{}/{}", x.name(p, xi), names.join("<"));
                    let idx = b.add_cell(d, name, faces)?;
                    sub.index.insert((p, xi, ch.clone()), idx);
                    sub.cells[d].push((p, xi, ch.clone()));
                }
            }
        }
    }
    sub.set = Arc::new(b.build());
    Ok(sub)
}

/// `max: Sd Δ[n] → Δ[n]`, a subset going to its largest element.
pub fn max_map(n: usize) -> SimplicialMap {
    let sd = SdSimplex::get(n);
    let target = Arc::new(simplex(n));
    let top = Cell::nondeg(n, 0);
    let asg = (0..=n).map(|d| sd.range(d).map(|c| target.act(&top, &maxes_map(sd.chain(c), n + 1))).collect()).collect();
    SimplicialMap::new_unchecked(sd.set().clone(), target, asg)
}

/// Outcome of comparing `N(Δ₊/X)` with `Sd` of the free simplicial set on `X`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SemiSimplicialReport {
    pub nerve_counts: Vec<usize>,
    pub sd_counts: Vec<usize>,
    pub isomorphic: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub failure: Option<String>,
}

/// Builds the comparison map `N(Δ₊/X) → Sd(free X)`: a string `x_0 → … → x_d` goes
/// to `x_d` with the chain of images of the composite face operators.
pub fn sd_semisimplicial_check(x: &SemiSimplicialSet) -> Result<SemiSimplicialReport> {
    Ok(sd_semisimplicial_comparison(x)?.0)
}

/// The report together with the comparison map, when it is a simplicial map.
pub fn sd_semisimplicial_comparison(x: &SemiSimplicialSet) -> Result<(SemiSimplicialReport, Option<SimplicialMap>)> {
    x.validate()?;
    let (cat, thetas) = slice_category_with_operators(x);
    let nerve = Nerve::new(cat, x.dim_bound)?;
    let free = Arc::new(free_simplicial(x)?);
    let sub = sd(&free)?;
    let mut obj = Vec::new();
    for d in 0..=x.dim_bound {
        for i in 0..x.count(d) as u32 {
            obj.push((d, i));
        }
    }
    let image_set = |f: &OrdinalMap| f.values().iter().fold(0 as Subset, |a, &v| a | 1 << v);
    let mut asg: Vec<Vec<Cell>> = Vec::new();
    for d in 0..=nerve.set.dim_bound() {
        let mut row = Vec::new();
        for idx in 0..nerve.set.count(d) as u32 {
            let cell = if d == 0 {
                let (p, i) = obj[idx as usize];
                sub.cell_at(&Cell::nondeg(p, i), &[initial_segment(p)])
            } else {
                let ms = nerve.string_of(d, idx);
                let (q, last) = obj[nerve.category.morphisms[*ms.last().unwrap()].target];
                let mut cur = OrdinalMap::identity(q + 1);
                let mut chain = vec![0 as Subset; d + 1];
                for j in (0..d).rev() {
                    chain[j + 1] = image_set(&cur);
                    cur = compose(&cur, &thetas[ms[j]])?;
                }
                chain[0] = image_set(&cur);
                sub.cell_at(&Cell::nondeg(q, last), &chain)
            };
            row.push(cell);
        }
        asg.push(row);
    }
    let nerve_counts = nerve.set.nondeg_counts();
    let sd_counts = sub.set.nondeg_counts();
    let (isomorphic, failure, map) = match SimplicialMap::new(nerve.set.clone(), sub.set.clone(), asg) {
        Ok(m) if is_isomorphism(&m) => (true, None, Some(m)),
        Ok(m) => (false, Some("comparison map is not bijective on non-degenerate cells".to_string()), Some(m)),
        Err(e) => (false, Some(e.to_string()), None),
    };
    Ok((SemiSimplicialReport { nerve_counts, sd_counts, isomorphic, failure }, map))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sset::{boundary, horn, inclusion_by_name};

    fn chain_count(n: usize, d: usize) -> usize {
        // Strict chains of length d+1 among non-empty subsets of an (n+1)-set.
        let len = (1usize << (n + 1)) - 1;
        let mut count = 0;
        fn go(last: Subset, left: usize, len: usize, count: &mut usize) {
            if left == 0 {
                *count += 1;
                return;
            }
            for s in 1..=len as Subset {
                if s != last && last & !s == 0 {
                    go(s, left - 1, len, count);
                }
            }
        }
        for s in 1..=len as Subset {
            go(s, d, len, &mut count);
        }
        count
    }

    #[test]
    fn simplex_counts_match_chains() {
        assert_eq!(sd_simplex(0).nondeg_counts(), vec![1]);
        assert_eq!(sd_simplex(1).nondeg_counts(), vec![3, 2]);
        assert_eq!(sd_simplex(2).nondeg_counts(), vec![7, 12, 6]);
        for n in 0..=4 {
            let want: Vec<usize> = (0..=n).map(|d| chain_count(n, d)).collect();
            assert_eq!(sd_simplex(n).nondeg_counts(), want);
        }
    }

    #[test]
    fn subdivided_generators() {
        let b = sd(&Arc::new(boundary(2))).unwrap();
        assert_eq!(b.set.nondeg_counts(), vec![6, 6]);
        let h = sd(&Arc::new(horn(2, 1).unwrap())).unwrap();
        assert_eq!(h.set.nondeg_counts(), vec![5, 4]);
        for n in 0..=3 {
            let s = sd(&Arc::new(simplex(n))).unwrap();
            s.set.validate().unwrap();
            assert_eq!(s.set.nondeg_counts(), sd_simplex(n).nondeg_counts());
        }
    }

    #[test]
    fn last_vertex_and_max_agree_on_simplices() {
        for n in 0..=2 {
            let s = sd(&Arc::new(simplex(n))).unwrap();
            let lv = s.last_vertex();
            lv.check_faces().unwrap();
            // Compare through the explicit identification with Sd Δ[n].
            let sdn = SdSimplex::get(n);
            let max = max_map(n);
            for d in 0..=n {
                for i in 0..s.set.count(d) as u32 {
                    let (p, x, ch) = s.parts(d, i);
                    let verts = elements_of(subset_of_name(s.source.name(p, x)));
                    let full: Vec<Subset> =
                        ch.iter().map(|&c| elements_of(c).into_iter().fold(0, |a, e| a | 1 << verts[e])).collect();
                    let (w, flat) = sdn.locate(&full);
                    assert!(w.is_identity());
                    let (fd, fi) = sdn.unflat(flat);
                    assert_eq!(lv.at(d, i), max.at(fd, fi));
                }
            }
        }
    }

    fn subset_of_name(name: &str) -> Subset {
        name.bytes().fold(0, |a, b| a | 1 << (b - b'0'))
    }

    #[test]
    fn max_map_values() {
        let m = max_map(2);
        let sd2 = SdSimplex::get(2);
        let (_, v02) = sd2.locate(&[0b101]);
        assert_eq!(m.at(0, v02 as u32), Cell::nondeg(0, 2));
        m.check_faces().unwrap();
    }

    #[test]
    fn sd_of_maps_is_functorial_and_injective() {
        let hx = Arc::new(horn(2, 0).unwrap());
        let dx = Arc::new(simplex(2));
        let inc = inclusion_by_name(&hx, &dx).unwrap();
        let (sh, sdx) = (sd(&hx).unwrap(), sd(&dx).unwrap());
        let m = sh.map(&inc, &sdx).unwrap();
        m.check_faces().unwrap();
        assert!(m.is_levelwise_injective());
        // Naturality of the last-vertex map.
        let lhs = inc.after(&sh.last_vertex()).unwrap();
        let rhs = sdx.last_vertex().after(&m).unwrap();
        assert_eq!(lhs.assignment, rhs.assignment);
    }

    #[test]
    fn slice_nerve_matches_subdivision() {
        for n in 0..=3 {
            let r = sd_semisimplicial_check(&SemiSimplicialSet::simplex(n)).unwrap();
            assert!(r.isomorphic, "{r:?}");
        }
        let b = SemiSimplicialSet::from_nondegenerate(&boundary(2)).unwrap();
        let r = sd_semisimplicial_check(&b).unwrap();
        assert!(r.isomorphic);
        assert_eq!(r.sd_counts, vec![6, 6]);
    }

    #[test]
    fn pullback_along_identity() {
        let sd2 = SdSimplex::get(2);
        let x = simplex(2);
        let datum: Datum = datum_of_map(&max_map(2));
        assert_eq!(precompose(&x, &datum, &JoinMap::identity(2)), datum);
        assert_eq!(sd2.len(), 25);
    }
}
