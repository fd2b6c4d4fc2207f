//! `Ex X` truncated at a dimension, its unit and the adjunction with `Sd`.
//!
//! An `n`-cell of `Ex X` is a [`Datum`]: a map `Sd Δ[n] → X` listed on the
//! non-degenerate cells of `Sd Δ[n]`. Operators act by precomposition with `Sd` of
//! ordinal maps. A datum is `s_i`-degenerate iff it equals its restriction along
//! `Sd δ^i` pulled back along `Sd σ^i`, which is how normal forms are found.

use std::collections::HashMap;
use std::sync::Arc;

use super::kpos::{max_element, sd_degeneracy, sd_face, JoinMap};
use super::sd::{evaluate, precompose, pullback_table, Datum, SdSimplex, Subdivision};
use crate::delta::{compose, OrdinalMap};
use crate::error::{Error, Result};
use crate::sset::{for_each_map, BoundaryIndex, Cell, SearchControl, SetBuilder, SimplicialMap, SimplicialSet};

/// `Some(d_i-restriction)` when the datum is `s_i` of it.
pub fn degenerate_along(x: &SimplicialSet, n: usize, datum: &[Cell], i: usize) -> Option<Datum> {
    let y = precompose(x, datum, &sd_face(n, i));
    (precompose(x, &y, &sd_degeneracy(n - 1, i)) == datum).then_some(y)
}

pub fn datum_is_degenerate(x: &SimplicialSet, n: usize, datum: &[Cell]) -> bool {
    (0..n).any(|i| degenerate_along(x, n, datum, i).is_some())
}

/// Splits a datum as `word^* base` with `base` non-degenerate; returns the word and
/// the base datum.
pub fn split_degeneracies(x: &SimplicialSet, n: usize, datum: &[Cell]) -> (OrdinalMap, Datum) {
    let mut word = OrdinalMap::identity(n + 1);
    let mut cur = datum.to_vec();
    let mut dim = n;
    'outer: loop {
        for i in 0..dim {
            if let Some(y) = degenerate_along(x, dim, &cur, i) {
                word = compose(&OrdinalMap::degeneracy_map(dim + 1, i), &word).expect("degeneracy after word");
                cur = y;
                dim -= 1;
                continue 'outer;
            }
        }
        return (word, cur);
    }
}

/// Whether `datum ∘ j^k = datum`.
pub fn in_filtration(x: &SimplicialSet, n: usize, datum: &[Cell], k: isize) -> bool {
    precompose(x, datum, &JoinMap::projection(n, k)) == datum
}

/// Least `k` with `datum ∘ j^k = datum`; `j^n` is the identity so this is at most `n`.
pub fn filtration_level(x: &SimplicialSet, n: usize, datum: &[Cell]) -> usize {
    (0..=n).find(|&k| in_filtration(x, n, datum, k as isize)).unwrap_or(n)
}

/// The datum `x ∘ max` of an `n`-cell of `X`.
pub fn unit_datum(x: &SimplicialSet, c: &Cell) -> Datum {
    let n = c.dim();
    let sd = SdSimplex::get(n);
    (0..sd.len())
        .map(|f| {
            let v: Vec<usize> = sd.chain(f).iter().map(|&s| max_element(s)).collect();
            x.act(c, &OrdinalMap::new(v.len(), n + 1, &v).expect("maxima increase"))
        })
        .collect()
}

/// The nerve map `Sd Δ[m] → Sd Δ[n]` of a join-preserving map.
pub fn nerve_map(phi: &JoinMap) -> SimplicialMap {
    let (src, tgt) = (SdSimplex::get(phi.source_n), SdSimplex::get(phi.target_n));
    let table = pullback_table(phi);
    let asg = (0..=phi.source_n)
        .map(|d| {
            src.range(d)
                .map(|c| {
                    let (w, b) = table[c];
                    Cell { word: w, base: tgt.unflat(b).1 }
                })
                .collect()
        })
        .collect();
    SimplicialMap::new_unchecked(src.set().clone(), tgt.set().clone(), asg)
}

/// `Ex X` up to dimension `trunc`, or a finitely generated sub-object of it.
#[derive(Clone, Debug)]
pub struct ExObject {
    pub base: Arc<SimplicialSet>,
    pub set: Arc<SimplicialSet>,
    pub trunc: usize,
    data: Vec<Vec<Datum>>,
    index: Vec<HashMap<Datum, u32>>,
}

/// Every map `Sd Δ[n] → X`.
pub fn enumerate_data(x: &Arc<SimplicialSet>, n: usize) -> Result<Vec<Datum>> {
    let sd = SdSimplex::get(n);
    let index = BoundaryIndex::new(x, n)?;
    let mut out = Vec::new();
    for_each_map(sd.set(), &index, &[], |_, _, _| true, |asg| {
        out.push(asg.iter().flatten().copied().collect());
        SearchControl::Continue
    })?;
    Ok(out)
}

impl ExObject {
    /// All of `Ex X` up to dimension `trunc`.
    pub fn new(x: &Arc<SimplicialSet>, trunc: usize) -> Result<ExObject> {
        if trunc > x.dim_bound() && !x.is_complete() {
            return Err(Error::Truncation(format!("X is known up to {} but Ex needs {trunc}", x.dim_bound())));
        }
        let mut data = Vec::with_capacity(trunc + 1);
        for n in 0..=trunc {
            let all = enumerate_data(x, n)?;
            data.push(all.into_iter().filter(|d| !datum_is_degenerate(x, n, d)).collect());
        }
        ExObject::assemble(x, trunc, data, false)
    }

    /// The sub-object of `Ex X` generated by the given cells (faces closed, nothing
    /// above the seeds).
    pub fn generated(x: &Arc<SimplicialSet>, seeds: &[(usize, Datum)]) -> Result<ExObject> {
        let trunc = seeds.iter().map(|s| s.0).max().unwrap_or(0);
        let mut found: Vec<std::collections::BTreeSet<Datum>> = vec![Default::default(); trunc + 1];
        for (n, d) in seeds {
            let (w, base) = split_degeneracies(x, *n, d);
            found[w.target_dim()].insert(base);
        }
        for n in (1..=trunc).rev() {
            let here: Vec<Datum> = found[n].iter().cloned().collect();
            for d in here {
                for i in 0..=n {
                    let f = precompose(x, &d, &sd_face(n, i));
                    let (w, base) = split_degeneracies(x, n - 1, &f);
                    found[w.target_dim()].insert(base);
                }
            }
        }
        let data = found.into_iter().map(|s| s.into_iter().collect()).collect();
        ExObject::assemble(x, trunc, data, true)
    }

    fn assemble(x: &Arc<SimplicialSet>, trunc: usize, data: Vec<Vec<Datum>>, complete: bool) -> Result<ExObject> {
        let mut obj = ExObject {
            base: x.clone(),
            set: Arc::new(SimplicialSet::empty(0)),
            trunc,
            data: Vec::new(),
            index: Vec::new(),
        };
        let mut b = SetBuilder::new(trunc, complete);
        let mut used: HashMap<String, usize> = HashMap::new();
        for (n, row) in data.into_iter().enumerate() {
            let mut idx_map = HashMap::with_capacity(row.len());
            for d in &row {
                let faces = if n == 0 {
                    Vec::new()
                } else {
                    (0..=n).map(|i| obj.cell_of(n - 1, &precompose(x, d, &sd_face(n, i)))).collect::<Result<Vec<_>>>()?
                };
                let mut name = obj.datum_name(n, d);
                let seen = used.entry(name.clone()).or_insert(0);
                *seen += 1;
                if *seen > 1 {
                    name = format!("{name}#{seen}");
                }
                let i = b.add_cell(n, name, faces)?;
                idx_map.insert(d.clone(), i);
            }
            obj.data.push(row);
            obj.index.push(idx_map);
        }
        obj.set = Arc::new(b.build());
        Ok(obj)
    }

    fn datum_name(&self, n: usize, d: &[Cell]) -> String {
        if n == 0 {
            return self.base.describe(&d[0]);
        }
        let sd = SdSimplex::get(n);
        let vs: Vec<String> = sd.range(0).map(|v| self.base.describe(&d[v])).collect();
        format!("[{}]", vs.join(","))
    }

    /// Datum of a non-degenerate cell.
    pub fn datum(&self, dim: usize, idx: u32) -> &Datum {
        &self.data[dim][idx as usize]
    }

    /// Datum of any cell.
    pub fn datum_of(&self, c: &Cell) -> Datum {
        let base = self.datum(c.base_dim(), c.base);
        if c.is_degenerate() {
            precompose(&self.base, base, &JoinMap::direct_image(&c.word))
        } else {
            base.clone()
        }
    }

    /// The cell carrying an `n`-dimensional datum.
    pub fn cell_of(&self, n: usize, datum: &[Cell]) -> Result<Cell> {
        let (word, base) = split_degeneracies(&self.base, n, datum);
        let p = word.target_dim();
        match self.index.get(p).and_then(|m| m.get(&base)) {
            Some(&i) => Ok(Cell { word, base: i }),
            None => Err(Error::Precondition(format!("datum of dimension {p} is not a cell of this object"))),
        }
    }

    pub fn contains(&self, n: usize, datum: &[Cell]) -> bool {
        self.cell_of(n, datum).is_ok()
    }

    /// The unit `X → Ex X`, on the cells of `X` up to the truncation.
    pub fn unit(&self) -> Result<SimplicialMap> {
        let src = if self.base.dim_bound() > self.trunc {
            Arc::new(self.base.with_dim_bound(self.trunc)?)
        } else {
            self.base.clone()
        };
        let mut asg = Vec::new();
        for d in 0..=src.dim_bound() {
            let mut row = Vec::new();
            for i in 0..src.count(d) as u32 {
                row.push(self.cell_of(d, &unit_datum(&self.base, &Cell::nondeg(d, i)))?);
            }
            asg.push(row);
        }
        Ok(SimplicialMap::new_unchecked(src, self.set.clone(), asg))
    }

    /// `Ex f: Ex X → Ex Y` for `f: X → Y`.
    pub fn map(&self, f: &SimplicialMap, target: &ExObject) -> Result<SimplicialMap> {
        if *f.source != *self.base || *f.target != *target.base {
            return Err(Error::SizeMismatch("map does not match the Ex objects".into()));
        }
        let mut asg = Vec::new();
        for (n, row) in self.data.iter().enumerate() {
            let mut out = Vec::with_capacity(row.len());
            for d in row {
                let img: Datum = d.iter().map(|c| f.apply(c)).collect();
                out.push(target.cell_of(n, &img)?);
            }
            asg.push(out);
        }
        Ok(SimplicialMap::new_unchecked(self.set.clone(), target.set.clone(), asg))
    }

    /// Transpose of `g: Sd A → X` to `A → Ex X`.
    pub fn transpose_in(&self, g: &SimplicialMap, sd_a: &Subdivision) -> Result<SimplicialMap> {
        let a = &sd_a.source;
        if a.top_dim().unwrap_or(0) > self.trunc {
            return Err(Error::Truncation("source exceeds the truncation of Ex".into()));
        }
        let mut asg = Vec::new();
        for d in 0..=a.dim_bound() {
            let sd = SdSimplex::get(d);
            let mut row = Vec::new();
            for i in 0..a.count(d) as u32 {
                let datum: Datum =
                    (0..sd.len()).map(|c| g.apply(&sd_a.cell_at(&Cell::nondeg(d, i), sd.chain(c)))).collect();
                row.push(self.cell_of(d, &datum)?);
            }
            asg.push(row);
        }
        Ok(SimplicialMap::new_unchecked(a.clone(), self.set.clone(), asg))
    }

    /// Transpose of `h: A → Ex X` to `Sd A → X`.
    pub fn transpose_out(&self, h: &SimplicialMap, sd_a: &Subdivision) -> SimplicialMap {
        let s = &sd_a.set;
        let asg = (0..=s.dim_bound())
            .map(|d| {
                (0..s.count(d) as u32)
                    .map(|i| {
                        let (p, x, chain) = sd_a.parts(d, i);
                        let datum = self.datum_of(&h.at(p, x));
                        evaluate(&self.base, p, &datum, chain)
                    })
                    .collect()
            })
            .collect();
        SimplicialMap::new_unchecked(s.clone(), self.base.clone(), asg)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::degen::{factors_through, poset_retraction_quotient};
    use crate::ex::kpos::kpos_category;
    use crate::ex::sd::{datum_of_map, map_of_datum, max_map, sd};
    use crate::sset::{boundary, hom_set, horn, simplex};

    #[test]
    fn ex_of_an_interval() {
        let d1 = Arc::new(simplex(1));
        let ex = ExObject::new(&d1, 2).unwrap();
        assert_eq!(ex.set.all_cells(1).len(), 5);
        assert_eq!(ex.set.count(1), 3);
        assert_eq!(ex.set.count(0), 2);
        ex.set.validate().unwrap();
        let unit = ex.unit().unwrap();
        unit.check_faces().unwrap();
        assert!(unit.is_levelwise_injective());
    }

    #[test]
    fn ex_of_a_point_is_a_point() {
        let pt = Arc::new(simplex(0));
        for t in 0..=3 {
            let ex = ExObject::new(&pt, t).unwrap();
            assert_eq!(ex.set.nondeg_counts(), vec![1]);
        }
    }

    #[test]
    fn truncated_input_is_rejected() {
        let x = Arc::new(simplex(0).with_dim_bound(1).unwrap());
        let cut = Arc::new(SetBuilder::new(1, false).build());
        assert!(ExObject::new(&cut, 2).is_err());
        assert!(ExObject::new(&x, 3).is_ok());
    }

    #[test]
    fn adjunction_on_the_interval() {
        let d1 = Arc::new(simplex(1));
        let ex = ExObject::new(&d1, 1).unwrap();
        let sd1 = sd(&d1).unwrap();
        let left = hom_set(&sd1.set, &d1).unwrap();
        let right = hom_set(&d1, &ex.set).unwrap();
        assert_eq!(left.len(), 5);
        assert_eq!(right.len(), 5);
        for g in &left {
            let h = ex.transpose_in(g, &sd1).unwrap();
            assert!(right.contains(&h));
            assert_eq!(ex.transpose_out(&h, &sd1), *g);
        }
        // The unit is the transpose of the last-vertex map.
        assert_eq!(ex.transpose_in(&sd1.last_vertex(), &sd1).unwrap().assignment, ex.unit().unwrap().assignment);
    }

    #[test]
    fn degeneracy_routes_agree() {
        let x = Arc::new(boundary(2));
        for n in 1..=2 {
            let sdn = SdSimplex::get(n);
            let collapse: Vec<SimplicialMap> =
                (0..n).map(|i| nerve_map(&JoinMap::direct_image(&OrdinalMap::degeneracy_map(n + 1, i)))).collect();
            let max = max_map(n);
            let retractions: Vec<_> = (0..=n)
                .map(|k| {
                    let j = JoinMap::projection(n, k as isize);
                    let pi: Vec<usize> = j.table().iter().map(|&s| s as usize - 1).collect();
                    poset_retraction_quotient(&kpos_category(n), &pi, n).unwrap()
                })
                .collect();
            for d in enumerate_data(&x, n).unwrap() {
                let f = map_of_datum(&x, n, &d);
                assert_eq!(datum_of_map(&f), d);
                for (i, p) in collapse.iter().enumerate() {
                    let by_section = degenerate_along(&x, n, &d, i).is_some();
                    assert_eq!(factors_through(p, &f).unwrap().is_some(), by_section);
                }
                let by_max = factors_through(&max, &f).unwrap().is_some();
                assert_eq!(by_max, in_filtration(&x, n, &d, 0));
                for (k, rq) in retractions.iter().enumerate() {
                    assert_eq!(rq.source.set.nondeg_counts(), sdn.set().nondeg_counts());
                    let via_quotient = factors_through(&rq.map, &f).unwrap().is_some();
                    assert_eq!(via_quotient, in_filtration(&x, n, &d, k as isize));
                }
            }
        }
    }

    #[test]
    fn horn_ex_is_valid() {
        let h = Arc::new(horn(2, 1).unwrap());
        let ex = ExObject::new(&h, 2).unwrap();
        ex.set.validate().unwrap();
        let g = ExObject::generated(&h, &[(2, ex.datum(2, 0).clone())]).unwrap();
        g.set.validate().unwrap();
        assert!(g.set.is_complete());
        assert!(g.set.count(2) == 1);
    }
}
