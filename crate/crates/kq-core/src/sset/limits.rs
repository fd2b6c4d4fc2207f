use std::collections::HashMap;
use std::sync::Arc;

use super::{Cell, SetBuilder, SimplicialMap, SimplicialSet};
use crate::delta::{surjections, OrdinalMap};
use crate::error::{Error, Result};

type PairKey = (u32, OrdinalMap, u32, OrdinalMap);

/// A product `X × Y` with its projections.
#[derive(Clone, Debug)]
pub struct Product {
    pub set: Arc<SimplicialSet>,
    pub proj1: SimplicialMap,
    pub proj2: SimplicialMap,
    index: HashMap<PairKey, u32>,
}

/// A fibre product `X ×_Z Y` with its projections.
#[derive(Clone, Debug)]
pub struct Pullback {
    pub set: Arc<SimplicialSet>,
    pub proj1: SimplicialMap,
    pub proj2: SimplicialMap,
    index: HashMap<PairKey, u32>,
}

/// Splits a pair of cells of equal dimension into the common degeneracy and the
/// jointly non-degenerate pair `(a', b')`.
pub(crate) fn normalize_pair(a: &Cell, b: &Cell) -> (OrdinalMap, Cell, Cell) {
    let d = a.dim();
    let (wa, wb) = (a.word.values(), b.word.values());
    let mut e = vec![0usize; d + 1];
    let mut va = vec![wa[0] as usize];
    let mut vb = vec![wb[0] as usize];
    for i in 1..=d {
        if wa[i] == wa[i - 1] && wb[i] == wb[i - 1] {
            e[i] = e[i - 1];
        } else {
            e[i] = e[i - 1] + 1;
            va.push(wa[i] as usize);
            vb.push(wb[i] as usize);
        }
    }
    let r = va.len();
    let e = OrdinalMap::new(d + 1, r, &e).expect("pair compression");
    let a2 = Cell { word: OrdinalMap::new(r, a.word.codomain_size(), &va).expect("surjective component"), base: a.base };
    let b2 = Cell { word: OrdinalMap::new(r, b.word.codomain_size(), &vb).expect("surjective component"), base: b.base };
    (e, a2, b2)
}

fn jointly_injective(s: &OrdinalMap, t: &OrdinalMap) -> bool {
    let (a, b) = (s.values(), t.values());
    (1..a.len()).all(|i| a[i] != a[i - 1] || b[i] != b[i - 1])
}

fn product_bound(x: &SimplicialSet, y: &SimplicialSet) -> (usize, bool) {
    match (x.is_complete(), y.is_complete()) {
        (true, true) => (x.top_dim().unwrap_or(0) + y.top_dim().unwrap_or(0), true),
        (true, false) => (y.dim_bound(), false),
        (false, true) => (x.dim_bound(), false),
        (false, false) => (x.dim_bound().min(y.dim_bound()), false),
    }
}

struct Enumerated {
    set: Arc<SimplicialSet>,
    p1: Vec<Vec<Cell>>,
    p2: Vec<Vec<Cell>>,
    index: HashMap<PairKey, u32>,
}

fn enumerate_pairs(
    x: &SimplicialSet,
    y: &SimplicialSet,
    bound: usize,
    complete: bool,
    accept: impl Fn(&Cell, &Cell) -> bool,
) -> Result<Enumerated> {
    let mut b = SetBuilder::new(bound, complete);
    let mut index: HashMap<PairKey, u32> = HashMap::new();
    let mut p1 = vec![Vec::new(); bound + 1];
    let mut p2 = vec![Vec::new(); bound + 1];
    let lookup = |a: &Cell, c: &Cell, index: &HashMap<PairKey, u32>| -> Cell {
        let (e, a2, c2) = normalize_pair(a, c);
        let i = index[&(a2.base, a2.word, c2.base, c2.word)];
        Cell { word: e, base: i }
    };
    for d in 0..=bound {
        for p in 0..=d.min(x.dim_bound()) {
            for q in 0..=d.min(y.dim_bound()) {
                if p + q < d || x.count(p) == 0 || y.count(q) == 0 {
                    continue;
                }
                let ss = surjections(d + 1, p + 1);
                let ts = surjections(d + 1, q + 1);
                for xi in 0..x.count(p) as u32 {
                    for yi in 0..y.count(q) as u32 {
                        for s in &ss {
                            for t in &ts {
                                if !jointly_injective(s, t) {
                                    continue;
                                }
                                let a = Cell { word: *s, base: xi };
                                let c = Cell { word: *t, base: yi };
                                if !accept(&a, &c) {
                                    continue;
                                }
                                let faces: Vec<Cell> = if d == 0 {
                                    Vec::new()
                                } else {
                                    (0..=d)
                                        .map(|i| lookup(&x.face(&a, i).unwrap(), &y.face(&c, i).unwrap(), &index))
                                        .collect()
                                };
                                let name = format!("({},{})", x.describe(&a), y.describe(&c));
                                let idx = b.add_cell(d, name, faces)?;
                                index.insert((xi, *s, yi, *t), idx);
                                p1[d].push(a);
                                p2[d].push(c);
                            }
                        }
                    }
                }
            }
        }
    }
    Ok(Enumerated { set: Arc::new(b.build()), p1, p2, index })
}

fn lookup_pair(index: &HashMap<PairKey, u32>, a: &Cell, b: &Cell) -> Option<Cell> {
    if a.dim() != b.dim() {
        return None;
    }
    let (e, a2, b2) = normalize_pair(a, b);
    index.get(&(a2.base, a2.word, b2.base, b2.word)).map(|&i| Cell { word: e, base: i })
}

/// The product `X × Y`; non-degenerate cells are jointly non-degenerate pairs.
pub fn product(x: &Arc<SimplicialSet>, y: &Arc<SimplicialSet>) -> Result<Product> {
    let (bound, complete) = product_bound(x, y);
    let e = enumerate_pairs(x, y, bound, complete, |_, _| true)?;
    Ok(Product {
        proj1: SimplicialMap::new_unchecked(e.set.clone(), x.clone(), e.p1),
        proj2: SimplicialMap::new_unchecked(e.set.clone(), y.clone(), e.p2),
        set: e.set,
        index: e.index,
    })
}

impl Product {
    /// The cell `(a, b)` in normal form.
    pub fn pair(&self, a: &Cell, b: &Cell) -> Option<Cell> {
        lookup_pair(&self.index, a, b)
    }

    /// The map `(f, g): W → X × Y`.
    pub fn mediator(&self, f: &SimplicialMap, g: &SimplicialMap) -> Result<SimplicialMap> {
        let mut asg = Vec::new();
        for d in 0..=f.source.dim_bound() {
            let mut row = Vec::new();
            for i in 0..f.source.count(d) {
                let c = self
                    .pair(&f.assignment[d][i], &g.assignment[d][i])
                    .ok_or_else(|| Error::Truncation("cone leaves the product's bound".into()))?;
                row.push(c);
            }
            asg.push(row);
        }
        SimplicialMap::new(f.source.clone(), self.set.clone(), asg)
    }
}

/// `u × v: A × B → C × D` between computed products.
pub fn product_map(dom: &Product, cod: &Product, u: &SimplicialMap, v: &SimplicialMap) -> Result<SimplicialMap> {
    let f = u.after(&dom.proj1)?;
    let g = v.after(&dom.proj2)?;
    cod.mediator(&f, &g)
}

/// The fibre product of `f: X → Z` and `g: Y → Z`.
pub fn pullback(f: &SimplicialMap, g: &SimplicialMap) -> Result<Pullback> {
    if !(Arc::ptr_eq(&f.target, &g.target) || f.target == g.target) {
        return Err(Error::SizeMismatch("pullback legs have different targets".into()));
    }
    let (mut bound, mut complete) = product_bound(&f.source, &g.source);
    if !f.target.is_complete() && bound > f.target.dim_bound() {
        bound = f.target.dim_bound();
        complete = false;
    }
    let e = enumerate_pairs(&f.source, &g.source, bound, complete, |a, c| f.apply(a) == g.apply(c))?;
    Ok(Pullback {
        proj1: SimplicialMap::new_unchecked(e.set.clone(), f.source.clone(), e.p1),
        proj2: SimplicialMap::new_unchecked(e.set.clone(), g.source.clone(), e.p2),
        set: e.set,
        index: e.index,
    })
}

impl Pullback {
    pub fn pair(&self, a: &Cell, b: &Cell) -> Option<Cell> {
        lookup_pair(&self.index, a, b)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sset::{horn, is_isomorphism, simplex, GeneratorKind};

    #[test]
    fn product_counts() {
        let d1 = Arc::new(simplex(1));
        let d2 = Arc::new(simplex(2));
        let p = product(&d1, &d1).unwrap();
        assert_eq!(p.set.nondeg_counts(), vec![4, 5, 2]);
        p.set.validate().unwrap();
        let q = product(&d1, &d2).unwrap();
        assert_eq!(q.set.count(3), 3);
        q.proj1.check_faces().unwrap();
        q.proj2.check_faces().unwrap();
    }

    #[test]
    fn unit_law() {
        let h = Arc::new(horn(3, 1).unwrap());
        let pt = Arc::new(simplex(0));
        let p = product(&h, &pt).unwrap();
        assert!(is_isomorphism(&p.proj1));
    }

    #[test]
    fn pullbacks() {
        let d1 = Arc::new(simplex(1));
        let pt = Arc::new(simplex(0));
        let id = SimplicialMap::identity(&d1);
        let pb = pullback(&id, &id).unwrap();
        assert!(is_isomorphism(&pb.proj1));
        let to_pt = |x: &Arc<SimplicialSet>| {
            let asg = (0..=x.dim_bound())
                .map(|d| (0..x.count(d)).map(|_| Cell { word: OrdinalMap::constant(d + 1, 1, 0), base: 0 }).collect())
                .collect();
            SimplicialMap::new(x.clone(), pt.clone(), asg).unwrap()
        };
        let d2 = Arc::new(simplex(2));
        let pb = pullback(&to_pt(&d1), &to_pt(&d2)).unwrap();
        let pr = product(&d1, &d2).unwrap();
        assert_eq!(pb.set.nondeg_counts(), pr.set.nondeg_counts());
        let (hn, inc) = crate::sset::generator(GeneratorKind::Horn, 2, Some(1)).unwrap();
        let inc = inc.unwrap();
        let pb = pullback(&inc, &SimplicialMap::identity(&inc.target)).unwrap();
        assert_eq!(pb.set.nondeg_counts(), hn.nondeg_counts());
        assert!(is_isomorphism(&pb.proj1));
    }
}
