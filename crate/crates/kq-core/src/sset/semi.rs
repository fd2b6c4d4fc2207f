use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use super::{Cell, FiniteCategory, Morphism, SetBuilder, SimplicialSet};
use crate::delta::{compose, injections, OrdinalMap};
use crate::error::{Error, Result};

/// A truncated semi-simplicial set: cells and face maps, no degeneracies.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SemiSimplicialSet {
    pub dim_bound: usize,
    pub names: Vec<Vec<String>>,
    /// `faces[d][x][i]` is the index of `d_i x` among the `(d-1)`-cells.
    pub faces: Vec<Vec<Vec<u32>>>,
}

impl SemiSimplicialSet {
    pub fn count(&self, d: usize) -> usize {
        self.names.get(d).map_or(0, |v| v.len())
    }

    pub fn total(&self) -> usize {
        self.names.iter().map(|v| v.len()).sum()
    }

    /// The standard semi-simplicial simplex `Δ₊[n]`.
    pub fn simplex(n: usize) -> SemiSimplicialSet {
        forget_nondegenerate(&super::simplex(n))
    }

    /// The non-degenerate cells of a simplicial set whose non-degenerate cells have
    /// only non-degenerate faces (boundaries, horns, simplicial complexes).
    pub fn from_nondegenerate(x: &SimplicialSet) -> Result<SemiSimplicialSet> {
        for (d, i) in x.nondeg_cells() {
            if x.faces_of(d, i).iter().any(|c| c.is_degenerate()) {
                return Err(Error::Precondition(format!("{} has a degenerate face", x.name(d, i))));
            }
        }
        Ok(forget_nondegenerate(x))
    }

    /// Checks `d_i d_j = d_{j-1} d_i` for `i < j`.
    pub fn validate(&self) -> Result<()> {
        if self.names.len() != self.dim_bound + 1 || self.faces.len() != self.dim_bound + 1 {
            return Err(Error::InvalidSet("semi-simplicial tables do not match dim_bound".into()));
        }
        for d in 0..=self.dim_bound {
            for x in 0..self.count(d) {
                let fs = &self.faces[d][x];
                let expected = if d == 0 { 0 } else { d + 1 };
                if fs.len() != expected || fs.iter().any(|&f| f as usize >= self.count(d - 1)) {
                    return Err(Error::InvalidSet(format!("bad face list for {}", self.names[d][x])));
                }
                if d < 2 {
                    continue;
                }
                for j in 1..=d {
                    for i in 0..j {
                        let a = self.faces[d - 1][fs[j] as usize][i];
                        let b = self.faces[d - 1][fs[i] as usize][j - 1];
                        if a != b {
                            return Err(Error::InvalidSet(format!(
                                "semi-simplicial identity ({i},{j}) fails on {}",
                                self.names[d][x]
                            )));
                        }
                    }
                }
            }
        }
        Ok(())
    }

    /// `θ^* x` for an injective monotone `θ: [p] → [d]`.
    pub fn restrict(&self, d: usize, x: u32, theta: &OrdinalMap) -> u32 {
        let vals = theta.values();
        if vals.len() == d + 1 {
            return x;
        }
        let mut i = 0;
        while i < vals.len() && vals[i] as usize == i {
            i += 1;
        }
        let f = self.faces[d][x as usize][i];
        let rest: Vec<usize> = vals.iter().map(|&v| if (v as usize) < i { v as usize } else { v as usize - 1 }).collect();
        self.restrict(d - 1, f, &OrdinalMap::new(rest.len(), d, &rest).expect("restriction of an injection"))
    }
}

/// The free simplicial set on a semi-simplicial set: same non-degenerate cells.
pub fn free_simplicial(x: &SemiSimplicialSet) -> Result<SimplicialSet> {
    let mut b = SetBuilder::new(x.dim_bound, true);
    for d in 0..=x.dim_bound {
        for (i, name) in x.names[d].iter().enumerate() {
            let faces = x.faces[d][i].iter().map(|&f| Cell::nondeg(d - 1, f)).collect();
            b.add_cell(d, name.clone(), faces)?;
        }
    }
    Ok(b.build())
}

fn forget_nondegenerate(x: &SimplicialSet) -> SemiSimplicialSet {
    let faces = (0..=x.dim_bound())
        .map(|d| (0..x.count(d) as u32).map(|i| x.faces_of(d, i).iter().map(|c| c.base).collect()).collect())
        .collect();
    SemiSimplicialSet { dim_bound: x.dim_bound(), names: (0..=x.dim_bound()).map(|d| x.names(d).to_vec()).collect(), faces }
}

/// The underlying semi-simplicial set, degenerate cells included, up to the bound.
pub fn forget_degeneracies(x: &SimplicialSet) -> SemiSimplicialSet {
    let d_max = x.dim_bound();
    let cells: Vec<Vec<Cell>> = (0..=d_max).map(|d| x.all_cells(d)).collect();
    let pos: Vec<HashMap<Cell, u32>> =
        cells.iter().map(|row| row.iter().enumerate().map(|(i, c)| (*c, i as u32)).collect()).collect();
    let mut names = Vec::new();
    let mut faces = Vec::new();
    for d in 0..=d_max {
        names.push(cells[d].iter().map(|c| x.describe(c)).collect());
        let mut row = Vec::new();
        for c in &cells[d] {
            let fs = if d == 0 { Vec::new() } else { (0..=d).map(|i| pos[d - 1][&x.face(c, i).unwrap()]).collect() };
            row.push(fs);
        }
        faces.push(row);
    }
    SemiSimplicialSet { dim_bound: d_max, names, faces }
}

/// The category of simplices `Δ₊/X`: objects are cells, a morphism `x → y` is a
/// face operator `θ` with `θ^* y = x`.
pub fn slice_category(x: &SemiSimplicialSet) -> FiniteCategory {
    slice_category_with_operators(x).0
}

/// [`slice_category`] together with the face operator carried by each morphism.
pub fn slice_category_with_operators(x: &SemiSimplicialSet) -> (FiniteCategory, Vec<OrdinalMap>) {
    let mut objects = Vec::new();
    let mut obj_index: HashMap<(usize, u32), usize> = HashMap::new();
    for d in 0..=x.dim_bound {
        for i in 0..x.count(d) {
            obj_index.insert((d, i as u32), objects.len());
            objects.push(x.names[d][i].clone());
        }
    }
    let mut morphisms = Vec::new();
    let mut thetas: Vec<OrdinalMap> = Vec::new();
    let mut by_key: HashMap<(usize, OrdinalMap, usize), usize> = HashMap::new();
    let mut identities = vec![0; objects.len()];
    for q in 0..=x.dim_bound {
        for y in 0..x.count(q) as u32 {
            for p in 0..=q {
                for theta in injections(p + 1, q + 1) {
                    let xi = x.restrict(q, y, &theta);
                    let (s, t) = (obj_index[&(p, xi)], obj_index[&(q, y)]);
                    let name = if p == q {
                        identities[t] = morphisms.len();
                        format!("id:{}", objects[t])
                    } else {
                        format!("{}>{}{:?}", objects[s], objects[t], theta.values())
                    };
                    by_key.insert((s, theta, t), morphisms.len());
                    morphisms.push(Morphism { name, source: s, target: t });
                    thetas.push(theta);
                }
            }
        }
    }
    let m = morphisms.len();
    let mut composition = vec![vec![None; m]; m];
    for g in 0..m {
        for f in 0..m {
            if morphisms[f].target == morphisms[g].source {
                let theta = compose(&thetas[g], &thetas[f]).expect("composable face operators");
                composition[g][f] = Some(by_key[&(morphisms[f].source, theta, morphisms[g].target)]);
            }
        }
    }
    (FiniteCategory { objects, morphisms, identities, composition }, thetas)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sset::{boundary, find_isomorphism, simplex, Nerve};

    #[test]
    fn free_and_forget() {
        for n in 0..4 {
            let s = SemiSimplicialSet::simplex(n);
            s.validate().unwrap();
            assert_eq!(free_simplicial(&s).unwrap(), simplex(n));
        }
        let pt = simplex(0).with_dim_bound(4).unwrap();
        let f = forget_degeneracies(&pt);
        assert!((0..=4).all(|d| f.count(d) == 1));
        f.validate().unwrap();
        let f1 = forget_degeneracies(&simplex(1));
        assert_eq!(f1.count(1), 3);
    }

    #[test]
    fn slices() {
        let pt = slice_category(&SemiSimplicialSet::simplex(0));
        assert_eq!((pt.objects.len(), pt.morphisms.len()), (1, 1));
        let b = forget_nondegenerate(&boundary(2));
        let c = slice_category(&b);
        c.validate().unwrap();
        let non_id = (0..c.morphisms.len()).filter(|&m| !c.is_identity(m)).count();
        assert_eq!((c.objects.len(), non_id), (6, 6));
        let s2 = slice_category(&SemiSimplicialSet::simplex(2));
        s2.validate().unwrap();
        assert!(s2.is_poset());
        let n = Nerve::new(s2, 2).unwrap();
        let k2 = Nerve::new(crate::ex::kpos_category(2), 2).unwrap();
        assert!(find_isomorphism(&n.set, &k2.set).is_some());
    }
}
