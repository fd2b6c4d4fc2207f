use std::sync::Arc;

use super::{Cell, SetBuilder, SimplicialMap, SimplicialSet};
use crate::error::{Error, Result};

/// A pushout `B ∐_A C` of a levelwise injection `f: A → B` along `g: A → C`.
#[derive(Clone, Debug)]
pub struct Pushout {
    pub set: Arc<SimplicialSet>,
    /// `B → B ∐_A C`.
    pub from_b: SimplicialMap,
    /// `C → B ∐_A C`; cell indices of `C` are preserved.
    pub from_c: SimplicialMap,
    /// For each non-degenerate cell of `B`: `Some(a)` when it is `f(a)`.
    preimage: Vec<Vec<Option<u32>>>,
}

pub fn pushout(f: &SimplicialMap, g: &SimplicialMap) -> Result<Pushout> {
    if !(Arc::ptr_eq(&f.source, &g.source) || f.source == g.source) {
        return Err(Error::SizeMismatch("pushout legs have different sources".into()));
    }
    if !f.is_levelwise_injective() {
        return Err(Error::NotInjective("pushout needs a levelwise injection".into()));
    }
    let (b, c) = (&f.target, &g.target);
    let (bound, complete) = match (b.is_complete(), c.is_complete()) {
        (true, true) => (b.top_dim().unwrap_or(0).max(c.top_dim().unwrap_or(0)), true),
        (true, false) => (c.dim_bound(), false),
        (false, true) => (b.dim_bound(), false),
        (false, false) => (b.dim_bound().min(c.dim_bound()), false),
    };
    let mut preimage: Vec<Vec<Option<u32>>> = (0..=b.dim_bound()).map(|d| vec![None; b.count(d)]).collect();
    for (d, row) in f.assignment.iter().enumerate() {
        for (a, img) in row.iter().enumerate() {
            preimage[d][img.base as usize] = Some(a as u32);
        }
    }
    let mut builder = SetBuilder::new(bound, complete);
    for d in 0..=bound.min(c.dim_bound()) {
        for i in 0..c.count(d) as u32 {
            builder.add_cell(d, c.name(d, i).to_string(), c.faces_of(d, i).to_vec())?;
        }
    }
    // New index of each relative cell of B.
    let mut fresh: Vec<Vec<u32>> = (0..=b.dim_bound()).map(|d| vec![u32::MAX; b.count(d)]).collect();
    let image_of = |cell: &Cell, fresh: &Vec<Vec<u32>>| -> Cell {
        match preimage[cell.base_dim()][cell.base as usize] {
            Some(a) => c.act(&g.assignment[cell.base_dim()][a as usize], &cell.word),
            None => Cell { word: cell.word, base: fresh[cell.base_dim()][cell.base as usize] },
        }
    };
    for d in 0..=bound.min(b.dim_bound()) {
        for i in 0..b.count(d) as u32 {
            if preimage[d][i as usize].is_some() {
                continue;
            }
            let faces: Vec<Cell> = b.faces_of(d, i).iter().map(|x| image_of(x, &fresh)).collect();
            let mut name = b.name(d, i).to_string();
            while builder.lookup(&name).is_some() {
                name.push('\'');
            }
            fresh[d][i as usize] = builder.add_cell(d, name, faces)?;
        }
    }
    let set = Arc::new(builder.build());
    let from_b_asg = (0..=b.dim_bound())
        .map(|d| (0..b.count(d) as u32).map(|i| image_of(&Cell::nondeg(d, i), &fresh)).collect())
        .collect();
    let from_c_asg = (0..=c.dim_bound())
        .map(|d| (0..c.count(d) as u32).map(|i| Cell::nondeg(d, i)).collect())
        .collect();
    Ok(Pushout {
        from_b: SimplicialMap::new_unchecked(b.clone(), set.clone(), from_b_asg),
        from_c: SimplicialMap::new_unchecked(c.clone(), set.clone(), from_c_asg),
        set,
        preimage,
    })
}

impl Pushout {
    /// The map out of the pushout induced by `u: B → W` and `v: C → W`.
    pub fn mediator(&self, u: &SimplicialMap, v: &SimplicialMap) -> Result<SimplicialMap> {
        let mut asg: Vec<Vec<Cell>> = (0..=self.set.dim_bound()).map(|d| Vec::with_capacity(self.set.count(d))).collect();
        let c = &self.from_c.source;
        for d in 0..=self.set.dim_bound().min(c.dim_bound()) {
            asg[d].extend(v.assignment[d].iter().copied());
        }
        let b = &self.from_b.source;
        for d in 0..=self.set.dim_bound().min(b.dim_bound()) {
            for i in 0..b.count(d) {
                if self.preimage[d][i].is_none() {
                    asg[d].push(u.assignment[d][i]);
                }
            }
        }
        SimplicialMap::new(self.set.clone(), v.target.clone(), asg)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::delta::OrdinalMap;
    use crate::sset::{simplex, SimplicialSet};

    fn vertex_into(x: &Arc<SimplicialSet>, v: u32) -> SimplicialMap {
        let pt = Arc::new(simplex(0));
        SimplicialMap::new(pt, x.clone(), vec![vec![Cell::nondeg(0, v)]]).unwrap()
    }

    #[test]
    fn pushout_along_identity() {
        let d2 = Arc::new(simplex(2));
        let id = SimplicialMap::identity(&d2);
        let p = pushout(&id, &id).unwrap();
        assert_eq!(p.set.nondeg_counts(), d2.nondeg_counts());
    }

    #[test]
    fn coproduct_of_points() {
        let empty = Arc::new(SimplicialSet::empty(0));
        let pt = Arc::new(simplex(0));
        let f = SimplicialMap::new(empty.clone(), pt.clone(), vec![vec![]]).unwrap();
        let p = pushout(&f, &f).unwrap();
        assert_eq!(p.set.nondeg_counts(), vec![2]);
    }

    #[test]
    fn gluing_two_edges() {
        let d1 = Arc::new(simplex(1));
        let f = vertex_into(&d1, 1);
        let g = vertex_into(&d1, 0);
        let p = pushout(&f, &g).unwrap();
        assert_eq!(p.set.nondeg_counts(), vec![3, 2]);
        p.set.validate().unwrap();
        p.from_b.check_faces().unwrap();
        // Mediator back onto Δ[1] collapsing everything to vertex 0 via degeneracies.
        let collapse = |x: &Arc<SimplicialSet>| {
            let asg = (0..=x.dim_bound())
                .map(|d| (0..x.count(d)).map(|_| Cell { word: OrdinalMap::constant(d + 1, 1, 0), base: 0 }).collect())
                .collect();
            SimplicialMap::new(x.clone(), d1.clone(), asg).unwrap()
        };
        let m = p.mediator(&collapse(&d1), &collapse(&d1)).unwrap();
        assert_eq!(m.after(&p.from_b).unwrap(), collapse(&d1));
    }
}
