//! Finite stages of the tower `Ex^a X ×_{Ex^a Y} Y`.
//!
//! Stage `a + 1` is `Ex_Y` of stage `a` over `Y`. Each stage is also computed
//! directly as a fibre product and the two are compared by an explicit map.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::object::ExObject;
use super::relative::{classify_and_pstructure, ExUnitStructure};
use crate::error::{Error, Result};
use crate::sset::{is_isomorphism, pullback, Cell, SimplicialMap, SimplicialSet};

/// Comparison of the iterated and the direct construction of one stage.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Identification {
    pub stage: usize,
    pub iterated_counts: Vec<usize>,
    pub direct_counts: Vec<usize>,
    pub isomorphic: bool,
}

#[derive(Clone, Debug)]
pub struct TowerStage {
    /// `1` for `Ex_Y X`.
    pub stage: usize,
    /// The unit of the previous stage into this one, with its P-structure.
    pub structure: ExUnitStructure,
    pub identification: Option<Identification>,
}

impl TowerStage {
    pub fn set(&self) -> &Arc<SimplicialSet> {
        &self.structure.rel.set
    }
}

#[derive(Clone, Debug)]
pub struct Tower {
    pub f: SimplicialMap,
    pub trunc: usize,
    pub stages: Vec<TowerStage>,
}

impl Tower {
    /// Whether every stage passed validation, the property checks and the
    /// comparison with the direct construction.
    pub fn passed(&self) -> bool {
        self.stages.iter().all(|s| {
            s.structure.validation.passed
                && s.structure.properties.passed()
                && s.identification.as_ref().map_or(true, |i| i.isomorphic)
        })
    }
}

/// Direct side: `Ex^a X`, `Ex^a Y`, `Ex^a f` and the composite unit `Y → Ex^a Y`.
struct Direct {
    ex_x: ExObject,
    ex_y: ExObject,
    ex_f: SimplicialMap,
    unit_y: SimplicialMap,
}

fn next_direct(prev: Option<&Direct>, f: &SimplicialMap, trunc: usize) -> Result<Direct> {
    let (x, y, g) = match prev {
        None => (f.source.clone(), f.target.clone(), f.clone()),
        Some(d) => (d.ex_x.set.clone(), d.ex_y.set.clone(), d.ex_f.clone()),
    };
    let ex_x = ExObject::new(&x, trunc)?;
    let ex_y = ExObject::new(&y, trunc)?;
    let ex_f = ex_x.map(&g, &ex_y)?;
    let eta = ex_y.unit()?;
    let unit_y = match prev {
        None => eta,
        Some(d) => eta.after(&d.unit_y)?,
    };
    Ok(Direct { ex_x, ex_y, ex_f, unit_y })
}

/// Builds `steps` stages of the tower for `f`, each truncated at `trunc`. When
/// `identify` is set every stage is also computed directly and compared.
pub fn tower(f: &SimplicialMap, steps: usize, trunc: usize, identify: bool) -> Result<Tower> {
    if steps == 0 {
        return Err(Error::Precondition("a tower needs at least one step".into()));
    }
    let mut stages: Vec<TowerStage> = Vec::with_capacity(steps);
    let mut direct: Option<Direct> = None;
    // The projection of the current stage to `Ex^a X`.
    let mut to_ex_x = SimplicialMap::identity(&f.source);
    for a in 1..=steps {
        let over = match stages.last() {
            None => f.clone(),
            Some(s) => s.structure.rel.to_base.clone(),
        };
        let structure = classify_and_pstructure(&over, trunc)?;
        let rel = &structure.rel;
        let mut identification = None;
        if identify {
            let d = next_direct(direct.as_ref(), f, trunc)?;
            let ex_proj = rel.ex.map(&to_ex_x, &d.ex_x)?;
            let proj = ex_proj.after(&rel.inclusion)?;
            let fibre = pullback(&d.ex_f, &d.unit_y)?;
            let mut asg = Vec::new();
            for n in 0..=rel.set.dim_bound() {
                let mut row = Vec::new();
                for i in 0..rel.set.count(n) as u32 {
                    let c = Cell::nondeg(n, i);
                    let paired = fibre
                        .pair(&proj.apply(&c), &rel.to_base.apply(&c))
                        .ok_or_else(|| Error::Internal(format!("stage {a} cell {} misses the fibre product", rel.set.describe(&c))))?;
                    row.push(paired);
                }
                asg.push(row);
            }
            let cmp = SimplicialMap::new(rel.set.clone(), fibre.set.clone(), asg)?;
            identification = Some(Identification {
                stage: a,
                iterated_counts: rel.set.nondeg_counts(),
                direct_counts: fibre.set.nondeg_counts(),
                isomorphic: is_isomorphism(&cmp),
            });
            to_ex_x = proj;
            direct = Some(d);
        }
        stages.push(TowerStage { stage: a, structure, identification });
    }
    Ok(Tower { f: f.clone(), trunc, stages })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::delta::OrdinalMap;
    use crate::sset::simplex;

    fn terminal(x: &Arc<SimplicialSet>) -> SimplicialMap {
        let pt = Arc::new(simplex(0));
        let asg = (0..=x.dim_bound()).map(|d| vec![Cell { word: OrdinalMap::constant(d + 1, 1, 0), base: 0 }; x.count(d)]).collect();
        SimplicialMap::new(x.clone(), pt, asg).unwrap()
    }

    #[test]
    fn point_tower_is_constant() {
        let t = tower(&terminal(&Arc::new(simplex(0))), 2, 2, true).unwrap();
        assert!(t.passed());
        for s in &t.stages {
            assert_eq!(s.set().nondeg_counts(), vec![1]);
        }
    }

    #[test]
    fn identity_tower_is_constant() {
        let x = Arc::new(simplex(1));
        let t = tower(&SimplicialMap::identity(&x), 2, 2, true).unwrap();
        assert!(t.passed());
        for s in &t.stages {
            assert_eq!(s.set().nondeg_counts(), vec![2, 1]);
            assert!(s.structure.structure.pairing.is_empty());
        }
    }

    #[test]
    fn interval_over_a_point_grows() {
        let t = tower(&terminal(&Arc::new(simplex(1))), 2, 2, true).unwrap();
        assert!(t.passed(), "{:?}", t.stages.iter().map(|s| &s.identification).collect::<Vec<_>>());
        let c1 = t.stages[0].set().nondeg_counts();
        let c2 = t.stages[1].set().nondeg_counts();
        assert!(c2.iter().zip(&c1).all(|(b, a)| b >= a) && c2 != c1);
    }
}
