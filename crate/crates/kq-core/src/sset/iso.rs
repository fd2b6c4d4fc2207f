use std::sync::Arc;

use super::{for_each_map, BoundaryIndex, SearchControl, SimplicialMap, SimplicialSet};

/// A map is an isomorphism iff it sends non-degenerate cells bijectively onto the
/// non-degenerate cells of its target.
pub fn is_isomorphism(f: &SimplicialMap) -> bool {
    f.source.nondeg_counts() == f.target.nondeg_counts() && f.is_levelwise_injective() && f.is_surjective_on_nondeg()
}

/// Searches for an isomorphism `x → y`.
pub fn find_isomorphism(x: &Arc<SimplicialSet>, y: &Arc<SimplicialSet>) -> Option<SimplicialMap> {
    if x.nondeg_counts() != y.nondeg_counts() {
        return None;
    }
    let index = BoundaryIndex::new(y, x.top_dim().unwrap_or(0)).ok()?;
    let mut found = None;
    for_each_map(x, &index, &[], |_, _, c| !c.is_degenerate(), |asg| {
        let m = SimplicialMap::new_unchecked(x.clone(), y.clone(), asg.to_vec());
        if is_isomorphism(&m) {
            found = Some(m);
            SearchControl::Stop
        } else {
            SearchControl::Continue
        }
    })
    .ok()?;
    found
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sset::{boundary, horn, simplex};

    #[test]
    fn horns_are_isomorphic_to_their_mirror() {
        let a = Arc::new(horn(2, 0).unwrap());
        let b = Arc::new(horn(2, 2).unwrap());
        // Orientation matters: Λ^0[2] and Λ^2[2] are not isomorphic.
        assert!(find_isomorphism(&a, &b).is_none());
        let c = Arc::new(horn(2, 0).unwrap());
        assert!(find_isomorphism(&a, &c).is_some());
    }

    #[test]
    fn boundary_is_not_a_simplex() {
        let a = Arc::new(boundary(2));
        let b = Arc::new(simplex(2));
        assert!(find_isomorphism(&a, &b).is_none());
        assert!(is_isomorphism(&SimplicialMap::identity(&b)));
    }
}
