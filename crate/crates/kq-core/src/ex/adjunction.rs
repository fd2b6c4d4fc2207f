//! The bijection `Hom(Sd A, B) ≅ Hom(A, Ex B)` and its naturality.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::object::ExObject;
use super::sd::{sd, Subdivision};
use crate::error::Result;
use crate::sset::{hom_set, SimplicialMap, SimplicialSet};

/// `Sd A` and `Ex B` for one pair of objects.
pub struct Adjunction {
    pub sd_a: Subdivision,
    pub ex_b: ExObject,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AdjunctionReport {
    pub hom_sd: usize,
    pub hom_ex: usize,
    /// Both transposes land in the other hom-set and undo each other.
    pub inverse: bool,
}

impl AdjunctionReport {
    pub fn passed(&self) -> bool {
        self.inverse && self.hom_sd == self.hom_ex
    }
}

impl Adjunction {
    pub fn new(a: &Arc<SimplicialSet>, b: &Arc<SimplicialSet>, trunc: usize) -> Result<Adjunction> {
        Ok(Adjunction { sd_a: sd(a)?, ex_b: ExObject::new(b, trunc)? })
    }

    pub fn source(&self) -> &Arc<SimplicialSet> {
        &self.sd_a.source
    }

    pub fn target(&self) -> &Arc<SimplicialSet> {
        &self.ex_b.base
    }

    pub fn hom_sd(&self) -> Result<Vec<SimplicialMap>> {
        hom_set(&self.sd_a.set, self.target())
    }

    pub fn transpose_in(&self, phi: &SimplicialMap) -> Result<SimplicialMap> {
        self.ex_b.transpose_in(phi, &self.sd_a)
    }

    pub fn transpose_out(&self, psi: &SimplicialMap) -> SimplicialMap {
        self.ex_b.transpose_out(psi, &self.sd_a)
    }

    /// Enumerates both hom-sets and checks the transposes on every map.
    pub fn report(&self) -> Result<AdjunctionReport> {
        let left = self.hom_sd()?;
        let right = hom_set(self.source(), &self.ex_b.set)?;
        let right_set: std::collections::HashSet<Vec<Vec<crate::sset::Cell>>> =
            right.iter().map(|m| m.assignment.clone()).collect();
        let mut inverse = true;
        for phi in &left {
            let psi = self.transpose_in(phi)?;
            inverse &= right_set.contains(&psi.assignment) && self.transpose_out(&psi).assignment == phi.assignment;
        }
        for psi in &right {
            let phi = self.transpose_out(psi);
            inverse &= self.transpose_in(&phi)?.assignment == psi.assignment;
        }
        Ok(AdjunctionReport { hom_sd: left.len(), hom_ex: right.len(), inverse })
    }

    /// For `g: A' → A`, `h: B → B'` and `phi: Sd A → B`, where `other` is the
    /// pair `(A', B')`: the transpose of `h ∘ phi ∘ Sd g` equals
    /// `Ex h ∘ phi^♭ ∘ g`.
    pub fn natural_at(&self, other: &Adjunction, g: &SimplicialMap, h: &SimplicialMap, phi: &SimplicialMap) -> Result<bool> {
        let sd_g = other.sd_a.map(g, &self.sd_a)?;
        let lhs = other.transpose_in(&h.after(phi)?.after(&sd_g)?)?;
        let ex_h = self.ex_b.map(h, &other.ex_b)?;
        let rhs = ex_h.after(&self.transpose_in(phi)?)?.after(g)?;
        Ok(lhs.assignment == rhs.assignment)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sset::{boundary, simplex};

    #[test]
    fn interval_counts() {
        let d1 = Arc::new(simplex(1));
        let adj = Adjunction::new(&d1, &d1, 2).unwrap();
        let r = adj.report().unwrap();
        assert_eq!((r.hom_sd, r.hom_ex), (5, 5));
        assert!(r.passed());
    }

    #[test]
    fn naturality_on_faces_and_degeneracies() {
        let d1 = Arc::new(simplex(1));
        let d0 = Arc::new(simplex(0));
        let bd = Arc::new(boundary(2));
        let big = Adjunction::new(&d1, &bd, 2).unwrap();
        let small = Adjunction::new(&d0, &d1, 2).unwrap();
        let gs = hom_set(&d0, &d1).unwrap();
        let hs = hom_set(&bd, &d1).unwrap();
        let mut checked = 0;
        for phi in big.hom_sd().unwrap().iter().take(6) {
            for g in &gs {
                for h in hs.iter().take(4) {
                    assert!(big.natural_at(&small, g, h, phi).unwrap());
                    checked += 1;
                }
            }
        }
        assert!(checked > 10);
    }
}
