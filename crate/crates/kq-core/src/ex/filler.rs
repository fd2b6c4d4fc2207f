//! Filling horns one level up the `Ex` tower.
//!
//! A horn `Λ^k[n] → Ex W` transposes to `Sd Λ^k[n] → W`; precomposing with `ψ`
//! gives `Sd² Δ[n] → W`, which transposes twice to an `n`-cell of `Ex² W`.

use std::collections::HashMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::kpos::{elements_of, subset_of, JoinMap, Subset};
use super::object::{unit_datum, ExObject};
use super::psi::Psi;
use super::sd::{evaluate, precompose, Datum, SdSimplex};
use crate::delta::{combinations, injection_with_image};
use crate::error::{Error, Result};
use crate::sset::{simplex, simplex_map, vertex_name, Cell, SimplicialMap, SimplicialSet};

/// A filler together with the replayed comparison on the horn.
#[derive(Clone, Debug)]
pub struct HornFiller {
    pub n: usize,
    pub k: usize,
    /// The sub-object of `Ex² W` generated by the filler.
    pub object: ExObject,
    /// `Δ[n] → object`.
    pub filler: SimplicialMap,
    pub datum: Datum,
    pub report: FillerReport,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FillerReport {
    pub n: usize,
    pub k: usize,
    pub horn_cells_checked: usize,
    /// Horn faces where the filler disagrees with the unit image.
    pub mismatches: Vec<String>,
    pub filler_degenerate: bool,
}

impl FillerReport {
    pub fn passed(&self) -> bool {
        self.mismatches.is_empty()
    }
}

/// Vertex sets of the non-degenerate cells of a sub-object of `Δ[n]` (a horn or a
/// boundary), recovered from its names.
pub(super) fn vertex_faces(src: &SimplicialSet, n: usize) -> Result<HashMap<Subset, (usize, u32)>> {
    let mut out = HashMap::new();
    for d in 0..=src.dim_bound() {
        let names: HashMap<String, Vec<usize>> =
            combinations(n + 1, d + 1).into_iter().map(|c| (vertex_name(&c, n), c)).collect();
        for i in 0..src.count(d) as u32 {
            let vs = names
                .get(src.name(d, i))
                .ok_or_else(|| Error::Precondition(format!("{} is not a face of Δ[{n}]", src.name(d, i))))?;
            out.insert(subset_of(vs), (d, i));
        }
    }
    Ok(out)
}

/// The transpose `Sd S → W` of `g: S → Ex W`, for `S ⊆ Δ[n]` with face lookup
/// `faces`, on a weakly increasing chain of faces of `S`.
pub(super) fn transpose_on_faces(ex: &ExObject, g: &SimplicialMap, faces: &HashMap<Subset, (usize, u32)>, chain: &[Subset]) -> Cell {
    let top = *chain.last().expect("non-empty chain");
    let (d, i) = faces[&top];
    let elems = elements_of(top);
    let local: Vec<Subset> = chain
        .iter()
        .map(|&s| elems.iter().enumerate().filter(|(_, &e)| s >> e & 1 == 1).fold(0, |a, (p, _)| a | 1 << p))
        .collect();
    evaluate(&ex.base, d, &ex.datum_of(&g.at(d, i)), &local)
}

/// Fills `horn: Λ^k[n] → Ex W`, where `ex` is `Ex W` and the horn's source is
/// `horn(n, k)`.
pub fn ex_horn_filler(ex: &ExObject, horn: &SimplicialMap, n: usize, k: usize) -> Result<HornFiller> {
    if !Arc::ptr_eq(&horn.target, &ex.set) && *horn.target != *ex.set {
        return Err(Error::SizeMismatch("horn does not land in the given Ex object".into()));
    }
    if *horn.source != crate::sset::horn(n, k)? {
        return Err(Error::Precondition(format!("source is not Λ^{k}[{n}]")));
    }
    if n > ex.trunc {
        return Err(Error::Truncation(format!("Ex is truncated at {} below the horn dimension {n}", ex.trunc)));
    }
    let psi = Psi::get(n, k)?;
    let faces = vertex_faces(&horn.source, n)?;
    let transpose = |chain: &[Subset]| transpose_on_faces(ex, horn, &faces, chain);
    let outer = SdSimplex::get(n);
    let mut datum: Datum = Vec::with_capacity(outer.len());
    for c in 0..outer.len() {
        let chain = outer.chain(c);
        let d = chain.len() - 1;
        let inner = SdSimplex::get(d);
        let cell_datum: Datum = (0..inner.len())
            .map(|e| {
                let image: Vec<Subset> = inner
                    .chain(e)
                    .iter()
                    .map(|&t| {
                        let part: Vec<Subset> = elements_of(t).into_iter().map(|p| chain[p]).collect();
                        psi.at_chain(&part)
                    })
                    .collect();
                transpose(&image)
            })
            .collect();
        datum.push(ex.cell_of(d, &cell_datum)?);
    }
    let object = ExObject::generated(&ex.set, &[(n, datum.clone())])?;
    let top = object.cell_of(n, &datum)?;
    let delta = Arc::new(simplex(n));
    let filler = simplex_map(&delta, &object.set, &top);
    filler.check_faces().map_err(|e| Error::Internal(format!("filler faces: {e:?}")))?;

    let mut mismatches = Vec::new();
    let mut checked = 0;
    let mut sorted: Vec<(&Subset, &(usize, u32))> = faces.iter().collect();
    sorted.sort_by_key(|(s, (d, i))| (*d, *i, **s));
    for (&vs, &(d, i)) in sorted {
        checked += 1;
        let inj = injection_with_image(&elements_of(vs), n + 1)?;
        let restricted = precompose(&ex.set, &datum, &JoinMap::direct_image(&inj));
        if restricted != unit_datum(&ex.set, &horn.at(d, i)) {
            mismatches.push(horn.source.name(d, i).to_string());
        }
    }
    let report = FillerReport { n, k, horn_cells_checked: checked, mismatches, filler_degenerate: top.is_degenerate() };
    Ok(HornFiller { n, k, object, filler, datum, report })
}

/// `Ex^a X` for `a ≥ 1`, each level truncated at `trunc`; `levels[0]` is `Ex X`.
pub fn ex_tower(x: &Arc<SimplicialSet>, a: usize, trunc: usize) -> Result<Vec<ExObject>> {
    let mut levels: Vec<ExObject> = Vec::with_capacity(a);
    for i in 0..a {
        let base = if i == 0 { x.clone() } else { levels[i - 1].set.clone() };
        levels.push(ExObject::new(&base, trunc)?);
    }
    Ok(levels)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sset::{boundary, hom_set, horn};

    fn all_horns(ex: &ExObject, n: usize, k: usize) -> Vec<SimplicialMap> {
        hom_set(&Arc::new(horn(n, k).unwrap()), &ex.set).unwrap()
    }

    #[test]
    fn fillers_restrict_to_the_unit_image() {
        for x in [simplex(1), simplex(2), boundary(2)] {
            let ex = ExObject::new(&Arc::new(x), 2).unwrap();
            for (n, k) in [(1, 0), (1, 1), (2, 1)] {
                let horns = all_horns(&ex, n, k);
                assert!(!horns.is_empty());
                for h in horns.iter().take(40) {
                    let f = ex_horn_filler(&ex, h, n, k).unwrap();
                    assert!(f.report.passed(), "{:?}", f.report);
                    f.object.set.validate().unwrap();
                }
            }
        }
    }

    #[test]
    fn point_fillers_are_degenerate() {
        let ex = ExObject::new(&Arc::new(simplex(0)), 2).unwrap();
        for (n, k) in [(1, 0), (2, 1)] {
            for h in all_horns(&ex, n, k) {
                let f = ex_horn_filler(&ex, &h, n, k).unwrap();
                assert!(f.report.filler_degenerate);
            }
        }
    }

    #[test]
    fn second_level_horn() {
        let levels = ex_tower(&Arc::new(simplex(1)), 2, 1).unwrap();
        let ex2 = &levels[1];
        let h = all_horns(ex2, 1, 0).into_iter().last().unwrap();
        let f = ex_horn_filler(ex2, &h, 1, 0).unwrap();
        assert!(f.report.passed());
    }
}
