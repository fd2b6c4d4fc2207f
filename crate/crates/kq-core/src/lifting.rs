//! Lifting problems, bounded fibration certificates, the retract argument and
//! corner products.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sset::{
    for_each_map, generator, hom_set, product, product_map, pushout, simplex_map, BoundaryIndex, Cell, CellRef,
    GeneratorKind, MapFile, Product, SearchControl, SimplicialMap, SimplicialSet,
};

/// A commutative square `top: A → X`, `bottom: B → Y` over `left: A → B` and
/// `right: X → Y`.
#[derive(Clone, Debug)]
pub struct LiftingProblem {
    pub left: SimplicialMap,
    pub right: SimplicialMap,
    pub top: SimplicialMap,
    pub bottom: SimplicialMap,
}

impl LiftingProblem {
    pub fn new(left: SimplicialMap, right: SimplicialMap, top: SimplicialMap, bottom: SimplicialMap) -> Result<Self> {
        if !left.is_levelwise_injective() {
            return Err(Error::NotInjective("the left map of a lifting problem must be a cofibration".into()));
        }
        if right.after(&top)?.assignment != bottom.after(&left)?.assignment {
            return Err(Error::InvalidMorphism("lifting square does not commute".into()));
        }
        Ok(LiftingProblem { left, right, top, bottom })
    }

    /// Checks both triangles for a candidate diagonal.
    pub fn is_solution(&self, h: &SimplicialMap) -> bool {
        h.check_faces().is_ok()
            && h.after(&self.left).map(|m| m.assignment == self.top.assignment).unwrap_or(false)
            && self.right.after(h).map(|m| m.assignment == self.bottom.assignment).unwrap_or(false)
    }
}

/// The first diagonal in canonical search order, or `None` when none exists.
pub fn find_lift(problem: &LiftingProblem) -> Result<Option<SimplicialMap>> {
    let b = &problem.left.target;
    let index = BoundaryIndex::new(&problem.right.source, b.top_dim().unwrap_or(0))?;
    find_lift_with_index(problem, &index)
}

/// As [`find_lift`], reusing an index of the right map's source.
pub fn find_lift_with_index(problem: &LiftingProblem, index: &BoundaryIndex) -> Result<Option<SimplicialMap>> {
    let b = &problem.left.target;
    let mut fixed: Vec<Vec<Option<Cell>>> = (0..=b.dim_bound()).map(|d| vec![None; b.count(d)]).collect();
    for (d, row) in problem.left.assignment.iter().enumerate() {
        for (a, img) in row.iter().enumerate() {
            fixed[img.base_dim()][img.base as usize] = Some(problem.top.assignment[d][a]);
        }
    }
    let mut found = None;
    let right = &problem.right;
    let bottom = &problem.bottom;
    for_each_map(
        b,
        index,
        &fixed,
        |d, i, c| right.apply(c) == bottom.at(d, i),
        |asg| {
            found = Some(asg.to_vec());
            SearchControl::Stop
        },
    )?;
    Ok(found.map(|asg| SimplicialMap::new_unchecked(b.clone(), right.source.clone(), asg)))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ProblemKind {
    Horn,
    Boundary,
}

/// A lifting problem of a generating inclusion against a fixed map `p: X → Y`. The
/// bottom map `Δ[n] → Y` is recorded by the `n`-cell it classifies.
#[derive(Clone, Debug)]
pub struct GeneratingProblem {
    pub n: usize,
    pub k: Option<usize>,
    pub top: SimplicialMap,
    pub bottom: Cell,
}

#[derive(Clone, Debug)]
pub struct SolvedProblem {
    pub problem: GeneratingProblem,
    /// The `n`-cell of `X` classifying the diagonal.
    pub filler: Cell,
}

/// A filler for every generating problem up to `max_dim`.
#[derive(Clone, Debug)]
pub struct FibrationCertificate {
    pub kind: ProblemKind,
    pub max_dim: usize,
    pub entries: Vec<SolvedProblem>,
}

/// The unsolvable problems found: the least one in canonical order, and the least
/// one in each dimension where one exists.
#[derive(Clone, Debug)]
pub struct Counterexample {
    pub minimal: GeneratingProblem,
    pub first_per_dim: Vec<GeneratingProblem>,
}

#[derive(Clone, Debug)]
pub enum CertificateOutcome {
    Certified(FibrationCertificate),
    Failed(Counterexample),
}

impl CertificateOutcome {
    pub fn certificate(&self) -> Option<&FibrationCertificate> {
        match self {
            CertificateOutcome::Certified(c) => Some(c),
            CertificateOutcome::Failed(_) => None,
        }
    }
}

pub(crate) fn generators_up_to(kind: ProblemKind, max_dim: usize) -> Result<Vec<(usize, Option<usize>, SimplicialMap)>> {
    let mut out = Vec::new();
    for n in 0..=max_dim {
        match kind {
            ProblemKind::Boundary => {
                let (_, inc) = generator(GeneratorKind::Boundary, n, None)?;
                out.push((n, None, inc.expect("boundary inclusion")));
            }
            ProblemKind::Horn => {
                if n == 0 {
                    continue;
                }
                for k in 0..=n {
                    let (_, inc) = generator(GeneratorKind::Horn, n, Some(k))?;
                    out.push((n, Some(k), inc.expect("horn inclusion")));
                }
            }
        }
    }
    Ok(out)
}

/// Every generating problem against `p` in canonical order, each with its solution.
fn solve_all(
    p: &SimplicialMap,
    kind: ProblemKind,
    max_dim: usize,
    mut on: impl FnMut(GeneratingProblem, Option<Cell>),
) -> Result<()> {
    let (x, y) = (&p.source, &p.target);
    let x_index = BoundaryIndex::new(x, max_dim)?;
    if max_dim > y.dim_bound() && !y.is_complete() {
        return Err(Error::Truncation("target is truncated below the certificate dimension".into()));
    }
    for (n, k, inc) in generators_up_to(kind, max_dim)? {
        let full = inc.target.clone();
        let tops = hom_set(&inc.source, x)?;
        let bottoms: Vec<(Cell, SimplicialMap)> =
            y.all_cells(n).into_iter().map(|c| (c, simplex_map(&full, y, &c))).collect();
        for top in tops {
            let pt = p.after(&top)?;
            for (cell, bmap) in &bottoms {
                if bmap.after(&inc)?.assignment != pt.assignment {
                    continue;
                }
                let prob = LiftingProblem { left: inc.clone(), right: p.clone(), top: top.clone(), bottom: bmap.clone() };
                let lift = find_lift_with_index(&prob, &x_index)?;
                let filler = lift.map(|h| h.at(n, 0));
                on(GeneratingProblem { n, k, top: top.clone(), bottom: *cell }, filler);
            }
        }
    }
    Ok(())
}

fn certificate(p: &SimplicialMap, kind: ProblemKind, max_dim: usize) -> Result<CertificateOutcome> {
    let mut entries = Vec::new();
    let mut failures: Vec<GeneratingProblem> = Vec::new();
    solve_all(p, kind, max_dim, |problem, filler| match filler {
        Some(filler) => entries.push(SolvedProblem { problem, filler }),
        None => {
            if failures.last().map_or(true, |f| f.n != problem.n) {
                failures.push(problem);
            }
        }
    })?;
    if failures.is_empty() {
        Ok(CertificateOutcome::Certified(FibrationCertificate { kind, max_dim, entries }))
    } else {
        Ok(CertificateOutcome::Failed(Counterexample { minimal: failures[0].clone(), first_per_dim: failures }))
    }
}

/// Fillers for every horn problem against `p` in dimensions `≤ max_dim`.
pub fn fibration_certificate(p: &SimplicialMap, max_dim: usize) -> Result<CertificateOutcome> {
    certificate(p, ProblemKind::Horn, max_dim)
}

/// Fillers for every boundary problem against `p` in dimensions `≤ max_dim`.
pub fn trivial_fibration_certificate(p: &SimplicialMap, max_dim: usize) -> Result<CertificateOutcome> {
    certificate(p, ProblemKind::Boundary, max_dim)
}

impl GeneratingProblem {
    /// Whether the `n`-cell `x` of `p`'s source solves this problem.
    pub fn is_solved_by(&self, p: &SimplicialMap, x: &Cell) -> bool {
        if x.dim() != self.n || p.apply(x) != self.bottom {
            return false;
        }
        let kind = if self.k.is_some() { GeneratorKind::Horn } else { GeneratorKind::Boundary };
        let Ok((_, Some(inc))) = generator(kind, self.n, self.k) else { return false };
        let h = simplex_map(&inc.target, &p.source, x);
        h.after(&inc).map(|m| m.assignment == self.top.assignment).unwrap_or(false)
    }
}

impl FibrationCertificate {
    /// Replays every stored filler; returns the index of the first bad entry.
    pub fn verify(&self, p: &SimplicialMap) -> std::result::Result<(), usize> {
        for (i, e) in self.entries.iter().enumerate() {
            if !e.problem.is_solved_by(p, &e.filler) {
                return Err(i);
            }
        }
        Ok(())
    }

    pub fn to_record(&self, p: &SimplicialMap) -> CertificateRecord {
        CertificateRecord {
            kind: self.kind,
            max_dim: self.max_dim,
            map: MapFile::inline(p),
            problems: self.entries.iter().map(|e| problem_record(p, &e.problem, Some(&e.filler))).collect(),
        }
    }
}

/// Serialized certificate: the map, then one record per problem.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CertificateRecord {
    pub kind: ProblemKind,
    pub max_dim: usize,
    pub map: MapFile,
    pub problems: Vec<ProblemRecord>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProblemRecord {
    pub n: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    pub top: BTreeMap<String, CellRef>,
    pub bottom: CellRef,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub filler: Option<CellRef>,
}

fn cref(x: &SimplicialSet, c: &Cell) -> CellRef {
    (c.word.values_usize(), x.name(c.base_dim(), c.base).to_string())
}

pub fn problem_record(p: &SimplicialMap, prob: &GeneratingProblem, filler: Option<&Cell>) -> ProblemRecord {
    let top = prob
        .top
        .source
        .nondeg_cells()
        .map(|(d, i)| (prob.top.source.name(d, i).to_string(), cref(&p.source, &prob.top.at(d, i))))
        .collect();
    ProblemRecord {
        n: prob.n,
        k: prob.k,
        top,
        bottom: cref(&p.target, &prob.bottom),
        filler: filler.map(|c| cref(&p.source, c)),
    }
}

/// A retract diagram `f → g → f`: the rows compose to identities and both squares
/// commute.
#[derive(Clone, Debug)]
pub struct RetractDiagram {
    pub f: SimplicialMap,
    pub g: SimplicialMap,
    pub top_in: SimplicialMap,
    pub top_out: SimplicialMap,
    pub bottom_in: SimplicialMap,
    pub bottom_out: SimplicialMap,
}

impl RetractDiagram {
    pub fn verify(&self) -> bool {
        let eq = |a: Result<SimplicialMap>, b: Result<SimplicialMap>| match (a, b) {
            (Ok(a), Ok(b)) => a.assignment == b.assignment,
            _ => false,
        };
        let id_top = SimplicialMap::identity(&self.f.source);
        let id_bot = SimplicialMap::identity(&self.f.target);
        eq(self.top_out.after(&self.top_in), Ok(id_top))
            && eq(self.bottom_out.after(&self.bottom_in), Ok(id_bot))
            && eq(self.g.after(&self.top_in), self.bottom_in.after(&self.f))
            && eq(self.f.after(&self.top_out), self.bottom_out.after(&self.g))
    }
}

/// For `f = p ∘ i` and a diagonal `h` of the square `(id, p)` from `i` to `f`
/// (so `h ∘ i = id` and `f ∘ h = p`), exhibits `f` as a retract of `p`.
pub fn retract_of_right(i: &SimplicialMap, p: &SimplicialMap, h: &SimplicialMap) -> Result<RetractDiagram> {
    let f = p.after(i)?;
    let d = RetractDiagram {
        top_in: i.clone(),
        top_out: h.clone(),
        bottom_in: SimplicialMap::identity(&f.target),
        bottom_out: SimplicialMap::identity(&f.target),
        g: p.clone(),
        f,
    };
    if d.verify() {
        Ok(d)
    } else {
        Err(Error::InvalidMorphism("h is not a diagonal of i against f".into()))
    }
}

/// For `f = p ∘ i` and a diagonal `h` of the square `(i, id)` from `f` to `p`
/// (so `h ∘ f = i` and `p ∘ h = id`), exhibits `f` as a retract of `i`.
pub fn retract_of_left(i: &SimplicialMap, p: &SimplicialMap, h: &SimplicialMap) -> Result<RetractDiagram> {
    let f = p.after(i)?;
    let d = RetractDiagram {
        top_in: SimplicialMap::identity(&f.source),
        top_out: SimplicialMap::identity(&f.source),
        bottom_in: h.clone(),
        bottom_out: p.clone(),
        g: i.clone(),
        f,
    };
    if d.verify() {
        Ok(d)
    } else {
        Err(Error::InvalidMorphism("h is not a diagonal of f against p".into()))
    }
}

/// Searches for the diagonal of `f = p ∘ i` against `p` and returns the retract of
/// `i`, when `p` lifts against `f`.
pub fn retract_via_lift(i: &SimplicialMap, p: &SimplicialMap) -> Result<Option<RetractDiagram>> {
    let f = p.after(i)?;
    let prob = LiftingProblem::new(f, p.clone(), i.clone(), SimplicialMap::identity(&p.target))?;
    match find_lift(&prob)? {
        Some(h) => Ok(Some(retract_of_left(i, p, &h)?)),
        None => Ok(None),
    }
}

/// The corner map `(A × Y) ∐_{A × X} (B × X) → B × Y` of `f: A → B` and `g: X → Y`.
#[derive(Clone, Debug)]
pub struct CornerProduct {
    pub map: SimplicialMap,
    pub codomain: Product,
}

pub fn corner_product(f: &SimplicialMap, g: &SimplicialMap) -> Result<CornerProduct> {
    if !f.is_levelwise_injective() || !g.is_levelwise_injective() {
        return Err(Error::NotInjective("corner products need two cofibrations".into()));
    }
    let (a, b, x, y) = (&f.source, &f.target, &g.source, &g.target);
    let ax = product(a, x)?;
    let ay = product(a, y)?;
    let bx = product(b, x)?;
    let by = product(b, y)?;
    let id = SimplicialMap::identity;
    let f_x = product_map(&ax, &bx, f, &id(x))?;
    let a_g = product_map(&ax, &ay, &id(a), g)?;
    let po = pushout(&f_x, &a_g)?;
    let b_g = product_map(&bx, &by, &id(b), g)?;
    let f_y = product_map(&ay, &by, f, &id(y))?;
    let map = po.mediator(&b_g, &f_y)?;
    Ok(CornerProduct { map, codomain: by })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::sync::Arc;
    use crate::sset::{boundary, horn, simplex};

    fn to_point(x: &Arc<SimplicialSet>) -> SimplicialMap {
        let pt = Arc::new(simplex(0));
        let asg = (0..=x.dim_bound())
            .map(|d| {
                (0..x.count(d))
                    .map(|_| Cell { word: crate::delta::OrdinalMap::constant(d + 1, 1, 0), base: 0 })
                    .collect()
            })
            .collect();
        SimplicialMap::new(x.clone(), pt, asg).unwrap()
    }

    #[test]
    fn identity_left_map_returns_top() {
        let x = Arc::new(horn(2, 0).unwrap());
        let p = to_point(&x);
        let top = SimplicialMap::identity(&x);
        let prob = LiftingProblem::new(top.clone(), p.clone(), top.clone(), p.clone()).unwrap();
        assert_eq!(find_lift(&prob).unwrap().unwrap(), top);
    }

    #[test]
    fn horn_against_simplex() {
        let (_, inc) = generator(GeneratorKind::Horn, 2, Some(1)).unwrap();
        let inc = inc.unwrap();
        let d2 = inc.target.clone();
        let p = to_point(&d2);
        let prob = LiftingProblem::new(inc.clone(), p, inc.clone(), to_point(&d2)).unwrap();
        let h = find_lift(&prob).unwrap().unwrap();
        assert!(prob.is_solution(&h));
        assert_eq!(h, SimplicialMap::identity(&d2));
    }

    #[test]
    fn no_lift_between_separate_points() {
        // Two vertices with no edge between them: the top hits both, so no diagonal.
        let (bd, inc) = generator(GeneratorKind::Boundary, 1, None).unwrap();
        let top = SimplicialMap::identity(&bd);
        let prob = LiftingProblem::new(inc.unwrap(), to_point(&bd), top, to_point(&simplex_arc(1))).unwrap();
        assert!(find_lift(&prob).unwrap().is_none());
    }

    fn simplex_arc(n: usize) -> Arc<SimplicialSet> {
        Arc::new(simplex(n))
    }

    #[test]
    fn certificates() {
        // Δ[2] is not Kan: the vertices 1 and 0 span no edge in that direction.
        let d2 = Arc::new(simplex(2));
        match trivial_fibration_certificate(&to_point(&d2), 2).unwrap() {
            CertificateOutcome::Failed(c) => assert_eq!(c.minimal.n, 1),
            CertificateOutcome::Certified(_) => panic!("Δ[2] has no edge from 1 to 0"),
        }
        // The nerve of the indiscrete category on two objects is contractible and Kan.
        let cat = crate::sset::FiniteCategory::from_poset(vec!["a".into(), "b".into()], |_, _| true);
        let e = crate::sset::Nerve::new(cat, 2).unwrap().set;
        let out = trivial_fibration_certificate(&to_point(&e), 2).unwrap();
        let cert = out.certificate().expect("indiscrete nerve is a trivial fibration up to dimension 2");
        assert!(cert.verify(&to_point(&e)).is_ok());
        assert!(fibration_certificate(&to_point(&e), 2).unwrap().certificate().is_some());
        let b = Arc::new(boundary(2));
        match trivial_fibration_certificate(&to_point(&b), 2).unwrap() {
            CertificateOutcome::Failed(c) => {
                assert_eq!(c.minimal.n, 1);
                assert!(c.first_per_dim.iter().any(|p| p.n == 2));
            }
            CertificateOutcome::Certified(_) => panic!("∂Δ[2] is not contractible"),
        }
        let id = SimplicialMap::identity(&b);
        assert!(fibration_certificate(&id, 2).unwrap().certificate().is_some());
    }

    #[test]
    fn retract_of_horn_inclusion() {
        let (h, inc) = generator(GeneratorKind::Horn, 2, Some(1)).unwrap();
        let inc = inc.unwrap();
        let d2 = inc.target.clone();
        let d1 = Arc::new(simplex(1));
        let pr = product(&d2, &d1).unwrap();
        let zero = |x: &Arc<SimplicialSet>| {
            let asg = (0..=x.dim_bound())
                .map(|d| {
                    (0..x.count(d))
                        .map(|_| Cell { word: crate::delta::OrdinalMap::constant(d + 1, 1, 0), base: 0 })
                        .collect()
                })
                .collect();
            SimplicialMap::new(x.clone(), d1.clone(), asg).unwrap()
        };
        let i = pr.mediator(&inc, &zero(&h)).unwrap();
        let p = pr.proj1.clone();
        let r = retract_via_lift(&i, &p).unwrap().expect("p lifts against the horn");
        assert!(r.verify());
        assert_eq!(r.f, inc);
    }

    #[test]
    fn corner_with_empty_is_the_other_map() {
        let (_, f) = generator(GeneratorKind::Boundary, 0, None).unwrap();
        let (_, g) = generator(GeneratorKind::Horn, 2, Some(1)).unwrap();
        let c = corner_product(&f.unwrap(), &g.unwrap()).unwrap();
        assert_eq!(c.map.source.nondeg_counts(), vec![3, 2]);
        assert!(c.map.is_levelwise_injective());
    }
}
