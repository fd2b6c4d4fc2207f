//! Moving lifting certificates from `f` to `Ex f`.
//!
//! A generating problem against `Ex f` transposes to a problem of
//! `Sd(generator)` against `f`. For a horn, `Sd Λ^k[n] ↪ Sd Δ[n]` carries a
//! P-structure, and the lift is built pair by pair in order of height, each pair
//! filled by the certificate for `f`. For a boundary, the relative cells are
//! filled one by one in dimension order.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use super::filler::{transpose_on_faces, vertex_faces};
use super::kpos::{initial_segment, Subset};
use super::object::ExObject;
use super::psi::in_horn;
use super::sd::SdSimplex;
use crate::delta::{combinations, injection_with_image};
use crate::error::{Error, Result};
use crate::lifting::{generators_up_to, FibrationCertificate, GeneratingProblem, ProblemKind, SolvedProblem};
use crate::pstructure::{search_pstructure, CellId, PStructure};
use crate::sset::{hom_set, simplex_map, vertex_name, Cell, SimplicialMap};

const SEARCH_LIMIT: usize = 200_000;

/// `Sd` of a generating inclusion, as a sub-object of `Sd Δ[n]`.
#[derive(Clone, Debug)]
pub struct SdGenerator {
    pub n: usize,
    pub k: Option<usize>,
    pub inclusion: SimplicialMap,
    /// Present for horns.
    pub structure: Option<PStructure>,
}

/// `Sd Λ^k[n] ↪ Sd Δ[n]` (or `Sd ∂Δ[n] ↪ Sd Δ[n]` when `k` is absent), with a
/// P-structure found by search in the horn case.
pub fn sd_generator(n: usize, k: Option<usize>) -> Result<SdGenerator> {
    let sds = SdSimplex::get(n);
    let keeps = |s: Subset| match k {
        Some(k) => in_horn(n, k, s),
        None => s != initial_segment(n),
    };
    let keep: Vec<Vec<bool>> = (0..=n)
        .map(|d| sds.range(d).map(|f| keeps(*sds.chain(f).last().expect("non-empty chain"))).collect())
        .collect();
    let (_, inclusion) = sds.set().subobject(&keep)?;
    let structure = match k {
        None => None,
        Some(k) => Some(
            search_pstructure(&inclusion, SEARCH_LIMIT)?
                .ok_or_else(|| Error::Internal(format!("no P-structure on Sd Λ^{k}[{n}] ↪ Sd Δ[{n}]")))?,
        ),
    };
    Ok(SdGenerator { n, k, inclusion, structure })
}

type ProblemKey = (usize, Option<usize>, Vec<Vec<Cell>>, Cell);

struct FillerTable {
    max_dim: usize,
    by_problem: HashMap<ProblemKey, Cell>,
    generators: HashMap<(usize, Option<usize>), SimplicialMap>,
}

impl FillerTable {
    fn new(cert: &FibrationCertificate) -> Result<FillerTable> {
        let by_problem = cert
            .entries
            .iter()
            .map(|e| ((e.problem.n, e.problem.k, e.problem.top.assignment.clone(), e.problem.bottom), e.filler))
            .collect();
        let generators = generators_up_to(cert.kind, cert.max_dim)?.into_iter().map(|(n, k, inc)| ((n, k), inc)).collect();
        Ok(FillerTable { max_dim: cert.max_dim, by_problem, generators })
    }

    /// Fills the generator `(m, k)` whose top map sends the face with vertex set
    /// `vs` of `Δ[m]` to `top(vs)`, over the bottom cell `bottom`.
    fn fill(&self, m: usize, k: Option<usize>, top: impl Fn(&[usize]) -> Cell, bottom: Cell) -> Result<Cell> {
        if m > self.max_dim {
            return Err(Error::Precondition(format!("certificate stops below dimension {m}")));
        }
        let inc = &self.generators[&(m, k)];
        let names: HashMap<String, Vec<usize>> = (1..=m + 1)
            .flat_map(|s| combinations(m + 1, s))
            .map(|vs| (vertex_name(&vs, m), vs))
            .collect();
        let src = &inc.source;
        let asg: Vec<Vec<Cell>> = (0..=src.dim_bound().min(m))
            .map(|d| (0..src.count(d) as u32).map(|i| top(&names[src.name(d, i)])).collect())
            .collect();
        let key = (m, k, asg, bottom);
        self.by_problem
            .get(&key)
            .copied()
            .ok_or_else(|| Error::Precondition(format!("certificate lacks a problem in dimension {m}")))
    }
}

/// Outcome of transporting a certificate.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct TransportReport {
    pub kind: ProblemKind,
    pub max_dim: usize,
    pub problems: usize,
    /// Type II cells of each `Sd Λ^k[n]` structure used, keyed `"n,k"`.
    pub structure_sizes: Vec<(String, usize)>,
    /// Index of the first transported filler failing replay, if any.
    pub failed_entry: Option<usize>,
}

#[derive(Clone, Debug)]
pub struct Transported {
    pub ex_x: ExObject,
    pub ex_y: ExObject,
    /// `Ex f`.
    pub map: SimplicialMap,
    pub certificate: FibrationCertificate,
    pub report: TransportReport,
}

/// Given a certificate for `f: X → Y`, builds one of the same kind and dimension
/// for `Ex f`.
pub fn transport_certificate(f: &SimplicialMap, cert: &FibrationCertificate) -> Result<Transported> {
    let table = FillerTable::new(cert)?;
    let max_dim = cert.max_dim;
    let ex_x = ExObject::new(&f.source, max_dim)?;
    let ex_y = ExObject::new(&f.target, max_dim)?;
    let map = ex_x.map(f, &ex_y)?;
    let mut entries = Vec::new();
    let mut structure_sizes = Vec::new();
    for (n, k, inc) in generators_up_to(cert.kind, max_dim)? {
        let gen = sd_generator(n, k)?;
        if let (Some(k), Some(ps)) = (k, &gen.structure) {
            structure_sizes.push((format!("{n},{k}"), ps.pairing.len()));
        }
        let faces = vertex_faces(&inc.source, n)?;
        let full = inc.target.clone();
        let bottoms: Vec<(Cell, SimplicialMap)> =
            ex_y.set.all_cells(n).into_iter().map(|c| (c, simplex_map(&full, &ex_y.set, &c))).collect();
        for top in hom_set(&inc.source, &ex_x.set)? {
            let over = map.after(&top)?;
            for (bottom, bmap) in &bottoms {
                if bmap.after(&inc)?.assignment != over.assignment {
                    continue;
                }
                let datum = lift_on_subdivision(&gen, &ex_x, &ex_y, &top, &faces, bottom, &table, f)?;
                let filler = ex_x.cell_of(n, &datum)?;
                entries.push(SolvedProblem { problem: GeneratingProblem { n, k, top: top.clone(), bottom: *bottom }, filler });
            }
        }
    }
    let certificate = FibrationCertificate { kind: cert.kind, max_dim, entries };
    let failed_entry = certificate.verify(&map).err();
    let report = TransportReport { kind: cert.kind, max_dim, problems: certificate.entries.len(), structure_sizes, failed_entry };
    Ok(Transported { ex_x, ex_y, map, certificate, report })
}

/// The transposed lift `Sd Δ[n] → X`, as a datum.
#[allow(clippy::too_many_arguments)]
fn lift_on_subdivision(
    gen: &SdGenerator,
    ex_x: &ExObject,
    ex_y: &ExObject,
    top: &SimplicialMap,
    faces: &HashMap<Subset, (usize, u32)>,
    bottom: &Cell,
    table: &FillerTable,
    f: &SimplicialMap,
) -> Result<Vec<Cell>> {
    let n = gen.n;
    let sds = SdSimplex::get(n);
    let nerve = sds.set().clone();
    let x = &ex_x.base;
    let below = ex_y.datum_of(bottom);
    let mut values: Vec<Option<Cell>> = vec![None; sds.len()];
    let src = &gen.inclusion.source;
    for d in 0..=src.dim_bound() {
        for a in 0..src.count(d) as u32 {
            let c = gen.inclusion.at(d, a);
            let flat = sds.flat(d, c.base);
            values[flat] = Some(transpose_on_faces(ex_x, top, faces, sds.chain(flat)));
        }
    }
    let flat_of = |c: CellId| sds.flat(c.0, c.1);
    let face_value = |values: &[Option<Cell>], y: CellId, vs: &[usize]| -> Cell {
        let c = nerve.act(&Cell::nondeg(y.0, y.1), &injection_with_image(vs, y.0 + 1).expect("face of a simplex"));
        values[sds.flat(c.dim(), c.base)].expect("faces are filled first")
    };
    match &gen.structure {
        Some(ps) => {
            for (u, y, i) in ps.attachment_order()? {
                let m = y.0;
                let filler = table.fill(m, Some(i), |vs| face_value(&values, y, vs), below[flat_of(y)])?;
                values[flat_of(u)] = Some(x.face(&filler, i)?);
                values[flat_of(y)] = Some(filler);
            }
        }
        None => {
            for flat in 0..sds.len() {
                if values[flat].is_some() {
                    continue;
                }
                let (m, idx) = sds.unflat(flat);
                let filler = table.fill(m, None, |vs| face_value(&values, (m, idx), vs), below[flat])?;
                values[flat] = Some(filler);
            }
        }
    }
    let datum: Vec<Cell> = values.into_iter().map(|v| v.expect("every cell is filled")).collect();
    debug_assert!(datum.iter().zip(&below).all(|(c, b)| f.apply(c) == *b));
    Ok(datum)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::sync::Arc;
    use crate::delta::OrdinalMap;
    use crate::lifting::{fibration_certificate, trivial_fibration_certificate};
    use crate::sset::{simplex, FiniteCategory, Morphism, Nerve, SimplicialSet};

    fn terminal(x: &Arc<SimplicialSet>) -> SimplicialMap {
        let pt = Arc::new(simplex(0));
        let asg = (0..=x.dim_bound()).map(|d| vec![Cell { word: OrdinalMap::constant(d + 1, 1, 0), base: 0 }; x.count(d)]).collect();
        SimplicialMap::new(x.clone(), pt, asg).unwrap()
    }

    /// The one-object category of the group of order two.
    fn involution() -> FiniteCategory {
        FiniteCategory {
            objects: vec!["*".into()],
            morphisms: vec![
                Morphism { name: "e".into(), source: 0, target: 0 },
                Morphism { name: "t".into(), source: 0, target: 0 },
            ],
            identities: vec![0],
            composition: vec![vec![Some(0), Some(1)], vec![Some(1), Some(0)]],
        }
    }

    #[test]
    fn subdivided_horns_carry_structures() {
        for n in 1..=2 {
            for k in 0..=n {
                let g = sd_generator(n, Some(k)).unwrap();
                let ps = g.structure.unwrap();
                assert!(ps.validate().unwrap().passed);
                assert!(g.inclusion.is_levelwise_injective());
                ps.compile().unwrap().replay().unwrap();
            }
        }
    }

    #[test]
    fn subdivided_boundary_has_no_structure() {
        let g = sd_generator(1, None).unwrap();
        assert!(search_pstructure(&g.inclusion, 1000).unwrap().is_none());
    }

    #[test]
    fn kan_fibration_transports() {
        let bz = Nerve::new(involution(), 2).unwrap().set;
        let f = terminal(&bz);
        let cert = fibration_certificate(&f, 2).unwrap();
        let cert = cert.certificate().expect("a group nerve is Kan");
        let t = transport_certificate(&f, cert).unwrap();
        assert_eq!(t.report.failed_entry, None);
        assert!(t.report.problems > 0);
        let direct = fibration_certificate(&t.map, 2).unwrap();
        assert_eq!(direct.certificate().unwrap().entries.len(), t.report.problems);
    }

    #[test]
    fn trivial_fibration_transports() {
        let cat = FiniteCategory::from_poset(vec!["a".into(), "b".into()], |_, _| true);
        let e = Nerve::new(cat, 2).unwrap().set;
        let f = terminal(&e);
        let cert = trivial_fibration_certificate(&f, 2).unwrap();
        let t = transport_certificate(&f, cert.certificate().unwrap()).unwrap();
        assert_eq!(t.report.failed_entry, None);
        assert!(t.report.problems > 0);
    }
}
