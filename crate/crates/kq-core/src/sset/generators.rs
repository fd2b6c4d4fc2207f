use std::collections::HashMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::{Cell, SetBuilder, SimplicialMap, SimplicialSet};
use crate::delta::{combinations, injection_with_image};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GeneratorKind {
    Simplex,
    Boundary,
    Horn,
}

/// Name of the face of `Δ[n]` spanned by the given vertices.
pub fn vertex_name(vs: &[usize], n: usize) -> String {
    if n < 10 {
        vs.iter().map(|v| char::from(b'0' + *v as u8)).collect()
    } else {
        vs.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(",")
    }
}

/// The sub-complex of `Δ[n]` on the vertex sets accepted by `keep`, which must be
/// closed under taking subsets.
pub(crate) fn face_complex(n: usize, keep: impl Fn(&[usize]) -> bool) -> SimplicialSet {
    let mut kept: Vec<Vec<Vec<usize>>> = Vec::new();
    for d in 0..=n {
        kept.push(combinations(n + 1, d + 1).into_iter().filter(|c| keep(c)).collect());
    }
    let top = (0..=n).rev().find(|&d| !kept[d].is_empty()).unwrap_or(0);
    let mut b = SetBuilder::new(top, true);
    let mut index: HashMap<Vec<usize>, u32> = HashMap::new();
    for d in 0..=top {
        for c in &kept[d] {
            let faces = if d == 0 {
                Vec::new()
            } else {
                (0..=d)
                    .map(|i| {
                        let mut f = c.clone();
                        f.remove(i);
                        Cell::nondeg(d - 1, index[&f])
                    })
                    .collect()
            };
            let idx = b.add_cell(d, vertex_name(c, n), faces).expect("face complex cells are well formed");
            index.insert(c.clone(), idx);
        }
    }
    b.build()
}

/// The standard simplex `Δ[n]`.
pub fn simplex(n: usize) -> SimplicialSet {
    face_complex(n, |_| true)
}

/// The boundary `∂Δ[n]`.
pub fn boundary(n: usize) -> SimplicialSet {
    face_complex(n, |c| c.len() <= n)
}

/// The horn `Λ^k[n]`: every face except the top cell and the one opposite vertex `k`.
pub fn horn(n: usize, k: usize) -> Result<SimplicialSet> {
    if k > n {
        return Err(Error::Precondition(format!("horn index {k} exceeds {n}")));
    }
    Ok(face_complex(n, |c| c.len() <= n && !(c.len() == n && !c.contains(&k))))
}

/// A generating object and, for boundaries and horns, its inclusion into `Δ[n]`.
pub fn generator(kind: GeneratorKind, n: usize, k: Option<usize>) -> Result<(Arc<SimplicialSet>, Option<SimplicialMap>)> {
    let full = Arc::new(simplex(n));
    let sub = match kind {
        GeneratorKind::Simplex => return Ok((full, None)),
        GeneratorKind::Boundary => boundary(n),
        GeneratorKind::Horn => {
            let k = k.ok_or_else(|| Error::Precondition("horn needs an index k".into()))?;
            horn(n, k)?
        }
    };
    let sub = Arc::new(sub);
    let inc = inclusion_by_name(&sub, &full)?;
    Ok((sub, Some(inc)))
}

/// The inclusion of a sub-object whose non-degenerate cells reuse the target's names.
pub fn inclusion_by_name(sub: &Arc<SimplicialSet>, full: &Arc<SimplicialSet>) -> Result<SimplicialMap> {
    let mut asg = Vec::new();
    for d in 0..=sub.dim_bound() {
        let mut row = Vec::new();
        for name in sub.names(d) {
            let (fd, fi) = full
                .lookup(name)
                .ok_or_else(|| Error::InvalidMorphism(format!("{name} missing from target")))?;
            if fd != d {
                return Err(Error::InvalidMorphism(format!("{name} changes dimension")));
            }
            row.push(Cell::nondeg(d, fi));
        }
        asg.push(row);
    }
    SimplicialMap::new(sub.clone(), full.clone(), asg)
}

/// The cell of `simplex(n)` with the given weakly increasing vertex list.
pub fn simplex_cell(n: usize, vertices: &[usize]) -> Result<Cell> {
    let word_vals: Vec<usize> = vertices.to_vec();
    let w = crate::delta::OrdinalMap::new(vertices.len(), n + 1, &word_vals)?;
    let em = crate::delta::epi_mono_factor(&w);
    let image = em.mono.values_usize();
    let idx = combinations(n + 1, image.len())
        .iter()
        .position(|c| *c == image)
        .expect("image is a vertex subset");
    Ok(Cell { word: em.epi, base: idx as u32 })
}

/// The map `Δ[n] → target` classifying an `n`-cell; `source` must be `simplex(n)`.
pub fn simplex_map(source: &Arc<SimplicialSet>, target: &Arc<SimplicialSet>, cell: &Cell) -> SimplicialMap {
    let n = cell.dim();
    let asg = (0..=source.dim_bound())
        .map(|d| {
            combinations(n + 1, d + 1)
                .iter()
                .map(|c| target.act(cell, &injection_with_image(c, n + 1).expect("vertex subsets are injections")))
                .collect()
        })
        .collect();
    SimplicialMap::new_unchecked(source.clone(), target.clone(), asg)
}
