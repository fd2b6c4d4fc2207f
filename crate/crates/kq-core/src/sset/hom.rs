use std::collections::HashMap;
use std::sync::Arc;

use super::{Cell, SimplicialMap, SimplicialSet};
use crate::error::{Error, Result};

/// Whether a map enumeration should keep going.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SearchControl {
    Continue,
    Stop,
}

/// All cells of a target, degenerate ones included, keyed by their face tuple.
#[derive(Clone, Debug)]
pub struct BoundaryIndex {
    pub target: Arc<SimplicialSet>,
    by_faces: Vec<HashMap<Vec<Cell>, Vec<Cell>>>,
}

impl BoundaryIndex {
    /// Indexes cells of dimension at most `max_dim`.
    pub fn new(target: &Arc<SimplicialSet>, max_dim: usize) -> Result<BoundaryIndex> {
        if max_dim > target.dim_bound() && !target.is_complete() {
            return Err(Error::Truncation(format!(
                "target is truncated at {} but dimension {max_dim} is needed",
                target.dim_bound()
            )));
        }
        let mut by_faces = Vec::with_capacity(max_dim + 1);
        for d in 0..=max_dim {
            let mut m: HashMap<Vec<Cell>, Vec<Cell>> = HashMap::new();
            for c in target.all_cells(d) {
                let key = if d == 0 { Vec::new() } else { (0..=d).map(|i| target.face(&c, i).unwrap()).collect() };
                m.entry(key).or_default().push(c);
            }
            by_faces.push(m);
        }
        Ok(BoundaryIndex { target: target.clone(), by_faces })
    }

    pub fn max_dim(&self) -> usize {
        self.by_faces.len() - 1
    }

    /// Cells of dimension `d` whose faces are exactly `faces`.
    pub fn fillers(&self, d: usize, faces: &[Cell]) -> &[Cell] {
        self.by_faces.get(d).and_then(|m| m.get(faces)).map_or(&[], |v| v.as_slice())
    }
}

struct Dfs<'a, F, V> {
    source: &'a SimplicialSet,
    index: &'a BoundaryIndex,
    order: Vec<(usize, u32)>,
    fixed: &'a [Vec<Option<Cell>>],
    filter: F,
    visit: V,
    asg: Vec<Vec<Cell>>,
}

impl<F, V> Dfs<'_, F, V>
where
    F: FnMut(usize, u32, &Cell) -> bool,
    V: FnMut(&[Vec<Cell>]) -> SearchControl,
{
    fn image(&self, c: &Cell) -> Cell {
        let img = self.asg[c.base_dim()][c.base as usize];
        if c.is_degenerate() {
            self.index.target.act(&img, &c.word)
        } else {
            img
        }
    }

    fn run(&mut self, pos: usize) -> SearchControl {
        if pos == self.order.len() {
            return (self.visit)(&self.asg);
        }
        let (d, i) = self.order[pos];
        let key: Vec<Cell> = self.source.faces_of(d, i).iter().map(|f| self.image(f)).collect();
        let pinned = self.fixed.get(d).and_then(|row| row.get(i as usize)).copied().flatten();
        let cands: Vec<Cell> = match pinned {
            Some(c) => {
                if self.index.fillers(d, &key).contains(&c) {
                    vec![c]
                } else {
                    Vec::new()
                }
            }
            None => self.index.fillers(d, &key).to_vec(),
        };
        for c in cands {
            if !(self.filter)(d, i, &c) {
                continue;
            }
            self.asg[d][i as usize] = c;
            if self.run(pos + 1) == SearchControl::Stop {
                return SearchControl::Stop;
            }
        }
        SearchControl::Continue
    }
}

/// Depth-first enumeration of maps `source → index.target`.
///
/// Non-degenerate source cells are assigned in order of dimension; candidates for a
/// cell are exactly the target cells with the already-determined boundary. `fixed`
/// pins individual cells (an empty slice pins nothing) and `filter` prunes
/// candidates. Returns `Stop` when `visit` asked to stop.
pub fn for_each_map(
    source: &SimplicialSet,
    index: &BoundaryIndex,
    fixed: &[Vec<Option<Cell>>],
    filter: impl FnMut(usize, u32, &Cell) -> bool,
    visit: impl FnMut(&[Vec<Cell>]) -> SearchControl,
) -> Result<SearchControl> {
    let top = source.top_dim().unwrap_or(0);
    if source.top_dim().is_some() && top > index.max_dim() {
        return Err(Error::Truncation(format!("index covers dimension {} but source reaches {top}", index.max_dim())));
    }
    let order: Vec<(usize, u32)> = source.nondeg_cells().collect();
    let asg = (0..=source.dim_bound()).map(|d| vec![Cell::nondeg(0, 0); source.count(d)]).collect();
    let mut dfs = Dfs { source, index, order, fixed, filter, visit, asg };
    Ok(dfs.run(0))
}

/// Every map `source → target`, in enumeration order.
pub fn hom_set(source: &Arc<SimplicialSet>, target: &Arc<SimplicialSet>) -> Result<Vec<SimplicialMap>> {
    let index = BoundaryIndex::new(target, source.top_dim().unwrap_or(0))?;
    let mut out = Vec::new();
    for_each_map(source, &index, &[], |_, _, _| true, |asg| {
        out.push(SimplicialMap::new_unchecked(source.clone(), target.clone(), asg.to_vec()));
        SearchControl::Continue
    })?;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sset::{boundary, horn, simplex};

    fn monotone_count(m: usize, n: usize) -> usize {
        // Monotone maps [m] → [n]: C(m + n + 1, m + 1).
        let (a, b) = (m + n + 1, m + 1);
        (0..b).fold(1usize, |acc, i| acc * (a - i) / (i + 1))
    }

    #[test]
    fn maps_between_simplices() {
        for m in 0..3 {
            for n in 0..3 {
                let h = hom_set(&Arc::new(simplex(m)), &Arc::new(simplex(n))).unwrap();
                assert_eq!(h.len(), monotone_count(m, n));
            }
        }
    }

    #[test]
    fn maps_into_a_horn() {
        // Δ[1] → Λ^1[2]: 3 constant + 2 edges.
        let h = hom_set(&Arc::new(simplex(1)), &Arc::new(horn(2, 1).unwrap())).unwrap();
        assert_eq!(h.len(), 5);
        let b = hom_set(&Arc::new(boundary(2)), &Arc::new(simplex(1))).unwrap();
        // Maps ∂Δ[2] → Δ[1] are all restrictions of Δ[2] → Δ[1].
        assert_eq!(b.len(), 4);
        for m in &b {
            m.check_faces().unwrap();
        }
    }

    #[test]
    fn pinning_and_stopping() {
        let d2 = Arc::new(simplex(2));
        let idx = BoundaryIndex::new(&d2, 1).unwrap();
        let d1 = simplex(1);
        let fixed = vec![vec![None, Some(Cell::nondeg(0, 2))], vec![None]];
        let mut n = 0;
        for_each_map(&d1, &idx, &fixed, |_, _, _| true, |_| {
            n += 1;
            SearchControl::Continue
        })
        .unwrap();
        assert_eq!(n, 3);
        let mut n = 0;
        let r = for_each_map(&d1, &idx, &[], |_, _, _| true, |_| {
            n += 1;
            SearchControl::Stop
        })
        .unwrap();
        assert_eq!((n, r), (1, SearchControl::Stop));
    }
}
