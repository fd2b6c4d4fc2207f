use std::collections::HashMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::{Cell, SetBuilder, SimplicialSet};
use crate::delta::OrdinalMap;
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Morphism {
    pub name: String,
    pub source: usize,
    pub target: usize,
}

/// A finite category given by its composition table.
///
/// `composition[g][f]` is `g ∘ f` whenever `target(f) = source(g)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FiniteCategory {
    pub objects: Vec<String>,
    pub morphisms: Vec<Morphism>,
    pub identities: Vec<usize>,
    pub composition: Vec<Vec<Option<usize>>>,
}

impl FiniteCategory {
    /// The poset on `names` ordered by `le`, one morphism per related pair.
    pub fn from_poset(names: Vec<String>, le: impl Fn(usize, usize) -> bool) -> Self {
        let n = names.len();
        let mut morphisms = Vec::new();
        let mut pair = vec![vec![usize::MAX; n]; n];
        for i in 0..n {
            for j in 0..n {
                if le(i, j) {
                    pair[i][j] = morphisms.len();
                    morphisms.push(Morphism { name: format!("{}<{}", names[i], names[j]), source: i, target: j });
                }
            }
        }
        let identities = (0..n).map(|i| pair[i][i]).collect();
        let m = morphisms.len();
        let mut composition = vec![vec![None; m]; m];
        for g in 0..m {
            for f in 0..m {
                if morphisms[f].target == morphisms[g].source {
                    let c = pair[morphisms[f].source][morphisms[g].target];
                    composition[g][f] = if c == usize::MAX { None } else { Some(c) };
                }
            }
        }
        FiniteCategory { objects: names, morphisms, identities, composition }
    }

    /// A chain `0 < 1 < … < n`.
    pub fn chain(n: usize) -> Self {
        Self::from_poset((0..=n).map(|i| i.to_string()).collect(), |i, j| i <= j)
    }

    pub fn is_identity(&self, m: usize) -> bool {
        self.identities[self.morphisms[m].source] == m
    }

    /// At most one morphism between any ordered pair and no non-trivial cycles.
    pub fn is_poset(&self) -> bool {
        let mut seen = std::collections::HashSet::new();
        for m in &self.morphisms {
            if !seen.insert((m.source, m.target)) {
                return false;
            }
            if m.source != m.target && seen.contains(&(m.target, m.source)) {
                return false;
            }
        }
        true
    }

    /// Checks identities, totality of composition, associativity and unit laws.
    pub fn validate(&self) -> Result<()> {
        let m = self.morphisms.len();
        let bad = |s: String| Err(Error::InvalidCategory(s));
        if self.identities.len() != self.objects.len() || self.composition.len() != m {
            return bad("table sizes disagree".into());
        }
        let mut names = std::collections::HashSet::new();
        for mo in &self.morphisms {
            if mo.source >= self.objects.len() || mo.target >= self.objects.len() {
                return bad(format!("{} has an unknown endpoint", mo.name));
            }
            if !names.insert(mo.name.clone()) {
                return bad(format!("duplicate morphism name {}", mo.name));
            }
        }
        for (o, &id) in self.identities.iter().enumerate() {
            if id >= m || self.morphisms[id].source != o || self.morphisms[id].target != o {
                return bad(format!("identity of object {o} is malformed"));
            }
        }
        for g in 0..m {
            if self.composition[g].len() != m {
                return bad("composition row has the wrong length".into());
            }
            for f in 0..m {
                let composable = self.morphisms[f].target == self.morphisms[g].source;
                match (composable, self.composition[g][f]) {
                    (true, Some(c)) => {
                        if c >= m
                            || self.morphisms[c].source != self.morphisms[f].source
                            || self.morphisms[c].target != self.morphisms[g].target
                        {
                            return bad(format!("{} ∘ {} has the wrong type", self.morphisms[g].name, self.morphisms[f].name));
                        }
                    }
                    (true, None) => return bad("composition is not total".into()),
                    (false, Some(_)) => return bad("composite of non-composable morphisms".into()),
                    (false, None) => {}
                }
            }
        }
        for f in 0..m {
            let (s, t) = (self.morphisms[f].source, self.morphisms[f].target);
            if self.composition[f][self.identities[s]] != Some(f) || self.composition[self.identities[t]][f] != Some(f) {
                return bad(format!("unit law fails for {}", self.morphisms[f].name));
            }
        }
        for f in 0..m {
            for g in 0..m {
                let Some(gf) = self.composition[g][f] else { continue };
                for h in 0..m {
                    let Some(hg) = self.composition[h][g] else { continue };
                    if self.composition[h][gf] != self.composition[hg][f] {
                        return bad("composition is not associative".into());
                    }
                }
            }
        }
        Ok(())
    }
}

/// The nerve of a finite category together with string-to-cell lookup.
#[derive(Clone, Debug)]
pub struct Nerve {
    pub category: FiniteCategory,
    pub set: Arc<SimplicialSet>,
    strings: Vec<HashMap<Vec<u32>, u32>>,
    by_index: Vec<Vec<Vec<u32>>>,
    pair: Option<Vec<Vec<u32>>>,
}

impl Nerve {
    /// Non-degenerate `d`-cells are strings of `d` composable non-identity morphisms.
    pub fn new(category: FiniteCategory, dim_bound: usize) -> Result<Nerve> {
        category.validate()?;
        let poset = category.is_poset();
        let nobj = category.objects.len();
        let mut outgoing: Vec<Vec<u32>> = vec![Vec::new(); nobj];
        for (i, m) in category.morphisms.iter().enumerate() {
            if !category.is_identity(i) {
                outgoing[m.source].push(i as u32);
            }
        }
        let mut layers: Vec<Vec<Vec<u32>>> = vec![Vec::new()];
        for d in 1..=dim_bound + 1 {
            let mut next = Vec::new();
            if d == 1 {
                for o in 0..nobj {
                    for &m in &outgoing[o] {
                        next.push(vec![m]);
                    }
                }
            } else {
                for s in &layers[d - 1] {
                    let end = category.morphisms[*s.last().unwrap() as usize].target;
                    for &m in &outgoing[end] {
                        let mut t = s.clone();
                        t.push(m);
                        next.push(t);
                    }
                }
            }
            layers.push(next);
        }
        let complete = layers[dim_bound + 1].is_empty();
        layers.truncate(dim_bound + 1);

        let mut nerve = Nerve {
            category,
            set: Arc::new(SimplicialSet::empty(0)),
            strings: vec![HashMap::new(); dim_bound + 1],
            by_index: vec![Vec::new(); dim_bound + 1],
            pair: None,
        };
        if poset {
            let mut pair = vec![vec![u32::MAX; nobj]; nobj];
            for (i, m) in nerve.category.morphisms.iter().enumerate() {
                pair[m.source][m.target] = i as u32;
            }
            nerve.pair = Some(pair);
        }
        let mut b = SetBuilder::new(dim_bound, complete);
        for o in 0..nobj {
            b.add_cell(0, nerve.category.objects[o].clone(), Vec::new())?;
        }
        for d in 1..=dim_bound {
            for s in &layers[d] {
                let faces = (0..=d).map(|i| nerve.face_of_string(s, i)).collect();
                let name = nerve.string_name(s, poset);
                let idx = b.add_cell(d, name, faces)?;
                nerve.strings[d].insert(s.clone(), idx);
                nerve.by_index[d].push(s.clone());
            }
        }
        nerve.set = Arc::new(b.build());
        Ok(nerve)
    }

    fn string_name(&self, s: &[u32], poset: bool) -> String {
        let c = &self.category;
        if poset {
            let mut parts = vec![c.objects[c.morphisms[s[0] as usize].source].clone()];
            parts.extend(s.iter().map(|&m| c.objects[c.morphisms[m as usize].target].clone()));
            parts.join("<")
        } else {
            s.iter().map(|&m| c.morphisms[m as usize].name.clone()).collect::<Vec<_>>().join(";")
        }
    }

    fn face_of_string(&self, s: &[u32], i: usize) -> Cell {
        let c = &self.category;
        let d = s.len();
        let mut objs: Vec<usize> = vec![c.morphisms[s[0] as usize].source];
        objs.extend(s.iter().map(|&m| c.morphisms[m as usize].target));
        let mut mors: Vec<usize> = s.iter().map(|&m| m as usize).collect();
        if i == 0 {
            objs.remove(0);
            mors.remove(0);
        } else if i == d {
            objs.pop();
            mors.pop();
        } else {
            let comp = c.composition[mors[i]][mors[i - 1]].expect("composable string");
            mors[i - 1] = comp;
            mors.remove(i);
            objs.remove(i);
        }
        self.cell_of(&objs, &mors)
    }

    /// Normal form of the simplex `objs[0] -> objs[1] -> …` along `mors`.
    pub fn cell_of(&self, objs: &[usize], mors: &[usize]) -> Cell {
        let d = mors.len();
        let mut word = vec![0usize; d + 1];
        let mut kept: Vec<u32> = Vec::new();
        for t in 1..=d {
            let ident = self.category.is_identity(mors[t - 1]);
            word[t] = word[t - 1] + usize::from(!ident);
            if !ident {
                kept.push(mors[t - 1] as u32);
            }
        }
        let w = OrdinalMap::new(d + 1, kept.len() + 1, &word).expect("compression word");
        if kept.is_empty() {
            Cell { word: w, base: objs[0] as u32 }
        } else {
            Cell { word: w, base: self.strings[kept.len()][&kept] }
        }
    }

    /// Normal form of a weakly increasing chain of elements (posets only).
    pub fn cell_of_chain(&self, chain: &[usize]) -> Cell {
        let pair = self.pair.as_ref().expect("cell_of_chain needs a poset");
        let mors: Vec<usize> = chain.windows(2).map(|w| pair[w[0]][w[1]] as usize).collect();
        debug_assert!(mors.iter().all(|&m| m != u32::MAX as usize), "chain is not increasing");
        self.cell_of(chain, &mors)
    }

    /// The elements of a non-degenerate cell of a poset nerve, bottom first.
    pub fn chain_of(&self, dim: usize, idx: u32) -> Vec<usize> {
        if dim == 0 {
            return vec![idx as usize];
        }
        let mut out = Vec::with_capacity(dim + 1);
        let c = &self.category;
        // Walk the faces: vertex t of the cell is the restriction along t.
        for t in 0..=dim {
            let v = self.set.act(&Cell::nondeg(dim, idx), &OrdinalMap::constant(1, dim + 1, t));
            out.push(v.base as usize);
        }
        debug_assert!(out.windows(2).all(|w| c.morphisms.iter().any(|m| m.source == w[0] && m.target == w[1])));
        out
    }

    /// The morphisms of a non-degenerate `d`-cell, first arrow first (`d ≥ 1`).
    pub fn string_of(&self, dim: usize, idx: u32) -> Vec<usize> {
        self.by_index[dim][idx as usize].iter().map(|&m| m as usize).collect()
    }

    pub fn is_poset(&self) -> bool {
        self.pair.is_some()
    }
}

/// The nerve of a finite category, truncated at `dim_bound`.
pub fn nerve(category: FiniteCategory, dim_bound: usize) -> Result<Nerve> {
    Nerve::new(category, dim_bound)
}
