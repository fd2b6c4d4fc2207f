//! A map `Sd² Δ[n] → Sd Λ^k[n]` extending `Sd` of the last-vertex map of the horn.
//!
//! Both ends are nerves of posets, so the map is a monotone assignment from chains
//! of `K[n]` (ordered by inclusion) to the faces of the horn. Chains inside the horn
//! are pinned to the set of their maxima; the rest is found by backtracking with
//! arc consistency. Solutions are cached in memory and, when `KQ_PSI_CACHE` names a
//! directory, on disk.

use std::collections::HashMap;
use std::path::PathBuf;
use std::sync::{Arc, Mutex, OnceLock};

use serde::{Deserialize, Serialize};

use super::kpos::{elements_of, initial_segment, is_subset, max_element, subset_name, subset_of, Subset};
use super::sd::{sd, SdSimplex, Subdivision};
use crate::error::{Error, Result};
use crate::sset::{FiniteCategory, Nerve, SimplicialMap};

/// Environment variable naming the on-disk cache directory.
pub const PSI_CACHE_ENV: &str = "KQ_PSI_CACHE";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PsiOrigin {
    Search,
    DiskCache,
}

#[derive(Clone, Debug)]
pub struct Psi {
    pub n: usize,
    pub k: usize,
    /// Value on each non-degenerate cell of `Sd Δ[n]`, by flat index.
    pub values: Vec<Subset>,
    pub origin: PsiOrigin,
    /// Search nodes visited (zero when loaded).
    pub nodes: usize,
}

#[derive(Serialize, Deserialize)]
struct PsiFile {
    n: usize,
    k: usize,
    values: Vec<PsiEntry>,
}

#[derive(Serialize, Deserialize)]
struct PsiEntry {
    chain: Vec<Vec<usize>>,
    value: Vec<usize>,
}

static PSI: OnceLock<Mutex<HashMap<(usize, usize), Arc<Psi>>>> = OnceLock::new();

/// Whether a subset spans a face of `Λ^k[n]`.
pub fn in_horn(n: usize, k: usize, s: Subset) -> bool {
    let top = initial_segment(n);
    s != top && s != top & !(1 << k)
}

fn maxima(chain: &[Subset]) -> Subset {
    chain.iter().fold(0, |a, &s| a | 1 << max_element(s))
}

/// Sub-chains obtained by deleting one element, as flat indices.
fn lower_covers(sd: &SdSimplex) -> Vec<Vec<usize>> {
    (0..sd.len())
        .map(|c| {
            let ch = sd.chain(c);
            if ch.len() < 2 {
                return Vec::new();
            }
            (0..ch.len())
                .map(|i| {
                    let mut sub = ch.to_vec();
                    sub.remove(i);
                    sd.locate(&sub).1
                })
                .collect()
        })
        .collect()
}

struct Search {
    q: Vec<Subset>,
    below: Vec<u64>,
    above: Vec<u64>,
    lower: Vec<Vec<usize>>,
    upper: Vec<Vec<usize>>,
    nodes: usize,
    limit: usize,
}

impl Search {
    fn supported(&self, doms: &[u64], v: usize, val: usize) -> bool {
        self.lower[v].iter().all(|&u| self.below[val] & doms[u] != 0)
            && self.upper[v].iter().all(|&u| self.above[val] & doms[u] != 0)
    }

    fn propagate(&self, doms: &mut [u64]) -> bool {
        let mut queue: Vec<usize> = (0..doms.len()).collect();
        let mut queued = vec![true; doms.len()];
        while let Some(v) = queue.pop() {
            queued[v] = false;
            let old = doms[v];
            let mut new = 0u64;
            let mut rest = old;
            while rest != 0 {
                let val = rest.trailing_zeros() as usize;
                rest &= rest - 1;
                if self.supported(doms, v, val) {
                    new |= 1 << val;
                }
            }
            if new == 0 {
                return false;
            }
            if new != old {
                doms[v] = new;
                for &u in self.lower[v].iter().chain(&self.upper[v]) {
                    if !queued[u] {
                        queued[u] = true;
                        queue.push(u);
                    }
                }
            }
        }
        true
    }

    fn solve(&mut self, mut doms: Vec<u64>) -> Option<Vec<u64>> {
        self.nodes += 1;
        if self.nodes > self.limit || !self.propagate(&mut doms) {
            return None;
        }
        let pick = (0..doms.len()).filter(|&v| doms[v].count_ones() > 1).min_by_key(|&v| doms[v].count_ones());
        let Some(v) = pick else { return Some(doms) };
        let mut rest = doms[v];
        while rest != 0 {
            let val = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            let mut next = doms.clone();
            next[v] = 1 << val;
            if let Some(s) = self.solve(next) {
                return Some(s);
            }
        }
        None
    }
}

impl Psi {
    /// Cached or searched solution for `(n, k)`.
    pub fn get(n: usize, k: usize) -> Result<Arc<Psi>> {
        if k > n || n == 0 {
            return Err(Error::Precondition(format!("no horn Λ^{k}[{n}]")));
        }
        let cache = PSI.get_or_init(Default::default);
        if let Some(p) = cache.lock().expect("cache lock").get(&(n, k)) {
            return Ok(p.clone());
        }
        let psi = match Psi::load(n, k) {
            Some(p) => p,
            None => {
                let p = Psi::search(n, k)?;
                p.store();
                p
            }
        };
        let psi = Arc::new(psi);
        Ok(cache.lock().expect("cache lock").entry((n, k)).or_insert(psi).clone())
    }

    /// Runs the search regardless of caches.
    pub fn search(n: usize, k: usize) -> Result<Psi> {
        let sd = SdSimplex::get(n);
        let q: Vec<Subset> = (1..=initial_segment(n)).filter(|&s| in_horn(n, k, s)).collect();
        if q.len() > 64 {
            return Err(Error::Precondition("horn too large for the search".into()));
        }
        let pos: HashMap<Subset, usize> = q.iter().enumerate().map(|(i, &s)| (s, i)).collect();
        let below = q.iter().map(|&s| q.iter().enumerate().filter(|(_, &t)| is_subset(t, s)).fold(0u64, |m, (i, _)| m | 1 << i)).collect();
        let above = q.iter().map(|&s| q.iter().enumerate().filter(|(_, &t)| is_subset(s, t)).fold(0u64, |m, (i, _)| m | 1 << i)).collect();
        let lower = lower_covers(&sd);
        let mut upper = vec![Vec::new(); sd.len()];
        for (c, subs) in lower.iter().enumerate() {
            for &s in subs {
                upper[s].push(c);
            }
        }
        let all = if q.len() == 64 { u64::MAX } else { (1u64 << q.len()) - 1 };
        let doms: Vec<u64> = (0..sd.len())
            .map(|c| {
                let ch = sd.chain(c);
                if ch.iter().all(|&s| in_horn(n, k, s)) {
                    1 << pos[&maxima(ch)]
                } else {
                    all
                }
            })
            .collect();
        let mut s = Search { q, below, above, lower, upper, nodes: 0, limit: 1_000_000 };
        let sol = s.solve(doms).ok_or_else(|| {
            Error::Internal(format!("no extension Sd²Δ[{n}] → SdΛ^{k}[{n}] after {} search nodes", s.nodes))
        })?;
        let values = sol.iter().map(|d| s.q[d.trailing_zeros() as usize]).collect();
        let psi = Psi { n, k, values, origin: PsiOrigin::Search, nodes: s.nodes };
        psi.check()?;
        Ok(psi)
    }

    /// Monotone on every inclusion of chains, inside the horn, and equal to the set of
    /// maxima on chains of horn faces.
    pub fn check(&self) -> Result<()> {
        let sd = SdSimplex::get(self.n);
        if self.values.len() != sd.len() {
            return Err(Error::SizeMismatch("one value per chain is required".into()));
        }
        for c in 0..sd.len() {
            let ch = sd.chain(c);
            let v = self.values[c];
            if v == 0 || !in_horn(self.n, self.k, v) {
                return Err(Error::Internal(format!("value {} is not a horn face", subset_name(v, self.n))));
            }
            if ch.iter().all(|&s| in_horn(self.n, self.k, s)) && v != maxima(ch) {
                return Err(Error::Internal("triangle with the last-vertex map fails".into()));
            }
        }
        for (c, subs) in lower_covers(&sd).iter().enumerate() {
            if subs.iter().any(|&s| !is_subset(self.values[s], self.values[c])) {
                return Err(Error::Internal("assignment is not monotone".into()));
            }
        }
        Ok(())
    }

    /// Value on an arbitrary strict chain of `K[n]`.
    pub fn at_chain(&self, chain: &[Subset]) -> Subset {
        self.values[SdSimplex::get(self.n).locate(chain).1]
    }

    /// The horn's face poset and its nerve `Sd Λ^k[n]`.
    pub fn horn_poset(&self) -> Result<(Vec<Subset>, Nerve)> {
        let q: Vec<Subset> = (1..=initial_segment(self.n)).filter(|&s| in_horn(self.n, self.k, s)).collect();
        let names = q.iter().map(|&s| subset_name(s, self.n)).collect();
        let cat = FiniteCategory::from_poset(names, |i, j| is_subset(q[i], q[j]));
        let nerve = Nerve::new(cat, self.n - 1)?;
        Ok((q, nerve))
    }

    /// The map `Sd(Sd Δ[n]) → Sd Λ^k[n]`, face compatibility checked.
    pub fn map(&self) -> Result<(Subdivision, SimplicialMap)> {
        let sd_n = SdSimplex::get(self.n);
        let sub = sd(sd_n.set())?;
        let (q, nerve) = self.horn_poset()?;
        let pos: HashMap<Subset, usize> = q.iter().enumerate().map(|(i, &s)| (s, i)).collect();
        let mut asg = Vec::new();
        for d in 0..=sub.set.dim_bound() {
            let mut row = Vec::new();
            for i in 0..sub.set.count(d) as u32 {
                let (p, x, chain) = sub.parts(d, i);
                let outer = sd_n.chain(sd_n.flat(p, x));
                let verts: Vec<usize> = chain
                    .iter()
                    .map(|&t| {
                        let part: Vec<Subset> = elements_of(t).into_iter().map(|e| outer[e]).collect();
                        pos[&self.at_chain(&part)]
                    })
                    .collect();
                row.push(nerve.cell_of_chain(&verts));
            }
            asg.push(row);
        }
        let m = SimplicialMap::new(sub.set.clone(), nerve.set.clone(), asg)?;
        Ok((sub, m))
    }

    fn cache_path(n: usize, k: usize) -> Option<PathBuf> {
        let dir = std::env::var_os(PSI_CACHE_ENV)?;
        Some(PathBuf::from(dir).join(format!("psi_{n}_{k}.json")))
    }

    fn load(n: usize, k: usize) -> Option<Psi> {
        let text = std::fs::read_to_string(Psi::cache_path(n, k)?).ok()?;
        let file: PsiFile = serde_json::from_str(&text).ok()?;
        if (file.n, file.k) != (n, k) {
            return None;
        }
        let sd = SdSimplex::get(n);
        let mut values = vec![0; sd.len()];
        for e in file.values {
            let chain: Vec<Subset> = e.chain.iter().map(|s| subset_of(s)).collect();
            if chain.is_empty() || chain.windows(2).any(|w| !is_subset(w[0], w[1]) || w[0] == w[1]) {
                return None;
            }
            let (w, c) = sd.locate(&chain);
            if !w.is_identity() {
                return None;
            }
            values[c] = subset_of(&e.value);
        }
        let psi = Psi { n, k, values, origin: PsiOrigin::DiskCache, nodes: 0 };
        psi.check().ok().map(|_| psi)
    }

    fn store(&self) {
        let Some(path) = Psi::cache_path(self.n, self.k) else { return };
        let sd = SdSimplex::get(self.n);
        let values = (0..sd.len())
            .map(|c| PsiEntry {
                chain: sd.chain(c).iter().map(|&s| elements_of(s)).collect(),
                value: elements_of(self.values[c]),
            })
            .collect();
        let file = PsiFile { n: self.n, k: self.k, values };
        if let Some(dir) = path.parent() {
            let _ = std::fs::create_dir_all(dir);
        }
        if let Ok(text) = serde_json::to_string_pretty(&file) {
            let _ = std::fs::write(path, text);
        }
    }
}

/// Shorthand for [`Psi::get`].
pub fn psi(n: usize, k: usize) -> Result<Arc<Psi>> {
    Psi::get(n, k)
}

/// The vertex of `Sd Λ^k[n]` a horn face maps to under `Sd` of the last-vertex map.
pub fn last_vertex_value(chain: &[Subset]) -> Subset {
    maxima(chain)
}
