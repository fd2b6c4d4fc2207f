use serde::{Deserialize, Serialize};

use crate::delta::{compose, OrdinalMap};
use crate::error::{Error, Result};
use crate::sset::FiniteCategory;

/// A non-empty subset of `{0..n}` as a bitmask.
pub type Subset = u32;

/// `max S`.
pub fn max_element(s: Subset) -> usize {
    31 - s.leading_zeros() as usize
}

pub fn min_element(s: Subset) -> usize {
    s.trailing_zeros() as usize
}

pub fn elements_of(s: Subset) -> Vec<usize> {
    (0..32).filter(|i| s >> i & 1 == 1).collect()
}

pub fn subset_of(elems: &[usize]) -> Subset {
    elems.iter().fold(0, |m, &i| m | 1 << i)
}

/// `{0..i}`.
pub fn initial_segment(i: usize) -> Subset {
    ((1u64 << (i + 1)) - 1) as Subset
}

pub fn is_subset(a: Subset, b: Subset) -> bool {
    a & !b == 0
}

/// Name of a subset, e.g. `{0,2}` is `02`.
pub fn subset_name(s: Subset, n: usize) -> String {
    crate::sset::vertex_name(&elements_of(s), n)
}

/// The poset of non-empty subsets of `{0..n}` under inclusion.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SubsetPoset {
    pub n: usize,
}

pub fn kpos(n: usize) -> SubsetPoset {
    SubsetPoset { n }
}

impl SubsetPoset {
    /// `2^{n+1} - 1` elements; element `S` sits at index `S - 1`, a linear extension
    /// of inclusion.
    pub fn len(&self) -> usize {
        (1usize << (self.n + 1)) - 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn elements(&self) -> impl Iterator<Item = Subset> {
        1..=(self.len() as Subset)
    }

    pub fn index(&self, s: Subset) -> usize {
        s as usize - 1
    }

    pub fn le(&self, a: Subset, b: Subset) -> bool {
        is_subset(a, b)
    }

    pub fn join(&self, a: Subset, b: Subset) -> Subset {
        a | b
    }

    pub fn top(&self) -> Subset {
        initial_segment(self.n)
    }

    pub fn category(&self) -> FiniteCategory {
        kpos_category(self.n)
    }
}

/// `K[n]` as a finite category.
pub fn kpos_category(n: usize) -> FiniteCategory {
    let p = kpos(n);
    let elems: Vec<Subset> = p.elements().collect();
    FiniteCategory::from_poset(elems.iter().map(|&s| subset_name(s, n)).collect(), |i, j| is_subset(elems[i], elems[j]))
}

/// A join-preserving map `K[source_n] → K[target_n]`, determined by its values on
/// singletons.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct JoinMap {
    pub source_n: usize,
    pub target_n: usize,
    pub singleton_values: Vec<Subset>,
}

impl JoinMap {
    pub fn new(source_n: usize, target_n: usize, singleton_values: Vec<Subset>) -> Result<JoinMap> {
        if singleton_values.len() != source_n + 1 {
            return Err(Error::SizeMismatch(format!("need {} singleton values", source_n + 1)));
        }
        let top = initial_segment(target_n);
        if singleton_values.iter().any(|&v| v == 0 || !is_subset(v, top)) {
            return Err(Error::InvalidMap("singleton values must be non-empty subsets of the target".into()));
        }
        Ok(JoinMap { source_n, target_n, singleton_values })
    }

    pub fn identity(n: usize) -> JoinMap {
        JoinMap { source_n: n, target_n: n, singleton_values: (0..=n).map(|i| 1 << i).collect() }
    }

    /// Direct image along a monotone map.
    pub fn direct_image(f: &OrdinalMap) -> JoinMap {
        JoinMap {
            source_n: f.source_dim(),
            target_n: f.target_dim(),
            singleton_values: f.values().iter().map(|&v| 1 << v).collect(),
        }
    }

    /// `{i} ↦ {i}` for `i ≤ k` and `{i} ↦ {0..i}` for `i > k`; `k = -1` sends
    /// every `{i}` to `{0..i}`.
    pub fn projection(n: usize, k: isize) -> JoinMap {
        let vals = (0..=n).map(|i| if (i as isize) <= k { 1 << i } else { initial_segment(i) }).collect();
        JoinMap { source_n: n, target_n: n, singleton_values: vals }
    }

    /// `K[n+1] → K[n]`: `{i} ↦ {i}` for `i ≤ k`, `{k+1} ↦ {0..k}`, `{i} ↦ {i-1}` above.
    pub fn contraction(n: usize, k: usize) -> JoinMap {
        let vals = (0..=n + 1)
            .map(|i| {
                if i <= k {
                    1 << i
                } else if i == k + 1 {
                    initial_segment(k)
                } else {
                    1 << (i - 1)
                }
            })
            .collect();
        JoinMap { source_n: n + 1, target_n: n, singleton_values: vals }
    }

    pub fn apply(&self, s: Subset) -> Subset {
        let mut out = 0;
        let mut rest = s;
        while rest != 0 {
            let i = rest.trailing_zeros() as usize;
            out |= self.singleton_values[i];
            rest &= rest - 1;
        }
        out
    }

    /// `self ∘ other`.
    pub fn after(&self, other: &JoinMap) -> JoinMap {
        assert_eq!(other.target_n, self.source_n, "join maps are not composable");
        JoinMap {
            source_n: other.source_n,
            target_n: self.target_n,
            singleton_values: other.singleton_values.iter().map(|&v| self.apply(v)).collect(),
        }
    }

    /// Values on every element of the source, in index order.
    pub fn table(&self) -> Vec<Subset> {
        kpos(self.source_n).elements().map(|s| self.apply(s)).collect()
    }

    pub fn is_idempotent(&self) -> bool {
        self.source_n == self.target_n && self.after(self) == *self
    }
}

/// `Sd` of the face `[n-1] → [n]` skipping `i`.
pub fn sd_face(n: usize, i: usize) -> JoinMap {
    JoinMap::direct_image(&OrdinalMap::face_map(n + 1, i))
}

/// `Sd` of the degeneracy `[n+1] → [n]` hitting `i` twice.
pub fn sd_degeneracy(n: usize, i: usize) -> JoinMap {
    JoinMap::direct_image(&OrdinalMap::degeneracy_map(n + 2, i))
}

/// `Sd` of an arbitrary monotone map.
pub fn sd_ordinal_map(f: &OrdinalMap) -> JoinMap {
    JoinMap::direct_image(f)
}

/// Functoriality check: `Sd(f ∘ g) = Sd f ∘ Sd g`.
pub fn sd_respects_composition(f: &OrdinalMap, g: &OrdinalMap) -> Result<bool> {
    Ok(sd_ordinal_map(&compose(f, g)?) == sd_ordinal_map(f).after(&sd_ordinal_map(g)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn operator_values() {
        let j = JoinMap::projection(2, 1);
        assert_eq!(j.apply(0b100), 0b111);
        assert_eq!(j.apply(0b110), 0b111);
        assert_eq!(j.apply(0b010), 0b010);
        let r = JoinMap::contraction(1, 0);
        assert_eq!(r.apply(0b100), 0b010);
        assert_eq!(r.apply(0b010), 0b001);
        assert_eq!(kpos(2).len(), 7);
        assert_eq!(max_element(0b101), 2);
    }

    #[test]
    fn direct_image_is_functorial() {
        let f = OrdinalMap::new(3, 2, &[0, 1, 1]).unwrap();
        let g = OrdinalMap::face_map(3, 0);
        assert!(sd_respects_composition(&f, &g).unwrap());
    }

    #[test]
    fn projections_are_idempotent() {
        for n in 0..5 {
            for k in -1..=n as isize {
                assert!(JoinMap::projection(n, k).is_idempotent());
            }
        }
    }
}
