//! Monotone maps between finite ordinals.
//!
//! An ordinal `[n]` is always passed around by its size `n + 1`. Maps are stored as
//! dense value vectors inline, so an [`OrdinalMap`] is `Copy` and cheap to hash.
//! Ordinals larger than [`MAX_ORDINAL`] elements are rejected.

use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Largest supported ordinal size.
pub const MAX_ORDINAL: usize = 16;

/// A weakly increasing map `{0..domain_size} -> {0..codomain_size}`.
///
/// The derived ordering compares domain size, codomain size and then the value
/// vector lexicographically.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct OrdinalMap {
    dom: u8,
    cod: u8,
    vals: [u8; MAX_ORDINAL],
}

/// The unique factorization `f = mono ∘ epi`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct EpiMonoFactorization {
    pub epi: OrdinalMap,
    pub mono: OrdinalMap,
}

impl OrdinalMap {
    /// Builds a map after checking sizes, range and monotonicity.
    pub fn new(domain_size: usize, codomain_size: usize, values: &[usize]) -> Result<Self> {
        if domain_size == 0 || codomain_size == 0 {
            return Err(Error::InvalidMap("ordinals are non-empty".into()));
        }
        if domain_size > MAX_ORDINAL || codomain_size > MAX_ORDINAL {
            return Err(Error::InvalidMap(format!(
                "ordinal size exceeds the supported maximum {MAX_ORDINAL}"
            )));
        }
        if values.len() != domain_size {
            return Err(Error::InvalidMap(format!(
                "expected {domain_size} values, got {}",
                values.len()
            )));
        }
        let mut vals = [0u8; MAX_ORDINAL];
        for (i, &v) in values.iter().enumerate() {
            if v >= codomain_size {
                return Err(Error::InvalidMap(format!(
                    "value {v} outside codomain of size {codomain_size}"
                )));
            }
            if i > 0 && values[i - 1] > v {
                return Err(Error::InvalidMap(format!("not monotone: {values:?}")));
            }
            vals[i] = v as u8;
        }
        Ok(OrdinalMap { dom: domain_size as u8, cod: codomain_size as u8, vals })
    }

    /// Builds a surjection from its value list; the codomain is `max + 1`.
    pub fn surjection(values: &[usize]) -> Result<Self> {
        let cod = values.iter().copied().max().map(|m| m + 1).unwrap_or(0);
        let f = Self::new(values.len(), cod, values)?;
        if !f.is_surjective() {
            return Err(Error::NotSurjective(format!("{values:?}")));
        }
        Ok(f)
    }

    fn raw(domain_size: usize, codomain_size: usize, values: impl Iterator<Item = usize>) -> Self {
        let mut vals = [0u8; MAX_ORDINAL];
        for (i, v) in values.enumerate() {
            vals[i] = v as u8;
        }
        OrdinalMap { dom: domain_size as u8, cod: codomain_size as u8, vals }
    }

    pub fn identity(size: usize) -> Self {
        assert!(size >= 1 && size <= MAX_ORDINAL, "ordinal size out of range");
        Self::raw(size, size, 0..size)
    }

    /// The coface map of size `codomain_size - 1 -> codomain_size` skipping `i`.
    pub fn face_map(codomain_size: usize, i: usize) -> Self {
        assert!(codomain_size >= 2 && i < codomain_size, "face index out of range");
        Self::raw(codomain_size - 1, codomain_size, (0..codomain_size - 1).map(|t| if t < i { t } else { t + 1 }))
    }

    /// The codegeneracy of size `domain_size -> domain_size - 1` hitting `i` twice.
    pub fn degeneracy_map(domain_size: usize, i: usize) -> Self {
        assert!(domain_size >= 2 && i + 1 < domain_size, "degeneracy index out of range");
        Self::raw(domain_size, domain_size - 1, (0..domain_size).map(|t| if t <= i { t } else { t - 1 }))
    }

    /// The constant map with the given value.
    pub fn constant(domain_size: usize, codomain_size: usize, value: usize) -> Self {
        assert!(value < codomain_size);
        Self::raw(domain_size, codomain_size, std::iter::repeat(value).take(domain_size))
    }

    pub fn domain_size(&self) -> usize {
        self.dom as usize
    }

    pub fn codomain_size(&self) -> usize {
        self.cod as usize
    }

    /// Dimension of the domain, i.e. `domain_size - 1`.
    pub fn source_dim(&self) -> usize {
        self.dom as usize - 1
    }

    /// Dimension of the codomain.
    pub fn target_dim(&self) -> usize {
        self.cod as usize - 1
    }

    pub fn values(&self) -> &[u8] {
        &self.vals[..self.dom as usize]
    }

    pub fn values_usize(&self) -> Vec<usize> {
        self.values().iter().map(|&v| v as usize).collect()
    }

    #[inline]
    pub fn at(&self, i: usize) -> usize {
        debug_assert!(i < self.dom as usize);
        self.vals[i] as usize
    }

    pub fn is_injective(&self) -> bool {
        self.values().windows(2).all(|w| w[0] < w[1])
    }

    pub fn is_surjective(&self) -> bool {
        let v = self.values();
        v[0] == 0 && v[v.len() - 1] as usize == self.cod as usize - 1 && v.windows(2).all(|w| w[1] - w[0] <= 1)
    }

    pub fn is_identity(&self) -> bool {
        self.dom == self.cod && self.values().iter().enumerate().all(|(i, &v)| v as usize == i)
    }

    /// Sorted list of values hit by the map.
    pub fn image(&self) -> Vec<usize> {
        let mut out: Vec<usize> = Vec::with_capacity(self.dom as usize);
        for &v in self.values() {
            if out.last() != Some(&(v as usize)) {
                out.push(v as usize);
            }
        }
        out
    }

    /// Indices `i` with `f(i) = f(i+1)`, in decreasing order. Applying the
    /// codegeneracies in this order reproduces a surjection.
    pub fn degeneracy_indices(&self) -> Vec<usize> {
        let v = self.values();
        (0..v.len().saturating_sub(1)).rev().filter(|&i| v[i] == v[i + 1]).collect()
    }

    /// Values missed by the map, in increasing order. Applying the coface maps in
    /// this order reproduces an injection.
    pub fn face_indices(&self) -> Vec<usize> {
        let img = self.image();
        (0..self.cod as usize).filter(|x| img.binary_search(x).is_err()).collect()
    }

    /// The least section of a surjection: each value goes to the first element of its fiber.
    pub fn min_section(&self) -> Result<OrdinalMap> {
        if !self.is_surjective() {
            return Err(Error::NotSurjective(format!("{self:?}")));
        }
        let mut out = vec![0usize; self.cod as usize];
        for i in (0..self.dom as usize).rev() {
            out[self.at(i)] = i;
        }
        Ok(Self::raw(self.cod as usize, self.dom as usize, out.into_iter()))
    }
}

impl fmt::Debug for OrdinalMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}→{}]{:?}", self.dom, self.cod, self.values())
    }
}

impl fmt::Display for OrdinalMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

#[derive(Serialize, Deserialize)]
struct OrdinalMapRepr {
    domain_size: usize,
    codomain_size: usize,
    values: Vec<usize>,
}

impl Serialize for OrdinalMap {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        OrdinalMapRepr {
            domain_size: self.domain_size(),
            codomain_size: self.codomain_size(),
            values: self.values_usize(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for OrdinalMap {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let r = OrdinalMapRepr::deserialize(d)?;
        OrdinalMap::new(r.domain_size, r.codomain_size, &r.values).map_err(serde::de::Error::custom)
    }
}

/// Pointwise composite `f ∘ g`.
pub fn compose(f: &OrdinalMap, g: &OrdinalMap) -> Result<OrdinalMap> {
    if g.codomain_size() != f.domain_size() {
        return Err(Error::SizeMismatch(format!(
            "cannot compose {f:?} after {g:?}"
        )));
    }
    Ok(compose_unchecked(f, g))
}

#[inline]
pub(crate) fn compose_unchecked(f: &OrdinalMap, g: &OrdinalMap) -> OrdinalMap {
    debug_assert_eq!(g.cod, f.dom);
    let mut vals = [0u8; MAX_ORDINAL];
    for i in 0..g.dom as usize {
        vals[i] = f.vals[g.vals[i] as usize];
    }
    OrdinalMap { dom: g.dom, cod: f.cod, vals }
}

/// Unique factorization into a surjection followed by an injection.
pub fn epi_mono_factor(f: &OrdinalMap) -> EpiMonoFactorization {
    let mut epi = [0u8; MAX_ORDINAL];
    let mut mono = [0u8; MAX_ORDINAL];
    let mut rank = 0usize;
    mono[0] = f.vals[0];
    for i in 1..f.dom as usize {
        if f.vals[i] != f.vals[i - 1] {
            rank += 1;
            mono[rank] = f.vals[i];
        }
        epi[i] = rank as u8;
    }
    EpiMonoFactorization {
        epi: OrdinalMap { dom: f.dom, cod: (rank + 1) as u8, vals: epi },
        mono: OrdinalMap { dom: (rank + 1) as u8, cod: f.cod, vals: mono },
    }
}

/// All monotone `d` with `s ∘ d = id`, in lexicographic order of values.
pub fn sections(s: &OrdinalMap) -> Result<Vec<OrdinalMap>> {
    if !s.is_surjective() {
        return Err(Error::NotSurjective(format!("{s:?}")));
    }
    // A section picks one element from each fiber; fibers are consecutive intervals,
    // so any choice is automatically monotone.
    let mut fibers: Vec<Vec<usize>> = vec![Vec::new(); s.codomain_size()];
    for i in 0..s.domain_size() {
        fibers[s.at(i)].push(i);
    }
    let mut out = Vec::new();
    let mut pick = vec![0usize; fibers.len()];
    loop {
        out.push(OrdinalMap::raw(
            s.codomain_size(),
            s.domain_size(),
            pick.iter().enumerate().map(|(j, &p)| fibers[j][p]),
        ));
        let mut j = fibers.len();
        loop {
            if j == 0 {
                return Ok(out);
            }
            j -= 1;
            pick[j] += 1;
            if pick[j] < fibers[j].len() {
                break;
            }
            pick[j] = 0;
        }
    }
}

/// Returns the unique `j` with `s = j ∘ sigma` when it exists.
///
/// Existence is decided by fiber consistency: `sigma(i) = sigma(i')` must imply
/// `s(i) = s(i')`.
pub fn degeneracy_divides(sigma: &OrdinalMap, s: &OrdinalMap) -> Result<Option<OrdinalMap>> {
    if !sigma.is_surjective() || !s.is_surjective() {
        return Err(Error::NotSurjective(format!("{sigma:?} or {s:?}")));
    }
    if sigma.domain_size() != s.domain_size() {
        return Err(Error::SizeMismatch(format!("{sigma:?} and {s:?} have different domains")));
    }
    let mut j = vec![usize::MAX; sigma.codomain_size()];
    for i in 0..sigma.domain_size() {
        let slot = &mut j[sigma.at(i)];
        if *slot == usize::MAX {
            *slot = s.at(i);
        } else if *slot != s.at(i) {
            return Ok(None);
        }
    }
    Ok(Some(OrdinalMap::raw(sigma.codomain_size(), s.codomain_size(), j.into_iter())))
}

/// Every monotone map between the given sizes, in lexicographic order.
pub fn all_monotone(domain_size: usize, codomain_size: usize) -> Vec<OrdinalMap> {
    let mut out = Vec::new();
    let mut cur = vec![0usize; domain_size];
    fn rec(pos: usize, lo: usize, cur: &mut Vec<usize>, cod: usize, out: &mut Vec<OrdinalMap>) {
        if pos == cur.len() {
            out.push(OrdinalMap::raw(cur.len(), cod, cur.iter().copied()));
            return;
        }
        for v in lo..cod {
            cur[pos] = v;
            rec(pos + 1, v, cur, cod, out);
        }
    }
    rec(0, 0, &mut cur, codomain_size, &mut out);
    out
}

/// Every surjection between the given sizes, in lexicographic order.
pub fn surjections(domain_size: usize, codomain_size: usize) -> Vec<OrdinalMap> {
    if codomain_size > domain_size {
        return Vec::new();
    }
    // Choose which of the domain_size - 1 steps increment.
    let mut out = Vec::new();
    for steps in combinations(domain_size - 1, codomain_size - 1) {
        let mut v = 0usize;
        let mut vals = Vec::with_capacity(domain_size);
        vals.push(0);
        let mut si = 0;
        for t in 0..domain_size - 1 {
            if si < steps.len() && steps[si] == t {
                v += 1;
                si += 1;
            }
            vals.push(v);
        }
        out.push(OrdinalMap::raw(domain_size, codomain_size, vals.into_iter()));
    }
    out.sort();
    out
}

/// Every injection between the given sizes, in lexicographic order.
pub fn injections(domain_size: usize, codomain_size: usize) -> Vec<OrdinalMap> {
    combinations(codomain_size, domain_size)
        .into_iter()
        .map(|c| OrdinalMap::raw(domain_size, codomain_size, c.into_iter()))
        .collect()
}

/// The injection whose image is the given strictly increasing list.
pub fn injection_with_image(image: &[usize], codomain_size: usize) -> Result<OrdinalMap> {
    OrdinalMap::new(image.len(), codomain_size, image).and_then(|f| {
        if f.is_injective() {
            Ok(f)
        } else {
            Err(Error::InvalidMap(format!("{image:?} is not strictly increasing")))
        }
    })
}

/// `k`-element subsets of `0..n` in lexicographic order.
pub fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    if k > n {
        return out;
    }
    let mut cur: Vec<usize> = (0..k).collect();
    loop {
        out.push(cur.clone());
        let mut i = k;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if cur[i] < n - k + i {
                cur[i] += 1;
                for t in i + 1..k {
                    cur[t] = cur[t - 1] + 1;
                }
                break;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(d: usize, c: usize, v: &[usize]) -> OrdinalMap {
        OrdinalMap::new(d, c, v).unwrap()
    }

    #[test]
    fn compose_examples() {
        let d1 = OrdinalMap::face_map(3, 1);
        assert_eq!(compose(&OrdinalMap::identity(3), &d1).unwrap(), d1);
        let s0 = OrdinalMap::degeneracy_map(2, 0);
        let d0 = OrdinalMap::face_map(2, 0);
        assert_eq!(compose(&s0, &d0).unwrap(), OrdinalMap::identity(1));
        // σ^0: [2]→[1] then δ^0: [1]→[2].
        let s0_2 = OrdinalMap::degeneracy_map(3, 0);
        let d0_2 = OrdinalMap::face_map(3, 0);
        assert_eq!(compose(&d0_2, &s0_2).unwrap().values_usize(), vec![1, 1, 2]);
        assert!(compose(&d0_2, &d0_2).is_err());
    }

    #[test]
    fn factor_examples() {
        let f = m(2, 3, &[1, 1]);
        let em = epi_mono_factor(&f);
        assert_eq!(em.epi, OrdinalMap::degeneracy_map(2, 0));
        assert_eq!(em.mono, m(1, 3, &[1]));
        let d2 = OrdinalMap::face_map(3, 2);
        let em = epi_mono_factor(&d2);
        assert_eq!(em.epi, OrdinalMap::identity(2));
        assert_eq!(em.mono, d2);
    }

    #[test]
    fn section_examples() {
        let s0 = OrdinalMap::degeneracy_map(2, 0);
        let secs = sections(&s0).unwrap();
        assert_eq!(secs, vec![m(1, 2, &[0]), m(1, 2, &[1])]);
        assert_eq!(sections(&OrdinalMap::identity(4)).unwrap(), vec![OrdinalMap::identity(4)]);
        assert_eq!(sections(&m(3, 1, &[0, 0, 0])).unwrap().len(), 3);
        assert!(sections(&m(2, 3, &[0, 2])).is_err());
    }

    #[test]
    fn divides_examples() {
        let s = m(3, 2, &[0, 1, 1]);
        assert_eq!(degeneracy_divides(&OrdinalMap::identity(3), &s).unwrap(), Some(s));
        assert_eq!(
            degeneracy_divides(&OrdinalMap::degeneracy_map(2, 0), &OrdinalMap::identity(2)).unwrap(),
            None
        );
        let sigma = m(3, 2, &[0, 0, 1]);
        let to_point = m(3, 1, &[0, 0, 0]);
        assert_eq!(degeneracy_divides(&sigma, &to_point).unwrap(), Some(m(2, 1, &[0, 0])));
    }

    #[test]
    fn words_round_trip() {
        for f in all_monotone(4, 4) {
            let em = epi_mono_factor(&f);
            let mut s = OrdinalMap::identity(4);
            for j in em.epi.degeneracy_indices() {
                s = compose(&OrdinalMap::degeneracy_map(s.codomain_size(), j), &s).unwrap();
            }
            assert_eq!(s, em.epi);
            let mut d = OrdinalMap::identity(em.mono.domain_size());
            for i in em.mono.face_indices() {
                d = compose(&OrdinalMap::face_map(d.codomain_size() + 1, i), &d).unwrap();
            }
            assert_eq!(d, em.mono);
        }
    }

    #[test]
    fn enumeration_sizes() {
        // C(n+m-1, n) monotone maps from n points to m points.
        assert_eq!(all_monotone(3, 3).len(), 10);
        assert_eq!(surjections(4, 2).len(), 3);
        assert_eq!(injections(2, 4).len(), 6);
        assert!(surjections(4, 2).iter().all(|s| s.is_surjective()));
    }
}
