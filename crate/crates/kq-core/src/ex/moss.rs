//! Exhaustive check of the eleven identities between the projections
//! `j^k_n = JoinMap::projection(n, k)`, the contractions `r^k_n =
//! JoinMap::contraction(n, k)` and subdivided faces and degeneracies.

use serde::{Deserialize, Serialize};

use super::kpos::{elements_of, kpos, sd_degeneracy as s, sd_face as d, JoinMap};

fn j(n: usize, k: isize) -> JoinMap {
    JoinMap::projection(n, k)
}

fn r(n: usize, k: usize) -> JoinMap {
    JoinMap::contraction(n, k)
}

/// Composite `fs[0] ∘ fs[1] ∘ …`.
fn chain(fs: &[JoinMap]) -> JoinMap {
    let mut out = fs.last().expect("non-empty composite").clone();
    for f in fs.iter().rev().skip(1) {
        out = f.after(&out);
    }
    out
}

pub const FORMULAS: [&str; 11] = [
    "j^k j^h = j^h j^k = j^h  (h <= k <= n)",
    "r^k Sd d^{k+1} = id  (k <= n)",
    "j^k r^k = Sd s^k j^k  (k <= n)",
    "j^h r^k = j^h Sd s^k  (h < k <= n)",
    "r^k j^h = j^h r^k  (h <= k <= n)",
    "r^k Sd d^{i+1} = Sd d^i r^k  (k < i <= n)",
    "j^k r^k r^k = j^k r^k Sd s^{k+1}  (k <= n)",
    "j^k Sd d^h j^k = j^k Sd d^h  (k <= n, h <= n+1)",
    "j^k r^k Sd d^i j^{k-1} = j^k r^k Sd d^i  (i <= k <= n)",
    "Sd s^h j^k r^k = j^{k-1} r^{k-1} Sd s^h  (h < k <= n+1)",
    "Sd s^h j^k r^k = j^k r^k Sd s^{h+1}  (k <= h <= n)",
];

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MossMismatch {
    pub n: usize,
    pub k: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub h: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub i: Option<usize>,
    pub element: Vec<usize>,
    pub lhs: Vec<usize>,
    pub rhs: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EquationResult {
    pub equation: usize,
    pub formula: String,
    pub instances: usize,
    pub evaluations: usize,
    pub mismatches: Vec<MossMismatch>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MossReport {
    pub max_n: usize,
    pub equations: Vec<EquationResult>,
}

impl MossReport {
    pub fn passed(&self) -> bool {
        self.equations.iter().all(|e| e.mismatches.is_empty())
    }

    /// Combines per-`n` reports in order.
    pub fn merge(parts: Vec<MossReport>) -> MossReport {
        let mut equations = empty_results();
        let mut max_n = 0;
        for p in parts {
            max_n = max_n.max(p.max_n);
            for (acc, e) in equations.iter_mut().zip(p.equations) {
                acc.instances += e.instances;
                acc.evaluations += e.evaluations;
                acc.mismatches.extend(e.mismatches);
            }
        }
        MossReport { max_n, equations }
    }
}

fn empty_results() -> Vec<EquationResult> {
    FORMULAS
        .iter()
        .enumerate()
        .map(|(e, f)| EquationResult {
            equation: e + 1,
            formula: f.to_string(),
            instances: 0,
            evaluations: 0,
            mismatches: Vec::new(),
        })
        .collect()
}

struct Checker {
    results: Vec<EquationResult>,
}

impl Checker {
    fn check(&mut self, eq: usize, (n, k, h, i): (usize, usize, Option<usize>, Option<usize>), lhs: JoinMap, rhs: JoinMap) {
        assert_eq!((lhs.source_n, lhs.target_n), (rhs.source_n, rhs.target_n), "equation {eq} sides differ in type");
        let res = &mut self.results[eq - 1];
        res.instances += 1;
        for s in kpos(lhs.source_n).elements() {
            res.evaluations += 1;
            let (a, b) = (lhs.apply(s), rhs.apply(s));
            if a != b {
                res.mismatches.push(MossMismatch {
                    n,
                    k,
                    h,
                    i,
                    element: elements_of(s),
                    lhs: elements_of(a),
                    rhs: elements_of(b),
                });
            }
        }
    }
}

/// Every instance of the eleven identities whose index `n` equals the given one,
/// evaluated on every element of the domain.
pub fn verify_moss_at(n: usize) -> MossReport {
    let mut c = Checker { results: empty_results() };
    let ki = |k: usize| k as isize;
    for k in 0..=n {
        for h in 0..=k {
            c.check(1, (n, k, Some(h), None), j(n, ki(k)).after(&j(n, ki(h))), j(n, ki(h)));
            c.check(1, (n, k, Some(h), None), j(n, ki(h)).after(&j(n, ki(k))), j(n, ki(h)));
        }
        c.check(2, (n, k, None, None), r(n, k).after(&d(n + 1, k + 1)), JoinMap::identity(n));
        c.check(3, (n, k, None, None), j(n, ki(k)).after(&r(n, k)), s(n, k).after(&j(n + 1, ki(k))));
        for h in 0..k {
            c.check(4, (n, k, Some(h), None), j(n, ki(h)).after(&r(n, k)), j(n, ki(h)).after(&s(n, k)));
        }
        for h in 0..=k {
            c.check(5, (n, k, Some(h), None), r(n, k).after(&j(n + 1, ki(h))), j(n, ki(h)).after(&r(n, k)));
        }
        for i in k + 1..=n {
            c.check(6, (n, k, None, Some(i)), r(n, k).after(&d(n + 1, i + 1)), d(n, i).after(&r(n - 1, k)));
        }
        c.check(
            7,
            (n, k, None, None),
            chain(&[j(n, ki(k)), r(n, k), r(n + 1, k)]),
            chain(&[j(n, ki(k)), r(n, k), s(n + 1, k + 1)]),
        );
        for h in 0..=n + 1 {
            c.check(
                8,
                (n, k, Some(h), None),
                chain(&[j(n + 1, ki(k)), d(n + 1, h), j(n, ki(k))]),
                chain(&[j(n + 1, ki(k)), d(n + 1, h)]),
            );
        }
        for i in 0..=k {
            c.check(
                9,
                (n, k, None, Some(i)),
                chain(&[j(n, ki(k)), r(n, k), d(n + 1, i), j(n, ki(k) - 1)]),
                chain(&[j(n, ki(k)), r(n, k), d(n + 1, i)]),
            );
        }
    }
    for k in 0..=n + 1 {
        for h in 0..k {
            c.check(
                10,
                (n, k, Some(h), None),
                chain(&[s(n, h), j(n + 1, ki(k)), r(n + 1, k)]),
                chain(&[j(n, ki(k) - 1), r(n, k - 1), s(n + 1, h)]),
            );
        }
    }
    for k in 0..=n {
        for h in k..=n {
            c.check(
                11,
                (n, k, Some(h), None),
                chain(&[s(n, h), j(n + 1, ki(k)), r(n + 1, k)]),
                chain(&[j(n, ki(k)), r(n, k), s(n + 1, h + 1)]),
            );
        }
    }
    MossReport { max_n: n, equations: c.results }
}

/// All identities for every `n ≤ max_n`.
pub fn verify_moss(max_n: usize) -> MossReport {
    MossReport::merge((0..=max_n).map(verify_moss_at).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identities_hold_up_to_four() {
        let rep = verify_moss(4);
        assert!(rep.passed(), "{:?}", rep.equations.iter().filter(|e| !e.mismatches.is_empty()).collect::<Vec<_>>());
        assert!(rep.equations.iter().all(|e| e.instances > 0));
    }

    #[test]
    fn wrong_identity_is_caught() {
        let mut c = Checker { results: empty_results() };
        c.check(1, (2, 1, Some(0), None), j(2, 0), j(2, 1));
        let m = &c.results[0].mismatches;
        assert!(!m.is_empty());
        assert_eq!(m[0].element, vec![1]);
    }

    #[test]
    fn single_instance() {
        // r^0_1 ∘ Sd d^1 sends {1} to {2} and then to {1}.
        assert_eq!(d(2, 1).apply(0b10), 0b100);
        assert_eq!(r(1, 0).apply(0b100), 0b10);
    }
}
