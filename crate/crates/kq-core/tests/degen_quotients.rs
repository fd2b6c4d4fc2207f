use std::sync::Arc;

use kq_core::degen::{
    collapse, dq_certificate, factor_degen, factors_through, is_sigma_degenerate, poset_retraction_quotient,
    pullback_preserves_dq_check, sigma_degenerate_by_faces, sigma_degenerate_by_word, CollapseDatum,
};
use kq_core::delta::{surjections, OrdinalMap};
use kq_core::ex::{kpos, max_map, sd, ExObject, JoinMap};
use kq_core::sset::{boundary, hom_set, horn, is_isomorphism, simplex, simplex_map, vertex_name, Cell, SimplicialMap, SimplicialSet};
use proptest::prelude::*;

fn delta(n: usize) -> Arc<SimplicialSet> {
    Arc::new(simplex(n))
}

fn face_of(n: usize, vs: &[usize]) -> Cell {
    let (d, i) = simplex(n).lookup(&vertex_name(vs, n)).unwrap();
    Cell::nondeg(d, i)
}

fn codegeneracy(n: usize, i: usize) -> SimplicialMap {
    let s = OrdinalMap::degeneracy_map(n + 2, i);
    simplex_map(&delta(n + 1), &delta(n), &Cell { word: s, base: 0 })
}

/// All `g` with `g ∘ p = f`, by enumerating `Hom(B, X)`.
fn factorizations_by_search(p: &SimplicialMap, f: &SimplicialMap) -> Vec<SimplicialMap> {
    hom_set(&p.target, &f.target)
        .unwrap()
        .into_iter()
        .filter(|g| g.after(p).unwrap().assignment == f.assignment)
        .collect()
}

/// `π` on the objects of `K[n]`, as indices.
fn retraction_of(n: usize, phi: impl Fn(u32) -> u32) -> Vec<usize> {
    let k = kpos(n);
    k.elements().map(|s| k.index(phi(s))).collect()
}

#[test]
fn sigma_degeneracy_routes_agree_exhaustively() {
    let corpus: Vec<SimplicialSet> =
        vec![simplex(3), simplex(4), boundary(3), horn(3, 1).unwrap(), sd(&delta(2)).unwrap().set.as_ref().clone()];
    let mut checked = 0;
    for x in &corpus {
        for d in 0..=x.dim_bound().min(4) {
            for c in x.all_cells(d) {
                for m in 0..=d {
                    for s in surjections(d + 1, m + 1) {
                        let a = sigma_degenerate_by_word(&c, &s).unwrap();
                        let b = sigma_degenerate_by_faces(x, &c, &s).unwrap();
                        assert_eq!(a, b, "{} against {:?}", x.describe(&c), s);
                        checked += 1;
                    }
                }
            }
        }
    }
    assert!(checked > 1000);
}

#[test]
fn max_map_is_its_own_quotient() {
    let m = max_map(1);
    assert!(dq_certificate(&m).unwrap().holds);
    let fac = factor_degen(&m).unwrap();
    assert!(is_isomorphism(&fac.detecting));
    assert_eq!(fac.quotient.target.nondeg_counts(), vec![2, 1]);
    for n in 2..=3 {
        let cert = dq_certificate(&max_map(n)).unwrap();
        assert!(cert.holds, "max map at {n}: {:?}", cert.failure);
    }
}

#[test]
fn constant_map_factors_through_max() {
    let m = max_map(1);
    let v1 = face_of(1, &[1]);
    let asg = (0..=m.source.dim_bound())
        .map(|d| vec![Cell { word: OrdinalMap::constant(d + 1, 1, 0), base: v1.base }; m.source.count(d)])
        .collect();
    let f = SimplicialMap::new(m.source.clone(), delta(1), asg).unwrap();
    let g = factors_through(&m, &f).unwrap().expect("condition (D) holds on both edges");
    assert_eq!(g.after(&m).unwrap(), f);
    // The identity of Sd Δ[1] does not factor: max collapses its edge {1} < {0,1}.
    assert!(factors_through(&m, &SimplicialMap::identity(&m.source)).unwrap().is_none());
}

#[test]
fn initial_segment_retraction_matches_max() {
    for n in 1..=3 {
        let k = kpos(n);
        let j0 = JoinMap::projection(n, 0);
        let q = poset_retraction_quotient(&k.category(), &retraction_of(n, |s| j0.apply(s)), n).unwrap();
        assert!(q.certificate.holds);
        let m = max_map(n);
        assert_eq!(q.target.set.nondeg_counts(), m.target.nondeg_counts());
        // Both are nerve maps into chains; compare them on vertices through the
        // order-isomorphism `[0..i] ↦ i`.
        let elems: Vec<u32> = k.elements().collect();
        for v in 0..q.source.set.count(0) as u32 {
            let obj = q.source.chain_of(0, v)[0];
            let image = q.target.chain_of(0, q.map.at(0, v).base)[0];
            let subset = elems[q.image[image]];
            assert_eq!(m.at(0, v), face_of(n, &[31 - subset.leading_zeros() as usize]), "vertex {}", elems[obj]);
        }
    }
}

#[test]
fn filtration_retractions_are_quotients() {
    for n in 1..=3 {
        let k = kpos(n);
        for level in 0..=n {
            let j = JoinMap::projection(n, level as isize);
            let q = poset_retraction_quotient(&k.category(), &retraction_of(n, |s| j.apply(s)), n).unwrap();
            assert!(q.certificate.holds, "j^{level}_{n}: {:?}", q.certificate.failure);
            if level == n {
                assert!(is_isomorphism(&q.map));
            }
        }
    }
}

#[test]
fn max_pulls_back_along_a_face() {
    let m = max_map(2);
    let delta1 = face_of(2, &[0, 2]);
    let face = simplex_map(&delta(1), &m.target, &delta1);
    let check = pullback_preserves_dq_check(&m, &face).unwrap();
    assert!(check.certificate.holds, "{:?}", check.certificate.failure);
    let check = pullback_preserves_dq_check(&codegeneracy(0, 0), &SimplicialMap::identity(&delta(0))).unwrap();
    assert!(check.certificate.holds);
    assert_eq!(check.pullback.set.nondeg_counts(), vec![2, 1]);
    assert!(is_isomorphism(&check.pullback.proj1));
}

#[test]
fn quotients_are_orthogonal_to_detecting_maps() {
    let collapsed = collapse(&delta(2), &[CollapseDatum { cell: Cell::nondeg(2, 0), sigma: OrdinalMap::degeneracy_map(3, 1) }]).unwrap();
    let quotients = vec![codegeneracy(0, 0), codegeneracy(1, 0), max_map(1), collapsed.quotient];
    let d2 = delta(2);
    let bd = Arc::new(boundary(2));
    let detecting = vec![
        SimplicialMap::identity(&d2),
        kq_core::sset::inclusion_by_name(&bd, &d2).unwrap(),
        kq_core::sset::inclusion_by_name(&Arc::new(horn(2, 1).unwrap()), &d2).unwrap(),
        SimplicialMap::identity(&delta(1)),
    ];
    let mut squares = 0;
    for p in &quotients {
        for q in &detecting {
            let tops = hom_set(&p.source, &q.source).unwrap();
            let bottoms = hom_set(&p.target, &q.target).unwrap();
            for u in &tops {
                for v in &bottoms {
                    if q.after(u).unwrap().assignment != v.after(p).unwrap().assignment {
                        continue;
                    }
                    let diagonals: Vec<_> = hom_set(&p.target, &q.source)
                        .unwrap()
                        .into_iter()
                        .filter(|h| h.after(p).unwrap() == *u && q.after(h).unwrap().assignment == v.assignment)
                        .collect();
                    assert_eq!(diagonals.len(), 1, "square {squares}");
                    assert_eq!(factors_through(p, u).unwrap().as_ref(), Some(&diagonals[0]));
                    squares += 1;
                }
            }
        }
    }
    assert!(squares >= 20, "only {squares} squares");
}

#[test]
fn condition_d_agrees_with_search() {
    let quotients = vec![codegeneracy(0, 0), codegeneracy(1, 0), codegeneracy(1, 1), max_map(1)];
    let targets = vec![delta(1), delta(2), Arc::new(boundary(2))];
    let mut instances = 0;
    for p in &quotients {
        let relative = p.source.total_nondeg();
        assert!(relative <= 10);
        for x in &targets {
            for f in hom_set(&p.source, x).unwrap() {
                let by_scan = factors_through(p, &f).unwrap();
                let by_search = factorizations_by_search(p, &f);
                assert!(by_search.len() <= 1);
                assert_eq!(by_scan, by_search.into_iter().next());
                instances += 1;
            }
        }
    }
    assert!(instances > 50);
}

#[test]
fn sigma_degeneracy_routes_agree_on_ex() {
    let ex = ExObject::new(&delta(1), 2).unwrap();
    for n in 1..=2 {
        for c in ex.set.all_cells(n) {
            for i in 0..n {
                let s = OrdinalMap::degeneracy_map(n + 1, i);
                let sigma = OrdinalMap::surjection(&s.values_usize()).unwrap();
                assert_eq!(is_sigma_degenerate(&ex.set, &c, &sigma).unwrap(), sigma_degenerate_by_word(&c, &sigma).unwrap());
            }
        }
    }
}

fn small_maps() -> Vec<SimplicialMap> {
    let mut out = Vec::new();
    for (a, b) in [(delta(2), delta(1)), (Arc::new(boundary(2)), delta(1)), (delta(1), delta(2)), (Arc::new(horn(2, 0).unwrap()), delta(1))] {
        out.extend(hom_set(&a, &b).unwrap());
    }
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn factorization_is_idempotent(pick in any::<prop::sample::Index>()) {
        let maps = small_maps();
        let f = pick.get(&maps);
        let fac = factor_degen(f).unwrap();
        prop_assert!(dq_certificate(&fac.quotient).unwrap().holds);
        let again = factor_degen(&fac.detecting).unwrap();
        prop_assert!(is_isomorphism(&again.quotient));
        prop_assert_eq!(fac.detecting.after(&fac.quotient).unwrap(), f.clone());
    }

    #[test]
    fn quotient_factors_its_own_map(pick in any::<prop::sample::Index>()) {
        let maps = small_maps();
        let f = pick.get(&maps);
        let fac = factor_degen(f).unwrap();
        let g = factors_through(&fac.quotient, f).unwrap();
        prop_assert_eq!(g, Some(fac.detecting.clone()));
    }
}
