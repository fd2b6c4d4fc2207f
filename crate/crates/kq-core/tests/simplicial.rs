use std::sync::Arc;

use kq_core::delta::{all_monotone, compose, epi_mono_factor, OrdinalMap};
use kq_core::ex::sd;
use kq_core::lifting::{fibration_certificate, find_lift, CertificateOutcome, LiftingProblem};
use kq_core::sset::{
    boundary, hom_set, horn, inclusion_by_name, product, pullback, simplex, simplex_map, Cell, MapFile, SetFile, SimplicialMap,
    SimplicialSet,
};
use proptest::prelude::*;
use proptest::sample::Index;

fn corpus() -> Vec<SimplicialSet> {
    let d1 = Arc::new(simplex(1));
    vec![
        simplex(3),
        boundary(3),
        horn(3, 2).unwrap(),
        sd(&Arc::new(simplex(2))).unwrap().set.as_ref().clone(),
        product(&d1, &d1).unwrap().set.as_ref().clone(),
    ]
}

fn terminal(x: &Arc<SimplicialSet>) -> SimplicialMap {
    let asg = (0..=x.dim_bound()).map(|d| vec![Cell { word: OrdinalMap::constant(d + 1, 1, 0), base: 0 }; x.count(d)]).collect();
    SimplicialMap::new(x.clone(), Arc::new(simplex(0)), asg).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn operators_compose(which in 0usize..5, cell in any::<Index>(), k in 0usize..4, l in 0usize..4, t in any::<Index>(), p in any::<Index>()) {
        let x = &corpus()[which];
        let d = (0..=x.dim_bound()).filter(|&d| x.count(d) > 0).max().unwrap();
        let cells = x.all_cells(d);
        let c = cell.get(&cells);
        let thetas = all_monotone(k + 1, d + 1);
        let phis = all_monotone(l + 1, k + 1);
        let theta = t.get(&thetas);
        let phi = p.get(&phis);
        let stepwise = x.act(&x.act(c, theta), phi);
        let at_once = x.act(c, &compose(theta, phi).unwrap());
        prop_assert_eq!(stepwise, at_once);
    }

    #[test]
    fn epi_mono_recomposes(a in 1usize..6, b in 1usize..6, pick in any::<Index>()) {
        let maps = all_monotone(a, b);
        let f = pick.get(&maps);
        let em = epi_mono_factor(f);
        prop_assert!(em.epi.is_surjective() && em.mono.is_injective());
        prop_assert_eq!(&compose(&em.mono, &em.epi).unwrap(), f);
    }

    #[test]
    fn maps_are_simplicial(which in 0usize..3, pick in any::<Index>()) {
        let (a, b) = [(simplex(2), simplex(1)), (boundary(2), horn(2, 1).unwrap()), (horn(2, 0).unwrap(), simplex(2))][which].clone();
        let maps = hom_set(&Arc::new(a), &Arc::new(b)).unwrap();
        prop_assume!(!maps.is_empty());
        let f = pick.get(&maps);
        prop_assert!(f.check_faces().is_ok());
        prop_assert_eq!(&SimplicialMap::identity(&f.target).after(f).unwrap(), f);
        let file = MapFile::from_json(&MapFile::inline(f).to_json()).unwrap();
        prop_assert_eq!(&file.to_map_between(f.source.clone(), f.target.clone()).unwrap(), f);
    }
}

#[test]
fn set_files_round_trip() {
    for x in corpus() {
        x.validate().unwrap();
        let back = SetFile::from_json(&SetFile::from_set(&x).to_json()).unwrap().to_set().unwrap();
        assert_eq!(back, x);
    }
}

#[test]
fn product_and_pullback_counts() {
    let d1 = Arc::new(simplex(1));
    let d2 = Arc::new(simplex(2));
    assert_eq!(product(&d1, &d1).unwrap().set.nondeg_counts(), vec![4, 5, 2]);
    assert_eq!(product(&d1, &d2).unwrap().set.nondeg_counts(), vec![6, 12, 10, 3]);
    let inc = inclusion_by_name(&Arc::new(boundary(2)), &d2).unwrap();
    let pb = pullback(&SimplicialMap::identity(&d2), &inc).unwrap();
    assert_eq!(pb.set.nondeg_counts(), vec![3, 3]);
}

#[test]
fn interval_is_not_kan() {
    let d1 = Arc::new(simplex(1));
    let p = terminal(&d1);
    match fibration_certificate(&p, 2).unwrap() {
        CertificateOutcome::Failed(cx) => {
            let g = cx.minimal;
            let (src, left) = kq_core::sset::generator(kq_core::sset::GeneratorKind::Horn, g.n, g.k).unwrap();
            let left = left.unwrap();
            let target = left.target.clone();
            let bottom = terminal(&target);
            let problem = LiftingProblem::new(left, p.clone(), g.top.clone(), bottom).unwrap();
            assert!(src.total_nondeg() > 0);
            assert!(find_lift(&problem).unwrap().is_none());
        }
        CertificateOutcome::Certified(_) => panic!("Δ[1] has an unfillable horn"),
    }
    let point = Arc::new(simplex(0));
    let cert = fibration_certificate(&terminal(&point), 3).unwrap();
    let c = cert.certificate().expect("a point is Kan");
    assert!(c.verify(&terminal(&point)).is_ok());
}

#[test]
fn simplex_maps_classify_cells() {
    let d3 = Arc::new(simplex(3));
    for c in d3.all_cells(2) {
        let f = simplex_map(&Arc::new(simplex(2)), &d3, &c);
        assert_eq!(f.at(2, 0), c);
    }
}
