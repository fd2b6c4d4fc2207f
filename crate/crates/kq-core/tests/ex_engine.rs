use std::sync::Arc;

use kq_core::delta::{all_monotone, compose};
use kq_core::ex::{precompose, sd_simplex, ExObject, JoinMap};
use kq_core::ex::kpos::sd_ordinal_map;
use kq_core::sset::{boundary, hom_set, horn, simplex, SimplicialSet};
use proptest::prelude::*;
use proptest::sample::Index;

fn base(which: usize) -> Arc<SimplicialSet> {
    Arc::new([simplex(1), boundary(2), horn(2, 0).unwrap()][which].clone())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn subdivision_is_functorial(a in 1usize..4, b in 1usize..4, c in 1usize..4, f in any::<Index>(), g in any::<Index>()) {
        let fs = all_monotone(b, c);
        let gs = all_monotone(a, b);
        let (f, g) = (f.get(&fs), g.get(&gs));
        let whole = sd_ordinal_map(&compose(f, g).unwrap());
        let parts = sd_ordinal_map(f).after(&sd_ordinal_map(g));
        prop_assert_eq!(whole.table(), parts.table());
    }

    #[test]
    fn ex_operators_are_precomposition(which in 0usize..3, cell in any::<Index>(), k in 0usize..3, t in any::<Index>()) {
        let x = base(which);
        let ex = ExObject::new(&x, 2).unwrap();
        let cells = ex.set.all_cells(2);
        let c = cell.get(&cells);
        let thetas = all_monotone(k + 1, 3);
        let theta = t.get(&thetas);
        let by_set = ex.datum_of(&ex.set.act(c, theta));
        let by_datum = precompose(&x, &ex.datum_of(c), &sd_ordinal_map(theta));
        prop_assert_eq!(by_set, by_datum);
    }

    #[test]
    fn projections_are_idempotent_and_nested(n in 0usize..5, h in 0usize..5, k in 0usize..5) {
        prop_assume!(h <= k && k <= n);
        let jh = JoinMap::projection(n, h as isize);
        let jk = JoinMap::projection(n, k as isize);
        prop_assert!(jk.is_idempotent());
        prop_assert_eq!(jk.after(&jh).table(), jh.table());
        prop_assert_eq!(jh.after(&jk).table(), jh.table());
    }
}

#[test]
fn ex_objects_are_simplicial_sets() {
    for which in 0..3 {
        let ex = ExObject::new(&base(which), 2).unwrap();
        ex.set.validate().unwrap();
        assert!(ex.unit().unwrap().is_levelwise_injective());
    }
    assert_eq!(sd_simplex(3).nondeg_counts(), vec![15, 50, 60, 24]);
}

#[test]
fn unit_is_natural() {
    let x = base(1);
    let y = Arc::new(simplex(1));
    let ex_x = ExObject::new(&x, 2).unwrap();
    let ex_y = ExObject::new(&y, 2).unwrap();
    for f in hom_set(&x, &y).unwrap() {
        let ex_f = ex_x.map(&f, &ex_y).unwrap();
        let left = ex_f.after(&ex_x.unit().unwrap()).unwrap();
        let right = ex_y.unit().unwrap().after(&f).unwrap();
        assert_eq!(left.assignment, right.assignment);
    }
}
