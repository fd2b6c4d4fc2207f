use std::collections::BTreeMap;

use kq_core::pstructure::{
    corner_insertion, corner_pstructure, corner_pstructure_with, horn_pstructure, search_pstructure, Condition,
    CornerRecipe, Height, PStructure, PStructureFile, Variant,
};
use std::sync::Arc;

use kq_core::sset::{product, simplex, Cell, SetFile, SimplicialMap};

#[test]
fn corner_structures_validate_exhaustively() {
    for n in 0..=2 {
        for m in 1..=3 {
            for k in 0..=m {
                let mut recipes = Vec::new();
                if k < m {
                    recipes.push(CornerRecipe::Direct);
                }
                if k > 0 {
                    recipes.push(CornerRecipe::Reversed);
                }
                for r in recipes {
                    let cs = corner_pstructure_with(n, k, m, r).unwrap();
                    let rep = cs.structure.validate().unwrap();
                    assert!(rep.passed, "n={n} k={k} m={m} {r:?}: {rep:?}");
                }
            }
        }
    }
}

#[test]
fn corner_replays_to_the_product() {
    let cs = corner_pstructure(1, 1, 2).unwrap();
    let pres = cs.structure.compile().unwrap();
    assert!(pres.stages.len() >= 2);
    let replay = pres.replay().unwrap();
    let prod = product(&Arc::new(simplex(1)), &Arc::new(simplex(2))).unwrap();
    assert_eq!(replay.comparison.source.nondeg_counts(), prod.set.nondeg_counts());
    // Round trip through JSON replays identically.
    let back = kq_core::pstructure::AnodynePresentation::from_json(&pres.to_json()).unwrap();
    assert_eq!(back, pres);
    back.replay().unwrap();
}

#[test]
fn insertion_examples() {
    let d = CornerRecipe::Direct;
    assert_eq!(corner_insertion(&[(0, 0), (1, 2)], 1, 1, 2, d), Some(vec![(0, 0), (1, 1), (1, 2)]));
    // The first point of row 2 is (1,2); (1,1) is missing and gets inserted.
    assert_eq!(corner_insertion(&[(0, 0), (0, 1), (1, 2)], 1, 1, 2, d), Some(vec![(0, 0), (0, 1), (1, 1), (1, 2)]));
    assert_eq!(corner_insertion(&[(0, 0), (0, 1), (0, 2), (1, 2)], 1, 1, 2, d), None);
}

#[test]
fn zero_dimensional_corner_is_the_horn() {
    for m in 1..=3 {
        for k in 0..=m {
            let cs = corner_pstructure(0, k, m).unwrap();
            assert_eq!(cs.structure.pairing.len(), 1);
            assert!(cs.structure.validate().unwrap().passed);
            let h = horn_pstructure(m, k).unwrap();
            assert_eq!(h.compile().unwrap().attachment_count(), 1);
        }
    }
}

#[test]
fn ant_lands_strictly_lower() {
    let cs = corner_pstructure(1, 1, 2).unwrap();
    let ps = &cs.structure;
    for &x in ps.pairing.keys() {
        let c = Cell::nondeg(x.0, x.1);
        let hx = ps.p_height(&c, Variant::TypeTwo).unwrap().value().unwrap();
        for y in ps.ant(&c, Variant::TypeTwo).unwrap() {
            let hy = ps.p_height(&y, Variant::TypeTwo).unwrap().value().unwrap();
            assert!(hy < hx);
        }
        assert!(ps.ant_sets(&c, Variant::Full, 50).unwrap().is_empty());
    }
}

#[test]
fn base_cells_have_no_antecedents() {
    let ps = horn_pstructure(3, 1).unwrap();
    let v = Cell::nondeg(0, 0);
    for k in 1..4 {
        assert!(ps.ant_sets(&v, Variant::Full, k).unwrap().is_empty());
    }
    assert!(ps.ant_sets(&v, Variant::Full, 0).is_err());
}

#[test]
fn cyclic_structure_is_caught() {
    // Two triangles on the same boundary; each claims to be built after the other.
    let doc = r#"{"dim_bound":2,"cells":{"0":["a","b","c"],"1":["ab","ac","bc"],"2":["s","t"]},
      "faces":{"ab":[[[0],"b"],[[0],"a"]],"ac":[[[0],"c"],[[0],"a"]],"bc":[[[0],"c"],[[0],"b"]],
               "s":[[[0,1],"bc"],[[0,1],"ac"],[[0,1],"ab"]],"t":[[[0,1],"bc"],[[0,1],"ac"],[[0,1],"ab"]]}}"#;
    let sphere = Arc::new(SetFile::from_json(doc).unwrap().to_set().unwrap());
    sphere.validate().unwrap();
    let keep = vec![vec![true; 3], vec![false, true, false], vec![false; 2]];
    let (_, inc) = sphere.subobject(&keep).unwrap();
    let id = |name: &str| sphere.lookup(name).unwrap();
    let pairing = BTreeMap::from([(id("ab"), id("s")), (id("bc"), id("t"))]);
    let ps = PStructure::new(inc, pairing).unwrap();
    let rep = ps.validate().unwrap();
    let v = rep.violation.unwrap();
    assert_eq!(v.condition, Condition::FiniteHeight);
    let (d, i) = id("ab");
    match ps.p_height(&Cell::nondeg(d, i), Variant::TypeTwo).unwrap() {
        Height::Infinite { cycle } => assert_eq!(cycle.len(), 2),
        h => panic!("expected a cycle, got {h:?}"),
    }
    assert!(ps.compile().is_err());
}

#[test]
fn pushout_inherits_the_structure() {
    // Push Λ^1[2] ↪ Δ[2] along the map crushing the horn to one end of an edge.
    let ps = horn_pstructure(2, 1).unwrap();
    let a = ps.cofibration.source.clone();
    let c = Arc::new(simplex(1));
    let asg = (0..=a.dim_bound())
        .map(|d| (0..a.count(d) as u32).map(|_| Cell { word: kq_core::delta::OrdinalMap::constant(d + 1, 1, 0), base: 0 }).collect())
        .collect();
    let g = SimplicialMap::new(a, c, asg).unwrap();
    let (po, glued) = ps.pushout_along(&g).unwrap();
    assert_eq!(po.set.nondeg_counts(), vec![2, 2, 1]);
    let rep = glued.validate().unwrap();
    assert!(rep.passed, "{rep:?}");
    glued.compile().unwrap().replay().unwrap();
}

#[test]
fn search_recovers_horn_and_corner_structures() {
    for (n, i) in [(1, 0), (2, 1), (3, 0)] {
        let inc = kq_core::pstructure::horn_inclusion(n, i).unwrap();
        let ps = search_pstructure(&inc, 10_000).unwrap().expect("horns are elementary expansions");
        assert_eq!(ps.pairing.len(), 1);
        assert!(ps.validate().unwrap().passed);
    }
    let corner = corner_pstructure(1, 1, 2).unwrap();
    let found = search_pstructure(&corner.structure.cofibration, 100_000).unwrap().unwrap();
    assert!(found.validate().unwrap().passed);
    found.compile().unwrap().replay().unwrap();
}

#[test]
fn boundary_inclusions_admit_no_structure() {
    let (_, inc) = kq_core::sset::generator(kq_core::sset::GeneratorKind::Boundary, 2, None).unwrap();
    assert!(search_pstructure(&inc.unwrap(), 10_000).unwrap().is_none());
}

#[test]
fn tampered_presentations_name_the_missing_cell() {
    let corner = corner_pstructure(1, 1, 2).unwrap();
    let pres = corner.structure.compile().unwrap();
    assert!(pres.try_replay().unwrap().is_ok());
    for stage in 0..pres.stages.len() {
        let mut bad = pres.clone();
        let removed = bad.stages[stage].attachments.remove(0);
        let failure = bad.try_replay().unwrap().expect_err("a deleted attachment must be noticed");
        // Either a later horn needs one of the removed cells, or they are never built.
        assert!(failure.witness == removed.type_one || failure.witness == removed.type_two, "{failure:?}");
    }
}

#[test]
fn structure_files_round_trip() {
    let corner = corner_pstructure(1, 0, 2).unwrap();
    let file = PStructureFile::from_structure(&corner.structure);
    let back = PStructureFile::from_json(&file.to_json()).unwrap().to_structure(corner.structure.cofibration.clone()).unwrap();
    assert_eq!(back.pairing, corner.structure.pairing);
    assert!(PStructureFile::from_json("{\"pairs\": 3}").is_err());
}
