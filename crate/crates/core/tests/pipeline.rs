//! Cross-module flows: each test chains several public entry points and
//! checks that the pieces agree with each other.

mod common;

use std::collections::{BTreeMap, BTreeSet};

use common::rat;
use ramsey_core::copysearch::{greedy_find_copy, oracle_find_copy, GreedyOutcome};
use ramsey_core::dot::tree_to_dot;
use ramsey_core::format::{
    json_string, ColoringDoc, FailureDoc, RegularDoc, SpaceDoc, TreeDoc,
};
use ramsey_core::gen;
use ramsey_core::katetov::{extend_one_point, saturate, ExtensionRequest};
use ramsey_core::treespace::{regularize, ultrametric_to_tree};
use ramsey_core::universal::{
    build_universal_tree, find_mono_isometric_copy, verify_universal_copy, CopyOutcome,
};
use ramsey_core::{Coloring, Rational, UltrametricSpace};

/// A tree drawn at random round-trips: leaf space -> rebuilt tree -> same
/// leaf space, and regularization keeps the metric while leveling depths.
#[test]
fn random_tree_to_space_and_back() {
    for seed in 0..50u64 {
        let palette = gen::default_palette();
        let tree = gen::random_tree_space(seed, 2 + (seed % 8) as usize, &palette);
        let space = tree.leaf_space();
        let witness = ultrametric_to_tree(&space);
        assert!(witness.verify_against(&space));
        let regular = regularize(&witness);
        assert!(regular.verify_regular());
        assert!(regular.as_branch().verify_against(&space));
    }
}

/// An obstructed greedy run leaves behind an admissible profile, so the
/// search's own byproduct can extend the host space by one genuine point.
#[test]
fn obstruction_profile_extends_the_space() {
    let mut hit = false;
    for seed in 0..80u64 {
        let space = gen::random_metric(seed, 6);
        let coloring = gen::random_coloring(seed ^ 0x9e37, &space.points().to_vec(), 2);
        let target = gen::random_metric(seed ^ 0x71f3, 3);
        let outcome = greedy_find_copy(&space, &coloring, &target, None).unwrap();
        if let GreedyOutcome::Obstructed(failure) = outcome {
            if failure.final_values.has_empty_support() {
                continue;
            }
            hit = true;
            let extended = extend_one_point(&failure.final_values, "fresh")
                .expect("an accumulated profile is always admissible");
            assert_eq!(extended.len(), space.len() + 1);
            for (i, v) in failure.final_values.entries() {
                let y = &space.points()[i];
                assert_eq!(extended.dist_by_name("fresh", y), Some(v));
            }
        }
    }
    assert!(hit, "the sweep must produce at least one nonempty obstruction");
}

/// Saturation chains requests that reference earlier synthetic points.
#[test]
fn saturation_builds_on_its_own_points() {
    let base = gen::random_metric(7, 4);
    let names = base.points().to_vec();
    let first = ExtensionRequest {
        id: "p*".into(),
        support: vec![names[0].clone(), names[1].clone()],
        values: BTreeMap::from([
            (names[0].clone(), base.dist(0, 1) + rat("1")),
            (names[1].clone(), rat("1")),
        ]),
    };
    // The second request leans on the point the first one added.
    let second = ExtensionRequest {
        id: "q*".into(),
        support: vec!["p*".into()],
        values: BTreeMap::from([("p*".into(), rat("2/3"))]),
    };
    let grown = saturate(&base, &[first, second]).expect("both requests are admissible");
    assert_eq!(grown.len(), base.len() + 2);
    assert_eq!(grown.dist_by_name("q*", "p*"), Some(&rat("2/3")));
    assert_eq!(grown.dist_by_name("p*", &names[1]), Some(&rat("1")));
}

/// The universal host solves an instance end to end starting from nothing
/// but a palette, and the run survives a serialization round trip.
#[test]
fn universal_instance_with_serialized_artifacts() {
    let x = UltrametricSpace::from_rows(
        vec!["a".into(), "b".into(), "c".into()],
        vec![
            vec![rat("0"), rat("1"), rat("2")],
            vec![rat("1"), rat("0"), rat("2")],
            vec![rat("2"), rat("2"), rat("0")],
        ],
    )
    .unwrap();

    // Ship the source space through its document form first.
    let doc_bytes = json_string(&SpaceDoc::from_space(&x));
    let parsed: SpaceDoc = serde_json::from_str(&doc_bytes).unwrap();
    let x2 = UltrametricSpace::new(parsed.into_space().unwrap()).unwrap();
    assert_eq!(x2.points(), x.points());

    let palette: BTreeSet<Rational> = x2.distance_set();
    let m = build_universal_tree(&palette, 3, 3).unwrap();
    let leaves = m.leaf_names();
    let coloring = gen::random_coloring(42, &leaves, 2);

    // The coloring document round-trips byte-identically.
    let cdoc = ColoringDoc::from_coloring(&coloring);
    let cbytes = json_string(&cdoc);
    let creparsed: ColoringDoc = serde_json::from_str(&cbytes).unwrap();
    assert_eq!(json_string(&creparsed), cbytes);
    let coloring = creparsed.into_coloring();

    match find_mono_isometric_copy(&m, &coloring, &x2).unwrap() {
        CopyOutcome::Found(found) => {
            assert!(verify_universal_copy(&m, &coloring, &x2, &found));
        }
        CopyOutcome::NotFound { .. } => panic!("multiplicity 3 suffices for 2 colors"),
    }
}

/// Tree documents and regular documents reconstruct verifying witnesses.
#[test]
fn witness_documents_round_trip() {
    for seed in [3u64, 11, 29] {
        let x = gen::random_ultrametric(seed, 6);
        let witness = ultrametric_to_tree(&x);
        let tdoc = TreeDoc::from_witness(&witness);
        let tbytes = json_string(&tdoc);
        let tback: TreeDoc = serde_json::from_str(&tbytes).unwrap();
        let rebuilt = tback.into_witness().unwrap();
        assert!(rebuilt.verify_against(&x));
        assert_eq!(json_string(&TreeDoc::from_witness(&rebuilt)), tbytes);

        let regular = regularize(&witness);
        let rdoc = RegularDoc::from_witness(&regular);
        let rbytes = json_string(&rdoc);
        let rback: RegularDoc = serde_json::from_str(&rbytes).unwrap();
        let rrebuilt = rback.into_witness().unwrap();
        assert!(rrebuilt.verify_regular());
        assert!(rrebuilt.as_branch().verify_against(&x));
    }
}

/// The failure document captures an obstructed run faithfully enough to
/// re-verify every stage from the document alone.
#[test]
fn failure_document_reverifies() {
    // A monochrome 2-point space cannot host an equilateral triangle copy.
    let space = gen::random_metric(5, 2);
    let coloring = Coloring::new(
        space
            .points()
            .iter()
            .map(|p| (p.clone(), 0usize))
            .collect::<BTreeMap<_, _>>(),
    );
    let target = gen::random_metric(9, 3);
    let outcome = greedy_find_copy(&space, &coloring, &target, None).unwrap();
    let GreedyOutcome::Obstructed(failure) = outcome else {
        panic!("two points cannot carry a three-point copy");
    };
    let doc = FailureDoc::from_failure(&failure);
    let bytes = json_string(&doc);
    let reparsed: FailureDoc = serde_json::from_str(&bytes).unwrap();
    assert_eq!(json_string(&reparsed), bytes);
    assert_eq!(reparsed.stages.len(), failure.stages.len());
    for (doc_stage, stage) in reparsed.stages.iter().zip(&failure.stages) {
        assert_eq!(doc_stage.stage, stage.stage);
        assert_eq!(doc_stage.scale, stage.scale);
        assert_eq!(doc_stage.partial_copy, stage.partial_copy);
    }
    // The exhaustive search agrees there is nothing to find.
    assert!(oracle_find_copy(&space, &coloring, &target, None)
        .unwrap()
        .is_none());
}

/// DOT rendering covers every node of a converted tree exactly once.
#[test]
fn dot_covers_converted_tree() {
    let x = gen::random_ultrametric(13, 7);
    let witness = ultrametric_to_tree(&x);
    let dot = tree_to_dot(&witness.tree);
    for i in 0..witness.tree.node_count() {
        let name = witness.tree.name_of(i);
        assert!(
            dot.contains(&format!("\"{name}\"")),
            "node {name} missing from DOT output"
        );
    }
    assert!(dot.starts_with("digraph tree {"));
    assert!(dot.ends_with("}\n"));
}

/// Generators are deterministic in the seed and vary across seeds.
#[test]
fn generators_are_seed_deterministic() {
    let a = gen::random_metric(99, 8);
    let b = gen::random_metric(99, 8);
    assert_eq!(a.points(), b.points());
    for i in 0..8 {
        for j in 0..8 {
            assert_eq!(a.dist(i, j), b.dist(i, j));
        }
    }
    let c = gen::random_metric(100, 8);
    let differs = (0..8).any(|i| (0..8).any(|j| a.dist(i, j) != c.dist(i, j)));
    assert!(differs, "different seeds should give different spaces");

    let u = gen::random_ultrametric(7, 9);
    let v = gen::random_ultrametric(7, 9);
    assert_eq!(u.points(), v.points());
    for i in 0..9 {
        for j in 0..9 {
            assert_eq!(u.dist(i, j), v.dist(i, j));
        }
    }
}
