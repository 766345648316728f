//! End-to-end acceptance checks, one test per shipped guarantee. Each test
//! prints a single `[PASS]` line with its workload and elapsed time; the
//! time budgets are pinned here as hard assertions.

mod common;

use std::collections::{BTreeMap, BTreeSet};
use std::time::{Duration, Instant};

use common::{enumerate_ultrametrics, exists_scaled_copy_bruteforce, rat};
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use ramsey_core::copysearch::{ball_set, greedy_find_copy, oracle_find_copy, GreedyOutcome};
use ramsey_core::gen;
use ramsey_core::katetov::{extend_one_point, KatetovFunction};
use ramsey_core::space::verify_scaled_copy;
use ramsey_core::treeramsey::{mono_subtree, verify_mono_subtree, BranchingTree, SubtreeOutcome};
use ramsey_core::treespace::{below_relation, regularize, ultrametric_to_tree};
use ramsey_core::universal::{
    build_universal_tree, find_mono_isometric_copy, verify_universal_copy, CopyOutcome,
};
use ramsey_core::{Coloring, MetricSpace, Rational, UltrametricSpace};

fn assert_budget(name: &str, start: Instant, budget: Duration) -> Duration {
    let elapsed = start.elapsed();
    assert!(
        elapsed <= budget,
        "{name} exceeded its time budget: {elapsed:?} > {budget:?}"
    );
    elapsed
}

/// Every triple of every seeded ultrametric space classifies as isosceles
/// with the two larger sides equal.
#[test]
fn acceptance_isosceles_classification() {
    let start = Instant::now();
    let mut triples = 0usize;
    for seed in 0..1000u64 {
        let count = 3 + (seed % 8) as usize; // 3..=10 points
        let space = gen::random_ultrametric(seed, count);
        let names = space.points().to_vec();
        for i in 0..names.len() {
            for j in (i + 1)..names.len() {
                for k in (j + 1)..names.len() {
                    let witness = space
                        .isosceles(&names[i], &names[j], &names[k])
                        .expect("every ultrametric triple is isosceles");
                    let (a, b) = (&witness.base.0, &witness.base.1);
                    let base = space.dist_by_name(a, b).unwrap();
                    let leg1 = space.dist_by_name(a, &witness.apex).unwrap();
                    let leg2 = space.dist_by_name(b, &witness.apex).unwrap();
                    assert_eq!(leg1, leg2, "the two legs must be equal");
                    assert!(base <= leg1, "the base never exceeds the legs");
                    triples += 1;
                }
            }
        }
    }
    let elapsed = assert_budget("isosceles", start, Duration::from_secs(10));
    println!(
        "[PASS] isosceles classification: 1000 spaces, {triples} triples, all witnessed ({elapsed:?})"
    );
}

/// Builds an admissible one-point profile on a random metric space by one of
/// two closed-form recipes, both of which satisfy the two-sided distance
/// constraints by construction.
fn admissible_profile(space: &MetricSpace, rng: &mut ChaCha8Rng) -> KatetovFunction {
    let names = space.points().to_vec();
    let z = names[rng.gen_range(0..names.len())].clone();
    let support_size = rng.gen_range(1..=names.len());
    let mut picked = names.clone();
    picked.shuffle(rng);
    picked.truncate(support_size);
    picked.sort();
    // A positive offset keeps both recipes strictly admissible.
    let r = Rational::new(rng.gen_range(1..=6), rng.gen_range(1..=3)).unwrap();
    let use_shift = rng.gen_bool(0.5);
    let mut values = BTreeMap::new();
    for y in &picked {
        let d = space.dist_by_name(&z, y).unwrap().clone();
        let v = if use_shift {
            &d + &r
        } else {
            let m = &d + rat("0"); // clone via addition with zero
            if m >= r {
                m
            } else {
                r.clone()
            }
        };
        values.insert(y.clone(), v);
    }
    KatetovFunction::new(space, &picked, &values)
        .expect("shifted and clamped distance profiles are admissible")
}

/// Random admissible profiles extend to genuine one-point metric extensions
/// that realize the prescribed distances exactly.
#[test]
fn acceptance_one_point_extension() {
    let start = Instant::now();
    for seed in 0..500u64 {
        let n = 2 + (seed % 9) as usize; // 2..=10 points
        let space = gen::random_metric(seed, n);
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x517c_c1b7_2722_0a95);
        let f = admissible_profile(&space, &mut rng);
        let extended = extend_one_point(&f, "w*").expect("admissible profiles always extend");
        assert_eq!(extended.len(), space.len() + 1);

        // Rebuild from raw rows so the full metric validation runs again.
        let pts = extended.points().to_vec();
        let rows: Vec<Vec<Rational>> = (0..pts.len())
            .map(|i| (0..pts.len()).map(|j| extended.dist(i, j).clone()).collect())
            .collect();
        MetricSpace::new(pts, rows).expect("the extension must satisfy every metric axiom");

        // Original distances are untouched and the profile is realized exactly.
        for a in space.points() {
            for b in space.points() {
                assert_eq!(
                    extended.dist_by_name(a, b),
                    space.dist_by_name(a, b),
                    "extension must not disturb existing distances"
                );
            }
        }
        for (i, v) in f.entries() {
            let y = &space.points()[i];
            assert_eq!(
                extended.dist_by_name("w*", y),
                Some(v),
                "prescribed distance must be realized exactly"
            );
        }
    }
    let elapsed = assert_budget("extension", start, Duration::from_secs(10));
    println!("[PASS] one-point extension: 500 random profiles realized exactly ({elapsed:?})");
}

/// Tree conversion round-trips every small ultrametric space exactly, both
/// as built and after regularization.
#[test]
fn acceptance_tree_round_trip() {
    let start = Instant::now();
    let palette = [rat("1"), rat("3/2"), rat("2")];
    let spaces = enumerate_ultrametrics(5, &palette);
    // Isometry classes over a 3-value palette, by point count:
    // 1 + 3 + 6 + 14 + 27 (hand-counted via strictly-decreasing-level
    // hierarchies with >=2 children per internal node).
    assert_eq!(spaces.len(), 51, "exhaustive corpus size is pinned");
    let exhaustive_count = spaces.len();
    for x in &spaces {
        round_trip_one(x);
    }
    for seed in 0..500u64 {
        let count = 1 + (seed % 7) as usize; // 1..=7 points
        let x = gen::random_ultrametric(seed, count);
        round_trip_one(&x);
    }
    let elapsed = assert_budget("round-trip", start, Duration::from_secs(60));
    println!(
        "[PASS] tree round-trip: {exhaustive_count} exhaustive (\u{2264}5 pts) + 500 random spaces exact ({elapsed:?})"
    );
}

fn round_trip_one(x: &UltrametricSpace) {
    let witness = ultrametric_to_tree(x);
    assert!(
        witness.verify_against(x),
        "tree conversion must reproduce the source metric exactly"
    );
    let regular = regularize(&witness);
    assert!(
        regular.verify_regular(),
        "regularization must produce uniform leaf depth and shared level values"
    );
    assert!(
        regular.as_branch().verify_against(x),
        "regularization must preserve the represented metric"
    );
}

/// The centrality relation is transitive, and the predecessors of any fixed
/// point are linearly ordered.
#[test]
fn acceptance_centrality_order() {
    let start = Instant::now();
    let palette = [rat("1"), rat("3/2"), rat("2")];
    let spaces = enumerate_ultrametrics(5, &palette);
    let mut checked = 0usize;
    for x in &spaces {
        let rel = below_relation(x);
        let n = x.len();
        for i in 0..n {
            assert!(rel[i][i], "the relation is reflexive");
            for j in 0..n {
                for k in 0..n {
                    if rel[i][j] && rel[j][k] {
                        assert!(rel[i][k], "the relation must be transitive");
                    }
                }
            }
        }
        for y in 0..n {
            let below: Vec<usize> = (0..n).filter(|&i| rel[i][y]).collect();
            for (a, &i) in below.iter().enumerate() {
                for &j in below.iter().take(a) {
                    assert!(
                        rel[i][j] || rel[j][i],
                        "points below a common point must be comparable"
                    );
                }
            }
        }
        checked += 1;
    }
    let elapsed = assert_budget("centrality", start, Duration::from_secs(60));
    println!(
        "[PASS] centrality order: transitivity + linear predecessor sets on {checked} spaces ({elapsed:?})"
    );
}

fn coloring_from_bits(names: &[String], mask: u64, colors: usize) -> Coloring {
    let mut map = BTreeMap::new();
    for (i, name) in names.iter().enumerate() {
        let c = if colors == 2 {
            ((mask >> i) & 1) as usize
        } else {
            ((mask / colors.pow(i as u32) as u64) % colors as u64) as usize
        };
        map.insert(name.clone(), c);
    }
    Coloring::new(map)
}

fn expect_subtree(tree: &BranchingTree, coloring: &Coloring, k: usize) {
    match mono_subtree(tree, coloring, k).expect("total colorings never error") {
        SubtreeOutcome::Found(cert) => {
            assert!(
                verify_mono_subtree(tree, coloring, &cert),
                "returned certificate must verify independently"
            );
            assert_eq!(cert.k, k);
        }
        SubtreeOutcome::NotFound { refutation_path } => {
            panic!(
                "a sufficiently branching tree admits a monochromatic subtree; refutation {refutation_path:?}"
            );
        }
    }
}

/// At the pigeonhole branching bound, every coloring of a complete tree
/// yields a monochromatic complete subtree.
#[test]
fn acceptance_tree_partition() {
    let start = Instant::now();

    // Exhaustive: 2 colors, target branching 2, height 2, supply 3.
    let tree = BranchingTree::complete(3, 2);
    let names = tree.leaf_names();
    assert_eq!(names.len(), 9);
    for mask in 0..(1u64 << 9) {
        let coloring = coloring_from_bits(&names, mask, 2);
        expect_subtree(&tree, &coloring, 2);
    }

    // Randomized sweeps at the exact bound for three other parameter points:
    // (colors, target k, height) with supply = colors * (k - 1) + 1.
    let instances = [(2usize, 3usize, 2usize), (3, 2, 2), (2, 2, 3)];
    for (idx, &(colors, k, height)) in instances.iter().enumerate() {
        let supply = colors * (k - 1) + 1;
        let tree = BranchingTree::complete(supply, height);
        let names = tree.leaf_names();
        for round in 0..1000u64 {
            let seed = (idx as u64) << 32 | round;
            let coloring = gen::random_coloring(seed, &names, colors);
            expect_subtree(&tree, &coloring, k);
        }
    }
    let elapsed = assert_budget("tree partition", start, Duration::from_secs(60));
    println!(
        "[PASS] tree partition: 512 exhaustive + 3\u{d7}1000 random colorings, zero misses ({elapsed:?})"
    );
}

/// The region of the universal tree whose leaf colorings we exhaust for the
/// first instance: the matched nodes two levels down (values 2 then 1), each
/// identified with its block of descendant leaves.
fn matched_blocks(
    m: &ramsey_core::universal::UniversalTree,
    values: &[Rational],
) -> Vec<Vec<String>> {
    let region = m.match_subtree(values).expect("palette values match");
    let tree = m.tree();
    let mut blocks = Vec::new();
    for name in region.leaf_names() {
        let idx = tree.index_of(&name).expect("region nodes live in the host");
        let mut leaves = Vec::new();
        let mut stack = vec![idx];
        while let Some(v) = stack.pop() {
            if tree.is_leaf(v) {
                leaves.push(tree.name_of(v).to_string());
            }
            for &c in tree.children(v) {
                stack.push(c);
            }
        }
        blocks.push(leaves);
    }
    blocks
}

/// Every 2-coloring of the universal tree's leaves admits an exactly
/// isometric monochromatic copy of the source space.
#[test]
fn acceptance_universal_copies() {
    let start = Instant::now();

    // Instance 1: the 3-point space with distances (1, 2, 2).
    let x1 = UltrametricSpace::from_rows(
        vec!["a".into(), "b".into(), "c".into()],
        vec![
            vec![rat("0"), rat("1"), rat("2")],
            vec![rat("1"), rat("0"), rat("2")],
            vec![rat("2"), rat("2"), rat("0")],
        ],
    )
    .expect("the triple is ultrametric");
    let palette1: BTreeSet<Rational> = [rat("1"), rat("2")].into();
    let m1 = build_universal_tree(&palette1, 3, 3).expect("small instance fits");
    assert_eq!(m1.tree().node_count(), 79, "pinned host size");
    assert_eq!(m1.leaf_names().len(), 54, "pinned leaf count");

    let blocks = matched_blocks(&m1, &[rat("2"), rat("1")]);
    assert_eq!(blocks.len(), 9, "the matched region has nine bottom nodes");
    let all_leaves = m1.leaf_names();
    let mut exhaustive_runs = 0usize;
    for mask in 0..(1u64 << blocks.len()) {
        let mut map: BTreeMap<String, usize> =
            all_leaves.iter().map(|l| (l.clone(), 0usize)).collect();
        for (b, block) in blocks.iter().enumerate() {
            if (mask >> b) & 1 == 1 {
                for leaf in block {
                    map.insert(leaf.clone(), 1);
                }
            }
        }
        let coloring = Coloring::new(map);
        match find_mono_isometric_copy(&m1, &coloring, &x1).expect("inputs are valid") {
            CopyOutcome::Found(found) => {
                assert!(
                    verify_universal_copy(&m1, &coloring, &x1, &found),
                    "certificate must verify independently"
                );
            }
            CopyOutcome::NotFound {
                multiplicity,
                required,
            } => panic!(
                "multiplicity {multiplicity} meets the bound {required}, a copy must exist"
            ),
        }
        exhaustive_runs += 1;
    }

    // Instance 1 again under unstructured random leaf colorings.
    for seed in 0..200u64 {
        let coloring = gen::random_coloring(seed, &all_leaves, 2);
        match find_mono_isometric_copy(&m1, &coloring, &x1).expect("inputs are valid") {
            CopyOutcome::Found(found) => {
                assert!(verify_universal_copy(&m1, &coloring, &x1, &found));
            }
            CopyOutcome::NotFound { .. } => panic!("the bound guarantees a copy"),
        }
    }

    // Instance 2: a 4-point space over palette {1, 2, 3}.
    let x2 = UltrametricSpace::from_rows(
        vec!["w".into(), "x".into(), "y".into(), "z".into()],
        vec![
            vec![rat("0"), rat("1"), rat("2"), rat("3")],
            vec![rat("1"), rat("0"), rat("2"), rat("3")],
            vec![rat("2"), rat("2"), rat("0"), rat("3")],
            vec![rat("3"), rat("3"), rat("3"), rat("0")],
        ],
    )
    .expect("the quadruple is ultrametric");
    let palette2: BTreeSet<Rational> = [rat("1"), rat("2"), rat("3")].into();
    let m2 = build_universal_tree(&palette2, 4, 3).expect("medium instance fits");
    assert_eq!(m2.tree().node_count(), 478, "pinned host size");
    let leaves2 = m2.leaf_names();
    assert_eq!(leaves2.len(), 324, "pinned leaf count");
    for seed in 0..500u64 {
        let coloring = gen::random_coloring(seed ^ 0xabcd, &leaves2, 2);
        match find_mono_isometric_copy(&m2, &coloring, &x2).expect("inputs are valid") {
            CopyOutcome::Found(found) => {
                assert!(verify_universal_copy(&m2, &coloring, &x2, &found));
            }
            CopyOutcome::NotFound { .. } => panic!("the bound guarantees a copy"),
        }
    }
    let elapsed = assert_budget("universal", start, Duration::from_secs(120));
    println!(
        "[PASS] universal copies: {exhaustive_runs} exhaustive region colorings + 200 + 500 random colorings, all exact ({elapsed:?})"
    );
}

/// Greedy and exhaustive searches agree with each other, with the
/// certificate verifier, and (on small instances) with brute force.
#[test]
fn acceptance_search_coherence() {
    let start = Instant::now();
    let mut found_count = 0usize;
    let mut obstructed_count = 0usize;
    let mut brute_checked = 0usize;
    for seed in 0..500u64 {
        let n = 2 + (seed % 11) as usize; // 2..=12 points
        let space = gen::random_metric(seed, n);
        let colors = 1 + (seed % 3) as usize;
        let coloring = gen::random_coloring(seed ^ 0x5eed, &space.points().to_vec(), colors);
        let t = 2 + (seed % 3) as usize; // 2..=4 points
        let target = gen::random_metric(seed.wrapping_mul(31) ^ 0x7a19, t);
        let enumeration: Vec<usize> = (0..t).collect();

        let outcome =
            greedy_find_copy(&space, &coloring, &target, None).expect("inputs are valid");
        let oracle =
            oracle_find_copy(&space, &coloring, &target, None).expect("inputs are valid");

        if let Some(found) = &oracle {
            verify_scaled_copy(&target, &space, &found.cert)
                .expect("exhaustive-search certificates must verify");
        }

        match outcome {
            GreedyOutcome::Found(found) => {
                found_count += 1;
                verify_scaled_copy(&target, &space, &found.cert)
                    .expect("greedy certificates must verify");
                let class = coloring
                    .color_of(found.cert.embedding.values().next().unwrap())
                    .unwrap();
                assert_eq!(class, found.color, "reported color matches the class used");
                assert!(
                    oracle.is_some(),
                    "the exhaustive search dominates the greedy pass"
                );
            }
            GreedyOutcome::Obstructed(failure) => {
                obstructed_count += 1;
                assert_eq!(
                    failure.stages.len(),
                    coloring.num_colors(),
                    "an obstructed run records every stage"
                );
                let final_ball = ball_set(&failure.final_values);
                for (idx, ob) in failure.stages.iter().enumerate() {
                    assert_eq!(ob.stage, idx, "stages arrive in order");
                    assert!(
                        ob.verify(&coloring, &target, &enumeration),
                        "each stage record must re-verify"
                    );
                    // The accumulated profile only grows, so the final ball
                    // set is contained in each stage's ball set.
                    let stage_ball = ball_set(&ob.values);
                    assert!(
                        final_ball.iter().all(|p| stage_ball.contains(p)),
                        "final ball set must be contained in every stage's"
                    );
                    for (i, v) in ob.values.entries() {
                        assert_eq!(
                            failure.final_values.value_at(i),
                            Some(v),
                            "earlier profile values persist to the end"
                        );
                    }
                }
            }
        }

        if oracle.is_none() && n <= 8 {
            brute_checked += 1;
            assert!(
                !exists_scaled_copy_bruteforce(&space, &coloring, &target),
                "an exhaustive miss must agree with brute force"
            );
        } else if oracle.is_some() && n <= 8 {
            brute_checked += 1;
            assert!(
                exists_scaled_copy_bruteforce(&space, &coloring, &target),
                "an exhaustive hit must agree with brute force"
            );
        }
    }
    assert!(found_count > 0, "the sweep must exercise the found path");
    assert!(
        obstructed_count > 0,
        "the sweep must exercise the obstructed path"
    );
    let elapsed = assert_budget("search coherence", start, Duration::from_secs(120));
    println!(
        "[PASS] search coherence: 500 sweeps ({found_count} found / {obstructed_count} obstructed greedy), {brute_checked} brute-force cross-checks ({elapsed:?})"
    );
}
