//! Deterministic random generators for test data and the CLI.
//!
//! Everything here is seeded: the same seed always yields the same space,
//! tree, or coloring, across runs and platforms (ChaCha8 keystream, no
//! platform-dependent entropy).

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::rational::Rational;
use crate::space::{Coloring, MetricSpace, UltrametricSpace};
use crate::treespace::TreeSpace;

/// Level values used by the unparameterized generators.
pub fn default_palette() -> Vec<Rational> {
    ["1", "3/2", "2", "3"]
        .iter()
        .map(|s| s.parse().expect("literal rationals parse"))
        .collect()
}

/// A random tree space with `leaf_count` leaves named `p0..`, built by
/// recursive partition: each internal node takes the next (strictly larger
/// set of) palette value and splits its leaves into at least two groups;
/// when only one value remains, the node becomes a star so every branch
/// terminates. Leaves carry level 0.
pub fn random_tree_space(seed: u64, leaf_count: usize, palette: &[Rational]) -> TreeSpace {
    assert!(leaf_count >= 1, "need at least one leaf");
    assert!(!palette.is_empty(), "need at least one level value");
    assert!(
        palette.iter().all(Rational::is_positive),
        "level values must be positive"
    );
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut levels: Vec<Rational> = palette.to_vec();
    levels.sort();
    levels.dedup();
    levels.reverse(); // strictly decreasing along any root path

    let mut nodes: Vec<(String, Option<String>, Rational)> = Vec::new();
    let mut internal_counter = 0usize;
    let ids: Vec<usize> = (0..leaf_count).collect();
    build_subtree(
        &mut rng,
        &ids,
        &levels,
        None,
        &mut nodes,
        &mut internal_counter,
    );
    TreeSpace::new(nodes).expect("the recursive partition yields a valid tree space")
}

fn build_subtree(
    rng: &mut ChaCha8Rng,
    ids: &[usize],
    levels: &[Rational],
    parent: Option<String>,
    nodes: &mut Vec<(String, Option<String>, Rational)>,
    internal_counter: &mut usize,
) {
    if ids.len() == 1 {
        nodes.push((format!("p{}", ids[0]), parent, Rational::zero()));
        return;
    }
    let name = format!("n{}", *internal_counter);
    *internal_counter += 1;
    nodes.push((name.clone(), parent, levels[0].clone()));
    let remaining = &levels[1..];
    if remaining.is_empty() {
        // Star fallback: no smaller value is available for deeper meets.
        for &id in ids {
            nodes.push((format!("p{id}"), Some(name.clone()), Rational::zero()));
        }
        return;
    }
    for group in random_partition(rng, ids) {
        build_subtree(rng, &group, remaining, Some(name.clone()), nodes, internal_counter);
    }
}

/// Splits `ids` into 2..=|ids| nonempty groups: shuffle, then cut at
/// distinct random positions.
fn random_partition(rng: &mut ChaCha8Rng, ids: &[usize]) -> Vec<Vec<usize>> {
    let mut shuffled = ids.to_vec();
    shuffled.shuffle(rng);
    let groups = rng.gen_range(2..=ids.len());
    let mut cuts: Vec<usize> = (1..ids.len()).collect();
    cuts.shuffle(rng);
    cuts.truncate(groups - 1);
    cuts.sort_unstable();
    cuts.push(ids.len());
    let mut out = Vec::with_capacity(groups);
    let mut start = 0;
    for cut in cuts {
        out.push(shuffled[start..cut].to_vec());
        start = cut;
    }
    out
}

/// A random ultrametric space on `count` points over [`default_palette`].
pub fn random_ultrametric(seed: u64, count: usize) -> UltrametricSpace {
    random_ultrametric_with_palette(seed, count, &default_palette())
}

/// A random ultrametric space over the given positive values: the leaf
/// metric of a random tree space.
pub fn random_ultrametric_with_palette(
    seed: u64,
    count: usize,
    palette: &[Rational],
) -> UltrametricSpace {
    assert!(count <= 10_000, "generator capped at 10000 points");
    random_tree_space(seed, count, palette).leaf_space()
}

/// A random metric space on `n` points named `m0..`: random small positive
/// rationals, symmetrized, then closed under shortest paths so the triangle
/// inequality holds exactly.
pub fn random_metric(seed: u64, n: usize) -> MetricSpace {
    assert!(n >= 1, "need at least one point");
    assert!(n <= 10_000, "generator capped at 10000 points");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut d = vec![vec![Rational::zero(); n]; n];
    for i in 0..n {
        for j in (i + 1)..n {
            let numer = rng.gen_range(1..=12i64);
            let denom = rng.gen_range(1..=3i64);
            let v = Rational::new(numer, denom).expect("nonzero denominator");
            d[i][j] = v.clone();
            d[j][i] = v;
        }
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                if i == j {
                    continue;
                }
                let via = &d[i][k] + &d[k][j];
                if via < d[i][j] {
                    d[i][j] = via;
                }
            }
        }
    }
    let points = (0..n).map(|i| format!("m{i}")).collect();
    MetricSpace::new(points, d).expect("shortest-path closure satisfies the metric axioms")
}

/// A random total coloring of the given names with colors `0..colors`.
pub fn random_coloring(seed: u64, names: &[String], colors: usize) -> Coloring {
    assert!(colors >= 1, "need at least one color");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Coloring::new(
        names
            .iter()
            .map(|n| (n.clone(), rng.gen_range(0..colors)))
            .collect(),
    )
}
