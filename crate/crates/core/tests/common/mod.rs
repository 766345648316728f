//! Brute-force oracles shared by the integration suites. Everything here is
//! deliberately naive and independent of the library's search strategies.
#![allow(dead_code)] // each suite uses its own subset of the helpers

use itertools::Itertools;
use ramsey_core::space::{Coloring, MetricSpace, UltrametricSpace};
use ramsey_core::Rational;

pub fn rat(s: &str) -> Rational {
    s.parse().expect("test literal parses")
}

/// All ultrametric spaces on `1..=max_points` points with distances drawn
/// from `palette`, enumerated exhaustively and deduplicated up to isometry
/// (minimal flattened matrix over all point permutations). Deterministic
/// order: by point count, then by canonical matrix.
pub fn enumerate_ultrametrics(max_points: usize, palette: &[Rational]) -> Vec<UltrametricSpace> {
    let p = palette.len();
    let mut out = Vec::new();
    for n in 1..=max_points {
        let pairs: Vec<(usize, usize)> = (0..n)
            .flat_map(|i| ((i + 1)..n).map(move |j| (i, j)))
            .collect();
        let mut canonical = std::collections::BTreeSet::new();
        let mut assignment = vec![0u8; pairs.len()];
        loop {
            if index_matrix_is_ultrametric(n, &pairs, &assignment) {
                canonical.insert(canonical_form(n, &pairs, &assignment));
            }
            // Advance the mixed-radix counter over palette indices.
            let mut i = 0;
            loop {
                if i == assignment.len() {
                    break;
                }
                assignment[i] += 1;
                if (assignment[i] as usize) < p {
                    break;
                }
                assignment[i] = 0;
                i += 1;
            }
            if i == assignment.len() {
                break;
            }
        }
        for form in canonical {
            out.push(space_from_form(n, &form, palette));
        }
    }
    out
}

fn index_matrix_is_ultrametric(n: usize, pairs: &[(usize, usize)], a: &[u8]) -> bool {
    let mut m = vec![vec![0u8; n]; n];
    for (slot, &(i, j)) in pairs.iter().enumerate() {
        m[i][j] = a[slot];
        m[j][i] = a[slot];
    }
    // Strong triangle inequality holds iff in every triple the maximum
    // palette index occurs at least twice (palette values are sorted).
    for i in 0..n {
        for j in (i + 1)..n {
            for k in (j + 1)..n {
                let (x, y, z) = (m[i][j], m[i][k], m[j][k]);
                let max = x.max(y).max(z);
                let hits = [x, y, z].iter().filter(|&&v| v == max).count();
                if hits < 2 {
                    return false;
                }
            }
        }
    }
    true
}

fn canonical_form(n: usize, pairs: &[(usize, usize)], a: &[u8]) -> Vec<u8> {
    let mut m = vec![vec![0u8; n]; n];
    for (slot, &(i, j)) in pairs.iter().enumerate() {
        m[i][j] = a[slot];
        m[j][i] = a[slot];
    }
    (0..n)
        .permutations(n)
        .map(|perm| {
            pairs
                .iter()
                .map(|&(i, j)| m[perm[i]][perm[j]])
                .collect::<Vec<u8>>()
        })
        .min()
        .expect("at least the identity permutation")
}

fn space_from_form(n: usize, form: &[u8], palette: &[Rational]) -> UltrametricSpace {
    let names: Vec<String> = (0..n).map(|i| format!("p{i}")).collect();
    let mut rows = vec![vec![Rational::zero(); n]; n];
    let mut slot = 0;
    for i in 0..n {
        for j in (i + 1)..n {
            rows[i][j] = palette[form[slot] as usize].clone();
            rows[j][i] = rows[i][j].clone();
            slot += 1;
        }
    }
    let space = MetricSpace::new(names, rows).expect("enumerated matrix is metric");
    UltrametricSpace::new(space).expect("enumerated matrix is ultrametric")
}

/// Exhaustive existence check for a monochromatic scaled copy: every color
/// class, every ordered injection, scale forced by the first target pair.
pub fn exists_scaled_copy_bruteforce(
    space: &MetricSpace,
    coloring: &Coloring,
    target: &MetricSpace,
) -> bool {
    if target.len() == 1 {
        return space.len() >= 1;
    }
    if target.len() > space.len() {
        return false;
    }
    for color in 0..coloring.num_colors() {
        let class: Vec<usize> = (0..space.len())
            .filter(|&i| coloring.color_of(&space.points()[i]) == Some(color))
            .collect();
        if class.len() < target.len() {
            continue;
        }
        for image in class.iter().copied().permutations(target.len()) {
            let host01 = space.dist(image[0], image[1]);
            let pat01 = target.dist(0, 1);
            let scale = host01 / pat01;
            if !scale.is_positive() {
                continue;
            }
            let ok = (0..target.len()).all(|i| {
                (0..i).all(|j| {
                    space.dist(image[j], image[i]) == &(&scale * target.dist(j, i))
                })
            });
            if ok {
                return true;
            }
        }
    }
    false
}
