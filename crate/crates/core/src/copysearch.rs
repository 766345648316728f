//! Monochromatic scaled-copy search inside a colored metric space.
//!
//! Two procedures decide whether some color class of a colored space contains
//! a scaled isometric copy of a target space:
//!
//! * [`oracle_find_copy`] — a complete backtracking search over injective
//!   embeddings, deterministic and exhaustive: `None` is a guarantee that no
//!   color class contains any scaled copy.
//! * [`greedy_find_copy`] — a single pass over the colors that never
//!   backtracks. At each stage it restricts attention to the [`ball_set`] of
//!   an accumulated distance profile; when a stage fails, the partial copy it
//!   built is absorbed into the profile at a carefully shrunken scale, which
//!   keeps the profile admissible and shrinks the ball for later stages. The
//!   full per-stage history is returned on failure as [`GreedyFailure`].
//!
//! The greedy scale rule divides the smallest accumulated profile value by
//! `2 * max(1, diam(target))`, which caps every new profile value at half the
//! old minimum; together with the exactness of the ball-set membership this
//! makes the admissibility of every stage profile provable, and the code
//! re-validates it on every stage anyway.

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::katetov::KatetovFunction;
use crate::rational::Rational;
use crate::space::{verify_scaled_copy, Coloring, ColoringError, MetricSpace, ScaledCopyCert};

/// Indices of the points realizing `f` exactly: every point `p` of the base
/// with `d(p, y) = f(y)` for all support points `y`, ascending.
///
/// An empty support imposes no condition, so all points qualify. The result
/// may be empty: a finite space need not realize a profile.
pub fn ball_set(f: &KatetovFunction) -> Vec<usize> {
    (0..f.base().len()).filter(|&p| f.realized_by(p)).collect()
}

/// A successful search: the color class and the verified certificate.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FoundCopy {
    pub color: usize,
    pub cert: ScaledCopyCert,
}

/// The state of one failed greedy stage.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Obstruction {
    /// The color processed at this stage.
    pub stage: usize,
    /// The accumulated profile at entry to the stage.
    pub values: KatetovFunction,
    /// The partial copy built before the stage got stuck (host point names).
    pub partial_copy: Vec<String>,
    /// The scale the stage searched at.
    pub scale: Rational,
}

impl Obstruction {
    /// Support of the accumulated profile (host point names).
    pub fn support(&self) -> Vec<String> {
        self.values.support_names()
    }

    /// Re-checks this stage record against the inputs it was produced from:
    /// the profile is admissible, every partial-copy point lies in its ball
    /// set and in the stage's color class, and the partial copy reproduces the
    /// target's distances at the recorded scale along `enumeration`.
    pub fn verify(
        &self,
        coloring: &Coloring,
        target: &MetricSpace,
        enumeration: &[usize],
    ) -> bool {
        let base = self.values.base();
        let table: BTreeMap<usize, Rational> = self
            .values
            .entries()
            .map(|(i, v)| (i, v.clone()))
            .collect();
        if KatetovFunction::from_index_table(base, table).is_err() {
            return false;
        }
        if !self.scale.is_positive() {
            return false;
        }
        let ball = ball_set(&self.values);
        let mut indices = Vec::with_capacity(self.partial_copy.len());
        for name in &self.partial_copy {
            match base.index_of(name) {
                Some(i) => indices.push(i),
                None => return false,
            }
        }
        for (i, &p) in indices.iter().enumerate() {
            if !ball.contains(&p) || coloring.color_of(&base.points()[p]) != Some(self.stage) {
                return false;
            }
            for (j, &q) in indices.iter().enumerate().take(i) {
                let expected = &self.scale * target.dist(enumeration[j], enumeration[i]);
                if base.dist(q, p) != &expected {
                    return false;
                }
            }
        }
        true
    }
}

/// Everything the greedy pass learned before giving up.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GreedyFailure {
    /// One record per failed stage, in stage order (successful stages return
    /// instead, so on failure this covers every color).
    pub stages: Vec<Obstruction>,
    /// The profile accumulated after the last stage.
    pub final_values: KatetovFunction,
}

/// Result of the greedy pass; both variants are legitimate outputs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GreedyOutcome {
    Found(FoundCopy),
    Obstructed(GreedyFailure),
}

/// Invalid search inputs.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SearchError {
    #[error(transparent)]
    Coloring(#[from] ColoringError),
    #[error("enumeration must be a permutation of 0..{expected}")]
    InvalidEnumeration { expected: usize },
    #[error("candidate scale {0} is not positive")]
    NonpositiveScale(Rational),
}

fn color_vector(space: &MetricSpace, coloring: &Coloring) -> Vec<usize> {
    space
        .points()
        .iter()
        .map(|name| coloring.color_of(name).expect("coloring is total"))
        .collect()
}

fn resolve_enumeration(
    target: &MetricSpace,
    enumeration: Option<&[usize]>,
) -> Result<Vec<usize>, SearchError> {
    match enumeration {
        None => Ok((0..target.len()).collect()),
        Some(order) => {
            let mut seen = vec![false; target.len()];
            if order.len() != target.len() {
                return Err(SearchError::InvalidEnumeration {
                    expected: target.len(),
                });
            }
            for &i in order {
                if i >= target.len() || seen[i] {
                    return Err(SearchError::InvalidEnumeration {
                        expected: target.len(),
                    });
                }
                seen[i] = true;
            }
            Ok(order.to_vec())
        }
    }
}

/// Checks that the final accumulated profile extends each stage profile and
/// that its ball set is contained in each stage's ball set. Holds by
/// construction; re-checked on every run.
fn assert_accumulation_chain(stage_profiles: &[KatetovFunction], last: &KatetovFunction) {
    let final_ball: BTreeSet<usize> = ball_set(last).into_iter().collect();
    for f in stage_profiles {
        for (i, v) in f.entries() {
            assert_eq!(
                last.value_at(i),
                Some(v),
                "accumulated profile must extend every stage profile"
            );
        }
        let stage_ball: BTreeSet<usize> = ball_set(f).into_iter().collect();
        assert!(
            final_ball.is_subset(&stage_ball),
            "final ball set must be contained in every stage ball set"
        );
    }
}

/// The single-pass greedy search.
///
/// Stage `n` (one per color, ascending) works at scale `c_n`: 1 while the
/// accumulated support is empty, otherwise `min f / (2 * max(1, diam(target)))`.
/// It extends a partial copy one point at a time, always taking the first
/// point in canonical order that lies in the current ball set, has color `n`,
/// and sits at the scaled target distances from the points already chosen.
/// A completed stage returns a verified certificate; a stuck stage records an
/// [`Obstruction`], absorbs the partial copy into the profile with values
/// `c_n * d(z_i, z_k)` (where `z_k` is the target point that could not be
/// placed), and moves on. `enumeration` reorders the target points for the
/// placement sequence; `None` means canonical order.
pub fn greedy_find_copy(
    space: &MetricSpace,
    coloring: &Coloring,
    target: &MetricSpace,
    enumeration: Option<&[usize]>,
) -> Result<GreedyOutcome, SearchError> {
    coloring.validate_total(space)?;
    let order = resolve_enumeration(target, enumeration)?;
    let colors = color_vector(space, coloring);
    let num_colors = coloring.num_colors();
    let one = Rational::one();
    let denominator = Rational::from_integer(2) * one.clone().max(target.diameter());

    let mut current = KatetovFunction::empty(space);
    let mut stage_profiles: Vec<KatetovFunction> = Vec::new();
    let mut obstructions: Vec<Obstruction> = Vec::new();

    for stage in 0..num_colors {
        stage_profiles.push(current.clone());
        let scale = match current.min_value() {
            None => one.clone(),
            Some(min) => min / denominator.clone(),
        };
        let ball = ball_set(&current);

        let mut chosen: Vec<usize> = Vec::with_capacity(target.len());
        'placement: for &zi in &order {
            for &p in &ball {
                if colors[p] != stage || chosen.contains(&p) {
                    continue;
                }
                let fits = chosen
                    .iter()
                    .zip(&order)
                    .all(|(&q, &zj)| space.dist(q, p) == &(&scale * target.dist(zj, zi)));
                if fits {
                    chosen.push(p);
                    continue 'placement;
                }
            }
            break 'placement;
        }

        if chosen.len() == target.len() {
            let embedding: BTreeMap<String, String> = order
                .iter()
                .zip(&chosen)
                .map(|(&zi, &p)| (target.points()[zi].clone(), space.points()[p].clone()))
                .collect();
            let cert = ScaledCopyCert {
                embedding,
                factor: scale,
            };
            verify_scaled_copy(target, space, &cert)
                .expect("greedy construction must produce an exact scaled copy");
            assert_accumulation_chain(&stage_profiles, &current);
            return Ok(GreedyOutcome::Found(FoundCopy {
                color: stage,
                cert,
            }));
        }

        let failed_at = chosen.len();
        let obstruction = Obstruction {
            stage,
            values: current.clone(),
            partial_copy: chosen
                .iter()
                .map(|&p| space.points()[p].clone())
                .collect(),
            scale: scale.clone(),
        };
        assert!(
            obstruction.verify(coloring, target, &order),
            "greedy stage record must satisfy its own invariants"
        );
        obstructions.push(obstruction);

        let mut table: BTreeMap<usize, Rational> = current
            .entries()
            .map(|(i, v)| (i, v.clone()))
            .collect();
        for (i, &p) in chosen.iter().enumerate() {
            table.insert(p, &scale * target.dist(order[i], order[failed_at]));
        }
        current = KatetovFunction::from_index_table(space, table)
            .expect("stage profile must stay admissible under the shrunken scale");
    }

    assert_accumulation_chain(&stage_profiles, &current);
    Ok(GreedyOutcome::Obstructed(GreedyFailure {
        stages: obstructions,
        final_values: current,
    }))
}

/// Complete deterministic search for a monochromatic scaled copy.
///
/// Colors are tried in increasing order; within a color class, embeddings are
/// enumerated by lexicographic backtracking over canonical indices, so the
/// returned certificate is the smallest in `(color, embedding)` order. The
/// scale of a candidate embedding is forced by the image of the first target
/// pair; `scales`, when given, restricts which forced scales are admissible.
/// `Ok(None)` is exhaustive: no color class contains any scaled copy.
pub fn oracle_find_copy(
    space: &MetricSpace,
    coloring: &Coloring,
    target: &MetricSpace,
    scales: Option<&BTreeSet<Rational>>,
) -> Result<Option<FoundCopy>, SearchError> {
    coloring.validate_total(space)?;
    if let Some(set) = scales {
        for s in set {
            if !s.is_positive() {
                return Err(SearchError::NonpositiveScale(s.clone()));
            }
        }
    }
    if target.len() > space.len() {
        return Ok(None);
    }
    let colors = color_vector(space, coloring);
    let num_colors = coloring.num_colors();

    if target.len() == 1 {
        for color in 0..num_colors {
            if let Some(p) = (0..space.len()).find(|&p| colors[p] == color) {
                let cert = ScaledCopyCert {
                    embedding: [(target.points()[0].clone(), space.points()[p].clone())]
                        .into_iter()
                        .collect(),
                    factor: Rational::one(),
                };
                return Ok(Some(FoundCopy { color, cert }));
            }
        }
        return Ok(None);
    }

    for color in 0..num_colors {
        let class: Vec<usize> = (0..space.len()).filter(|&p| colors[p] == color).collect();
        if class.len() < target.len() {
            continue;
        }
        let mut assignment: Vec<usize> = Vec::with_capacity(target.len());
        if let Some(found) = assign_next(space, target, &class, scales, &mut assignment, None) {
            let embedding: BTreeMap<String, String> = found
                .iter()
                .enumerate()
                .map(|(i, &p)| (target.points()[i].clone(), space.points()[p].clone()))
                .collect();
            let factor = space.dist(found[0], found[1]) / target.dist(0, 1);
            let cert = ScaledCopyCert { embedding, factor };
            verify_scaled_copy(target, space, &cert)
                .expect("backtracking candidate must verify");
            return Ok(Some(FoundCopy { color, cert }));
        }
    }
    Ok(None)
}

/// Depth-first lexicographic extension of a partial embedding; returns the
/// first complete assignment. `scale` is `None` until two points are placed.
fn assign_next(
    space: &MetricSpace,
    target: &MetricSpace,
    class: &[usize],
    scales: Option<&BTreeSet<Rational>>,
    assignment: &mut Vec<usize>,
    scale: Option<Rational>,
) -> Option<Vec<usize>> {
    let i = assignment.len();
    if i == target.len() {
        return Some(assignment.clone());
    }
    for &p in class {
        if assignment.contains(&p) {
            continue;
        }
        let next_scale = if i == 1 {
            let forced = space.dist(assignment[0], p) / target.dist(0, 1);
            if let Some(set) = scales {
                if !set.contains(&forced) {
                    continue;
                }
            }
            Some(forced)
        } else {
            scale.clone()
        };
        let consistent = match &next_scale {
            None => true,
            Some(c) => assignment
                .iter()
                .enumerate()
                .all(|(j, &q)| space.dist(q, p) == &(c * target.dist(j, i))),
        };
        if !consistent {
            continue;
        }
        assignment.push(p);
        if let Some(found) = assign_next(space, target, class, scales, assignment, next_scale) {
            return Some(found);
        }
        assignment.pop();
    }
    None
}
