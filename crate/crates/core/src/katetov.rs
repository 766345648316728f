//! Admissible one-point distance profiles and the one-point metric extension.
//!
//! A [`KatetovFunction`] assigns a positive prospective distance `f(y)` to each
//! point `y` of a support set `Y` inside a base space, subject to the two
//! inequalities that make "a new point at distance `f(y)` from each `y`"
//! metrically consistent:
//!
//! * `f(x) + f(y) >= d(x, y)` — the new point cannot be closer to two points
//!   than they are to each other, and
//! * `f(y) <= f(x) + d(x, y)` — the profile is 1-Lipschitz over the support.
//!
//! [`extend_one_point`] materializes the new point: distances to support
//! points are exactly `f`, and distances to points outside the support are the
//! tightest value consistent with the triangle inequality, a minimum over the
//! support. [`saturate`] folds a list of such extensions, reusing an existing
//! point whenever one already realizes the requested profile exactly.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::rational::Rational;
use crate::space::MetricSpace;

/// A validated positive distance profile over a support subset of a base space.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KatetovFunction {
    base: MetricSpace,
    /// Support index -> value; keys are canonical indices into `base`.
    values: BTreeMap<usize, Rational>,
}

/// First admissibility violation found by the fixed validation scan.
///
/// Scan order: support membership and duplicates (in the order given), value
/// totality, positivity (canonical point order), then the two profile
/// inequalities over ordered support pairs in canonical order.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum KatetovViolation {
    #[error("support point {0:?} is not in the base space")]
    UnknownSupportPoint(String),
    #[error("support lists {0:?} twice")]
    DuplicateSupportPoint(String),
    #[error("no value given for support point {0:?}")]
    MissingValue(String),
    #[error("value table names {0:?}, which is outside the support")]
    ValueOutsideSupport(String),
    #[error("f({point}) = {value} must be positive")]
    NonpositiveValue { point: String, value: Rational },
    #[error("f({x}) + f({y}) = {sum} is below d({x}, {y}) = {dist}")]
    SumBelowDistance {
        x: String,
        y: String,
        sum: Rational,
        dist: Rational,
    },
    #[error("f({y}) = {fy} exceeds f({x}) + d({x}, {y}) = {bound}")]
    GrowthBeyondDistance {
        x: String,
        y: String,
        fy: Rational,
        bound: Rational,
    },
}

impl KatetovFunction {
    /// Validates `values` over `support` against `base`.
    ///
    /// The support may be empty (the conditions hold vacuously); extension
    /// over an empty support is rejected by [`extend_one_point`] instead.
    pub fn new(
        base: &MetricSpace,
        support: &[String],
        values: &BTreeMap<String, Rational>,
    ) -> Result<Self, KatetovViolation> {
        let mut indices = Vec::with_capacity(support.len());
        for name in support {
            let idx = base
                .index_of(name)
                .ok_or_else(|| KatetovViolation::UnknownSupportPoint(name.clone()))?;
            if indices.contains(&idx) {
                return Err(KatetovViolation::DuplicateSupportPoint(name.clone()));
            }
            indices.push(idx);
        }
        for name in support {
            if !values.contains_key(name) {
                return Err(KatetovViolation::MissingValue(name.clone()));
            }
        }
        for name in values.keys() {
            if !support.contains(name) {
                return Err(KatetovViolation::ValueOutsideSupport(name.clone()));
            }
        }
        indices.sort_unstable();
        let table: BTreeMap<usize, Rational> = indices
            .iter()
            .map(|&i| (i, values[&base.points()[i]].clone()))
            .collect();
        Self::from_index_table(base, table)
    }

    /// Validates an index-keyed table (keys must already be in range).
    pub fn from_index_table(
        base: &MetricSpace,
        values: BTreeMap<usize, Rational>,
    ) -> Result<Self, KatetovViolation> {
        for (&i, v) in &values {
            assert!(i < base.len(), "support index {i} out of range");
            if !v.is_positive() {
                return Err(KatetovViolation::NonpositiveValue {
                    point: base.points()[i].clone(),
                    value: v.clone(),
                });
            }
        }
        for (&i, fi) in &values {
            for (&j, fj) in &values {
                if i == j {
                    continue;
                }
                let dist = base.dist(i, j);
                let sum = fi + fj;
                if &sum < dist {
                    return Err(KatetovViolation::SumBelowDistance {
                        x: base.points()[i].clone(),
                        y: base.points()[j].clone(),
                        sum,
                        dist: dist.clone(),
                    });
                }
                let bound = fi + dist;
                if fj > &bound {
                    return Err(KatetovViolation::GrowthBeyondDistance {
                        x: base.points()[i].clone(),
                        y: base.points()[j].clone(),
                        fy: fj.clone(),
                        bound,
                    });
                }
            }
        }
        Ok(KatetovFunction {
            base: base.clone(),
            values,
        })
    }

    /// The profile with empty support over `base`.
    pub fn empty(base: &MetricSpace) -> Self {
        KatetovFunction {
            base: base.clone(),
            values: BTreeMap::new(),
        }
    }

    /// The base space the profile lives over.
    pub fn base(&self) -> &MetricSpace {
        &self.base
    }

    /// Support as canonical indices, ascending.
    pub fn support_indices(&self) -> impl Iterator<Item = usize> + '_ {
        self.values.keys().copied()
    }

    /// Support as point names, in canonical order.
    pub fn support_names(&self) -> Vec<String> {
        self.values
            .keys()
            .map(|&i| self.base.points()[i].clone())
            .collect()
    }

    /// Number of support points.
    pub fn support_len(&self) -> usize {
        self.values.len()
    }

    /// `true` when the support is empty.
    pub fn has_empty_support(&self) -> bool {
        self.values.is_empty()
    }

    /// Value at a support index.
    pub fn value_at(&self, index: usize) -> Option<&Rational> {
        self.values.get(&index)
    }

    /// All `(support index, value)` pairs, ascending by index.
    pub fn entries(&self) -> impl Iterator<Item = (usize, &Rational)> {
        self.values.iter().map(|(&i, v)| (i, v))
    }

    /// Value at a support point name.
    pub fn value_of(&self, name: &str) -> Option<&Rational> {
        self.values.get(&self.base.index_of(name)?)
    }

    /// Smallest value over the support (`None` when empty).
    pub fn min_value(&self) -> Option<Rational> {
        self.values.values().min().cloned()
    }

    /// `true` when the point at `index` is at distance exactly `f(y)` from
    /// every support point `y`. Vacuously true over an empty support.
    pub fn realized_by(&self, index: usize) -> bool {
        self.values
            .iter()
            .all(|(&y, fy)| self.base.dist(index, y) == fy)
    }

    /// First point (canonical order) realizing the profile exactly, if any.
    pub fn realizer(&self) -> Option<usize> {
        (0..self.base.len()).find(|&p| self.realized_by(p))
    }

    /// Checks the strong (ultrametric) profile condition
    /// `f(x) <= max(f(y), d(x, y))` for all support pairs, with full support.
    ///
    /// When the base is ultrametric and this holds, the one-point extension is
    /// again ultrametric.
    pub fn satisfies_strong_condition(&self) -> bool {
        if self.values.len() != self.base.len() {
            return false;
        }
        self.values.iter().all(|(&x, fx)| {
            self.values.iter().all(|(&y, fy)| {
                x == y || fx <= &fy.clone().max(self.base.dist(x, y).clone())
            })
        })
    }
}

/// Failure to materialize a one-point extension.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ExtendError {
    #[error("identifier {0:?} is already a point of the space")]
    DuplicateIdentifier(String),
    #[error("cannot extend over an empty support: the off-support minimum is undefined")]
    EmptySupport,
}

/// Appends a fresh point `new_id` realizing `f`.
///
/// The new point sits at distance exactly `f(y)` from each support point `y`,
/// and at distance `min over y of (d(x, y) + f(y))` from each point `x`
/// outside the support. The result is re-validated against the metric axioms
/// on every call (profile admissibility guarantees it passes).
pub fn extend_one_point(f: &KatetovFunction, new_id: &str) -> Result<MetricSpace, ExtendError> {
    if f.base.index_of(new_id).is_some() {
        return Err(ExtendError::DuplicateIdentifier(new_id.to_string()));
    }
    if f.has_empty_support() {
        return Err(ExtendError::EmptySupport);
    }
    let base = &f.base;
    let n = base.len();
    let new_dist = |x: usize| -> Rational {
        match f.value_at(x) {
            Some(fx) => fx.clone(),
            None => f
                .values
                .iter()
                .map(|(&y, fy)| base.dist(x, y) + fy)
                .min()
                .expect("support is nonempty"),
        }
    };
    let mut points = base.points().to_vec();
    points.push(new_id.to_string());
    let row: Vec<Rational> = (0..n).map(new_dist).collect();
    let rows: Vec<Vec<Rational>> = (0..=n)
        .map(|i| {
            (0..=n)
                .map(|j| match (i == n, j == n) {
                    (true, true) => Rational::zero(),
                    (true, false) => row[j].clone(),
                    (false, true) => row[i].clone(),
                    (false, false) => base.dist(i, j).clone(),
                })
                .collect()
        })
        .collect();
    Ok(MetricSpace::new(points, rows)
        .expect("one-point extension of an admissible profile must satisfy the metric axioms"))
}

/// Outcome of [`extend_with_reuse`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Extension {
    /// A fresh point was appended; the new space is carried.
    Added(MetricSpace),
    /// An existing point already realizes the profile; the space is unchanged.
    Reused { point: String },
}

/// Like [`extend_one_point`], but returns the first existing realizer instead
/// of adding a twin. The duplicate-identifier check only applies when a fresh
/// point is actually added.
pub fn extend_with_reuse(f: &KatetovFunction, new_id: &str) -> Result<Extension, ExtendError> {
    if f.has_empty_support() {
        return Err(ExtendError::EmptySupport);
    }
    if let Some(p) = f.realizer() {
        return Ok(Extension::Reused {
            point: f.base.points()[p].clone(),
        });
    }
    Ok(Extension::Added(extend_one_point(f, new_id)?))
}

/// One entry of a saturation run: a profile plus the identifier to add.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExtensionRequest {
    pub id: String,
    pub support: Vec<String>,
    pub values: BTreeMap<String, Rational>,
}

/// Why a saturation run aborted, with the index of the offending request.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SaturateError {
    #[error("request {index} is not an admissible profile: {source}")]
    InvalidRequest {
        index: usize,
        source: KatetovViolation,
    },
    #[error("request {index} cannot extend the space: {source}")]
    FailedExtension { index: usize, source: ExtendError },
}

/// Folds [`extend_with_reuse`] over `requests` in order.
///
/// Later requests may reference points added by earlier ones. Each request is
/// validated against the space as it stands when the request is processed.
pub fn saturate(
    base: &MetricSpace,
    requests: &[ExtensionRequest],
) -> Result<MetricSpace, SaturateError> {
    let mut current = base.clone();
    for (index, req) in requests.iter().enumerate() {
        let f = KatetovFunction::new(&current, &req.support, &req.values)
            .map_err(|source| SaturateError::InvalidRequest { index, source })?;
        match extend_with_reuse(&f, &req.id)
            .map_err(|source| SaturateError::FailedExtension { index, source })?
        {
            Extension::Added(space) => current = space,
            Extension::Reused { .. } => {}
        }
    }
    Ok(current)
}
