//! Finite metric and ultrametric spaces with exact distances.
//!
//! A [`MetricSpace`] stores named points and a full distance table. Construction
//! validates the axioms in a fixed scan order and reports the *first* violation
//! found, so error output is deterministic and suitable for golden tests:
//!
//! 1. shape (nonempty, square table, distinct point names),
//! 2. zero diagonal, scanning points in order,
//! 3. positive off-diagonal entries, scanning ordered pairs lexicographically,
//! 4. symmetry, scanning pairs `i < j`,
//! 5. triangle inequality, scanning ordered distinct triples `(i, j, k)`
//!    lexicographically and checking `d(i,k) <= d(i,j) + d(j,k)`.
//!
//! [`UltrametricSpace`] additionally checks the strong inequality
//! `d(i,k) <= max(d(i,j), d(j,k))` over the same triple order.

use std::collections::{BTreeMap, BTreeSet};
use std::ops::Deref;

use thiserror::Error;

use crate::rational::Rational;

/// A finite metric space: named points plus an exact distance table.
///
/// The point order given at construction is the *canonical order*; every
/// deterministic scan in this crate (searches, witnesses, serialization)
/// iterates points in this order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MetricSpace {
    points: Vec<String>,
    /// Flattened row-major `n x n` table; `dist[i * n + j]` is `d(points[i], points[j])`.
    dist: Vec<Rational>,
}

/// First metric-axiom violation found by the fixed validation scan.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MetricViolation {
    /// The space has no points at all.
    #[error("space has no points")]
    Empty,
    /// The table has a different number of rows than there are points.
    #[error("distance table has {rows} rows but there are {points} points")]
    PointCountMismatch { rows: usize, points: usize },
    /// A row of the table has the wrong width.
    #[error("distance table row {row} has {len} entries, expected {expected}")]
    RowLengthMismatch {
        row: usize,
        len: usize,
        expected: usize,
    },
    /// The same point name appears twice.
    #[error("duplicate point name {0:?}")]
    DuplicatePoint(String),
    /// `d(p, p)` is not zero.
    #[error("d({point}, {point}) must be 0")]
    NonzeroDiagonal { point: String },
    /// `d(a, b)` is zero or negative for distinct points.
    #[error("d({a}, {b}) must be positive for distinct points")]
    NonpositiveOffDiagonal { a: String, b: String },
    /// `d(a, b)` differs from `d(b, a)`.
    #[error("d({a}, {b}) differs from d({b}, {a})")]
    Asymmetric { a: String, b: String },
    /// `d(a, c) > d(a, b) + d(b, c)`.
    #[error("triangle inequality fails: d({a}, {c}) > d({a}, {b}) + d({b}, {c})")]
    Triangle { a: String, b: String, c: String },
}

impl MetricSpace {
    /// Validates `rows` as a distance table over `points` and builds the space.
    ///
    /// Checks run in the order documented on the module; the first violation is
    /// returned.
    pub fn new(points: Vec<String>, rows: Vec<Vec<Rational>>) -> Result<Self, MetricViolation> {
        let n = points.len();
        if n == 0 {
            return Err(MetricViolation::Empty);
        }
        if rows.len() != n {
            return Err(MetricViolation::PointCountMismatch {
                rows: rows.len(),
                points: n,
            });
        }
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(MetricViolation::RowLengthMismatch {
                    row: i,
                    len: row.len(),
                    expected: n,
                });
            }
        }
        let mut seen = BTreeSet::new();
        for name in &points {
            if !seen.insert(name.clone()) {
                return Err(MetricViolation::DuplicatePoint(name.clone()));
            }
        }
        let space = MetricSpace {
            points,
            dist: rows.into_iter().flatten().collect(),
        };
        space.validate_axioms()?;
        Ok(space)
    }

    /// Builds the table by calling `f(i, j)` for every index pair, then validates.
    pub fn build(
        points: Vec<String>,
        mut f: impl FnMut(usize, usize) -> Rational,
    ) -> Result<Self, MetricViolation> {
        let n = points.len();
        let rows = (0..n)
            .map(|i| (0..n).map(|j| f(i, j)).collect())
            .collect();
        MetricSpace::new(points, rows)
    }

    fn validate_axioms(&self) -> Result<(), MetricViolation> {
        let n = self.len();
        for i in 0..n {
            if !self.dist(i, i).is_zero() {
                return Err(MetricViolation::NonzeroDiagonal {
                    point: self.points[i].clone(),
                });
            }
        }
        for i in 0..n {
            for j in 0..n {
                if i != j && !self.dist(i, j).is_positive() {
                    return Err(MetricViolation::NonpositiveOffDiagonal {
                        a: self.points[i].clone(),
                        b: self.points[j].clone(),
                    });
                }
            }
        }
        for i in 0..n {
            for j in (i + 1)..n {
                if self.dist(i, j) != self.dist(j, i) {
                    return Err(MetricViolation::Asymmetric {
                        a: self.points[i].clone(),
                        b: self.points[j].clone(),
                    });
                }
            }
        }
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    if i == j || j == k || i == k {
                        continue;
                    }
                    if self.dist(i, k) > &(self.dist(i, j) + self.dist(j, k)) {
                        return Err(MetricViolation::Triangle {
                            a: self.points[i].clone(),
                            b: self.points[j].clone(),
                            c: self.points[k].clone(),
                        });
                    }
                }
            }
        }
        Ok(())
    }

    /// Number of points.
    #[allow(clippy::len_without_is_empty)]
    pub fn len(&self) -> usize {
        self.points.len()
    }

    /// Point names in canonical order.
    pub fn points(&self) -> &[String] {
        &self.points
    }

    /// Distance between the points at indices `i` and `j`.
    pub fn dist(&self, i: usize, j: usize) -> &Rational {
        &self.dist[i * self.points.len() + j]
    }

    /// Distance looked up by point names.
    pub fn dist_by_name(&self, a: &str, b: &str) -> Option<&Rational> {
        Some(self.dist(self.index_of(a)?, self.index_of(b)?))
    }

    /// Canonical index of a point name.
    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.points.iter().position(|p| p == name)
    }

    /// Largest pairwise distance (zero for a single point).
    pub fn diameter(&self) -> Rational {
        let mut best = Rational::zero();
        for i in 0..self.len() {
            for j in (i + 1)..self.len() {
                if self.dist(i, j) > &best {
                    best = self.dist(i, j).clone();
                }
            }
        }
        best
    }

    /// The set of distances that occur between distinct points.
    pub fn distance_set(&self) -> BTreeSet<Rational> {
        let mut set = BTreeSet::new();
        for i in 0..self.len() {
            for j in (i + 1)..self.len() {
                set.insert(self.dist(i, j).clone());
            }
        }
        set
    }

    /// The space with every distance multiplied by `factor` (must be positive).
    pub fn scale(&self, factor: &Rational) -> MetricSpace {
        assert!(
            factor.is_positive(),
            "scale factor must be positive, got {factor}"
        );
        MetricSpace {
            points: self.points.clone(),
            dist: self.dist.iter().map(|d| d * factor).collect(),
        }
    }

    /// The induced subspace on the points at `indices` (must be distinct and in range).
    pub fn induced_subspace(&self, indices: &[usize]) -> MetricSpace {
        let distinct: BTreeSet<_> = indices.iter().collect();
        assert_eq!(distinct.len(), indices.len(), "indices must be distinct");
        let points = indices.iter().map(|&i| self.points[i].clone()).collect();
        let dist = indices
            .iter()
            .flat_map(|&i| indices.iter().map(move |&j| self.dist(i, j).clone()))
            .collect();
        MetricSpace { points, dist }
    }
}

/// First strong-inequality violation in a would-be ultrametric space.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("ultrametric inequality fails: d({a}, {c}) > max(d({a}, {b}), d({b}, {c}))")]
pub struct UltrametricViolation {
    pub a: String,
    pub b: String,
    pub c: String,
}

/// Either failure mode when building an ultrametric space from raw rows.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum UltrametricBuildError {
    #[error(transparent)]
    Metric(#[from] MetricViolation),
    #[error(transparent)]
    Ultrametric(#[from] UltrametricViolation),
}

/// A metric space satisfying `d(x, z) <= max(d(x, y), d(y, z))` for all triples.
///
/// Dereferences to [`MetricSpace`], so all read accessors apply.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UltrametricSpace(MetricSpace);

impl UltrametricSpace {
    /// Checks the strong inequality on an already-valid metric space.
    ///
    /// Triples are scanned in the same lexicographic order as the triangle
    /// check, and the first violating `(a, b, c)` is reported.
    pub fn new(space: MetricSpace) -> Result<Self, UltrametricViolation> {
        let n = space.len();
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    if i == j || j == k || i == k {
                        continue;
                    }
                    let bound = space.dist(i, j).clone().max(space.dist(j, k).clone());
                    if space.dist(i, k) > &bound {
                        return Err(UltrametricViolation {
                            a: space.points[i].clone(),
                            b: space.points[j].clone(),
                            c: space.points[k].clone(),
                        });
                    }
                }
            }
        }
        Ok(UltrametricSpace(space))
    }

    /// Validates rows as a metric space and then as an ultrametric space.
    pub fn from_rows(
        points: Vec<String>,
        rows: Vec<Vec<Rational>>,
    ) -> Result<Self, UltrametricBuildError> {
        Ok(UltrametricSpace::new(MetricSpace::new(points, rows)?)?)
    }

    /// Wraps without checking the strong inequality.
    ///
    /// Only for tests and for spaces whose construction already guarantees the
    /// property; the isosceles lookup reports `NotIsosceles` on misuse.
    pub fn new_unchecked(space: MetricSpace) -> Self {
        UltrametricSpace(space)
    }

    /// The underlying metric space.
    pub fn into_inner(self) -> MetricSpace {
        self.0
    }

    /// Classifies a triple of distinct points as an isosceles triangle.
    ///
    /// In an ultrametric space every triple has two equal sides at least as long
    /// as the third. The triple is reordered by canonical index; the candidate
    /// base pairs are then tried in the fixed order `(0,1)`, `(0,2)`, `(1,2)`,
    /// and the first pair whose distance is no larger than the two (equal)
    /// remaining sides wins. The leftover point is the apex.
    pub fn isosceles(&self, x: &str, y: &str, z: &str) -> Result<IsoscelesWitness, IsoscelesError> {
        let mut idx = [0usize; 3];
        for (slot, name) in idx.iter_mut().zip([x, y, z]) {
            *slot = self
                .index_of(name)
                .ok_or_else(|| IsoscelesError::UnknownPoint(name.to_string()))?;
        }
        if idx[0] == idx[1] || idx[0] == idx[2] || idx[1] == idx[2] {
            return Err(IsoscelesError::NotDistinct);
        }
        idx.sort_unstable();
        for (a, b) in [(0, 1), (0, 2), (1, 2)] {
            let c = 3 - a - b;
            let base = self.dist(idx[a], idx[b]);
            let leg1 = self.dist(idx[a], idx[c]);
            let leg2 = self.dist(idx[b], idx[c]);
            if leg1 == leg2 && base <= leg1 {
                return Ok(IsoscelesWitness {
                    base: (self.points[idx[a]].clone(), self.points[idx[b]].clone()),
                    apex: self.points[idx[c]].clone(),
                });
            }
        }
        Err(IsoscelesError::NotIsosceles {
            x: self.points[idx[0]].clone(),
            y: self.points[idx[1]].clone(),
            z: self.points[idx[2]].clone(),
        })
    }
}

impl Deref for UltrametricSpace {
    type Target = MetricSpace;
    fn deref(&self) -> &MetricSpace {
        &self.0
    }
}

/// The isosceles shape of a triple: the (possibly shorter) base pair and the
/// apex point at equal distance from both base endpoints.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IsoscelesWitness {
    pub base: (String, String),
    pub apex: String,
}

/// Failure to classify a triple as isosceles.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum IsoscelesError {
    #[error("unknown point {0:?}")]
    UnknownPoint(String),
    #[error("the three points must be distinct")]
    NotDistinct,
    /// Impossible in a genuine ultrametric space; reachable through
    /// [`UltrametricSpace::new_unchecked`].
    #[error("triple ({x}, {y}, {z}) has no two equal sides dominating the third")]
    NotIsosceles { x: String, y: String, z: String },
}

/// A claimed scaled isometric embedding of a pattern space into a host space.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScaledCopyCert {
    /// Pattern point name -> host point name.
    pub embedding: BTreeMap<String, String>,
    /// Claimed scale factor (host distance = factor * pattern distance).
    pub factor: Rational,
}

/// Why a [`ScaledCopyCert`] fails verification.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CertError {
    #[error("scale factor {0} is not positive")]
    NonpositiveFactor(Rational),
    #[error("pattern point {0:?} has no image")]
    MissingPoint(String),
    #[error("embedding maps unknown pattern point {0:?}")]
    UnknownPatternPoint(String),
    #[error("image point {0:?} is not in the host space")]
    UnknownHostPoint(String),
    #[error("points {a:?} and {b:?} share the image {image:?}")]
    NotInjective { a: String, b: String, image: String },
    #[error("d({a}, {b}) maps to {found}, expected {expected}")]
    DistanceMismatch {
        a: String,
        b: String,
        expected: Rational,
        found: Rational,
    },
}

/// Verifies that `cert` embeds `pattern` into `host` with every distance
/// multiplied by exactly `cert.factor`.
pub fn verify_scaled_copy(
    pattern: &MetricSpace,
    host: &MetricSpace,
    cert: &ScaledCopyCert,
) -> Result<(), CertError> {
    if !cert.factor.is_positive() {
        return Err(CertError::NonpositiveFactor(cert.factor.clone()));
    }
    for key in cert.embedding.keys() {
        if pattern.index_of(key).is_none() {
            return Err(CertError::UnknownPatternPoint(key.clone()));
        }
    }
    let mut images: Vec<usize> = Vec::with_capacity(pattern.len());
    for name in pattern.points() {
        let image = cert
            .embedding
            .get(name)
            .ok_or_else(|| CertError::MissingPoint(name.clone()))?;
        let host_idx = host
            .index_of(image)
            .ok_or_else(|| CertError::UnknownHostPoint(image.clone()))?;
        images.push(host_idx);
    }
    for i in 0..pattern.len() {
        for j in (i + 1)..pattern.len() {
            if images[i] == images[j] {
                return Err(CertError::NotInjective {
                    a: pattern.points()[i].clone(),
                    b: pattern.points()[j].clone(),
                    image: host.points()[images[i]].clone(),
                });
            }
            let expected = pattern.dist(i, j) * &cert.factor;
            let found = host.dist(images[i], images[j]);
            if found != &expected {
                return Err(CertError::DistanceMismatch {
                    a: pattern.points()[i].clone(),
                    b: pattern.points()[j].clone(),
                    expected,
                    found: found.clone(),
                });
            }
        }
    }
    Ok(())
}

/// An assignment of color indices to point names.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Coloring {
    pub assignment: BTreeMap<String, usize>,
}

/// Failure of a coloring to cover a space.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ColoringError {
    #[error("point {0:?} has no color")]
    UncoloredPoint(String),
    #[error("coloring mentions unknown point {0:?}")]
    UnknownPoint(String),
}

impl Coloring {
    pub fn new(assignment: BTreeMap<String, usize>) -> Self {
        Coloring { assignment }
    }

    /// Color of a point, if assigned.
    pub fn color_of(&self, point: &str) -> Option<usize> {
        self.assignment.get(point).copied()
    }

    /// One more than the largest color index used (0 for an empty coloring).
    /// Intermediate color classes may be empty.
    pub fn num_colors(&self) -> usize {
        self.assignment.values().map(|&c| c + 1).max().unwrap_or(0)
    }

    /// Checks that every point of `space` is colored and no unknown point appears.
    pub fn validate_total(&self, space: &MetricSpace) -> Result<(), ColoringError> {
        for name in space.points() {
            if !self.assignment.contains_key(name) {
                return Err(ColoringError::UncoloredPoint(name.clone()));
            }
        }
        for name in self.assignment.keys() {
            if space.index_of(name).is_none() {
                return Err(ColoringError::UnknownPoint(name.clone()));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(s: &str) -> Rational {
        s.parse().unwrap()
    }

    fn names(list: &[&str]) -> Vec<String> {
        list.iter().map(|s| s.to_string()).collect()
    }

    fn rows(table: &[&[&str]]) -> Vec<Vec<Rational>> {
        table
            .iter()
            .map(|row| row.iter().map(|s| r(s)).collect())
            .collect()
    }

    fn three_point(dab: &str, dac: &str, dbc: &str) -> Result<MetricSpace, MetricViolation> {
        MetricSpace::new(
            names(&["a", "b", "c"]),
            rows(&[
                &["0", dab, dac],
                &[dab, "0", dbc],
                &[dac, dbc, "0"],
            ]),
        )
    }

    #[test]
    fn valid_space_builds() {
        let s = three_point("1", "2", "2").unwrap();
        assert_eq!(s.len(), 3);
        assert_eq!(s.dist(0, 1), &r("1"));
        assert_eq!(s.dist_by_name("b", "c"), Some(&r("2")));
        assert_eq!(s.diameter(), r("2"));
        assert_eq!(s.index_of("c"), Some(2));
        assert_eq!(
            s.distance_set().into_iter().collect::<Vec<_>>(),
            vec![r("1"), r("2")]
        );
    }

    #[test]
    fn empty_space_rejected() {
        assert_eq!(
            MetricSpace::new(vec![], vec![]),
            Err(MetricViolation::Empty)
        );
    }

    #[test]
    fn shape_errors_detected_in_order() {
        assert_eq!(
            MetricSpace::new(names(&["a", "b"]), rows(&[&["0", "1"]])),
            Err(MetricViolation::PointCountMismatch { rows: 1, points: 2 })
        );
        assert_eq!(
            MetricSpace::new(names(&["a", "b"]), rows(&[&["0", "1"], &["1"]])),
            Err(MetricViolation::RowLengthMismatch {
                row: 1,
                len: 1,
                expected: 2
            })
        );
        assert_eq!(
            MetricSpace::new(
                names(&["a", "a"]),
                rows(&[&["0", "1"], &["1", "0"]])
            ),
            Err(MetricViolation::DuplicatePoint("a".into()))
        );
    }

    #[test]
    fn axiom_violations_follow_scan_order() {
        // Bad diagonal is reported before the (also present) asymmetry.
        let diag = MetricSpace::new(
            names(&["a", "b"]),
            rows(&[&["0", "1"], &["2", "1"]]),
        );
        assert_eq!(
            diag,
            Err(MetricViolation::NonzeroDiagonal { point: "b".into() })
        );

        let nonpos = MetricSpace::new(
            names(&["a", "b"]),
            rows(&[&["0", "0"], &["0", "0"]]),
        );
        assert_eq!(
            nonpos,
            Err(MetricViolation::NonpositiveOffDiagonal {
                a: "a".into(),
                b: "b".into()
            })
        );

        let asym = MetricSpace::new(
            names(&["a", "b"]),
            rows(&[&["0", "1"], &["2", "0"]]),
        );
        assert_eq!(
            asym,
            Err(MetricViolation::Asymmetric {
                a: "a".into(),
                b: "b".into()
            })
        );
    }

    #[test]
    fn first_triangle_violation_is_lexicographic() {
        // d(a,b) = 1, d(a,c) = 3, d(b,c) = 1; the first failing ordered triple
        // is (a, b, c): d(a,c) = 3 > 1 + 1.
        assert_eq!(
            three_point("1", "3", "1"),
            Err(MetricViolation::Triangle {
                a: "a".into(),
                b: "b".into(),
                c: "c".into()
            })
        );
    }

    #[test]
    fn ultrametric_check_reports_first_triple() {
        // d(a,b) = 1, d(a,c) = 2, d(b,c) = 3 is a metric but not ultrametric;
        // the first failing ordered triple is (b, a, c): d(b,c) > max(1, 2).
        let m = three_point("1", "2", "3").unwrap();
        assert_eq!(
            UltrametricSpace::new(m),
            Err(UltrametricViolation {
                a: "b".into(),
                b: "a".into(),
                c: "c".into()
            })
        );
    }

    #[test]
    fn ultrametric_accepts_valid_space() {
        let m = three_point("1", "2", "2").unwrap();
        let u = UltrametricSpace::new(m).unwrap();
        assert_eq!(u.len(), 3);
    }

    #[test]
    fn isosceles_picks_first_candidate_base() {
        let u = UltrametricSpace::new(three_point("1", "2", "2").unwrap()).unwrap();
        let w = u.isosceles("a", "b", "c").unwrap();
        assert_eq!(w.base, ("a".into(), "b".into()));
        assert_eq!(w.apex, "c".to_string());

        // Argument order does not matter: the triple is canonicalized first.
        assert_eq!(u.isosceles("c", "b", "a").unwrap(), w);

        // Equilateral: the first candidate pair qualifies.
        let eq = UltrametricSpace::new(three_point("2", "2", "2").unwrap()).unwrap();
        let w = eq.isosceles("b", "c", "a").unwrap();
        assert_eq!(w.base, ("a".into(), "b".into()));
        assert_eq!(w.apex, "c".to_string());
    }

    #[test]
    fn isosceles_with_middle_base() {
        // d(a,b) = 2, d(a,c) = 1, d(b,c) = 2: base must be (a, c), apex b.
        let u = UltrametricSpace::new(three_point("2", "1", "2").unwrap()).unwrap();
        let w = u.isosceles("a", "b", "c").unwrap();
        assert_eq!(w.base, ("a".into(), "c".into()));
        assert_eq!(w.apex, "b".to_string());
    }

    #[test]
    fn isosceles_error_cases() {
        let u = UltrametricSpace::new(three_point("1", "2", "2").unwrap()).unwrap();
        assert_eq!(
            u.isosceles("a", "b", "nope"),
            Err(IsoscelesError::UnknownPoint("nope".into()))
        );
        assert_eq!(
            u.isosceles("a", "b", "a"),
            Err(IsoscelesError::NotDistinct)
        );
        // A non-ultrametric space smuggled in via new_unchecked has scalene triples.
        let bad = UltrametricSpace::new_unchecked(three_point("1", "2", "3").unwrap());
        assert!(matches!(
            bad.isosceles("a", "b", "c"),
            Err(IsoscelesError::NotIsosceles { .. })
        ));
    }

    #[test]
    fn scaling_multiplies_every_distance() {
        let s = three_point("1", "2", "2").unwrap();
        let doubled = s.scale(&r("2"));
        assert_eq!(doubled.dist(0, 1), &r("2"));
        assert_eq!(doubled.dist(0, 2), &r("4"));
        let halved = s.scale(&r("1/2"));
        assert_eq!(halved.dist(1, 2), &r("1"));
    }

    #[test]
    fn induced_subspace_keeps_selected_points() {
        let s = three_point("1", "2", "2").unwrap();
        let sub = s.induced_subspace(&[0, 2]);
        assert_eq!(sub.points(), &["a".to_string(), "c".to_string()]);
        assert_eq!(sub.dist(0, 1), &r("2"));
    }

    #[test]
    fn verify_scaled_copy_accepts_exact_match() {
        let pattern = three_point("1", "2", "2").unwrap();
        let host = pattern.scale(&r("3"));
        let cert = ScaledCopyCert {
            embedding: [("a", "a"), ("b", "b"), ("c", "c")]
                .into_iter()
                .map(|(k, v)| (k.to_string(), v.to_string()))
                .collect(),
            factor: r("3"),
        };
        assert_eq!(verify_scaled_copy(&pattern, &host, &cert), Ok(()));
    }

    #[test]
    fn verify_scaled_copy_rejects_bad_certs() {
        let pattern = three_point("1", "2", "2").unwrap();
        let host = pattern.scale(&r("3"));
        let embed = |pairs: &[(&str, &str)]| -> BTreeMap<String, String> {
            pairs
                .iter()
                .map(|(k, v)| (k.to_string(), v.to_string()))
                .collect()
        };

        let wrong_factor = ScaledCopyCert {
            embedding: embed(&[("a", "a"), ("b", "b"), ("c", "c")]),
            factor: r("2"),
        };
        assert_eq!(
            verify_scaled_copy(&pattern, &host, &wrong_factor),
            Err(CertError::DistanceMismatch {
                a: "a".into(),
                b: "b".into(),
                expected: r("2"),
                found: r("3"),
            })
        );

        let missing = ScaledCopyCert {
            embedding: embed(&[("a", "a"), ("b", "b")]),
            factor: r("3"),
        };
        assert_eq!(
            verify_scaled_copy(&pattern, &host, &missing),
            Err(CertError::MissingPoint("c".into()))
        );

        let collapsed = ScaledCopyCert {
            embedding: embed(&[("a", "a"), ("b", "a"), ("c", "c")]),
            factor: r("3"),
        };
        assert_eq!(
            verify_scaled_copy(&pattern, &host, &collapsed),
            Err(CertError::NotInjective {
                a: "a".into(),
                b: "b".into(),
                image: "a".into()
            })
        );

        let zero = ScaledCopyCert {
            embedding: embed(&[("a", "a"), ("b", "b"), ("c", "c")]),
            factor: r("0"),
        };
        assert_eq!(
            verify_scaled_copy(&pattern, &host, &zero),
            Err(CertError::NonpositiveFactor(r("0")))
        );

        let stray = ScaledCopyCert {
            embedding: embed(&[("a", "a"), ("b", "b"), ("c", "c"), ("d", "c")]),
            factor: r("3"),
        };
        assert_eq!(
            verify_scaled_copy(&pattern, &host, &stray),
            Err(CertError::UnknownPatternPoint("d".into()))
        );

        let offmap = ScaledCopyCert {
            embedding: embed(&[("a", "a"), ("b", "b"), ("c", "zz")]),
            factor: r("3"),
        };
        assert_eq!(
            verify_scaled_copy(&pattern, &host, &offmap),
            Err(CertError::UnknownHostPoint("zz".into()))
        );
    }

    #[test]
    fn coloring_counts_and_validates() {
        let s = three_point("1", "2", "2").unwrap();
        let full = Coloring::new(
            [("a", 0), ("b", 2), ("c", 0)]
                .into_iter()
                .map(|(k, v)| (k.to_string(), v))
                .collect(),
        );
        assert_eq!(full.num_colors(), 3); // color 1 is an allowed empty class
        assert_eq!(full.color_of("b"), Some(2));
        assert_eq!(full.validate_total(&s), Ok(()));

        let partial = Coloring::new([("a".to_string(), 0)].into_iter().collect());
        assert_eq!(
            partial.validate_total(&s),
            Err(ColoringError::UncoloredPoint("b".into()))
        );

        let stray = Coloring::new(
            [("a", 0), ("b", 0), ("c", 0), ("zz", 1)]
                .into_iter()
                .map(|(k, v)| (k.to_string(), v))
                .collect(),
        );
        assert_eq!(
            stray.validate_total(&s),
            Err(ColoringError::UnknownPoint("zz".into()))
        );

        assert_eq!(Coloring::new(BTreeMap::new()).num_colors(), 0);
    }
}
