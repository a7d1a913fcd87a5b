//! Finite unions of half-open intervals: test sets on the circle `[0, 2pi)`
//! and on the real line.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Intervals whose endpoints are this close are merged; shorter ones are dropped.
pub const MERGE_TOL: f64 = 1e-14;

/// Canonical finite union of half-open intervals `[a, b)` inside `[0, 2pi)`.
///
/// Intervals are sorted, pairwise disjoint and never adjacent.
#[derive(Debug, Clone, PartialEq)]
pub struct CircleSet {
    intervals: Vec<(f64, f64)>,
}

impl CircleSet {
    pub fn empty() -> Self {
        Self {
            intervals: Vec::new(),
        }
    }

    pub fn full() -> Self {
        Self {
            intervals: vec![(0.0, TAU)],
        }
    }

    /// Single interval `[a, b)`; `a > b` wraps through zero.
    pub fn interval(a: f64, b: f64) -> Result<Self> {
        Self::normalize(&[(a, b)])
    }

    /// Canonicalizes an arbitrary list of pairs.
    ///
    /// A pair with `a > b` stands for `[a, 2pi) U [0, b)`.
    pub fn normalize(raw: &[(f64, f64)]) -> Result<Self> {
        let mut pieces = Vec::with_capacity(raw.len() + 1);
        for &(a, b) in raw {
            let a = check_endpoint(a)?;
            let b = check_endpoint(b)?;
            if a > b {
                pieces.push((a, TAU));
                pieces.push((0.0, b));
            } else {
                pieces.push((a, b));
            }
        }
        Ok(Self {
            intervals: merge(pieces),
        })
    }

    pub fn intervals(&self) -> &[(f64, f64)] {
        &self.intervals
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty()
    }

    /// Lebesgue measure.
    pub fn measure(&self) -> f64 {
        self.intervals.iter().map(|(a, b)| b - a).sum()
    }

    pub fn contains(&self, x: f64) -> bool {
        let x = x.rem_euclid(TAU);
        self.intervals.iter().any(|&(a, b)| a <= x && x < b)
    }

    /// Rotation `X + x` modulo `2pi`.
    pub fn shift(&self, x: f64) -> Self {
        let x = x.rem_euclid(TAU);
        if x == 0.0 {
            return self.clone();
        }
        let mut pieces = Vec::with_capacity(self.intervals.len() + 1);
        for &(a, b) in &self.intervals {
            let (a, b) = (a + x, b + x);
            if a >= TAU {
                pieces.push((a - TAU, b - TAU));
            } else if b > TAU {
                pieces.push((a, TAU));
                pieces.push((0.0, b - TAU));
            } else {
                pieces.push((a, b));
            }
        }
        Self {
            intervals: merge(pieces),
        }
    }

    pub fn complement(&self) -> Self {
        let mut out = Vec::with_capacity(self.intervals.len() + 1);
        let mut cursor = 0.0;
        for &(a, b) in &self.intervals {
            if a > cursor {
                out.push((cursor, a));
            }
            cursor = b;
        }
        if cursor < TAU {
            out.push((cursor, TAU));
        }
        Self {
            intervals: merge(out),
        }
    }

    pub fn union(&self, other: &Self) -> Self {
        let mut pieces = self.intervals.clone();
        pieces.extend_from_slice(&other.intervals);
        Self {
            intervals: merge(pieces),
        }
    }

    pub fn intersection(&self, other: &Self) -> Self {
        Self {
            intervals: merge(intersect_lists(&self.intervals, &other.intervals)),
        }
    }

    pub fn is_disjoint(&self, other: &Self) -> bool {
        self.intersection(other).measure() <= MERGE_TOL
    }

    /// `c_X(d) = (1/2pi) * integral over X of e^{i d x} dx`.
    pub fn fourier_coefficient(&self, d: i64) -> Complex64 {
        let d = d as f64;
        self.intervals
            .iter()
            .map(|&(a, b)| {
                let mid = 0.5 * (a + b);
                let half = 0.5 * (b - a);
                if d == 0.0 {
                    Complex64::new(half / PI, 0.0)
                } else {
                    // (e^{idb} - e^{ida}) / (2 pi i d) written around the midpoint.
                    Complex64::from_polar((d * half).sin() / (PI * d), d * mid)
                }
            })
            .sum()
    }

    pub fn to_real_set(&self) -> RealSet {
        RealSet {
            intervals: self.intervals.clone(),
        }
    }
}

fn check_endpoint(x: f64) -> Result<f64> {
    if !x.is_finite() {
        return Err(Error::NonFiniteEndpoint);
    }
    if !(-MERGE_TOL..=TAU + MERGE_TOL).contains(&x) {
        return Err(Error::EndpointOutOfRange { value: x });
    }
    Ok(x.clamp(0.0, TAU))
}

/// Sort, drop degenerate pieces and merge overlapping or touching ones.
fn merge(mut pieces: Vec<(f64, f64)>) -> Vec<(f64, f64)> {
    pieces.retain(|&(a, b)| b - a > MERGE_TOL);
    pieces.sort_by(|x, y| x.0.total_cmp(&y.0).then(x.1.total_cmp(&y.1)));
    let mut out: Vec<(f64, f64)> = Vec::with_capacity(pieces.len());
    for (a, b) in pieces {
        match out.last_mut() {
            Some(last) if a <= last.1 + MERGE_TOL => last.1 = last.1.max(b),
            _ => out.push((a, b)),
        }
    }
    out
}

fn intersect_lists(x: &[(f64, f64)], y: &[(f64, f64)]) -> Vec<(f64, f64)> {
    let mut out = Vec::new();
    let (mut i, mut j) = (0, 0);
    while i < x.len() && j < y.len() {
        let lo = x[i].0.max(y[j].0);
        let hi = x[i].1.min(y[j].1);
        if hi > lo {
            out.push((lo, hi));
        }
        if x[i].1 < y[j].1 {
            i += 1;
        } else {
            j += 1;
        }
    }
    out
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CircleSetRepr {
    intervals: Vec<[f64; 2]>,
}

impl Serialize for CircleSet {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        CircleSetRepr {
            intervals: self.intervals.iter().map(|&(a, b)| [a, b]).collect(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for CircleSet {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let repr = CircleSetRepr::deserialize(deserializer)?;
        let raw: Vec<(f64, f64)> = repr.intervals.iter().map(|p| (p[0], p[1])).collect();
        CircleSet::normalize(&raw).map_err(serde::de::Error::custom)
    }
}

/// Canonical finite union of half-open intervals `[a, b)` on the real line.
/// Endpoints may be infinite.
#[derive(Debug, Clone, PartialEq)]
pub struct RealSet {
    intervals: Vec<(f64, f64)>,
}

impl RealSet {
    pub fn empty() -> Self {
        Self {
            intervals: Vec::new(),
        }
    }

    pub fn whole_line() -> Self {
        Self {
            intervals: vec![(f64::NEG_INFINITY, f64::INFINITY)],
        }
    }

    pub fn interval(a: f64, b: f64) -> Result<Self> {
        Self::normalize(&[(a, b)])
    }

    /// Pairs with `a >= b` are empty; NaN endpoints are rejected.
    pub fn normalize(raw: &[(f64, f64)]) -> Result<Self> {
        if raw.iter().any(|(a, b)| a.is_nan() || b.is_nan()) {
            return Err(Error::NonFiniteEndpoint);
        }
        let pieces = raw.iter().copied().filter(|(a, b)| a < b).collect();
        Ok(Self {
            intervals: merge(pieces),
        })
    }

    pub fn intervals(&self) -> &[(f64, f64)] {
        &self.intervals
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty()
    }

    pub fn contains(&self, x: f64) -> bool {
        self.intervals.iter().any(|&(a, b)| a <= x && x < b)
    }

    pub fn shift(&self, x: f64) -> Self {
        Self {
            intervals: self
                .intervals
                .iter()
                .map(|&(a, b)| (a + x, b + x))
                .collect(),
        }
    }

    pub fn union(&self, other: &Self) -> Self {
        let mut pieces = self.intervals.clone();
        pieces.extend_from_slice(&other.intervals);
        Self {
            intervals: merge(pieces),
        }
    }

    pub fn intersection(&self, other: &Self) -> Self {
        Self {
            intervals: merge(intersect_lists(&self.intervals, &other.intervals)),
        }
    }

    pub fn complement(&self) -> Self {
        let mut out = Vec::new();
        let mut cursor = f64::NEG_INFINITY;
        for &(a, b) in &self.intervals {
            if a > cursor {
                out.push((cursor, a));
            }
            cursor = b;
        }
        if cursor < f64::INFINITY {
            out.push((cursor, f64::INFINITY));
        }
        Self {
            intervals: merge(out),
        }
    }

    pub fn is_subset_of(&self, other: &Self) -> bool {
        self.intervals
            .iter()
            .all(|&(a, b)| other.intervals.iter().any(|&(c, d)| c <= a && b <= d))
    }
}

/// JSON form `{"intervals": [[a, b], ...]}`; `null` marks an unbounded end.
#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RealSetRepr {
    intervals: Vec<[Option<f64>; 2]>,
}

impl Serialize for RealSet {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let finite = |x: f64| x.is_finite().then_some(x);
        RealSetRepr {
            intervals: self
                .intervals
                .iter()
                .map(|&(a, b)| [finite(a), finite(b)])
                .collect(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for RealSet {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let repr = RealSetRepr::deserialize(deserializer)?;
        let raw: Vec<(f64, f64)> = repr
            .intervals
            .iter()
            .map(|[a, b]| (a.unwrap_or(f64::NEG_INFINITY), b.unwrap_or(f64::INFINITY)))
            .collect();
        RealSet::normalize(&raw).map_err(serde::de::Error::custom)
    }
}
