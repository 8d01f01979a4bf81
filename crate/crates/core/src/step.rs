//! Step functions on (0,1] with exact breakpoints.
//!
//! Internally the points are stored ascending, `0 = p_0 < p_1 < ... < p_N = 1`,
//! with `values[j]` taken on `(p_j, p_{j+1}]`. The serialized form lists the
//! breakpoints descending from 1, as users write them.

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::{self, one, zero, Q};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct StepFunction {
    points: Vec<Q>,
    values: Vec<Q>,
}

#[derive(Serialize, Deserialize)]
struct Wire {
    #[serde(with = "rational::serde_q::vec")]
    breakpoints: Vec<Q>,
    #[serde(with = "rational::serde_q::vec")]
    values: Vec<Q>,
}

impl Serialize for StepFunction {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let (breakpoints, values) = self.descending();
        Wire { breakpoints, values }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for StepFunction {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let w = Wire::deserialize(d)?;
        StepFunction::new(w.breakpoints, w.values).map_err(serde::de::Error::custom)
    }
}

impl StepFunction {
    /// `breakpoints` is `1 = t_0 > t_1 > ... > t_N >= 0`, `values[i-1]` is the
    /// value on `(t_i, t_{i-1}]`; the function is 0 on `(0, t_N]`.
    pub fn new(breakpoints: Vec<Q>, values: Vec<Q>) -> Result<Self> {
        if breakpoints.len() < 2 || values.len() + 1 != breakpoints.len() {
            return Err(Error::Invalid(
                "need breakpoints 1 = t_0 > ... > t_N and N values".into(),
            ));
        }
        if !breakpoints[0].is_one() {
            return Err(Error::Invalid("first breakpoint must be 1".into()));
        }
        for w in breakpoints.windows(2) {
            if w[1] >= w[0] {
                return Err(Error::Invalid(
                    "breakpoints must be strictly decreasing (zero-length pieces are not allowed)"
                        .into(),
                ));
            }
        }
        if breakpoints.last().unwrap().is_negative() {
            return Err(Error::Invalid("breakpoints must be >= 0".into()));
        }
        let mut points: Vec<Q> = breakpoints.into_iter().rev().collect();
        let mut values: Vec<Q> = values.into_iter().rev().collect();
        if !points[0].is_zero() {
            points.insert(0, zero());
            values.insert(0, zero());
        }
        Ok(Self::canonical(points, values))
    }

    /// Builds from ascending points `0 = p_0 < ... < p_N = 1`.
    pub fn from_ascending(points: Vec<Q>, values: Vec<Q>) -> Result<Self> {
        if points.len() != values.len() + 1 || points.len() < 2 {
            return Err(Error::Invalid("points/values length mismatch".into()));
        }
        if !points[0].is_zero() || !points.last().unwrap().is_one() {
            return Err(Error::Invalid("ascending points must run from 0 to 1".into()));
        }
        if points.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Invalid("points must be strictly increasing".into()));
        }
        Ok(Self::canonical(points, values))
    }

    /// Pieces laid out from 0 upward with the given lengths; any remaining
    /// length up to 1 is filled with 0. Zero lengths are skipped.
    pub fn from_lengths(pieces: &[(Q, Q)]) -> Result<Self> {
        let mut points = vec![zero()];
        let mut values = Vec::new();
        let mut at = zero();
        for (len, v) in pieces {
            if len.is_negative() {
                return Err(Error::Invalid("negative piece length".into()));
            }
            if len.is_zero() {
                continue;
            }
            at += len;
            points.push(at.clone());
            values.push(v.clone());
        }
        if at > one() {
            return Err(Error::Invalid(format!(
                "piece lengths sum to {} > 1",
                rational::fmt(&at)
            )));
        }
        if at < one() {
            points.push(one());
            values.push(zero());
        }
        Ok(Self::canonical(points, values))
    }

    pub fn constant(c: Q) -> Self {
        Self { points: vec![zero(), one()], values: vec![c] }
    }

    /// `c` on `(0, s]` and 0 on `(s, 1]`.
    pub fn indicator_head(s: &Q, c: Q) -> Result<Self> {
        Self::from_lengths(&[(s.clone(), c)])
    }

    fn canonical(points: Vec<Q>, values: Vec<Q>) -> Self {
        let mut p = vec![points[0].clone()];
        let mut v: Vec<Q> = Vec::new();
        for (j, val) in values.into_iter().enumerate() {
            if v.last() == Some(&val) {
                *p.last_mut().unwrap() = points[j + 1].clone();
            } else {
                v.push(val);
                p.push(points[j + 1].clone());
            }
        }
        Self { points: p, values: v }
    }

    /// Breakpoints descending from 1 and the matching values.
    pub fn descending(&self) -> (Vec<Q>, Vec<Q>) {
        (
            self.points.iter().rev().cloned().collect(),
            self.values.iter().rev().cloned().collect(),
        )
    }

    pub fn points(&self) -> &[Q] {
        &self.points
    }

    pub fn values(&self) -> &[Q] {
        &self.values
    }

    /// `(lo, hi, value)` for each piece `(lo, hi]`, ascending.
    pub fn pieces(&self) -> impl Iterator<Item = (&Q, &Q, &Q)> {
        self.values
            .iter()
            .enumerate()
            .map(move |(j, v)| (&self.points[j], &self.points[j + 1], v))
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    fn piece_index(&self, t: &Q) -> usize {
        // first j with p_{j+1} >= t
        self.points[1..].partition_point(|p| p < t)
    }

    pub fn evaluate(&self, t: &Q) -> Result<Q> {
        if !t.is_positive() || *t > one() {
            return Err(Error::OutOfDomain(rational::fmt(t)));
        }
        Ok(self.values[self.piece_index(t)].clone())
    }

    /// Value on the piece just right of 0, `f(0+)`.
    pub fn head(&self) -> &Q {
        &self.values[0]
    }

    /// Value at `t` for `t` in (0,1], and 0 beyond 1 (the dilation convention).
    pub fn value_or_zero(&self, t: &Q) -> Q {
        if *t > one() || !t.is_positive() {
            zero()
        } else {
            self.values[self.piece_index(t)].clone()
        }
    }

    pub fn rearrange_decreasing(&self) -> Self {
        let mut pieces: Vec<(Q, Q)> = self
            .pieces()
            .map(|(lo, hi, v)| (v.abs(), hi - lo))
            .collect();
        pieces.sort_by(|a, b| b.0.cmp(&a.0));
        let pieces: Vec<(Q, Q)> = pieces.into_iter().map(|(v, l)| (l, v)).collect();
        Self::from_lengths(&pieces).expect("lengths of a valid function sum to 1")
    }

    pub fn is_non_increasing(&self) -> bool {
        self.values.windows(2).all(|w| w[1] <= w[0])
    }

    pub fn is_non_negative(&self) -> bool {
        self.values.iter().all(|v| !v.is_negative())
    }

    /// `∫_0^t f` for `0 <= t <= 1` (clamped).
    pub fn prefix_integral(&self, t: &Q) -> Q {
        let mut acc = zero();
        for (lo, hi, v) in self.pieces() {
            if lo >= t {
                break;
            }
            let top = if hi < t { hi } else { t };
            acc += v * (top - lo);
        }
        acc
    }

    /// `∫_a^b f` for `0 <= a <= b <= 1`.
    pub fn integral_between(&self, a: &Q, b: &Q) -> Q {
        self.prefix_integral(b) - self.prefix_integral(a)
    }

    pub fn integral(&self) -> Q {
        self.prefix_integral(&one())
    }

    pub fn l1_norm(&self) -> Q {
        self.pieces().map(|(lo, hi, v)| v.abs() * (hi - lo)).sum()
    }

    /// `f**(t) = (1/t) ∫_0^t f*`.
    pub fn double_star(&self, t: &Q) -> Result<Q> {
        if !t.is_positive() || *t > one() {
            return Err(Error::OutOfDomain(rational::fmt(t)));
        }
        if self.is_non_increasing() && self.is_non_negative() {
            Ok(self.prefix_integral(t) / t)
        } else {
            Ok(self.rearrange_decreasing().prefix_integral(t) / t)
        }
    }

    /// `f**` sampled at each grid point.
    pub fn double_star_fn(&self, grid: &[Q]) -> Result<Vec<(Q, Q)>> {
        let fs = self.rearrange_decreasing();
        grid.iter()
            .map(|t| {
                if !t.is_positive() || *t > one() {
                    Err(Error::OutOfDomain(rational::fmt(t)))
                } else {
                    Ok((t.clone(), fs.prefix_integral(t) / t))
                }
            })
            .collect()
    }

    /// `(ρ_s f)(t) = f(st)` when `st <= 1`, else 0.
    pub fn dilate(&self, s: &Q) -> Result<Self> {
        if !s.is_positive() {
            return Err(Error::Invalid("dilation factor must be positive".into()));
        }
        let mut points = vec![zero()];
        let mut values = Vec::new();
        for (_, hi, v) in self.pieces() {
            let p = hi / s;
            if p >= one() {
                points.push(one());
                values.push(v.clone());
                break;
            }
            points.push(p);
            values.push(v.clone());
        }
        if points.last().unwrap() < &one() {
            points.push(one());
            values.push(zero());
        }
        Self::from_ascending(points, values)
    }

    /// Sorted union of the breakpoints of both functions.
    pub fn merged_points(&self, other: &Self) -> Vec<Q> {
        let mut out: Vec<Q> = self.points.iter().chain(other.points.iter()).cloned().collect();
        out.sort();
        out.dedup();
        out
    }

    pub fn zip_with(&self, other: &Self, op: impl Fn(&Q, &Q) -> Q) -> Self {
        let points = self.merged_points(other);
        let values = points
            .windows(2)
            .map(|w| {
                let i = self.piece_index(&w[1]);
                let j = other.piece_index(&w[1]);
                op(&self.values[i], &other.values[j])
            })
            .collect();
        Self::canonical(points, values)
    }

    pub fn map(&self, op: impl Fn(&Q) -> Q) -> Self {
        Self::canonical(self.points.clone(), self.values.iter().map(op).collect())
    }

    pub fn add(&self, other: &Self) -> Self {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn scale(&self, c: &Q) -> Self {
        self.map(|v| v * c)
    }

    pub fn abs(&self) -> Self {
        self.map(|v| v.abs())
    }

    /// `self <= other` at every point of (0,1].
    pub fn le_everywhere(&self, other: &Self) -> bool {
        let points = self.merged_points(other);
        points.windows(2).all(|w| {
            self.values[self.piece_index(&w[1])] <= other.values[other.piece_index(&w[1])]
        })
    }

    /// Whether `y ≺ x`: `∫_0^t y* <= ∫_0^t x*` for all `t`.
    pub fn majorizes(&self, y: &Self) -> bool {
        let xs = self.rearrange_decreasing();
        let ys = y.rearrange_decreasing();
        xs.merged_points(&ys)
            .iter()
            .all(|t| ys.prefix_integral(t) <= xs.prefix_integral(t))
    }

    pub fn equimeasurable(&self, other: &Self) -> bool {
        self.rearrange_decreasing() == other.rearrange_decreasing()
    }

    /// `f∘A^{-1}` placed on `(lo, hi]`: the value at `lo + (hi-lo)s` is `f(s)`;
    /// 0 outside `(lo, hi]`.
    pub fn affine_copy(&self, lo: &Q, hi: &Q) -> Result<Self> {
        if lo >= hi || lo.is_negative() || *hi > one() {
            return Err(Error::Invalid("affine_copy needs 0 <= lo < hi <= 1".into()));
        }
        let len = hi - lo;
        let mut points = Vec::new();
        let mut values = Vec::new();
        if lo.is_positive() {
            points.push(zero());
            values.push(zero());
        }
        for (p, v) in self.points.iter().zip(self.values.iter()) {
            points.push(lo + &len * p);
            values.push(v.clone());
        }
        points.push(hi.clone());
        if *hi < one() {
            values.push(zero());
            points.push(one());
        }
        Self::from_ascending(points, values)
    }

    /// The function `s ↦ f(lo + (hi-lo)s)` on (0,1].
    pub fn restrict_rescaled(&self, lo: &Q, hi: &Q) -> Result<Self> {
        if lo >= hi || lo.is_negative() || *hi > one() {
            return Err(Error::Invalid("restrict needs 0 <= lo < hi <= 1".into()));
        }
        let len = hi - lo;
        let mut points = vec![zero()];
        let mut values = Vec::new();
        for (a, b, v) in self.pieces() {
            if b <= lo {
                continue;
            }
            if a >= hi {
                break;
            }
            let top = if b < hi { b } else { hi };
            points.push((top - lo) / &len);
            values.push(v.clone());
        }
        Self::from_ascending(points, values)
    }

    /// Sup norm `max |v|`.
    pub fn sup_abs(&self) -> Q {
        self.values.iter().map(|v| v.abs()).max().unwrap_or_else(zero)
    }

    /// Right end of the support of a non-increasing non-negative function:
    /// the largest point where the function is still positive.
    pub fn support_end(&self) -> Q {
        let mut end = zero();
        for (_, hi, v) in self.pieces() {
            if v.is_positive() {
                end = hi.clone();
            }
        }
        end
    }
}
