//! Interval partitions `(b_n, b_{n-1}]` of (0,1] and their statistics.

use std::collections::BTreeSet;

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::{self, frac, int, one, pow2, powi, zero, Q};

/// Exponent rules `n ↦ m_n` for dyadic-exponent partitions `b_n = 2^-m_n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExpRule {
    /// `m_n = n`
    Linear,
    /// `m_n = n^2`
    Square,
}

impl ExpRule {
    pub fn exponent(&self, n: u64) -> u64 {
        match self {
            ExpRule::Linear => n,
            ExpRule::Square => n * n,
        }
    }
}

/// Exponent sequence `0 = m_0 < m_1 < ...`, given by rule or explicitly.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Exponents {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rule: Option<ExpRule>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub exponents: Option<Vec<u64>>,
}

impl Exponents {
    pub fn rule(rule: ExpRule) -> Self {
        Self { rule: Some(rule), exponents: None }
    }

    pub fn list(exps: Vec<u64>) -> Self {
        Self { rule: None, exponents: Some(exps) }
    }

    /// `m_0..m_depth` (fewer if an explicit list is shorter).
    pub fn take(&self, depth: usize) -> Result<Vec<u64>> {
        let out: Vec<u64> = match (&self.rule, &self.exponents) {
            (Some(r), None) => (0..=depth as u64).map(|n| r.exponent(n)).collect(),
            (None, Some(xs)) => xs.iter().take(depth + 1).copied().collect(),
            _ => {
                return Err(Error::Invalid(
                    "dyadic_exp needs exactly one of \"rule\" or \"exponents\"".into(),
                ))
            }
        };
        if out.first() != Some(&0) {
            return Err(Error::Invalid("exponents must start with m_0 = 0".into()));
        }
        if out.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Invalid("exponents must be strictly increasing".into()));
        }
        Ok(out)
    }
}

/// Generator for an interval partition; materialize with an explicit depth.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum IntervalPartition {
    Explicit {
        #[serde(with = "rational::serde_q::vec")]
        points: Vec<Q>,
    },
    Geometric {
        #[serde(with = "rational::serde_q")]
        p: Q,
    },
    DyadicExp(Exponents),
    /// `k` points `2^-k (1 + i/k)`, `i = 1..k`, in each `D_k`.
    Clustered,
}

impl IntervalPartition {
    pub fn explicit(points: Vec<Q>) -> Self {
        IntervalPartition::Explicit { points }
    }

    pub fn geometric(p: Q) -> Self {
        IntervalPartition::Geometric { p }
    }

    pub fn dyadic_rule(rule: ExpRule) -> Self {
        IntervalPartition::DyadicExp(Exponents::rule(rule))
    }

    pub fn dyadic_list(exps: Vec<u64>) -> Self {
        IntervalPartition::DyadicExp(Exponents::list(exps))
    }

    /// Points `b_0 = 1 > ... > b_N`. `depth` is the number of generated points
    /// after `b_0` (clusters for `Clustered`); explicit lists are cut to it.
    pub fn materialize(&self, depth: usize) -> Result<Partition> {
        match self {
            IntervalPartition::Explicit { points } => {
                let n = points.len().min(depth + 1);
                Partition::new(points[..n].to_vec())
            }
            IntervalPartition::Geometric { p } => {
                if !p.is_positive() || *p >= one() {
                    return Err(Error::Invalid("geometric ratio must lie in (0,1)".into()));
                }
                Partition::new((0..=depth as u32).map(|n| powi(p, n)).collect())
            }
            IntervalPartition::DyadicExp(e) => {
                Partition::new(e.take(depth)?.into_iter().map(|m| pow2(-(m as i64))).collect())
            }
            IntervalPartition::Clustered => {
                let mut pts = Vec::new();
                for k in 1..=depth.max(1) as i64 {
                    for i in (1..=k).rev() {
                        pts.push(pow2(-k) * (one() + frac(i, k)));
                    }
                }
                Partition::new(pts)
            }
        }
    }
}

/// A materialized partition prefix `1 = b_0 > b_1 > ... > b_N >= 0`. When
/// `b_N > 0` the interval `(0, b_N]` is unresolved tail mass.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Partition {
    points: Vec<Q>,
}

impl Serialize for Partition {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        IntervalPartition::explicit(self.points.clone()).serialize(s)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct StochasticVector {
    #[serde(with = "rational::serde_q::vec")]
    pub coords: Vec<Q>,
    #[serde(with = "rational::serde_q")]
    pub tail: Q,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Refinement {
    Yes,
    No,
    Indeterminate,
}

impl Partition {
    pub fn new(points: Vec<Q>) -> Result<Self> {
        if points.first().map(|p| p.is_one()) != Some(true) {
            return Err(Error::Invalid("partition must start at b_0 = 1".into()));
        }
        if points.windows(2).any(|w| w[1] >= w[0]) {
            return Err(Error::Invalid("partition points must be strictly decreasing".into()));
        }
        if points.last().unwrap().is_negative() {
            return Err(Error::Invalid("partition points must be >= 0".into()));
        }
        Ok(Self { points })
    }

    /// Partition with the given cell lengths laid out from 1 downward.
    pub fn from_lengths(lengths: &[Q]) -> Result<Self> {
        let mut pts = vec![one()];
        let mut at = one();
        for l in lengths {
            at -= l;
            pts.push(at.clone());
        }
        Self::new(pts)
    }

    /// The two-cell partition `{1, 1/2, 0}` used in many examples.
    pub fn halves() -> Self {
        Self { points: vec![one(), frac(1, 2), zero()] }
    }

    pub fn points(&self) -> &[Q] {
        &self.points
    }

    /// Number of cells `N`.
    pub fn depth(&self) -> usize {
        self.points.len() - 1
    }

    pub fn tail(&self) -> &Q {
        self.points.last().unwrap()
    }

    pub fn is_finite(&self) -> bool {
        self.tail().is_zero()
    }

    pub fn betas(&self) -> Vec<Q> {
        self.points.windows(2).map(|w| &w[0] - &w[1]).collect()
    }

    pub fn stochastic_vector(&self) -> StochasticVector {
        StochasticVector { coords: self.betas(), tail: self.tail().clone() }
    }

    /// Cells `(b_n, b_{n-1}]` for `n = 1..N` as `(lo, hi)`.
    pub fn cells(&self) -> Vec<(Q, Q)> {
        self.points.windows(2).map(|w| (w[1].clone(), w[0].clone())).collect()
    }

    /// Cells including the unresolved tail `(0, b_N]` when `b_N > 0`.
    pub fn cells_with_tail(&self) -> Vec<(Q, Q)> {
        let mut c = self.cells();
        if !self.is_finite() {
            c.push((zero(), self.tail().clone()));
        }
        c
    }

    /// Cell index `n` (1-based) with `b_n < t <= b_{n-1}`; `None` in the tail.
    pub fn cell_of(&self, t: &Q) -> Option<usize> {
        if *t <= *self.tail() || *t > one() {
            return None;
        }
        // points descending: count of points >= t
        let idx = self.points.partition_point(|p| p >= t);
        Some(idx)
    }

    /// Positive points `b_n > 0`.
    pub fn positive_points(&self) -> impl Iterator<Item = &Q> {
        self.points.iter().filter(|p| p.is_positive())
    }
}

/// `B*`: lengths sorted non-increasing; the tail stays last and must not
/// exceed the smallest materialized length.
pub fn monotone_rearrangement(b: &Partition) -> Result<Partition> {
    let mut lens = b.betas();
    lens.sort_by(|x, y| y.cmp(x));
    if !b.is_finite() {
        if let Some(min) = lens.last() {
            if b.tail() > min {
                return Err(Error::TailDominates {
                    depth: b.depth(),
                    tail: rational::fmt(b.tail()),
                });
            }
        }
    }
    Partition::from_lengths(&lens)
}

/// Dyadic projection: each positive point snapped down to the largest dyadic
/// point `2^-k <= b_n`, duplicates removed.
pub fn dyadic_projection(b: &Partition) -> Result<IntervalPartition> {
    let mut exps: BTreeSet<u64> = BTreeSet::new();
    for p in b.positive_points() {
        exps.insert(rational::dyadic_floor_exp(p)?);
    }
    Ok(IntervalPartition::dyadic_list(exps.into_iter().collect()))
}

/// `max_n b_{n-1}/b_n` over positive points; `1/p` for geometric partitions.
pub fn verifying_ratio(b: &IntervalPartition, depth: usize) -> Result<Q> {
    if depth == 0 {
        return Err(Error::Depth("verifying_ratio needs depth >= 1".into()));
    }
    if let IntervalPartition::Geometric { p } = b {
        if !p.is_positive() || *p >= one() {
            return Err(Error::Invalid("geometric ratio must lie in (0,1)".into()));
        }
        return Ok(one() / p);
    }
    Ok(partition_verifying_ratio(&b.materialize(depth)?))
}

pub fn partition_verifying_ratio(b: &Partition) -> Q {
    b.points
        .windows(2)
        .filter(|w| w[1].is_positive())
        .map(|w| &w[0] / &w[1])
        .max()
        .unwrap_or_else(one)
}

/// `[v]`: integer part plus one.
fn bracket_int(v: &Q) -> Q {
    Q::from_integer(v.floor().to_integer()) + one()
}

/// Refines every cell `B_k` with `b_k > 0` into `[β_k/b_k]` equal pieces.
/// A final cell reaching 0 is kept whole.
pub fn finer_verifying(b: &Partition) -> Partition {
    let mut pts = vec![one()];
    for (lo, hi) in b.cells() {
        if lo.is_positive() {
            let beta = &hi - &lo;
            let m = bracket_int(&(&beta / &lo));
            let step = &beta / &m;
            let count: i64 = m.to_integer().try_into().unwrap_or(i64::MAX);
            for j in (0..count).rev() {
                pts.push(&lo + &step * int(j));
            }
        } else {
            pts.push(lo);
        }
    }
    Partition::new(pts).expect("refinement of a valid partition")
}

/// Largest length-to-point ratio `(β_k/[β_k/b_k]) / b_k` used by
/// `finer_verifying`; the refined partition's verifying ratio is at most one
/// plus this value.
pub fn finer_verifying_bound(b: &Partition) -> Q {
    b.cells()
        .into_iter()
        .filter(|(lo, _)| lo.is_positive())
        .map(|(lo, hi)| {
            let beta = &hi - &lo;
            let m = bracket_int(&(&beta / &lo));
            beta / m / lo
        })
        .max()
        .map(|r| one() + r)
        .unwrap_or_else(one)
}

/// `ϖ(k) = max_{n <= N-k} t_{n+k}/t_n`.
pub fn omega(t: &Partition, k: usize) -> Result<Q> {
    if k == 0 || t.depth() < k {
        return Err(Error::Depth(format!("omega({k}) needs depth > {k}")));
    }
    let pts = t.points();
    Ok((0..=pts.len() - 1 - k)
        .filter(|&n| pts[n].is_positive())
        .map(|n| &pts[n + k] / &pts[n])
        .max()
        .unwrap_or_else(zero))
}

/// Number of points of the partition in `D_k = (2^-k, 2^-k+1]`.
pub fn q_count(t: &Partition, k: u64) -> usize {
    if k == 0 {
        return 0;
    }
    let lo = pow2(-(k as i64));
    let hi = pow2(-(k as i64) + 1);
    t.points.iter().filter(|p| **p > lo && **p <= hi).count()
}

/// Whether every point of `b` is a point of `a`. A generated `a` is
/// materialized deep enough to reach `b`'s smallest positive point when that
/// is possible within a bounded number of steps.
pub fn is_refinement(a: &IntervalPartition, b: &IntervalPartition, depth: usize) -> Result<Refinement> {
    let bm = b.materialize(depth)?;
    let smallest = bm.positive_points().min().cloned().unwrap_or_else(one);
    let mut d = depth;
    let mut am = a.materialize(d)?;
    let cap = depth.max(1) * 64;
    while am.tail() > &smallest && d < cap && !matches!(a, IntervalPartition::Explicit { .. }) {
        d = (d * 2).min(cap);
        am = a.materialize(d)?;
    }
    Ok(partition_refines(&am, &bm))
}

pub fn partition_refines(a: &Partition, b: &Partition) -> Refinement {
    let set: BTreeSet<&Q> = a.points.iter().collect();
    let mut beyond = false;
    for p in &b.points {
        if set.contains(p) {
            continue;
        }
        if p < a.tail() {
            beyond = true;
        } else {
            return Refinement::No;
        }
    }
    if beyond {
        Refinement::Indeterminate
    } else {
        Refinement::Yes
    }
}
