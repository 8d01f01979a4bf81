//! Functions constant on the binary intervals `D_n = (2^-n, 2^-n+1]`, and the
//! truncated non-increasing profile that downstream criteria evaluate.

use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::{self, frac, int, one, pow2, powi, zero, Q};
use crate::step::StepFunction;

/// Named value rules `n ↦ a_n` on `D_n`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DyadicRule {
    Constant {
        #[serde(with = "rational::serde_q")]
        c: Q,
    },
    /// `a_n = first * ratio^(n-1)`; requires `ratio < 2` for integrability.
    Geometric {
        #[serde(with = "rational::serde_q")]
        first: Q,
        #[serde(with = "rational::serde_q")]
        ratio: Q,
    },
    /// `a_n = 2^m / m^2` with `m = max(n, 3)`: the non-decreasing minorant of
    /// `2^n / n^2`, which dips at `n = 2, 3`.
    PowerOverSquare,
    /// `a_n = n * h`.
    Linear {
        #[serde(with = "rational::serde_q")]
        h: Q,
    },
    /// Explicit values `a_1..a_L`; `tail` is the exact mass on `(0, 2^-L]`
    /// and `next` a lower bound for the function there.
    Explicit {
        #[serde(with = "rational::serde_q::vec")]
        values: Vec<Q>,
        #[serde(with = "rational::serde_q")]
        tail: Q,
        #[serde(with = "rational::serde_q")]
        next: Q,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DyadicSpec {
    pub rule: DyadicRule,
    pub depth: usize,
}

impl DyadicSpec {
    pub fn materialize(&self) -> Result<DyadicFamily> {
        self.rule.materialize(self.depth)
    }
}

impl DyadicRule {
    pub fn value(&self, n: usize) -> Result<Q> {
        if n == 0 {
            return Err(Error::Invalid("dyadic ranks start at 1".into()));
        }
        Ok(match self {
            DyadicRule::Constant { c } => c.clone(),
            DyadicRule::Geometric { first, ratio } => first * powi(ratio, n as u32 - 1),
            DyadicRule::PowerOverSquare => {
                let m = n.max(3);
                pow2(m as i64) / int((m * m) as i64)
            }
            DyadicRule::Linear { h } => h * int(n as i64),
            DyadicRule::Explicit { values, next, .. } => {
                if n <= values.len() {
                    values[n - 1].clone()
                } else if n == values.len() + 1 {
                    next.clone()
                } else {
                    return Err(Error::Depth(format!(
                        "explicit family has {} values, rank {n} requested",
                        values.len()
                    )));
                }
            }
        })
    }

    /// Bracket `[lo, hi]` on `Σ_{n>depth} a_n 2^-n`.
    pub fn tail_bracket(&self, depth: usize) -> Result<(Q, Q)> {
        let k = depth as i64;
        Ok(match self {
            DyadicRule::Constant { c } => {
                let t = c * pow2(-k);
                (t.clone(), t)
            }
            DyadicRule::Geometric { first, ratio } => {
                if *ratio >= int(2) {
                    return Err(Error::Invalid("geometric ratio must be < 2".into()));
                }
                let t = first * powi(ratio, depth as u32) * pow2(-k) / (int(2) - ratio);
                (t.clone(), t)
            }
            DyadicRule::PowerOverSquare => {
                if depth == 0 {
                    return Err(Error::Depth("power-over-square needs depth >= 1".into()));
                }
                // Σ_{n>K} 1/n^2 lies in [1/(K+1), 1/K]; below rank 3 the flat head adds mass
                let m = k.max(3);
                let flat: Q = (k + 1..=3).map(|n| pow2(-n) * frac(8, 9)).sum();
                (&flat + frac(1, m + 1), flat + frac(1, m))
            }
            DyadicRule::Linear { h } => {
                let t = h * int(k + 2) * pow2(-k);
                (t.clone(), t)
            }
            DyadicRule::Explicit { values, tail, .. } => {
                if depth > values.len() {
                    return Err(Error::Depth(format!(
                        "explicit family has {} values, depth {depth} requested",
                        values.len()
                    )));
                }
                let mut t = tail.clone();
                for (i, v) in values.iter().enumerate().skip(depth) {
                    t += v * pow2(-(i as i64 + 1));
                }
                (t.clone(), t)
            }
        })
    }

    pub fn materialize(&self, depth: usize) -> Result<DyadicFamily> {
        if depth == 0 {
            return Err(Error::Depth("depth must be positive".into()));
        }
        let values = (1..=depth).map(|n| self.value(n)).collect::<Result<Vec<_>>>()?;
        let next = self.value(depth + 1)?;
        let (tail_lo, tail_hi) = self.tail_bracket(depth)?;
        DyadicFamily::new(values, next, tail_lo, tail_hi)
    }
}

/// Values `a_1..a_K` on `D_1..D_K`, a lower bound `next` for the function on
/// `(0, 2^-K]` (exact on `D_{K+1}`), and a bracket on the mass there.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DyadicFamily {
    values: Vec<Q>,
    next: Q,
    tail_lo: Q,
    tail_hi: Q,
}

impl DyadicFamily {
    pub fn new(values: Vec<Q>, next: Q, tail_lo: Q, tail_hi: Q) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::Invalid("empty dyadic family".into()));
        }
        if tail_lo > tail_hi || tail_lo.is_negative() {
            return Err(Error::Invalid("tail bracket must satisfy 0 <= lo <= hi".into()));
        }
        Ok(Self { values, next, tail_lo, tail_hi })
    }

    pub fn depth(&self) -> usize {
        self.values.len()
    }

    pub fn values(&self) -> &[Q] {
        &self.values
    }

    pub fn next(&self) -> &Q {
        &self.next
    }

    pub fn tail_bracket(&self) -> (&Q, &Q) {
        (&self.tail_lo, &self.tail_hi)
    }

    pub fn is_non_increasing(&self) -> bool {
        self.values.windows(2).all(|w| w[0] <= w[1]) && self.values.last().unwrap() <= &self.next
    }

    /// The step function with `a_n` on `D_n` and `next` on `(0, 2^-K]`.
    pub fn materialize(&self) -> StepFunction {
        let k = self.values.len() as i64;
        let mut pieces = vec![(pow2(-k), self.next.clone())];
        for n in (1..=self.values.len()).rev() {
            pieces.push((pow2(-(n as i64)), self.values[n - 1].clone()));
        }
        StepFunction::from_lengths(&pieces).expect("dyadic lengths sum to 1")
    }
}

/// A non-negative non-increasing function, exact on `(cut, 1]`, with the
/// mass on `(0, cut]` known up to a bracket. Finite step functions have
/// `cut = 0`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Monotone {
    f: StepFunction,
    cut: Q,
    tail_lo: Q,
    tail_hi: Q,
}

impl Monotone {
    /// The decreasing rearrangement of `f`.
    pub fn from_step(f: &StepFunction) -> Self {
        Self { f: f.rearrange_decreasing(), cut: zero(), tail_lo: zero(), tail_hi: zero() }
    }

    pub fn from_family(g: &DyadicFamily) -> Result<Self> {
        if !g.is_non_increasing() {
            return Err(Error::Invalid("dyadic family must be non-increasing in t".into()));
        }
        if g.values.iter().any(|v| v.is_negative()) {
            return Err(Error::Invalid("dyadic family must be non-negative".into()));
        }
        Ok(Self {
            f: g.materialize(),
            cut: pow2(-(g.depth() as i64)),
            tail_lo: g.tail_lo.clone(),
            tail_hi: g.tail_hi.clone(),
        })
    }

    pub fn step(&self) -> &StepFunction {
        &self.f
    }

    pub fn cut(&self) -> &Q {
        &self.cut
    }

    pub fn is_exact(&self) -> bool {
        self.tail_lo == self.tail_hi
    }

    /// Values are exact for `t > exact_from()`; below it they are lower bounds.
    pub fn exact_from(&self) -> Q {
        &self.cut / int(2)
    }

    pub fn value(&self, t: &Q) -> Result<Q> {
        self.f.evaluate(t)
    }

    /// `f(t)` for `t` in (0,1], 0 for `t > 1`.
    pub fn value_or_zero(&self, t: &Q) -> Q {
        self.f.value_or_zero(t)
    }

    fn check_psi(&self, t: &Q) -> Result<()> {
        if *t < self.cut || *t > one() {
            return Err(Error::Depth(format!(
                "prefix integral at {} is below the materialized cut {}",
                rational::fmt(t),
                rational::fmt(&self.cut)
            )));
        }
        Ok(())
    }

    /// Lower end of `ψ(t) = ∫_0^t f` for `t >= cut`.
    pub fn psi_lo(&self, t: &Q) -> Result<Q> {
        self.check_psi(t)?;
        Ok(&self.tail_lo + self.f.integral_between(&self.cut, t))
    }

    pub fn psi_hi(&self, t: &Q) -> Result<Q> {
        self.check_psi(t)?;
        Ok(&self.tail_hi + self.f.integral_between(&self.cut, t))
    }

    /// `ψ(t)`; an error unless the tail mass is exact.
    pub fn psi(&self, t: &Q) -> Result<Q> {
        if !self.is_exact() {
            return Err(Error::Depth("tail mass is only bracketed".into()));
        }
        self.psi_lo(t)
    }

    pub fn total(&self) -> Result<Q> {
        self.psi(&one())
    }

    /// `f**(t)` bracket for `t >= cut`.
    pub fn double_star_bracket(&self, t: &Q) -> Result<(Q, Q)> {
        if t.is_zero() {
            return Err(Error::OutOfDomain("0".into()));
        }
        Ok((self.psi_lo(t)? / t, self.psi_hi(t)? / t))
    }

    /// Left endpoints of the pieces at or above the cut, descending, each with
    /// the value on the piece to its right. These are where one-sided sups of
    /// `f**/f` and similar ratios are attained.
    pub fn pieces_above_cut(&self) -> Vec<(Q, Q, Q)> {
        let mut out: Vec<(Q, Q, Q)> = self
            .f
            .pieces()
            .filter(|(lo, _, _)| **lo >= self.cut)
            .map(|(lo, hi, v)| (lo.clone(), hi.clone(), v.clone()))
            .collect();
        out.reverse();
        out
    }

    /// Evaluation grid: breakpoints at or above the cut together with dyadic
    /// points `2^-j`, `j <= depth`, descending and deduplicated.
    pub fn grid(&self, depth: usize) -> Vec<Q> {
        let floor = pow2(-(depth as i64));
        let mut g: Vec<Q> = self
            .f
            .points()
            .iter()
            .filter(|p| p.is_positive() && **p >= self.cut && **p >= floor)
            .cloned()
            .collect();
        for j in 0..=depth {
            let t = pow2(-(j as i64));
            if t >= self.cut {
                g.push(t);
            }
        }
        g.sort_by(|a, b| b.cmp(a));
        g.dedup();
        g
    }
}

impl From<&StepFunction> for Monotone {
    fn from(f: &StepFunction) -> Self {
        Monotone::from_step(f)
    }
}

/// Exact mass of an explicit family to `depth`, used by tests as an oracle.
pub fn head_mass(values: &[Q]) -> Q {
    values
        .iter()
        .enumerate()
        .map(|(i, v)| v * pow2(-(i as i64 + 1)))
        .fold(zero(), |a, b| a + b)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn geometric_tail_matches_partial_sums() {
        let rule = DyadicRule::Geometric { first: one(), ratio: frac(3, 2) };
        let fam10 = rule.materialize(10).unwrap();
        let fam30 = rule.materialize(30).unwrap();
        let mut direct = fam30.tail_bracket().0.clone();
        for n in 11..=30usize {
            direct += &fam30.values()[n - 1] * pow2(-(n as i64));
        }
        assert_eq!(fam10.tail_bracket().0, &direct);
        let whole = head_mass(fam30.values()) + fam30.tail_bracket().0;
        assert_eq!(whole, int(2));
    }

    #[test]
    fn linear_tail_exact() {
        let rule = DyadicRule::Linear { h: one() };
        let (lo, hi) = rule.tail_bracket(0).unwrap();
        assert_eq!(lo, int(2));
        assert_eq!(hi, int(2));
    }

    #[test]
    fn materialized_profile() {
        let fam = DyadicRule::Constant { c: int(3) }.materialize(4).unwrap();
        let m = Monotone::from_family(&fam).unwrap();
        assert_eq!(m.psi(&one()).unwrap(), int(3));
        assert_eq!(m.psi(&frac(1, 4)).unwrap(), frac(3, 4));
        assert!(m.psi(&frac(1, 32)).is_err());
        assert_eq!(m.step(), &StepFunction::constant(int(3)));
    }

    #[test]
    fn grid_is_descending() {
        let f = StepFunction::new(vec![one(), frac(1, 3), zero()], vec![one(), int(2)]).unwrap();
        let g = Monotone::from_step(&f).grid(3);
        assert_eq!(g, vec![one(), frac(1, 2), frac(1, 3), frac(1, 4), frac(1, 8)]);
    }
}
