//! The two extremal constants for interval partitions: the golden ratio for
//! matching points of `B` against its monotone rearrangement, and 4/3 for the
//! ψ-ratio, with their witness families.

use num_traits::Signed;
use serde::Serialize;

use crate::averaging::cond_exp;
use crate::error::{Error, Result};
use crate::partition::{monotone_rearrangement, Partition};
use crate::rational::{self, frac, golden_bracket, int, one, pow2, Q};
use crate::step::StepFunction;

/// `max_n min_m max(b_n/b*_m, b*_m/b_n)` over positive points.
pub fn min_delta(b: &Partition) -> Result<Q> {
    let star = monotone_rearrangement(b)?;
    let mut asc: Vec<&Q> = star.positive_points().collect();
    asc.sort();
    let mut worst = one();
    for p in b.positive_points() {
        let i = asc.partition_point(|x| *x < p);
        let mut best: Option<Q> = None;
        for j in [i.checked_sub(1), Some(i)].into_iter().flatten() {
            if let Some(m) = asc.get(j) {
                let r = if *m > p { *m / p } else { p / *m };
                if best.as_ref().is_none_or(|b| r < *b) {
                    best = Some(r);
                }
            }
        }
        let best = best.expect("B* has the point 1");
        if best > worst {
            worst = best;
        }
    }
    Ok(worst)
}

/// Witness partition with lengths `2 - α̂, α̂ - 1 - ε, ε 2^{-n+2}` (n >= 3),
/// where `α̂` approximates the golden ratio.
#[derive(Debug, Clone, Serialize)]
pub struct GoldenWitness {
    pub partition: Partition,
    #[serde(with = "rational::serde_q")]
    pub alpha: Q,
    #[serde(with = "rational::serde_q")]
    pub alpha_lo: Q,
    #[serde(with = "rational::serde_q")]
    pub alpha_hi: Q,
    /// `(α-1)/(2-α+ε)` evaluated at `alpha_lo` and `alpha_hi`
    #[serde(with = "rational::serde_q")]
    pub expected_lo: Q,
    #[serde(with = "rational::serde_q")]
    pub expected_hi: Q,
}

/// Critical value `(x-1)/(2-x+ε)`, increasing in `x`.
pub fn golden_target(x: &Q, eps: &Q) -> Q {
    (x - one()) / (int(2) - x + eps)
}

pub fn golden_witness(eps: &Q, depth: usize, bits: u32) -> Result<GoldenWitness> {
    if !eps.is_positive() || *eps >= frac(1, 10) {
        return Err(Error::Invalid("epsilon must lie in (0, 1/10)".into()));
    }
    if depth < 2 {
        return Err(Error::Depth("golden witness needs depth >= 2".into()));
    }
    let (lo, hi) = golden_bracket(bits);
    let alpha = lo.clone();
    let mut lens = vec![int(2) - &alpha, &alpha - one() - eps];
    for n in 3..=depth as i64 {
        lens.push(eps * pow2(-n + 2));
    }
    Ok(GoldenWitness {
        partition: Partition::from_lengths(&lens)?,
        expected_lo: golden_target(&lo, eps),
        expected_hi: golden_target(&hi, eps),
        alpha,
        alpha_lo: lo,
        alpha_hi: hi,
    })
}

/// `max_n ψ(b_n) / ∫_0^{b_n} E(f|B*)` over positive points of `B`.
pub fn psi_ratio_sup(f: &StepFunction, b: &Partition) -> Result<Q> {
    let fs = f.rearrange_decreasing();
    if !fs.integral().is_positive() {
        return Err(Error::Invalid("f must have positive integral".into()));
    }
    let e = cond_exp(&fs, &monotone_rearrangement(b)?);
    let mut best = one();
    for p in b.positive_points() {
        let r = fs.prefix_integral(p) / e.prefix_integral(p);
        if r > best {
            best = r;
        }
    }
    Ok(best)
}

/// `f = 3/2` on `(0, 2/3]` and `B = {1, 2/3, ε/2, ε/4, ...}` with `depth` points after 1.
pub fn four_thirds_witness(eps: &Q, depth: usize) -> Result<(StepFunction, Partition)> {
    if !eps.is_positive() || *eps >= frac(1, 3) {
        return Err(Error::Invalid("epsilon must lie in (0, 1/3)".into()));
    }
    if depth < 2 {
        return Err(Error::Depth("four-thirds witness needs depth >= 2".into()));
    }
    let f = StepFunction::indicator_head(&frac(2, 3), frac(3, 2))?;
    let mut pts = vec![one(), frac(2, 3)];
    for n in 2..=depth as i64 {
        pts.push(eps * pow2(-n + 1));
    }
    Ok((f, Partition::new(pts)?))
}

/// `(8 - 6ε)/(6 - 3ε)`.
pub fn four_thirds_target(eps: &Q) -> Q {
    (int(8) - int(6) * eps) / (int(6) - int(3) * eps)
}

/// Whether `E(f|B)* <= (4/3) f**_{B*}` everywhere, with `f**_{B*}` taking
/// `f**(b*_n)` on `(b*_n, b*_{n-1}]`. The right-endpoint value `f**(b*_{n-1})`
/// is too small here: it can fail by a hair on two-cell partitions.
pub fn projection_ratio_holds(f: &StepFunction, b: &Partition) -> Result<bool> {
    let fs = f.rearrange_decreasing();
    let (_, upper) = crate::averaging::floor_ceil_projections(&fs, &monotone_rearrangement(b)?)?;
    Ok(cond_exp(f, b).rearrange_decreasing().le_everywhere(&upper.scale(&frac(4, 3))))
}
