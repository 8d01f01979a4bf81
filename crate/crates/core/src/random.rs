//! Seeded random instances with exact rational coordinates.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::partition::Partition;
use crate::rational::{int, Q};
use crate::step::StepFunction;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// `n` positive lengths with integer weights in `1..=max_weight`, summing to 1.
pub fn lengths<R: Rng>(rng: &mut R, n: usize, max_weight: i64) -> Vec<Q> {
    let w: Vec<i64> = (0..n).map(|_| rng.gen_range(1..=max_weight)).collect();
    let total: i64 = w.iter().sum();
    w.into_iter().map(|x| Q::new(x.into(), total.into())).collect()
}

/// A finite partition with `n` cells in random order.
pub fn partition<R: Rng>(rng: &mut R, n: usize) -> Partition {
    Partition::from_lengths(&lengths(rng, n, 1000)).expect("lengths sum to 1")
}

/// A step function with `n` pieces and integer values in `lo..=hi`.
pub fn step<R: Rng>(rng: &mut R, n: usize, lo: i64, hi: i64) -> StepFunction {
    let lens = lengths(rng, n, 100);
    let pieces: Vec<(Q, Q)> = lens.into_iter().map(|l| (l, int(rng.gen_range(lo..=hi)))).collect();
    StepFunction::from_lengths(&pieces).expect("lengths sum to 1")
}

/// A non-negative non-increasing step function with `n` pieces.
pub fn monotone<R: Rng>(rng: &mut R, n: usize, hi: i64) -> StepFunction {
    step(rng, n, 0, hi).rearrange_decreasing()
}

/// Values on `n` uniform cells.
pub fn grid_values<R: Rng>(rng: &mut R, n: usize, hi: i64) -> Vec<i64> {
    (0..n).map(|_| rng.gen_range(0..=hi)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::One;

    #[test]
    fn seeded_output_is_reproducible() {
        let a = partition(&mut rng(7), 12);
        let b = partition(&mut rng(7), 12);
        assert_eq!(a, b);
        let s: Q = lengths(&mut rng(3), 9, 50).into_iter().sum();
        assert!(s.is_one());
        assert!(monotone(&mut rng(1), 10, 20).is_non_increasing());
    }
}
