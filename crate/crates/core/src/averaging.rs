//! Averaging operators: conditional expectation over an interval partition,
//! over its independent complement, over the B-adic refinements, and over a
//! finite product realization.

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::partition::Partition;
use crate::rational::{self, one, zero, Q};
use crate::step::StepFunction;

/// Sum of step functions, merging all breakpoints once.
pub fn sum(fs: &[StepFunction]) -> StepFunction {
    let mut pts: Vec<Q> = fs.iter().flat_map(|f| f.points().iter().cloned()).collect();
    pts.sort();
    pts.dedup();
    if pts.len() < 2 {
        return StepFunction::constant(zero());
    }
    let values = pts
        .windows(2)
        .map(|w| fs.iter().map(|f| f.value_or_zero(&w[1])).fold(zero(), |a, b| a + b))
        .collect();
    StepFunction::from_ascending(pts, values).expect("merged points are increasing")
}

/// Replaces `f` by its average on each of the given disjoint cells `(lo, hi]`;
/// outside the cells `f` is kept.
pub fn average_on_cells(f: &StepFunction, cells: &[(Q, Q)]) -> StepFunction {
    let mut cells: Vec<&(Q, Q)> = cells.iter().filter(|(lo, hi)| lo < hi).collect();
    cells.sort_by(|a, b| a.0.cmp(&b.0));
    let mut points = vec![zero()];
    let mut values = Vec::new();
    let mut at = zero();
    let push_f = |from: &Q, to: &Q, points: &mut Vec<Q>, values: &mut Vec<Q>| {
        for (lo, hi, v) in f.pieces() {
            if hi <= from || lo >= to {
                continue;
            }
            let top = if hi < to { hi.clone() } else { to.clone() };
            points.push(top);
            values.push(v.clone());
        }
    };
    for (lo, hi) in cells {
        if *lo > at {
            push_f(&at, lo, &mut points, &mut values);
        }
        let avg = f.integral_between(lo, hi) / (hi - lo);
        points.push(hi.clone());
        values.push(avg);
        at = hi.clone();
    }
    if at < one() {
        push_f(&at.clone(), &one(), &mut points, &mut values);
    }
    StepFunction::from_ascending(points, values).expect("cells are disjoint subintervals")
}

/// `E(f|B)`: cell averages; an unresolved tail `(0, b_N]` is averaged as one cell.
pub fn cond_exp(f: &StepFunction, b: &Partition) -> StepFunction {
    average_on_cells(f, &b.cells_with_tail())
}

fn truncation_check(f: &StepFunction, b: &Partition, tol: Option<&Q>) -> Result<()> {
    if b.is_finite() {
        return Ok(());
    }
    let bound = b.tail() * f.sup_abs();
    match tol {
        Some(t) if bound <= *t => Ok(()),
        Some(t) => Err(Error::Depth(format!(
            "truncation bound {} exceeds tolerance {}",
            rational::fmt(&bound),
            rational::fmt(t)
        ))),
        None => Err(Error::Depth(format!(
            "partition is not finite; pass a tolerance (truncation bound {})",
            rational::fmt(&bound)
        ))),
    }
}

/// The complement profile `g(s) = Σ_n β_n f(b_n + β_n s)` over the cells of `b`.
/// For a partition with unresolved tail the tail is dropped, which is allowed
/// only when `tail * sup|f| <= tol`.
pub fn perp_avg_profile(f: &StepFunction, b: &Partition, tol: Option<&Q>) -> Result<StepFunction> {
    truncation_check(f, b, tol)?;
    let terms = b
        .cells()
        .into_iter()
        .map(|(lo, hi)| Ok(f.restrict_rescaled(&lo, &hi)?.scale(&(&hi - &lo))))
        .collect::<Result<Vec<_>>>()?;
    Ok(sum(&terms))
}

/// `g∘φ`: the profile copied affinely into every cell of `b`; this is the
/// conditional expectation onto the independent complement as a function on
/// (0,1]. The unresolved tail, if any, is left at 0.
pub fn perp_avg_pullback(f: &StepFunction, b: &Partition, tol: Option<&Q>) -> Result<StepFunction> {
    let g = perp_avg_profile(f, b, tol)?;
    pullback(&g, b)
}

/// `g∘φ` for a given profile `g`.
pub fn pullback(g: &StepFunction, b: &Partition) -> Result<StepFunction> {
    let copies = b
        .cells()
        .into_iter()
        .map(|(lo, hi)| g.affine_copy(&lo, &hi))
        .collect::<Result<Vec<_>>>()?;
    Ok(sum(&copies))
}

/// Dilation applied inside each cell: `s ↦ f(b_n + β_n a s_local)` where
/// `s_local` is the cell coordinate. This is the dilation under which the
/// complement profile commutes with `ρ_a`.
pub fn dilate_cellwise(f: &StepFunction, b: &Partition, a: &Q) -> Result<StepFunction> {
    if !b.is_finite() {
        return Err(Error::Depth("cellwise dilation needs a finite partition".into()));
    }
    let copies = b
        .cells()
        .into_iter()
        .map(|(lo, hi)| f.restrict_rescaled(&lo, &hi)?.dilate(a)?.affine_copy(&lo, &hi))
        .collect::<Result<Vec<_>>>()?;
    Ok(sum(&copies))
}

/// Local maximal averages `(1/s)∫_0^s f(b_n + β_n u) du` weighted by `β_n`:
/// the right-hand side of the profile identity `(E(f*|B⊥))** = Σ β_n (...)`.
pub fn weighted_local_average(f: &StepFunction, b: &Partition, s: &Q) -> Result<Q> {
    if !s.is_positive() || *s > one() {
        return Err(Error::OutOfDomain(rational::fmt(s)));
    }
    let mut acc = zero();
    for (lo, hi) in b.cells() {
        let beta = &hi - &lo;
        let top = &lo + &beta * s;
        acc += f.integral_between(&lo, &top) / s;
    }
    Ok(acc)
}

/// One cell of the rank-`k` B-adic refinement.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BAdicAddress {
    pub digits: Vec<usize>,
    #[serde(with = "rational::serde_q")]
    pub lo: Q,
    #[serde(with = "rational::serde_q")]
    pub hi: Q,
}

impl BAdicAddress {
    pub fn length(&self) -> Q {
        &self.hi - &self.lo
    }
}

/// All rank-`k` cells whose digits are at most `prefix`, in lexicographic order.
/// Each child of `(lo, hi]` is `(lo + L b_i, lo + L b_{i-1}]` with `L = hi - lo`.
pub fn badic_refine(b: &Partition, k: usize, prefix: usize) -> Result<Vec<BAdicAddress>> {
    if prefix == 0 || prefix > b.depth() {
        return Err(Error::Depth(format!(
            "prefix {prefix} must lie in 1..={}",
            b.depth()
        )));
    }
    let pts = b.points();
    let mut level: Vec<BAdicAddress> = (1..=prefix)
        .map(|i| BAdicAddress { digits: vec![i], lo: pts[i].clone(), hi: pts[i - 1].clone() })
        .collect();
    for _ in 0..k {
        let mut next = Vec::with_capacity(level.len() * prefix);
        for cell in &level {
            let len = cell.length();
            for i in 1..=prefix {
                let mut digits = cell.digits.clone();
                digits.push(i);
                next.push(BAdicAddress {
                    digits,
                    lo: &cell.lo + &len * &pts[i],
                    hi: &cell.lo + &len * &pts[i - 1],
                });
            }
        }
        level = next;
    }
    Ok(level)
}

/// `(Σ_{n <= prefix} β_n)^{k+1}`.
pub fn covered_mass(b: &Partition, k: usize, prefix: usize) -> Q {
    let s = one() - &b.points()[prefix.min(b.depth())];
    let mut acc = one();
    for _ in 0..=k {
        acc *= &s;
    }
    acc
}

/// Digits `i_0..i_k` of `t` and the iterated coordinates `t = t_0, t_1 = φ(t_0), ...,
/// t_{k+1}`.
pub fn badic_map(b: &Partition, t: &Q, k: usize) -> Result<(Vec<usize>, Vec<Q>)> {
    if !t.is_positive() || *t > one() {
        return Err(Error::OutOfDomain(rational::fmt(t)));
    }
    let pts = b.points();
    let mut digits = Vec::with_capacity(k + 1);
    let mut coords = vec![t.clone()];
    for _ in 0..=k {
        let cur = coords.last().unwrap();
        let n = b.cell_of(cur).ok_or_else(|| {
            Error::Depth(format!(
                "coordinate {} falls beyond the materialized prefix",
                rational::fmt(cur)
            ))
        })?;
        let phi = (cur - &pts[n]) / (&pts[n - 1] - &pts[n]);
        digits.push(n);
        coords.push(phi);
    }
    Ok((digits, coords))
}

/// Inverts `badic_map` via `t_j = b_{i_j} + β_{i_j} t_{j+1}`.
pub fn badic_reconstruct(b: &Partition, digits: &[usize], last: &Q) -> Result<Q> {
    let pts = b.points();
    let mut t = last.clone();
    for &i in digits.iter().rev() {
        if i == 0 || i > b.depth() {
            return Err(Error::Depth(format!("digit {i} outside the partition")));
        }
        t = &pts[i] + (&pts[i - 1] - &pts[i]) * t;
    }
    Ok(t)
}

/// `E(f | B^(k))` on the cells with digits `<= prefix`; `f` is kept elsewhere.
pub fn cond_exp_badic(f: &StepFunction, b: &Partition, k: usize, prefix: usize) -> Result<StepFunction> {
    let cells: Vec<(Q, Q)> = badic_refine(b, k, prefix)?.into_iter().map(|c| (c.lo, c.hi)).collect();
    Ok(average_on_cells(f, &cells))
}

/// Finite product carrier: atoms with weights `α_n` and one function per atom.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct JointRealization {
    #[serde(with = "rational::serde_q::vec")]
    pub weights: Vec<Q>,
    pub functions: Vec<StepFunction>,
}

impl JointRealization {
    pub fn new(weights: Vec<Q>, functions: Vec<StepFunction>) -> Result<Self> {
        let j = Self { weights, functions };
        j.validate()?;
        Ok(j)
    }

    pub fn validate(&self) -> Result<()> {
        if self.weights.is_empty() || self.weights.len() != self.functions.len() {
            return Err(Error::Invalid("one positive weight per atom function".into()));
        }
        if self.weights.iter().any(|w| !w.is_positive()) {
            return Err(Error::Invalid("weights must be positive".into()));
        }
        let total: Q = self.weights.iter().sum();
        if !total.is_one() {
            return Err(Error::Invalid(format!("weights sum to {}", rational::fmt(&total))));
        }
        Ok(())
    }
}

/// `Σ α_n f(a_n, ·)`.
pub fn product_avg(j: &JointRealization) -> Result<StepFunction> {
    j.validate()?;
    let terms: Vec<StepFunction> =
        j.weights.iter().zip(&j.functions).map(|(w, f)| f.scale(w)).collect();
    Ok(sum(&terms))
}

fn require_monotone(f: &StepFunction) -> Result<()> {
    if !f.is_non_increasing() || !f.is_non_negative() {
        return Err(Error::Precondition("projection needs f = f*".into()));
    }
    Ok(())
}

/// `f**` at a point, with `f**(0) := f(0+)`.
fn ds_at(f: &StepFunction, t: &Q) -> Q {
    if t.is_zero() {
        f.head().clone()
    } else {
        f.prefix_integral(t) / t
    }
}

/// `(f_B, f**_B)` with `f_B = Σ f(b_{n-1}) 1_{(b_n,b_{n-1}]}` and
/// `f**_B = Σ f**(b_n) 1_{(b_n,b_{n-1}]}`. On an unresolved tail `(0, b_N]`
/// the lower projection takes `f(b_N)` and the upper one `f(0+)`.
pub fn floor_ceil_projections(f: &StepFunction, b: &Partition) -> Result<(StepFunction, StepFunction)> {
    require_monotone(f)?;
    let mut lower = Vec::new();
    let mut upper = Vec::new();
    for (lo, hi) in b.cells() {
        lower.push((lo.clone(), hi.clone(), f.evaluate(&hi)?));
        upper.push((lo.clone(), hi, ds_at(f, &lo)));
    }
    if !b.is_finite() {
        let t = b.tail().clone();
        lower.push((zero(), t.clone(), f.evaluate(&t)?));
        upper.push((zero(), t, f.head().clone()));
    }
    Ok((cells_to_step(lower)?, cells_to_step(upper)?))
}

/// `Σ f**(b_{n-1}) 1_{(b_n,b_{n-1}]}`: the supremum of `E(f*|S)` over interval
/// partitions `S` coarser than `B`.
pub fn upper_projection_right(f: &StepFunction, b: &Partition) -> Result<StepFunction> {
    require_monotone(f)?;
    let mut cells: Vec<(Q, Q, Q)> =
        b.cells().into_iter().map(|(lo, hi)| { let v = ds_at(f, &hi); (lo, hi, v) }).collect();
    if !b.is_finite() {
        cells.push((zero(), b.tail().clone(), f.head().clone()));
    }
    cells_to_step(cells)
}

fn cells_to_step(mut cells: Vec<(Q, Q, Q)>) -> Result<StepFunction> {
    cells.sort_by(|a, b| a.0.cmp(&b.0));
    let mut points = vec![zero()];
    let mut values = Vec::new();
    for (lo, hi, v) in cells {
        if &lo != points.last().unwrap() {
            return Err(Error::Invalid("cells do not tile (0,1]".into()));
        }
        points.push(hi);
        values.push(v);
    }
    StepFunction::from_ascending(points, values)
}

/// The coarser partition from the supremum construction: keep `b_0..b_k`,
/// then jump to the first `b_m` (`m > k`) whose cell average
/// `(b_k - b_m)^{-1} ∫_{b_m}^{b_k} f*` reaches `f**(b_k) - ε`, then keep the rest.
pub fn sup_witness_partition(f: &StepFunction, b: &Partition, k: usize, eps: &Q) -> Result<Partition> {
    require_monotone(f)?;
    let pts = b.points();
    if k + 1 > b.depth() || pts[k].is_zero() {
        return Err(Error::Invalid(format!("cell index {k} has no point below it")));
    }
    let target = ds_at(f, &pts[k]) - eps;
    for m in k + 1..pts.len() {
        let avg = f.integral_between(&pts[m], &pts[k]) / (&pts[k] - &pts[m]);
        if avg >= target {
            let mut keep: Vec<Q> = pts[..=k].to_vec();
            keep.extend_from_slice(&pts[m..]);
            return Partition::new(keep);
        }
    }
    Err(Error::Depth(format!(
        "no point deep enough to bring the average within {} of f**(b_k)",
        rational::fmt(eps)
    )))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{frac, int};

    fn f521() -> StepFunction {
        StepFunction::new(
            vec![one(), frac(1, 2), frac(1, 4), zero()],
            vec![int(1), int(2), int(5)],
        )
        .unwrap()
    }

    fn halves_fn(a: Q, b: Q) -> StepFunction {
        StepFunction::new(vec![one(), frac(1, 2), zero()], vec![b, a]).unwrap()
    }

    #[test]
    fn cond_exp_examples() {
        let b = Partition::halves();
        assert_eq!(cond_exp(&f521(), &b), halves_fn(frac(7, 2), int(1)));
        assert_eq!(cond_exp(&StepFunction::constant(int(3)), &b), StepFunction::constant(int(3)));
        let m = halves_fn(int(4), int(2));
        assert_eq!(cond_exp(&m, &b), m);
    }

    #[test]
    fn profile_and_pullback_examples() {
        let b = Partition::halves();
        let g = perp_avg_profile(&f521(), &b, None).unwrap();
        assert_eq!(g, halves_fn(int(3), frac(3, 2)));
        let pb = perp_avg_pullback(&f521(), &b, None).unwrap();
        let expect = StepFunction::new(
            vec![one(), frac(3, 4), frac(1, 2), frac(1, 4), zero()],
            vec![frac(3, 2), int(3), frac(3, 2), int(3)],
        )
        .unwrap();
        assert_eq!(pb, expect);
        assert_eq!(cond_exp(&pb, &b), StepFunction::constant(frac(9, 4)));
        let one_fn = StepFunction::constant(one());
        assert_eq!(perp_avg_profile(&one_fn, &b, None).unwrap(), one_fn);
        assert_eq!(perp_avg_pullback(&one_fn, &b, None).unwrap(), one_fn);
    }

    #[test]
    fn profile_fixes_complement_measurable() {
        let b = Partition::new(vec![one(), frac(2, 3), frac(1, 6), zero()]).unwrap();
        let h = StepFunction::new(vec![one(), frac(1, 3), zero()], vec![int(1), int(4)]).unwrap();
        let f = pullback(&h, &b).unwrap();
        assert_eq!(perp_avg_profile(&f, &b, None).unwrap(), h);
    }

    #[test]
    fn truncated_profile_needs_tolerance() {
        let b = Partition::new(vec![one(), frac(1, 2), frac(1, 4)]).unwrap();
        let f = StepFunction::constant(int(2));
        assert!(perp_avg_profile(&f, &b, None).is_err());
        assert!(perp_avg_profile(&f, &b, Some(&frac(1, 4))).is_err());
        let g = perp_avg_profile(&f, &b, Some(&frac(1, 2))).unwrap();
        assert_eq!(g, StepFunction::constant(frac(3, 2)));
    }

    #[test]
    fn badic_examples() {
        let b = Partition::halves();
        let r0 = badic_refine(&b, 0, 2).unwrap();
        assert_eq!(r0.len(), 2);
        let r1 = badic_refine(&b, 1, 2).unwrap();
        assert_eq!(r1.len(), 4);
        assert!(r1.iter().all(|c| c.length() == frac(1, 4)));
        assert_eq!(r1[0].digits, vec![1, 1]);
        assert_eq!(r1[3].digits, vec![2, 2]);
        let g = crate::partition::IntervalPartition::geometric(frac(1, 2)).materialize(10).unwrap();
        let m = covered_mass(&g, 2, 10);
        let c: Q = badic_refine(&g, 2, 10).unwrap().iter().map(|c| c.length()).sum();
        assert_eq!(m, c);
        assert_eq!(m, crate::rational::powi(&(one() - crate::rational::pow2(-10)), 3));
    }

    #[test]
    fn badic_map_examples() {
        let b = Partition::halves();
        let (d, c) = badic_map(&b, &frac(3, 5), 0).unwrap();
        assert_eq!(d, vec![1]);
        assert_eq!(c[1], frac(1, 5));
        let (_, c) = badic_map(&b, &one(), 0).unwrap();
        assert_eq!(c[1], one());
        let t = frac(37, 101);
        let (d, c) = badic_map(&b, &t, 5).unwrap();
        assert_eq!(badic_reconstruct(&b, &d, c.last().unwrap()).unwrap(), t);
    }

    #[test]
    fn badic_cond_exp_example() {
        let b = Partition::halves();
        let e1 = cond_exp_badic(&f521(), &b, 1, 2).unwrap();
        // quarter-cell averages of f: (0,1/4]→5, (1/4,1/2]→2, (1/2,1]→1
        assert_eq!(e1, f521());
        let e0 = cond_exp_badic(&f521(), &b, 0, 2).unwrap();
        assert_eq!(e0, cond_exp(&f521(), &b));
        let err0 = e0.sub(&f521()).l1_norm();
        let err1 = e1.sub(&f521()).l1_norm();
        assert_eq!(err0, frac(3, 4));
        assert!(err1 <= err0);
    }

    #[test]
    fn product_avg_examples() {
        let two = StepFunction::constant(int(2));
        let z = StepFunction::constant(zero());
        let j = JointRealization::new(vec![frac(1, 2), frac(1, 2)], vec![two, z]).unwrap();
        assert_eq!(product_avg(&j).unwrap(), StepFunction::constant(one()));
        let f1 = StepFunction::indicator_head(&frac(1, 2), int(3)).unwrap();
        let j = JointRealization::new(
            vec![frac(1, 3), frac(2, 3)],
            vec![f1, StepFunction::constant(one())],
        )
        .unwrap();
        assert_eq!(product_avg(&j).unwrap(), halves_fn(frac(5, 3), frac(2, 3)));
        assert!(JointRealization::new(vec![frac(1, 2)], vec![StepFunction::constant(one())]).is_err());
    }

    #[test]
    fn projections_example() {
        let b = Partition::halves();
        let (lo, hi) = floor_ceil_projections(&f521(), &b).unwrap();
        assert_eq!(lo, halves_fn(int(2), int(1)));
        assert_eq!(hi, halves_fn(int(5), frac(7, 2)));
        let e = cond_exp(&f521(), &b);
        assert!(lo.le_everywhere(&e) && e.le_everywhere(&hi));
        let (lo, hi) = floor_ceil_projections(&StepFunction::constant(one()), &b).unwrap();
        assert_eq!(lo, StepFunction::constant(one()));
        assert_eq!(hi, StepFunction::constant(one()));
    }

    #[test]
    fn sup_witness_reaches_right_projection() {
        let f = f521();
        let b = Partition::new(vec![one(), frac(3, 4), frac(1, 2), frac(1, 8), frac(1, 16), zero()]).unwrap();
        let eps = frac(1, 100);
        let right = upper_projection_right(&f, &b).unwrap();
        for k in 1..b.depth() {
            let s = sup_witness_partition(&f, &b, k, &eps).unwrap();
            let e = cond_exp(&f, &s);
            let u = &b.points()[k] - frac(1, 1000);
            assert!(e.evaluate(&u).unwrap() >= right.evaluate(&u).unwrap() - &eps);
            assert!(e.le_everywhere(&right));
        }
    }
}
