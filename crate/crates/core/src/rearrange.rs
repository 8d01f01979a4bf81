//! Rearranging a step function so that its block integrals dominate a
//! non-increasing block function `g`, given prefix-integral domination.
//!
//! Everything is done by cutting and re-concatenating exact pieces of `f`.
//! Non-strict inequalities are used throughout.

use num_traits::Signed;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lp;
use crate::partition::Partition;
use crate::rational::{self, int, one, zero, Q};
use crate::step::StepFunction;

/// `f` and a non-increasing `g` on `[a,b]`, with `g` constant on the blocks
/// `[t_{j-1}, t_j]`. Both functions live on `(0,1]`; only `[a,b]` is used.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlockInstance {
    /// `t_0 = a < t_1 < ... < t_n = b`
    #[serde(with = "rational::serde_q::vec")]
    pub blocks: Vec<Q>,
    pub g: StepFunction,
    pub f: StepFunction,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SwapOutcome {
    pub f: StepFunction,
    #[serde(with = "rational::serde_q")]
    pub r0: Q,
}

impl BlockInstance {
    pub fn new(blocks: Vec<Q>, g: StepFunction, f: StepFunction) -> Result<Self> {
        let inst = Self { blocks, g, f };
        inst.alphas()?;
        Ok(inst)
    }

    pub fn a(&self) -> &Q {
        &self.blocks[0]
    }

    pub fn b(&self) -> &Q {
        self.blocks.last().unwrap()
    }

    /// Values `α_1 >= ... >= α_n >= 0` of `g` on the blocks.
    pub fn alphas(&self) -> Result<Vec<Q>> {
        let t = &self.blocks;
        if t.len() < 2 {
            return Err(Error::Invalid("need at least one block".into()));
        }
        if t[0].is_negative() || *t.last().unwrap() > one() {
            return Err(Error::Invalid("interval must lie in [0,1]".into()));
        }
        if t.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Invalid("block endpoints must be strictly increasing".into()));
        }
        let mut alpha = Vec::with_capacity(t.len() - 1);
        for w in t.windows(2) {
            alpha.push(constant_on(&self.g, &w[0], &w[1]).ok_or_else(|| {
                Error::Invalid(format!(
                    "g is not constant on block [{}, {}]",
                    rational::fmt(&w[0]),
                    rational::fmt(&w[1])
                ))
            })?);
        }
        if alpha.iter().any(|v| v.is_negative()) || alpha.windows(2).any(|w| w[1] > w[0]) {
            return Err(Error::Invalid("g must be non-negative and non-increasing".into()));
        }
        Ok(alpha)
    }

    /// Whether `∫_{△_j} f >= ∫_{△_j} g` for every block.
    pub fn dominated(&self, f: &StepFunction) -> Result<bool> {
        let alpha = self.alphas()?;
        let blocks = Blocks { t: &self.blocks, alpha: &alpha };
        Ok((1..=alpha.len()).all(|j| !blocks.deficient(f, j)))
    }
}

fn constant_on(g: &StepFunction, lo: &Q, hi: &Q) -> Option<Q> {
    let mut val: Option<&Q> = None;
    for (p, q, v) in g.pieces() {
        if q > lo && p < hi {
            match val {
                Some(w) if w != v => return None,
                _ => val = Some(v),
            }
        }
    }
    val.cloned()
}

/// Pieces `(length, value)` of `f` on `(lo, hi]`.
fn slice(f: &StepFunction, lo: &Q, hi: &Q) -> Vec<(Q, Q)> {
    let mut out = Vec::new();
    for (p, q, v) in f.pieces() {
        let l = p.max(lo);
        let h = q.min(hi);
        if l < h {
            out.push((h - l, v.clone()));
        }
    }
    out
}

/// Concatenation of the given ranges of `f`, laid out from 0.
fn rebuild(f: &StepFunction, ranges: &[(Q, Q)]) -> StepFunction {
    let pieces: Vec<(Q, Q)> = ranges.iter().flat_map(|(lo, hi)| slice(f, lo, hi)).collect();
    StepFunction::from_lengths(&pieces).expect("ranges tile (0,1]")
}

/// `f` with its restriction to `(lo, hi]` sorted non-increasingly.
fn sort_range(f: &StepFunction, lo: &Q, hi: &Q) -> StepFunction {
    let mut mid = slice(f, lo, hi);
    mid.sort_by(|x, y| y.1.cmp(&x.1));
    let mut pieces = slice(f, &zero(), lo);
    pieces.extend(mid);
    pieces.extend(slice(f, hi, &one()));
    StepFunction::from_lengths(&pieces).expect("ranges tile (0,1]")
}

/// Exchange `(a, a+r]` with `(b-r, b]`, keeping the order inside each.
fn swap_ends(f: &StepFunction, a: &Q, b: &Q, r: &Q) -> StepFunction {
    let ar = a + r;
    let br = b - r;
    rebuild(
        f,
        &[(zero(), a.clone()), (br.clone(), b.clone()), (ar.clone(), br), (a.clone(), ar), (b.clone(), one())],
    )
}

struct Blocks<'a> {
    t: &'a [Q],
    alpha: &'a [Q],
}

impl Blocks<'_> {
    fn n(&self) -> usize {
        self.alpha.len()
    }

    fn g_int(&self, lo: &Q, hi: &Q) -> Q {
        let mut s = zero();
        for (j, a) in self.alpha.iter().enumerate() {
            let l = (&self.t[j]).max(lo);
            let h = (&self.t[j + 1]).min(hi);
            if l < h {
                s += a * (h - l);
            }
        }
        s
    }

    /// Block `j` (1-based) has `∫_{△_j} f < ∫_{△_j} g`.
    fn deficient(&self, f: &StepFunction, j: usize) -> bool {
        let (lo, hi) = (&self.t[j - 1], &self.t[j]);
        f.integral_between(lo, hi) < &self.alpha[j - 1] * (hi - lo)
    }

    fn sub(&self, from: usize, to: usize) -> Blocks<'_> {
        Blocks { t: &self.t[from..=to], alpha: &self.alpha[from..to] }
    }

    /// Lengths non-decreasing, i.e. `t_j <= (t_{j-1} + t_{j+1})/2`.
    fn lengths_non_decreasing(&self) -> bool {
        self.t.windows(3).all(|w| &w[1] - &w[0] <= &w[2] - &w[1])
    }
}

/// Part I: find `r_0` and swap the two ends so that every block but the last
/// is dominated and so is `[t_1, b]`.
fn swap_step(f: &StepFunction, bl: &Blocks) -> Result<SwapOutcome> {
    let n = bl.n();
    let (a, t1, b) = (&bl.t[0], &bl.t[1], &bl.t[n]);
    let f = sort_range(f, &bl.t[n - 1], b);
    let g1 = bl.g_int(a, t1);
    let g_rest = bl.g_int(t1, b);
    let u = |r: &Q| f.integral_between(&(b - r), b) + f.integral_between(&(a + r), t1) - &g1;
    let v = |r: &Q| f.integral_between(a, &(a + r)) + f.integral_between(t1, &(b - r)) - &g_rest;
    let total = u(&zero()) + v(&zero());
    if !v(&zero()).is_negative() {
        return Ok(SwapOutcome { f, r0: zero() });
    }
    let reach = t1 - a;
    let mut cand = vec![zero(), reach.clone()];
    for p in f.points() {
        let ra = p - a;
        let rb = b - p;
        for r in [ra, rb] {
            if r.is_positive() && r < reach {
                cand.push(r);
            }
        }
    }
    cand.sort();
    cand.dedup();
    let mut prev = (cand[0].clone(), v(&cand[0]));
    for r in cand.into_iter().skip(1) {
        let vr = v(&r);
        if !vr.is_negative() {
            let (r_lo, v_lo) = prev;
            let r0 = &r_lo + (-&v_lo) * (&r - &r_lo) / (&vr - &v_lo);
            let (u0, v0) = (u(&r0), v(&r0));
            assert_eq!(&u0 + &v0, total, "u + v must be constant");
            if u0.is_negative() || v0.is_negative() {
                return Err(Error::Precondition("no admissible swap radius".into()));
            }
            return Ok(SwapOutcome { f: swap_ends(&f, a, b, &r0), r0 });
        }
        prev = (r, vr);
    }
    Err(Error::Precondition(
        "v stays negative on [0, t_1 - a]; the block conditions do not hold".into(),
    ))
}

/// Parts I and II: after the swap, recurse on `[t_{k-1}, b]` for the smallest
/// `k` with `∫_{t_k}^b f < ∫_{t_k}^b g`.
fn block_induction(f: &StepFunction, bl: &Blocks) -> Result<StepFunction> {
    let f = swap_step(f, bl)?.f;
    let n = bl.n();
    let b = &bl.t[n];
    for k in 2..n {
        if f.integral_between(&bl.t[k], b) < bl.g_int(&bl.t[k], b) {
            return block_induction(&f, &bl.sub(k - 1, n));
        }
    }
    Ok(f)
}

/// Requires `∫_a^{t_j} f >= ∫_a^{t_j} g` for all `j` and non-decreasing block lengths.
fn prefix_induction(f: StepFunction, bl: &Blocks) -> Result<StepFunction> {
    let n = bl.n();
    if n == 1 {
        return Ok(f);
    }
    let mut f = f;
    if let Some(j0) = (1..n).rev().find(|&j| bl.deficient(&f, j)) {
        f = prefix_induction(f, &bl.sub(0, j0))?;
    }
    if !bl.deficient(&f, n) {
        return Ok(f);
    }
    let (t1, b) = (&bl.t[1], &bl.t[n]);
    if f.integral_between(t1, b) >= bl.g_int(t1, b) {
        return prefix_induction(f, &bl.sub(1, n));
    }
    block_induction(&f, bl)
}

fn check_swap_preconditions(bl: &Blocks, f: &StepFunction) -> Result<()> {
    let n = bl.n();
    if n < 2 {
        return Err(Error::Precondition("the swap needs at least two blocks".into()));
    }
    if !bl.lengths_non_decreasing() {
        return Err(Error::Precondition("block lengths must be non-decreasing".into()));
    }
    if let Some(j) = (1..n).find(|&j| bl.deficient(f, j)) {
        return Err(Error::Precondition(format!("block {j} is not dominated")));
    }
    let (a, b) = (&bl.t[0], &bl.t[n]);
    if f.integral_between(a, b) < bl.g_int(a, b) {
        return Err(Error::Precondition("∫_a^b f < ∫_a^b g".into()));
    }
    Ok(())
}

/// One swap: the result dominates every block but possibly the last, and `[t_1, b]`.
pub fn two_block_swap(inst: &BlockInstance) -> Result<SwapOutcome> {
    let alpha = inst.alphas()?;
    let bl = Blocks { t: &inst.blocks, alpha: &alpha };
    check_swap_preconditions(&bl, &inst.f)?;
    swap_step(&inst.f, &bl)
}

/// The full induction on blocks of non-decreasing length: every block dominated.
pub fn block_swap_induction(inst: &BlockInstance) -> Result<StepFunction> {
    let alpha = inst.alphas()?;
    let bl = Blocks { t: &inst.blocks, alpha: &alpha };
    check_swap_preconditions(&bl, &inst.f)?;
    block_induction(&inst.f, &bl)
}

/// Split blocks, right to left, so that lengths are non-decreasing.
fn refine(t: &[Q], alpha: &[Q]) -> (Vec<Q>, Vec<Q>) {
    let n = alpha.len();
    let mut lens: Vec<(Q, Q)> = Vec::new();
    let mut m = &t[n] - &t[n - 1];
    lens.push((m.clone(), alpha[n - 1].clone()));
    for j in (0..n - 1).rev() {
        let l = &t[j + 1] - &t[j];
        if l > m {
            let k = (&l / &m).ceil();
            let piece = &l / &k;
            let count: usize = k.to_integer().try_into().expect("piece count fits usize");
            for _ in 0..count {
                lens.push((piece.clone(), alpha[j].clone()));
            }
            m = piece;
        } else {
            lens.push((l.clone(), alpha[j].clone()));
            m = l;
        }
    }
    lens.reverse();
    let mut pts = vec![t[0].clone()];
    let mut vals = Vec::with_capacity(lens.len());
    for (l, a) in lens {
        let next = pts.last().unwrap() + l;
        pts.push(next);
        vals.push(a);
    }
    *pts.last_mut().unwrap() = t[n].clone();
    (pts, vals)
}

/// A rearrangement of `f` on `[a,b]` dominating every block of `g`.
///
/// Domination is only required at block endpoints, and is checked for the
/// decreasing rearrangement of `f` on `[a,b]`, which is where the search starts.
pub fn dominate_on_interval(inst: &BlockInstance) -> Result<StepFunction> {
    let alpha = inst.alphas()?;
    let t = &inst.blocks;
    let (a, b) = (inst.a(), inst.b());
    let f = sort_range(&inst.f, a, b);
    let bl = Blocks { t, alpha: &alpha };
    for tj in &t[1..] {
        if f.integral_between(a, tj) < bl.g_int(a, tj) {
            return Err(Error::Precondition(format!(
                "prefix integral of f falls below that of g at {}",
                rational::fmt(tj)
            )));
        }
    }
    let (rt, ralpha) = refine(t, &alpha);
    let out = prefix_induction(f, &Blocks { t: &rt, alpha: &ralpha })?;
    if !inst.dominated(&out)? || slice_sorted(&out, a, b) != slice_sorted(&inst.f, a, b) {
        return Err(Error::Precondition("construction failed its own check".into()));
    }
    Ok(out)
}

fn slice_sorted(f: &StepFunction, a: &Q, b: &Q) -> StepFunction {
    let mut s = slice(f, a, b);
    s.sort_by(|x, y| y.1.cmp(&x.1));
    StepFunction::from_lengths(&s).expect("sub-interval length <= 1")
}

/// Values of `y` on the cells of `F`, ascending in `t`; `y` must be constant on each.
fn cell_values(y: &StepFunction, part: &Partition) -> Result<(Vec<Q>, Vec<Q>)> {
    let mut t = vec![zero()];
    let mut vals = Vec::new();
    for (lo, hi) in part.cells_with_tail().into_iter().rev() {
        vals.push(constant_on(y, &lo, &hi).ok_or_else(|| {
            Error::Invalid(format!(
                "y is not constant on the cell ({}, {}]",
                rational::fmt(&lo),
                rational::fmt(&hi)
            ))
        })?);
        t.push(hi);
    }
    Ok((t, vals))
}

/// `x̄` equimeasurable with `x + ε` and `y <= E(x̄|F)`, for `x >= 0`, `y`
/// non-increasing and constant on the cells of `F`, and `y ≺ x`.
pub fn construct_dominating(
    x: &StepFunction,
    y: &StepFunction,
    part: &Partition,
    eps: &Q,
) -> Result<StepFunction> {
    if eps.is_negative() || !x.is_non_negative() {
        return Err(Error::Invalid("need x >= 0 and ε >= 0".into()));
    }
    if !y.is_non_increasing() || !y.is_non_negative() {
        return Err(Error::Invalid("y must be non-negative and non-increasing".into()));
    }
    let (t, _) = cell_values(y, part)?;
    if !x.majorizes(y) {
        return Err(Error::Precondition("∫_0^t x* < ∫_0^t y for some t".into()));
    }
    let shifted = x.map(|v| v + eps);
    let inst = BlockInstance { blocks: t, g: y.clone(), f: shifted };
    dominate_on_interval(&inst)
}

/// `1 = r_1 > r_2 > ...` (`count` points) with `∫_{r_n}^t x > ∫_{r_n}^t y`
/// for every `t` in `(r_n, 1]`.
pub fn split_points(x: &StepFunction, y: &StepFunction, count: usize) -> Result<Vec<Q>> {
    if !x.is_non_increasing() || !y.is_non_increasing() {
        return Err(Error::Invalid("x and y must be non-increasing".into()));
    }
    let d = x.sub(y);
    let pts = x.merged_points(y);
    if !d.head().is_positive() || pts[1..].iter().any(|p| !d.prefix_integral(p).is_positive()) {
        return Err(Error::Precondition("prefix domination of y by x is not strict".into()));
    }
    let admissible = |c: &Q| {
        let base = d.prefix_integral(c);
        first_slope_positive(&d, c)
            && pts.iter().filter(|p| *p > c).all(|p| d.prefix_integral(p) > base)
    };
    let mut out = vec![one()];
    while out.len() < count {
        let mut c = out.last().unwrap() / int(2);
        let mut tries = 0;
        while !admissible(&c) {
            c /= int(2);
            tries += 1;
            if tries > 4096 {
                return Err(Error::Depth("no split point found after 4096 halvings".into()));
            }
        }
        out.push(c);
    }
    Ok(out)
}

/// Value of `d` just to the right of `c`.
fn first_slope_positive(d: &StepFunction, c: &Q) -> bool {
    d.pieces().find(|(_, q, _)| *q > c).is_some_and(|(_, _, v)| v.is_positive())
}

/// Step function with `values[i]` on `(i/n, (i+1)/n]`.
pub fn grid_step(values: &[Q]) -> Result<StepFunction> {
    let n = values.len() as i64;
    let pieces: Vec<(Q, Q)> = values.iter().map(|v| (rational::frac(1, n), v.clone())).collect();
    StepFunction::from_lengths(&pieces)
}

/// Exhaustive search over permutations of the `n <= 8` grid cells of `x` for
/// `y <= E(x̄|F)`. Returns `perm` with `x̄` taking `x[perm[i]]` on grid cell `i`.
pub fn permutation_oracle(x: &[Q], y: &StepFunction, part: &Partition) -> Result<Option<Vec<usize>>> {
    let n = x.len();
    if n > 8 {
        return Err(Error::OracleLimit(n));
    }
    if n == 0 || !part.is_finite() {
        return Err(Error::Invalid("need a non-empty grid and a finite F".into()));
    }
    let (t, vals) = cell_values(y, part)?;
    let nq = int(n as i64);
    let mut sizes = Vec::new();
    let mut prev = 0usize;
    for p in &t[1..] {
        let k = p * &nq;
        if !k.is_integer() {
            return Err(Error::Invalid("F must be aligned with the grid".into()));
        }
        let k: usize = k.to_integer().try_into().expect("k <= n");
        sizes.push(k - prev);
        prev = k;
    }
    let mut perm = Vec::with_capacity(n);
    let mut used = vec![false; n];
    let mut st = Search { x, sizes: &sizes, vals: &vals, perm: &mut perm, used: &mut used };
    Ok(st.run(0, 0, zero()).then_some(perm))
}

struct Search<'a> {
    x: &'a [Q],
    sizes: &'a [usize],
    vals: &'a [Q],
    perm: &'a mut Vec<usize>,
    used: &'a mut [bool],
}

impl Search<'_> {
    /// Fill F-cell `cell`; indices increase within a cell since order there
    /// does not change the average.
    fn run(&mut self, cell: usize, from: usize, sum: Q) -> bool {
        if cell == self.sizes.len() {
            return true;
        }
        let end: usize = self.sizes[..=cell].iter().sum();
        if self.perm.len() == end {
            if sum < &self.vals[cell] * int(self.sizes[cell] as i64) {
                return false;
            }
            return self.run(cell + 1, 0, zero());
        }
        let mut tried: Vec<&Q> = Vec::new();
        for i in from..self.x.len() {
            if self.used[i] || tried.contains(&&self.x[i]) {
                continue;
            }
            tried.push(&self.x[i]);
            self.used[i] = true;
            self.perm.push(i);
            if self.run(cell, i + 1, &sum + &self.x[i]) {
                return true;
            }
            self.perm.pop();
            self.used[i] = false;
        }
        false
    }
}

/// Whether some measure-preserving rearrangement `x̄` of `x` has `y <= E(x̄|F)`,
/// decided by an exact transport linear program over the level sets of `x`.
pub fn transport_oracle(x: &StepFunction, y: &StepFunction, part: &Partition) -> Result<bool> {
    let (t, vals) = cell_values(y, part)?;
    let cells: Vec<Q> = t.windows(2).map(|w| &w[1] - &w[0]).collect();
    let mut levels: Vec<(Q, Q)> = Vec::new();
    for (p, q, v) in x.pieces() {
        match levels.iter_mut().find(|(_, w)| w == v) {
            Some((l, _)) => *l += q - p,
            None => levels.push((q - p, v.clone())),
        }
    }
    let (ni, nj) = (levels.len(), cells.len());
    let var = |i: usize, j: usize| i * nj + j;
    let mut a_eq = Vec::new();
    let mut b_eq = Vec::new();
    for (i, (l, _)) in levels.iter().enumerate() {
        let mut row = vec![zero(); ni * nj];
        for j in 0..nj {
            row[var(i, j)] = one();
        }
        a_eq.push(row);
        b_eq.push(l.clone());
    }
    for (j, c) in cells.iter().enumerate() {
        let mut row = vec![zero(); ni * nj];
        for i in 0..ni {
            row[var(i, j)] = one();
        }
        a_eq.push(row);
        b_eq.push(c.clone());
    }
    let mut a_ge = Vec::new();
    let mut b_ge = Vec::new();
    for (j, c) in cells.iter().enumerate() {
        let mut row = vec![zero(); ni * nj];
        for (i, (_, v)) in levels.iter().enumerate() {
            row[var(i, j)] = v.clone();
        }
        a_ge.push(row);
        b_ge.push(&vals[j] * c);
    }
    Ok(lp::feasible(&a_eq, &b_eq, &a_ge, &b_ge).is_some())
}

/// `x̄` on the grid from a permutation witness.
pub fn apply_permutation(x: &[Q], perm: &[usize]) -> Vec<Q> {
    perm.iter().map(|&i| x[i].clone()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::averaging::cond_exp;
    use crate::rational::frac;

    fn halves_instance(f: StepFunction) -> BlockInstance {
        BlockInstance::new(vec![zero(), frac(1, 2), one()], StepFunction::constant(one()), f).unwrap()
    }

    #[test]
    fn swap_already_dominated_is_identity() {
        let inst = halves_instance(StepFunction::constant(int(2)));
        let out = two_block_swap(&inst).unwrap();
        assert_eq!(out.r0, zero());
        assert_eq!(out.f, inst.f);
    }

    #[test]
    fn swap_two_halves() {
        let f = StepFunction::from_lengths(&[(frac(1, 2), int(2)), (frac(1, 2), frac(1, 5))]).unwrap();
        let inst = halves_instance(f.clone());
        let out = two_block_swap(&inst).unwrap();
        // v(r) = 2r + (1/2 - r)/5 - 1/2
        assert_eq!(out.r0, frac(2, 9));
        assert!(inst.dominated(&out.f).unwrap());
        assert!(out.f.equimeasurable(&f));
        assert_eq!(out.f.integral(), f.integral());
        // grid version: some permutation of (2,2,2,2,.2,.2,.2,.2) works on halves
        let mut x = vec![int(2); 4];
        x.extend(vec![frac(1, 5); 4]);
        let perm = permutation_oracle(&x, &StepFunction::constant(one()), &Partition::halves()).unwrap();
        assert!(perm.is_some());
    }

    #[test]
    fn swap_rejects_bad_instances() {
        let f = StepFunction::from_lengths(&[(frac(1, 2), int(1)), (frac(1, 2), frac(1, 2))]).unwrap();
        assert!(matches!(two_block_swap(&halves_instance(f)), Err(Error::Precondition(_))));
        // first block deficient
        let f = StepFunction::from_lengths(&[(frac(1, 2), frac(1, 2)), (frac(1, 2), int(3))]).unwrap();
        assert!(matches!(two_block_swap(&halves_instance(f)), Err(Error::Precondition(_))));
    }

    #[test]
    fn dominate_with_conditional_expectation_target() {
        let f = StepFunction::from_lengths(&[
            (frac(1, 8), int(1)),
            (frac(1, 8), int(5)),
            (frac(1, 4), int(0)),
            (frac(1, 4), int(7)),
            (frac(1, 4), int(2)),
        ])
        .unwrap();
        let b = Partition::new(vec![one(), frac(3, 4), frac(1, 2), frac(1, 8), zero()]).unwrap();
        let g = cond_exp(&f.rearrange_decreasing(), &b);
        let t = vec![zero(), frac(1, 8), frac(1, 2), frac(3, 4), one()];
        let inst = BlockInstance::new(t, g, f.map(|v| v + frac(1, 100))).unwrap();
        let out = dominate_on_interval(&inst).unwrap();
        assert!(inst.dominated(&out).unwrap());
        assert!(out.equimeasurable(&inst.f));
    }

    #[test]
    fn dominate_single_block() {
        let f = StepFunction::from_lengths(&[(frac(1, 2), int(0)), (frac(1, 2), int(2))]).unwrap();
        let inst = BlockInstance::new(vec![zero(), one()], StepFunction::constant(one()), f.clone()).unwrap();
        let out = dominate_on_interval(&inst).unwrap();
        assert!(out.equimeasurable(&f));
        let bad = BlockInstance::new(vec![zero(), one()], StepFunction::constant(int(2)), f).unwrap();
        assert!(matches!(dominate_on_interval(&bad), Err(Error::Precondition(_))));
    }

    #[test]
    fn construct_examples() {
        let x = StepFunction::indicator_head(&frac(1, 2), int(2)).unwrap();
        let eps = frac(1, 10);
        let part = Partition::new(vec![one(), zero()]).unwrap();
        let out = construct_dominating(&x, &StepFunction::constant(one()), &part, &eps).unwrap();
        assert_eq!(cond_exp(&out, &part), StepFunction::constant(one() + &eps));
        // y = E(x|F) exactly
        let x = grid_step(&[int(3), int(0), int(5), int(1)]).unwrap();
        let part = Partition::new(vec![one(), frac(1, 4), zero()]).unwrap();
        let y = cond_exp(&x.rearrange_decreasing(), &part);
        for e in [zero(), eps.clone()] {
            let out = construct_dominating(&x, &y, &part, &e).unwrap();
            assert!(out.equimeasurable(&x.map(|v| v + &e)));
            assert!(y.le_everywhere(&cond_exp(&out, &part)));
        }
        let too_big = StepFunction::constant(int(3));
        assert!(matches!(
            construct_dominating(&x, &too_big, &part, &eps),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn split_point_examples() {
        let y = StepFunction::from_lengths(&[(frac(1, 3), int(3)), (frac(2, 3), int(1))]).unwrap();
        let r = split_points(&y.scale(&int(2)), &y, 6).unwrap();
        assert_eq!(r[0], one());
        assert!(r.windows(2).all(|w| w[1] < w[0]));
        let r = split_points(&y.map(|v| v + frac(1, 100)), &y, 5).unwrap();
        assert_eq!(r.len(), 5);
        assert!(matches!(split_points(&y, &y, 3), Err(Error::Precondition(_))));
    }

    #[test]
    fn oracle_examples() {
        let halves = Partition::halves();
        let y = StepFunction::constant(one());
        let x = [int(4), int(0), int(0), int(0)];
        // a half average of 2 on one side leaves 0 on the other
        assert_eq!(permutation_oracle(&x, &y, &halves).unwrap(), None);
        // splitting the level-4 piece across both halves works
        assert!(transport_oracle(&grid_step(&x).unwrap(), &y, &halves).unwrap());
        let short = grid_step(&[int(3), int(0), int(0), int(0)]).unwrap();
        assert!(!transport_oracle(&short, &y, &halves).unwrap());
        let x = [int(2), int(2), int(0), int(0)];
        let perm = permutation_oracle(&x, &y, &halves).unwrap().unwrap();
        assert_eq!(apply_permutation(&x, &perm), vec![int(2), int(0), int(2), int(0)]);
        let mass = [int(1), int(0), int(0), int(0)];
        assert_eq!(permutation_oracle(&mass, &y, &halves).unwrap(), None);
        assert_eq!(permutation_oracle(&vec![int(1); 9], &y, &halves), Err(Error::OracleLimit(9)));
    }
}
