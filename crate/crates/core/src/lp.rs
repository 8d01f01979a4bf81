//! Exact feasibility for small linear programs (phase-one simplex, Bland's rule).

use num_traits::{Signed, Zero};

use crate::rational::{zero, Q};

/// A point of `{x >= 0 : A_eq x = b_eq, A_ge x >= b_ge}`, if one exists.
pub fn feasible(a_eq: &[Vec<Q>], b_eq: &[Q], a_ge: &[Vec<Q>], b_ge: &[Q]) -> Option<Vec<Q>> {
    let n = a_eq.first().or(a_ge.first()).map_or(0, |r| r.len());
    let m_ge = a_ge.len();
    let m = a_eq.len() + m_ge;
    let width = n + m_ge + m;
    let rhs = width;
    let mut t: Vec<Vec<Q>> = Vec::with_capacity(m + 1);
    for (i, (row, b)) in a_eq.iter().zip(b_eq).chain(a_ge.iter().zip(b_ge)).enumerate() {
        let mut r = vec![zero(); width + 1];
        r[..n].clone_from_slice(row);
        if i >= a_eq.len() {
            r[n + i - a_eq.len()] = Q::from_integer((-1).into());
        }
        r[rhs] = b.clone();
        if b.is_negative() {
            for v in r.iter_mut() {
                *v = -v.clone();
            }
        }
        r[n + m_ge + i] = Q::from_integer(1.into());
        t.push(r);
    }
    let mut obj = vec![zero(); width + 1];
    for row in &t {
        for j in (0..n + m_ge).chain(std::iter::once(rhs)) {
            obj[j] -= &row[j];
        }
    }
    t.push(obj);
    let mut basis: Vec<usize> = (0..m).map(|i| n + m_ge + i).collect();
    while let Some(enter) = (0..width).find(|&j| t[m][j].is_negative()) {
        let mut leave: Option<(usize, Q)> = None;
        for i in 0..m {
            if t[i][enter].is_positive() {
                let ratio = &t[i][rhs] / &t[i][enter];
                let better = match &leave {
                    None => true,
                    Some((li, lr)) => ratio < *lr || (ratio == *lr && basis[i] < basis[*li]),
                };
                if better {
                    leave = Some((i, ratio));
                }
            }
        }
        let Some((p, _)) = leave else { break };
        let piv = t[p][enter].clone();
        for v in t[p].iter_mut() {
            *v /= &piv;
        }
        let prow = t[p].clone();
        for (i, row) in t.iter_mut().enumerate() {
            if i != p && !row[enter].is_zero() {
                let k = row[enter].clone();
                for (v, pv) in row.iter_mut().zip(&prow) {
                    *v -= &k * pv;
                }
            }
        }
        basis[p] = enter;
    }
    if !t[m][rhs].is_zero() {
        return None;
    }
    let mut x = vec![zero(); n];
    for (i, &bv) in basis.iter().enumerate() {
        if bv < n {
            x[bv] = t[i][rhs].clone();
        }
    }
    Some(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{frac, int};

    #[test]
    fn small_systems() {
        // x + y = 1, x >= 2/3, y >= 1/4 is infeasible; y >= 1/3 is feasible
        let eq = vec![vec![int(1), int(1)]];
        let ge = vec![vec![int(1), int(0)], vec![int(0), int(1)]];
        assert!(feasible(&eq, &[int(1)], &ge, &[frac(2, 3), frac(1, 2)]).is_none());
        let x = feasible(&eq, &[int(1)], &ge, &[frac(2, 3), frac(1, 3)]).unwrap();
        assert_eq!(x, vec![frac(2, 3), frac(1, 3)]);
        // negative right-hand side
        let x = feasible(&[vec![int(-1), int(1)]], &[int(-1)], &[], &[]).unwrap();
        assert_eq!(&x[0] - &x[1], int(1));
    }
}
