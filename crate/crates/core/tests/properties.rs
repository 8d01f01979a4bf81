use proptest::prelude::*;
use symideal_core::averaging::{
    cond_exp, cond_exp_badic, dilate_cellwise, perp_avg_profile, perp_avg_pullback, pullback,
    weighted_local_average,
};
use symideal_core::extremal::{min_delta, projection_ratio_holds, psi_ratio_sup};
use symideal_core::ideals::{breg_constant, marcinkiewicz_norm, nf_member};
use symideal_core::lp;
use symideal_core::partition::{monotone_rearrangement, partition_verifying_ratio, finer_verifying, finer_verifying_bound};
use symideal_core::rational::{frac, int, le_golden, one, Q};
use symideal_core::rearrange::{construct_dominating, grid_step};
use symideal_core::regularity::reg_constant;
use symideal_core::{Monotone, Partition, StepFunction};

fn same(a: &StepFunction, b: &StepFunction) -> bool {
    a.le_everywhere(b) && b.le_everywhere(a)
}

fn to_lengths(w: &[u32]) -> Vec<Q> {
    let total: u32 = w.iter().sum();
    w.iter().map(|x| frac(*x as i64, total as i64)).collect()
}

fn step_from(pieces: &[(u32, i64)]) -> StepFunction {
    let lens = to_lengths(&pieces.iter().map(|p| p.0).collect::<Vec<_>>());
    let pieces: Vec<(Q, Q)> = lens.into_iter().zip(pieces).map(|(l, p)| (l, int(p.1))).collect();
    StepFunction::from_lengths(&pieces).unwrap()
}

fn step(lo: i64, hi: i64, max: usize) -> impl Strategy<Value = StepFunction> {
    prop::collection::vec((1u32..100, lo..=hi), 1..=max).prop_map(|p| step_from(&p))
}

/// Pieces and a permutation of them, for a function and one of its rearrangements.
fn rearranged_pair(lo: i64, hi: i64, max: usize) -> impl Strategy<Value = (StepFunction, StepFunction)> {
    prop::collection::vec((1u32..100, lo..=hi), 1..=max)
        .prop_flat_map(|p| {
            let n = p.len();
            (Just(p), Just((0..n).collect::<Vec<_>>()).prop_shuffle())
        })
        .prop_map(|(p, perm)| {
            let q: Vec<(u32, i64)> = perm.iter().map(|&i| p[i]).collect();
            (step_from(&p), step_from(&q))
        })
}

fn partition(max: usize) -> impl Strategy<Value = Partition> {
    prop::collection::vec(1u32..1000, 1..=max).prop_map(|w| Partition::from_lengths(&to_lengths(&w)).unwrap())
}

fn dyadic_factor() -> impl Strategy<Value = Q> {
    prop::sample::select(vec![frac(1, 4), frac(1, 2), frac(2, 3), frac(3, 2), int(2), int(3)])
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn rearrangement_is_idempotent_and_equimeasurable(f in step(-20, 20, 10)) {
        let fs = f.rearrange_decreasing();
        prop_assert!(fs.is_non_increasing() && fs.is_non_negative());
        prop_assert_eq!(fs.rearrange_decreasing(), fs.clone());
        prop_assert!(f.equimeasurable(&fs));
        prop_assert_eq!(fs.integral(), f.l1_norm());
    }

    #[test]
    fn double_star_dominates_rearrangement(f in step(-20, 20, 10), k in 1i64..=64) {
        let t = frac(k, 64);
        let fs = f.rearrange_decreasing();
        prop_assert!(f.double_star(&t).unwrap() >= fs.evaluate(&t).unwrap());
        prop_assert!(f.majorizes(&f));
    }

    #[test]
    fn dilation_inequalities(f in step(-8, 8, 8), g in step(-8, 8, 8), s in dyadic_factor(), k in 1i64..16) {
        let fs = f.rearrange_decreasing();
        let gs = g.rearrange_decreasing();
        prop_assert!(fs.dilate(&int(2)).unwrap().le_everywhere(&fs));
        prop_assert!(fs.le_everywhere(&fs.dilate(&frac(1, 2)).unwrap()));
        prop_assert!(f.dilate(&s).unwrap().rearrange_decreasing().le_everywhere(&fs.dilate(&s).unwrap()));
        let t = frac(k, 16);
        let rhs = fs.dilate(&t).unwrap().add(&gs.dilate(&(one() - &t)).unwrap());
        prop_assert!(f.add(&g).rearrange_decreasing().le_everywhere(&rhs));
    }

    #[test]
    fn monotone_rearrangement_keeps_lengths(b in partition(16)) {
        let star = monotone_rearrangement(&b).unwrap();
        let mut l1 = b.betas();
        let mut l2 = star.betas();
        l1.sort();
        l2.sort();
        prop_assert_eq!(l1, l2);
        prop_assert!(star.betas().windows(2).all(|w| w[0] >= w[1]));
        prop_assert_eq!(min_delta(&star).unwrap(), one());
        prop_assert!(le_golden(&min_delta(&b).unwrap()));
    }

    #[test]
    fn finer_verifying_ratio_within_bound(b in partition(12)) {
        let fine = finer_verifying(&b);
        prop_assert!(partition_verifying_ratio(&fine) <= one() + finer_verifying_bound(&b));
    }

    #[test]
    fn conditional_expectation_laws(f in step(-10, 10, 8), b in partition(10)) {
        let e = cond_exp(&f, &b);
        prop_assert!(same(&cond_exp(&e, &b), &e));
        prop_assert_eq!(e.integral(), f.integral());
        prop_assert!(f.majorizes(&e));
    }

    #[test]
    fn complement_identities(f in step(-10, 10, 8), b in partition(8), a in dyadic_factor()) {
        let p = perp_avg_pullback(&f, &b, None).unwrap();
        prop_assert!(same(&cond_exp(&p, &b), &StepFunction::constant(f.integral())));
        prop_assert!(same(&perp_avg_pullback(&p, &b, None).unwrap(), &p));
        let fs = f.rearrange_decreasing();
        let g = perp_avg_profile(&fs, &b, None).unwrap();
        for t in g.points().iter().filter(|t| **t > Q::default()) {
            prop_assert_eq!(g.double_star(t).unwrap(), weighted_local_average(&fs, &b, t).unwrap());
        }
        let lhs = perp_avg_profile(&dilate_cellwise(&f, &b, &a).unwrap(), &b, None).unwrap();
        let rhs = perp_avg_profile(&f, &b, None).unwrap().dilate(&a).unwrap();
        prop_assert!(same(&lhs, &rhs));
        let k = b.depth();
        let l = cond_exp_badic(&p, &b, 1, k).unwrap();
        let r = perp_avg_pullback(&cond_exp_badic(&f, &b, 1, k).unwrap(), &b, None).unwrap();
        prop_assert!(same(&l, &r));
        prop_assert!(same(&pullback(&perp_avg_profile(&f, &b, None).unwrap(), &b).unwrap(), &p));
    }

    #[test]
    fn four_thirds_bounds(f in step(1, 20, 8), b in partition(16)) {
        prop_assert!(psi_ratio_sup(&f, &b).unwrap() <= frac(4, 3));
        prop_assert!(projection_ratio_holds(&f, &b).unwrap());
    }

    #[test]
    fn marcinkiewicz_norm_homogeneous_and_monotone(x in step(-10, 10, 8), f in step(1, 10, 8), lam in -5i64..=5, k in 1i64..=4) {
        let n = marcinkiewicz_norm(&x, &f).unwrap();
        prop_assert_eq!(marcinkiewicz_norm(&x.scale(&int(lam)), &f).unwrap(), n.clone() * int(lam.abs()));
        // |y| <= |x| pointwise
        let y = x.map(|v| v * frac(k, 4));
        prop_assert!(marcinkiewicz_norm(&y, &f).unwrap() <= n);
    }

    #[test]
    fn complement_average_contracts(x in step(-10, 10, 8), f in step(1, 10, 8), b in partition(8)) {
        let p = perp_avg_pullback(&x, &b, None).unwrap();
        prop_assert!(marcinkiewicz_norm(&p, &f).unwrap() <= marcinkiewicz_norm(&x, &f).unwrap());
    }

    #[test]
    fn breg_bounds_averages_of_rearrangements((f, ft) in rearranged_pair(1, 50, 8), b in partition(10)) {
        let star = monotone_rearrangement(&b).unwrap();
        let m = Monotone::from_step(&f);
        let q = breg_constant(&m, &star, None).unwrap();
        prop_assert!(q.value() <= reg_constant(&m, None).unwrap().value());
        let v = nf_member(&cond_exp(&ft, &star), &f, None).unwrap();
        prop_assert!(v.certificate <= int(4) * q.value(), "certificate {} vs Q {}", v.certificate, q.value());
        // complement of the same partition keeps sampled rearrangements in N_f
        let w = nf_member(&perp_avg_pullback(&ft, &b, None).unwrap(), &f, Some(&int(1024))).unwrap();
        prop_assert!(w.member);
    }

    #[test]
    fn constructor_output_verifies(x in prop::collection::vec(0i64..16, 8), cuts in prop::collection::vec(any::<bool>(), 7), ys in prop::collection::vec(0i64..16, 8)) {
        let xs = grid_step(&x.iter().map(|v| int(*v)).collect::<Vec<_>>()).unwrap();
        let mut pts = vec![one()];
        for (k, c) in (1..8).rev().zip(&cuts) {
            if *c {
                pts.push(frac(k, 8));
            }
        }
        pts.push(Q::default());
        let part = Partition::new(pts).unwrap();
        let cells = part.cells();
        let mut vals = ys[..cells.len()].to_vec();
        vals.sort_unstable();
        let pieces: Vec<(Q, Q)> = cells.iter().rev().zip(vals.iter().rev()).map(|((lo, hi), v)| (hi - lo, int(*v))).collect();
        let y = StepFunction::from_lengths(&pieces).unwrap();
        let eps = frac(1, 16);
        match construct_dominating(&xs, &y, &part, &eps) {
            Ok(out) => {
                prop_assert!(xs.majorizes(&y));
                prop_assert!(out.equimeasurable(&xs.map(|v| v + &eps)));
                prop_assert!(y.le_everywhere(&cond_exp(&out, &part)));
            }
            Err(_) => prop_assert!(!xs.majorizes(&y)),
        }
    }

    #[test]
    fn lp_solutions_are_feasible(rows in prop::collection::vec(prop::collection::vec(-3i64..=3, 3), 1..=3), x in prop::collection::vec(0i64..=4, 3)) {
        // right-hand sides from a known non-negative point
        let a: Vec<Vec<Q>> = rows.iter().map(|r| r.iter().map(|v| int(*v)).collect()).collect();
        let b: Vec<Q> = rows.iter().map(|r| int(r.iter().zip(&x).map(|(c, v)| c * v).sum())).collect();
        let sol = lp::feasible(&a, &b, &[], &[]).expect("a feasible point exists");
        for (r, rhs) in a.iter().zip(&b) {
            let lhs: Q = r.iter().zip(&sol).map(|(c, v)| c * v).sum();
            prop_assert_eq!(&lhs, rhs);
        }
        prop_assert!(sol.iter().all(|v| *v >= Q::default()));
    }
}
