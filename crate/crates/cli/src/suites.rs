//! Named verification suites. Each suite draws from its own seeded stream, so
//! a suite gives the same report alone or inside `all`.

use rand::Rng;
use serde_json::{json, Value};
use symideal_core::averaging::{
    cond_exp, cond_exp_badic, dilate_cellwise, perp_avg_profile, perp_avg_pullback,
    weighted_local_average,
};
use symideal_core::extremal::{
    four_thirds_target, four_thirds_witness, golden_target, golden_witness, min_delta,
    projection_ratio_holds, psi_ratio_sup,
};
use symideal_core::ideals::{
    abramovich_demo, breg_constant, breg_equiv_check, nf_member, nonavg_witness,
    nonuniversal_witness_q, verifying_witness_q, witness_average,
};
use symideal_core::partition::{ExpRule, Exponents};
use symideal_core::random;
use symideal_core::rational::{self, frac, int, le_golden, one, zero};
use symideal_core::rearrange::{
    apply_permutation, construct_dominating, grid_step, permutation_oracle, transport_oracle,
};
use symideal_core::regularity::{
    dyadic_points, q_psi_counts, reg_constant, synthesize_from_q, Estimate, QSequence,
};
use symideal_core::{
    DyadicRule, Error, IntervalPartition, Monotone, Partition, StepFunction, Q,
};

use crate::report::{q_value, Check, Report, SuiteReport};

pub const SUITES: [&str; 9] = [
    "lemma0",
    "golden",
    "four-thirds",
    "regularity",
    "breg",
    "perp",
    "rearrange",
    "witnesses",
    "abramovich",
];

/// Threshold at which a growing certificate is reported unbounded.
pub fn threshold() -> Q {
    int(1024)
}

#[derive(Debug, Clone)]
pub struct SuiteConfig {
    pub seed: u64,
    /// overrides every suite's default trial count
    pub trials: Option<usize>,
    pub precision: usize,
    /// constant the four-thirds suite checks against
    pub four_thirds_bound: Q,
}

impl SuiteConfig {
    pub fn new(seed: u64) -> Self {
        Self { seed, trials: None, precision: 12, four_thirds_bound: frac(4, 3) }
    }

    fn trials(&self, default: usize) -> usize {
        self.trials.unwrap_or(default)
    }

    fn rng(&self, suite: usize) -> impl Rng {
        random::rng(self.seed.wrapping_mul(0x9E37_79B9_7F4A_7C15).wrapping_add(suite as u64))
    }

    fn check(&self, name: &str) -> Check {
        Check::new(name, self.precision)
    }
}

/// Runs one suite, or every suite for `"all"`.
pub fn run(name: &str, cfg: &SuiteConfig) -> Result<Report, String> {
    let picked: Vec<usize> = if name == "all" {
        (0..SUITES.len()).collect()
    } else {
        match SUITES.iter().position(|s| *s == name) {
            Some(i) => vec![i],
            None => {
                return Err(format!(
                    "unknown suite {name:?}; expected one of {}, all",
                    SUITES.join(", ")
                ))
            }
        }
    };
    let suites = picked.into_iter().map(|i| run_index(i, cfg)).collect();
    Ok(Report::new(cfg.seed, suites))
}

fn run_index(i: usize, cfg: &SuiteConfig) -> SuiteReport {
    let checks = match SUITES[i] {
        "lemma0" => lemma0(cfg),
        "golden" => golden(cfg),
        "four-thirds" => four_thirds(cfg),
        "regularity" => regularity(cfg),
        "breg" => breg(cfg),
        "perp" => perp(cfg),
        "rearrange" => rearrange(cfg),
        "witnesses" => witnesses(cfg),
        "abramovich" => abramovich(cfg),
        _ => unreachable!(),
    };
    SuiteReport::new(SUITES[i], checks)
}

/// Unwraps `r`, recording a failed trial on error.
fn ok<T>(c: &mut Check, r: symideal_core::Result<T>) -> Option<T> {
    match r {
        Ok(v) => Some(v),
        Err(e) => {
            c.expect(false, || e.to_string());
            None
        }
    }
}

fn same(a: &StepFunction, b: &StepFunction) -> bool {
    a.le_everywhere(b) && b.le_everywhere(a)
}

fn estimate_json(e: &Estimate, precision: usize) -> Value {
    match e {
        Estimate::Finite { value } => json!({ "verdict": "finite", "value": q_value(value, precision) }),
        Estimate::Unbounded { depth, at, value } => json!({
            "verdict": "unbounded",
            "depth": depth,
            "at": rational::fmt(at),
            "value": q_value(value, precision),
        }),
    }
}

fn qs_json(xs: &[Q], precision: usize) -> Value {
    Value::Array(xs.iter().map(|x| q_value(x, precision)).collect())
}

fn random_step(rng: &mut impl Rng, max_pieces: usize, lo: i64, hi: i64) -> StepFunction {
    let n = rng.gen_range(1..=max_pieces);
    random::step(rng, n, lo, hi)
}

fn random_partition(rng: &mut impl Rng, lo: usize, hi: usize) -> Partition {
    let n = rng.gen_range(lo..=hi);
    random::partition(rng, n)
}

fn lemma0(cfg: &SuiteConfig) -> Vec<Check> {
    let mut rng = cfg.rng(0);
    let mut sandwich = cfg.check("dilation_sandwich");
    let mut dilated = cfg.check("dilated_rearrangement");
    let mut split = cfg.check("sum_splitting");
    let factors = [frac(1, 4), frac(1, 2), frac(2, 3), frac(3, 2), int(2), int(3)];
    for _ in 0..cfg.trials(2000) {
        let f = random_step(&mut rng, 8, -8, 8);
        let g = random_step(&mut rng, 8, -8, 8);
        let s = factors[rng.gen_range(0..factors.len())].clone();
        let t = frac(rng.gen_range(1..=15), 16);
        let fs = f.rearrange_decreasing();
        let gs = g.rearrange_decreasing();

        if let (Some(lo), Some(hi)) = (ok(&mut sandwich, fs.dilate(&int(2))), ok(&mut sandwich, fs.dilate(&frac(1, 2)))) {
            sandwich.expect(lo.le_everywhere(&fs) && fs.le_everywhere(&hi), || format!("f = {f:?}"));
        }
        if let (Some(a), Some(b)) = (ok(&mut dilated, f.dilate(&s)), ok(&mut dilated, fs.dilate(&s))) {
            dilated.expect(a.rearrange_decreasing().le_everywhere(&b), || {
                format!("s = {}, f = {f:?}", rational::fmt(&s))
            });
        }
        if let (Some(a), Some(b)) = (ok(&mut split, fs.dilate(&t)), ok(&mut split, gs.dilate(&(one() - &t)))) {
            split.expect(f.add(&g).rearrange_decreasing().le_everywhere(&a.add(&b)), || {
                format!("s = {}, f = {f:?}, g = {g:?}", rational::fmt(&t))
            });
        }
    }
    vec![sandwich, dilated, split]
}

fn golden(cfg: &SuiteConfig) -> Vec<Check> {
    let mut rng = cfg.rng(1);
    let mut bound = cfg.check("golden_bound");
    let mut worst = one();
    for _ in 0..cfg.trials(1000) {
        let b = random_partition(&mut rng, 2, 64);
        if let Some(d) = ok(&mut bound, min_delta(&b)) {
            bound.expect(le_golden(&d), || format!("delta = {} on {:?}", rational::fmt(&d), b.points()));
            if d > worst {
                worst = d;
            }
        }
    }
    bound.set_q("max_delta", &worst);
    bound.set("algebraic_verdict", json!({ "test": "delta^2 <= delta + 1", "holds": le_golden(&worst) }));

    let mut witness = cfg.check("golden_witness_family");
    let mut prev = zero();
    let mut rows = Vec::new();
    for d in [20i64, 100, 1000] {
        let eps = frac(1, d);
        let Some(w) = ok(&mut witness, golden_witness(&eps, 50, 64)) else { continue };
        let Some(delta) = ok(&mut witness, min_delta(&w.partition)) else { continue };
        let fine = delta == golden_target(&w.alpha, &eps)
            && w.expected_lo <= delta
            && delta <= w.expected_hi
            && delta > prev
            && le_golden(&delta);
        witness.expect(fine, || format!("epsilon = 1/{d}: delta = {}", rational::fmt(&delta)));
        rows.push(json!({
            "epsilon": rational::fmt(&eps),
            "delta": q_value(&delta, cfg.precision),
            "expected_lo": q_value(&w.expected_lo, cfg.precision),
            "expected_hi": q_value(&w.expected_hi, cfg.precision),
        }));
        prev = delta;
    }
    witness.set("family", rows);
    vec![bound, witness]
}

fn four_thirds(cfg: &SuiteConfig) -> Vec<Check> {
    let mut rng = cfg.rng(2);
    let bound = &cfg.four_thirds_bound;
    let mut random_pairs = cfg.check("psi_ratio_bound");
    let mut projections = cfg.check("projection_ratio");
    random_pairs.set_q("bound", bound);
    let mut worst = one();
    for _ in 0..cfg.trials(1000) {
        let f = random_step(&mut rng, 8, 1, 20);
        let b = random_partition(&mut rng, 2, 16);
        if let Some(r) = ok(&mut random_pairs, psi_ratio_sup(&f, &b)) {
            random_pairs.expect(r <= *bound, || format!("ratio {} for f = {f:?}, B = {:?}", rational::fmt(&r), b.points()));
            if r > worst {
                worst = r;
            }
        }
        if let Some(h) = ok(&mut projections, projection_ratio_holds(&f, &b)) {
            projections.expect(h, || format!("f = {f:?}, B = {:?}", b.points()));
        }
    }
    random_pairs.set_q("max_ratio", &worst);

    let mut witness = cfg.check("witness_values");
    witness.set_q("bound", bound);
    for (eps, want) in [(frac(1, 10), frac(74, 57)), (frac(1, 1000), frac(7994, 5997))] {
        let Some((f, b)) = ok(&mut witness, four_thirds_witness(&eps, 40)) else { continue };
        let Some(r) = ok(&mut witness, psi_ratio_sup(&f, &b)) else { continue };
        let key = format!("ratio_eps_{}", rational::fmt(&eps).replace('/', "_"));
        witness.set_q(&key, &r);
        witness.expect(r == want && r == four_thirds_target(&eps), || {
            format!("epsilon {}: ratio {} != {}", rational::fmt(&eps), rational::fmt(&r), rational::fmt(&want))
        });
        witness.expect(r <= *bound, || format!("witness ratio {} exceeds bound {}", rational::fmt(&r), rational::fmt(bound)));
        if eps == frac(1, 1000) {
            witness.expect(r > frac(13328, 10000), || "ratio not above 1.3328".into());
        }
    }
    vec![random_pairs, projections, witness]
}

/// First depth of `depths` at which `reg_constant` of the synthesized `q`
/// crosses the threshold.
fn reg_crossing(q: &QSequence, depths: &[usize]) -> symideal_core::Result<Option<(usize, Estimate)>> {
    for &d in depths {
        let (_, fam) = synthesize_from_q(q, d)?;
        let e = reg_constant(&Monotone::from_family(&fam)?, Some(&threshold()))?;
        if !e.is_finite() {
            return Ok(Some((d, e)));
        }
    }
    Ok(None)
}

fn regularity(cfg: &SuiteConfig) -> Vec<Check> {
    let mut one_c = cfg.check("q_const_one");
    if let Some((_, fam)) = ok(&mut one_c, synthesize_from_q(&QSequence::Const { c: 1 }, 24)) {
        one_c.expect(fam.values().iter().all(|v| *v == one()) && *fam.next() == one(), || {
            format!("values {:?}", fam.values())
        });
    }

    let mut two = cfg.check("q_const_two");
    let want: Vec<Q> = vec![frac(1, 2), one(), one(), int(2), int(2), int(4)];
    if let Some((_, fam)) = ok(&mut two, synthesize_from_q(&QSequence::Const { c: 2 }, 24)) {
        two.expect(fam.values()[..6] == want[..], || format!("values {:?}", &fam.values()[..6]));
        two.set("values_d1_d6", qs_json(&fam.values()[..6], cfg.precision));
        if let Some(m) = ok(&mut two, Monotone::from_family(&fam)) {
            if let Some(counts) = ok(&mut two, q_psi_counts(&m, &dyadic_points(24))) {
                two.expect(!counts.is_empty() && counts.iter().all(|&(_, c)| c == 2), || format!("counts {counts:?}"));
                two.set("ranks_checked", counts.len());
            }
        }
    }

    let mut linear = cfg.check("q_linear_crosses_threshold");
    let depths: Vec<usize> = (1..=16).map(|k| 25 * k).collect();
    linear.set_q("threshold", &threshold());
    if let Some(found) = ok(&mut linear, reg_crossing(&QSequence::Affine { a: 1, b: 0 }, &depths)) {
        linear.expect(found.is_some(), || "no crossing up to depth 400".into());
        if let Some((d, e)) = found {
            linear.set("crossing_synthesis_depth", d);
            linear.set("reg_constant", estimate_json(&e, cfg.precision));
        }
    }

    let mut geometric = cfg.check("geometric_family_regular");
    for r in [frac(5, 4), frac(3, 2), frac(7, 4)] {
        let rule = DyadicRule::Geometric { first: one(), ratio: r.clone() };
        let Some(fam) = ok(&mut geometric, rule.materialize(60)) else { continue };
        let Some(m) = ok(&mut geometric, Monotone::from_family(&fam)) else { continue };
        let Some(e) = ok(&mut geometric, reg_constant(&m, Some(&threshold()))) else { continue };
        geometric.expect(e.is_finite(), || format!("ratio {} crossed", rational::fmt(&r)));
        geometric.max_q("max_reg_constant", e.value());
    }
    vec![one_c, two, linear, geometric]
}

fn linear_q_instance(depth: usize) -> symideal_core::Result<(Monotone, Partition)> {
    let (_, fam) = synthesize_from_q(&QSequence::Affine { a: 1, b: 0 }, depth)?;
    let m = Monotone::from_family(&fam)?;
    let b = IntervalPartition::geometric(frac(1, 2)).materialize(depth)?;
    Ok((m, b))
}

fn breg(cfg: &SuiteConfig) -> Vec<Check> {
    let mut rng = cfg.rng(4);
    let mut unbounded = cfg.check("linear_q_breg_unbounded");
    let mut trace = cfg.check("nonavg_trace");
    if let Some((m, b)) = ok(&mut unbounded, linear_q_instance(300)) {
        unbounded.set("synthesis_depth", 300);
        if let Some(e) = ok(&mut unbounded, breg_constant(&m, &b, Some(&threshold()))) {
            unbounded.expect(!e.is_finite(), || "breg stayed below the threshold".into());
            unbounded.set("breg_constant", estimate_json(&e, cfg.precision));
        }
        if let Some(w) = ok(&mut trace, nonavg_witness(&m, &b, 6)) {
            trace.expect(w.holds(), || "trace below bounds".into());
            trace.set("points", w.points.iter().map(rational::fmt).collect::<Vec<_>>());
            trace.set("trace", qs_json(&w.trace, cfg.precision));
            trace.set("bounds", qs_json(&w.bounds, cfg.precision));
            if let Some(avg) = ok(&mut trace, witness_average(&m, &w)) {
                if let Some(v) = ok(&mut trace, nf_member(&avg, m.step(), Some(&int(6)))) {
                    trace.expect(!v.member, || "E(f|V) stayed in N_f at K".into());
                    trace.set_q("membership_certificate", &v.certificate);
                }
            }
        }
    }

    let mut factor = cfg.check("breg_within_four_reg");
    let mut worst = zero();
    for _ in 0..cfg.trials(200) {
        let f = Monotone::from_step(&random_step(&mut rng, 10, 1, 50).rearrange_decreasing());
        let b = random_partition(&mut rng, 2, 32);
        let (Some(br), Some(rg)) = (ok(&mut factor, breg_constant(&f, &b, None)), ok(&mut factor, reg_constant(&f, None))) else {
            continue;
        };
        let ratio = br.value() / rg.value();
        factor.expect(ratio <= int(4), || format!("breg {} vs reg {}", rational::fmt(br.value()), rational::fmt(rg.value())));
        if ratio > worst {
            worst = ratio;
        }
    }
    for r in [one(), frac(5, 4), frac(3, 2), frac(7, 4)] {
        let rule = DyadicRule::Geometric { first: one(), ratio: r };
        let Some(fam) = ok(&mut factor, rule.materialize(60)) else { continue };
        let Some(f) = ok(&mut factor, Monotone::from_family(&fam)) else { continue };
        for part in [
            IntervalPartition::geometric(frac(1, 2)),
            IntervalPartition::geometric(frac(1, 3)),
            IntervalPartition::geometric(frac(3, 4)),
            IntervalPartition::dyadic_rule(ExpRule::Square),
        ] {
            let Some(b) = ok(&mut factor, part.materialize(40)) else { continue };
            let (Some(br), Some(rg)) = (ok(&mut factor, breg_constant(&f, &b, None)), ok(&mut factor, reg_constant(&f, None))) else {
                continue;
            };
            let ratio = br.value() / rg.value();
            factor.expect(ratio <= int(4), || format!("breg {} vs reg {}", rational::fmt(br.value()), rational::fmt(rg.value())));
            if ratio > worst {
                worst = ratio;
            }
        }
    }
    factor.set_q("max_breg_over_reg", &worst);

    let mut equiv = cfg.check("equivalence_consistent");
    for _ in 0..cfg.trials(200) {
        let f = random_step(&mut rng, 10, 1, 50);
        let b = random_partition(&mut rng, 2, 32);
        if let Some(rep) = ok(&mut equiv, breg_equiv_check(&f, &b, &threshold())) {
            equiv.expect(rep.consistent, || format!("f = {f:?}, B = {:?}", b.points()));
        }
    }
    vec![unbounded, trace, factor, equiv]
}

fn perp(cfg: &SuiteConfig) -> Vec<Check> {
    let mut rng = cfg.rng(5);
    let names = [
        "projection",
        "mass_conservation",
        "majorization",
        "complement_then_partition_is_constant",
        "profile_local_average_identity",
        "profile_dilation_commutes",
        "badic_commutation",
    ];
    let mut checks: Vec<Check> = names.iter().map(|n| cfg.check(n)).collect();
    let factors = [frac(1, 3), frac(1, 2), frac(2, 3), frac(3, 2), int(2)];
    for _ in 0..cfg.trials(500) {
        let f = random_step(&mut rng, 8, -10, 10);
        let b = random_partition(&mut rng, 2, 10);
        let a = factors[rng.gen_range(0..factors.len())].clone();
        let ctx = || format!("f = {f:?}, B = {:?}", b.points());
        let [proj, mass, major, flat, profile, dilation, badic] = &mut checks[..] else { unreachable!() };

        let e = cond_exp(&f, &b);
        proj.expect(same(&cond_exp(&e, &b), &e), ctx);
        mass.expect(e.integral() == f.integral(), ctx);
        major.expect(f.majorizes(&e), ctx);

        if let Some(p) = ok(flat, perp_avg_pullback(&f, &b, None)) {
            flat.expect(same(&cond_exp(&p, &b), &StepFunction::constant(f.integral())), ctx);
        }

        let fs = f.rearrange_decreasing();
        if let Some(g) = ok(profile, perp_avg_profile(&fs, &b, None)) {
            let mut grid: Vec<Q> = g.points().iter().chain(fs.points()).filter(|t| **t > zero()).cloned().collect();
            grid.push(frac(rng.gen_range(1..=99), 100));
            let mut fine = true;
            for t in &grid {
                match (g.double_star(t), weighted_local_average(&fs, &b, t)) {
                    (Ok(l), Ok(r)) => fine &= l == r,
                    _ => fine = false,
                }
            }
            profile.expect(fine, ctx);
        }

        let lhs = dilate_cellwise(&f, &b, &a).and_then(|d| perp_avg_profile(&d, &b, None));
        let rhs = perp_avg_profile(&f, &b, None).and_then(|g| g.dilate(&a));
        if let (Some(l), Some(r)) = (ok(dilation, lhs), ok(dilation, rhs)) {
            dilation.expect(same(&l, &r), ctx);
        }

        let k = b.depth();
        let lhs = perp_avg_pullback(&f, &b, None).and_then(|p| cond_exp_badic(&p, &b, 1, k));
        let rhs = cond_exp_badic(&f, &b, 1, k).and_then(|c| perp_avg_pullback(&c, &b, None));
        if let (Some(l), Some(r)) = (ok(badic, lhs), ok(badic, rhs)) {
            badic.expect(same(&l, &r), ctx);
        }
    }
    checks
}

/// Values of `x` on the 8-grid, a grid-aligned partition `F`, and `y`
/// non-increasing and constant on the cells of `F`.
pub fn rearrange_instance(rng: &mut impl Rng) -> (Vec<Q>, Partition, StepFunction) {
    let x: Vec<Q> = random::grid_values(rng, 8, 15).into_iter().map(int).collect();
    let mut pts = vec![one()];
    for k in (1..8).rev() {
        if rng.gen_bool(0.4) {
            pts.push(frac(k, 8));
        }
    }
    pts.push(zero());
    let part = Partition::new(pts).expect("grid points descend");
    let cells = part.cells();
    let mut vals: Vec<i64> = (0..cells.len()).map(|_| rng.gen_range(0..=15)).collect();
    vals.sort_unstable();
    let pieces: Vec<(Q, Q)> = cells
        .iter()
        .rev()
        .zip(vals.iter().rev())
        .map(|((lo, hi), v)| (hi - lo, int(*v)))
        .collect();
    (x, part, StepFunction::from_lengths(&pieces).expect("cells tile (0,1]"))
}

fn rearrange(cfg: &SuiteConfig) -> Vec<Check> {
    let mut rng = cfg.rng(6);
    let eps = frac(1, 16);
    let want = cfg.trials(200);
    let mut built = cfg.check("constructor_on_hypothesis");
    let mut contra = cfg.check("oracle_contrapositive");
    let mut perm = cfg.check("permutation_witnesses");
    let (mut generated, mut infeasible, mut perm_found) = (0usize, 0usize, 0usize);
    while built.trials < want && generated < 100 * want.max(1) {
        generated += 1;
        let (x, part, y) = rearrange_instance(&mut rng);
        let Some(xs) = ok(&mut built, grid_step(&x)) else { continue };
        let pre = xs.majorizes(&y);
        if pre {
            match construct_dominating(&xs, &y, &part, &eps) {
                Ok(out) => built.expect(
                    out.equimeasurable(&xs.map(|v| v + &eps)) && y.le_everywhere(&cond_exp(&out, &part)),
                    || format!("output fails verification: x = {x:?}"),
                ),
                Err(e) => built.expect(false, || format!("{e}: x = {x:?}")),
            }
        }
        if let Some(feasible) = ok(&mut contra, transport_oracle(&xs, &y, &part)) {
            if !feasible {
                infeasible += 1;
                contra.expect(!pre, || format!("oracle-infeasible but hypothesis holds: x = {x:?}"));
            }
        }
        match permutation_oracle(&x, &y, &part) {
            Ok(Some(p)) => {
                perm_found += 1;
                let ok_perm = grid_step(&apply_permutation(&x, &p))
                    .is_ok_and(|xb| y.le_everywhere(&cond_exp(&xb, &part)));
                perm.expect(pre && ok_perm, || format!("permutation witness invalid: x = {x:?}"));
            }
            Ok(None) => {}
            Err(Error::OracleLimit(_)) => {}
            Err(e) => perm.expect(false, || e.to_string()),
        }
    }
    if built.trials < want {
        built.fail(format!("only {} hypothesis instances in {generated} draws", built.trials));
    }
    built.set("instances_generated", generated);
    built.set_q("epsilon", &eps);
    contra.set("oracle", "exact transport feasibility over level sets");
    contra.set("oracle_infeasible_instances", infeasible);
    perm.set("permutation_witnesses_found", perm_found);
    vec![built, contra, perm]
}

/// Synthesis depth resolving `DyadicExp(n^2)` at depth 20 (down to `2^-400`).
const SQUARE_SYNTHESIS_DEPTH: usize = 420;
const SQUARE_PARTITION_DEPTH: usize = 20;

fn square_estimates(q: &QSequence) -> symideal_core::Result<(Estimate, Estimate)> {
    let (_, fam) = synthesize_from_q(q, SQUARE_SYNTHESIS_DEPTH)?;
    let m = Monotone::from_family(&fam)?;
    let b = IntervalPartition::dyadic_rule(ExpRule::Square).materialize(SQUARE_PARTITION_DEPTH)?;
    Ok((breg_constant(&m, &b, Some(&threshold()))?, reg_constant(&m, Some(&threshold()))?))
}

fn witnesses(cfg: &SuiteConfig) -> Vec<Check> {
    let sq = Exponents::rule(ExpRule::Square);
    let mut verifying = cfg.check("verifying_witness");
    if let Some(q) = ok(&mut verifying, verifying_witness_q(&sq, SQUARE_PARTITION_DEPTH)) {
        if let Some((br, rg)) = ok(&mut verifying, square_estimates(&q)) {
            verifying.expect(br.is_finite(), || "breg certificate crossed the threshold".into());
            verifying.expect(!rg.is_finite(), || "reg_constant stayed below the threshold".into());
            verifying.set("breg_constant", estimate_json(&br, cfg.precision));
            verifying.set("reg_constant", estimate_json(&rg, cfg.precision));
        }
    }

    let mut nonuniversal = cfg.check("nonuniversal_witness");
    if let Some(q) = ok(&mut nonuniversal, nonuniversal_witness_q(&sq, SQUARE_PARTITION_DEPTH)) {
        if let Some((br, _)) = ok(&mut nonuniversal, square_estimates(&q)) {
            nonuniversal.expect(!br.is_finite(), || "breg certificate stayed finite".into());
            nonuniversal.set("breg_constant", estimate_json(&br, cfg.precision));
        }
    }

    let mut bounded = cfg.check("bounded_gaps_not_applicable");
    let lin = Exponents::rule(ExpRule::Linear);
    for r in [verifying_witness_q(&lin, 20), nonuniversal_witness_q(&lin, 20)] {
        bounded.expect(matches!(r, Err(Error::NotApplicable(_))), || format!("{r:?}"));
    }

    // the untransformed gap sequence of n^2 separates the two certificates
    let mut gaps = cfg.check("gap_sequence_separates");
    let q = QSequence::Explicit { values: (1..=30u64).map(|n| 2 * n + 1).collect() };
    if let Some((br, rg)) = ok(&mut gaps, square_estimates(&q)) {
        gaps.expect(br.is_finite() && !rg.is_finite(), || "certificates do not separate".into());
        gaps.set("breg_constant", estimate_json(&br, cfg.precision));
        gaps.set("reg_constant", estimate_json(&rg, cfg.precision));
    }
    vec![verifying, nonuniversal, bounded, gaps]
}

fn abramovich(cfg: &SuiteConfig) -> Vec<Check> {
    let c = frac(1, 2);
    let mut s2 = cfg.check("s2_exact");
    let mut s1 = cfg.check("s1_brackets");
    s1.set_q("c", &c);
    let mut prev = zero();
    let mut rows = Vec::new();
    for k in [1u64, 8, 64] {
        let Some(d) = ok(&mut s2, abramovich_demo(k, &c)) else { continue };
        s2.expect(d.s2 == frac(k as i64, 8), || format!("K = {k}: S2 = {}", rational::fmt(&d.s2)));
        s1.expect(d.s1_lo <= d.s1_hi && d.s1_lo > prev && d.s1_hi <= d.s1_bound, || format!("K = {k}"));
        prev = d.s1_lo.clone();
        rows.push(json!({
            "k": k,
            "s1_lo": q_value(&d.s1_lo, cfg.precision),
            "s1_hi": q_value(&d.s1_hi, cfg.precision),
            "s1_bound": q_value(&d.s1_bound, cfg.precision),
            "s2": q_value(&d.s2, cfg.precision),
        }));
    }
    s1.set("rows", rows);
    vec![s2, s1]
}
