//! One CSV row per trial for a named metric.

use serde::Serialize;
use symideal_core::extremal::{
    four_thirds_target, four_thirds_witness, golden_target, golden_witness, min_delta,
    psi_ratio_sup,
};
use symideal_core::random;
use symideal_core::rational::{self, frac, int, le_golden, pow2};
use symideal_core::{Result, Q};

pub const METRICS: [&str; 4] = ["min-delta", "psi-ratio", "golden-witness", "four-thirds-witness"];

#[derive(Debug, Clone)]
pub struct SweepConfig {
    pub seed: u64,
    pub trials: usize,
    /// cells per random partition, or witness depth
    pub depth: usize,
    pub precision: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Row {
    pub seed: u64,
    pub trial: usize,
    pub depth: usize,
    pub metric: String,
    pub value: String,
    pub exact: String,
    pub verdict: String,
}

fn verdict(ok: bool) -> String {
    if ok { "PASS" } else { "FAIL" }.to_string()
}

/// Metric value and verdict for one trial. Random metrics reseed per trial so
/// rows do not depend on each other.
fn trial(metric: &str, cfg: &SweepConfig, i: usize) -> Result<(Q, bool)> {
    let mut rng = random::rng(cfg.seed.wrapping_add(i as u64));
    match metric {
        "min-delta" => {
            let d = min_delta(&random::partition(&mut rng, cfg.depth.max(1)))?;
            let ok = le_golden(&d);
            Ok((d, ok))
        }
        "psi-ratio" => {
            let f = random::step(&mut rng, 8, 1, 20);
            let r = psi_ratio_sup(&f, &random::partition(&mut rng, cfg.depth.max(1)))?;
            let ok = r <= frac(4, 3);
            Ok((r, ok))
        }
        "golden-witness" => {
            // epsilon = 1/(20 * 2^i)
            let eps = pow2(-(i as i64)) / int(20);
            let w = golden_witness(&eps, cfg.depth, 64)?;
            let d = min_delta(&w.partition)?;
            let ok = d == golden_target(&w.alpha, &eps) && le_golden(&d);
            Ok((d, ok))
        }
        "four-thirds-witness" => {
            // epsilon = 1/(10 * 2^i)
            let eps = pow2(-(i as i64)) / int(10);
            let (f, b) = four_thirds_witness(&eps, cfg.depth)?;
            let r = psi_ratio_sup(&f, &b)?;
            let ok = r == four_thirds_target(&eps) && r <= frac(4, 3);
            Ok((r, ok))
        }
        _ => Err(symideal_core::Error::Invalid(format!(
            "unknown metric {metric:?}; expected one of {}",
            METRICS.join(", ")
        ))),
    }
}

pub fn run(metric: &str, cfg: &SweepConfig) -> Result<Vec<Row>> {
    (0..cfg.trials)
        .map(|i| {
            let (v, ok) = trial(metric, cfg, i)?;
            Ok(Row {
                seed: cfg.seed,
                trial: i,
                depth: cfg.depth,
                metric: metric.to_string(),
                value: rational::decimal(&v, cfg.precision),
                exact: rational::fmt(&v),
                verdict: verdict(ok),
            })
        })
        .collect()
}

pub fn to_csv(rows: &[Row]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r).expect("rows serialize");
    }
    String::from_utf8(w.into_inner().expect("in-memory writer")).expect("utf-8")
}
