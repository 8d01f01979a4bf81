//! JSON-in, JSON-out commands. Rationals travel as `"p/q"` strings.

use serde::de::DeserializeOwned;
use serde::Deserialize;
use serde_json::{json, Value};
use symideal_core::averaging::{cond_exp, perp_avg_profile, perp_avg_pullback};
use symideal_core::extremal::{golden_target, golden_witness, min_delta, psi_ratio_sup, four_thirds_target, four_thirds_witness};
use symideal_core::ideals::{
    abramovich_demo, breg_constant, breg_equiv_check, marcinkiewicz_norm, nf_member,
    nonavg_witness, nonuniversal_witness_q, verifying_witness_q,
};
use symideal_core::partition::{
    finer_verifying, finer_verifying_bound, partition_verifying_ratio, verifying_ratio, Exponents,
};
use symideal_core::rational::{self, frac, le_golden};
use symideal_core::rearrange::construct_dominating;
use symideal_core::regularity::{
    dyadic_points, q_psi_counts, reg_constant, synthesize_from_q, weak_reg_constant, QSequence,
};
use symideal_core::{DyadicSpec, Error, IntervalPartition, Monotone, Result, StepFunction, Q};

use crate::suites::threshold;

pub const COMMANDS: [&str; 14] = [
    "rearrange",
    "avg",
    "avg-perp",
    "regularity",
    "breg",
    "member",
    "verify-partition",
    "finer-verifying",
    "golden",
    "psi-ratio",
    "synthesize-q",
    "witness",
    "dominate",
    "demo-abramovich",
];

/// Materialization depth when `--depth` is absent.
pub const DEFAULT_DEPTH: usize = 32;

#[derive(Debug, Clone)]
pub struct Options {
    pub depth: usize,
}

fn parse<T: DeserializeOwned>(input: &Value) -> Result<T> {
    serde_json::from_value(input.clone()).map_err(|e| Error::Parse(e.to_string()))
}

fn q_or(s: &Option<String>, default: Q) -> Result<Q> {
    s.as_deref().map_or(Ok(default), rational::parse)
}

fn to_json<T: serde::Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("core types serialize")
}

fn qs(xs: &[Q]) -> Value {
    Value::Array(xs.iter().map(|x| Value::String(rational::fmt(x))).collect())
}

/// A non-increasing function given as a step function, a dyadic family, or a
/// q-sequence to synthesize at `--depth`.
#[derive(Debug, Deserialize)]
struct Source {
    f: Option<StepFunction>,
    family: Option<DyadicSpec>,
    q: Option<QSequence>,
}

impl Source {
    fn monotone(&self, depth: usize) -> Result<Monotone> {
        match (&self.f, &self.family, &self.q) {
            (Some(f), None, None) => Ok(Monotone::from_step(f)),
            (None, Some(spec), None) => Monotone::from_family(&spec.materialize()?),
            (None, None, Some(q)) => Monotone::from_family(&synthesize_from_q(q, depth)?.1),
            _ => Err(Error::Invalid("give exactly one of \"f\", \"family\" or \"q\"".into())),
        }
    }
}

#[derive(Debug, Deserialize)]
struct FnPart {
    f: StepFunction,
    partition: IntervalPartition,
    tol: Option<String>,
}

#[derive(Debug, Deserialize)]
struct SourcePart {
    #[serde(flatten)]
    source: Source,
    partition: IntervalPartition,
    threshold: Option<String>,
    k: Option<usize>,
}

#[derive(Debug, Deserialize)]
struct PartOrEps {
    partition: Option<IntervalPartition>,
    f: Option<StepFunction>,
    epsilon: Option<String>,
}

pub fn run(cmd: &str, input: &Value, opts: &Options) -> Result<Value> {
    let depth = opts.depth;
    match cmd {
        "rearrange" => {
            #[derive(Deserialize)]
            struct In {
                f: StepFunction,
            }
            let i: In = parse(input)?;
            let fs = i.f.rearrange_decreasing();
            let grid: Vec<Q> = fs.points().iter().filter(|t| **t > rational::zero()).cloned().collect();
            let ds: Vec<Value> = fs
                .double_star_fn(&grid)?
                .into_iter()
                .map(|(t, v)| json!({ "t": rational::fmt(&t), "value": rational::fmt(&v) }))
                .collect();
            Ok(json!({ "rearranged": to_json(&fs), "double_star": ds }))
        }
        "avg" => {
            let i: FnPart = parse(input)?;
            let b = i.partition.materialize(depth)?;
            Ok(json!({ "partition": to_json(&b), "cond_exp": to_json(&cond_exp(&i.f, &b)) }))
        }
        "avg-perp" => {
            let i: FnPart = parse(input)?;
            let b = i.partition.materialize(depth)?;
            let tol = i.tol.as_deref().map(rational::parse).transpose()?;
            Ok(json!({
                "partition": to_json(&b),
                "profile": to_json(&perp_avg_profile(&i.f, &b, tol.as_ref())?),
                "pullback": to_json(&perp_avg_pullback(&i.f, &b, tol.as_ref())?),
            }))
        }
        "regularity" => {
            #[derive(Deserialize)]
            struct In {
                #[serde(flatten)]
                source: Source,
                threshold: Option<String>,
            }
            let i: In = parse(input)?;
            let th = q_or(&i.threshold, threshold())?;
            let m = i.source.monotone(depth)?;
            let counts = q_psi_counts(&m, &dyadic_points(depth))?;
            Ok(json!({
                "weak_reg_constant": to_json(&weak_reg_constant(&m, Some(&th))?),
                "reg_constant": to_json(&reg_constant(&m, Some(&th))?),
                "q_psi_counts": counts.into_iter().map(|(k, c)| json!({ "rank": k, "count": c })).collect::<Vec<_>>(),
            }))
        }
        "breg" => {
            let i: SourcePart = parse(input)?;
            let th = q_or(&i.threshold, threshold())?;
            let b = i.partition.materialize(depth)?;
            let m = i.source.monotone(depth)?;
            let mut out = json!({ "breg_constant": to_json(&breg_constant(&m, &b, Some(&th))?) });
            if let Some(f) = &i.source.f {
                out["equivalence"] = to_json(&breg_equiv_check(f, &b, &th)?);
            }
            Ok(out)
        }
        "member" => {
            #[derive(Deserialize)]
            struct In {
                x: StepFunction,
                f: StepFunction,
                threshold: Option<String>,
            }
            let i: In = parse(input)?;
            let th = i.threshold.as_deref().map(rational::parse).transpose()?;
            Ok(json!({
                "membership": to_json(&nf_member(&i.x, &i.f, th.as_ref())?),
                "marcinkiewicz_norm": rational::fmt(&marcinkiewicz_norm(&i.x, &i.f)?),
            }))
        }
        "verify-partition" => {
            #[derive(Deserialize)]
            struct In {
                partition: IntervalPartition,
            }
            let i: In = parse(input)?;
            let b = i.partition.materialize(depth)?;
            Ok(json!({
                "verifying_ratio": rational::fmt(&verifying_ratio(&i.partition, depth)?),
                "stochastic_vector": to_json(&b.stochastic_vector()),
            }))
        }
        "finer-verifying" => {
            #[derive(Deserialize)]
            struct In {
                partition: IntervalPartition,
            }
            let i: In = parse(input)?;
            let b = i.partition.materialize(depth)?;
            let fine = finer_verifying(&b);
            Ok(json!({
                "refined": to_json(&fine),
                "bound": rational::fmt(&finer_verifying_bound(&b)),
                "verifying_ratio": rational::fmt(&partition_verifying_ratio(&fine)),
            }))
        }
        "golden" => {
            let i: PartOrEps = parse(input)?;
            match (i.partition, i.epsilon) {
                (Some(p), None) => {
                    let d = min_delta(&p.materialize(depth)?)?;
                    Ok(json!({ "min_delta": rational::fmt(&d), "within_golden": le_golden(&d) }))
                }
                (None, Some(e)) => {
                    let eps = rational::parse(&e)?;
                    let w = golden_witness(&eps, depth.max(2), 64)?;
                    let d = min_delta(&w.partition)?;
                    Ok(json!({
                        "witness": to_json(&w),
                        "min_delta": rational::fmt(&d),
                        "matches_target": d == golden_target(&w.alpha, &eps),
                        "within_golden": le_golden(&d),
                    }))
                }
                _ => Err(Error::Invalid("give exactly one of \"partition\" or \"epsilon\"".into())),
            }
        }
        "psi-ratio" => {
            let i: PartOrEps = parse(input)?;
            let (r, target) = match (i.f, i.partition, i.epsilon) {
                (Some(f), Some(p), None) => (psi_ratio_sup(&f, &p.materialize(depth)?)?, None),
                (None, None, Some(e)) => {
                    let eps = rational::parse(&e)?;
                    let (f, b) = four_thirds_witness(&eps, depth.max(2))?;
                    (psi_ratio_sup(&f, &b)?, Some(four_thirds_target(&eps)))
                }
                _ => return Err(Error::Invalid("give \"f\" and \"partition\", or \"epsilon\"".into())),
            };
            let mut out = json!({ "psi_ratio": rational::fmt(&r), "within_four_thirds": r <= frac(4, 3) });
            if let Some(t) = target {
                out["target"] = Value::String(rational::fmt(&t));
            }
            Ok(out)
        }
        "synthesize-q" => {
            #[derive(Deserialize)]
            struct In {
                q: QSequence,
            }
            let i: In = parse(input)?;
            let (v, fam) = synthesize_from_q(&i.q, depth)?;
            Ok(json!({
                "points": qs(&v),
                "values": qs(fam.values()),
                "next": rational::fmt(fam.next()),
                "tail": rational::fmt(fam.tail_bracket().0),
            }))
        }
        "witness" => {
            #[derive(Deserialize)]
            struct Kind {
                kind: String,
            }
            let kind: Kind = parse(input)?;
            match kind.kind.as_str() {
                "verifying" | "nonuniversal" => {
                    #[derive(Deserialize)]
                    struct In {
                        exponents: Exponents,
                    }
                    let i: In = parse(input)?;
                    let q = if kind.kind == "verifying" {
                        verifying_witness_q(&i.exponents, depth)?
                    } else {
                        nonuniversal_witness_q(&i.exponents, depth)?
                    };
                    let terms = q.take(depth.min(64))?;
                    Ok(json!({ "q": to_json(&q), "first_terms": terms }))
                }
                "nonavg" => {
                    let i: SourcePart = parse(input)?;
                    let m = i.source.monotone(depth)?;
                    let b = i.partition.materialize(depth)?;
                    let w = nonavg_witness(&m, &b, i.k.unwrap_or(6))?;
                    Ok(json!({ "witness": to_json(&w), "holds": w.holds() }))
                }
                other => Err(Error::Invalid(format!(
                    "unknown witness kind {other:?}; expected verifying, nonuniversal or nonavg"
                ))),
            }
        }
        "dominate" => {
            #[derive(Deserialize)]
            struct In {
                x: StepFunction,
                y: StepFunction,
                partition: IntervalPartition,
                epsilon: Option<String>,
            }
            let i: In = parse(input)?;
            let eps = q_or(&i.epsilon, rational::zero())?;
            let b = i.partition.materialize(depth)?;
            let out = construct_dominating(&i.x, &i.y, &b, &eps)?;
            Ok(json!({
                "result": to_json(&out),
                "equimeasurable": out.equimeasurable(&i.x.map(|v| v + &eps)),
                "dominates": i.y.le_everywhere(&cond_exp(&out, &b)),
            }))
        }
        "demo-abramovich" => {
            #[derive(Deserialize)]
            struct In {
                k: Option<u64>,
                c: Option<String>,
            }
            let i: In = parse(input)?;
            let c = q_or(&i.c, frac(1, 2))?;
            Ok(to_json(&abramovich_demo(i.k.unwrap_or(8), &c)?))
        }
        other => Err(Error::Invalid(format!("unknown command {other:?}"))),
    }
}
