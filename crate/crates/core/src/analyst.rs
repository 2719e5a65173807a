//! Target analysis: black-box probes, exact arithmetic checks, and the
//! provider dialogue that turns them into a hack plan.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use num_bigint::BigUint;
use num_traits::One;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::antihash::DetectedSpec;
use crate::model::{ProblemPackage, ResourceLimits, Submission};
use crate::provider::{AnalysisStep, Provider, ProviderError, ProviderRequest, RequestKind, ResponseContent};
use crate::sandbox::{classify_run, CompiledArtifact, RunStatus, Sandbox, SandboxError};
use crate::util::parse_int_expr;

pub const OUTPUT_PREFIX_LIMIT: usize = 4096;
pub const MAX_PROBES: usize = 8;
pub const PROBE_TIME_DIVISOR: u64 = 10;
/// Provider calls allowed in one analysis dialogue.
pub const MAX_ANALYSIS_TURNS: usize = 16;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AnalystError {
    #[error("MALFORMED_PLAN: {0}")]
    MalformedPlan(String),
    #[error(transparent)]
    Provider(#[from] ProviderError),
    #[error(transparent)]
    Sandbox(#[from] SandboxError),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Observation {
    #[serde(with = "crate::bytes")]
    pub probe_input: Vec<u8>,
    pub run_status: RunStatus,
    #[serde(with = "crate::bytes")]
    pub output_prefix: Vec<u8>,
    pub note: String,
}

impl Observation {
    fn render(&self) -> String {
        format!(
            "input:\n{}\nstatus: {:?}\noutput:\n{}\n{}",
            String::from_utf8_lossy(&self.probe_input).trim_end(),
            self.run_status,
            String::from_utf8_lossy(&self.output_prefix).trim_end(),
            self.note
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum TargetVerdict {
    #[serde(rename = "WA")]
    Wa,
    #[serde(rename = "RE")]
    Re,
    #[serde(rename = "TLE")]
    Tle,
    #[serde(rename = "MLE")]
    Mle,
}

impl TargetVerdict {
    pub fn parse(text: &str) -> Option<Self> {
        let t = text.trim().to_ascii_uppercase();
        Some(match t.as_str() {
            "WA" | "WRONG_ANSWER" | "WRONG ANSWER" => Self::Wa,
            "RE" | "RUNTIME_ERROR" | "RUNTIME ERROR" => Self::Re,
            "TLE" | "TIME_LIMIT_EXCEEDED" | "TIME LIMIT EXCEEDED" => Self::Tle,
            "MLE" | "MEMORY_LIMIT_EXCEEDED" | "MEMORY LIMIT EXCEEDED" => Self::Mle,
            _ => return None,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Strategy {
    Provider,
    Stress,
    Antihash,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HackPlan {
    pub hypothesis: String,
    pub target_verdict: TargetVerdict,
    pub strategy: Strategy,
    pub parameters: BTreeMap<String, String>,
    /// Present exactly when `strategy` is `Antihash`.
    pub hash_specs: Vec<DetectedSpec>,
}

/// Runs the target once; the output is cut to the first 4 KiB.
pub fn behavioral_probe(
    sb: &Sandbox,
    target: &CompiledArtifact,
    probe_input: &[u8],
    limits: &ResourceLimits,
) -> Result<Observation, SandboxError> {
    let r = sb.execute(target, probe_input, limits)?;
    let status = classify_run(&r, limits);
    let mut output_prefix = r.stdout;
    output_prefix.truncate(OUTPUT_PREFIX_LIMIT);
    let note = match status {
        RunStatus::Ok => format!("{} ms", r.cpu_time_ms),
        RunStatus::Tle => format!("exceeded {} ms", limits.time_limit_ms),
        RunStatus::Mle => format!("peak {:.1} MiB", r.peak_memory_mib),
        RunStatus::Re => format!("{}", r.exit),
    };
    Ok(Observation { probe_input: probe_input.to_vec(), run_status: status, output_prefix, note })
}

/// `sum_{i=1}^{n} floor(n / i)` over the O(sqrt n) blocks of equal quotient.
pub fn harmonic_operation_count(n: u64) -> u128 {
    let mut total = 0u128;
    let mut i = 1u64;
    while i <= n {
        let q = n / i;
        let last = n / q;
        total += u128::from(q) * u128::from(last - i + 1);
        i = last + 1;
    }
    total
}

/// `C(n, k)`; zero when `k > n`.
pub fn binomial(n: u64, k: u64) -> BigUint {
    if k > n {
        return BigUint::default();
    }
    let k = k.min(n - k);
    let mut acc = BigUint::one();
    for i in 0..k {
        acc = acc * (n - i) / (i + 1);
    }
    acc
}

pub fn binomial_exceeds_bound(n: u64, k: u64, bound: &BigUint) -> bool {
    binomial(n, k) > *bound
}

/// Builds a plan. A detected hash spec short-circuits to an anti-hash plan
/// with no provider traffic; otherwise a CODE_ANALYSIS dialogue runs, serving
/// tool calls until the provider finishes.
pub fn build_hack_plan(
    sb: &Sandbox,
    pkg: &ProblemPackage,
    target: &Submission,
    target_bin: Option<&CompiledArtifact>,
    observations: &[Observation],
    provider: &mut dyn Provider,
    hash_specs: Vec<DetectedSpec>,
) -> Result<HackPlan, AnalystError> {
    if let Some(first) = hash_specs.first() {
        let s = &first.spec;
        let mut parameters = BTreeMap::new();
        parameters.insert("bases".into(), join(&s.bases));
        parameters.insert("moduli".into(), join(&s.moduli));
        parameters.insert("charset".into(), format!("{}-{}", s.charset.0, s.charset.1));
        parameters.insert("offset".into(), s.mapping_offset.to_string());
        if let Some(t) = &first.input_template {
            parameters.insert("input_template".into(), t.clone());
        }
        return Ok(HackPlan {
            hypothesis: format!(
                "polynomial rolling hash with bases {} and moduli {} admits colliding strings",
                join(&s.bases),
                join(&s.moduli)
            ),
            target_verdict: TargetVerdict::Wa,
            strategy: Strategy::Antihash,
            parameters,
            hash_specs,
        });
    }

    let probe_limits = pkg.limits.with_time_fraction(PROBE_TIME_DIVISOR);
    let mut probes_used = observations.len().min(MAX_PROBES);
    let mut observed = String::new();
    for o in observations {
        let _ = writeln!(observed, "{}\n", o.render());
    }
    let mut tool_log = String::new();
    for _ in 0..MAX_ANALYSIS_TURNS {
        let mut req = ProviderRequest::new(RequestKind::CodeAnalysis)
            .with("statement", pkg.statement.clone())
            .with("target_source", target.source.clone());
        if !observed.is_empty() {
            req = req.with("observations", observed.trim_end());
        }
        if !tool_log.is_empty() {
            req = req.with("tool_results", tool_log.trim_end());
        }
        let step = match provider.respond(&req) {
            Ok(resp) => match resp.content {
                ResponseContent::CodeAnalysis { step } => step,
                other => return Err(AnalystError::MalformedPlan(format!("unexpected {} content", other.kind()))),
            },
            Err(e @ (ProviderError::TranscriptExhausted { .. } | ProviderError::MalformedResponse { .. })) => {
                return Err(AnalystError::MalformedPlan(e.to_string()))
            }
            Err(e) => return Err(e.into()),
        };
        let result = match step {
            AnalysisStep::Finish { report, target_verdict, strategy, parameters } => {
                return finish(report, target_verdict, strategy, parameters);
            }
            AnalysisStep::RunTarget { input } => match target_bin {
                _ if probes_used >= MAX_PROBES => format!("probe budget of {MAX_PROBES} exhausted"),
                None => "target binary unavailable".to_string(),
                Some(bin) => {
                    probes_used += 1;
                    let mut input = input.into_bytes();
                    if !input.ends_with(b"\n") {
                        input.push(b'\n');
                    }
                    let o = behavioral_probe(sb, bin, &input, &probe_limits)?;
                    o.render()
                }
            },
            AnalysisStep::Harmonic { n } if n >= 1 => {
                format!("sum of floor({n}/i) for i = 1..{n} is {}", harmonic_operation_count(n))
            }
            AnalysisStep::Harmonic { .. } => "n must be at least 1".to_string(),
            AnalysisStep::Binomial { n, k, bound } => match parse_int_expr(&bound).and_then(|b| b.to_biguint()) {
                Some(b) if k <= n => {
                    let c = binomial(n, k);
                    format!("C({n}, {k}) = {c}; exceeds {bound}: {}", c > b)
                }
                Some(_) => format!("k = {k} exceeds n = {n}"),
                None => format!("cannot read bound `{bound}`"),
            },
        };
        let _ = writeln!(tool_log, "{result}\n");
    }
    Err(AnalystError::MalformedPlan(format!("no finish within {MAX_ANALYSIS_TURNS} turns")))
}

fn finish(
    report: String,
    target_verdict: Option<String>,
    strategy: Option<String>,
    parameters: BTreeMap<String, String>,
) -> Result<HackPlan, AnalystError> {
    if report.trim().is_empty() {
        return Err(AnalystError::MalformedPlan("empty hypothesis".into()));
    }
    let target_verdict = match target_verdict.as_deref() {
        None => TargetVerdict::Wa,
        Some(t) => TargetVerdict::parse(t).ok_or_else(|| AnalystError::MalformedPlan(format!("unknown verdict `{t}`")))?,
    };
    let strategy = match strategy.as_deref().map(|s| s.trim().to_ascii_uppercase()) {
        Some(s) if s == "STRESS" => Strategy::Stress,
        _ => Strategy::Provider,
    };
    Ok(HackPlan { hypothesis: report, target_verdict, strategy, parameters, hash_specs: Vec::new() })
}

fn join(values: &[u128]) -> String {
    values.iter().map(u128::to_string).collect::<Vec<_>>().join(",")
}
