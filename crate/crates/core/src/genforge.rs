//! Phase II execution: generator programs, stress campaigns, the staged hack
//! cascade, cross-application of hacks and suite augmentation.

use std::collections::HashSet;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::analyst::{HackPlan, Strategy};
use crate::antihash::{find_collision, AntihashConfig, DetectedSpec, Orientation};
use crate::judge::{HackAttempt, Judge, JudgeError, OracleRun, ValidatorResult};
use crate::model::{
    GeneratorProgram, ProblemPackage, Provenance, SeedStrategy, Submission, TestCase, DEFAULT_TOOL_TOOLCHAIN,
};
use crate::provider::{ProposedInput, Provider, ProviderError, ProviderRequest, RequestKind, ResponseContent, MAX_LITERAL_INPUT};
use crate::sandbox::{classify_run, tool_limits, CompiledArtifact, RunStatus, Sandbox, SandboxError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GenError {
    #[error("GENERATOR_CE: {0}")]
    GeneratorCe(String),
    #[error("GENERATOR_RE: {0}")]
    GeneratorRe(String),
    #[error("GENERATOR_INVALID_OUTPUT: {0}")]
    GeneratorInvalidOutput(String),
    #[error("literal input of {0} bytes exceeds {MAX_LITERAL_INPUT}; emit a generator program instead")]
    LiteralTooLarge(usize),
    #[error("CAMPAIGN_STALLED: {0}")]
    CampaignStalled(String),
    #[error(transparent)]
    Judge(#[from] JudgeError),
    #[error(transparent)]
    Sandbox(#[from] SandboxError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct CampaignConfig {
    #[serde(rename = "trial_budget_T")]
    pub trial_budget_t: u32,
    pub stress_iterations: u32,
    pub dedup: bool,
    /// First stress seed; the campaign uses `seed..seed + stress_iterations`.
    pub seed: u64,
}

impl Default for CampaignConfig {
    fn default() -> Self {
        CampaignConfig { trial_budget_t: 5, stress_iterations: 200, dedup: true, seed: 0 }
    }
}

pub fn compile_generator(sb: &Sandbox, gen: &GeneratorProgram) -> Result<CompiledArtifact, GenError> {
    sb.compile(&gen.source, &gen.toolchain_id).map_err(|e| match e {
        SandboxError::CompileError(log) => GenError::GeneratorCe(log),
        other => other.into(),
    })
}

/// Runs a compiled generator under tool limits. Self-seeded generators get
/// no arguments.
pub fn execute_generator(
    sb: &Sandbox,
    bin: &CompiledArtifact,
    strategy: SeedStrategy,
    seed: u64,
) -> Result<Vec<u8>, GenError> {
    let limits = tool_limits();
    let args = match strategy {
        SeedStrategy::ArgvSeed => vec![seed.to_string()],
        SeedStrategy::SelfSeeded => vec![],
    };
    let r = sb.execute_with_args(bin, &args, b"", &limits)?;
    match classify_run(&r, &limits) {
        RunStatus::Ok => Ok(r.stdout),
        status => Err(GenError::GeneratorRe(format!("{status:?}: {}", r.exit))),
    }
}

/// Bytes of a proposed input; generator programs are compiled with the
/// default tool toolchain and run once without a seed.
pub fn materialize(sb: &Sandbox, input: &ProposedInput) -> Result<Vec<u8>, GenError> {
    match input {
        ProposedInput::Literal(bytes) if bytes.len() > MAX_LITERAL_INPUT => Err(GenError::LiteralTooLarge(bytes.len())),
        ProposedInput::Literal(bytes) => Ok(bytes.clone()),
        ProposedInput::Generator(source) => {
            let gen = GeneratorProgram {
                source: source.clone(),
                toolchain_id: DEFAULT_TOOL_TOOLCHAIN.into(),
                seed_strategy: SeedStrategy::SelfSeeded,
            };
            let bin = compile_generator(sb, &gen)?;
            execute_generator(sb, &bin, SeedStrategy::SelfSeeded, 0)
        }
    }
}

fn checked_case(judge: &Judge, bytes: Vec<u8>, provenance: Provenance) -> Result<TestCase, GenError> {
    match judge.validate(&bytes)? {
        ValidatorResult::Valid => Ok(TestCase::new(bytes, provenance)),
        ValidatorResult::Invalid { reason } => Err(GenError::GeneratorInvalidOutput(reason)),
    }
}

/// One generated case, rejected unless the judge's validator accepts it.
pub fn run_generator(judge: &Judge, gen: &GeneratorProgram, seed: u64, provenance: Provenance) -> Result<TestCase, GenError> {
    let bin = compile_generator(judge.sandbox(), gen)?;
    let bytes = execute_generator(judge.sandbox(), &bin, gen.seed_strategy, seed)?;
    Ok(checked_case(judge, bytes, provenance)?.with_meta("seed", seed))
}

fn compile_target(judge: &Judge, target: &Submission) -> Result<CompiledArtifact, GenError> {
    judge.sandbox().compile(&target.source, &target.toolchain_id).map_err(|e| match e {
        SandboxError::CompileError(_) => GenError::Judge(JudgeError::TargetCompile(target.id.clone())),
        other => other.into(),
    })
}

/// Seeds `seed..seed + stress_iterations`, stopping at the first successful hack.
/// Generation failures are skipped; the campaign stalls only when every
/// generation fails.
pub fn stress_campaign(
    judge: &Judge,
    target: &Submission,
    gen: &GeneratorProgram,
    cfg: &CampaignConfig,
) -> Result<Vec<HackAttempt>, GenError> {
    let target_bin = compile_target(judge, target)?;
    let gen_bin = compile_generator(judge.sandbox(), gen)?;
    stress_with(judge, target, &target_bin, gen, &gen_bin, cfg)
}

fn stress_with(
    judge: &Judge,
    target: &Submission,
    target_bin: &CompiledArtifact,
    gen: &GeneratorProgram,
    gen_bin: &CompiledArtifact,
    cfg: &CampaignConfig,
) -> Result<Vec<HackAttempt>, GenError> {
    let mut attempts = Vec::new();
    let mut last_error = None;
    for i in 0..u64::from(cfg.stress_iterations) {
        let seed = cfg.seed.wrapping_add(i);
        let case = execute_generator(judge.sandbox(), gen_bin, gen.seed_strategy, seed)
            .and_then(|bytes| checked_case(judge, bytes, Provenance::Stress));
        let case = match case {
            Ok(c) => c.with_meta("seed", seed),
            Err(e) => {
                last_error = Some(e);
                continue;
            }
        };
        let attempt = judge.hack_against(&case, &target.id, target_bin, 0)?;
        let done = attempt.success;
        attempts.push(attempt);
        if done {
            break;
        }
    }
    if attempts.is_empty() && cfg.stress_iterations > 0 {
        let why = last_error.map_or_else(String::new, |e| e.to_string());
        return Err(GenError::CampaignStalled(format!("all {} generations failed; last: {why}", cfg.stress_iterations)));
    }
    Ok(attempts)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Stage {
    Provider,
    Stress,
    Antihash,
    None,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CascadeResult {
    pub target_id: String,
    pub attempts: Vec<HackAttempt>,
    pub winning_stage: Stage,
    /// Provider turns consumed; anti-hash and stress stages are turn-free.
    pub turns_used: u32,
    pub notes: Vec<String>,
}

impl CascadeResult {
    pub fn winning_attempt(&self) -> Option<&HackAttempt> {
        self.attempts.iter().find(|a| a.success)
    }
}

fn fill_template(template: &str, a: &str, b: &str) -> Vec<u8> {
    template.replace("{a}", a).replace("{b}", b).into_bytes()
}

fn antihash_stage(
    judge: &Judge,
    target: &Submission,
    bin: &CompiledArtifact,
    plan: &HackPlan,
    cfg: &AntihashConfig,
    result: &mut CascadeResult,
) -> Result<bool, GenError> {
    let Some(template) = plan.parameters.get("input_template") else {
        result.notes.push("antihash: no input template for the colliding pair".into());
        return Ok(false);
    };
    for detected in &plan.hash_specs {
        for spec in orientations(detected) {
            let pair = match find_collision(&spec, cfg) {
                Ok(p) => p,
                Err(e) => {
                    result.notes.push(format!("antihash: {e}"));
                    continue;
                }
            };
            let case = TestCase::new(fill_template(template, &pair.a, &pair.b), Provenance::Antihash)
                .with_meta("collision_a", &pair.a)
                .with_meta("collision_b", &pair.b);
            let attempt = judge.hack_against(&case, &target.id, bin, 0)?;
            let done = attempt.success;
            result.attempts.push(attempt);
            if done {
                return Ok(true);
            }
        }
    }
    Ok(false)
}

fn orientations(d: &DetectedSpec) -> Vec<crate::antihash::RollingHashSpec> {
    if d.verified {
        return vec![d.spec.clone()];
    }
    let other = match d.spec.orientation {
        Orientation::Ascending => Orientation::Horner,
        Orientation::Horner => Orientation::Ascending,
    };
    vec![d.spec.clone(), d.spec.clone().with_orientation(other)]
}

fn provider_stage(
    judge: &Judge,
    target: &Submission,
    bin: &CompiledArtifact,
    plan: Option<&HackPlan>,
    provider: &mut dyn Provider,
    cfg: &CampaignConfig,
    result: &mut CascadeResult,
) -> Result<bool, GenError> {
    let pkg = judge.package();
    let mut feedback = String::new();
    for turn in 1..=cfg.trial_budget_t {
        let mut req = ProviderRequest::new(RequestKind::HackGenerator)
            .with("statement", pkg.statement.clone())
            .with("target_source", target.source.clone());
        if let Some(plan) = plan {
            req = req.with("hack_plan", plan.hypothesis.clone());
        }
        if !feedback.is_empty() {
            req = req.with("previous_attempts", feedback.trim_end());
        }
        let input = match provider.respond(&req) {
            Ok(resp) => match resp.content {
                ResponseContent::HackGenerator { input } => input,
                other => {
                    result.turns_used = turn;
                    result.notes.push(format!("turn {turn}: unexpected {} content", other.kind()));
                    continue;
                }
            },
            Err(ProviderError::TranscriptExhausted { .. }) => {
                result.notes.push(format!("provider exhausted before turn {turn}"));
                return Ok(false);
            }
            Err(e @ ProviderError::MalformedResponse { .. }) => {
                result.turns_used = turn;
                result.notes.push(format!("turn {turn}: {e}"));
                feedback.push_str(&format!("turn {turn}: response could not be parsed\n"));
                continue;
            }
            Err(e) => {
                result.notes.push(format!("provider: {e}"));
                return Ok(false);
            }
        };
        result.turns_used = turn;
        let bytes = match materialize(judge.sandbox(), &input) {
            Ok(b) => b,
            Err(e) => {
                result.notes.push(format!("turn {turn}: {e}"));
                feedback.push_str(&format!("turn {turn}: {e}\n"));
                continue;
            }
        };
        let case = TestCase::new(bytes, Provenance::Provider);
        let attempt = judge.hack_against(&case, &target.id, bin, turn)?;
        feedback.push_str(&format!("turn {turn}: {}\n", describe(&attempt)));
        let done = attempt.success;
        result.attempts.push(attempt);
        if done {
            return Ok(true);
        }
    }
    Ok(false)
}

fn describe(a: &HackAttempt) -> String {
    if !a.validator_ok {
        return format!("input rejected by validator: {}", a.validator_reason.as_deref().unwrap_or(""));
    }
    if a.oracle_fail {
        return "standard solution failed on the input".into();
    }
    match &a.target_verdict {
        Some(v) if v.is_accepted() => "target accepted the input".into(),
        Some(v) => format!("target failed: {v}"),
        None => "not judged".into(),
    }
}

/// Anti-hash (when planned), then up to `T` provider turns, then stress.
/// Stops at the first successful attempt.
pub fn cascade_hack(
    judge: &Judge,
    target: &Submission,
    provider: &mut dyn Provider,
    plan: Option<&HackPlan>,
    cfg: &CampaignConfig,
    antihash_cfg: &AntihashConfig,
) -> Result<CascadeResult, GenError> {
    let bin = compile_target(judge, target)?;
    let mut result = CascadeResult {
        target_id: target.id.clone(),
        attempts: Vec::new(),
        winning_stage: Stage::None,
        turns_used: 0,
        notes: Vec::new(),
    };
    if let Some(plan) = plan.filter(|p| p.strategy == Strategy::Antihash) {
        if antihash_stage(judge, target, &bin, plan, antihash_cfg, &mut result)? {
            result.winning_stage = Stage::Antihash;
            return Ok(result);
        }
    }
    if provider_stage(judge, target, &bin, plan, provider, cfg, &mut result)? {
        result.winning_stage = Stage::Provider;
        return Ok(result);
    }
    match &judge.package().stress_generator {
        Some((gen, _)) => match compile_generator(judge.sandbox(), gen)
            .and_then(|gen_bin| stress_with(judge, target, &bin, gen, &gen_bin, cfg))
        {
            Ok(attempts) => {
                let won = attempts.last().is_some_and(|a| a.success);
                result.attempts.extend(attempts);
                if won {
                    result.winning_stage = Stage::Stress;
                }
            }
            Err(e) => result.notes.push(format!("stress: {e}")),
        },
        None => result.notes.push("stress: package has no stress generator".into()),
    }
    Ok(result)
}

/// Outcome of one (case, submission) cell.
pub type Cell = Result<HackAttempt, String>;

/// Every case against every submission. Oracle answers are computed once per
/// case up front; cells run in parallel.
pub fn cross_apply(judge: &Judge, cases: &[TestCase], submissions: &[Submission]) -> Vec<Vec<Cell>> {
    if cases.is_empty() {
        return Vec::new();
    }
    cases.par_iter().for_each(|c| {
        let _ = judge.oracle(&c.input);
    });
    let bins: Vec<Result<CompiledArtifact, String>> = submissions
        .par_iter()
        .map(|s| compile_target(judge, s).map_err(|e| e.to_string()))
        .collect();
    cases
        .par_iter()
        .map(|case| {
            submissions
                .par_iter()
                .zip(&bins)
                .map(|(s, bin)| {
                    let bin = bin.as_ref().map_err(Clone::clone)?;
                    judge.hack_against(case, &s.id, bin, case_turn(case)).map_err(|e| e.to_string())
                })
                .collect()
        })
        .collect()
}

fn case_turn(case: &TestCase) -> u32 {
    case.metadata.get("turn").and_then(|t| t.parse().ok()).unwrap_or(0)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AugmentReport {
    pub dropped: Vec<(usize, String)>,
    pub added: usize,
    pub duplicates: usize,
}

/// New package whose suite is the validity-filtered original tests plus the
/// successful hack inputs, each answered by the standard solution. `judge`
/// should carry the refined validator.
pub fn augment_suite(
    judge: &Judge,
    successful: &[HackAttempt],
    dedup: bool,
) -> Result<(ProblemPackage, AugmentReport), GenError> {
    let pkg = judge.package();
    let mut report = AugmentReport { dropped: Vec::new(), added: 0, duplicates: 0 };
    let mut suite = Vec::new();
    for (i, t) in pkg.local_suite.iter().enumerate() {
        match judge.validate(&t.input)? {
            ValidatorResult::Valid => suite.push(t.clone()),
            ValidatorResult::Invalid { reason } => report.dropped.push((i, reason)),
        }
    }
    let mut seen: HashSet<Vec<u8>> = suite.iter().map(|t| t.input.clone()).collect();
    for a in successful.iter().filter(|a| a.success) {
        if dedup && !seen.insert(a.input.input.clone()) {
            report.duplicates += 1;
            continue;
        }
        if let ValidatorResult::Invalid { reason } = judge.validate(&a.input.input)? {
            report.dropped.push((usize::MAX, reason));
            continue;
        }
        let answer = match judge.oracle(&a.input.input)? {
            OracleRun::Answer(ans) => ans,
            OracleRun::Failed(v) => {
                report.dropped.push((usize::MAX, format!("standard solution failed: {v}")));
                continue;
            }
        };
        let mut case = a.input.clone().with_meta("target", &a.target_id);
        case.jury_answer = Some(answer);
        suite.push(case);
        report.added += 1;
    }
    let mut out = pkg.clone();
    out.validator = judge.validator_source().cloned();
    out.local_suite = suite.clone();
    out.augmented_suite = Some(suite);
    Ok((out, report))
}

/// Writes `hacks/<target>/<NNN>.in` and a JSON sidecar; returns the input path.
pub fn persist_hack(root: &Path, attempt: &HackAttempt) -> std::io::Result<std::path::PathBuf> {
    let dir = root.join("hacks").join(&attempt.target_id);
    std::fs::create_dir_all(&dir)?;
    let next = (1..).find(|n| !dir.join(format!("{n:03}.in")).exists()).expect("free slot");
    let input = dir.join(format!("{next:03}.in"));
    std::fs::write(&input, &attempt.input.input)?;
    let json = serde_json::to_string_pretty(attempt).map_err(std::io::Error::other)?;
    std::fs::write(dir.join(format!("{next:03}.json")), json + "\n")?;
    Ok(input)
}
