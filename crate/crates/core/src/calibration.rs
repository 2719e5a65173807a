//! Phase I: harden the validator and checker against adversarial probes until
//! `k` consecutive probes expose no flaw.
//!
//! Each iteration asks the provider for a probe, classifies it against the
//! current tool (false positive first, then false negative), and on a flaw
//! requests a replacement source carrying every failure case seen so far.
//! Checker probes must first pass cross-verification: a small input, explicit
//! reasoning, and approval from an independent provider.

use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::genforge::{materialize, GenError};
use crate::judge::{run_checker, run_validator, CheckerResult, CheckerTool, Judge, JudgeError, OracleRun};
use crate::model::{CheckerSpec, ProblemPackage, ToolSource};
use crate::provider::{
    CheckerCase, Provider, ProviderError, ProviderRequest, RequestKind, ResponseContent, ValidatorCase,
};
use crate::sandbox::{CompiledArtifact, Sandbox, SandboxError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CalibrationConfig {
    pub k: u32,
    pub max_iter: u32,
    /// Largest checker-probe input accepted by cross-verification, in bytes.
    pub small_scale_bound: usize,
}

impl Default for CalibrationConfig {
    fn default() -> Self {
        CalibrationConfig { k: 3, max_iter: 10, small_scale_bound: 256 }
    }
}

#[derive(Debug, Error)]
pub enum CalibrationError {
    #[error("CALIBRATION_INFRA_FAIL: {0}")]
    InfraFail(String),
    #[error("FIX_DOES_NOT_COMPILE: {0}")]
    FixDoesNotCompile(String),
    #[error("ORACLE_FAIL: standard solution fails on probe input: {0}")]
    OracleFail(String),
    #[error("NOT_APPLICABLE: {0}")]
    NotApplicable(String),
}

impl From<JudgeError> for CalibrationError {
    fn from(e: JudgeError) -> Self {
        CalibrationError::InfraFail(e.to_string())
    }
}

impl From<SandboxError> for CalibrationError {
    fn from(e: SandboxError) -> Self {
        CalibrationError::InfraFail(e.to_string())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Tool {
    Validator,
    Checker,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Flaw {
    FalsePositive,
    FalseNegative,
    None,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FlawReport {
    pub flaw: Flaw,
    /// The probe element that exposed the flaw.
    #[serde(with = "crate::bytes::option", default)]
    pub witness: Option<Vec<u8>>,
    pub tool: Tool,
    pub detail: String,
}

impl FlawReport {
    fn none(tool: Tool) -> Self {
        FlawReport { flaw: Flaw::None, witness: None, tool, detail: String::new() }
    }
}

/// A legal input the validator should accept and an illegal one it should
/// reject. Provider bundles may supply only one half.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidatorProbe {
    #[serde(with = "crate::bytes::option", default)]
    pub x_valid: Option<Vec<u8>>,
    #[serde(with = "crate::bytes::option", default)]
    pub x_invalid: Option<Vec<u8>>,
    pub rationale: String,
}

/// An input with an output the checker must reject and one it must accept.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckerProbe {
    #[serde(with = "crate::bytes")]
    pub x_cand: Vec<u8>,
    #[serde(with = "crate::bytes::option", default)]
    pub y_wrong: Option<Vec<u8>>,
    #[serde(with = "crate::bytes::option", default)]
    pub y_true: Option<Vec<u8>>,
    pub reasoning: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Probe {
    Validator(ValidatorProbe),
    Checker(CheckerProbe),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum CrossVerifyStep {
    SmallScale,
    ExplicitReasoning,
    CrossVerify,
    ProviderError,
}

impl fmt::Display for CrossVerifyStep {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CrossVerifyStep::SmallScale => "SMALL_SCALE",
            CrossVerifyStep::ExplicitReasoning => "EXPLICIT_REASONING",
            CrossVerifyStep::CrossVerify => "CROSS_VERIFY",
            CrossVerifyStep::ProviderError => "PROVIDER_ERROR",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "result", rename_all = "SCREAMING_SNAKE_CASE")]
pub enum CrossVerifyOutcome {
    Accepted,
    Rejected { reason: CrossVerifyStep, detail: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Termination {
    CleanStreak,
    IterationCap,
    ProviderExhausted,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Iteration {
    pub index: u32,
    pub probe: Option<Probe>,
    /// `None` when the probe was not classified (provider error, failed
    /// cross-verification, unusable input).
    pub report: Option<FlawReport>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cross_verify: Option<CrossVerifyOutcome>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub oracle_answer: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    pub tool_hash: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CalibrationLog {
    pub tool: Tool,
    pub iterations: Vec<Iteration>,
    pub consecutive_clean: u32,
    pub terminated_by: Termination,
    pub final_tool_hash: String,
    pub notes: Vec<String>,
}

impl CalibrationLog {
    fn new(tool: Tool, hash: String) -> Self {
        CalibrationLog {
            tool,
            iterations: Vec::new(),
            consecutive_clean: 0,
            terminated_by: Termination::IterationCap,
            final_tool_hash: hash,
            notes: Vec::new(),
        }
    }

    pub fn classified(&self) -> impl Iterator<Item = (&Probe, &FlawReport)> {
        self.iterations.iter().filter_map(|it| Some((it.probe.as_ref()?, it.report.as_ref()?)))
    }
}

pub fn source_hash(source: &str) -> String {
    hex::encode(Sha256::digest(source.as_bytes()))
}

fn show(bytes: &[u8]) -> String {
    String::from_utf8_lossy(bytes).into_owned()
}

pub fn classify_validator_probe(
    sb: &Sandbox,
    validator: &CompiledArtifact,
    probe: &ValidatorProbe,
) -> Result<FlawReport, CalibrationError> {
    if let Some(x) = &probe.x_invalid {
        if run_validator(sb, validator, x)?.is_valid() {
            return Ok(FlawReport {
                flaw: Flaw::FalsePositive,
                witness: Some(x.clone()),
                tool: Tool::Validator,
                detail: "illegal input accepted".into(),
            });
        }
    }
    if let Some(x) = &probe.x_valid {
        if let crate::judge::ValidatorResult::Invalid { reason } = run_validator(sb, validator, x)? {
            return Ok(FlawReport {
                flaw: Flaw::FalseNegative,
                witness: Some(x.clone()),
                tool: Tool::Validator,
                detail: format!("legal input rejected: {reason}"),
            });
        }
    }
    Ok(FlawReport::none(Tool::Validator))
}

/// A checker failure on the correct output counts as a rejection of it.
pub fn classify_checker_probe(
    sb: &Sandbox,
    checker: &CheckerTool,
    probe: &CheckerProbe,
    jury_answer: &[u8],
) -> Result<FlawReport, CalibrationError> {
    if let Some(y) = &probe.y_wrong {
        if run_checker(sb, checker, &probe.x_cand, y, jury_answer)?.is_accepted() {
            return Ok(FlawReport {
                flaw: Flaw::FalsePositive,
                witness: Some(y.clone()),
                tool: Tool::Checker,
                detail: "wrong output accepted".into(),
            });
        }
    }
    if let Some(y) = &probe.y_true {
        match run_checker(sb, checker, &probe.x_cand, y, jury_answer)? {
            CheckerResult::Accepted => {}
            CheckerResult::Rejected { reason } | CheckerResult::CheckerFail { reason } => {
                return Ok(FlawReport {
                    flaw: Flaw::FalseNegative,
                    witness: Some(y.clone()),
                    tool: Tool::Checker,
                    detail: format!("correct output rejected: {reason}"),
                })
            }
        }
    }
    Ok(FlawReport::none(Tool::Checker))
}

pub fn cross_verify_probe(
    probe: &CheckerProbe,
    pkg: &ProblemPackage,
    judge_provider: &mut dyn Provider,
    small_scale_bound: usize,
) -> CrossVerifyOutcome {
    let reject = |reason, detail: String| CrossVerifyOutcome::Rejected { reason, detail };
    if probe.x_cand.len() > small_scale_bound {
        return reject(
            CrossVerifyStep::SmallScale,
            format!("input is {} bytes, bound {small_scale_bound}", probe.x_cand.len()),
        );
    }
    if probe.reasoning.trim().is_empty() {
        return reject(CrossVerifyStep::ExplicitReasoning, "no reasoning given".into());
    }
    let mut req = ProviderRequest::new(RequestKind::CrossVerify)
        .with("statement", &pkg.statement)
        .with("test_input", show(&probe.x_cand))
        .with("reasoning", &probe.reasoning);
    if let Some(y) = &probe.y_wrong {
        req = req.with("wrong_output", show(y));
    }
    if let Some(y) = &probe.y_true {
        req = req.with("true_output", show(y));
    }
    match judge_provider.respond(&req) {
        Ok(resp) => match resp.content {
            ResponseContent::CrossVerify { approved: true, .. } => CrossVerifyOutcome::Accepted,
            ResponseContent::CrossVerify { approved: false, reason } => reject(CrossVerifyStep::CrossVerify, reason),
            other => reject(CrossVerifyStep::ProviderError, format!("unexpected {} content", other.kind())),
        },
        Err(e) => reject(CrossVerifyStep::ProviderError, e.to_string()),
    }
}

/// Compiles a tool, re-requesting a fix once with the compile log appended.
fn compile_fix(
    sb: &Sandbox,
    provider: &mut dyn Provider,
    fix_req: ProviderRequest,
    toolchain: &str,
) -> Result<Result<(String, CompiledArtifact), ProviderError>, CalibrationError> {
    let mut req = fix_req;
    let mut last_log = String::new();
    for attempt in 0..2 {
        if attempt > 0 {
            let failures = format!(
                "{}\n\nThe previous replacement did not compile:\n{last_log}",
                req.field("failures").unwrap_or_default()
            );
            req = req.with("failures", failures);
        }
        let source = match provider.respond(&req) {
            Ok(resp) => match resp.content {
                ResponseContent::ValidatorFix { source } | ResponseContent::CheckerFix { source } => source,
                other => return Err(CalibrationError::InfraFail(format!("unexpected {} content", other.kind()))),
            },
            Err(e) => return Ok(Err(e)),
        };
        match sb.compile(&source, toolchain) {
            Ok(art) => return Ok(Ok((source, art))),
            Err(SandboxError::CompileError(log)) => last_log = log,
            Err(e) => return Err(e.into()),
        }
    }
    Err(CalibrationError::FixDoesNotCompile(last_log))
}

fn compile_tool(sb: &Sandbox, src: &ToolSource, what: &str) -> Result<CompiledArtifact, CalibrationError> {
    sb.compile(&src.source, &src.toolchain_id)
        .map_err(|e| CalibrationError::InfraFail(format!("current {what} does not build: {e}")))
}

fn materialize_case(sb: &Sandbox, input: &crate::provider::ProposedInput) -> Result<Vec<u8>, GenError> {
    materialize(sb, input)
}

fn validator_probe(sb: &Sandbox, cases: &[ValidatorCase]) -> Result<ValidatorProbe, String> {
    let pick = |want: bool| cases.iter().find(|c| c.expected_valid == want);
    let (valid, invalid) = (pick(true), pick(false));
    let x_valid = valid.map(|c| materialize_case(sb, &c.input)).transpose().map_err(|e| e.to_string())?;
    let x_invalid = invalid.map(|c| materialize_case(sb, &c.input)).transpose().map_err(|e| e.to_string())?;
    if x_valid.is_some() && x_valid == x_invalid {
        return Err("valid and invalid halves are identical".into());
    }
    let rationale = [valid, invalid]
        .into_iter()
        .flatten()
        .map(|c| c.strategy.trim())
        .filter(|s| !s.is_empty())
        .collect::<Vec<_>>()
        .join(" | ");
    Ok(ValidatorProbe { x_valid, x_invalid, rationale })
}

fn checker_probe(sb: &Sandbox, case: &CheckerCase) -> Result<CheckerProbe, String> {
    Ok(CheckerProbe {
        x_cand: materialize_case(sb, &case.input).map_err(|e| e.to_string())?,
        y_wrong: case.wrong_output.as_ref().map(|s| s.clone().into_bytes()),
        y_true: case.true_output.as_ref().map(|s| s.clone().into_bytes()),
        reasoning: case.reasoning.clone(),
    })
}

fn describe_validator_failure(probe: &ValidatorProbe, report: &FlawReport) -> String {
    let witness = report.witness.as_deref().map(show).unwrap_or_default();
    let label = match report.flaw {
        Flaw::FalsePositive => "ILLEGAL input the validator ACCEPTED",
        _ => "LEGAL input the validator REJECTED",
    };
    format!("{label} ({}):\n{witness}\nrationale: {}", report.detail, probe.rationale)
}

fn describe_checker_failure(probe: &CheckerProbe, report: &FlawReport, y_gt: &[u8]) -> String {
    let label = match report.flaw {
        Flaw::FalsePositive => "WRONG output the checker ACCEPTED",
        _ => "CORRECT output the checker REJECTED",
    };
    format!(
        "{label} ({}):\ninput:\n{}\noutput:\n{}\nreference answer:\n{}\nreasoning: {}",
        report.detail,
        show(&probe.x_cand),
        report.witness.as_deref().map(show).unwrap_or_default(),
        show(y_gt),
        probe.reasoning
    )
}

fn is_exhausted(e: &ProviderError) -> bool {
    matches!(e, ProviderError::TranscriptExhausted { .. })
}

fn frozen_log(tool: Tool, source: &str) -> CalibrationLog {
    let mut log = CalibrationLog::new(tool, source_hash(source));
    log.notes.push("tool is frozen; returned unchanged".into());
    log
}

/// Refines the package validator. Returns the final source and the log.
pub fn refine_validator(
    sb: &Sandbox,
    pkg: &ProblemPackage,
    provider: &mut dyn Provider,
    cfg: &CalibrationConfig,
) -> Result<(ToolSource, CalibrationLog), CalibrationError> {
    let original = pkg.validator.clone().ok_or_else(|| CalibrationError::NotApplicable("package has no validator".into()))?;
    if pkg.frozen.validator {
        return Ok((original.clone(), frozen_log(Tool::Validator, &original.source)));
    }
    let mut current = original;
    let mut art = compile_tool(sb, &current, "validator")?;
    let mut log = CalibrationLog::new(Tool::Validator, source_hash(&current.source));
    let mut failures: Vec<String> = Vec::new();

    for index in 0..cfg.max_iter {
        let hash = source_hash(&current.source);
        let mut iteration = Iteration {
            index,
            probe: None,
            report: None,
            cross_verify: None,
            oracle_answer: None,
            error: None,
            tool_hash: hash,
        };
        let mut req = ProviderRequest::new(RequestKind::ValidatorProbe)
            .with("statement", &pkg.statement)
            .with("validator_source", &current.source);
        if !failures.is_empty() {
            req = req.with("failures", failures.join("\n\n"));
        }
        let cases = match provider.respond(&req) {
            Ok(resp) => match resp.content {
                ResponseContent::ValidatorProbe { cases } => cases,
                other => return Err(CalibrationError::InfraFail(format!("unexpected {} content", other.kind()))),
            },
            Err(e) if is_exhausted(&e) => {
                log.terminated_by = Termination::ProviderExhausted;
                log.notes.push(e.to_string());
                break;
            }
            Err(e) => {
                iteration.error = Some(e.to_string());
                log.iterations.push(iteration);
                continue;
            }
        };
        let probe = match validator_probe(sb, &cases) {
            Ok(p) => p,
            Err(e) => {
                iteration.error = Some(format!("unusable probe: {e}"));
                log.iterations.push(iteration);
                continue;
            }
        };
        let report = classify_validator_probe(sb, &art, &probe)?;
        iteration.probe = Some(Probe::Validator(probe.clone()));
        iteration.report = Some(report.clone());
        log.iterations.push(iteration);

        if report.flaw == Flaw::None {
            log.consecutive_clean += 1;
            if log.consecutive_clean >= cfg.k {
                log.terminated_by = Termination::CleanStreak;
                break;
            }
            continue;
        }
        log.consecutive_clean = 0;
        failures.push(describe_validator_failure(&probe, &report));
        let fix_req = ProviderRequest::new(RequestKind::ValidatorFix)
            .with("statement", &pkg.statement)
            .with("validator_source", &current.source)
            .with("failures", failures.join("\n\n"));
        match compile_fix(sb, provider, fix_req, &current.toolchain_id)? {
            Ok((source, new_art)) => {
                current = ToolSource { source, ..current };
                art = new_art;
            }
            Err(e) if is_exhausted(&e) => {
                log.terminated_by = Termination::ProviderExhausted;
                log.notes.push(e.to_string());
                break;
            }
            Err(e) => log.notes.push(format!("fix request failed: {e}")),
        }
    }
    log.final_tool_hash = source_hash(&current.source);
    Ok((current, log))
}

/// Refines the package checker; `judge_provider` answers cross-verification
/// requests. Reference answers come from the standard solution.
pub fn refine_checker(
    sb: &Sandbox,
    pkg: &ProblemPackage,
    provider: &mut dyn Provider,
    judge_provider: &mut dyn Provider,
    cfg: &CalibrationConfig,
) -> Result<(ToolSource, CalibrationLog), CalibrationError> {
    let original = match &pkg.checker {
        CheckerSpec::Custom(src) => src.clone(),
        CheckerSpec::TokenDiff => {
            return Err(CalibrationError::NotApplicable("token comparison has no checker source to refine".into()))
        }
    };
    if pkg.frozen.checker {
        return Ok((original.clone(), frozen_log(Tool::Checker, &original.source)));
    }
    let judge = Judge::new(sb, pkg);
    judge.std_artifact()?;
    let mut current = original;
    let mut tool = CheckerTool::Custom(compile_tool(sb, &current, "checker")?);
    let mut log = CalibrationLog::new(Tool::Checker, source_hash(&current.source));
    log.notes.push("reference answers are produced by the standard solution".into());
    let mut failures: Vec<String> = Vec::new();

    for index in 0..cfg.max_iter {
        let mut iteration = Iteration {
            index,
            probe: None,
            report: None,
            cross_verify: None,
            oracle_answer: None,
            error: None,
            tool_hash: source_hash(&current.source),
        };
        let mut req = ProviderRequest::new(RequestKind::CheckerProbe)
            .with("statement", &pkg.statement)
            .with("checker_source", &current.source);
        if !failures.is_empty() {
            req = req.with("failures", failures.join("\n\n"));
        }
        let case = match provider.respond(&req) {
            Ok(resp) => match resp.content {
                ResponseContent::CheckerProbe { mut cases } => cases.swap_remove(0),
                other => return Err(CalibrationError::InfraFail(format!("unexpected {} content", other.kind()))),
            },
            Err(e) if is_exhausted(&e) => {
                log.terminated_by = Termination::ProviderExhausted;
                log.notes.push(e.to_string());
                break;
            }
            Err(e) => {
                iteration.error = Some(e.to_string());
                log.iterations.push(iteration);
                continue;
            }
        };
        let probe = match checker_probe(sb, &case) {
            Ok(p) => p,
            Err(e) => {
                iteration.error = Some(format!("unusable probe: {e}"));
                log.iterations.push(iteration);
                continue;
            }
        };
        iteration.probe = Some(Probe::Checker(probe.clone()));
        let verdict = cross_verify_probe(&probe, pkg, judge_provider, cfg.small_scale_bound);
        iteration.cross_verify = Some(verdict.clone());
        if verdict != CrossVerifyOutcome::Accepted {
            log.iterations.push(iteration);
            continue;
        }
        let y_gt = match judge.oracle(&probe.x_cand)? {
            OracleRun::Answer(a) => a,
            OracleRun::Failed(v) => return Err(CalibrationError::OracleFail(v.to_string())),
        };
        iteration.oracle_answer = Some(show(&y_gt));
        let report = classify_checker_probe(sb, &tool, &probe, &y_gt)?;
        iteration.report = Some(report.clone());
        log.iterations.push(iteration);

        if report.flaw == Flaw::None {
            log.consecutive_clean += 1;
            if log.consecutive_clean >= cfg.k {
                log.terminated_by = Termination::CleanStreak;
                break;
            }
            continue;
        }
        log.consecutive_clean = 0;
        failures.push(describe_checker_failure(&probe, &report, &y_gt));
        let fix_req = ProviderRequest::new(RequestKind::CheckerFix)
            .with("statement", &pkg.statement)
            .with("checker_source", &current.source)
            .with("failures", failures.join("\n\n"));
        match compile_fix(sb, provider, fix_req, &current.toolchain_id)? {
            Ok((source, art)) => {
                current = ToolSource { source, ..current };
                tool = CheckerTool::Custom(art);
            }
            Err(e) if is_exhausted(&e) => {
                log.terminated_by = Termination::ProviderExhausted;
                log.notes.push(e.to_string());
                break;
            }
            Err(e) => log.notes.push(format!("fix request failed: {e}")),
        }
    }
    log.final_tool_hash = source_hash(&current.source);
    Ok((current, log))
}

/// Re-classifies every logged probe against `tool`; returns the indices of
/// iterations that still expose a flaw.
pub fn regression_check(
    sb: &Sandbox,
    pkg: &ProblemPackage,
    tool: &ToolSource,
    log: &CalibrationLog,
) -> Result<Vec<u32>, CalibrationError> {
    let art = compile_tool(sb, tool, "tool")?;
    let judge = Judge::new(sb, pkg);
    let checker = CheckerTool::Custom(art.clone());
    let mut flawed = Vec::new();
    for it in &log.iterations {
        let (Some(probe), Some(_)) = (&it.probe, &it.report) else { continue };
        let report = match probe {
            Probe::Validator(p) => classify_validator_probe(sb, &art, p)?,
            Probe::Checker(p) => {
                let y_gt = match judge.oracle(&p.x_cand)? {
                    OracleRun::Answer(a) => a,
                    OracleRun::Failed(v) => return Err(CalibrationError::OracleFail(v.to_string())),
                };
                classify_checker_probe(sb, &checker, p, &y_gt)?
            }
        };
        if report.flaw != Flaw::None {
            flawed.push(it.index);
        }
    }
    Ok(flawed)
}

/// Writes `calibration/<tool>.log.json` and `calibration/refined_<tool>.<ext>`.
pub fn persist(root: &Path, tool: &ToolSource, log: &CalibrationLog) -> std::io::Result<()> {
    let dir = root.join("calibration");
    std::fs::create_dir_all(&dir)?;
    let name = match log.tool {
        Tool::Validator => "validator",
        Tool::Checker => "checker",
    };
    let ext = Path::new(&tool.source_path).extension().and_then(|e| e.to_str()).unwrap_or("cpp");
    std::fs::write(dir.join(format!("refined_{name}.{ext}")), &tool.source)?;
    let json = serde_json::to_string_pretty(log).map_err(std::io::Error::other)?;
    std::fs::write(dir.join(format!("{name}.log.json")), json + "\n")
}
