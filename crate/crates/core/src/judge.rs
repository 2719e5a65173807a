//! Verdict pipeline: validator, submission runs, checker, the successful-hack
//! predicate and mining of accepted-but-wrong targets.
//!
//! Validators read the input on stdin and signal validity by exit code.
//! Checkers follow the testlib protocol: argv `[input, output, answer]`, exit
//! 0 accepts, 1 or 2 rejects (presentation errors fold into WA), anything else
//! is a checker failure.

use std::collections::HashMap;
use std::fs;
use std::sync::{Mutex, OnceLock};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::model::{
    CheckerSpec, GroundTruth, ProblemPackage, Provenance, ResourceLimits, Submission, TestCase, ToolSource, Verdict,
    VerdictKind,
};
use crate::sandbox::{classify_run, tool_limits, CompiledArtifact, ExecutionResult, ExitStatus, RunStatus, Sandbox, SandboxError};

const REASON_LIMIT: usize = 2000;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum JudgeError {
    #[error("{tool} does not compile:\n{log}")]
    ToolCompile { tool: String, log: String },
    #[error("{tool} failed: {detail}")]
    ToolFailure { tool: String, detail: String },
    #[error("judge failure: {0}")]
    JudgeFail(String),
    #[error("submission `{0}` does not compile")]
    TargetCompile(String),
    #[error("package has neither ground-truth labels nor an official suite")]
    NoAuthoritativeSignal,
    #[error(transparent)]
    Sandbox(#[from] SandboxError),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "result", rename_all = "SCREAMING_SNAKE_CASE")]
pub enum ValidatorResult {
    Valid,
    Invalid { reason: String },
}

impl ValidatorResult {
    pub fn is_valid(&self) -> bool {
        matches!(self, ValidatorResult::Valid)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "result", rename_all = "SCREAMING_SNAKE_CASE")]
pub enum CheckerResult {
    Accepted,
    Rejected { reason: String },
    CheckerFail { reason: String },
}

impl CheckerResult {
    pub fn is_accepted(&self) -> bool {
        matches!(self, CheckerResult::Accepted)
    }
}

/// A checker ready to run: token comparison or a compiled program.
#[derive(Debug, Clone)]
pub enum CheckerTool {
    TokenDiff,
    Custom(CompiledArtifact),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TestRecord {
    pub status: RunStatus,
    pub checker: Option<CheckerResult>,
    pub cpu_time_ms: u64,
    pub peak_memory_mib: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JudgeOutcome {
    pub verdict: Verdict,
    /// Evaluated tests in suite order; judging stops at the first failure.
    pub per_test: Vec<TestRecord>,
    pub used_suite_size: usize,
}

/// One candidate input together with the three hack conditions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HackAttempt {
    pub target_id: String,
    pub input: TestCase,
    pub validator_ok: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub validator_reason: Option<String>,
    pub std_verdict: Option<Verdict>,
    pub target_verdict: Option<Verdict>,
    /// The standard solution itself failed on the input.
    pub oracle_fail: bool,
    pub success: bool,
    pub strategy: Provenance,
    pub turn: u32,
}

/// Validity, oracle confirmation and target failure, all required.
pub fn hack_success(validator_ok: bool, std_verdict: Option<&Verdict>, target_verdict: Option<&Verdict>) -> bool {
    validator_ok
        && std_verdict.is_some_and(Verdict::is_accepted)
        && target_verdict.is_some_and(|v| !v.is_accepted())
}

fn clip(bytes: &[u8]) -> String {
    let text = String::from_utf8_lossy(bytes);
    let text = text.trim();
    match text.char_indices().nth(REASON_LIMIT) {
        Some((cut, _)) => format!("{}...", &text[..cut]),
        None => text.to_string(),
    }
}

/// Runs a validator on `input`: exit 0 means valid, any other exit invalid.
pub fn run_validator(sb: &Sandbox, validator: &CompiledArtifact, input: &[u8]) -> Result<ValidatorResult, JudgeError> {
    let limits = tool_limits();
    let r = sb.execute(validator, input, &limits)?;
    if classify_run(&r, &limits) == RunStatus::Tle {
        return Err(JudgeError::ToolFailure { tool: "validator".into(), detail: "time limit exceeded".into() });
    }
    if r.exit.success() {
        return Ok(ValidatorResult::Valid);
    }
    let mut reason = clip(&r.stderr);
    if reason.is_empty() {
        reason = r.exit.to_string();
    }
    Ok(ValidatorResult::Invalid { reason })
}

/// Whitespace-delimited, case-sensitive token equality.
pub fn token_diff(output: &[u8], answer: &[u8]) -> bool {
    let tokens = |b: &[u8]| b.split(|c| c.is_ascii_whitespace()).filter(|t| !t.is_empty()).map(<[u8]>::to_vec).collect::<Vec<_>>();
    tokens(output) == tokens(answer)
}

/// Maps a checker exit status onto the testlib protocol.
pub fn checker_exit_result(exit: ExitStatus, stderr: &[u8]) -> CheckerResult {
    let reason = clip(stderr);
    match exit {
        ExitStatus::Code(0) => CheckerResult::Accepted,
        ExitStatus::Code(1 | 2) => CheckerResult::Rejected { reason },
        other => CheckerResult::CheckerFail { reason: format!("{other}: {reason}") },
    }
}

pub fn run_checker(
    sb: &Sandbox,
    checker: &CheckerTool,
    input: &[u8],
    contestant_out: &[u8],
    jury_answer: &[u8],
) -> Result<CheckerResult, JudgeError> {
    let artifact = match checker {
        CheckerTool::TokenDiff => {
            return Ok(if token_diff(contestant_out, jury_answer) {
                CheckerResult::Accepted
            } else {
                CheckerResult::Rejected { reason: "token sequences differ".into() }
            })
        }
        CheckerTool::Custom(a) => a,
    };
    let dir = sb.scratch_dir("check-")?;
    let io = |e: std::io::Error| SandboxError::Failure(format!("cannot stage checker files: {e}"));
    let files = [("input.txt", input), ("output.txt", contestant_out), ("answer.txt", jury_answer)];
    let mut args = Vec::new();
    for (name, bytes) in files {
        let path = dir.path().join(name);
        fs::write(&path, bytes).map_err(io)?;
        args.push(path.to_string_lossy().into_owned());
    }
    let limits = tool_limits();
    let r = sb.execute_with_args(artifact, &args, b"", &limits)?;
    if classify_run(&r, &limits) == RunStatus::Tle {
        return Ok(CheckerResult::CheckerFail { reason: "checker exceeded its time limit".into() });
    }
    Ok(checker_exit_result(r.exit, &r.stderr))
}

fn run_failure(status: RunStatus, r: &ExecutionResult, limits: &ResourceLimits, index: usize) -> Verdict {
    let (kind, detail) = match status {
        RunStatus::Tle if r.wall_killed => (VerdictKind::TimeLimitExceeded, format!("killed at {} ms wall time", r.wall_time_ms)),
        RunStatus::Tle => (VerdictKind::TimeLimitExceeded, format!("cpu {} ms > {} ms", r.cpu_time_ms, limits.time_limit_ms)),
        RunStatus::Mle => {
            (VerdictKind::MemoryLimitExceeded, format!("peak {:.1} MiB > {} MiB", r.peak_memory_mib, limits.memory_limit_mib))
        }
        RunStatus::Re if r.truncated => (VerdictKind::RuntimeError, "output limit exceeded".to_string()),
        RunStatus::Re => (VerdictKind::RuntimeError, r.exit.to_string()),
        RunStatus::Ok => unreachable!("not a failure"),
    };
    Verdict::failed(kind, detail, Some(index))
}

/// What the standard solution did on one input.
#[derive(Debug, Clone, PartialEq)]
pub enum OracleRun {
    Answer(Vec<u8>),
    Failed(Verdict),
}

/// Judging context for one package. Tools compile lazily; oracle answers are
/// cached by input hash for the lifetime of the judge.
pub struct Judge<'a> {
    sb: &'a Sandbox,
    pkg: &'a ProblemPackage,
    validator: Option<ToolSource>,
    checker: CheckerSpec,
    validator_bin: OnceLock<Result<Option<CompiledArtifact>, JudgeError>>,
    checker_bin: OnceLock<Result<CheckerTool, JudgeError>>,
    std_bin: OnceLock<Result<CompiledArtifact, JudgeError>>,
    oracle: Mutex<HashMap<[u8; 32], OracleRun>>,
}

impl<'a> Judge<'a> {
    pub fn new(sb: &'a Sandbox, pkg: &'a ProblemPackage) -> Self {
        Self {
            sb,
            pkg,
            validator: pkg.validator.clone(),
            checker: pkg.checker.clone(),
            validator_bin: OnceLock::new(),
            checker_bin: OnceLock::new(),
            std_bin: OnceLock::new(),
            oracle: Mutex::new(HashMap::new()),
        }
    }

    /// Use `validator` instead of the package's (e.g. a refined one).
    pub fn with_validator(mut self, validator: Option<ToolSource>) -> Self {
        self.validator = validator;
        self.validator_bin = OnceLock::new();
        self
    }

    pub fn with_checker(mut self, checker: CheckerSpec) -> Self {
        self.checker = checker;
        self.checker_bin = OnceLock::new();
        self
    }

    pub fn sandbox(&self) -> &'a Sandbox {
        self.sb
    }

    pub fn package(&self) -> &'a ProblemPackage {
        self.pkg
    }

    pub fn validator_source(&self) -> Option<&ToolSource> {
        self.validator.as_ref()
    }

    fn compile_tool(&self, tool: &str, src: &ToolSource) -> Result<CompiledArtifact, JudgeError> {
        self.sb.compile(&src.source, &src.toolchain_id).map_err(|e| match e {
            SandboxError::CompileError(log) => JudgeError::ToolCompile { tool: tool.into(), log },
            other => other.into(),
        })
    }

    pub fn validator_artifact(&self) -> Result<Option<CompiledArtifact>, JudgeError> {
        self.validator_bin
            .get_or_init(|| self.validator.as_ref().map(|v| self.compile_tool("validator", v)).transpose())
            .clone()
    }

    pub fn checker_tool(&self) -> Result<CheckerTool, JudgeError> {
        self.checker_bin
            .get_or_init(|| match &self.checker {
                CheckerSpec::TokenDiff => Ok(CheckerTool::TokenDiff),
                CheckerSpec::Custom(src) => self.compile_tool("checker", src).map(CheckerTool::Custom),
            })
            .clone()
    }

    pub fn std_artifact(&self) -> Result<CompiledArtifact, JudgeError> {
        self.std_bin
            .get_or_init(|| {
                let s = &self.pkg.std_solution;
                self.compile_tool("standard solution", &ToolSource {
                    source: s.source.clone(),
                    toolchain_id: s.toolchain_id.clone(),
                    source_path: s.source_path.clone(),
                })
            })
            .clone()
    }

    /// Validity under the judge's validator; packages without one accept everything.
    pub fn validate(&self, input: &[u8]) -> Result<ValidatorResult, JudgeError> {
        match self.validator_artifact()? {
            Some(v) => run_validator(self.sb, &v, input),
            None => Ok(ValidatorResult::Valid),
        }
    }

    /// Runs the standard solution on `input` (cached).
    pub fn oracle(&self, input: &[u8]) -> Result<OracleRun, JudgeError> {
        let key: [u8; 32] = Sha256::digest(input).into();
        if let Some(hit) = self.oracle.lock().expect("oracle cache").get(&key) {
            return Ok(hit.clone());
        }
        let std = self.std_artifact()?;
        let limits = &self.pkg.limits;
        let r = self.sb.execute(&std, input, limits)?;
        let run = match classify_run(&r, limits) {
            RunStatus::Ok => OracleRun::Answer(r.stdout),
            status => OracleRun::Failed(run_failure(status, &r, limits, 0)),
        };
        self.oracle.lock().expect("oracle cache").insert(key, run.clone());
        Ok(run)
    }

    /// The answer a test is judged against: stored for original tests,
    /// regenerated by the standard solution otherwise.
    fn answer_for(&self, test: &TestCase) -> Result<OracleRun, JudgeError> {
        match &test.jury_answer {
            Some(ans) if test.provenance() == Provenance::Original => Ok(OracleRun::Answer(ans.clone())),
            _ => self.oracle(&test.input),
        }
    }

    pub fn judge_submission(&self, s: &Submission, suite: &[TestCase]) -> JudgeOutcome {
        match self.sb.compile(&s.source, &s.toolchain_id) {
            Ok(bin) => self.judge_artifact(&bin, suite),
            Err(SandboxError::CompileError(log)) => {
                JudgeOutcome { verdict: Verdict::compile_error(log), per_test: vec![], used_suite_size: suite.len() }
            }
            Err(e) => JudgeOutcome { verdict: Verdict::judge_fail(e.to_string()), per_test: vec![], used_suite_size: suite.len() },
        }
    }

    /// Judges a compiled program on `suite` in order, stopping at the first failure.
    pub fn judge_artifact(&self, bin: &CompiledArtifact, suite: &[TestCase]) -> JudgeOutcome {
        let mut per_test = Vec::new();
        let verdict = match self.judge_tests(bin, suite, &mut per_test) {
            Ok(v) => v,
            Err(e) => Verdict::judge_fail(e.to_string()),
        };
        JudgeOutcome { verdict, per_test, used_suite_size: suite.len() }
    }

    fn judge_tests(&self, bin: &CompiledArtifact, suite: &[TestCase], per_test: &mut Vec<TestRecord>) -> Result<Verdict, JudgeError> {
        let limits = &self.pkg.limits;
        let checker = self.checker_tool()?;
        for (i, test) in suite.iter().enumerate() {
            let r = self.sb.execute(bin, &test.input, limits)?;
            let status = classify_run(&r, limits);
            let mut record = TestRecord { status, checker: None, cpu_time_ms: r.cpu_time_ms, peak_memory_mib: r.peak_memory_mib };
            if status != RunStatus::Ok {
                per_test.push(record);
                return Ok(run_failure(status, &r, limits, i));
            }
            let answer = match self.answer_for(test)? {
                OracleRun::Answer(a) => a,
                OracleRun::Failed(v) => {
                    per_test.push(record);
                    return Err(JudgeError::JudgeFail(format!("standard solution fails test {i}: {v}")));
                }
            };
            let result = run_checker(self.sb, &checker, &test.input, &r.stdout, &answer)?;
            record.checker = Some(result.clone());
            per_test.push(record);
            match result {
                CheckerResult::Accepted => {}
                CheckerResult::Rejected { reason } => return Ok(Verdict::failed(VerdictKind::WrongAnswer, reason, Some(i))),
                CheckerResult::CheckerFail { reason } => {
                    return Err(JudgeError::JudgeFail(format!("checker failed on test {i}: {reason}")))
                }
            }
        }
        Ok(Verdict::accepted())
    }

    /// Evaluates validity, oracle confirmation and target failure in that
    /// order, stopping at the first unmet condition.
    pub fn is_successful_hack(&self, x: &TestCase, target: &Submission, turn: u32) -> Result<HackAttempt, JudgeError> {
        let bin = match self.sb.compile(&target.source, &target.toolchain_id) {
            Ok(bin) => bin,
            Err(SandboxError::CompileError(_)) => return Err(JudgeError::TargetCompile(target.id.clone())),
            Err(e) => return Err(e.into()),
        };
        self.hack_against(x, &target.id, &bin, turn)
    }

    /// `is_successful_hack` for an already compiled target.
    pub fn hack_against(&self, x: &TestCase, target_id: &str, bin: &CompiledArtifact, turn: u32) -> Result<HackAttempt, JudgeError> {
        let mut attempt = HackAttempt {
            target_id: target_id.to_string(),
            input: x.clone(),
            validator_ok: false,
            validator_reason: None,
            std_verdict: None,
            target_verdict: None,
            oracle_fail: false,
            success: false,
            strategy: x.provenance(),
            turn,
        };
        if let ValidatorResult::Invalid { reason } = self.validate(&x.input)? {
            attempt.validator_reason = Some(reason);
            return Ok(attempt);
        }
        attempt.validator_ok = true;

        let answer = match self.oracle(&x.input)? {
            OracleRun::Answer(a) => a,
            OracleRun::Failed(v) => {
                attempt.std_verdict = Some(v);
                attempt.oracle_fail = true;
                return Ok(attempt);
            }
        };
        attempt.std_verdict = Some(Verdict::accepted());
        attempt.input.jury_answer = Some(answer);

        let outcome = self.judge_artifact(bin, std::slice::from_ref(&attempt.input));
        match outcome.verdict.kind() {
            VerdictKind::JudgeFail => return Err(JudgeError::JudgeFail(outcome.verdict.detail().to_string())),
            VerdictKind::CompileError => return Err(JudgeError::TargetCompile(target_id.to_string())),
            _ => {}
        }
        attempt.target_verdict = Some(outcome.verdict);
        attempt.success = hack_success(attempt.validator_ok, attempt.std_verdict.as_ref(), attempt.target_verdict.as_ref());
        Ok(attempt)
    }

    /// Submissions accepted locally but wrong according to their label or the
    /// official suite.
    pub fn identify_targets(&self) -> Result<Vec<Submission>, JudgeError> {
        let labeled = self.pkg.submissions.iter().any(|s| s.ground_truth.is_some());
        if !labeled && self.pkg.official_suite.is_none() {
            return Err(JudgeError::NoAuthoritativeSignal);
        }
        let mut targets = Vec::new();
        for s in &self.pkg.submissions {
            let local = self.judge_submission(s, &self.pkg.local_suite);
            if local.verdict.kind() == VerdictKind::JudgeFail {
                return Err(JudgeError::JudgeFail(local.verdict.detail().to_string()));
            }
            if !local.verdict.is_accepted() {
                continue;
            }
            let wrong = match (s.ground_truth, &self.pkg.official_suite) {
                (Some(GroundTruth::Incorrect), _) => true,
                (_, Some(official)) => !self.judge_submission(s, official).verdict.is_accepted(),
                _ => false,
            };
            if wrong {
                targets.push(s.clone());
            }
        }
        Ok(targets)
    }
}
