//! Problems, submissions, tests, verdicts and the on-disk package layout.
//!
//! A package directory looks like this:
//!
//! ```text
//! manifest.json
//! statement.md
//! tests/local/001.in  tests/local/001.ans ...
//! tests/official/...  (optional)
//! tests/augmented/... (optional, written by `augment`)
//! ```
//!
//! Test inputs are kept as raw bytes. Line-ending normalization only happens
//! when outputs are compared, never when a test is stored.

use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::sandbox::ToolchainSpec;

pub const MANIFEST_FILE: &str = "manifest.json";
pub const STATEMENT_FILE: &str = "statement.md";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum VerdictKind {
    #[serde(rename = "AC")]
    Accepted,
    #[serde(rename = "WA")]
    WrongAnswer,
    #[serde(rename = "RE")]
    RuntimeError,
    #[serde(rename = "TLE")]
    TimeLimitExceeded,
    #[serde(rename = "MLE")]
    MemoryLimitExceeded,
    #[serde(rename = "CE")]
    CompileError,
    #[serde(rename = "JUDGE_FAIL")]
    JudgeFail,
}

impl VerdictKind {
    pub fn code(self) -> &'static str {
        match self {
            Self::Accepted => "AC",
            Self::WrongAnswer => "WA",
            Self::RuntimeError => "RE",
            Self::TimeLimitExceeded => "TLE",
            Self::MemoryLimitExceeded => "MLE",
            Self::CompileError => "CE",
            Self::JudgeFail => "JUDGE_FAIL",
        }
    }
}

impl fmt::Display for VerdictKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.code())
    }
}

/// Judge outcome. `test_index` is 0-based; `Display` shows it 1-based. An
/// accepted verdict never carries a test index; the
/// constructors are the only way to build one.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawVerdict")]
pub struct Verdict {
    kind: VerdictKind,
    detail: String,
    test_index: Option<usize>,
}

#[derive(Deserialize)]
struct RawVerdict {
    kind: VerdictKind,
    #[serde(default)]
    detail: String,
    #[serde(default)]
    test_index: Option<usize>,
}

impl TryFrom<RawVerdict> for Verdict {
    type Error = String;

    fn try_from(raw: RawVerdict) -> Result<Self, Self::Error> {
        if raw.kind == VerdictKind::Accepted && raw.test_index.is_some() {
            return Err("an AC verdict cannot carry a test index".into());
        }
        Ok(Self { kind: raw.kind, detail: raw.detail, test_index: raw.test_index })
    }
}

impl Verdict {
    pub fn accepted() -> Self {
        Self { kind: VerdictKind::Accepted, detail: String::new(), test_index: None }
    }

    /// Builds a non-AC verdict. Passing `VerdictKind::Accepted` drops the index.
    pub fn failed(kind: VerdictKind, detail: impl Into<String>, test_index: Option<usize>) -> Self {
        let test_index = if kind == VerdictKind::Accepted { None } else { test_index };
        Self { kind, detail: detail.into(), test_index }
    }

    pub fn compile_error(log: impl Into<String>) -> Self {
        Self::failed(VerdictKind::CompileError, log, None)
    }

    pub fn judge_fail(detail: impl Into<String>) -> Self {
        Self::failed(VerdictKind::JudgeFail, detail, None)
    }

    pub fn kind(&self) -> VerdictKind {
        self.kind
    }

    pub fn detail(&self) -> &str {
        &self.detail
    }

    pub fn test_index(&self) -> Option<usize> {
        self.test_index
    }

    pub fn is_accepted(&self) -> bool {
        self.kind == VerdictKind::Accepted
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.test_index {
            Some(i) => write!(f, "{} on test {}", self.kind, i + 1),
            None => write!(f, "{}", self.kind),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ResourceLimits {
    pub time_limit_ms: u64,
    pub memory_limit_mib: u64,
    /// Hard kill happens at `wall_clock_multiplier * time_limit_ms` of wall time.
    pub wall_clock_multiplier: f64,
    pub output_limit_bytes: u64,
}

pub const DEFAULT_WALL_CLOCK_MULTIPLIER: f64 = 2.0;
pub const DEFAULT_OUTPUT_LIMIT_BYTES: u64 = 64 << 20;

impl ResourceLimits {
    pub fn new(time_limit_ms: u64, memory_limit_mib: u64) -> Result<Self, PackageError> {
        let limits = Self {
            time_limit_ms,
            memory_limit_mib,
            wall_clock_multiplier: DEFAULT_WALL_CLOCK_MULTIPLIER,
            output_limit_bytes: DEFAULT_OUTPUT_LIMIT_BYTES,
        };
        limits.validate()?;
        Ok(limits)
    }

    pub fn validate(&self) -> Result<(), PackageError> {
        if self.time_limit_ms == 0 {
            return Err(PackageError::InvariantViolation("time_limit_ms must be positive".into()));
        }
        if self.memory_limit_mib == 0 {
            return Err(PackageError::InvariantViolation("memory_limit_mib must be positive".into()));
        }
        if self.output_limit_bytes == 0 {
            return Err(PackageError::InvariantViolation("output_limit_bytes must be positive".into()));
        }
        if !(self.wall_clock_multiplier >= 1.0) || !self.wall_clock_multiplier.is_finite() {
            return Err(PackageError::InvariantViolation(
                "wall_clock_multiplier must be a finite value >= 1".into(),
            ));
        }
        Ok(())
    }

    pub fn wall_limit_ms(&self) -> u64 {
        (self.time_limit_ms as f64 * self.wall_clock_multiplier).ceil() as u64
    }

    /// Same memory and output caps with a scaled-down time limit (never below 1 ms).
    pub fn with_time_fraction(&self, divisor: u64) -> Self {
        Self { time_limit_ms: (self.time_limit_ms / divisor.max(1)).max(1), ..*self }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Provenance {
    Original,
    Stress,
    Provider,
    Antihash,
    Probe,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TestCase {
    #[serde(with = "crate::bytes")]
    pub input: Vec<u8>,
    #[serde(default, with = "crate::bytes::option")]
    pub jury_answer: Option<Vec<u8>>,
    provenance: Provenance,
    #[serde(default)]
    pub metadata: BTreeMap<String, String>,
}

impl TestCase {
    pub fn new(input: impl Into<Vec<u8>>, provenance: Provenance) -> Self {
        Self { input: input.into(), jury_answer: None, provenance, metadata: BTreeMap::new() }
    }

    pub fn with_answer(mut self, answer: impl Into<Vec<u8>>) -> Self {
        self.jury_answer = Some(answer.into());
        self
    }

    pub fn with_meta(mut self, key: &str, value: impl ToString) -> Self {
        self.metadata.insert(key.to_string(), value.to_string());
        self
    }

    pub fn provenance(&self) -> Provenance {
        self.provenance
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GroundTruth {
    Correct,
    Incorrect,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Submission {
    pub id: String,
    pub source: String,
    pub toolchain_id: String,
    pub ground_truth: Option<GroundTruth>,
    /// Path of the source relative to the package root; used when saving.
    pub source_path: String,
}

impl Submission {
    pub fn new(id: &str, source: impl Into<String>, toolchain_id: &str) -> Self {
        Self {
            id: id.to_string(),
            source: source.into(),
            toolchain_id: toolchain_id.to_string(),
            ground_truth: None,
            source_path: format!("submissions/{id}.cpp"),
        }
    }

    pub fn labeled(mut self, label: GroundTruth) -> Self {
        self.ground_truth = Some(label);
        self
    }
}

/// A validator, checker or generator program shipped with a package.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ToolSource {
    pub source: String,
    pub toolchain_id: String,
    pub source_path: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum CheckerSpec {
    TokenDiff,
    Custom(ToolSource),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SeedStrategy {
    SelfSeeded,
    ArgvSeed,
}

/// A compiled program that prints exactly one test case on standard output.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GeneratorProgram {
    pub source: String,
    pub toolchain_id: String,
    pub seed_strategy: SeedStrategy,
}

/// Tools pinned by an expert; calibration returns them unchanged.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Frozen {
    #[serde(default)]
    pub validator: bool,
    #[serde(default)]
    pub checker: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProblemPackage {
    pub id: String,
    pub statement: String,
    pub limits: ResourceLimits,
    pub std_solution: Submission,
    pub validator: Option<ToolSource>,
    pub checker: CheckerSpec,
    pub local_suite: Vec<TestCase>,
    pub official_suite: Option<Vec<TestCase>>,
    pub augmented_suite: Option<Vec<TestCase>>,
    pub submissions: Vec<Submission>,
    pub empty_input_legal: bool,
    pub frozen: Frozen,
    pub stress_generator: Option<(GeneratorProgram, String)>,
    /// Directory the package was loaded from, if any.
    pub root: Option<PathBuf>,
}

#[derive(Debug, Error)]
pub enum PackageError {
    #[error("no {MANIFEST_FILE} in {0}")]
    MissingManifest(PathBuf),
    #[error("malformed manifest field `{field}`: {reason}")]
    MalformedManifest { field: String, reason: String },
    #[error("manifest references missing file {0}")]
    DanglingReference(PathBuf),
    #[error("package invariant violated: {0}")]
    InvariantViolation(String),
    #[error("io error on {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> PackageError + '_ {
    move |source| PackageError::Io { path: path.to_path_buf(), source }
}

// ---------------------------------------------------------------------------
// manifest schema

#[derive(Debug, Serialize, Deserialize)]
struct Manifest {
    id: String,
    time_limit_ms: u64,
    memory_limit_mib: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    wall_clock_multiplier: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    output_limit_bytes: Option<u64>,
    checker: ManifestChecker,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    validator: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    validator_toolchain: Option<String>,
    std: ManifestProgram,
    #[serde(default)]
    submissions: Vec<ManifestSubmission>,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    empty_input_legal: bool,
    #[serde(default, skip_serializing_if = "is_default_frozen")]
    frozen: Frozen,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    stress_generator: Option<ManifestGenerator>,
}

fn is_default_frozen(f: &Frozen) -> bool {
    *f == Frozen::default()
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
enum ManifestChecker {
    TokenDiff,
    Custom { source: String, toolchain: String },
}

#[derive(Debug, Serialize, Deserialize)]
struct ManifestProgram {
    source: String,
    toolchain: String,
}

#[derive(Debug, Serialize, Deserialize)]
struct ManifestSubmission {
    id: String,
    source: String,
    toolchain: String,
    #[serde(default)]
    label: Option<GroundTruth>,
}

#[derive(Debug, Serialize, Deserialize)]
struct ManifestGenerator {
    source: String,
    toolchain: String,
    #[serde(default = "default_seed_strategy")]
    seed: SeedStrategy,
}

fn default_seed_strategy() -> SeedStrategy {
    SeedStrategy::ArgvSeed
}

pub const DEFAULT_TOOL_TOOLCHAIN: &str = "gpp17";

// ---------------------------------------------------------------------------
// loading

/// Loads a package, checking toolchain ids against the built-in defaults.
pub fn load_package(path: impl AsRef<Path>) -> Result<ProblemPackage, PackageError> {
    let ids: Vec<String> = ToolchainSpec::defaults().into_iter().map(|t| t.id).collect();
    load_package_with_toolchains(path, &ids)
}

pub fn load_package_with_toolchains(
    path: impl AsRef<Path>,
    toolchain_ids: &[String],
) -> Result<ProblemPackage, PackageError> {
    let root = path.as_ref();
    let manifest_path = root.join(MANIFEST_FILE);
    if !manifest_path.is_file() {
        return Err(PackageError::MissingManifest(root.to_path_buf()));
    }
    let text = fs::read_to_string(&manifest_path).map_err(io_err(&manifest_path))?;
    let manifest: Manifest = serde_json::from_str(&text).map_err(|e| malformed_from_serde(&text, e))?;

    let known = |id: &str, field: &str| -> Result<(), PackageError> {
        if toolchain_ids.iter().any(|t| t == id) {
            Ok(())
        } else {
            Err(PackageError::MalformedManifest {
                field: field.to_string(),
                reason: format!("unknown toolchain `{id}`"),
            })
        }
    };

    let limits = ResourceLimits {
        time_limit_ms: manifest.time_limit_ms,
        memory_limit_mib: manifest.memory_limit_mib,
        wall_clock_multiplier: manifest.wall_clock_multiplier.unwrap_or(DEFAULT_WALL_CLOCK_MULTIPLIER),
        output_limit_bytes: manifest.output_limit_bytes.unwrap_or(DEFAULT_OUTPUT_LIMIT_BYTES),
    };
    limits.validate()?;

    known(&manifest.std.toolchain, "std.toolchain")?;
    let std_solution = Submission {
        id: "std".into(),
        source: read_text(root, &manifest.std.source)?,
        toolchain_id: manifest.std.toolchain.clone(),
        ground_truth: Some(GroundTruth::Correct),
        source_path: manifest.std.source.clone(),
    };

    let validator = match &manifest.validator {
        Some(rel) => {
            let toolchain = manifest.validator_toolchain.clone().unwrap_or_else(|| DEFAULT_TOOL_TOOLCHAIN.into());
            known(&toolchain, "validator_toolchain")?;
            Some(ToolSource { source: read_text(root, rel)?, toolchain_id: toolchain, source_path: rel.clone() })
        }
        None => None,
    };

    let checker = match &manifest.checker {
        ManifestChecker::TokenDiff => CheckerSpec::TokenDiff,
        ManifestChecker::Custom { source, toolchain } => {
            known(toolchain, "checker.toolchain")?;
            CheckerSpec::Custom(ToolSource {
                source: read_text(root, source)?,
                toolchain_id: toolchain.clone(),
                source_path: source.clone(),
            })
        }
    };

    let mut submissions = Vec::with_capacity(manifest.submissions.len());
    for (i, s) in manifest.submissions.iter().enumerate() {
        known(&s.toolchain, &format!("submissions[{i}].toolchain"))?;
        if submissions.iter().any(|x: &Submission| x.id == s.id) {
            return Err(PackageError::InvariantViolation(format!("duplicate submission id `{}`", s.id)));
        }
        submissions.push(Submission {
            id: s.id.clone(),
            source: read_text(root, &s.source)?,
            toolchain_id: s.toolchain.clone(),
            ground_truth: s.label,
            source_path: s.source.clone(),
        });
    }

    let stress_generator = match &manifest.stress_generator {
        Some(g) => {
            known(&g.toolchain, "stress_generator.toolchain")?;
            Some((
                GeneratorProgram { source: read_text(root, &g.source)?, toolchain_id: g.toolchain.clone(), seed_strategy: g.seed },
                g.source.clone(),
            ))
        }
        None => None,
    };

    let local_suite = read_suite(&root.join("tests/local"), Provenance::Original)?.unwrap_or_default();
    let official_suite = read_suite(&root.join("tests/official"), Provenance::Original)?;
    let augmented_suite = read_suite(&root.join("tests/augmented"), Provenance::Original)?;

    let statement_path = root.join(STATEMENT_FILE);
    let statement = if statement_path.is_file() {
        fs::read_to_string(&statement_path).map_err(io_err(&statement_path))?
    } else {
        String::new()
    };

    let pkg = ProblemPackage {
        id: manifest.id,
        statement,
        limits,
        std_solution,
        validator,
        checker,
        local_suite,
        official_suite,
        augmented_suite,
        submissions,
        empty_input_legal: manifest.empty_input_legal,
        frozen: manifest.frozen,
        stress_generator,
        root: Some(root.to_path_buf()),
    };
    pkg.check_invariants()?;
    Ok(pkg)
}

fn malformed_from_serde(text: &str, e: serde_json::Error) -> PackageError {
    // serde_json reports missing fields as "missing field `x`"; surface the name.
    let msg = e.to_string();
    let field = msg
        .split('`')
        .nth(1)
        .map(str::to_string)
        .unwrap_or_else(|| if text.trim().is_empty() { "<root>".into() } else { "<syntax>".into() });
    PackageError::MalformedManifest { field, reason: msg }
}

fn read_text(root: &Path, rel: &str) -> Result<String, PackageError> {
    let path = root.join(rel);
    if !path.is_file() {
        return Err(PackageError::DanglingReference(path));
    }
    fs::read_to_string(&path).map_err(io_err(&path))
}

fn read_suite(dir: &Path, provenance: Provenance) -> Result<Option<Vec<TestCase>>, PackageError> {
    if !dir.is_dir() {
        return Ok(None);
    }
    let mut indices = Vec::new();
    for entry in fs::read_dir(dir).map_err(io_err(dir))? {
        let entry = entry.map_err(io_err(dir))?;
        let name = entry.file_name().to_string_lossy().into_owned();
        if let Some(stem) = name.strip_suffix(".in") {
            if stem.len() == 3 && stem.bytes().all(|b| b.is_ascii_digit()) {
                indices.push(stem.to_string());
            }
        }
    }
    indices.sort();
    let mut suite = Vec::with_capacity(indices.len());
    for stem in indices {
        let in_path = dir.join(format!("{stem}.in"));
        let ans_path = dir.join(format!("{stem}.ans"));
        let input = fs::read(&in_path).map_err(io_err(&in_path))?;
        let mut case = TestCase::new(input, provenance).with_meta("file", &stem);
        if ans_path.is_file() {
            case.jury_answer = Some(fs::read(&ans_path).map_err(io_err(&ans_path))?);
        }
        suite.push(case);
    }
    Ok(Some(suite))
}

impl ProblemPackage {
    pub fn check_invariants(&self) -> Result<(), PackageError> {
        self.limits.validate()?;
        if self.std_solution.ground_truth != Some(GroundTruth::Correct) {
            return Err(PackageError::InvariantViolation("standard solution must be labeled correct".into()));
        }
        if self.checker == CheckerSpec::TokenDiff {
            if let Some(i) = self.local_suite.iter().position(|t| t.jury_answer.is_none()) {
                return Err(PackageError::InvariantViolation(format!(
                    "token_diff checker needs a jury answer for every local test (missing for test {i})"
                )));
            }
        }
        if !self.empty_input_legal {
            let suites = [Some(&self.local_suite), self.official_suite.as_ref()];
            for suite in suites.into_iter().flatten() {
                if suite.iter().any(|t| t.input.is_empty()) {
                    return Err(PackageError::InvariantViolation(
                        "empty test input in a package that does not declare empty input legal".into(),
                    ));
                }
            }
        }
        Ok(())
    }

    pub fn submission(&self, id: &str) -> Option<&Submission> {
        if id == self.std_solution.id {
            return Some(&self.std_solution);
        }
        self.submissions.iter().find(|s| s.id == id)
    }

    pub fn checker_source(&self) -> Option<&ToolSource> {
        match &self.checker {
            CheckerSpec::Custom(src) => Some(src),
            CheckerSpec::TokenDiff => None,
        }
    }
}

// ---------------------------------------------------------------------------
// saving

/// Writes the package into `dir` using the layout `load_package` reads.
pub fn save_package(pkg: &ProblemPackage, dir: impl AsRef<Path>) -> Result<(), PackageError> {
    let root = dir.as_ref();
    fs::create_dir_all(root).map_err(io_err(root))?;

    let write = |rel: &str, bytes: &[u8]| -> Result<(), PackageError> {
        let path = root.join(rel);
        if let Some(parent) = path.parent() {
            fs::create_dir_all(parent).map_err(io_err(parent))?;
        }
        fs::write(&path, bytes).map_err(io_err(&path))
    };

    write(&pkg.std_solution.source_path, pkg.std_solution.source.as_bytes())?;
    if let Some(v) = &pkg.validator {
        write(&v.source_path, v.source.as_bytes())?;
    }
    let checker = match &pkg.checker {
        CheckerSpec::TokenDiff => ManifestChecker::TokenDiff,
        CheckerSpec::Custom(src) => {
            write(&src.source_path, src.source.as_bytes())?;
            ManifestChecker::Custom { source: src.source_path.clone(), toolchain: src.toolchain_id.clone() }
        }
    };
    for s in &pkg.submissions {
        write(&s.source_path, s.source.as_bytes())?;
    }
    if let Some((g, path)) = &pkg.stress_generator {
        write(path, g.source.as_bytes())?;
    }
    write(STATEMENT_FILE, pkg.statement.as_bytes())?;

    write_suite(root, "tests/local", &pkg.local_suite)?;
    if let Some(s) = &pkg.official_suite {
        write_suite(root, "tests/official", s)?;
    }
    if let Some(s) = &pkg.augmented_suite {
        write_suite(root, "tests/augmented", s)?;
    }

    let manifest = Manifest {
        id: pkg.id.clone(),
        time_limit_ms: pkg.limits.time_limit_ms,
        memory_limit_mib: pkg.limits.memory_limit_mib,
        wall_clock_multiplier: (pkg.limits.wall_clock_multiplier != DEFAULT_WALL_CLOCK_MULTIPLIER)
            .then_some(pkg.limits.wall_clock_multiplier),
        output_limit_bytes: (pkg.limits.output_limit_bytes != DEFAULT_OUTPUT_LIMIT_BYTES)
            .then_some(pkg.limits.output_limit_bytes),
        checker,
        validator: pkg.validator.as_ref().map(|v| v.source_path.clone()),
        validator_toolchain: pkg.validator.as_ref().map(|v| v.toolchain_id.clone()),
        std: ManifestProgram {
            source: pkg.std_solution.source_path.clone(),
            toolchain: pkg.std_solution.toolchain_id.clone(),
        },
        submissions: pkg
            .submissions
            .iter()
            .map(|s| ManifestSubmission {
                id: s.id.clone(),
                source: s.source_path.clone(),
                toolchain: s.toolchain_id.clone(),
                label: s.ground_truth,
            })
            .collect(),
        empty_input_legal: pkg.empty_input_legal,
        frozen: pkg.frozen,
        stress_generator: pkg.stress_generator.as_ref().map(|(g, path)| ManifestGenerator {
            source: path.clone(),
            toolchain: g.toolchain_id.clone(),
            seed: g.seed_strategy,
        }),
    };
    let mut text = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
    text.push('\n');
    write(MANIFEST_FILE, text.as_bytes())
}

/// Replaces the contents of `root/rel` with the suite, numbered from 001.
pub fn write_suite(root: &Path, rel: &str, suite: &[TestCase]) -> Result<(), PackageError> {
    let dir = root.join(rel);
    if dir.is_dir() {
        fs::remove_dir_all(&dir).map_err(io_err(&dir))?;
    }
    fs::create_dir_all(&dir).map_err(io_err(&dir))?;
    for (i, case) in suite.iter().enumerate() {
        let stem = format!("{:03}", i + 1);
        let in_path = dir.join(format!("{stem}.in"));
        fs::write(&in_path, &case.input).map_err(io_err(&in_path))?;
        if let Some(ans) = &case.jury_answer {
            let ans_path = dir.join(format!("{stem}.ans"));
            fs::write(&ans_path, ans).map_err(io_err(&ans_path))?;
        }
    }
    Ok(())
}

/// Splits submissions into (labeled correct, labeled incorrect, unlabeled),
/// preserving manifest order within each list.
pub fn partition_by_label(pkg: &ProblemPackage) -> (Vec<Submission>, Vec<Submission>, Vec<Submission>) {
    let mut positives = Vec::new();
    let mut negatives = Vec::new();
    let mut unlabeled = Vec::new();
    for s in &pkg.submissions {
        match s.ground_truth {
            Some(GroundTruth::Correct) => positives.push(s.clone()),
            Some(GroundTruth::Incorrect) => negatives.push(s.clone()),
            None => unlabeled.push(s.clone()),
        }
    }
    (positives, negatives, unlabeled)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tiny_package() -> ProblemPackage {
        ProblemPackage {
            id: "tiny".into(),
            statement: "echo".into(),
            limits: ResourceLimits::new(1000, 256).unwrap(),
            std_solution: Submission::new("std", "int main(){}", "gpp17").labeled(GroundTruth::Correct),
            validator: None,
            checker: CheckerSpec::TokenDiff,
            local_suite: vec![TestCase::new("1\n", Provenance::Original).with_answer("1\n")],
            official_suite: None,
            augmented_suite: None,
            submissions: vec![],
            empty_input_legal: false,
            frozen: Frozen::default(),
            stress_generator: None,
            root: None,
        }
    }

    #[test]
    fn accepted_verdict_drops_index() {
        let v = Verdict::failed(VerdictKind::Accepted, "", Some(3));
        assert_eq!(v.test_index(), None);
        let v = Verdict::failed(VerdictKind::WrongAnswer, "x", Some(3));
        assert_eq!(v.test_index(), Some(3));
    }

    #[test]
    fn accepted_verdict_with_index_fails_to_deserialize() {
        let err = serde_json::from_str::<Verdict>(r#"{"kind":"AC","detail":"","test_index":0}"#);
        assert!(err.is_err());
        let ok: Verdict = serde_json::from_str(r#"{"kind":"TLE","test_index":2}"#).unwrap();
        assert_eq!(ok.kind(), VerdictKind::TimeLimitExceeded);
    }

    #[test]
    fn limits_reject_zero_and_small_multiplier() {
        assert!(ResourceLimits::new(0, 256).is_err());
        assert!(ResourceLimits::new(1000, 0).is_err());
        let mut l = ResourceLimits::new(1000, 256).unwrap();
        l.wall_clock_multiplier = 0.5;
        assert!(l.validate().is_err());
        assert_eq!(ResourceLimits::new(1000, 256).unwrap().wall_limit_ms(), 2000);
    }

    #[test]
    fn token_diff_requires_answers() {
        let mut pkg = tiny_package();
        pkg.local_suite.push(TestCase::new("2\n", Provenance::Original));
        assert!(matches!(pkg.check_invariants(), Err(PackageError::InvariantViolation(_))));
    }

    #[test]
    fn partition_empty_and_unlabeled() {
        let mut pkg = tiny_package();
        assert_eq!(partition_by_label(&pkg), (vec![], vec![], vec![]));
        pkg.submissions = (0..3).map(|i| Submission::new(&format!("s{i}"), "", "gpp17")).collect();
        let (p, n, u) = partition_by_label(&pkg);
        assert_eq!((p.len(), n.len(), u.len()), (0, 0, 3));
    }

    #[test]
    fn missing_manifest_is_reported() {
        let dir = tempfile::tempdir().unwrap();
        assert!(matches!(load_package(dir.path()), Err(PackageError::MissingManifest(_))));
    }

    #[test]
    fn save_then_load_round_trips() {
        let dir = tempfile::tempdir().unwrap();
        let mut pkg = tiny_package();
        pkg.local_suite.push(TestCase::new(b"\x00\xff raw\r\n".to_vec(), Provenance::Original).with_answer("x"));
        pkg.submissions.push(Submission::new("a", "// a\r\n", "gpp17").labeled(GroundTruth::Incorrect));
        save_package(&pkg, dir.path()).unwrap();
        let back = load_package(dir.path()).unwrap();
        assert_eq!(back.local_suite.len(), 2);
        assert_eq!(back.local_suite[1].input, b"\x00\xff raw\r\n");
        assert_eq!(back.submissions[0].source, "// a\r\n");
        assert_eq!(back.submissions[0].ground_truth, Some(GroundTruth::Incorrect));
    }
}
