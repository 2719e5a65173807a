//! Compile sources with configured toolchains and run the resulting binaries
//! under time, memory and output limits.
//!
//! CPU time is judged against the time limit; wall time only triggers the hard
//! kill at `wall_clock_multiplier * time_limit`. Memory is the peak resident
//! set (rusage plus a /proc sampler), with an address-space rlimit a little
//! above the limit as a backstop.

mod process;
mod toolchain;

use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::model::ResourceLimits;
use process::RunOptions;
pub use toolchain::{Toolchains, ToolchainSpec, REFERENCE_STACK_MIB};

/// Header dropped next to every compiled source as `testlib.h`.
pub const TESTLIB_HEADER: &str = include_str!("testlib.h");
pub const COMPILE_BUDGET_MS: u64 = 60_000;
pub const WORKDIR_ENV: &str = "HACKFORGE_WORKDIR";

const COMPILE_LOG_LIMIT: u64 = 1 << 20;
const STDERR_LIMIT: u64 = 1 << 20;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SandboxError {
    #[error("compilation failed:\n{0}")]
    CompileError(String),
    #[error("toolchain `{id}` unavailable: {reason}")]
    ToolchainUnavailable { id: String, reason: String },
    #[error("toolchain `{id}` is malformed: {reason}")]
    InvalidToolchain { id: String, reason: String },
    #[error("compilation exceeded the {COMPILE_BUDGET_MS} ms budget")]
    CompileTimeout,
    #[error("sandbox failure: {0}")]
    Failure(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExitStatus {
    Code(i32),
    Signaled(i32),
}

impl ExitStatus {
    pub fn success(self) -> bool {
        self == ExitStatus::Code(0)
    }
}

impl fmt::Display for ExitStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Code(c) => write!(f, "exit code {c}"),
            Self::Signaled(s) => write!(f, "killed by signal {s}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CompiledArtifact {
    pub binary_path: PathBuf,
    pub toolchain_id: String,
    pub compile_log: String,
    pub source_hash: String,
    run_argv: Vec<String>,
    stack_mib: Option<u64>,
}

impl CompiledArtifact {
    pub fn run_argv(&self) -> &[String] {
        &self.run_argv
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExecutionResult {
    pub exit: ExitStatus,
    pub cpu_time_ms: u64,
    pub wall_time_ms: u64,
    pub peak_memory_mib: f64,
    #[serde(with = "crate::bytes")]
    pub stdout: Vec<u8>,
    #[serde(with = "crate::bytes")]
    pub stderr: Vec<u8>,
    /// Stdout exceeded the output limit and was cut at exactly that many bytes.
    pub truncated: bool,
    /// The process was still running at the wall-clock hard limit.
    pub wall_killed: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum RunStatus {
    Ok,
    Tle,
    Mle,
    Re,
}

/// Maps raw measurements onto a run status with fixed priority TLE > MLE > RE.
pub fn classify_run(r: &ExecutionResult, limits: &ResourceLimits) -> RunStatus {
    if r.cpu_time_ms > limits.time_limit_ms || r.wall_killed {
        RunStatus::Tle
    } else if r.peak_memory_mib > limits.memory_limit_mib as f64 {
        RunStatus::Mle
    } else if !r.exit.success() || r.truncated {
        RunStatus::Re
    } else {
        RunStatus::Ok
    }
}

/// Limits used for validators, checkers and generators.
pub fn tool_limits() -> ResourceLimits {
    ResourceLimits { time_limit_ms: 10_000, memory_limit_mib: 1024, wall_clock_multiplier: 2.0, output_limit_bytes: 256 << 20 }
}

#[derive(Debug, Clone)]
pub struct Sandbox {
    root: PathBuf,
    cache: PathBuf,
    toolchains: Toolchains,
}

impl Sandbox {
    /// Probes every spec by compiling a trivial program; failing specs are
    /// recorded as unavailable.
    pub fn new(root: impl Into<PathBuf>, specs: Vec<ToolchainSpec>) -> Result<Self, SandboxError> {
        let root = root.into();
        let cache = root.join("cache");
        fs::create_dir_all(&cache).map_err(|e| SandboxError::Failure(format!("cannot create {}: {e}", cache.display())))?;
        let mut available = BTreeMap::new();
        let mut unavailable = BTreeMap::new();
        for spec in specs {
            spec.validate()?;
            match compile_cached(&root, &cache, "int main() { return 0; }\n", &spec) {
                Ok(_) => {
                    available.insert(spec.id.clone(), spec);
                }
                Err(e) => {
                    let first_line = e.to_string().lines().take(3).collect::<Vec<_>>().join(" ");
                    unavailable.insert(spec.id.clone(), first_line);
                }
            }
        }
        Ok(Self { root, cache, toolchains: Toolchains::from_parts(available, unavailable) })
    }

    /// Sandbox rooted at `$HACKFORGE_WORKDIR` (or the system temp dir) with the
    /// default toolchains.
    pub fn from_env() -> Result<Self, SandboxError> {
        Self::new(default_root(), ToolchainSpec::defaults())
    }

    /// Process-wide shared instance with default toolchains, probed once.
    pub fn shared() -> &'static Sandbox {
        static SHARED: OnceLock<Sandbox> = OnceLock::new();
        SHARED.get_or_init(|| Sandbox::from_env().expect("sandbox workspace is writable"))
    }

    pub fn toolchains(&self) -> &Toolchains {
        &self.toolchains
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    pub fn compile(&self, source: &str, toolchain_id: &str) -> Result<CompiledArtifact, SandboxError> {
        let spec = self.toolchains.get(toolchain_id)?;
        compile_cached(&self.root, &self.cache, source, spec)
    }

    pub fn execute(&self, artifact: &CompiledArtifact, input: &[u8], limits: &ResourceLimits) -> Result<ExecutionResult, SandboxError> {
        self.execute_with_args(artifact, &[], input, limits)
    }

    /// Runs the artifact in a fresh directory; `args` are appended to its argv.
    pub fn execute_with_args(
        &self,
        artifact: &CompiledArtifact,
        args: &[String],
        input: &[u8],
        limits: &ResourceLimits,
    ) -> Result<ExecutionResult, SandboxError> {
        let dir = self.scratch_dir("run-")?;
        execute_in(artifact, args, input, limits, dir.path())
    }

    /// A fresh temporary directory under the workspace root.
    pub fn scratch_dir(&self, prefix: &str) -> Result<tempfile::TempDir, SandboxError> {
        tempfile::Builder::new()
            .prefix(prefix)
            .tempdir_in(&self.root)
            .map_err(|e| SandboxError::Failure(format!("cannot create scratch dir: {e}")))
    }
}

pub fn default_root() -> PathBuf {
    std::env::var_os(WORKDIR_ENV)
        .map(PathBuf::from)
        .unwrap_or_else(|| std::env::temp_dir().join("hackforge"))
}

/// Compiles `source` in `workdir` without caching.
pub fn compile(source: &str, toolchain: &ToolchainSpec, workdir: &Path) -> Result<CompiledArtifact, SandboxError> {
    toolchain.validate()?;
    let out = workdir.join("prog");
    let log = build(source, toolchain, workdir, &out)?;
    artifact_for(out, toolchain, log, source_hash(source, toolchain))
}

/// Runs `artifact` with `cwd` as its working directory.
pub fn execute_in(
    artifact: &CompiledArtifact,
    args: &[String],
    input: &[u8],
    limits: &ResourceLimits,
    cwd: &Path,
) -> Result<ExecutionResult, SandboxError> {
    limits.validate().map_err(|e| SandboxError::Failure(e.to_string()))?;
    let mut argv = artifact.run_argv.clone();
    argv.extend(args.iter().cloned());
    let slack = (limits.memory_limit_mib / 8).max(32);
    let wall_ms = limits.wall_limit_ms();
    let opts = RunOptions {
        wall_limit_ms: wall_ms,
        address_space_mib: Some(limits.memory_limit_mib + slack),
        stack_mib: artifact.stack_mib,
        cpu_limit_s: Some(wall_ms.div_ceil(1000) + 1),
        rss_kill_bytes: Some(limits.memory_limit_mib << 20),
        output_limit: limits.output_limit_bytes,
        stderr_limit: STDERR_LIMIT,
    };
    let raw = process::run(&argv, cwd, input, &opts)?;
    Ok(ExecutionResult {
        exit: raw.exit,
        cpu_time_ms: raw.cpu_time_ms,
        wall_time_ms: raw.wall_time_ms,
        peak_memory_mib: raw.peak_rss_bytes as f64 / (1u64 << 20) as f64,
        stdout: raw.stdout,
        stderr: raw.stderr,
        truncated: raw.truncated,
        wall_killed: raw.wall_killed,
    })
}

fn source_hash(source: &str, spec: &ToolchainSpec) -> String {
    let mut h = Sha256::new();
    h.update(spec.compile_template.as_bytes());
    h.update([0]);
    h.update(spec.source_extension.as_bytes());
    h.update([0]);
    h.update(TESTLIB_HEADER.as_bytes());
    h.update([0]);
    h.update(source.as_bytes());
    hex::encode(h.finalize())
}

fn build(source: &str, spec: &ToolchainSpec, workdir: &Path, out: &Path) -> Result<String, SandboxError> {
    let fail = |e: std::io::Error| SandboxError::Failure(format!("cannot prepare compile dir: {e}"));
    fs::create_dir_all(workdir).map_err(fail)?;
    let src = workdir.join(format!("main.{}", spec.source_extension));
    fs::write(&src, source).map_err(fail)?;
    fs::write(workdir.join("testlib.h"), TESTLIB_HEADER).map_err(fail)?;

    let argv = spec.compile_argv(&src, out);
    let opts = RunOptions {
        wall_limit_ms: COMPILE_BUDGET_MS,
        output_limit: COMPILE_LOG_LIMIT,
        stderr_limit: COMPILE_LOG_LIMIT,
        ..RunOptions::default()
    };
    let raw = match process::run(&argv, workdir, b"", &opts) {
        Ok(raw) => raw,
        Err(SandboxError::Failure(msg)) if msg.starts_with("cannot spawn") => {
            return Err(SandboxError::ToolchainUnavailable { id: spec.id.clone(), reason: msg })
        }
        Err(e) => return Err(e),
    };
    if raw.wall_killed {
        return Err(SandboxError::CompileTimeout);
    }
    let mut log = String::from_utf8_lossy(&raw.stdout).into_owned();
    log.push_str(&String::from_utf8_lossy(&raw.stderr));
    if !raw.exit.success() || !out.is_file() {
        return Err(SandboxError::CompileError(log));
    }
    Ok(log)
}

fn artifact_for(binary: PathBuf, spec: &ToolchainSpec, log: String, hash: String) -> Result<CompiledArtifact, SandboxError> {
    use std::os::unix::fs::PermissionsExt;
    let meta = fs::metadata(&binary).map_err(|e| SandboxError::Failure(format!("missing binary {}: {e}", binary.display())))?;
    if meta.permissions().mode() & 0o111 == 0 {
        return Err(SandboxError::Failure(format!("{} is not executable", binary.display())));
    }
    Ok(CompiledArtifact {
        run_argv: spec.run_argv(&binary),
        binary_path: binary,
        toolchain_id: spec.id.clone(),
        compile_log: log,
        source_hash: hash,
        stack_mib: spec.stack_mib,
    })
}

/// Compiles through a content-addressed cache: `<cache>/<hash>/prog` on
/// success, `<cache>/<hash>.celog` holding the log on compile failure.
fn compile_cached(root: &Path, cache: &Path, source: &str, spec: &ToolchainSpec) -> Result<CompiledArtifact, SandboxError> {
    let hash = source_hash(source, spec);
    let dir = cache.join(&hash);
    let bin = dir.join("prog");
    let failed = cache.join(format!("{hash}.celog"));
    if bin.is_file() {
        let log = fs::read_to_string(dir.join("compile.log")).unwrap_or_default();
        return artifact_for(bin, spec, log, hash);
    }
    if let Ok(log) = fs::read_to_string(&failed) {
        return Err(SandboxError::CompileError(log));
    }

    let tmp = tempfile::Builder::new()
        .prefix("compile-")
        .tempdir_in(root)
        .map_err(|e| SandboxError::Failure(format!("cannot create compile dir: {e}")))?;
    let out = tmp.path().join("prog");
    match build(source, spec, tmp.path(), &out) {
        Ok(log) => {
            fs::write(tmp.path().join("compile.log"), &log)
                .map_err(|e| SandboxError::Failure(format!("cannot write compile log: {e}")))?;
            // Publish atomically; a concurrent compile of the same source may win the race.
            let staged = tmp.path().join("publish");
            fs::create_dir(&staged).map_err(|e| SandboxError::Failure(e.to_string()))?;
            fs::rename(&out, staged.join("prog")).map_err(|e| SandboxError::Failure(e.to_string()))?;
            fs::rename(tmp.path().join("compile.log"), staged.join("compile.log"))
                .map_err(|e| SandboxError::Failure(e.to_string()))?;
            if fs::rename(&staged, &dir).is_err() && !bin.is_file() {
                return Err(SandboxError::Failure(format!("cannot publish {}", dir.display())));
            }
            artifact_for(bin, spec, log, hash)
        }
        Err(SandboxError::CompileError(log)) => {
            let _ = fs::write(&failed, &log);
            Err(SandboxError::CompileError(log))
        }
        Err(e) => Err(e),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn result(exit: ExitStatus, cpu: u64, mem: f64) -> ExecutionResult {
        ExecutionResult {
            exit,
            cpu_time_ms: cpu,
            wall_time_ms: cpu,
            peak_memory_mib: mem,
            stdout: vec![],
            stderr: vec![],
            truncated: false,
            wall_killed: false,
        }
    }

    #[test]
    fn classification_table() {
        let limits = ResourceLimits::new(1000, 256).unwrap();
        let sigabrt = ExitStatus::Signaled(libc::SIGABRT);
        let cases = [
            (result(ExitStatus::Code(0), 1500, 10.0), RunStatus::Tle),
            (result(sigabrt, 10, 10.0), RunStatus::Re),
            (result(ExitStatus::Code(0), 1500, 300.0), RunStatus::Tle),
            (result(ExitStatus::Code(0), 10, 300.0), RunStatus::Mle),
            (result(sigabrt, 10, 300.0), RunStatus::Mle),
            (result(ExitStatus::Code(3), 10, 10.0), RunStatus::Re),
            (result(ExitStatus::Code(0), 1000, 256.0), RunStatus::Ok),
        ];
        for (r, want) in cases {
            assert_eq!(classify_run(&r, &limits), want, "{r:?}");
        }
    }

    #[test]
    fn wall_kill_is_tle_even_without_cpu() {
        let limits = ResourceLimits::new(100, 64).unwrap();
        let mut r = result(ExitStatus::Signaled(9), 0, 1.0);
        r.wall_killed = true;
        assert_eq!(classify_run(&r, &limits), RunStatus::Tle);
    }
}
