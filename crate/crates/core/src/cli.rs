//! Command-line front end: workspace configuration, provider selection, run
//! directories and run records.
//!
//! Every command runs inside `<workspace>/runs/NNNN-<command>/`, which holds
//! the artifacts it produced plus a `record.json` listing them.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::Mutex;

use clap::{Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::analyst::{behavioral_probe, build_hack_plan, AnalystError, HackPlan, MAX_PROBES, PROBE_TIME_DIVISOR};
use crate::antihash::{detect_hash_spec, find_collision, looks_like_hashing, spec_from_json, AntihashConfig};
use crate::calibration::{self, refine_checker, refine_validator, CalibrationConfig, CalibrationError, CalibrationLog, Flaw};
use crate::genforge::{augment_suite, cascade_hack, persist_hack, CampaignConfig, CascadeResult};
use crate::judge::{HackAttempt, Judge};
use crate::metrics::{compute_classification, compute_hsr, compute_vpr, Counts, LabeledOutcome, MetricsReport, Rate};
use crate::model::{
    load_package_with_toolchains, save_package, CheckerSpec, ProblemPackage, TestCase, ToolSource, VerdictKind,
    DEFAULT_TOOL_TOOLCHAIN,
};
use crate::provider::{
    save_transcript, Provider, ProviderError, ProviderRequest, ProviderResponse, RecordingProvider, RemoteProvider,
    RemoteProviderConfig, ScriptedProvider,
};
use crate::sandbox::{default_root, Sandbox, ToolchainSpec, WORKDIR_ENV};
use crate::util::timestamp_now;

pub const CONFIG_FILE: &str = "hackforge.json";
pub const LOCK_FILE: &str = ".hackforge.lock";
pub const RECORD_FILE: &str = "record.json";
pub const REPORT_FILE: &str = "report.json";
pub const RUNS_DIR: &str = "runs";

#[derive(Debug, Parser)]
#[command(name = "hackforge", version, about = "Adversarial judging toolkit for competitive programming problems")]
pub struct Cli {
    /// Workspace root holding hackforge.json and runs/ (default: $HACKFORGE_WORKDIR, then the current directory).
    #[arg(long, global = true)]
    pub workspace: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Refine the package's validator and/or checker.
    Calibrate {
        package: PathBuf,
        #[arg(long, value_enum, default_value_t = ToolChoice::All)]
        tool: ToolChoice,
        #[arg(long, value_parser = parse_provider)]
        provider: Option<ProviderChoice>,
    },
    /// Run the hack cascade against target submissions.
    Hack {
        package: PathBuf,
        #[arg(long)]
        target: Option<String>,
        /// `scripted:FILE` or `remote`.
        #[arg(long, value_parser = parse_provider)]
        provider: Option<ProviderChoice>,
        /// Provider turns per target.
        #[arg(short = 'T', long = "trials")]
        trials: Option<u32>,
    },
    /// Judge one submission on a suite.
    Judge {
        package: PathBuf,
        #[arg(long)]
        submission: String,
        #[arg(long, value_enum, default_value_t = SuiteChoice::Local)]
        suite: SuiteChoice,
    },
    /// TPR, TNR, VPR and hack success rate for a package.
    Metrics {
        package: PathBuf,
        #[arg(long, value_enum, default_value_t = SuiteChoice::Local)]
        suite: SuiteChoice,
        /// Validator used for VPR (default: the package's).
        #[arg(long)]
        validator: Option<PathBuf>,
        /// Hack run directories (default: every hack run of this package).
        #[arg(long)]
        hacks: Vec<PathBuf>,
    },
    /// Find two colliding strings for a rolling hash given as JSON.
    Antihash {
        #[arg(long)]
        spec: PathBuf,
    },
    /// Filter the local suite and append successful hacks.
    Augment {
        package: PathBuf,
        /// Refined validator source (default: the package's).
        #[arg(long)]
        validator: Option<PathBuf>,
        /// Hack run directories (default: every hack run of this package).
        #[arg(long)]
        hacks: Vec<PathBuf>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ToolChoice {
    Validator,
    Checker,
    All,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SuiteChoice {
    Local,
    Augmented,
    Official,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ProviderChoice {
    Scripted(PathBuf),
    Remote,
}

fn parse_provider(text: &str) -> Result<ProviderChoice, String> {
    match text.split_once(':') {
        Some(("scripted", file)) if !file.is_empty() => Ok(ProviderChoice::Scripted(file.into())),
        None if text == "remote" => Ok(ProviderChoice::Remote),
        _ => Err(format!("expected `scripted:FILE` or `remote`, got `{text}`")),
    }
}

// ---------------------------------------------------------------------------
// configuration

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct LimitOverrides {
    pub time_limit_ms: Option<u64>,
    pub memory_limit_mib: Option<u64>,
    pub wall_clock_multiplier: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum ProviderConfig {
    Scripted {
        #[serde(default)]
        transcript: Option<PathBuf>,
    },
    Remote(RemoteProviderConfig),
}

impl Default for ProviderConfig {
    fn default() -> Self {
        ProviderConfig::Scripted { transcript: None }
    }
}

/// Contents of `hackforge.json`. The top-level seed overrides `antihash.seed`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Config {
    pub toolchains: Option<Vec<ToolchainSpec>>,
    pub limits: LimitOverrides,
    pub provider: ProviderConfig,
    pub seed: u64,
    #[serde(rename = "K")]
    pub k: u32,
    pub max_iter: u32,
    pub small_scale_bound: usize,
    #[serde(rename = "trial_budget_T")]
    pub trial_budget_t: u32,
    pub stress_iterations: u32,
    pub dedup: bool,
    pub antihash: AntihashConfig,
}

impl Default for Config {
    fn default() -> Self {
        let cal = CalibrationConfig::default();
        let camp = CampaignConfig::default();
        Config {
            toolchains: None,
            limits: LimitOverrides::default(),
            provider: ProviderConfig::default(),
            seed: 0,
            k: cal.k,
            max_iter: cal.max_iter,
            small_scale_bound: cal.small_scale_bound,
            trial_budget_t: camp.trial_budget_t,
            stress_iterations: camp.stress_iterations,
            dedup: camp.dedup,
            antihash: AntihashConfig::default(),
        }
    }
}

impl Config {
    /// Reads `hackforge.json` from the workspace, or defaults when absent.
    pub fn load(workspace: &Path) -> Result<Config, CliError> {
        let path = workspace.join(CONFIG_FILE);
        if !path.exists() {
            return Ok(Config::default());
        }
        let text = fs::read_to_string(&path).map_err(|e| CliError::Domain(format!("{}: {e}", path.display())))?;
        let cfg: Config =
            serde_json::from_str(&text).map_err(|e| CliError::Domain(format!("{}: {e}", path.display())))?;
        cfg.check()?;
        Ok(cfg)
    }

    fn check(&self) -> Result<(), CliError> {
        if self.k == 0 || self.max_iter == 0 {
            return Err(CliError::Domain("K and max_iter must be positive".into()));
        }
        Ok(())
    }

    pub fn calibration(&self) -> CalibrationConfig {
        CalibrationConfig { k: self.k, max_iter: self.max_iter, small_scale_bound: self.small_scale_bound }
    }

    pub fn campaign(&self) -> CampaignConfig {
        CampaignConfig {
            trial_budget_t: self.trial_budget_t,
            stress_iterations: self.stress_iterations,
            dedup: self.dedup,
            seed: self.seed,
        }
    }

    pub fn antihash_config(&self) -> AntihashConfig {
        AntihashConfig { seed: self.seed, ..self.antihash.clone() }
    }

    pub fn toolchain_specs(&self) -> Vec<ToolchainSpec> {
        self.toolchains.clone().unwrap_or_else(ToolchainSpec::defaults)
    }
}

// ---------------------------------------------------------------------------
// errors

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Domain(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Domain(_) => 1,
        }
    }
}

macro_rules! domain_from {
    ($($t:ty),*) => {$(
        impl From<$t> for CliError {
            fn from(e: $t) -> Self {
                CliError::Domain(e.to_string())
            }
        }
    )*};
}

domain_from!(
    std::io::Error,
    serde_json::Error,
    crate::model::PackageError,
    crate::sandbox::SandboxError,
    crate::judge::JudgeError,
    ProviderError,
    CalibrationError,
    AnalystError,
    crate::genforge::GenError,
    crate::antihash::AntihashError,
    crate::metrics::MetricsError
);

// ---------------------------------------------------------------------------
// workspace, lock and records

/// Exclusive claim on a workspace; released on drop.
pub struct WorkspaceLock(PathBuf);

impl WorkspaceLock {
    pub fn acquire(workspace: &Path) -> Result<WorkspaceLock, CliError> {
        let path = workspace.join(LOCK_FILE);
        match fs::OpenOptions::new().write(true).create_new(true).open(&path) {
            Ok(mut f) => {
                let _ = writeln!(f, "{}", std::process::id());
                Ok(WorkspaceLock(path))
            }
            Err(e) if e.kind() == std::io::ErrorKind::AlreadyExists => {
                let holder = fs::read_to_string(&path).unwrap_or_default();
                Err(CliError::Domain(format!(
                    "workspace is locked by process {}; remove {} if it is stale",
                    holder.trim(),
                    path.display()
                )))
            }
            Err(e) => Err(CliError::Domain(format!("cannot create {}: {e}", path.display()))),
        }
    }
}

impl Drop for WorkspaceLock {
    fn drop(&mut self) {
        let _ = fs::remove_file(&self.0);
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub command: String,
    pub args: Vec<String>,
    pub package_id: Option<String>,
    pub config: Config,
    /// SHA-256 of every program source involved, keyed by role.
    pub tool_hashes: BTreeMap<String, String>,
    /// Toolchain id to the judge flag set it stands in for.
    pub toolchains: BTreeMap<String, String>,
    /// Transcript a scripted replay of this run needs.
    pub transcript: Option<String>,
    /// Files of the run directory, relative to it.
    pub outputs: Vec<String>,
    pub exit_code: i32,
    pub error: Option<String>,
    pub started_at: String,
    pub finished_at: String,
}

struct Run {
    dir: PathBuf,
    record: RunRecord,
}

impl Run {
    fn create(workspace: &Path, command: &str, args: Vec<String>, config: &Config) -> Result<Run, CliError> {
        let runs = workspace.join(RUNS_DIR);
        fs::create_dir_all(&runs)?;
        let next = fs::read_dir(&runs)?
            .filter_map(|e| e.ok()?.file_name().to_str()?.get(..4)?.parse::<u32>().ok())
            .max()
            .map_or(1, |n| n + 1);
        let dir = runs.join(format!("{next:04}-{command}"));
        fs::create_dir_all(&dir)?;
        let toolchains =
            config.toolchain_specs().into_iter().map(|t| (t.id.clone(), t.reference_flags.clone())).collect();
        let record = RunRecord {
            command: command.to_string(),
            args,
            package_id: None,
            config: config.clone(),
            tool_hashes: BTreeMap::new(),
            toolchains,
            transcript: None,
            outputs: Vec::new(),
            exit_code: 0,
            error: None,
            started_at: timestamp_now(),
            finished_at: String::new(),
        };
        Ok(Run { dir, record })
    }

    fn package(&mut self, pkg: &ProblemPackage) {
        self.record.package_id = Some(pkg.id.clone());
        let h = &mut self.record.tool_hashes;
        h.insert("std".into(), sha256(&pkg.std_solution.source));
        if let Some(v) = &pkg.validator {
            h.insert("validator".into(), sha256(&v.source));
        }
        if let CheckerSpec::Custom(c) = &pkg.checker {
            h.insert("checker".into(), sha256(&c.source));
        }
        for s in &pkg.submissions {
            h.insert(format!("submission:{}", s.id), sha256(&s.source));
        }
        if let Some((g, _)) = &pkg.stress_generator {
            h.insert("stress_generator".into(), sha256(&g.source));
        }
    }

    fn write_json(&self, rel: &str, value: &impl Serialize) -> Result<(), CliError> {
        let path = self.dir.join(rel);
        if let Some(parent) = path.parent() {
            fs::create_dir_all(parent)?;
        }
        fs::write(path, serde_json::to_string_pretty(value)? + "\n")?;
        Ok(())
    }

    fn finish(mut self, result: &Result<(), CliError>) -> Result<(), CliError> {
        if let Err(e) = result {
            self.record.exit_code = e.exit_code();
            self.record.error = Some(e.to_string());
        }
        let mut outputs = Vec::new();
        collect_files(&self.dir, &self.dir, &mut outputs)?;
        outputs.retain(|p| p != RECORD_FILE);
        outputs.sort();
        self.record.outputs = outputs;
        self.record.finished_at = timestamp_now();
        self.write_json(RECORD_FILE, &self.record)
    }
}

fn collect_files(base: &Path, dir: &Path, out: &mut Vec<String>) -> std::io::Result<()> {
    for entry in fs::read_dir(dir)? {
        let path = entry?.path();
        if path.is_dir() {
            collect_files(base, &path, out)?;
        } else if let Ok(rel) = path.strip_prefix(base) {
            out.push(rel.to_string_lossy().replace('\\', "/"));
        }
    }
    Ok(())
}

fn sha256(text: &str) -> String {
    hex::encode(Sha256::digest(text.as_bytes()))
}

/// Run records of earlier runs in the workspace, oldest first.
pub fn list_runs(workspace: &Path) -> Vec<(PathBuf, RunRecord)> {
    let Ok(entries) = fs::read_dir(workspace.join(RUNS_DIR)) else { return Vec::new() };
    let mut dirs: Vec<PathBuf> = entries.filter_map(|e| Some(e.ok()?.path())).filter(|p| p.is_dir()).collect();
    dirs.sort();
    dirs.into_iter()
        .filter_map(|d| {
            let text = fs::read_to_string(d.join(RECORD_FILE)).ok()?;
            let record = serde_json::from_str(&text).ok()?;
            Some((d, record))
        })
        .collect()
}

// ---------------------------------------------------------------------------
// providers

enum Session {
    Scripted(ScriptedProvider),
    Remote(RecordingProvider<RemoteProvider>),
}

impl Provider for Session {
    fn respond(&mut self, req: &ProviderRequest) -> Result<ProviderResponse, ProviderError> {
        match self {
            Session::Scripted(p) => p.respond(req),
            Session::Remote(p) => p.respond(req),
        }
    }
}

/// Lets several roles borrow one session.
struct Handle<'a>(&'a Mutex<Session>);

impl Provider for Handle<'_> {
    fn respond(&mut self, req: &ProviderRequest) -> Result<ProviderResponse, ProviderError> {
        self.0.lock().expect("provider session").respond(req)
    }
}

fn open_session(choice: Option<&ProviderChoice>, cfg: &Config, workspace: &Path, run: &mut Run) -> Result<Session, CliError> {
    let scripted = |path: &Path, run: &mut Run| -> Result<Session, CliError> {
        run.record.transcript = Some(path.display().to_string());
        Ok(Session::Scripted(ScriptedProvider::from_file(path)?))
    };
    match (choice, &cfg.provider) {
        (Some(ProviderChoice::Scripted(path)), _) => scripted(path, run),
        (Some(ProviderChoice::Remote), ProviderConfig::Remote(remote)) | (None, ProviderConfig::Remote(remote)) => {
            run.record.transcript = Some("transcript.json".into());
            Ok(Session::Remote(RecordingProvider::new(RemoteProvider::new(remote.clone())?)))
        }
        (Some(ProviderChoice::Remote), _) => {
            Err(CliError::Domain(format!("`remote` needs a provider of kind \"remote\" in {CONFIG_FILE}")))
        }
        (None, ProviderConfig::Scripted { transcript: Some(path) }) => scripted(&workspace.join(path), run),
        (None, ProviderConfig::Scripted { transcript: None }) => Ok(Session::Scripted(ScriptedProvider::new(Vec::new()))),
    }
}

fn close_session(session: Mutex<Session>, run: &Run) -> Result<(), CliError> {
    if let Session::Remote(rec) = session.into_inner().expect("provider session") {
        save_transcript(rec.transcript(), run.dir.join("transcript.json"))?;
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// entry points

/// Parses `argv` (program name first) and runs the command, writing the
/// human-readable summary to `out`. Returns the process exit code.
pub fn run<I, T>(argv: I, out: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let argv: Vec<OsString> = argv.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let args = argv.iter().skip(1).map(|a| a.to_string_lossy().into_owned()).collect();
    match execute(cli, args, out) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn workspace_root(cli: &Cli) -> PathBuf {
    cli.workspace
        .clone()
        .or_else(|| std::env::var_os(WORKDIR_ENV).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("."))
}

fn command_name(cmd: &Command) -> &'static str {
    match cmd {
        Command::Calibrate { .. } => "calibrate",
        Command::Hack { .. } => "hack",
        Command::Judge { .. } => "judge",
        Command::Metrics { .. } => "metrics",
        Command::Antihash { .. } => "antihash",
        Command::Augment { .. } => "augment",
    }
}

fn execute(cli: Cli, args: Vec<String>, out: &mut dyn Write) -> Result<(), CliError> {
    let workspace = workspace_root(&cli);
    fs::create_dir_all(&workspace)?;
    let config = Config::load(&workspace)?;
    let _lock = WorkspaceLock::acquire(&workspace)?;
    let mut run = Run::create(&workspace, command_name(&cli.command), args, &config)?;
    let ctx = Ctx { workspace: &workspace, config: &config };
    let result = ctx.dispatch(&cli.command, &mut run, out);
    run.finish(&result)?;
    result
}

struct Ctx<'a> {
    workspace: &'a Path,
    config: &'a Config,
}

impl Ctx<'_> {
    fn dispatch(&self, cmd: &Command, run: &mut Run, out: &mut dyn Write) -> Result<(), CliError> {
        match cmd {
            Command::Calibrate { package, tool, provider } => self.calibrate(package, *tool, provider.as_ref(), run, out),
            Command::Hack { package, target, provider, trials } => {
                self.hack(package, target.as_deref(), provider.as_ref(), *trials, run, out)
            }
            Command::Judge { package, submission, suite } => self.judge(package, submission, *suite, run, out),
            Command::Metrics { package, suite, validator, hacks } => {
                self.metrics(package, *suite, validator.as_deref(), hacks, run, out)
            }
            Command::Antihash { spec } => self.antihash(spec, run, out),
            Command::Augment { package, validator, hacks } => self.augment(package, validator.as_deref(), hacks, run, out),
        }
    }

    fn sandbox(&self) -> Result<Sandbox, CliError> {
        Ok(Sandbox::new(default_root(), self.config.toolchain_specs())?)
    }

    fn load(&self, path: &Path, run: &mut Run) -> Result<ProblemPackage, CliError> {
        let ids: Vec<String> = self.config.toolchain_specs().into_iter().map(|t| t.id).collect();
        let mut pkg = load_package_with_toolchains(path, &ids)?;
        let o = &self.config.limits;
        if let Some(t) = o.time_limit_ms {
            pkg.limits.time_limit_ms = t;
        }
        if let Some(m) = o.memory_limit_mib {
            pkg.limits.memory_limit_mib = m;
        }
        if let Some(w) = o.wall_clock_multiplier {
            pkg.limits.wall_clock_multiplier = w;
        }
        pkg.limits.validate()?;
        run.package(&pkg);
        Ok(pkg)
    }

    fn calibrate(
        &self,
        path: &Path,
        tool: ToolChoice,
        choice: Option<&ProviderChoice>,
        run: &mut Run,
        out: &mut dyn Write,
    ) -> Result<(), CliError> {
        let sb = self.sandbox()?;
        let mut pkg = self.load(path, run)?;
        let session = Mutex::new(open_session(choice, self.config, self.workspace, run)?);
        let cfg = self.config.calibration();
        let mut logs: BTreeMap<&str, Option<CalibrationLog>> = BTreeMap::new();
        let result = (|| -> Result<(), CliError> {
            if tool != ToolChoice::Checker {
                let outcome = refine_validator(&sb, &pkg, &mut Handle(&session), &cfg);
                if let Some((refined, log)) = settle("validator", outcome, out)? {
                    calibration::persist(&run.dir, &refined, &log)?;
                    pkg.validator = Some(refined);
                    logs.insert("validator", Some(log));
                } else {
                    logs.insert("validator", None);
                }
            }
            if tool != ToolChoice::Validator {
                let outcome = refine_checker(&sb, &pkg, &mut Handle(&session), &mut Handle(&session), &cfg);
                if let Some((refined, log)) = settle("checker", outcome, out)? {
                    calibration::persist(&run.dir, &refined, &log)?;
                    pkg.checker = CheckerSpec::Custom(refined);
                    logs.insert("checker", Some(log));
                } else {
                    logs.insert("checker", None);
                }
            }
            Ok(())
        })();
        close_session(session, run)?;
        result?;
        save_package(&pkg, run.dir.join("package"))?;
        let summary: BTreeMap<&str, serde_json::Value> = logs
            .into_iter()
            .map(|(name, log)| {
                let v = match log {
                    None => serde_json::Value::Null,
                    Some(l) => serde_json::json!({
                        "terminated_by": l.terminated_by,
                        "iterations": l.iterations.len(),
                        "flaws_fixed": flaws_fixed(&l),
                        "final_tool_hash": l.final_tool_hash,
                    }),
                };
                (name, v)
            })
            .collect();
        run.write_json(REPORT_FILE, &summary)?;
        writeln!(out, "calibrated package: {}", run.dir.join("package").display())?;
        Ok(())
    }

    fn hack(
        &self,
        path: &Path,
        target: Option<&str>,
        choice: Option<&ProviderChoice>,
        trials: Option<u32>,
        run: &mut Run,
        out: &mut dyn Write,
    ) -> Result<(), CliError> {
        let sb = self.sandbox()?;
        let pkg = self.load(path, run)?;
        let judge = Judge::new(&sb, &pkg);
        let targets = match target {
            Some(id) => vec![pkg
                .submission(id)
                .cloned()
                .ok_or_else(|| CliError::Domain(format!("no submission `{id}` in {}", pkg.id)))?],
            None => judge.identify_targets()?,
        };
        let session = Mutex::new(open_session(choice, self.config, self.workspace, run)?);
        let mut campaign = self.config.campaign();
        if let Some(t) = trials {
            campaign.trial_budget_t = t;
        }
        let antihash_cfg = self.config.antihash_config();
        let mut reports = Vec::new();
        let result = (|| -> Result<(), CliError> {
            for t in &targets {
                let report = hack_one(&judge, t, &mut Handle(&session), &campaign, &antihash_cfg)?;
                for a in report.result.attempts.iter().filter(|a| a.success) {
                    persist_hack(&run.dir, a)?;
                }
                let r = &report.result;
                match r.winning_attempt() {
                    Some(a) => writeln!(
                        out,
                        "{}: hacked at {:?} stage after {} provider turn(s), target verdict {}",
                        r.target_id,
                        r.winning_stage,
                        r.turns_used,
                        a.target_verdict.as_ref().map_or_else(String::new, |v| v.kind().to_string())
                    )?,
                    None => writeln!(out, "{}: no successful hack ({} attempts)", r.target_id, r.attempts.len())?,
                }
                reports.push(report);
            }
            Ok(())
        })();
        close_session(session, run)?;
        result?;
        let results: Vec<CascadeResult> = reports.iter().map(|r| r.result.clone()).collect();
        let (hsr, avg_turns) = compute_hsr(&results);
        writeln!(out, "HSR {hsr}  average turns {avg_turns}")?;
        run.write_json(
            REPORT_FILE,
            &serde_json::json!({"package": pkg.id, "targets": reports, "hsr": hsr, "avg_turns": avg_turns}),
        )?;
        Ok(())
    }

    fn judge(&self, path: &Path, id: &str, suite: SuiteChoice, run: &mut Run, out: &mut dyn Write) -> Result<(), CliError> {
        let sb = self.sandbox()?;
        let pkg = self.load(path, run)?;
        let sub = pkg.submission(id).ok_or_else(|| CliError::Domain(format!("no submission `{id}` in {}", pkg.id)))?;
        let tests = pick_suite(&pkg, suite)?;
        let outcome = Judge::new(&sb, &pkg).judge_submission(sub, tests);
        if outcome.verdict.kind() == VerdictKind::JudgeFail {
            return Err(CliError::Domain(format!("JUDGE_FAIL: {}", outcome.verdict.detail())));
        }
        writeln!(out, "{id}: {}", outcome.verdict)?;
        if !outcome.verdict.detail().is_empty() {
            writeln!(out, "  {}", outcome.verdict.detail())?;
        }
        run.write_json(
            REPORT_FILE,
            &serde_json::json!({
                "submission": id,
                "suite": format!("{suite:?}").to_lowercase(),
                "suite_size": tests.len(),
                "tests_run": outcome.per_test.len(),
                "verdict": outcome.verdict,
            }),
        )?;
        Ok(())
    }

    fn metrics(
        &self,
        path: &Path,
        suite: SuiteChoice,
        validator: Option<&Path>,
        hacks: &[PathBuf],
        run: &mut Run,
        out: &mut dyn Write,
    ) -> Result<(), CliError> {
        let sb = self.sandbox()?;
        let pkg = self.load(path, run)?;
        let tests = pick_suite(&pkg, suite)?;
        let tool = match validator {
            Some(p) => Some(read_tool(p)?),
            None => pkg.validator.clone(),
        };
        let judge = Judge::new(&sb, &pkg).with_validator(tool.clone());
        let outcomes: Vec<LabeledOutcome> = pkg
            .submissions
            .iter()
            .filter_map(|s| {
                Some(LabeledOutcome {
                    submission_id: s.id.clone(),
                    ground_truth: s.ground_truth?,
                    new_verdict: judge.judge_submission(s, tests).verdict,
                })
            })
            .collect();
        if let Some(o) = outcomes.iter().find(|o| o.new_verdict.kind() == VerdictKind::JudgeFail) {
            return Err(CliError::Domain(format!("JUDGE_FAIL on {}: {}", o.submission_id, o.new_verdict.detail())));
        }
        let (tpr, tnr, counts) = compute_classification(&outcomes);
        let vpr = match judge.validator_artifact()? {
            Some(art) => Rate::Defined(compute_vpr(&sb, tests, &art)?),
            None => Rate::Undefined,
        };
        let results: Vec<CascadeResult> = self
            .hack_runs(&pkg.id, hacks)?
            .into_iter()
            .flat_map(|dir| read_hack_report(&dir).unwrap_or_default())
            .collect();
        let (hsr, avg_turns) = compute_hsr(&results);
        let report = MetricsReport {
            tpr,
            tnr,
            vpr,
            hsr,
            avg_turns,
            counts: Counts { tests: tests.len() as u64, targets: results.len() as u64, ..counts },
        };
        for (name, rate) in [("TPR", tpr), ("TNR", tnr), ("VPR", vpr), ("HSR", hsr), ("avg turns", avg_turns)] {
            match rate.ratio() {
                Some(r) => writeln!(out, "{name}: {rate} ({r})")?,
                None => writeln!(out, "{name}: {rate}")?,
            }
        }
        let c = report.counts;
        writeln!(out, "positives {}, negatives {}, tests {}, targets {}", c.positives, c.negatives, c.tests, c.targets)?;
        run.write_json(REPORT_FILE, &report)?;
        Ok(())
    }

    fn antihash(&self, spec_path: &Path, run: &mut Run, out: &mut dyn Write) -> Result<(), CliError> {
        let text = fs::read_to_string(spec_path)
            .map_err(|e| CliError::Domain(format!("{}: {e}", spec_path.display())))?;
        let spec = spec_from_json(&serde_json::from_str(&text)?)?;
        run.record.tool_hashes.insert("spec".into(), sha256(&text));
        let pair = find_collision(&spec, &self.config.antihash_config())?;
        writeln!(out, "{}", pair.a)?;
        writeln!(out, "{}", pair.b)?;
        run.write_json(REPORT_FILE, &pair)?;
        Ok(())
    }

    fn augment(
        &self,
        path: &Path,
        validator: Option<&Path>,
        hacks: &[PathBuf],
        run: &mut Run,
        out: &mut dyn Write,
    ) -> Result<(), CliError> {
        let sb = self.sandbox()?;
        let pkg = self.load(path, run)?;
        let tool = match validator {
            Some(p) => Some(read_tool(p)?),
            None => pkg.validator.clone(),
        };
        if let Some(t) = &tool {
            run.record.tool_hashes.insert("refined_validator".into(), sha256(&t.source));
        }
        let mut attempts = Vec::new();
        for dir in self.hack_runs(&pkg.id, hacks)? {
            attempts.extend(read_hack_attempts(&dir)?);
        }
        let judge = Judge::new(&sb, &pkg).with_validator(tool);
        let (augmented, report) = augment_suite(&judge, &attempts, self.config.dedup)?;
        let dest = run.dir.join("package");
        save_package(&augmented, &dest)?;
        writeln!(
            out,
            "augmented suite: {} tests ({} dropped as invalid, {} hacks added, {} duplicates)",
            augmented.local_suite.len(),
            report.dropped.len(),
            report.added,
            report.duplicates
        )?;
        writeln!(out, "augmented package: {}", dest.display())?;
        run.write_json(REPORT_FILE, &report)?;
        Ok(())
    }

    /// Explicit hack run directories, or every finished hack run of `pkg_id`.
    fn hack_runs(&self, pkg_id: &str, explicit: &[PathBuf]) -> Result<Vec<PathBuf>, CliError> {
        if !explicit.is_empty() {
            return Ok(explicit.to_vec());
        }
        Ok(list_runs(self.workspace)
            .into_iter()
            .filter(|(_, r)| r.command == "hack" && r.exit_code == 0 && r.package_id.as_deref() == Some(pkg_id))
            .map(|(d, _)| d)
            .collect())
    }
}

fn flaws_fixed(log: &CalibrationLog) -> usize {
    log.classified().filter(|(_, r)| r.flaw != Flaw::None).count()
}

fn settle(
    name: &str,
    outcome: Result<(ToolSource, CalibrationLog), CalibrationError>,
    out: &mut dyn Write,
) -> Result<Option<(ToolSource, CalibrationLog)>, CliError> {
    match outcome {
        Ok((tool, log)) => {
            writeln!(
                out,
                "{name}: {:?} after {} iteration(s), {} flaw(s) fixed",
                log.terminated_by,
                log.iterations.len(),
                flaws_fixed(&log)
            )?;
            Ok(Some((tool, log)))
        }
        Err(CalibrationError::NotApplicable(why)) => {
            writeln!(out, "{name}: skipped ({why})")?;
            Ok(None)
        }
        Err(e) => Err(e.into()),
    }
}

#[derive(Debug, Serialize)]
struct TargetReport {
    plan: Option<HackPlan>,
    notes: Vec<String>,
    result: CascadeResult,
}

fn hack_one(
    judge: &Judge,
    target: &crate::model::Submission,
    provider: &mut dyn Provider,
    campaign: &CampaignConfig,
    antihash_cfg: &AntihashConfig,
) -> Result<TargetReport, CliError> {
    let sb = judge.sandbox();
    let pkg = judge.package();
    let mut notes = Vec::new();
    let mut specs = Vec::new();
    if looks_like_hashing(&target.source) {
        match detect_hash_spec(sb, &target.source, Some(&mut *provider)) {
            Ok((found, n)) => {
                specs = found;
                notes.extend(n);
            }
            Err(e) => notes.push(format!("hash detection: {e}")),
        }
    }
    let bin = sb.compile(&target.source, &target.toolchain_id)?;
    let limits = pkg.limits.with_time_fraction(PROBE_TIME_DIVISOR);
    let mut observations = Vec::new();
    for t in pkg.local_suite.iter().take(MAX_PROBES.min(2)) {
        observations.push(behavioral_probe(sb, &bin, &t.input, &limits)?);
    }
    let plan = match build_hack_plan(sb, pkg, target, Some(&bin), &observations, provider, specs) {
        Ok(p) => Some(p),
        Err(AnalystError::MalformedPlan(why)) => {
            notes.push(format!("no plan: {why}"));
            None
        }
        Err(e) => return Err(e.into()),
    };
    let result = cascade_hack(judge, target, provider, plan.as_ref(), campaign, antihash_cfg)?;
    Ok(TargetReport { plan, notes, result })
}

fn pick_suite(pkg: &ProblemPackage, suite: SuiteChoice) -> Result<&[TestCase], CliError> {
    let missing = |what: &str| CliError::Domain(format!("package {} has no {what} suite", pkg.id));
    match suite {
        SuiteChoice::Local => Ok(&pkg.local_suite),
        SuiteChoice::Augmented => pkg.augmented_suite.as_deref().ok_or_else(|| missing("augmented")),
        SuiteChoice::Official => pkg.official_suite.as_deref().ok_or_else(|| missing("official")),
    }
}

fn read_tool(path: &Path) -> Result<ToolSource, CliError> {
    let source = fs::read_to_string(path).map_err(|e| CliError::Domain(format!("{}: {e}", path.display())))?;
    let name = path.file_name().map_or_else(|| "validator.cpp".into(), |n| n.to_string_lossy().into_owned());
    Ok(ToolSource { source, toolchain_id: DEFAULT_TOOL_TOOLCHAIN.into(), source_path: name })
}

fn read_hack_report(dir: &Path) -> Result<Vec<CascadeResult>, CliError> {
    #[derive(Deserialize)]
    struct Target {
        result: CascadeResult,
    }
    #[derive(Deserialize)]
    struct Report {
        targets: Vec<Target>,
    }
    let text = fs::read_to_string(dir.join(REPORT_FILE))?;
    let report: Report = serde_json::from_str(&text)?;
    Ok(report.targets.into_iter().map(|t| t.result).collect())
}

/// Successful attempts persisted under `dir/hacks/<target>/NNN.json`.
fn read_hack_attempts(dir: &Path) -> Result<Vec<HackAttempt>, CliError> {
    let root = dir.join("hacks");
    let mut files = Vec::new();
    if root.is_dir() {
        collect_files(&root, &root, &mut files)?;
    }
    files.sort();
    let mut attempts = Vec::new();
    for rel in files.iter().filter(|f| f.ends_with(".json")) {
        let text = fs::read_to_string(root.join(rel))?;
        attempts.push(serde_json::from_str(&text)?);
    }
    Ok(attempts)
}
