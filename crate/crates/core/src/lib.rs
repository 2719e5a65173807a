//! Adversarial judging toolkit for competitive-programming problems.
//!
//! The crate covers the whole loop: load a problem package, calibrate its
//! validator and checker against adversarial probes, hunt for inputs that break
//! accepted-but-wrong submissions (provider-guided, stress and anti-hash
//! strategies), fold successful hacks back into the suite, and score suites
//! with TPR/TNR/VPR/HSR.
//!
//! See the `examples/` directory for one runnable program per capability.

pub mod analyst;
pub mod antihash;
pub mod bytes;
pub mod calibration;
pub mod cli;
pub mod genforge;
pub mod judge;
pub mod metrics;
pub mod model;
pub mod provider;
pub mod sandbox;
pub mod util;

pub use model::{
    load_package, partition_by_label, save_package, GroundTruth, ProblemPackage, Provenance, ResourceLimits,
    Submission, TestCase, Verdict, VerdictKind,
};
pub use sandbox::{classify_run, CompiledArtifact, ExecutionResult, RunStatus, Sandbox, SandboxError};
