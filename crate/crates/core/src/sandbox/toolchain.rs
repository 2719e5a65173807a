use std::collections::BTreeMap;
use std::path::Path;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::SandboxError;

/// How to build and run one language configuration.
///
/// `compile_template` must contain `{src}` and `{out}` exactly once each;
/// `run_template` must contain `{bin}`. Templates are split into argv on
/// whitespace (double quotes group), never handed to a shell.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ToolchainSpec {
    pub id: String,
    pub compile_template: String,
    pub run_template: String,
    pub source_extension: String,
    /// Stack rlimit applied to every run of binaries built with this toolchain.
    #[serde(default)]
    pub stack_mib: Option<u64>,
    /// The judge-side flag set this configuration stands in for; recorded in run logs.
    #[serde(default)]
    pub reference_flags: String,
}

/// Stack size the reference judge grants via `-Wl,--stack=268435456`.
pub const REFERENCE_STACK_MIB: u64 = 256;

impl ToolchainSpec {
    pub fn validate(&self) -> Result<(), SandboxError> {
        let bad = |why: &str| SandboxError::InvalidToolchain { id: self.id.clone(), reason: why.to_string() };
        if self.id.is_empty() {
            return Err(bad("empty id"));
        }
        if self.compile_template.matches("{src}").count() != 1 {
            return Err(bad("compile_template must contain {src} exactly once"));
        }
        if self.compile_template.matches("{out}").count() != 1 {
            return Err(bad("compile_template must contain {out} exactly once"));
        }
        if !self.run_template.contains("{bin}") {
            return Err(bad("run_template must contain {bin}"));
        }
        Ok(())
    }

    /// The four GNU C++ configurations of the reference judge, translated for a
    /// Linux host: the Windows `--stack` linker flag becomes a stack rlimit and
    /// the 32-bit targets build natively.
    pub fn defaults() -> Vec<ToolchainSpec> {
        let gnu = |id: &str, host: &str, reference: &str| ToolchainSpec {
            id: id.to_string(),
            compile_template: format!("g++ {host} {{src}} -o {{out}}"),
            run_template: "{bin}".into(),
            source_extension: "cpp".into(),
            stack_mib: Some(REFERENCE_STACK_MIB),
            reference_flags: reference.to_string(),
        };
        vec![
            gnu(
                "gpp14",
                "-static -DONLINE_JUDGE -O2 -std=c++14",
                "-static -DONLINE_JUDGE -Wl,--stack=268435456 -O2 -std=c++14",
            ),
            gnu(
                "gpp17",
                "-static -DONLINE_JUDGE -O2 -std=c++17",
                "-static -DONLINE_JUDGE -Wl,--stack=268435456 -O2 -std=c++17",
            ),
            gnu(
                "gpp20",
                "-Wall -Wextra -Wconversion -static -DONLINE_JUDGE -O2 -std=c++20",
                "-Wall -Wextra -Wconversion -static -DONLINE_JUDGE -Wl,--stack=268435456 -O2 -std=c++20",
            ),
            gnu(
                "gpp23",
                "-Wall -Wextra -Wconversion -static -DONLINE_JUDGE -O2 -std=c++23 -lstdc++exp",
                "-Wall -Wextra -Wconversion -static -DONLINE_JUDGE -Wl,--stack=268435456 -O2 -std=c++23 -lstdc++exp",
            ),
        ]
    }

    pub fn compile_argv(&self, src: &Path, out: &Path) -> Vec<String> {
        split_template(&self.compile_template)
            .into_iter()
            .map(|tok| tok.replace("{src}", &src.to_string_lossy()).replace("{out}", &out.to_string_lossy()))
            .collect()
    }

    pub fn run_argv(&self, bin: &Path) -> Vec<String> {
        split_template(&self.run_template)
            .into_iter()
            .map(|tok| tok.replace("{bin}", &bin.to_string_lossy()))
            .collect()
    }
}

pub(crate) fn split_template(template: &str) -> Vec<String> {
    let mut out = Vec::new();
    let mut cur = String::new();
    let mut quoted = false;
    let mut has_token = false;
    for c in template.chars() {
        match c {
            '"' => {
                quoted = !quoted;
                has_token = true;
            }
            c if c.is_whitespace() && !quoted => {
                if has_token {
                    out.push(std::mem::take(&mut cur));
                    has_token = false;
                }
            }
            c => {
                cur.push(c);
                has_token = true;
            }
        }
    }
    if has_token {
        out.push(cur);
    }
    out
}

/// Toolchains that passed the startup probe. Read-only after construction.
#[derive(Debug, Clone)]
pub struct Toolchains {
    available: Arc<BTreeMap<String, ToolchainSpec>>,
    unavailable: Arc<BTreeMap<String, String>>,
}

impl Toolchains {
    pub(crate) fn from_parts(available: BTreeMap<String, ToolchainSpec>, unavailable: BTreeMap<String, String>) -> Self {
        Self { available: Arc::new(available), unavailable: Arc::new(unavailable) }
    }

    pub fn get(&self, id: &str) -> Result<&ToolchainSpec, SandboxError> {
        self.available.get(id).ok_or_else(|| SandboxError::ToolchainUnavailable {
            id: id.to_string(),
            reason: self.unavailable.get(id).cloned().unwrap_or_else(|| "not configured".into()),
        })
    }

    pub fn is_available(&self, id: &str) -> bool {
        self.available.contains_key(id)
    }

    pub fn available_ids(&self) -> Vec<String> {
        self.available.keys().cloned().collect()
    }

    pub fn unavailable(&self) -> &BTreeMap<String, String> {
        &self.unavailable
    }
}
