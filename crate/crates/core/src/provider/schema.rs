//! Per-kind response schemas. Parsing is total: a response either yields the
//! full structured content or a `MalformedResponse` carrying the raw text.

use std::collections::BTreeMap;
use std::sync::OnceLock;

use regex::Regex;
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use super::{ProviderError, ProviderResponse, RequestKind, ResponseContent};

/// Literal test inputs above this size must be emitted as generator programs.
pub const MAX_LITERAL_INPUT: usize = 64 * 1024;

/// A proposed test input: literal bytes, or a program that prints one.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProposedInput {
    Literal(#[serde(with = "crate::bytes")] Vec<u8>),
    Generator(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ValidatorCase {
    pub strategy: String,
    pub bug_type: Option<String>,
    pub input: ProposedInput,
    /// Whether the input satisfies the problem constraints.
    pub expected_valid: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CheckerCase {
    pub strategy: String,
    pub input: ProposedInput,
    /// An output the checker must reject.
    pub wrong_output: Option<String>,
    /// A correct output the checker must accept.
    pub true_output: Option<String>,
    pub reasoning: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "tool", rename_all = "snake_case")]
pub enum AnalysisStep {
    RunTarget { input: String },
    Harmonic { n: u64 },
    Binomial { n: u64, k: u64, bound: String },
    Finish { report: String, target_verdict: Option<String>, strategy: Option<String>, parameters: BTreeMap<String, String> },
}

/// Hash parameters as reported; interpretation happens in the anti-hash module.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct HashSpecCandidate {
    pub bases: Vec<String>,
    pub moduli: Vec<String>,
    pub charset: Option<String>,
    pub mapping: Option<String>,
    pub orientation: Option<String>,
    /// Test input with `{a}` and `{b}` placeholders for a colliding pair.
    pub input_template: Option<String>,
}

pub fn parse_response(kind: RequestKind, raw: &str) -> Result<ProviderResponse, ProviderError> {
    let malformed = |reason: String| ProviderError::MalformedResponse { kind, reason, raw: raw.to_string() };
    let content = match kind {
        RequestKind::ValidatorFix | RequestKind::CheckerFix => {
            let source = extract_source(raw).ok_or_else(|| malformed("no program source found".into()))?;
            if kind == RequestKind::ValidatorFix {
                ResponseContent::ValidatorFix { source }
            } else {
                ResponseContent::CheckerFix { source }
            }
        }
        RequestKind::HackGenerator => {
            let input = match extract_json(raw) {
                Some(Value::Object(obj)) => proposed_input(&obj).map_err(malformed)?,
                _ => ProposedInput::Generator(
                    extract_source(raw).ok_or_else(|| malformed("neither JSON input nor program source".into()))?,
                ),
            };
            ResponseContent::HackGenerator { input }
        }
        _ => {
            let value = extract_json(raw).ok_or_else(|| malformed("no JSON object found".into()))?;
            let obj = value.as_object().ok_or_else(|| malformed("top-level JSON is not an object".into()))?;
            parse_object(kind, obj).map_err(malformed)?
        }
    };
    Ok(ProviderResponse { content, raw: raw.to_string() })
}

fn parse_object(kind: RequestKind, obj: &Map<String, Value>) -> Result<ResponseContent, String> {
    Ok(match kind {
        RequestKind::ValidatorProbe => {
            let cases = test_cases(obj)?.iter().map(validator_case).collect::<Result<Vec<_>, _>>()?;
            ResponseContent::ValidatorProbe { cases }
        }
        RequestKind::CheckerProbe => {
            let cases = test_cases(obj)?.iter().map(checker_case).collect::<Result<Vec<_>, _>>()?;
            ResponseContent::CheckerProbe { cases }
        }
        RequestKind::CodeAnalysis => ResponseContent::CodeAnalysis { step: analysis_step(obj)? },
        RequestKind::HashSpecExtract => ResponseContent::HashSpecExtract { candidates: hash_candidates(obj)? },
        RequestKind::CrossVerify => {
            let approved = match (obj.get("verdict"), obj.get("approved")) {
                (Some(Value::String(v)), _) => match v.to_ascii_lowercase().as_str() {
                    "approve" | "approved" | "accept" | "accepted" | "valid" => true,
                    "reject" | "rejected" | "invalid" => false,
                    other => return Err(format!("unknown verdict `{other}`")),
                },
                (_, Some(Value::Bool(b))) => *b,
                _ => return Err("missing required field `verdict`".into()),
            };
            let reason = opt_str(obj, "reason")?.unwrap_or_default();
            ResponseContent::CrossVerify { approved, reason }
        }
        RequestKind::ValidatorFix | RequestKind::CheckerFix | RequestKind::HackGenerator => unreachable!(),
    })
}

fn test_cases(obj: &Map<String, Value>) -> Result<&Vec<Value>, String> {
    match obj.get("test_cases") {
        Some(Value::Array(a)) if !a.is_empty() => Ok(a),
        Some(Value::Array(_)) => Err("`test_cases` is empty".into()),
        Some(_) => Err("`test_cases` is not an array".into()),
        None => Err("missing required field `test_cases`".into()),
    }
}

fn as_object(v: &Value) -> Result<&Map<String, Value>, String> {
    v.as_object().ok_or_else(|| "test case is not an object".to_string())
}

fn opt_str(obj: &Map<String, Value>, field: &str) -> Result<Option<String>, String> {
    match obj.get(field) {
        None | Some(Value::Null) => Ok(None),
        Some(Value::String(s)) => Ok(Some(s.clone())),
        Some(_) => Err(format!("field `{field}` is not a string")),
    }
}

fn proposed_input(obj: &Map<String, Value>) -> Result<ProposedInput, String> {
    match (opt_str(obj, "test_input")?, opt_str(obj, "generator")?) {
        (Some(_), Some(_)) => Err("both `test_input` and `generator` given".into()),
        (Some(text), None) => Ok(ProposedInput::Literal(text.into_bytes())),
        (None, Some(src)) if !src.trim().is_empty() => Ok(ProposedInput::Generator(src)),
        (None, Some(_)) => Err("`generator` is empty".into()),
        (None, None) => Err("missing required field `test_input`".into()),
    }
}

fn bug_type(obj: &Map<String, Value>) -> Result<Option<String>, String> {
    Ok(opt_str(obj, "bug_type")?.map(|b| b.trim().to_ascii_lowercase().replace([' ', '-'], "_")))
}

fn validator_case(v: &Value) -> Result<ValidatorCase, String> {
    let obj = as_object(v)?;
    let bug_type = bug_type(obj)?;
    let expected_valid = match obj.get("expected_validity") {
        Some(Value::Bool(b)) => *b,
        Some(Value::String(s)) => match s.trim().to_ascii_lowercase().as_str() {
            "valid" => true,
            "invalid" => false,
            other => return Err(format!("unknown expected_validity `{other}`")),
        },
        Some(_) => return Err("`expected_validity` is neither string nor bool".into()),
        None => match bug_type.as_deref() {
            Some("false_positive") => false,
            Some("false_negative") => true,
            _ => return Err("missing required field `expected_validity`".into()),
        },
    };
    Ok(ValidatorCase {
        strategy: opt_str(obj, "strategy")?.unwrap_or_default(),
        bug_type,
        input: proposed_input(obj)?,
        expected_valid,
    })
}

fn checker_case(v: &Value) -> Result<CheckerCase, String> {
    let obj = as_object(v)?;
    let mut wrong_output = opt_str(obj, "wrong_output")?;
    let mut true_output = opt_str(obj, "true_output")?;
    if let Some(fake) = opt_str(obj, "fake_output")? {
        match bug_type(obj)?.as_deref() {
            Some("false_positive") if wrong_output.is_none() => wrong_output = Some(fake),
            Some("false_negative") if true_output.is_none() => true_output = Some(fake),
            Some("false_positive") | Some("false_negative") => {
                return Err("`fake_output` duplicates an explicit output".into())
            }
            _ => return Err("`fake_output` needs bug_type false_positive or false_negative".into()),
        }
    }
    if wrong_output.is_none() && true_output.is_none() {
        return Err("missing required field `wrong_output` or `true_output`".into());
    }
    if wrong_output.is_some() && wrong_output == true_output {
        return Err("wrong and true outputs are identical".into());
    }
    Ok(CheckerCase {
        strategy: opt_str(obj, "strategy")?.unwrap_or_default(),
        input: proposed_input(obj)?,
        wrong_output,
        true_output,
        reasoning: opt_str(obj, "reasoning")?.unwrap_or_default(),
    })
}

fn scalar_string(v: &Value) -> Option<String> {
    match v {
        Value::String(s) => Some(s.trim().to_string()),
        Value::Number(n) => Some(n.to_string()),
        _ => None,
    }
}

fn analysis_step(obj: &Map<String, Value>) -> Result<AnalysisStep, String> {
    let tool = opt_str(obj, "tool")?.ok_or("missing required field `tool`")?;
    let uint = |field: &str| -> Result<u64, String> {
        obj.get(field)
            .and_then(|v| scalar_string(v))
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| format!("`{field}` must be a non-negative integer"))
    };
    match tool.as_str() {
        "run_target" | "run_cpp" => {
            Ok(AnalysisStep::RunTarget { input: opt_str(obj, "input")?.ok_or("missing required field `input`")? })
        }
        "harmonic" => Ok(AnalysisStep::Harmonic { n: uint("n")? }),
        "binomial" => Ok(AnalysisStep::Binomial {
            n: uint("n")?,
            k: uint("k")?,
            bound: obj.get("bound").and_then(scalar_string).ok_or("missing required field `bound`")?,
        }),
        "finish" => {
            let report = opt_str(obj, "report")?.unwrap_or_default();
            if report.trim().is_empty() {
                return Err("finish requires a non-empty `report`".into());
            }
            let mut parameters = BTreeMap::new();
            match obj.get("parameters") {
                None | Some(Value::Null) => {}
                Some(Value::Object(p)) => {
                    for (k, v) in p {
                        let v = scalar_string(v).ok_or_else(|| format!("parameter `{k}` is not a scalar"))?;
                        parameters.insert(k.clone(), v);
                    }
                }
                Some(_) => return Err("`parameters` is not an object".into()),
            }
            Ok(AnalysisStep::Finish {
                report,
                target_verdict: opt_str(obj, "target_verdict")?,
                strategy: opt_str(obj, "strategy")?,
                parameters,
            })
        }
        other => Err(format!("unknown tool `{other}`")),
    }
}

fn value_list(v: &Value, field: &str) -> Result<Vec<String>, String> {
    let items: Vec<String> = match v {
        Value::Array(a) => {
            a.iter().map(scalar_string).collect::<Option<Vec<_>>>().ok_or(format!("`{field}` has a non-scalar entry"))?
        }
        Value::Number(n) => vec![n.to_string()],
        Value::String(s) => s
            .trim()
            .trim_start_matches('[')
            .trim_end_matches(']')
            .split(',')
            .map(|x| x.trim().to_string())
            .filter(|x| !x.is_empty())
            .collect(),
        _ => return Err(format!("`{field}` is not a list")),
    };
    if items.is_empty() {
        return Err(format!("`{field}` is empty"));
    }
    Ok(items)
}

fn hash_candidate(obj: &Map<String, Value>) -> Result<HashSpecCandidate, String> {
    let pick = |names: &[&str]| names.iter().find_map(|n| obj.get(*n));
    let bases = value_list(pick(&["base", "bases"]).ok_or("missing required field `base`")?, "base")?;
    let moduli = value_list(pick(&["modulus", "moduli"]).ok_or("missing required field `modulus`")?, "modulus")?;
    if bases.len() != moduli.len() {
        return Err(format!("{} bases but {} moduli", bases.len(), moduli.len()));
    }
    let text = |names: &[&str]| -> Result<Option<String>, String> {
        match pick(names) {
            None | Some(Value::Null) => Ok(None),
            Some(v) => scalar_string(v).map(Some).ok_or_else(|| format!("`{}` is not a string", names[0])),
        }
    };
    Ok(HashSpecCandidate {
        bases,
        moduli,
        charset: text(&["character set", "charset", "character_set"])?,
        mapping: text(&["mapping"])?,
        orientation: text(&["orientation"])?,
        input_template: text(&["input_template"])?,
    })
}

fn hash_candidates(obj: &Map<String, Value>) -> Result<Vec<HashSpecCandidate>, String> {
    let mut candidates = match obj.get("hash_parameters") {
        Some(Value::Object(p)) => vec![hash_candidate(p)?],
        Some(Value::Array(a)) if !a.is_empty() => {
            a.iter().map(|v| hash_candidate(as_object(v)?)).collect::<Result<_, _>>()?
        }
        Some(_) => return Err("`hash_parameters` must be an object or non-empty array".into()),
        None => return Err("missing required field `hash_parameters`".into()),
    };
    if let Some(t) = obj.get("input_template").and_then(Value::as_str) {
        for c in candidates.iter_mut().filter(|c| c.input_template.is_none()) {
            c.input_template = Some(t.to_string());
        }
    }
    Ok(candidates)
}

fn fence_re() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| Regex::new(r"(?s)```([A-Za-z0-9+#]*)[ \t]*\r?\n(.*?)```").unwrap())
}

/// Finds the JSON object in a response: the whole text, a fenced block, or the
/// outermost brace span.
pub(crate) fn extract_json(raw: &str) -> Option<Value> {
    if let Ok(v @ Value::Object(_)) = serde_json::from_str::<Value>(raw.trim()) {
        return Some(v);
    }
    for cap in fence_re().captures_iter(raw) {
        if let Ok(v @ Value::Object(_)) = serde_json::from_str::<Value>(cap[2].trim()) {
            return Some(v);
        }
    }
    let start = raw.find('{')?;
    let end = raw.rfind('}')?;
    if end <= start {
        return None;
    }
    match serde_json::from_str::<Value>(&raw[start..=end]) {
        Ok(v @ Value::Object(_)) => Some(v),
        _ => None,
    }
}

fn looks_like_program(text: &str) -> bool {
    text.contains("main(") || text.contains("main (")
}

/// Program source from a JSON `source` field, a fenced code block, or the
/// bare response text.
pub(crate) fn extract_source(raw: &str) -> Option<String> {
    if let Some(Value::Object(obj)) = extract_json(raw) {
        if let Some(Value::String(src)) = obj.get("source") {
            return looks_like_program(src).then(|| src.clone());
        }
    }
    for cap in fence_re().captures_iter(raw) {
        let lang = cap[1].to_ascii_lowercase();
        if lang != "json" && looks_like_program(&cap[2]) {
            return Some(cap[2].to_string());
        }
    }
    looks_like_program(raw).then(|| raw.to_string())
}
