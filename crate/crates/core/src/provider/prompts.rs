//! Fixed chat templates, one per request kind.

use serde::{Deserialize, Serialize};

use super::{ProviderRequest, RequestKind};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChatMessage {
    pub role: String,
    pub content: String,
}

impl ChatMessage {
    fn new(role: &str, content: String) -> Self {
        ChatMessage { role: role.to_string(), content }
    }
}

const VALIDATOR_PROBE: &str = "\
You audit input validators for competitive-programming problems.
List every constraint in the statement, check whether the validator enforces it, then propose:
- an input that breaks a constraint but that the validator probably accepts (bug_type \"false_positive\", expected_validity \"invalid\");
- an input that satisfies every constraint but that the validator probably rejects (bug_type \"false_negative\", expected_validity \"valid\").
Large inputs may be given as a C++ program in \"generator\" instead of \"test_input\".
Reply with JSON only:
{\"test_cases\": [{\"strategy\": str, \"bug_type\": str, \"test_input\": str, \"expected_validity\": \"valid\"|\"invalid\"}]}";

const CHECKER_PROBE: &str = "\
You audit output checkers (special judges) for competitive-programming problems.
Find either an incorrect output the checker accepts, or a correct alternative output it rejects.
Keep the input tiny and explain step by step why each output is right or wrong.
Reply with JSON only:
{\"test_cases\": [{\"strategy\": str, \"test_input\": str, \"wrong_output\": str, \"true_output\": str, \"reasoning\": str}]}";

const FIX: &str = "\
You repair a testlib-style C++ tool for a competitive-programming problem.
The failure cases below show where the current version judges incorrectly. Return the complete corrected
program in a single ```cpp code block, keeping the same interface and exit-code protocol.";

const CODE_ANALYSIS: &str = "\
You look for WA, TLE, RE or MLE bugs in a C++ submission. Each turn, reply with one JSON tool call:
{\"tool\": \"run_target\", \"input\": str}  runs the submission on a small input;
{\"tool\": \"harmonic\", \"n\": int}  returns the exact sum of floor(n/i) for i = 1..n;
{\"tool\": \"binomial\", \"n\": int, \"k\": int, \"bound\": str}  reports whether C(n, k) exceeds bound;
{\"tool\": \"finish\", \"report\": str, \"target_verdict\": \"WA\"|\"RE\"|\"TLE\"|\"MLE\", \"strategy\": \"PROVIDER\"|\"STRESS\", \"parameters\": {}}
ends the analysis with a hacking plan. Tool results arrive in the next request.";

const HACK_GENERATOR: &str = "\
You write a single test input that makes the given submission fail (WA, TLE, RE or MLE) while staying within
every constraint of the problem. Reply with JSON {\"test_input\": str} for small inputs, or with a complete
C++ program in a ```cpp block that prints the input for large ones.";

const HASH_SPEC: &str = "\
You extract polynomial rolling-hash parameters from a C++ submission: each base, each modulus (2^64 for
unsigned overflow without an explicit modulus), the character set and the character-to-integer mapping.
Reply with JSON only:
{\"hash_parameters\": {\"base\": [int], \"modulus\": [int or expression], \"character set\": str, \"mapping\": str,
 \"orientation\": \"ascending\"|\"horner\"}}";

const CROSS_VERIFY: &str = "\
You independently verify a claim about a checker test. Recompute the correct answer for the input yourself and
decide whether the stated wrong output is really wrong and the stated correct output is really correct.
Reply with JSON only: {\"verdict\": \"approve\"|\"reject\", \"reason\": str}";

fn system_prompt(kind: RequestKind) -> &'static str {
    match kind {
        RequestKind::ValidatorProbe => VALIDATOR_PROBE,
        RequestKind::CheckerProbe => CHECKER_PROBE,
        RequestKind::ValidatorFix | RequestKind::CheckerFix => FIX,
        RequestKind::CodeAnalysis => CODE_ANALYSIS,
        RequestKind::HackGenerator => HACK_GENERATOR,
        RequestKind::HashSpecExtract => HASH_SPEC,
        RequestKind::CrossVerify => CROSS_VERIFY,
    }
}

fn title(field: &str) -> String {
    let mut out = String::new();
    for (i, word) in field.split('_').enumerate() {
        if i > 0 {
            out.push(' ');
        }
        let mut chars = word.chars();
        if let Some(c) = chars.next() {
            out.extend(c.to_uppercase());
            out.push_str(chars.as_str());
        }
    }
    out
}

/// Renders a request as a system message plus one user message listing the
/// payload fields in key order.
pub fn render_messages(req: &ProviderRequest) -> Vec<ChatMessage> {
    let mut user = String::new();
    for (field, value) in &req.payload {
        user.push_str(&format!("# {}\n{}\n\n", title(field), value.trim_end()));
    }
    vec![ChatMessage::new("system", system_prompt(req.kind).to_string()), ChatMessage::new("user", user)]
}
