mod common;

use common::{fixture_text, package, program};
use hackforge::judge::{run_checker, run_validator, CheckerResult, CheckerTool, Judge, JudgeError, ValidatorResult};
use hackforge::model::{CheckerSpec, Provenance, Submission, TestCase, ToolSource, VerdictKind};
use hackforge::sandbox::{RunStatus, Sandbox};

fn compile(src: &str) -> hackforge::CompiledArtifact {
    Sandbox::shared().compile(src, "gpp17").unwrap()
}

fn tool(rel: &str) -> ToolSource {
    ToolSource { source: fixture_text(rel), toolchain_id: "gpp17".into(), source_path: rel.into() }
}

#[test]
fn fixture_packages_load() {
    for name in ["array-max", "captain-flint", "memory-arrays", "party", "phone-number", "quadratic-set", "distinct-strings", "masking"] {
        let pkg = package(name);
        assert_eq!(pkg.id, name);
        assert!(!pkg.local_suite.is_empty());
    }
    let pkg = package("captain-flint");
    assert_eq!(pkg.local_suite.len(), 2);
    assert_eq!(pkg.submissions.len(), 3);
}

#[test]
fn validator_range_bug_rejects_zero_exponent() {
    let sb = Sandbox::shared();
    let input = b"1 1\n1\n0\n";
    let wrong = compile(&fixture_text("packages/memory-arrays/validator.cpp"));
    let fixed = compile(&fixture_text("packages/memory-arrays/reference/validator_fixed.cpp"));
    match run_validator(sb, &wrong, input).unwrap() {
        ValidatorResult::Invalid { reason } => assert!(reason.contains("b_j"), "{reason}"),
        ValidatorResult::Valid => panic!("wrong validator accepted b_j = 0"),
    }
    assert_eq!(run_validator(sb, &fixed, input).unwrap(), ValidatorResult::Valid);
    assert!(!run_validator(sb, &fixed, b"").unwrap().is_valid());
    assert!(!run_validator(sb, &wrong, b"").unwrap().is_valid());
}

#[test]
fn token_diff_checker_accepts_relaid_tokens() {
    let sb = Sandbox::shared();
    let r = run_checker(sb, &CheckerTool::TokenDiff, b"", b"1 2\n3", b"1 2 3").unwrap();
    assert_eq!(r, CheckerResult::Accepted);
}

#[test]
fn flint_checker_rejects_duplicate() {
    let sb = Sandbox::shared();
    let checker = CheckerTool::Custom(compile(&fixture_text("packages/captain-flint/checker.cpp")));
    let r = run_checker(sb, &checker, b"1\n36\n", b"YES\n6 10 14 6\n", b"YES\n6 10 15 5\n").unwrap();
    assert!(matches!(r, CheckerResult::Rejected { ref reason } if reason.contains("distinct")), "{r:?}");
    let ok = run_checker(sb, &checker, b"1\n36\n", b"YES\n5 6 10 15\n", b"YES\n6 10 15 5\n").unwrap();
    assert_eq!(ok, CheckerResult::Accepted);
}

#[test]
fn phone_checkers_disagree_on_embedded_space() {
    let sb = Sandbox::shared();
    let weak = CheckerTool::Custom(compile(&fixture_text("packages/phone-number/checkers/weak.cpp")));
    let refined = CheckerTool::Custom(compile(&fixture_text("packages/phone-number/checkers/refined.cpp")));
    let input = b"6\n549871\n";
    let spaced = b"54-98- 71\n";
    assert_eq!(run_checker(sb, &weak, input, spaced, b"54-98-71\n").unwrap(), CheckerResult::Accepted);
    assert!(matches!(run_checker(sb, &refined, input, spaced, b"54-98-71\n").unwrap(), CheckerResult::Rejected { .. }));
    assert_eq!(run_checker(sb, &refined, input, b"549-871\n", b"54-98-71\n").unwrap(), CheckerResult::Accepted);
}

#[test]
fn checker_crash_is_checker_fail() {
    let sb = Sandbox::shared();
    let crash = CheckerTool::Custom(compile("#include <cstdlib>\nint main() { std::abort(); }\n"));
    assert!(matches!(run_checker(sb, &crash, b"", b"", b"").unwrap(), CheckerResult::CheckerFail { .. }));
    let three = CheckerTool::Custom(compile("int main() { return 3; }\n"));
    assert!(matches!(run_checker(sb, &three, b"", b"", b"").unwrap(), CheckerResult::CheckerFail { .. }));
    let pe = CheckerTool::Custom(compile("int main() { return 2; }\n"));
    assert!(matches!(run_checker(sb, &pe, b"", b"", b"").unwrap(), CheckerResult::Rejected { .. }));
}

#[test]
fn std_is_accepted_on_its_own_suite() {
    let sb = Sandbox::shared();
    for name in ["array-max", "captain-flint", "phone-number", "memory-arrays", "distinct-strings"] {
        let pkg = package(name);
        let judge = Judge::new(sb, &pkg);
        let out = judge.judge_submission(&pkg.std_solution, &pkg.local_suite);
        assert!(out.verdict.is_accepted(), "{name}: {}", out.verdict);
        assert_eq!(out.per_test.len(), pkg.local_suite.len());
        assert!(out.per_test.iter().all(|t| t.status == RunStatus::Ok && t.checker == Some(CheckerResult::Accepted)));
    }
}

#[test]
fn busy_loop_times_out_on_first_test() {
    let pkg = package("array-max");
    let judge = Judge::new(Sandbox::shared(), &pkg);
    let s = Submission::new("busy", program("busy_loop.cpp"), "gpp17");
    let out = judge.judge_submission(&s, &pkg.local_suite);
    assert_eq!(out.verdict.kind(), VerdictKind::TimeLimitExceeded);
    assert_eq!(out.verdict.test_index(), Some(0));
    assert_eq!(out.per_test.len(), 1);
}

#[test]
fn compile_failure_is_ce() {
    let pkg = package("array-max");
    let judge = Judge::new(Sandbox::shared(), &pkg);
    let s = Submission::new("broken", program("syntax_error.cpp"), "gpp17");
    assert_eq!(judge.judge_submission(&s, &pkg.local_suite).verdict.kind(), VerdictKind::CompileError);
}

#[test]
fn greedy_flint_fails_on_36() {
    let pkg = package("captain-flint");
    let judge = Judge::new(Sandbox::shared(), &pkg);
    let target = pkg.submission("cf1388a").unwrap();
    assert!(judge.judge_submission(target, &pkg.local_suite).verdict.is_accepted());
    let mut suite = pkg.local_suite.clone();
    suite.push(TestCase::new("1\n36\n", Provenance::Provider));
    let out = judge.judge_submission(target, &suite);
    assert_eq!(out.verdict.kind(), VerdictKind::WrongAnswer);
    assert_eq!(out.verdict.test_index(), Some(2));
}

#[test]
fn hack_predicate_on_fixtures() {
    let pkg = package("captain-flint");
    let judge = Judge::new(Sandbox::shared(), &pkg);
    let target = pkg.submission("cf1388a").unwrap();

    let hit = judge.is_successful_hack(&TestCase::new("1\n40\n", Provenance::Provider), target, 1).unwrap();
    assert!(hit.success && hit.validator_ok && !hit.oracle_fail);
    assert_eq!(hit.target_verdict.as_ref().unwrap().kind(), VerdictKind::WrongAnswer);
    assert_eq!(hit.input.jury_answer.as_deref(), Some(&b"YES\n6 10 15 9\n"[..]));

    let invalid = judge.is_successful_hack(&TestCase::new("1\n0\n", Provenance::Provider), target, 2).unwrap();
    assert!(!invalid.success && !invalid.validator_ok);
    assert!(invalid.std_verdict.is_none() && invalid.target_verdict.is_none());

    let miss = judge.is_successful_hack(&TestCase::new("1\n45\n", Provenance::Provider), target, 3).unwrap();
    assert!(!miss.success);
    assert!(miss.target_verdict.unwrap().is_accepted());
}

#[test]
fn oracle_failure_is_reported() {
    let mut pkg = package("array-max");
    pkg.std_solution.source = program("busy_loop.cpp");
    let judge = Judge::new(Sandbox::shared(), &pkg);
    let target = pkg.submission("off_by_one").unwrap().clone();
    let a = judge.is_successful_hack(&TestCase::new("2\n1 5\n", Provenance::Stress), &target, 1).unwrap();
    assert!(a.validator_ok && a.oracle_fail && !a.success);
    assert_eq!(a.std_verdict.unwrap().kind(), VerdictKind::TimeLimitExceeded);
    assert!(a.target_verdict.is_none());
}

#[test]
fn targets_are_locally_accepted_but_wrong() {
    let pkg = package("captain-flint");
    let judge = Judge::new(Sandbox::shared(), &pkg);
    let ids: Vec<_> = judge.identify_targets().unwrap().into_iter().map(|s| s.id).collect();
    assert_eq!(ids, ["cf1388a"]);

    let mut failing = pkg.clone();
    failing.submissions.retain(|s| s.id == "late_start");
    assert!(Judge::new(Sandbox::shared(), &failing).identify_targets().unwrap().is_empty());

    let mut unlabeled = pkg.clone();
    for s in &mut unlabeled.submissions {
        s.ground_truth = None;
    }
    assert_eq!(Judge::new(Sandbox::shared(), &unlabeled).identify_targets(), Err(JudgeError::NoAuthoritativeSignal));
}

#[test]
fn refined_checker_override() {
    let pkg = package("phone-number");
    let std = pkg.std_solution.clone();
    let spaced = Submission::new("spaced", "#include <cstdio>\nint main(){ std::puts(\"54-98- 71\"); }\n", "gpp17");
    let only_first: Vec<_> = pkg.local_suite[..1].to_vec();
    let weak = Judge::new(Sandbox::shared(), &pkg);
    assert!(weak.judge_submission(&spaced, &only_first).verdict.is_accepted());
    let refined = Judge::new(Sandbox::shared(), &pkg).with_checker(CheckerSpec::Custom(tool("packages/phone-number/checkers/refined.cpp")));
    assert_eq!(refined.judge_submission(&spaced, &only_first).verdict.kind(), VerdictKind::WrongAnswer);
    assert!(refined.judge_submission(&std, &pkg.local_suite).verdict.is_accepted());
}
