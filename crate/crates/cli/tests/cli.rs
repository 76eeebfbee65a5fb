//! End-to-end tests of the `charp` binary: the fixture catalog, the
//! exit-code contract over a corpus of problem files, budget-flag
//! precedence, and the stability guarantees on emitted reports.

use std::process::Command;

const ALL_FIXTURES: [&str; 12] = [
    "frobclosure-fermat2",
    "witness-fermat2",
    "dickson-p2",
    "dickson-p3",
    "ex41-p2",
    "ex42-q2n2",
    "ex44-class",
    "veronese-trivialize",
    "prop54-fermat2",
    "ex52-sqrt",
    "ex53-family",
    "ex55-splinter",
];

fn data(name: &str) -> String {
    format!("{}/tests/data/{}", env!("CARGO_MANIFEST_DIR"), name)
}

fn run(args: &[&str]) -> (i32, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_charp"))
        .args(args)
        .output()
        .expect("the binary launches");
    let code = out.status.code().expect("the binary exits normally");
    (code, String::from_utf8(out.stdout).expect("stdout is text"))
}

fn report_table(stdout: &str) -> toml::Table {
    stdout.parse().expect("the report parses as a table")
}

fn without_timings(stdout: &str) -> toml::Table {
    let mut t = report_table(stdout);
    t.remove("timings");
    t
}

#[test]
fn catalog_lists_every_fixture() {
    let (code, out) = run(&["fixtures"]);
    assert_eq!(code, 0);
    for id in ALL_FIXTURES {
        assert!(out.contains(id), "catalog must list {id}");
    }
    assert!(out.contains("12 fixtures listed"));
}

#[test]
fn catalog_filters_by_module() {
    let (code, out) = run(&["fixtures", "--module", "dickson"]);
    assert_eq!(code, 0);
    for id in ["dickson-p2", "dickson-p3", "ex41-p2", "ex42-q2n2"] {
        assert!(out.contains(id), "dickson filter must keep {id}");
    }
    assert!(!out.contains("frobclosure-fermat2"));
    assert!(out.contains("4 fixtures listed"));
}

#[test]
fn catalog_with_an_unknown_module_is_empty() {
    let (code, out) = run(&["fixtures", "--module", "nosuch"]);
    assert_eq!(code, 0);
    assert!(out.contains("0 fixtures listed"));
}

#[test]
fn every_fixture_verifies_with_exit_zero() {
    for id in ALL_FIXTURES {
        let (code, out) = run(&["verify-example", id]);
        assert_eq!(code, 0, "fixture {id} must exit 0, report:\n{out}");
        assert!(
            out.contains("verdict = \"verified\""),
            "fixture {id} must be verified, report:\n{out}"
        );
    }
}

#[test]
fn unknown_fixture_ids_are_errors() {
    let (code, out) = run(&["verify-example", "no-such-fixture"]);
    assert_eq!(code, 3);
    assert!(out.contains("verdict = \"error\""));
}

#[test]
fn problem_files_honor_the_exit_code_contract() {
    let cases: [(&str, &str, i32, &str); 14] = [
        ("groebner_member.toml", "groebner", 0, "verified"),
        ("groebner_nonmember.toml", "groebner", 1, "refuted"),
        ("frobclosure_budget.toml", "frobclosure", 2, "inconclusive"),
        ("malformed.toml", "groebner", 3, "error"),
        ("regseq_regular.toml", "regseq", 0, "verified"),
        ("regseq_zerodivisor.toml", "regseq", 1, "refuted"),
        ("power_identity_refuted.toml", "power-identity", 1, "refuted"),
        ("cech_bounds.toml", "cech", 0, "verified"),
        ("cech_nonbounding.toml", "cech", 1, "refuted"),
        ("trivialize_order_zero.toml", "trivialize", 0, "verified"),
        ("prop54_task.toml", "prop54", 0, "verified"),
        ("rees_task.toml", "rees", 0, "verified"),
        ("witness_task.toml", "witness", 0, "verified"),
        ("dickson_task.toml", "dickson", 0, "verified"),
    ];
    for (file, cmd, want_code, want_verdict) in cases {
        let path = data(file);
        let (code, out) = run(&[cmd, &path]);
        assert_eq!(code, want_code, "{file} under {cmd}, report:\n{out}");
        let want = format!("verdict = \"{want_verdict}\"");
        assert!(out.contains(&want), "{file} must be {want_verdict}, report:\n{out}");
    }
}

#[test]
fn the_task_kind_must_match_the_subcommand() {
    let path = data("groebner_member.toml");
    let (code, out) = run(&["regseq", &path]);
    assert_eq!(code, 3);
    assert!(out.contains("verdict = \"error\""));
}

#[test]
fn budget_flags_override_the_problem_file() {
    // The file pins max_e = 0, which starves the closure search; the flag
    // restores enough headroom for the level-one certificate.
    let path = data("frobclosure_budget.toml");
    let (code, out) = run(&["frobclosure", &path, "--max-e", "2"]);
    assert_eq!(code, 0, "report:\n{out}");
    assert!(out.contains("verdict = \"verified\""));
}

#[test]
fn missing_problem_files_are_errors() {
    let (code, out) = run(&["groebner", "/no/such/file.toml"]);
    assert_eq!(code, 3);
    assert!(out.contains("verdict = \"error\""));
}

#[test]
fn reports_round_trip_through_their_serialization() {
    let (code, out) = run(&["verify-example", "witness-fermat2"]);
    assert_eq!(code, 0);
    let parsed = report_table(&out);
    for key in ["tool", "task", "verdict", "exit_code", "budgets", "certificates", "tower"] {
        assert!(parsed.contains_key(key), "report must carry {key}");
    }
    let reserialized = toml::to_string(&parsed).expect("a parsed report serializes");
    let reparsed: toml::Table = reserialized.parse().expect("and parses again");
    assert_eq!(parsed, reparsed, "serialize-then-parse must be the identity");
}

#[test]
fn reports_are_deterministic_apart_from_timings() {
    let (c1, first) = run(&["verify-example", "veronese-trivialize"]);
    let (c2, second) = run(&["verify-example", "veronese-trivialize"]);
    assert_eq!((c1, c2), (0, 0));
    assert_eq!(without_timings(&first), without_timings(&second));
}

#[test]
fn fixtures_do_not_depend_on_the_seed() {
    let (c1, first) = run(&["verify-example", "ex53-family", "--seed", "1"]);
    let (c2, second) = run(&["verify-example", "ex53-family", "--seed", "42"]);
    assert_eq!((c1, c2), (0, 0));
    assert_eq!(without_timings(&first), without_timings(&second));
}

#[test]
fn summary_mode_prints_a_human_synopsis() {
    let (code, out) = run(&["verify-example", "dickson-p2", "--summary"]);
    assert_eq!(code, 0);
    assert!(out.starts_with("task:"), "summary starts with the task line:\n{out}");
    assert!(out.contains("verdict:"));
    assert!(out.contains("verified"));
}
