use std::io::Write;
use std::process::{Command, Output, Stdio};

use fuchsian_roots::nielsen::{apply_move, triple_of, LogEntry, TraceTriple};
use fuchsian_roots::psl2::{commutator_trace, GeneratorPair, Matrix2};
use fuchsian_roots::scalar::Scalar;
use fuchsian_roots::tracemin::{minimize_triple, TripleVerdict, DEFAULT_MAX_ITERATIONS};
use serde_json::Value;

const FIRST_A: &str = r#"[["44","61"],["31","43"]]"#;
const FIRST_B: &str = r#"[["3","4"],["2","3"]]"#;
const SECOND_A: &str = "[[26,-1],[1,0]]";
const SECOND_B: &str = r#"[["0","2"],["-1/2","53"]]"#;
const ROOT_A: &str = r#"[["-1","28*sqrt(6)+70"],["28*sqrt(6)-70","195"]]"#;
const ROOT_B: &str = "[[2627796,-19043],[19043,-138]]";

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fuchsian-roots")).args(args).output().unwrap()
}

fn run_stdin(args: &[&str], input: &str) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_fuchsian-roots"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    child.stdin.take().unwrap().write_all(input.as_bytes()).unwrap();
    child.wait_with_output().unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

/// JSON matrices for a pair with the given traces.
fn traces(x: &str, y: &str, z: &str) -> (String, String) {
    let p = GeneratorPair::from_traces(&x.parse().unwrap(), &y.parse().unwrap(), &z.parse().unwrap()).unwrap();
    (serde_json::to_string(p.first()).unwrap(), serde_json::to_string(p.second()).unwrap())
}

fn scalar_triple(v: &Value) -> TraceTriple {
    serde_json::from_value(v.clone()).unwrap()
}

#[test]
fn classify_first_example() {
    let o = run(&["classify", "--A", FIRST_A, "--B", FIRST_B, "--format", "json"]);
    assert_eq!(code(&o), 0);
    let v = json(&o);
    assert_eq!(v["verdict"], "TRUE");
    assert_eq!(v["reason"], "case_a_negative_tau");
    assert_eq!(v["witness"]["tau"], "-2");
    assert!(v["witness"].get("log").is_none());
}

#[test]
fn text_log_uses_numbered_steps() {
    let o = run(&["classify", "--A", FIRST_A, "--B", FIRST_B, "--log"]);
    assert_eq!(code(&o), 0);
    let out = stdout(&o);
    for line in [
        "(1) tau = -2",
        "(2) triple (6,87,507)",
        "(4) triple (6,15,87)",
        "(4) triple (3,6,15)",
        "(4) triple (3,3,6)",
        "(4) triple (3,3,3)",
        "verdict: TRUE",
    ] {
        assert!(out.lines().any(|l| l == line), "missing {line:?} in\n{out}");
    }
}

#[test]
fn rational_power_example() {
    let o = run(&["rational-power", "--m", "2/1", "--n", "3/1", "--A", ROOT_A, "--B", ROOT_B, "--log"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let out = stdout(&o);
    let steps: Vec<&str> = out.lines().filter(|l| l.starts_with("(4) triple")).collect();
    assert_eq!(steps.len(), 4);
    assert_eq!(steps[3], "(4) triple (-2,2,2)");
    assert!(out.contains("verdict: TRUE"));
}

#[test]
fn metabelian_pair_exits_2() {
    let o = run(&["classify", "--A", "[[1,1],[0,1]]", "--B", "[[1,2],[0,1]]"]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("metabelian: tr([A,B]) = 2"));
}

#[test]
fn preconditions_exit_2() {
    let (a, b) = traces("3", "3", "5/2");
    let o = run(&["root-check", "--m", "2", "--n", "2", "--A", &a, "--B", &b]);
    assert_eq!(code(&o), 2, "tau gap: {}", stderr(&o));
    let (a, b) = traces("1", "3", "10");
    let o = run(&["rational-power", "--m", "2", "--n", "1", "--A", &a, "--B", &b, "--format", "json"]);
    assert_eq!(code(&o), 2, "elliptic generator: {}", stderr(&o));
    assert_eq!(json(&o)["error"], "precondition");
}

#[test]
fn gap_classifies_false() {
    let (a, b) = traces("3", "4", "11");
    let o = run(&["classify", "--A", &a, "--B", &b, "--format", "json"]);
    assert_eq!(code(&o), 0);
    assert_eq!(json(&o)["verdict"], "FALSE");
    assert_eq!(json(&o)["reason"], "tau_in_gap");
}

#[test]
fn input_errors_exit_1() {
    let cases: Vec<Vec<&str>> = vec![
        vec!["classify", "--A", "[[1,2],[3,4]]", "--B", FIRST_B],
        vec!["classify", "--A", "not json", "--B", FIRST_B],
        vec!["classify", "--A", "@/nonexistent/matrix.json", "--B", FIRST_B],
        vec!["classify", "--A", FIRST_A],
        vec!["rational-power", "--m", "2/4", "--n", "1", "--A", FIRST_A, "--B", FIRST_B],
        vec!["classify", "--A", FIRST_A, "--B", FIRST_B, "--precision", "100"],
        vec!["frobnicate"],
    ];
    for args in cases {
        assert_eq!(code(&run(&args)), 1, "{args:?}");
    }
}

#[test]
fn ambiguous_boundary_exits_3() {
    // x = sqrt(8): S_2(x)^2 S_1(y)^2 = 8 = 1/2 - tau/4 at tau = -30.
    let (a, b) = traces("6", "4", "4");
    let o = run(&["root-check", "--m", "2", "--n", "1", "--A", &a, "--B", &b, "--format", "json"]);
    assert_eq!(code(&o), 3);
    let v = json(&o);
    assert_eq!(v["verdict"], "AMBIGUOUS");
    assert_eq!(v["witness"]["precision"], 256);
    assert_eq!(v["witness"]["rhs"], "8");
    let o = run(&["root-check", "--m", "1", "--n", "1", "--A", &a, "--B", &b]);
    assert_eq!(code(&o), 0);
}

#[test]
fn matrices_from_files() {
    let dir = std::env::temp_dir().join(format!("fuchsian-roots-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let (a, b) = (dir.join("a.json"), dir.join("b.json"));
    std::fs::write(&a, FIRST_A).unwrap();
    std::fs::write(&b, FIRST_B).unwrap();
    let o = run(&[
        "classify",
        "--A",
        &format!("@{}", a.display()),
        "--B",
        &format!("@{}", b.display()),
    ]);
    std::fs::remove_dir_all(&dir).unwrap();
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("verdict: TRUE"));
}

#[test]
fn root_check_with_explicit_roots() {
    let r = r#"[["0","2*sqrt(6)+5"],["2*sqrt(6)-5","14"]]"#;
    let s = "[[138,-1],[1,0]]";
    let args = ["root-check", "--m", "2", "--n", "3", "--A", ROOT_A, "--B", ROOT_B, "--format", "json"];
    let derived = json(&run(&args));
    let mut with_roots = args.to_vec();
    with_roots.extend(["--R", r, "--S", s]);
    let direct = json(&run(&with_roots));
    assert_eq!(derived["verdict"], "TRUE");
    assert_eq!(direct["verdict"], "TRUE");
    assert_eq!(direct["witness"]["tau"], "18");
    let last = with_roots.len() - 1;
    with_roots[last] = "[[137,-1],[1,0]]";
    assert_eq!(code(&run(&with_roots)), 1);
}

#[test]
fn parabolic_check() {
    for (m, n, verdict) in [("1", "1", "TRUE"), ("2", "1", "FALSE"), ("2", "2", "FALSE")] {
        let o = run(&["parabolic-check", "--m", m, "--n", n, "--format", "json"]);
        assert_eq!(code(&o), 0);
        assert_eq!(json(&o)["verdict"], verdict);
    }
    let o = run(&["parabolic-check", "--m", "1", "--n", "2", "--A", "[[1,2],[0,1]]", "--B", "[[1,0],[-2,1]]"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let o = run(&["parabolic-check", "--m", "1", "--n", "2", "--A", FIRST_A, "--B", FIRST_B]);
    assert_eq!(code(&o), 2);
}

/// Re-verifies an emitted witness from its own data: the log replays on
/// the initial pair, the final triple belongs to the final pair, and the
/// final triple alone reproduces the verdict.
#[test]
fn json_witness_reverifies() {
    for (a, b) in [(FIRST_A, FIRST_B), (SECOND_A, SECOND_B)] {
        let o = run(&["classify", "--A", a, "--B", b, "--format", "json", "--log"]);
        assert_eq!(code(&o), 0);
        let v = json(&o);
        let w = &v["witness"];
        let tau: Scalar = w["tau"].as_str().unwrap().parse().unwrap();
        let [u, vv]: [Matrix2; 2] = serde_json::from_value(w["initial_pair"].clone()).unwrap();
        let mut pair = GeneratorPair::new(&u, &vv).unwrap();
        let log: Vec<LogEntry<String>> = serde_json::from_value(w["log"].clone()).unwrap();
        for e in &log {
            pair = apply_move(&pair, e.mv);
            assert_eq!(triple_of(&pair).map(|s| s.to_string()), e.after);
        }
        let final_triple = scalar_triple(&w["final_triple"]);
        assert_eq!(triple_of(&pair), final_triple);
        assert_eq!(final_triple.commutator_trace(), tau);
        let [u, vv]: [Matrix2; 2] = serde_json::from_value(w["final_pair"].clone()).unwrap();
        let final_pair = GeneratorPair::from_parts(u, vv, pair.words().clone()).unwrap();
        assert_eq!(commutator_trace(&final_pair), tau);
        let reproduced = if tau < Scalar::from_integer(2) {
            let t = &final_triple;
            &t.z + &t.z <= &t.x * &t.y && t.x > Scalar::from_integer(2)
        } else {
            let run = minimize_triple(final_triple, DEFAULT_MAX_ITERATIONS).unwrap();
            run.verdict == TripleVerdict::Free
        };
        assert_eq!(reproduced, v["verdict"] == "TRUE");
    }
    let o = run(&["rational-power", "--m", "2", "--n", "3", "--A", ROOT_A, "--B", ROOT_B, "--format", "json"]);
    let v = json(&o);
    let start = scalar_triple(&v["witness"]["sequence"][0]);
    let run = minimize_triple(start, DEFAULT_MAX_ITERATIONS).unwrap();
    assert_eq!(run.final_triple, scalar_triple(&v["witness"]["final_triple"]));
    assert_eq!(run.verdict == TripleVerdict::Free, v["verdict"] == "TRUE");
}

#[test]
fn batch_preserves_input_order() {
    let (gap_a, gap_b) = traces("3", "4", "11");
    let mut requests = Vec::new();
    let mut expected = Vec::new();
    for i in 0..40 {
        let (line, exit) = match i % 5 {
            0 => (format!(r#"{{"command":"classify","A":{FIRST_A},"B":{FIRST_B}}}"#), 0),
            1 => (
                format!(r#"{{"command":"rational-power","A":{ROOT_A},"B":{ROOT_B},"m":"2/1","n":3}}"#),
                0,
            ),
            2 => (r#"{"command":"classify","A":[[1,1],[0,1]],"B":[[1,2],[0,1]]}"#.to_string(), 2),
            3 => (format!(r#"{{"command":"trace-min","A":{gap_a},"B":{gap_b}}}"#), 0),
            _ => (r#"{"command":"classify","A":[[2,0],[0,2]]"#.to_string(), 1),
        };
        requests.push(line);
        expected.push(exit);
    }
    let input = requests.join("\n\n") + "\n";
    let o = run_stdin(&["batch"], &input);
    assert_eq!(code(&o), 0);
    let lines: Vec<Value> = stdout(&o).lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert_eq!(lines.len(), 40);
    for (i, (line, exit)) in lines.iter().zip(expected).enumerate() {
        assert_eq!(line["line"], 2 * i + 1);
        assert_eq!(line["exit"], exit, "request {i}");
        if exit == 0 && i % 5 == 3 {
            assert_eq!(line["result"]["case"], "tau_gt2");
        }
    }
}
