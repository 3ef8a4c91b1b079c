use std::process::Command;

use serde_json::Value;

fn superquad(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_superquad"))
        .args(args)
        .output()
        .unwrap();
    (
        out.status.code().unwrap(),
        String::from_utf8(out.stdout).unwrap(),
        String::from_utf8(out.stderr).unwrap(),
    )
}

fn json_lines(s: &str) -> Vec<Value> {
    s.lines().map(|l| serde_json::from_str(l).unwrap()).collect()
}

#[test]
fn check_exit_codes() {
    let (code, out, _) = superquad(&[
        "check",
        "--claim",
        "square-identity",
        "--fn",
        "pow:2",
        "--trials",
        "1000",
    ]);
    assert_eq!(code, 0);
    let r = &json_lines(&out)[0];
    assert_eq!(r["violations"], 0);
    assert_eq!(r["tolerance"], 1e-9);
    assert!(r["wall_time_ms"].is_u64());

    let (code, out, _) = superquad(&["check", "--claim", "sq-def", "--fn", "pow:1.5", "--trials", "101"]);
    assert_eq!(code, 1);
    let r = &json_lines(&out)[0];
    assert_eq!(r["extra"]["verdict"], "fails");
    assert!(r["witness"].is_object());
}

#[test]
fn usage_errors_exit_with_two() {
    for args in [
        vec!["check", "--claim", "nope", "--fn", "pow:2"],
        vec!["check", "--claim", "mercer-op", "--fn", "cos:2"],
        vec!["check", "--claim", "mercer-op", "--fn", "pow:2", "--map", "pinch"],
        vec!["search", "--claim", "midpoint-op", "--relax", "sum", "--fn", "pow:3"],
        vec!["check", "--claim", "square-identity", "--fn", "pow:3"],
        vec!["list", "everything"],
    ] {
        let (code, _, err) = superquad(&args);
        assert_eq!(code, 2, "{args:?}: {err}");
        assert!(!err.is_empty());
    }
}

#[test]
fn batched_reports_are_newline_delimited() {
    let dir = std::env::temp_dir().join(format!("superquad-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("reports.jsonl");
    let _ = std::fs::remove_file(&path);
    let p = path.to_str().unwrap();
    let args = [
        "check",
        "--claim",
        "mercer-op",
        "--claim",
        "jensen-mercer-op",
        "--fn",
        "pow:3",
        "--dim",
        "2",
        "--trials",
        "50",
        "--seed",
        "4",
        "--map",
        "pinch:2",
        "--no-timing",
        "--out",
        p,
    ];
    let (code, out, _) = superquad(&args);
    assert_eq!(code, 0);
    let lines = json_lines(&out);
    assert_eq!(lines.len(), 2);
    assert_eq!(lines[0]["claim"], "mercer-op");
    assert_eq!(lines[1]["map"], "pinch:2");
    assert!(lines[1]["extra"]["literal_form"].is_object());
    assert_eq!(std::fs::read_to_string(&path).unwrap(), out);
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn demo_prints_matrices_and_report() {
    let (code, out, _) = superquad(&["demo", "paper-example"]);
    assert_eq!(code, 0);
    assert!(out.contains("f(B):"));
    assert!(out.contains("min eig(RHS - LHS) = 17.39"));
    let report: Value = serde_json::from_str(out.lines().last().unwrap()).unwrap();
    assert_eq!(report["claim"], "subadd-op");
    assert_eq!(report["violations"], 0);
}

#[test]
fn search_exit_codes() {
    let (code, out, _) = superquad(&[
        "search",
        "--claim",
        "mercer-op",
        "--relax",
        "sum",
        "--fn",
        "pow:2",
        "--budget",
        "1000",
        "--seed",
        "3",
    ]);
    assert_eq!(code, 0);
    assert_eq!(json_lines(&out)[0]["status"], "found");
    let (code, out, _) = superquad(&[
        "search",
        "--claim",
        "subadd-op",
        "--relax",
        "none",
        "--fn",
        "pow:3",
        "--budget",
        "300",
        "--seed",
        "3",
    ]);
    assert_eq!(code, 3);
    assert_eq!(json_lines(&out)[0]["status"], "exhausted");
}

#[test]
fn listings() {
    let (code, out, _) = superquad(&["list", "claims"]);
    assert_eq!(code, 0);
    assert_eq!(out.lines().count(), 17);
    for what in ["functions", "maps"] {
        let (code, out, _) = superquad(&["list", what]);
        assert_eq!(code, 0);
        assert!(!out.is_empty());
    }
}
