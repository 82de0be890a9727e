use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::{json, Value};
use tempfile::TempDir;

use qmd_core::algebra::OperatorAlgebra;
use qmd_core::channel::fixtures as chf;
use qmd_core::io;
use qmd_core::representation::Representation;

fn qmd(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qmd"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn json_of(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", stdout(out)))
}

fn write(dir: &TempDir, name: &str, v: &Value) -> PathBuf {
    let p = dir.path().join(name);
    std::fs::write(&p, serde_json::to_string(v).unwrap()).unwrap();
    p
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn info_reports_unital_and_trace_preserving_flags() {
    let dir = TempDir::new().unwrap();
    let phi = write(&dir, "phi.json", &io::channel_to_json(&chf::unital_not_tp_3d()));
    let out = qmd(&["--json", "info", s(&phi)]);
    assert_eq!(code(&out), 0);
    let v = json_of(&out);
    assert_eq!(v["dim"], 3);
    assert_eq!(v["unital"], true);
    assert_eq!(v["trace_preserving"], false);

    let out = qmd(&["info", s(&phi)]);
    assert!(stdout(&out).contains("unital: true"));
    assert!(stdout(&out).contains("trace_preserving: false"));
}

#[test]
fn text_and_json_show_the_same_numbers() {
    let dir = TempDir::new().unwrap();
    let ch = write(&dir, "ch.json", &io::channel_to_json(&chf::counterexample_4d()));
    let alg = write(&dir, "alg.json", &json!("full"));
    let json_out = json_of(&qmd(&["--json", "bimodule", s(&ch), s(&alg)]));
    let text = stdout(&qmd(&["bimodule", s(&ch), s(&alg)]));
    let residual = json_out["residual"].as_f64().unwrap();
    assert!(residual > 0.1);
    assert!(text.contains(&format!("residual: {}", json_out["residual"])));
    assert!(text.contains("bimodule: false"));
}

#[test]
fn qec_on_the_bit_flip_code() {
    let dir = TempDir::new().unwrap();
    let ch = write(&dir, "ch.json", &io::channel_to_json(&chf::bit_flip_3q()));
    let c0 = write(&dir, "c0.json", &json!({ "fixture": "c0" }));
    let out = qmd(&["--json", "qec", s(&ch), s(&c0)]);
    assert_eq!(code(&out), 0);
    let v = json_of(&out);
    assert_eq!(v["correctable"], true);
    let conditions = v["conditions"].as_array().unwrap();
    assert_eq!(conditions.len(), 4);
    assert!(conditions.iter().all(|c| c["holds"] == true));
    assert_eq!(v["noiseless"]["holds"], false);
    assert_eq!(v["knill_laflamme"]["correctable"], true);
    assert_eq!(v["recovery"]["corrected"], true);
    assert!(v["matrices"].is_object());

    let bad = write(&dir, "bad.json", &json!({ "fixture": "non_code" }));
    let out = qmd(&["--json", "qec", s(&ch), s(&bad)]);
    assert_eq!(code(&out), 1);
    let v = json_of(&out);
    assert_eq!(v["correctable"], false);
    assert!(v["conditions"].as_array().unwrap().iter().all(|c| c["holds"] == false));
}

#[test]
fn qec_accepts_an_explicit_code() {
    let dir = TempDir::new().unwrap();
    let ch = write(&dir, "ch.json", &io::channel_to_json(&chf::bit_flip_3q()));
    let code_file = write(&dir, "code.json", &io::code_to_json(&qmd_core::qec::fixtures::bit_flip_code(2)));
    let out = qmd(&["--json", "qec", s(&ch), s(&code_file)]);
    assert_eq!(code(&out), 0);
    assert_eq!(json_of(&out)["correctable"], true);
}

#[test]
fn mdpi_methods_agree_on_the_correction_representation() {
    let dir = TempDir::new().unwrap();
    let ch = write(&dir, "ch.json", &io::channel_to_json(&chf::bit_flip_3q()));
    let rep = write(&dir, "rep.json", &json!({ "fixture": "bit_flip_correction" }));
    let out = qmd(&["--json", "mdpi", s(&ch), s(&rep)]);
    assert_eq!(code(&out), 0);
    let v = json_of(&out);
    let methods = v["methods"].as_array().unwrap();
    assert_eq!(methods.len(), 3);
    for m in methods {
        assert_eq!(m["status"], "solved", "{m}");
        assert_eq!(m["result"]["dim"], 4);
    }
    assert_eq!(v["cross_check"]["agree"], true);
}

#[test]
fn single_method_refusal_exits_3() {
    let dir = TempDir::new().unwrap();
    let ch = write(&dir, "phi.json", &io::channel_to_json(&chf::unital_not_tp_3d()));
    let id = Representation::identity(OperatorAlgebra::full(3));
    let rep = write(&dir, "id.json", &io::representation_to_json(&id));
    for method in ["kraus", "unit"] {
        let out = qmd(&["mdpi", s(&ch), s(&rep), "--method", method]);
        assert_eq!(code(&out), 3, "{method}");
        assert!(String::from_utf8_lossy(&out.stderr).contains("unital_not_tp_3d"));
    }
    let out = qmd(&["--json", "mdpi", s(&ch), s(&rep)]);
    assert_eq!(code(&out), 0);
    let v = json_of(&out);
    assert_eq!(v["methods"][0]["status"], "solved");
    assert_eq!(v["methods"][1]["status"], "refused");
    assert_eq!(v["methods"][2]["status"], "refused");
}

#[test]
fn md_of_a_unitary_channel_is_everything() {
    let dir = TempDir::new().unwrap();
    let x = io::matrix_to_json(&qmd_core::numerics::ComplexMatrix::from_fn(2, 2, |i, j| {
        qmd_core::numerics::real(if i != j { 1.0 } else { 0.0 })
    }));
    let ch = write(&dir, "x.json", &json!({ "dim": 2, "kraus": [x] }));
    let out = qmd(&["--json", "md", s(&ch)]);
    assert_eq!(code(&out), 0);
    let v = json_of(&out);
    assert_eq!(v["dim"], 4);
    assert_eq!(v["restriction_is_homomorphism"], true);
}

#[test]
fn malformed_input_exits_2() {
    let dir = TempDir::new().unwrap();
    let bad = write(&dir, "bad.json", &json!({ "dim": 2, "kraus": [[[[1, 0]]]] }));
    let out = qmd(&["info", s(&bad)]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("bad.json"));

    let missing = dir.path().join("missing.json");
    assert_eq!(code(&qmd(&["info", s(&missing)])), 2);

    let good = write(&dir, "ch.json", &io::channel_to_json(&chf::bit_flip_3q()));
    assert_eq!(code(&qmd(&["--tol=-1", "info", s(&good)])), 2);
    assert_eq!(code(&qmd(&["examples", "run", "9.9"])), 2);
}

#[test]
fn error_reports_are_json_in_json_mode() {
    let dir = TempDir::new().unwrap();
    let bad = write(&dir, "bad.json", &json!({ "fixture": "no_such_channel" }));
    let out = qmd(&["--json", "info", s(&bad)]);
    assert_eq!(code(&out), 2);
    let v = json_of(&out);
    assert_eq!(v["exit_code"], 2);
    assert!(v["error"].as_str().unwrap().contains("no_such_channel"));
}

#[test]
fn examples_run_all() {
    let out = qmd(&["examples", "run", "all"]);
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    for name in ["2.1", "3.2", "3.5", "4.2"] {
        assert!(text.contains(&format!("example {name} ")), "{name}");
    }
    assert!(!text.contains("FAIL"));
    assert!(text.contains("total: 40 passed, 0 failed"));

    let v = json_of(&qmd(&["--json", "examples", "run", "all"]));
    assert_eq!(v["examples"].as_array().unwrap().len(), 4);
    assert_eq!(v["failed"], 0);
}

#[test]
fn examples_show_the_displayed_values() {
    let text = stdout(&qmd(&["examples", "run", "3.5"]));
    assert!(text.contains("PASS φ(ba) = diag(1, 1/2, 0)"));
    assert!(text.contains("PASS φ(b)π(a) = diag(1, 5/4, 0)"));
    assert!(text.contains("PASS φ(ba) ≠ φ(b)π(a)"));

    let text = stdout(&qmd(&["examples", "run", "3.2"]));
    assert!(text.contains("PASS image of the top-left corner matches the closed form"));
}
