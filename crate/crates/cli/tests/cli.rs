use std::io::Write;
use std::process::{Command, Stdio};

use serde_json::{json, Value};

fn run(args: &[&str]) -> (Value, i32) {
    let out = Command::new(env!("CARGO_BIN_EXE_arithline")).args(args).output().expect("binary runs");
    let code = out.status.code().expect("exit code");
    let text = String::from_utf8(out.stdout).unwrap();
    let v = serde_json::from_str(text.trim()).unwrap_or(Value::Null);
    (v, code)
}

fn run_stdin(args: &[&str], input: &str) -> (Value, i32) {
    let mut child = Command::new(env!("CARGO_BIN_EXE_arithline"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .spawn()
        .unwrap();
    child.stdin.take().unwrap().write_all(input.as_bytes()).unwrap();
    let out = child.wait_with_output().unwrap();
    (serde_json::from_str(String::from_utf8(out.stdout).unwrap().trim()).unwrap(), out.status.code().unwrap())
}

#[test]
fn eval_base_example() {
    let (v, code) = run(&["eval-base", "--f", "12", "--point", r#"{"place":2,"exp":"1"}"#]);
    assert_eq!(code, 0);
    assert_eq!(v, json!({"v": 1, "exact": "1/4"}));
}

#[test]
fn product_formula_example() {
    let (v, code) = run(&["product-formula", "--f", "1"]);
    assert_eq!(code, 0);
    assert_eq!(v["exact"], "1");
    let (v, _) = run(&["product-formula", "--f", "-360/77"]);
    assert_eq!(v["exact"], "1");
}

#[test]
fn divide_example() {
    let (v, code) = run(&["divide", "--F", "[0,0,0,1]", "--G", "[2,2,1]", "--w", "5"]);
    assert_eq!(code, 0);
    assert_eq!(v["v"], 1);
    assert_eq!(v["Q"], json!(["-2", "1"]));
    assert_eq!(v["R"], json!(["4", "2"]));
    assert_eq!(v["cert"]["bound_Q"], true);
    assert_eq!(v["cert"]["bound_R"], true);
}

#[test]
fn negative_numbers_are_values() {
    let (v, code) = run(&["cousin-split", "--a", "-7/2", "--place", "inf"]);
    assert_eq!(code, 0, "{v}");
    assert_eq!(v["sides_ok"], true);
}

#[test]
fn domain_error_exits_2() {
    let (v, code) = run(&["eval-base", "--f", "3", "--point", r#"{"place":4,"exp":"1"}"#]);
    assert_eq!(code, 2);
    assert_eq!(v["error"], "NotPrime");
    assert!(v["detail"].is_string());
}

#[test]
fn malformed_input_exits_1() {
    let (v, code) = run(&["eval-base", "--f", "abc", "--point", r#"{"place":2,"exp":"1"}"#]);
    assert_eq!(code, 1);
    assert_eq!(v["error"], "Malformed");
    let (_, code) = run(&["eval-base", "--f", "1"]);
    assert_eq!(code, 1);
    let (_, code) = run(&["no-such-command"]);
    assert_eq!(code, 1);
}

#[test]
fn selftest_unknown_suite_exits_1() {
    let (v, code) = run(&["selftest", "--suite", "bogus"]);
    assert_eq!(code, 1);
    assert_eq!(v["error"], "UnknownSuite");
}

#[test]
fn selftest_is_deterministic() {
    let (a, code) = run(&["selftest", "--suite", "norms", "--seed", "11"]);
    assert_eq!(code, 0);
    assert_eq!(a["all_pass"], true);
    let (b, _) = run(&["selftest", "--suite", "norms", "--seed", "11"]);
    assert_eq!(a, b);
}

#[test]
fn bits_env_and_flag() {
    let point = r#"{"base":{"place":"inf","exp":"1"},"fiber":{"kind":"arch","re":"2","im":"1"}}"#;
    let out = Command::new(env!("CARGO_BIN_EXE_arithline"))
        .args(["eval-line", "--F", "[1,1]", "--point", point])
        .env("ARITHLINE_BITS", "32")
        .output()
        .unwrap();
    let narrow: Value = serde_json::from_slice(&out.stdout).unwrap();
    let (wide, _) = run(&["eval-line", "--F", "[1,1]", "--point", point, "--bits", "200"]);
    let width = |v: &Value| {
        let lo: f64 = v["lo"].as_str().unwrap().parse().unwrap();
        let hi: f64 = v["hi"].as_str().unwrap().parse().unwrap();
        assert!(lo <= 10f64.sqrt() && 10f64.sqrt() <= hi);
        hi - lo
    };
    assert!(width(&narrow) > 0.0);
    assert!(width(&narrow) > width(&wide));
}

#[test]
fn input_object_and_batch() {
    let (v, code) = run_stdin(&["divide", "--input", "-"], r#"{"F":[0,0,0,1],"G":[2,2,1],"w":5}"#);
    assert_eq!(code, 0);
    assert_eq!(v["R"], json!(["4", "2"]));
    let (v, code) = run_stdin(&["product-formula", "--input", "-"], r#"[{"f":2},{"f":0}]"#);
    assert_eq!(code, 2);
    assert_eq!(v["batch"][0]["exact"], "1");
    assert_eq!(v["batch"][1]["error"], "ZeroInput");
}

#[test]
fn flow_output_round_trips() {
    let point = json!({"base":{"place":3,"exp":"1"},"fiber":{"kind":"disk","alpha":"1/3","r":"1/9"}});
    let (v, code) = run(&["flow", "--point", &point.to_string(), "--eps", "1/2"]);
    assert_eq!(code, 0, "{v}");
    let again = v["point"].to_string();
    let (w, code) = run(&["flow", "--point", &again, "--eps", "1"]);
    assert_eq!(code, 0);
    assert_eq!(v["point"], w["point"]);
}

#[test]
fn laurent_output_round_trips() {
    let (v, code) = run(&["binomial", "--n", "2", "--m", "6", "--p", "3"]);
    assert_eq!(code, 0);
    assert_eq!(v["power_ok"], true);
    assert_eq!(v["integrality"]["integral"], true);
    let g = v["g"].to_string();
    let (s, code) = run(&["split-sides", "--f", &g]);
    assert_eq!(code, 0);
    assert_eq!(s["nonneg"]["terms"], v["g"]["terms"]);
}

#[test]
fn group_commands() {
    let (v, code) = run(&["group-mu", "--group", "S3"]);
    assert_eq!(code, 0);
    assert_eq!(v["injective"], true);
    assert_eq!(v["homomorphism"], true);
}

#[test]
fn every_subcommand_has_help() {
    let out = Command::new(env!("CARGO_BIN_EXE_arithline")).arg("--help").output().unwrap();
    assert!(out.status.success());
    let help = String::from_utf8(out.stdout).unwrap();
    for name in ["eval-base", "divide", "cartan", "cover", "selftest", "group-mu"] {
        assert!(help.contains(name), "{name}");
    }
}
