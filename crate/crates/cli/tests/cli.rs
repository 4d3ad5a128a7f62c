use std::process::{Command, Output};

use serde_json::{json, Value};

fn dlaf(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dlaf")).args(args).output().expect("binary runs")
}

fn json_of(args: &[&str]) -> (Value, i32) {
    let out = dlaf(args);
    let text = String::from_utf8(out.stdout).unwrap();
    let v = serde_json::from_str(&text).unwrap_or_else(|e| panic!("{e}: {text}"));
    (v, out.status.code().unwrap())
}

fn data(name: &str) -> String {
    format!("{}/tests/data/{name}", env!("CARGO_MANIFEST_DIR"))
}

const RUNNING_EFFECT: &str = "x:=1;?([x:=x+1]T);y:=1";

#[test]
fn eval_assignment() {
    let (v, code) = json_of(&["eval", "--init", "x=0", "x:=1"]);
    assert_eq!(code, 0);
    assert_eq!(v["final"], json!({"x": 1}));
    assert_eq!(v["outcome"], "completed");
    assert_eq!(v["trace"], json!(["x:=1"]));
}

#[test]
fn eval_reports_expected_run() {
    let (v, _) = json_of(&["eval", "--init", "x=0", "?([x:=1]T)"]);
    assert_eq!(v["final"], json!({"x": 1}));
    assert_eq!(v["expected"]["final"], json!({"x": 0}));
    let (v, _) = json_of(&["eval", "--init", "x=0", "--policy", "assign-inert", "x:=1"]);
    assert_eq!(v["expected"]["final"], json!({"x": 0}));
}

#[test]
fn effects_of_the_running_example() {
    let (v, code) = json_of(&["effects", "--init", "x=0,y=0", &data("running.dl")]);
    assert_eq!(code, 0);
    assert_eq!(v["effects"], json!([{"var": "x", "value": 2}]));
    assert_eq!(v["final"], json!({"x": 2, "y": 1}));
    assert_eq!(v["initial"], json!({"x": 0, "y": 0}));
    assert_eq!(v["trace"], json!(["x:=1", "?([x:=x+1]T && x=2)", "y:=1"]));
    for key in ["program", "initial", "final", "effects", "trace"] {
        assert!(v.get(key).is_some(), "{key}");
    }
}

#[test]
fn classify_verdicts() {
    let (v, code) = json_of(&["classify", "--init", "x=0,y=0", "--occ", "1", RUNNING_EFFECT]);
    assert_eq!(code, 0);
    assert_eq!(v["marginal"], true);
    assert_eq!(v["h_E_exists"], true);
    assert_eq!(v["delta"], json!([{"var": "x", "value": 2}]));
    assert_eq!(v["effect"], json!([{"var": "x", "value": 2}]));
    assert_eq!(v["occurrence"], json!({"instr_index": 1, "formula_path": null}));
    let (v, _) = json_of(&["classify", "--init", "x=0,y=0", "--occ", "1:andl", "x:=1;?([x:=x+1]T && x=2);y:=1"]);
    assert_eq!(v["occurrence"], json!({"instr_index": 1, "formula_path": "andl"}));
    assert_eq!((v["marginal"].clone(), v["h_E_exists"].clone()), (json!(false), json!(false)));
    let (v, _) = json_of(&["classify", "--init", "x=0,y=0", "--occ", "1", "x:=1;?([x:=x+1]T);x:=x+1"]);
    assert_eq!(v["marginal"], false);
    let (v, _) = json_of(&["classify", "--init", "x=0,y=0", "--occ", "1", "x:=1;?([x:=x+1]T);x:=42"]);
    assert_eq!((v["marginal"].clone(), v["delta"].clone()), (json!(true), json!([])));
}

#[test]
fn no_side_effect_exits_one() {
    let (v, code) = json_of(&["classify", "--init", "x=0", "--occ", "0", "?([x:=0]T)"]);
    assert_eq!(code, 1);
    assert_eq!(v["side_effect"], false);
    // another start value would have shown the effect
    assert_eq!(v["undetectible"], true);
}

#[test]
fn parse_errors_exit_two() {
    let out = dlaf(&["eval", "x:="]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("1:4"));
    assert_eq!(dlaf(&["eval", "--init", "x=", "x:=1"]).status.code(), Some(2));
    assert_eq!(dlaf(&["classify", "--occ", "zz", "x:=1"]).status.code(), Some(2));
    assert_eq!(dlaf(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(dlaf(&["pga-canon", "+a;#"]).status.code(), Some(2));
}

#[test]
fn divergence_and_abort_differ() {
    let out = dlaf(&["eval", "--max-steps", "50", "(?(T))*; ?(F)"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("suspected divergence"));
    let (v, code) = json_of(&["eval", "?(F)"]);
    assert_eq!((code, v["outcome"].clone(), v["final"].clone()), (0, json!("failed"), Value::Null));
}

#[test]
fn text_carries_the_json_content() {
    let args = ["effects", "--init", "x=0,y=0", &data("running.dl")];
    let (v, _) = json_of(&args);
    let mut targs = args.to_vec();
    targs.extend(["--format", "text"]);
    let text = String::from_utf8(dlaf(&targs).stdout).unwrap();
    let shown = |val: &Value| match val {
        Value::String(s) => s.clone(),
        other => other.to_string(),
    };
    for (k, val) in v.as_object().unwrap() {
        match val {
            // lists of records get one line per record
            Value::Array(items) if items.first().is_some_and(Value::is_object) => {
                assert!(text.contains(&format!("{k}:\n")), "{k}\n{text}");
                for it in items {
                    let fields: Vec<String> =
                        it.as_object().unwrap().iter().map(|(a, b)| format!("{a}={}", shown(b))).collect();
                    assert!(text.contains(&format!("  {}\n", fields.join(" "))), "{text}");
                }
            }
            _ => assert!(text.contains(&format!("{k}: {}", shown(val))), "{k}\n{text}"),
        }
    }
}

#[test]
fn scl_check_reports() {
    let (v, code) = json_of(&["scl-check", "--trials", "40", "CP1", "SCL3", "CPmem"]);
    assert_eq!(code, 0);
    assert_eq!(v["passed"], true);
    let schemas = v["schemas"].as_array().unwrap();
    assert_eq!(schemas.len(), 3);
    assert_eq!(schemas[2]["expected_valid"], false);
    assert!(schemas[2]["witness"]["lhs"].is_string());
    assert_eq!(dlaf(&["scl-check", "NOPE"]).status.code(), Some(2));
    let (v, _) = json_of(&["scl-check", "--trials", "20", "--schema", "RP1"]);
    assert_eq!(v["schemas"][0]["schema"], "RP1");
}

#[test]
fn pga_pipeline() {
    let (v, _) = json_of(&["pga-canon", "(a;b)^w;c"]);
    assert_eq!(v["first"], "(a; b)^w");
    let (v, _) = json_of(&["pga-canon", "#0;a"]);
    assert_eq!(v["second"], "#0; a");
    let (v, _) = json_of(&["pga-behave", "#0;a"]);
    assert_eq!(v["behavior"], "D");
    let (v, _) = json_of(&["pga-behave", "+a;b;!"]);
    assert_eq!(v["behavior"], "b ∘ S ⊴ a ⊵ S");
    let (v, _) = json_of(&["pga-project", "+(a && b); c; !"]);
    assert_eq!(v["projected"], "u(+a; u(+b; #2); #2); c; !");
    let x1 = "+([x:=x+1]T && x=2); u(w[x=2]; !); w[x!=2]; !";
    let (v, code) = json_of(&["pga-similar", "--init", "x=1", x1]);
    assert_eq!((code, v["similar"].clone(), v["applicable"].clone()), (0, json!(true), json!(true)));
    let (v, _) = json_of(&["pga-translate", "x:=1"]);
    assert_eq!(v["translation"], "x:=1; ?(F)");
    assert_eq!(dlaf(&["pga-translate", "(a)^w"]).status.code(), Some(1));
}

#[test]
fn oracle_check_agrees() {
    let (v, code) = json_of(&["oracle-check", "--trials", "150", "--seed", "3"]);
    assert_eq!(code, 0);
    assert_eq!(v["agree"], 150);
    assert_eq!(v["mismatch"], Value::Null);
}
