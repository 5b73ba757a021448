use std::io::Write;
use std::process::{Command, Output};

use serde_json::Value;

const TREFOIL: &str = "X[1,4,2,5] X[3,6,4,1] X[5,2,6,3]";
const KINK: &str = "X[1,1,2,2]";
const FIGURE_EIGHT: &str = "X[4,2,5,1] X[8,6,1,5] X[6,3,7,4] X[2,7,3,8]";

fn cli(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_spantree-hfk")).args(args).output().expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

#[test]
fn trefoil_json_report() {
    let out = cli(&["--pd", TREFOIL, "--json"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["ranks"], serde_json::json!({"-1": 3}));
    assert_eq!(v["total_rank"], 3);
    assert_eq!(v["thin"], true);
    assert_eq!(v["checks"]["d_squared"], true);
    assert!(v["timings"].is_object());

    let mirrored = json(&cli(&["--pd", TREFOIL, "--json", "--mirror"]));
    assert_eq!(mirrored["ranks"], serde_json::json!({"1": 3}));
}

#[test]
fn json_keys_keep_numeric_order() {
    let v = json(&cli(&["--pd", FIGURE_EIGHT, "--json", "--no-timings"]));
    let keys: Vec<&String> = v["chain_dims"].as_object().unwrap().keys().collect();
    let mut sorted = keys.clone();
    sorted.sort_by_key(|k| k.parse::<i64>().unwrap());
    assert_eq!(keys, sorted);
}

#[test]
fn kink_full_checks() {
    let out = cli(&["--pd", KINK, "--check", "full", "--json"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let v = json(&out);
    assert_eq!(v["total_rank"], 1);
    for key in ["d_squared", "well_defined", "nu_law", "matrix_tree", "tree_enumeration"] {
        assert_eq!(v["checks"][key], true, "{key}");
    }
}

#[test]
fn non_generic_omega_exits_2_with_witness() {
    let out = cli(&["--pd", TREFOIL, "--omega", "1,2,3"]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("not generic"), "{err}");
    assert!(err.contains('['), "witness missing: {err}");
}

#[test]
fn negative_weights_accepted() {
    let out = cli(&["--pd", TREFOIL, "--omega", "-3,5,17", "--json"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["ranks"], serde_json::json!({"-1": 3}));
}

#[test]
fn malformed_input_exits_1() {
    assert_eq!(cli(&["--pd", "X[1,2,3]"]).status.code(), Some(1));
    assert_eq!(cli(&["--pd", TREFOIL, "--omega", "1,x"]).status.code(), Some(1));
    assert_eq!(cli(&[]).status.code(), Some(1));
    assert_eq!(cli(&["--help"]).status.code(), Some(0));
}

#[test]
fn output_is_deterministic_without_timings() {
    let args = ["--pd", FIGURE_EIGHT, "--json", "--no-timings", "--dump-trees"];
    let a = cli(&args);
    let b = cli(&[&args[..], &["--threads", "1"]].concat());
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    assert!(json(&a).get("timings").is_none());
}

#[test]
fn rank_strategies_agree() {
    let a = json(&cli(&["--pd", FIGURE_EIGHT, "--json", "--no-timings", "--rank", "auto"]));
    let b = json(&cli(&["--pd", FIGURE_EIGHT, "--json", "--no-timings", "--rank", "fraction-free"]));
    assert_eq!(a["ranks"], b["ranks"]);
    assert_eq!(a["ranks"], serde_json::json!({"0": 5}));
}

#[test]
fn file_input_reports_every_entry() {
    let mut f = tempfile::NamedTempFile::new().unwrap();
    writeln!(f, "# small knots").unwrap();
    writeln!(f, "3_1: {TREFOIL}").unwrap();
    writeln!(f).unwrap();
    writeln!(f, "4_1: {FIGURE_EIGHT}").unwrap();
    let out = cli(&["--file", f.path().to_str().unwrap(), "--json", "--no-timings"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    let entries = v.as_array().unwrap();
    assert_eq!(entries.len(), 2);
    assert_eq!(entries[0]["name"], "3_1");
    assert_eq!(entries[1]["report"]["total_rank"], 5);

    let table = cli(&["--file", f.path().to_str().unwrap()]);
    let text = String::from_utf8_lossy(&table.stdout);
    assert!(text.contains("3_1:") && text.contains("4_1:"), "{text}");
}

#[test]
fn file_with_bad_entry_keeps_going() {
    let mut f = tempfile::NamedTempFile::new().unwrap();
    writeln!(f, "bad: X[1,2,3,4]").unwrap();
    writeln!(f, "3_1: {TREFOIL}").unwrap();
    let out = cli(&["--file", f.path().to_str().unwrap(), "--json"]);
    assert_eq!(out.status.code(), Some(1));
    let v = json(&out);
    assert!(v[0]["error"].is_string());
    assert_eq!(v[1]["report"]["total_rank"], 3);
}

#[test]
fn marking_file_and_uniform_marking() {
    let mut f = tempfile::NamedTempFile::new().unwrap();
    write!(f, r#"{{"points_per_arc": {{"1": 2, "4": 3}}}}"#).unwrap();
    let out = cli(&["--pd", TREFOIL, "--marking", f.path().to_str().unwrap(), "--json"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let v = json(&out);
    assert_eq!(v["diagram"]["m"], 9);
    assert_eq!(v["ranks"], serde_json::json!({"-1": 3}));

    let v = json(&cli(&["--pd", TREFOIL, "--points-per-arc", "2", "--json"]));
    assert_eq!(v["diagram"]["m"], 12);
    assert_eq!(v["ranks"], serde_json::json!({"-1": 3}));
}

#[test]
fn dump_complex_lists_pairs() {
    let v = json(&cli(&["--pd", FIGURE_EIGHT, "--json", "--dump-complex"]));
    assert!(v["complex"].is_object());
}
