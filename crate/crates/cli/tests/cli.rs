use std::process::{Command, Output};

fn dg2(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dg2")).args(args).output().expect("spawn dg2")
}

fn json(o: &Output) -> serde_json::Value {
    serde_json::from_slice(&o.stdout).expect("stdout is JSON")
}

fn tmp(name: &str, body: &str) -> std::path::PathBuf {
    let dir = std::env::temp_dir().join(format!("dg2-test-{}-{name}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let f = dir.join("scenario.json");
    std::fs::write(&f, body).unwrap();
    f
}

#[test]
fn packet_on_unramified_p5_example() {
    let o = dg2(&["packet", "--p", "5", "--extension", "unramified", "--json"]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    assert_eq!(v["command"], "packet");
    assert_eq!(v["result"]["s_group_g2"], 1);
    assert_eq!(v["result"]["g2_members"][0]["kind"], "InducedFromQ2");
    assert_eq!(v["result"]["satake"]["g2"]["dim"], 7);
    assert_eq!(v["canonical"]["u"], 2);
    assert!(v["canonical"]["tie_breaks"].as_array().unwrap().len() >= 3);
}

#[test]
fn rewrite_ends_at_q2_det() {
    let v = json(&dg2(&["rewrite", "--json"]));
    assert_eq!(v["result"]["result"], "i_Q2(mu o det)");
    assert_eq!(v["result"]["all_verified"], true);
}

#[test]
fn schema_violation_names_the_field() {
    let f = tmp("bad", r#"{"p": 5, "place": "nonsplit", "extension": "unramified", "chi": {"kind": "explicit", "conductor": 1, "unit_images": ["1/2"], "uniformizer_value": 7}}"#);
    let o = dg2(&["packet", "--scenario", f.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("chi.uniformizer_value"), "{err}");
}

#[test]
fn unknown_field_rejected() {
    let f = tmp("unknown", r#"{"p": 5, "place": "split", "chi": {"kind": "trivial"}, "colour": 1}"#);
    let o = dg2(&["classify", "--scenario", f.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("colour"));
}

#[test]
fn domain_errors_exit_one() {
    assert_eq!(dg2(&["packet", "--p", "4"]).status.code(), Some(1));
    assert_eq!(dg2(&["packet", "--p", "5", "--extension", "nope"]).status.code(), Some(1));
    assert_eq!(dg2(&["packet"]).status.code(), Some(1));
    assert_eq!(dg2(&["rewrite", "--expr", "(rewrite (Q3 mu mu))"]).status.code(), Some(1));
    assert_eq!(dg2(&["selftest", "--suite", "12"]).status.code(), Some(1));
}

#[test]
fn precision_flag_is_echoed() {
    let v = json(&dg2(&["classify", "--p", "7", "--extension", "ramified-p", "--precision", "12", "--json"]));
    assert_eq!(v["scenario"]["overrides"]["precision"], 12);
    assert_eq!(dg2(&["classify", "--p", "7", "--precision", "2"]).status.code(), Some(1));
}

#[test]
fn text_output_is_flat() {
    let o = dg2(&["satake", "--p", "7", "--chi-z", "1/3"]);
    assert_eq!(o.status.code(), Some(0));
    let s = String::from_utf8(o.stdout).unwrap();
    assert!(s.lines().any(|l| l.starts_with("command: ")));
    assert!(s.lines().all(|l| l.contains(": ")));
}

#[test]
fn cubic_report() {
    let v = json(&dg2(&["cubic", "--p", "5", "1", "0", "-1", "0", "--lambda", "1", "--lambda", "1/5", "--json"]));
    assert_eq!(v["result"]["disc"], "4");
    assert_eq!(v["result"]["generic"], true);
    let labels: Vec<i64> = v["result"]["orbit_demos"].as_array().unwrap().iter().map(|d| d["label"].as_i64().unwrap()).collect();
    assert_eq!(labels, [0, 1]);
}

#[test]
fn fixture_directory_override() {
    let dir = std::env::temp_dir().join(format!("dg2-fixtures-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    std::fs::write(dir.join("only.json"), r#"{"name": "only", "p": 3, "place": "split", "chi": {"kind": "trivial"}}"#).unwrap();
    let run = |name: &str| {
        Command::new(env!("CARGO_BIN_EXE_dg2"))
            .env("DG2_FIXTURES", &dir)
            .args(["classify", "--fixture", name])
            .output()
            .unwrap()
    };
    assert_eq!(run("only").status.code(), Some(0));
    assert_eq!(run("01_split_p5_trivial").status.code(), Some(1));
}

#[test]
fn selftest_single_suite() {
    let o = dg2(&["selftest", "--suite", "6", "--json"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(json(&o)["result"]["passed"], true);
}

#[test]
fn usage_errors_exit_one() {
    assert_eq!(dg2(&["packet", "--bogus"]).status.code(), Some(1));
    assert_eq!(dg2(&["--help"]).status.code(), Some(0));
}
