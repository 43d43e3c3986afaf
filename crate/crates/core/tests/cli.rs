use std::path::PathBuf;
use std::process::{Command, Output};

fn data(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data").join(name).display().to_string()
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ihdual")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn ih_prints_one_row_per_perversity() {
    let o = run(&["ih", &data("ST2.json"), "--perversity", "grid"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.starts_with("perversity\tH_0\tH_1\tH_2\tH_3\n"), "{out}");
    assert!(out.contains("zero{0:0,1:0}\t1\t2\t0\t1\n"), "{out}");
    assert!(out.contains("upper-middle{0:1,1:1}\t1\t0\t2\t1\n"), "{out}");
}

#[test]
fn mod_two_homology_of_the_projective_plane() {
    let o = run(&["ih", "corpus:RP2", "--field", "p:2", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).expect("json");
    assert_eq!(v[0]["dims"], serde_json::json!({"0": 1, "1": 1, "2": 1}), "{v}");
}

#[test]
fn torus_pairing_is_the_symplectic_form() {
    let o = run(&["pairing", "corpus:T2", "--degrees", "1", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).expect("json");
    assert_eq!(v[0]["matrix"], serde_json::json!([["0", "1"], ["-1", "0"]]));
    assert_eq!(v[0]["determinant"], "1");
}

#[test]
fn dual_check_passes_on_a_space_file() {
    let o = run(&["dual-check", &data("T2.json"), "--subdiv-limit", "0"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let out = stdout(&o);
    assert!(!out.contains("defect-witness"));
    assert!(out.contains("triangle-I\tT2\tq"));
}

#[test]
fn cone_and_sign_checks_pass() {
    assert_eq!(run(&["cone-check", "--field", "p:3"]).status.code(), Some(0));
    let o = run(&["signcalc-test", "--trials", "20", "--degrees", "0..3", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).expect("json");
    assert_eq!(v.as_array().map(|a| a.len()), Some(32));
}

#[test]
fn invalid_input_exits_2_with_a_simplex() {
    let o = run(&["validate", &data("lone_triangle.json")]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("offending simplex: [0,1]"));
    assert!(stdout(&o).contains("violation\tNotPseudomanifold at [0,1]"));

    for args in [
        &["ih", "corpus:T2", "--field", "p:4"][..],
        &["ih", "corpus:nowhere"],
        &["ih", "corpus:T2", "--perversity", "sideways"],
        &["ih", "/no/such/file.json"],
    ] {
        assert_eq!(run(args).status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn subdivide_round_trips_through_a_file() {
    let dir = std::env::temp_dir().join(format!("ihdual-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let out = dir.join("sd.json");
    let o = run(&["subdivide", "corpus:S1", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let o = run(&["ih", out.to_str().unwrap()]);
    assert_eq!(stdout(&o).lines().nth(1), Some("zero{}\t1\t1"));
    let o = run(&["validate", out.to_str().unwrap()]);
    assert!(stdout(&o).contains("f_vector\t6 6"), "{}", stdout(&o));
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn reports_are_reproducible() {
    let args = ["dual-check", "corpus:S2", "corpus:RP2", "--format", "json", "--seed", "5"];
    assert_eq!(stdout(&run(&args)), stdout(&run(&args)));
}
