use std::path::PathBuf;
use std::process::{Command, Output};

fn qfa(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qfa"))
        .args(args)
        .env_remove("QFA_EPSILON")
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn scratch(tag: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("qfa-cli-{tag}-{}", std::process::id()));
    let _ = std::fs::remove_dir_all(&dir);
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

#[test]
fn classify_reports_json() {
    let dir = scratch("classify");
    assert!(qfa(&["demo", "--out", dir.to_str().unwrap()]).status.success());
    let coin = dir.join("coin-pfa.json");
    let out = qfa(&["--json", "classify", "--machine", coin.to_str().unwrap(), "--word", "a", "--cutpoint", "1/2"]);
    assert!(out.status.success());
    let report: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(report["value"], "1/2");
    assert_eq!(report["cell"], "equal");
    assert_eq!(report["member"], false);
}

#[test]
fn pfa_to_nqfa_recognises_the_unequal_cell() {
    let dir = scratch("nqfa");
    let pfa = dir.join("p.json");
    std::fs::write(
        &pfa,
        r#"{"kind":"pfa","scalar":"rational","alphabet":["a","b"],"n":2,
            "matrices":{"a":[["1/2","1/2"],["0","1"]],"b":[["1","0"],["1/2","1/2"]]},"accepting":[1]}"#,
    )
    .unwrap();
    let nqfa = dir.join("q.json");
    let built = qfa(&["build", "pfa2nqfa", "--in", pfa.to_str().unwrap(), "--out", nqfa.to_str().unwrap()]);
    assert!(built.status.success(), "{}", String::from_utf8_lossy(&built.stderr));
    // f(a) = 1/2
    let on_half = qfa(&["simulate", "--machine", nqfa.to_str().unwrap(), "--word", "a"]);
    let v: f64 = stdout(&on_half).trim().parse().unwrap();
    assert!(v.abs() <= 1e-12, "{v}");
    let off_half = qfa(&["simulate", "--machine", nqfa.to_str().unwrap(), "--word", "aa"]);
    let v: f64 = stdout(&off_half).trim().parse().unwrap();
    assert!(v > 0.0);
}

#[test]
fn homomorphic_image_of_word_problem_is_built() {
    let dir = scratch("hom");
    let wp = dir.join("wp.json");
    let img = dir.join("img.json");
    assert!(qfa(&["build", "wp-gpfa", "--k", "2", "--out", wp.to_str().unwrap()]).status.success());
    let out = qfa(&[
        "--json", "build", "hom", "--in", wp.to_str().unwrap(),
        "--map", "g1=a", "--map", "G1=aa", "--map", "g2=", "--map", "G2=",
        "--target", "a", "--padding", "2,2", "--out", img.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let summary: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(summary["kind"], "gpfa");
    assert!(qfa(&["simulate", "--machine", img.to_str().unwrap(), "--word", "aaa"]).status.success());
}

#[test]
fn mismatched_padding_is_a_usage_error() {
    let dir = scratch("padding");
    let wp = dir.join("wp.json");
    assert!(qfa(&["build", "wp-gpfa", "--k", "2", "--out", wp.to_str().unwrap()]).status.success());
    let out = qfa(&[
        "build", "hom", "--in", wp.to_str().unwrap(),
        "--map", "g1=a", "--map", "G1=a", "--map", "g2=", "--map", "G2=", "--target", "a",
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn epsilon_comes_from_the_environment() {
    let out = Command::new(env!("CARGO_BIN_EXE_qfa"))
        .args(["dieu", "--oracle", "pal", "--y", "a", "--n", "2"])
        .env("QFA_EPSILON", "-1")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}
