use std::path::PathBuf;
use std::process::{Command, Output};

fn cnl(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cnl")).args(args).output().expect("spawn cnl")
}

fn data(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/data").join(name).to_string_lossy().into_owned()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json(o: &Output) -> serde_json::Value {
    serde_json::from_slice(&o.stdout).expect("json output")
}

#[test]
fn value_of_canonical_chsh() {
    let o = cnl(&["value", "chsh", "canonical"]);
    assert!(o.status.success());
    let s = stdout(&o);
    assert!(s.contains("quantum   0.853553"), "{s}");
    assert!(s.contains("classical 0.750000"), "{s}");
    assert!(s.contains("compiled  0.853553"), "{s}");
}

#[test]
fn value_of_constant_strategy_as_json() {
    let o = cnl(&["value", "chsh", "constant-zero", "--json"]);
    assert!(o.status.success());
    let v = json(&o);
    assert_eq!(v["compiled"].as_f64().unwrap(), 0.75);
    assert_eq!(v["classical"].as_f64().unwrap(), 0.75);
}

#[test]
fn verify_mixed_hamiltonian_passes() {
    let o = cnl(&["verify", &data("mixed.json"), "--alpha", "-1", "--beta", "-0.5", "--seed", "5", "--trials", "20000"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(stdout(&o).contains("soundness diagnostics: honest"));
}

#[test]
fn verify_rejects_empty_promise_gap() {
    let o = cnl(&["verify", &data("mixed.json"), "--alpha", "0", "--beta", "-1", "--seed", "1"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("β > α"));
}

#[test]
fn verify_requires_a_seed() {
    let o = cnl(&["verify", &data("mixed.json"), "--alpha", "-1", "--beta", "-0.5"]);
    assert!(!o.status.success());
}

#[test]
fn z_only_hamiltonian_with_basis_witness() {
    let args = [
        "verify",
        &data("zterm.json"),
        "--alpha",
        "-1",
        "--beta",
        "-0.5",
        "--witness",
        "basis:01",
        "--kappa",
        "1",
        "--seed",
        "3",
        "--json",
    ];
    let o = cnl(&args);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    let teleport = v["report"]["completeness"]["values"]["teleport"].as_f64().unwrap();
    assert!((teleport - 1.0).abs() < 1e-12, "{teleport}");
    assert!(v["report"]["soundness"].is_null());
    // Same seed, same bytes.
    assert_eq!(cnl(&args).stdout, o.stdout);
}

#[test]
fn certify_honest_chsh() {
    let o = cnl(&["certify", "honest"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(!stdout(&o).contains("FAIL"));
}

#[test]
fn compile_run_writes_transcripts() {
    let path = std::env::temp_dir().join(format!("cnl-transcripts-{}.jsonl", std::process::id()));
    let o = cnl(&["compile-run", "chsh", "canonical", "--trials", "300", "--seed", "4", "--transcripts", path.to_str().unwrap()]);
    assert!(o.status.success());
    let text = std::fs::read_to_string(&path).unwrap();
    std::fs::remove_file(&path).ok();
    assert_eq!(text.lines().count(), 300);
    for line in text.lines() {
        let t: serde_json::Value = serde_json::from_str(line).unwrap();
        let (x, y, a, b) = (t["x"].as_u64().unwrap(), t["y"].as_u64().unwrap(), t["a"].as_u64().unwrap(), t["b"].as_u64().unwrap());
        assert_eq!(t["accepted"].as_bool().unwrap(), (a ^ b) == (x & y));
    }
}

#[test]
fn sweep_emits_csv() {
    let o = cnl(&["certify", "depolarized", "--sweep", "4", "--csv"]);
    assert!(o.status.success(), "{}", stdout(&o));
    let s = stdout(&o);
    assert!(s.lines().count() >= 5, "{s}");
}
