//! End-to-end checks of the command line binary, including byte-identical
//! output across repeated invocations.

use std::process::Command;

fn linematch(args: &[&str]) -> (Vec<u8>, bool) {
    let out = Command::new(env!("CARGO_BIN_EXE_linematch"))
        .args(args)
        .output()
        .expect("binary runs");
    (out.stdout, out.status.success())
}

#[test]
fn gen_run_pipeline_is_deterministic() {
    let dir = std::env::temp_dir().join("linematch-cli-test");
    std::fs::create_dir_all(&dir).unwrap();
    let inst = dir.join("instance.json");
    let inst_arg = inst.to_str().unwrap();

    let (gen_a, ok) = linematch(&["gen", "--gen", "clustered", "--n", "12", "--seed", "3"]);
    assert!(ok);
    let (gen_b, _) = linematch(&["gen", "--gen", "clustered", "--n", "12", "--seed", "3"]);
    assert_eq!(gen_a, gen_b);

    let (_, ok) = linematch(&[
        "gen", "--gen", "clustered", "--n", "12", "--seed", "3", "--out", inst_arg,
    ]);
    assert!(ok);
    for algo in ["greedy", "harmonic", "dh", "mdh"] {
        let args = ["run", "--instance", inst_arg, "--algo", algo, "--seed", "11"];
        let (a, ok) = linematch(&args);
        assert!(ok, "{algo} run failed");
        let (b, _) = linematch(&args);
        assert_eq!(a, b, "{algo} transcript not byte-identical");
        assert!(!a.is_empty());
    }
}

#[test]
fn sweep_is_deterministic_in_both_formats() {
    for format in ["json", "csv"] {
        let args = [
            "sweep", "--gen", "uniform", "--n", "8,12", "--trials", "4", "--seed", "2", "--algo",
            "mdh,greedy", "--format", format,
        ];
        let (a, ok) = linematch(&args);
        assert!(ok);
        let (b, _) = linematch(&args);
        assert_eq!(a, b, "{format} sweep not byte-identical");
    }
}

#[test]
fn verify_quick_is_deterministic_and_green() {
    let args = ["verify", "--level", "quick", "--seed", "1", "--format", "json"];
    let (a, ok) = linematch(&args);
    assert!(ok, "quick battery must pass");
    let (b, ok_b) = linematch(&args);
    assert!(ok_b);
    assert_eq!(a, b, "verify output not byte-identical");
}

#[test]
fn counterexample_passes() {
    let (out, ok) = linematch(&["counterexample"]);
    assert!(ok);
    let text = String::from_utf8(out).unwrap();
    assert!(text.contains("PASS"));
    assert!(text.contains("4/11"));
}

#[test]
fn strict_validation_rejects_bad_instances() {
    let dir = std::env::temp_dir().join("linematch-cli-test");
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("bad.json");
    std::fs::write(&path, r#"{"servers": [0.0, 0.5], "requests": [0.0, 0.5]}"#).unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_linematch"))
        .args(["run", "--instance", path.to_str().unwrap(), "--strict"])
        .output()
        .unwrap();
    assert!(!out.status.success());
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("strict"), "unexpected stderr: {err}");
}
