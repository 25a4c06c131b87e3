//! End-to-end runs of the command-line binary.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_substruct"))
}

fn fixtures() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures")
}

fn tmp_dir(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("substruct_cli_{name}"));
    let _ = std::fs::remove_dir_all(&dir);
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn ok(out: &Output) {
    assert!(
        out.status.success(),
        "stdout: {}\nstderr: {}",
        String::from_utf8_lossy(&out.stdout),
        String::from_utf8_lossy(&out.stderr)
    );
}

#[test]
fn shipped_fixture_matches_the_builtin_benchmark() {
    use substruct::io::{load_model, LoadedModel};
    use substruct::lumped::testcase;
    let LoadedModel::Lumped(sys) = load_model(fixtures().join("component_a.json")).unwrap() else {
        panic!("component_a.json is not a lumped file");
    };
    assert_eq!(sys, testcase::component_a::<f64>());
    let LoadedModel::Lumped(mono) = load_model(fixtures().join("monolith.json")).unwrap() else {
        panic!("monolith.json is not a lumped file");
    };
    assert_eq!(mono, testcase::assembled_monolith::<f64>());
}

#[test]
fn build_frf_invsub_couple_compare_flow() {
    let dir = tmp_dir("flow");
    let p = |n: &str| dir.join(n).to_str().unwrap().to_string();
    let fx = |n: &str| fixtures().join(n).to_str().unwrap().to_string();

    // coupling-form displacement models, double differentiated
    for (file, disp, acc) in [
        ("component_a.json", "a_disp.json", "a_acc.json"),
        ("component_b.json", "b_disp.json", "b_acc.json"),
    ] {
        ok(&bin()
            .args([
                "build-model", &fx(file), "--kind", "displacement", "--coupling-form",
                "-o", &p(disp),
            ])
            .output()
            .unwrap());
        ok(&bin()
            .args(["differentiate", &p(disp), "--times", "2", "-o", &p(acc)])
            .output()
            .unwrap());
    }

    // identified element models, coupling form, shared residue
    ok(&bin()
        .args([
            "invsub", &fx("mount_m1_fixtures.json"), "--side1", "T1", "--side2", "T2",
            "--epsilon", "1e-4", "--coupling-form", "-o", &p("ce1.json"),
        ])
        .output()
        .unwrap());
    ok(&bin()
        .args([
            "invsub", &fx("mount_m2_fixtures.json"), "--side1", "T3", "--side2", "T4",
            "--epsilon", "1e-4", "--coupling-form", "-o", &p("ce2.json"),
        ])
        .output()
        .unwrap());

    // full and minimal-order coupled models
    ok(&bin()
        .args([
            "couple", "--method", "relaxed",
            "--components", &p("a_acc.json"), &p("b_acc.json"),
            "--ces", &p("ce1.json"), &p("ce2.json"),
            "--pairs", "a2:p1", "a3:p2",
            "--reduce", "none", "-o", &p("coupled.json"),
        ])
        .output()
        .unwrap());
    ok(&bin()
        .args([
            "couple", "--method", "relaxed",
            "--components", &p("a_acc.json"), &p("b_acc.json"),
            "--ces", &p("ce1.json"), &p("ce2.json"),
            "--pairs", "a2:p1", "a3:p2",
            "--reduce", "lt", "-o", &p("coupled_min.json"),
        ])
        .output()
        .unwrap());

    // state counts on disk
    let full: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(p("coupled.json")).unwrap()).unwrap();
    let min: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(p("coupled_min.json")).unwrap()).unwrap();
    assert_eq!(full["a"].as_array().unwrap().len(), 22);
    assert_eq!(min["a"].as_array().unwrap().len(), 18);

    // reduction preserves the FRF within 1e-9
    for (model, csv) in [("coupled.json", "full.csv"), ("coupled_min.json", "min.csv")] {
        ok(&bin()
            .args([
                "frf", &p(model), "--fmin", "0.5", "--fmax", "50", "--lines", "256",
                "-o", &p(csv),
            ])
            .output()
            .unwrap());
    }
    let out = bin()
        .args(["compare", &p("full.csv"), &p("min.csv"), "--tol", "1e-9"])
        .output()
        .unwrap();
    ok(&out);
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["pass"], serde_json::Value::Bool(true));

    // a hopeless tolerance flips the exit code
    let strict = bin()
        .args(["compare", &p("full.csv"), &p("min.csv"), "--tol", "1e-18"])
        .output()
        .unwrap();
    assert_eq!(strict.status.code(), Some(1));
}

#[test]
fn invert_negate_round_trip_via_files() {
    let dir = tmp_dir("inv");
    let p = |n: &str| dir.join(n).to_str().unwrap().to_string();
    let fx = fixtures().join("mount_m1_fixtures.json").to_str().unwrap().to_string();
    ok(&bin()
        .args(["build-model", &fx, "--kind", "acceleration", "-o", &p("acc.json")])
        .output()
        .unwrap());
    ok(&bin().args(["invert", &p("acc.json"), "-o", &p("inv.json")]).output().unwrap());
    ok(&bin().args(["negate", &p("inv.json"), "-o", &p("neg.json")]).output().unwrap());
    ok(&bin().args(["negate", &p("neg.json"), "-o", &p("neg2.json")]).output().unwrap());
    // negation is an exact involution, byte-for-byte in the file format
    assert_eq!(
        std::fs::read_to_string(p("inv.json")).unwrap(),
        std::fs::read_to_string(p("neg2.json")).unwrap()
    );
}

#[test]
fn decouple_primal_recovers_element_like_library() {
    let dir = tmp_dir("dec");
    let p = |n: &str| dir.join(n).to_str().unwrap().to_string();
    // assembly and fixture masses as apparent-mass models
    let asm = substruct::lumped::testcase::mount_m1_with_fixtures::<f64>()
        .apparent_mass_model(None)
        .unwrap();
    substruct::io::save_state_space(p("asm.json"), &asm).unwrap();
    let fix = substruct::lumped::LumpedSystem::<f64>::new(
        "fix",
        vec![substruct::lumped::LumpedNode {
            name: "F".into(),
            mass: 2.0,
            grounded_spring: None,
        }],
        vec![],
        vec!["F".to_string()],
    )
    .unwrap();
    substruct::io::save_lumped(p("fix.json"), &fix).unwrap();
    ok(&bin()
        .args(["build-model", &p("fix.json"), "--kind", "apparent-mass", "-o", &p("fix_inv.json")])
        .output()
        .unwrap());
    // remove the same fixture twice (two interface DOFs)
    std::fs::copy(p("fix_inv.json"), p("fix_inv2.json")).unwrap();
    // rename second copy's structure to keep labels unique
    let mut v: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(p("fix_inv2.json")).unwrap()).unwrap();
    v["name"] = "fix2".into();
    for io in ["outputs", "inputs"] {
        v[io][0]["structure"] = "fix2".into();
    }
    std::fs::write(p("fix_inv2.json"), serde_json::to_string_pretty(&v).unwrap()).unwrap();

    ok(&bin()
        .args([
            "decouple", "--method", "primal",
            "--assembly", &p("asm.json"),
            "--remove", &p("fix_inv.json"), &p("fix_inv2.json"),
            "--pairs", "T1:fix/F", "T2:fix2/F",
            "-o", &p("mount.json"),
        ])
        .output()
        .unwrap());
    let v: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(p("mount.json")).unwrap()).unwrap();
    assert_eq!(v["a"].as_array().unwrap().len(), 8);
    assert_eq!(v["output_kind"], "force");
}

#[test]
fn shipped_pipeline_passes() {
    let cfg = fixtures().join("pipeline_verify.json");
    let out = bin().args(["pipeline", cfg.to_str().unwrap()]).output().unwrap();
    ok(&out);
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["pass"], serde_json::Value::Bool(true));
    assert!(report["steps"].as_array().unwrap().len() >= 20);
}

#[test]
fn miswired_pipeline_fails_with_located_worst_entry() {
    // same chain as the shipped pipeline but with the mounts wired to the
    // wrong component DOFs on the oracle side
    let dir = tmp_dir("neg");
    for f in [
        "component_a.json",
        "component_b.json",
        "mount_m1_fixtures.json",
        "mount_m2_fixtures.json",
    ] {
        std::fs::copy(fixtures().join(f), dir.join(f)).unwrap();
    }
    let cfg_text = std::fs::read_to_string(fixtures().join("pipeline_verify.json")).unwrap();
    let mut cfg: serde_json::Value = serde_json::from_str(&cfg_text).unwrap();
    let steps = cfg["steps"].as_array_mut().unwrap();
    for s in steps.iter_mut() {
        if s["op"] == "oracle_couple_relaxed" {
            s["pairs"] = serde_json::json!([["a2", "p2"], ["a3", "p1"]]);
        }
        if s["op"] == "write_frf" {
            s["path"] = serde_json::json!("out.csv");
        }
    }
    let cfg_path = dir.join("bad.json");
    std::fs::write(&cfg_path, serde_json::to_string_pretty(&cfg).unwrap()).unwrap();

    let out = bin().args(["pipeline", cfg_path.to_str().unwrap()]).output().unwrap();
    assert_eq!(out.status.code(), Some(1), "{}", String::from_utf8_lossy(&out.stderr));
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["pass"], serde_json::Value::Bool(false));
    let failed = report["steps"]
        .as_array()
        .unwrap()
        .iter()
        .find(|s| s["op"] == "compare" && s["pass"] == serde_json::Value::Bool(false))
        .expect("a compare step failed");
    assert!(failed["metrics"]["max_rel_error"].as_f64().unwrap() > 1e-8);
    assert!(failed["metrics"]["worst_output"].is_string());
    assert!(failed["metrics"]["worst_freq_hz"].is_number());
}

#[test]
fn empty_pipeline_reports_success() {
    let dir = tmp_dir("empty");
    let cfg = dir.join("empty.json");
    std::fs::write(&cfg, r#"{ "steps": [] }"#).unwrap();
    let out = bin().args(["pipeline", cfg.to_str().unwrap()]).output().unwrap();
    ok(&out);
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["pass"], serde_json::Value::Bool(true));
    assert_eq!(report["steps"].as_array().unwrap().len(), 0);
}

#[test]
fn noise_is_reproducible_per_seed() {
    let dir = tmp_dir("noise");
    let p = |n: &str| dir.join(n).to_str().unwrap().to_string();
    let fx = fixtures().join("mount_m1_fixtures.json").to_str().unwrap().to_string();
    ok(&bin()
        .args(["build-model", &fx, "--kind", "acceleration", "-o", &p("acc.json")])
        .output()
        .unwrap());
    ok(&bin()
        .args(["frf", &p("acc.json"), "--lines", "64", "-o", &p("h.csv")])
        .output()
        .unwrap());
    for out in ["n1.csv", "n2.csv"] {
        ok(&bin()
            .args([
                "noise", &p("h.csv"), "--sigma", "5e-3", "--seed", "42", "-o", &p(out),
            ])
            .output()
            .unwrap());
    }
    assert_eq!(
        std::fs::read_to_string(p("n1.csv")).unwrap(),
        std::fs::read_to_string(p("n2.csv")).unwrap()
    );
    // noisy vs clean exceeds a tight tolerance
    let cmp = bin()
        .args(["compare", &p("h.csv"), &p("n1.csv"), "--tol", "1e-9"])
        .output()
        .unwrap();
    assert_eq!(cmp.status.code(), Some(1));
}

#[test]
fn thread_cap_env_var_is_accepted() {
    let dir = tmp_dir("threads");
    let p = |n: &str| dir.join(n).to_str().unwrap().to_string();
    let fx = fixtures().join("component_a.json").to_str().unwrap().to_string();
    let out = bin()
        .env("SUBSTRUCT_THREADS", "1")
        .args(["build-model", &fx, "--kind", "acceleration", "-o", &p("a.json")])
        .output()
        .unwrap();
    ok(&out);
    let out = bin()
        .env("SUBSTRUCT_THREADS", "1")
        .args(["frf", &p("a.json"), "--lines", "32", "-o", &p("a.csv")])
        .output()
        .unwrap();
    ok(&out);
}
