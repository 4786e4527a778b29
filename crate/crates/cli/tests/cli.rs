//! End-to-end runs of the compiled binary: determinism, exit codes, JSON
//! artifacts, and the printed reference values.

use std::path::PathBuf;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_tilingforge"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn scratch_dir(tag: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("tilingforge-test-{}-{}", tag, std::process::id()));
    let _ = std::fs::remove_dir_all(&dir);
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

#[test]
fn pipeline_output_is_deterministic() {
    let a = run(&["pipeline", "--fixture", "f0-I", "--all"]);
    let b = run(&["pipeline", "--fixture", "f0-I", "--all"]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout, "byte-for-byte determinism");
    let text = stdout(&a);
    assert!(text.contains("result: PASS"));
    assert!(text.contains("R[X12_1] = 0.5000000000"));
    assert!(text.contains("passport = [4,4 | 4,4 | 2,2,2,2]"));
}

#[test]
fn dp3_pipeline_prints_reference_determinant() {
    let out = run(&["pipeline", "--fixture", "dp3", "--det"]);
    assert!(out.status.success());
    assert!(stdout(&out).contains("det K = z^-1*w^-1 - z^-1 - w^-1 - 6 - w - z + z*w"));
}

#[test]
fn mutation_invariance_passes() {
    let out = run(&[
        "pipeline",
        "--fixture",
        "f0-I",
        "--mutate",
        "1",
        "--check-invariance",
    ]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("[pass] canonical polygon invariant under mutation"));
    assert!(text.contains("result: PASS"));
}

#[test]
fn full_pipeline_passes_for_every_fixture() {
    for name in ["c3", "c3z3", "conifold", "f0-I", "f0-II", "dp3"] {
        let start = std::time::Instant::now();
        let out = run(&["pipeline", "--fixture", name, "--all"]);
        let elapsed = start.elapsed().as_secs_f64();
        assert!(out.status.success(), "{} failed:\n{}", name, stdout(&out));
        assert!(stdout(&out).contains("result: PASS"), "{}", name);
        assert!(elapsed < 10.0, "{} pipeline took {:.1}s", name, elapsed);
    }
}

#[test]
fn validate_rejects_broken_quivers() {
    let dir = scratch_dir("validate");
    let path = dir.join("broken.json");
    std::fs::write(
        &path,
        r#"{"nodes":["1"],
            "arrows":[{"id":"x","from":"1","to":"1"},{"id":"y","from":"1","to":"1"}],
            "W":[{"sign":1,"word":["x","y"]}]}"#,
    )
    .unwrap();
    let out = run(&["validate", path.to_str().unwrap()]);
    assert!(!out.status.success());
    assert!(stdout(&out).contains("[FAIL] toric"));
}

#[test]
fn dualize_round_trips_through_files() {
    let dir = scratch_dir("dualize");
    let out = run(&["--out-dir", dir.to_str().unwrap(), "dualize", "conifold"]);
    assert!(out.status.success());
    let map_path = dir.join("map.json");
    assert!(map_path.exists());

    let out = run(&[
        "--out-dir",
        dir.to_str().unwrap(),
        "dualize",
        map_path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let quiver_json = std::fs::read_to_string(dir.join("quiver.json")).unwrap();
    assert!(quiver_json.contains("\"arrows\""));
    // The rebuilt quiver validates.
    let out = run(&["validate", dir.join("quiver.json").to_str().unwrap()]);
    assert!(out.status.success());
}

#[test]
fn pleth_prints_exact_series() {
    let out = run(&[
        "pleth",
        "--numer",
        "1,0,-1",
        "--denom",
        "1,-4,6,-4,1",
        "--op",
        "pl",
        "-N",
        "30",
    ]);
    assert!(out.status.success());
    assert_eq!(stdout(&out).trim(), "4*t - t^2 + O(t^31)");
}

#[test]
fn amoeba_writes_csv() {
    let dir = scratch_dir("amoeba");
    let csv = dir.join("amoeba.csv");
    let alga = dir.join("alga.csv");
    let out = run(&[
        "amoeba",
        "1 + z + w + z*w",
        "--range",
        "2",
        "--grid",
        "16",
        "--out",
        csv.to_str().unwrap(),
        "--coamoeba-out",
        alga.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    for path in [csv, alga] {
        let text = std::fs::read_to_string(path).unwrap();
        assert!(text.starts_with("rho_z,rho_w,phi_z,phi_w,residual\n"));
        assert!(text.lines().count() > 1);
    }
}

#[test]
fn seed_override_is_honored() {
    let out = bin()
        .args(["pipeline", "--fixture", "c3", "--geometry"])
        .env("TILINGFORGE_SEED", "42")
        .output()
        .unwrap();
    assert!(out.status.success());
    assert!(stdout(&out).contains("R[X] = 0.6666666667"));
}

#[test]
fn json_report_is_machine_readable() {
    let out = run(&["--json", "pipeline", "--fixture", "conifold", "--all"]);
    assert!(out.status.success());
    let value: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(value["source"], "fixture conifold");
    assert!(value["stages"].as_array().unwrap().len() >= 4);
}

#[test]
fn kasteleyn_flags_select_sections() {
    let out = run(&["kasteleyn", "dp3", "--matrix", "--det"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("rows = white nodes"));
    assert!(text.contains("det K = "));
    assert!(!text.contains("toric diagram"));
}

#[test]
fn matchings_command_checks_oracle() {
    let out = run(&["matchings", "f0-II"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("perfect matchings: 9"));
    assert!(text.contains("[pass]"));
}
