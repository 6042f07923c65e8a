//! End-to-end tests against the compiled binary: exact output, exit codes,
//! JSON round trips and determinism across thread counts and reruns.

use std::path::PathBuf;
use std::process::{Command, Output};

use weylreal::ncalgebra::NCPoly;
use weylreal::{BracketReport, GammaCoeffs, GeneratorLabel, Realization, StructureConstants};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_weylreal"))
        .args(args)
        .output()
        .expect("binary should run")
}

fn stdout(output: &Output) -> String {
    String::from_utf8(output.stdout.clone()).expect("stdout should be UTF-8")
}

#[test]
fn bernoulli_prints_exact_rationals() {
    let output = run(&["bernoulli", "--k", "4"]);
    assert_eq!(output.status.code(), Some(0));
    assert_eq!(stdout(&output), "-1/30\n");

    let output = run(&["bernoulli", "--k", "0"]);
    assert_eq!(output.status.code(), Some(0));
    assert_eq!(stdout(&output), "1\n");
}

#[test]
fn verify_emits_a_passing_json_report() {
    let output = run(&["verify", "--algebra", "so", "--n", "3", "--degree", "3"]);
    assert_eq!(output.status.code(), Some(0));
    let report: serde_json::Value = serde_json::from_str(&stdout(&output)).unwrap();
    assert_eq!(report["suite"], "rotations");
    assert_eq!(report["n"], 3);
    assert_eq!(report["degree"], 3);
    assert_eq!(report["cmpDegree"], 2);
    assert_eq!(report["pass"], true);
    let pairs = report["pairs"].as_array().unwrap();
    assert_eq!(pairs.len(), 3);
    assert!(pairs.iter().all(|p| p["residualTerms"] == 0));
}

#[test]
fn usage_errors_exit_with_code_two() {
    // Too few dimensions for a rotation pair.
    assert_eq!(run(&["verify", "--algebra", "so", "--n", "1"]).status.code(), Some(2));
    // Unknown algebra name is rejected by argument parsing.
    assert_eq!(run(&["verify", "--algebra", "nosuch"]).status.code(), Some(2));
    // The deformed coordinates need their deformation vector.
    assert_eq!(run(&["verify", "--algebra", "kappa", "--n", "3"]).status.code(), Some(2));
    // The indefinite-signature algebra cannot be forced onto the definite metric.
    assert_eq!(
        run(&["verify", "--algebra", "lorentz", "--n", "3", "--metric", "euclidean"])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn realize_output_round_trips_byte_for_byte() {
    let output =
        run(&["realize", "--algebra", "lorentz", "--n", "3", "--degree", "2", "--format", "json"]);
    assert_eq!(output.status.code(), Some(0));
    let text = stdout(&output);
    let realization: Realization = serde_json::from_str(&text).unwrap();
    let reprinted = serde_json::to_string_pretty(&realization).unwrap() + "\n";
    assert_eq!(reprinted, text);

    // Every rotation generator starts from its bare coordinate.
    let algebra = realization.algebra();
    for label in realization.labels() {
        let GeneratorLabel::M(p) = label else { panic!("unexpected label {label}") };
        let bare = NCPoly::x_pair(algebra, p.lo(), p.hi()).unwrap();
        assert_eq!(realization.get(label).unwrap().d_degree_part(0), bare);
    }
}

#[test]
fn verify_is_deterministic_across_thread_counts() {
    let serial = run(&["--jobs", "1", "verify", "--algebra", "extended-so", "--n", "3"]);
    let parallel = run(&["--jobs", "3", "verify", "--algebra", "extended-so", "--n", "3"]);
    assert_eq!(serial.status.code(), Some(0));
    assert_eq!(parallel.status.code(), Some(0));
    let normalize = |output: &Output| {
        let report: BracketReport = serde_json::from_str(&stdout(output)).unwrap();
        serde_json::to_string(&report.with_elapsed_zeroed()).unwrap()
    };
    assert_eq!(normalize(&serial), normalize(&parallel));
}

#[test]
fn mutation_oracle_is_seed_deterministic() {
    let args = [
        "oracle", "--which", "mutation", "--algebra", "so", "--n", "3", "--degree", "3",
        "--trials", "5", "--seed", "7",
    ];
    let first = run(&args);
    let second = run(&args);
    assert_eq!(first.status.code(), Some(0));
    assert_eq!(first.stdout, second.stdout);
    let report: serde_json::Value = serde_json::from_str(&stdout(&first)).unwrap();
    assert_eq!(report["allDetected"], true);
    assert_eq!(report["outcomes"].as_array().unwrap().len(), 5);
}

fn constants_file(name: &str, dim: u8, values: Vec<String>) -> PathBuf {
    let path = std::env::temp_dir().join(format!("weylreal-{name}-{}.json", std::process::id()));
    let body = serde_json::json!({ "dim": dim, "values": values });
    std::fs::write(&path, serde_json::to_string(&body).unwrap()).unwrap();
    path
}

#[test]
fn constants_file_drives_the_generic_suite() {
    let table = StructureConstants::from_gamma(&GammaCoeffs::canonical(3).unwrap()).unwrap();
    let mut values = Vec::new();
    for mu in 1..=3u8 {
        for nu in 1..=3u8 {
            for alpha in 1..=3u8 {
                values.push(table.get(mu, nu, alpha).to_string());
            }
        }
    }
    let path = constants_file("valid-constants", 3, values);
    let output = run(&[
        "verify",
        "--algebra",
        "weyl-generic",
        "--n",
        "3",
        "--degree",
        "3",
        "--constants",
        path.to_str().unwrap(),
    ]);
    let _ = std::fs::remove_file(&path);
    assert_eq!(output.status.code(), Some(0));
    let report: serde_json::Value = serde_json::from_str(&stdout(&output)).unwrap();
    assert_eq!(report["suite"], "custom");
    assert_eq!(report["pass"], true);
}

#[test]
fn jacobi_violating_constants_are_a_usage_error() {
    // The alternating three-index table plus an extra antisymmetric entry at
    // (1,2,1): still antisymmetric in the first two slots, but the mixed
    // (1,2,3)-bracket sum no longer cancels.
    let mut values = vec!["0".to_string(); 27];
    let mut set = |mu: usize, nu: usize, alpha: usize, v: &str| {
        values[(mu - 1) * 9 + (nu - 1) * 3 + (alpha - 1)] = v.to_string();
    };
    set(1, 2, 3, "1");
    set(2, 1, 3, "-1");
    set(2, 3, 1, "1");
    set(3, 2, 1, "-1");
    set(3, 1, 2, "1");
    set(1, 3, 2, "-1");
    set(1, 2, 1, "1");
    set(2, 1, 1, "-1");
    let path = constants_file("broken-constants", 3, values);
    let output = run(&[
        "verify",
        "--algebra",
        "weyl-generic",
        "--n",
        "3",
        "--constants",
        path.to_str().unwrap(),
    ]);
    let _ = std::fs::remove_file(&path);
    assert_eq!(output.status.code(), Some(2));
    let stderr = String::from_utf8(output.stderr).unwrap();
    assert!(stderr.contains("Jacobi"), "unexpected stderr: {stderr}");
}
