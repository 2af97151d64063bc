use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use robustcover::io::InstanceDoc;
use robustcover::oracle::{ExactBudget, ExactOracle};
use robustcover::{CoveringProblem, Rational};
use robustcover_cli::generate::{BenchSpec, ExperimentSpec, Family, UncertaintySpec};
use robustcover_cli::report::CSV_HEADER;
use robustcover_cli::solve::{solve_maxmin, solve_robust, MaxMinOptions, RobustOptions};

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_robustcover"));
    c.env_remove(robustcover_cli::SEED_ENV);
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests").join(name)
}

fn write_instance(dir: &Path, name: &str, doc: &InstanceDoc) -> String {
    let path = dir.join(name);
    std::fs::write(&path, doc.to_json()).unwrap();
    path.to_string_lossy().into_owned()
}

#[test]
fn golden_generator_output() {
    let out = run(&["gen", "--problem", "setcover", "--n", "6", "--m", "8", "--seed", "1"]);
    assert!(out.status.success());
    let golden = std::fs::read_to_string(data("golden/setcover_n6_m8_seed1.json")).unwrap();
    assert_eq!(stdout(&out), golden);
}

#[test]
fn seed_env_overrides_spec_seed() {
    let a = bin().args(["gen", "--seed", "5"]).env(robustcover_cli::SEED_ENV, "1").output().unwrap();
    let golden = std::fs::read_to_string(data("golden/setcover_n6_m8_seed1.json")).unwrap();
    assert_eq!(stdout(&a), golden);
    let bad = bin().args(["gen"]).env(robustcover_cli::SEED_ENV, "x").output().unwrap();
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn generated_set_cover_covers_every_item() {
    for seed in 0..40 {
        let mut spec = ExperimentSpec::new(Family::SetCover, 7, 3, seed);
        spec.density = "1/10".parse().unwrap();
        let (_, doc) = spec.instance(0).unwrap();
        let inst = doc.build().unwrap();
        assert!(inst.problem.validate_coverable().is_ok());
        let spec = ExperimentSpec::new(Family::Steiner, 4, 7, seed);
        assert!(spec.instance(0).unwrap().1.build().is_ok());
    }
}

#[test]
fn documents_round_trip() {
    for (i, u) in ["uniform:2", "partition:2:1", "intersection:3:2", "knapsack:2:3", "explicit:3:2"]
        .iter()
        .enumerate()
    {
        let mut spec = ExperimentSpec::new(if i % 2 == 0 { Family::SetCover } else { Family::Steiner }, 4, 6, i as u64);
        spec.uncertainty = u.parse::<UncertaintySpec>().unwrap();
        spec.repetitions = 2;
        for (_, doc) in spec.instances().unwrap() {
            assert_eq!(InstanceDoc::from_json(&doc.to_json()).unwrap(), doc);
        }
        let text = serde_json::to_string(&spec).unwrap();
        assert_eq!(serde_json::from_str::<ExperimentSpec>(&text).unwrap(), spec);
    }
    assert!("uniform".parse::<UncertaintySpec>().is_err());
    assert!("knapsack:a".parse::<UncertaintySpec>().is_err());
}

#[test]
fn malformed_input_exits_with_two_and_names_the_key() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    std::fs::write(
        &path,
        r#"{"problem": {"type": "setcover", "items": 1, "sets": [{"cost": "1", "itmes": [0]}]},
            "uncertainty": {"uniform": {"k": 1}}}"#,
    )
    .unwrap();
    let out = run(&["maxmin", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("itmes") && err.contains("line"), "{err}");
    let missing = run(&["robust", "/nonexistent/instance.json"]);
    assert_eq!(missing.status.code(), Some(2));
}

#[test]
fn solver_refusals_exit_with_one() {
    let dir = tempfile::tempdir().unwrap();
    let mut spec = ExperimentSpec::new(Family::SetCover, 6, 20, 3);
    spec.uncertainty = UncertaintySpec::Uniform { k: 2 };
    let big = write_instance(dir.path(), "big.json", &spec.instance(0).unwrap().1);
    assert_eq!(run(&["oracle", &big]).status.code(), Some(1));
    spec.m = 6;
    spec.uncertainty = UncertaintySpec::Knapsack { q: 1, k: None };
    let k = write_instance(dir.path(), "k.json", &spec.instance(0).unwrap().1);
    assert_eq!(run(&["maxmin", &k, "--delta", "1/12", "--cap", "5"]).status.code(), Some(1));
}

#[test]
fn maxmin_smoke_and_matroid_dump() {
    let golden = data("golden/setcover_n6_m8_seed1.json");
    let out = run(&["maxmin", golden.to_str().unwrap(), "--format", "csv"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert_eq!(text.lines().next().unwrap(), CSV_HEADER.join(","));
    assert_eq!(text.lines().count(), 2);

    let dir = tempfile::tempdir().unwrap();
    let mut spec = ExperimentSpec::new(Family::SetCover, 4, 5, 8);
    spec.uncertainty = UncertaintySpec::Knapsack { q: 1, k: None };
    let k = write_instance(dir.path(), "k.json", &spec.instance(0).unwrap().1);
    let out = run(&["maxmin", &k, "--emit-matroids", "--delta", "1", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let count = v["knapsack"]["matroid_count"].as_u64().unwrap();
    assert_eq!(v["matroids"].as_array().unwrap().len() as u64, count);
    let r1 = run(&["maxmin", &k, "--mode", "randomized", "--seed", "4", "--format", "json"]);
    let r2 = run(&["maxmin", &k, "--mode", "randomized", "--seed", "4", "--format", "json"]);
    assert!(r1.status.success());
    assert_eq!(r1.stdout, r2.stdout);
}

#[test]
fn maxmin_oracle_ratio_within_guarantee() {
    for seed in 0..30 {
        let mut spec = ExperimentSpec::new(if seed % 2 == 0 { Family::SetCover } else { Family::Steiner }, 5, 7, seed);
        spec.uncertainty = match seed % 3 {
            0 => UncertaintySpec::Uniform { k: 3 },
            1 => UncertaintySpec::Intersection { parts: 2, bound: 2 },
            _ => UncertaintySpec::Knapsack { q: 1, k: Some(3) },
        };
        let inst = spec.instance(0).unwrap().1.build().unwrap();
        let opts = MaxMinOptions {
            oracle: true,
            ..MaxMinOptions::default()
        };
        let report = solve_maxmin(&inst, &opts).unwrap();
        let check = report.oracle.as_ref().unwrap();
        assert!(check.within_bound, "seed {seed}: {check:?}");
        assert!(check.exact.value() <= report.upper_bound);
    }
}

#[test]
fn robust_oracle_identities() {
    for seed in 0..20 {
        let mut spec = ExperimentSpec::new(if seed % 2 == 0 { Family::SetCover } else { Family::Steiner }, 5, 7, seed);
        spec.uncertainty = match seed % 3 {
            0 => UncertaintySpec::Uniform { k: 2 },
            1 => UncertaintySpec::Partition { parts: 2, bound: 1 },
            _ => UncertaintySpec::Explicit { sets: 3, size: 2 },
        };
        let inst = spec.instance(0).unwrap().1.build().unwrap();
        let opts = RobustOptions {
            oracle: true,
            lambda: Some(Rational::from_integer(1)),
            ..RobustOptions::default()
        };
        let report = solve_robust(&inst, &opts).unwrap();
        let check = report.oracle.as_ref().unwrap();
        assert!(report.upper_bound >= check.exact_max_min.value());
        assert_eq!(check.exact, check.exact_max_min.value());
        assert!(check.realized <= report.upper_bound && check.realized >= check.exact);
        assert_eq!(check.within_bound, Some(true));
        if seed % 3 == 2 {
            assert_eq!(report.algorithm, "explicit");
            assert!(report.note.is_some());
        }
    }
}

#[test]
fn threshold_run_reports_contract_checks() {
    let golden = data("golden/setcover_n6_m8_seed1.json");
    let out = run(&["robust", golden.to_str().unwrap(), "--threshold", "1", "--format", "json"]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["mode"], "threshold");
    assert_eq!(v["contract"]["coverage"], true);
    assert_eq!(v["contract"]["second_stage"], true);
}

#[test]
fn bench_contract() {
    let empty = tempfile::NamedTempFile::new().unwrap();
    std::fs::write(empty.path(), "{}").unwrap();
    let out = run(&["bench", empty.path().to_str().unwrap()]);
    assert_eq!(stdout(&out), format!("{}\n", CSV_HEADER.join(",")));

    let spec_path = data("data/bench_small.json");
    let out = run(&["bench", spec_path.to_str().unwrap()]);
    assert!(out.status.success());
    let text = stdout(&out);
    let mut reader = csv::Reader::from_reader(text.as_bytes());
    assert_eq!(reader.headers().unwrap().iter().collect::<Vec<_>>(), CSV_HEADER);
    let rows = reader.records().count();
    assert_eq!(rows, 19);
    assert!(text.lines().skip(1).all(|l| l.ends_with(',')), "runtime blank without --timing");

    // every row's ratio is within the guarantee its solver reports
    let spec: BenchSpec = serde_json::from_str(&std::fs::read_to_string(&spec_path).unwrap()).unwrap();
    for exp in &spec.experiments {
        for (name, doc) in exp.instances().unwrap() {
            let inst = doc.build().unwrap();
            let oracle_opts = MaxMinOptions {
                oracle: true,
                ..MaxMinOptions::default()
            };
            assert!(solve_maxmin(&inst, &oracle_opts).unwrap().oracle.unwrap().within_bound, "{name}");
            for lambda in &exp.lambdas {
                if !exp.solvers.contains(&robustcover_cli::generate::Solver::Robust) {
                    continue;
                }
                let opts = RobustOptions {
                    oracle: true,
                    lambda: Some(lambda.value()),
                    ..RobustOptions::default()
                };
                let r = solve_robust(&inst, &opts).unwrap();
                assert_eq!(r.oracle.unwrap().within_bound, Some(true), "{name}");
            }
        }
    }
}

#[test]
fn oracle_command_reports_exact_values() {
    let golden = data("golden/setcover_n6_m8_seed1.json");
    let out = run(&["oracle", golden.to_str().unwrap(), "--format", "json", "--lambda", "1"]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["robust"], v["max_min"]);
    assert_eq!(v["audit"]["violations"], 0);
    let inst = robustcover_cli::load_instance(&golden).unwrap();
    let oracle = ExactOracle::new(&inst.problem, ExactBudget::default()).unwrap();
    let (mm, _) = oracle.max_min(&inst.uncertainty).unwrap();
    assert_eq!(v["max_min"], mm.to_string());
    assert_eq!(v["elements"], inst.problem.num_elements());
}
