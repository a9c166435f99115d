use std::fs;
use std::path::Path;
use std::process::Command;

use tmarray::io;
use tmarray::io::RunConfig;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_tmarray"))
}

fn write_rows(path: &Path, rows: usize, cols: usize, level: u8) {
    let line = vec![level.to_string(); cols].join(",");
    let text: String = (0..rows).map(|_| format!("{line}\n")).collect();
    fs::write(path, text).unwrap();
}

fn metric(report: &str, key: &str) -> f64 {
    report
        .lines()
        .find_map(|l| l.strip_prefix(&format!("{key}=")))
        .unwrap_or_else(|| panic!("{key} missing"))
        .parse()
        .unwrap()
}

#[test]
fn evaluate_uniform_static_schedule() {
    let dir = tempfile::tempdir().unwrap();
    let schedule = dir.path().join("uniform.txt");
    write_rows(&schedule, 8, 10, 2);
    let out = dir.path().join("out");
    let status = bin()
        .arg("evaluate")
        .arg(&schedule)
        .arg("--out")
        .arg(&out)
        .output()
        .unwrap();
    assert!(status.status.success(), "{status:?}");
    let report = fs::read_to_string(out.join(tmarray_cli::METRICS_FILE)).unwrap();
    assert!((metric(&report, "sll_db") + 13.15).abs() < 0.05);
    for n in 1..=10 {
        assert_eq!(metric(&report, &format!("sideband_{n}_db")), -240.0);
    }
    for m in 0..=10 {
        let table = fs::read_to_string(out.join(tmarray_cli::pattern_file_name(m))).unwrap();
        let rows = io::parse_pattern(&table).unwrap();
        assert_eq!(rows.len(), 2001);
        if m == 0 {
            assert_eq!(rows[0], (0.0, 0.0));
        } else {
            assert!(rows.iter().all(|&(_, db)| db == -240.0));
        }
    }
}

#[test]
fn all_zero_schedule_exits_with_degenerate_status() {
    let dir = tempfile::tempdir().unwrap();
    let schedule = dir.path().join("zeros.txt");
    write_rows(&schedule, 8, 10, 0);
    let out = bin()
        .args(["evaluate"])
        .arg(&schedule)
        .arg("--out")
        .arg(dir.path())
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("all-zero"));
}

#[test]
fn wrong_shape_names_both_shapes() {
    let dir = tempfile::tempdir().unwrap();
    let schedule = dir.path().join("nine.txt");
    write_rows(&schedule, 9, 10, 1);
    let out = bin()
        .arg("evaluate")
        .arg(&schedule)
        .arg("--out")
        .arg(dir.path())
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("8x10") && err.contains("9x10"), "{err}");
}

#[test]
fn parse_error_reports_position() {
    let dir = tempfile::tempdir().unwrap();
    let schedule = dir.path().join("bad.txt");
    fs::write(&schedule, "1,2\n3,?\n").unwrap();
    let out = bin()
        .arg("evaluate")
        .arg(&schedule)
        .arg("--out")
        .arg(dir.path())
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 2, column 3"));
}

#[test]
fn invalid_config_names_field() {
    let dir = tempfile::tempdir().unwrap();
    let out = bin()
        .args(["optimize", "--elite-count", "60"])
        .arg("--out")
        .arg(dir.path())
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("elite_count"));
}

#[test]
fn config_file_with_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    fs::write(
        &cfg,
        "generations=3\npopulation_size=10\nelite_count=2\ngrid_points=301\nw2=3\n",
    )
    .unwrap();
    let out_dir = dir.path().join("o");
    let out = bin()
        .args(["optimize", "--seed", "5", "--generations", "2"])
        .arg("--config")
        .arg(&cfg)
        .arg("--out")
        .arg(&out_dir)
        .output()
        .unwrap();
    assert!(out.status.success(), "{out:?}");
    let effective = RunConfig::load(&out_dir.join(tmarray_cli::CONFIG_FILE)).unwrap();
    assert_eq!(effective.ga.generations, 2);
    assert_eq!(effective.ga.population_size, 10);
    assert_eq!(effective.ga.w2, 3.0);
    assert_eq!(effective.ga.rng_seed, 5);
    let trace =
        io::parse_trace(&fs::read_to_string(out_dir.join(tmarray_cli::TRACE_FILE)).unwrap())
            .unwrap();
    assert_eq!(trace.len(), 2);
}

#[test]
fn out_dir_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let schedule = dir.path().join("s.txt");
    write_rows(&schedule, 8, 10, 1);
    let out = bin()
        .args(["pattern", "--harmonic", "1"])
        .arg(&schedule)
        .env("TMARRAY_OUT_DIR", dir.path().join("env_out"))
        .output()
        .unwrap();
    assert!(out.status.success(), "{out:?}");
    assert!(dir.path().join("env_out").join("pattern_m1.csv").exists());
}

/// One generation, then the best schedule fed back through `evaluate`.
#[test]
fn optimize_smoke_round_trips_through_evaluate() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().join("opt");
    let out = bin()
        .args(["optimize", "--generations", "1", "--seed", "42"])
        .arg("--out")
        .arg(&out_dir)
        .output()
        .unwrap();
    assert!(out.status.success(), "{out:?}");
    let trace_text = fs::read_to_string(out_dir.join(tmarray_cli::TRACE_FILE)).unwrap();
    let trace = io::parse_trace(&trace_text).unwrap();
    assert_eq!(trace.len(), 1);

    let eval_dir = dir.path().join("eval");
    let out = bin()
        .arg("evaluate")
        .arg(out_dir.join(tmarray_cli::SCHEDULE_FILE))
        .arg("--out")
        .arg(&eval_dir)
        .output()
        .unwrap();
    assert!(out.status.success(), "{out:?}");
    let report = fs::read_to_string(eval_dir.join(tmarray_cli::METRICS_FILE)).unwrap();
    let last = trace.last().unwrap();
    assert!((metric(&report, "sll_db") + last.best_sll_suppression_db).abs() <= 1e-9);
    assert!((metric(&report, "sbl_db") + last.best_sbl_suppression_db).abs() <= 1e-9);
    assert!((metric(&report, "fitness") - last.best_fitness).abs() <= 1e-9);
    let opt_report = fs::read_to_string(out_dir.join(tmarray_cli::METRICS_FILE)).unwrap();
    assert_eq!(report, opt_report);
}

#[test]
fn single_ratio_sweep_matches_optimize() {
    let dir = tempfile::tempdir().unwrap();
    let common = [
        "--generations",
        "4",
        "--population-size",
        "12",
        "--elite-count",
        "3",
        "--grid",
        "401",
        "--seed",
        "9",
    ];
    let sweep_dir = dir.path().join("sweep");
    let out = bin()
        .args(["sweep", "--ratios", "1:6", "--seeds-per-ratio", "1"])
        .args(common)
        .arg("--out")
        .arg(&sweep_dir)
        .output()
        .unwrap();
    assert!(out.status.success(), "{out:?}");
    let opt_dir = dir.path().join("opt");
    let out = bin()
        .args(["optimize"])
        .args(common)
        .arg("--out")
        .arg(&opt_dir)
        .output()
        .unwrap();
    assert!(out.status.success(), "{out:?}");

    let summary = fs::read_to_string(sweep_dir.join(tmarray_cli::SWEEP_SUMMARY_FILE)).unwrap();
    assert_eq!(summary.lines().count(), 2);
    assert!(summary.starts_with(tmarray_cli::SWEEP_SUMMARY_HEADER));
    let run_dir = sweep_dir.join("runs").join("w1_1_w2_6_seed_9");
    for file in [
        tmarray_cli::SCHEDULE_FILE,
        tmarray_cli::TRACE_FILE,
        tmarray_cli::METRICS_FILE,
    ] {
        assert_eq!(
            fs::read(run_dir.join(file)).unwrap(),
            fs::read(opt_dir.join(file)).unwrap(),
            "{file}"
        );
    }
}

#[test]
fn rejects_malformed_ratio() {
    let out = bin().args(["sweep", "--ratios", "1-6"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}
