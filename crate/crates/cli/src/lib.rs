//! Commands behind the `tmarray` binary. Each writes its tables into an
//! output directory and returns what it computed.

use std::fs;
use std::path::{Path, PathBuf};

use tmarray::io::{self, RunConfig};
use tmarray::{
    evolve, Error, ExcitationSchedule, GaOutcome, MetricsEvaluator, PatternMetrics, RatioSummary,
    Result, SweepRun, WeightRatio,
};

pub const METRICS_FILE: &str = "metrics.txt";
pub const SCHEDULE_FILE: &str = "best_schedule.txt";
pub const TRACE_FILE: &str = "trace.csv";
pub const CONFIG_FILE: &str = "run_config.txt";
pub const SWEEP_RUNS_FILE: &str = "sweep_runs.csv";
pub const SWEEP_SUMMARY_FILE: &str = "sweep_summary.csv";

/// Exit status for a failed command: 3 for degenerate input, 1 for I/O,
/// 2 for everything else (configuration, parse and shape errors).
pub fn exit_code(err: &Error) -> i32 {
    match err {
        e if e.is_degenerate() => 3,
        Error::Io(_) => 1,
        _ => 2,
    }
}

pub fn pattern_file_name(m: i32) -> String {
    format!("pattern_m{m}.csv")
}

fn load_checked(cfg: &RunConfig, path: &Path) -> Result<ExcitationSchedule> {
    let schedule = io::read_schedule(path)?;
    cfg.array.check_schedule(&schedule)?;
    if schedule.is_all_zero() {
        return Err(Error::DegenerateSchedule);
    }
    Ok(schedule)
}

fn write(dir: &Path, name: &str, text: &str) -> Result<PathBuf> {
    fs::create_dir_all(dir)?;
    let path = dir.join(name);
    fs::write(&path, text)?;
    Ok(path)
}

fn write_pattern(
    evaluator: &MetricsEvaluator,
    schedule: &ExcitationSchedule,
    m: i32,
    dir: &Path,
) -> Result<PathBuf> {
    let patterns = evaluator.patterns();
    let main = patterns.pattern(schedule, 0)?.magnitude[0];
    let pattern = patterns.pattern(schedule, m)?;
    let text = io::format_pattern(&pattern, main, evaluator.config().suppression_clamp_db);
    write(dir, &pattern_file_name(m), &text)
}

#[derive(Debug)]
pub struct Evaluation {
    pub metrics: PatternMetrics,
    pub fitness: f64,
    pub report: String,
}

/// Metrics report plus one normalized pattern table per harmonic
/// `0..=sideband_count`.
pub fn evaluate(cfg: &RunConfig, schedule_path: &Path, out_dir: &Path) -> Result<Evaluation> {
    cfg.validate()?;
    let schedule = load_checked(cfg, schedule_path)?;
    let evaluator = MetricsEvaluator::new(cfg.array.clone(), cfg.metrics.clone())?;
    let (fitness, metrics) = evaluator.fitness(&schedule, cfg.ga.w1, cfg.ga.w2)?;
    let report = io::format_metrics(&cfg.array, &metrics, Some(fitness));
    write(out_dir, METRICS_FILE, &report)?;
    for m in 0..=cfg.metrics.sideband_count as i32 {
        write_pattern(&evaluator, &schedule, m, out_dir)?;
    }
    Ok(Evaluation {
        metrics,
        fitness,
        report,
    })
}

/// Pattern table of a single harmonic.
pub fn pattern(cfg: &RunConfig, schedule_path: &Path, m: i32, out_dir: &Path) -> Result<PathBuf> {
    cfg.array.validate()?;
    cfg.metrics.validate()?;
    let schedule = load_checked(cfg, schedule_path)?;
    let evaluator = MetricsEvaluator::new(cfg.array.clone(), cfg.metrics.clone())?;
    write_pattern(&evaluator, &schedule, m, out_dir)
}

fn write_outcome(cfg: &RunConfig, outcome: &GaOutcome, dir: &Path) -> Result<()> {
    write(dir, SCHEDULE_FILE, &io::format_schedule(&outcome.best))?;
    write(
        dir,
        METRICS_FILE,
        &io::format_metrics(&cfg.array, &outcome.metrics, Some(outcome.best_fitness)),
    )?;
    write(dir, TRACE_FILE, &io::format_trace(&outcome.trace))?;
    write(dir, CONFIG_FILE, &cfg.to_text())?;
    Ok(())
}

/// One optimizer run: best schedule, its metrics, the per-generation trace
/// and the effective configuration.
pub fn optimize(cfg: &RunConfig, out_dir: &Path) -> Result<GaOutcome> {
    cfg.validate()?;
    let outcome = evolve(&cfg.array, &cfg.ga, &cfg.metrics)?;
    write_outcome(cfg, &outcome, out_dir)?;
    Ok(outcome)
}

pub struct SweepResult {
    pub runs: Vec<SweepRun>,
    pub summary: Vec<RatioSummary>,
}

pub const SWEEP_RUNS_HEADER: &str = "w1,w2,seed,sll_db,sbl_db,fitness,generations";
pub const SWEEP_SUMMARY_HEADER: &str = "w1,w2,runs,median_sll_db,median_sbl_db,median_fitness";

/// `seeds_per_ratio` runs per weighting, seeds counting up from the
/// configured seed. Each run's files go to `runs/w1_<w1>_w2_<w2>_seed_<s>/`.
pub fn sweep(
    cfg: &RunConfig,
    ratios: &[WeightRatio],
    seeds_per_ratio: usize,
    out_dir: &Path,
) -> Result<SweepResult> {
    if ratios.is_empty() {
        return Err(Error::InvalidConfig {
            field: "ratios",
            reason: "at least one weight ratio is required".into(),
        });
    }
    for r in ratios {
        let ga = tmarray::GaConfig {
            w1: r.w1,
            w2: r.w2,
            ..cfg.ga.clone()
        };
        ga.validate()?;
    }
    cfg.array.validate()?;
    cfg.metrics.validate()?;
    let seeds: Vec<u64> = (0..seeds_per_ratio as u64)
        .map(|i| cfg.ga.rng_seed.wrapping_add(i))
        .collect();
    let (runs, summary) = tmarray::sweep(&cfg.array, &cfg.ga, &cfg.metrics, ratios, &seeds)?;

    let mut table = format!("{SWEEP_RUNS_HEADER}\n");
    for run in &runs {
        let m = &run.outcome.metrics;
        table.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            run.ratio.w1,
            run.ratio.w2,
            run.seed,
            m.sll_db(),
            m.sbl_db(),
            run.outcome.best_fitness,
            run.outcome.trace.len()
        ));
        let run_cfg = RunConfig {
            ga: tmarray::GaConfig {
                w1: run.ratio.w1,
                w2: run.ratio.w2,
                rng_seed: run.seed,
                ..cfg.ga.clone()
            },
            ..cfg.clone()
        };
        let dir = out_dir.join("runs").join(format!(
            "w1_{}_w2_{}_seed_{}",
            run.ratio.w1, run.ratio.w2, run.seed
        ));
        write_outcome(&run_cfg, &run.outcome, &dir)?;
    }
    write(out_dir, SWEEP_RUNS_FILE, &table)?;

    let mut table = format!("{SWEEP_SUMMARY_HEADER}\n");
    for s in &summary {
        table.push_str(&format!(
            "{},{},{},{},{},{}\n",
            s.ratio.w1,
            s.ratio.w2,
            s.runs,
            -s.median_sll_suppression_db,
            -s.median_sbl_suppression_db,
            s.median_fitness
        ));
    }
    write(out_dir, SWEEP_SUMMARY_FILE, &table)?;
    Ok(SweepResult { runs, summary })
}
