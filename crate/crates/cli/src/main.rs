use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use tmarray::io::RunConfig;
use tmarray::{Result, WeightRatio};

/// Time-modulated linear array synthesis.
#[derive(Parser, Debug)]
#[command(name = "tmarray", version, about)]
struct Cli {
    #[command(flatten)]
    common: CommonArgs,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Levels of a schedule file plus one pattern table per harmonic.
    Evaluate { schedule: PathBuf },
    /// Pattern table of one harmonic of a schedule file.
    Pattern {
        schedule: PathBuf,
        /// Harmonic index m (0 is the center frequency).
        #[arg(long, default_value_t = 0, allow_negative_numbers = true)]
        harmonic: i32,
    },
    /// Run the genetic optimizer once.
    Optimize,
    /// Run the optimizer for several weightings and seeds.
    Sweep {
        /// Comma-separated w1:w2 pairs.
        #[arg(long, value_delimiter = ',', default_value = "1:1,1:3,1:6,1:10")]
        ratios: Vec<WeightRatio>,
        #[arg(long, default_value_t = 5)]
        seeds_per_ratio: usize,
    },
}

#[derive(Args, Debug)]
struct CommonArgs {
    /// key=value configuration file; flags override its values.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true, env = "TMARRAY_OUT_DIR")]
    out: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Number of sidebands n_max entering the sideband level.
    #[arg(long, global = true)]
    harmonics: Option<usize>,
    /// Angle samples over [0, 90] degrees.
    #[arg(long, global = true)]
    grid: Option<usize>,

    #[arg(long, global = true)]
    element_pairs: Option<usize>,
    #[arg(long, global = true)]
    spacing_wavelengths: Option<f64>,
    #[arg(long, global = true)]
    time_steps: Option<usize>,
    #[arg(long, global = true)]
    max_gene: Option<u8>,
    #[arg(long, global = true)]
    modulation_period_seconds: Option<f64>,
    #[arg(long, global = true)]
    carrier_frequency_hz: Option<f64>,
    #[arg(long, global = true)]
    suppression_clamp_db: Option<f64>,
    #[arg(long, global = true)]
    refine_extrema: Option<bool>,

    #[arg(long, global = true)]
    population_size: Option<usize>,
    #[arg(long, global = true)]
    generations: Option<usize>,
    #[arg(long, global = true)]
    crossover_probability: Option<f64>,
    #[arg(long, global = true)]
    mutation_probability: Option<f64>,
    /// per_gene or per_chromosome
    #[arg(long, global = true)]
    mutation_mode: Option<String>,
    #[arg(long, global = true)]
    elite_count: Option<usize>,
    #[arg(long, global = true)]
    w1: Option<f64>,
    #[arg(long, global = true)]
    w2: Option<f64>,
    #[arg(long, global = true)]
    early_stop: Option<bool>,
    #[arg(long, global = true)]
    early_stop_closeness_db: Option<f64>,
    #[arg(long, global = true)]
    early_stop_floor_db: Option<f64>,
}

impl CommonArgs {
    fn overrides(&self) -> Vec<(&'static str, Option<String>)> {
        fn s<T: ToString>(v: &Option<T>) -> Option<String> {
            v.as_ref().map(T::to_string)
        }
        vec![
            ("rng_seed", s(&self.seed)),
            ("sideband_count", s(&self.harmonics)),
            ("grid_points", s(&self.grid)),
            ("element_pairs", s(&self.element_pairs)),
            ("spacing_wavelengths", s(&self.spacing_wavelengths)),
            ("time_steps", s(&self.time_steps)),
            ("max_gene", s(&self.max_gene)),
            (
                "modulation_period_seconds",
                s(&self.modulation_period_seconds),
            ),
            ("carrier_frequency_hz", s(&self.carrier_frequency_hz)),
            ("suppression_clamp_db", s(&self.suppression_clamp_db)),
            ("refine_extrema", s(&self.refine_extrema)),
            ("population_size", s(&self.population_size)),
            ("generations", s(&self.generations)),
            ("crossover_probability", s(&self.crossover_probability)),
            ("mutation_probability", s(&self.mutation_probability)),
            ("mutation_mode", self.mutation_mode.clone()),
            ("elite_count", s(&self.elite_count)),
            ("w1", s(&self.w1)),
            ("w2", s(&self.w2)),
            ("early_stop", s(&self.early_stop)),
            ("early_stop_closeness_db", s(&self.early_stop_closeness_db)),
            ("early_stop_floor_db", s(&self.early_stop_floor_db)),
        ]
    }

    fn run_config(&self) -> Result<RunConfig> {
        let mut cfg = match &self.config {
            Some(path) => RunConfig::load(path)?,
            None => RunConfig::default(),
        };
        for (key, value) in self.overrides() {
            if let Some(v) = value {
                cfg.set(key, &v)?;
            }
        }
        if let Some(out) = &self.out {
            cfg.out_dir = Some(out.clone());
        }
        Ok(cfg)
    }
}

fn run(cli: Cli) -> Result<()> {
    let cfg = cli.common.run_config()?;
    let out = cfg.out_dir.clone().unwrap_or_else(|| PathBuf::from("."));
    match cli.command {
        Command::Evaluate { schedule } => {
            let eval = tmarray_cli::evaluate(&cfg, &schedule, &out)?;
            print!("{}", eval.report);
        }
        Command::Pattern { schedule, harmonic } => {
            let path = tmarray_cli::pattern(&cfg, &schedule, harmonic, &out)?;
            println!("wrote {}", path.display());
        }
        Command::Optimize => {
            let outcome = tmarray_cli::optimize(&cfg, &out)?;
            println!(
                "generations={} SLL={:.2} dB SBL={:.2} dB fitness={:.4}",
                outcome.trace.len(),
                outcome.metrics.sll_db(),
                outcome.metrics.sbl_db(),
                outcome.best_fitness
            );
            println!("wrote {}", out.display());
        }
        Command::Sweep {
            ratios,
            seeds_per_ratio,
        } => {
            let result = tmarray_cli::sweep(&cfg, &ratios, seeds_per_ratio, &out)?;
            println!(
                "{:>6} {:>6} {:>12} {:>12} {:>12}",
                "w1", "w2", "SLL (dB)", "SBL (dB)", "fitness"
            );
            for s in &result.summary {
                println!(
                    "{:>6} {:>6} {:>12.2} {:>12.2} {:>12.2}",
                    s.ratio.w1,
                    s.ratio.w2,
                    -s.median_sll_suppression_db,
                    -s.median_sbl_suppression_db,
                    s.median_fitness
                );
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(tmarray_cli::exit_code(&e) as u8)
        }
    }
}
