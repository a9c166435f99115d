//! Plain-text file formats.
//!
//! * Schedule: one line per element pair (center outward), `L` comma-separated
//!   integer levels per line. `#` starts a comment; blank lines are ignored.
//! * Pattern table: `theta_deg,magnitude_db_normalized`, one row per grid
//!   angle, 6 decimals, levels relative to the center-frequency main beam.
//! * Trace table: `generation,best_fitness,avg_fitness,best_sll_db,best_sbl_db,survivors`.
//! * Metrics report and run configuration: flat `key=value` lines.
//!
//! Level columns (`*_db`) use the negative-dB display convention. Floating
//! point values other than pattern samples are written in shortest
//! round-trip form, so re-parsing recovers them exactly.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use crate::array::{ArrayConfig, ExcitationSchedule, HarmonicPattern};
use crate::error::{Error, Result};
use crate::ga::{EarlyStop, GaConfig, GaTrace, MutationMode, TraceRow};
use crate::metrics::{MetricsConfig, PatternMetrics};

fn parse_error(line: usize, column: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        column,
        message: message.into(),
    }
}

/// Strips a trailing `#` comment.
fn content(line: &str) -> &str {
    line.split_once('#').map_or(line, |(c, _)| c)
}

pub fn parse_schedule(text: &str) -> Result<ExcitationSchedule> {
    let mut rows: Vec<Vec<u8>> = Vec::new();
    let mut first_line = 0;
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let body = content(raw);
        if body.trim().is_empty() {
            continue;
        }
        let mut row = Vec::new();
        let mut column = 1;
        for field in body.split(',') {
            let offset = field.len() - field.trim_start().len();
            let token = field.trim();
            let value: u8 = token.parse().map_err(|_| {
                parse_error(
                    line_no,
                    column + offset,
                    format!("`{token}` is not an excitation level (0-255)"),
                )
            })?;
            row.push(value);
            column += field.len() + 1;
        }
        if let Some(first) = rows.first() {
            if first.len() != row.len() {
                return Err(parse_error(
                    line_no,
                    1,
                    format!(
                        "row has {} levels but line {first_line} has {}",
                        row.len(),
                        first.len()
                    ),
                ));
            }
        } else {
            first_line = line_no;
        }
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(parse_error(1, 1, "schedule file has no rows"));
    }
    ExcitationSchedule::from_rows(&rows)
}

pub fn format_schedule(schedule: &ExcitationSchedule) -> String {
    let mut out = format!(
        "# {} element pairs (center outward) x {} time steps\n",
        schedule.elements(),
        schedule.steps()
    );
    for row in schedule.rows() {
        let line: Vec<String> = row.iter().map(u8::to_string).collect();
        out.push_str(&line.join(","));
        out.push('\n');
    }
    out
}

pub fn read_schedule(path: &Path) -> Result<ExcitationSchedule> {
    parse_schedule(&fs::read_to_string(path)?)
}

pub fn write_schedule(path: &Path, schedule: &ExcitationSchedule) -> Result<()> {
    fs::write(path, format_schedule(schedule))?;
    Ok(())
}

pub const PATTERN_HEADER: &str = "theta_deg,magnitude_db_normalized";

/// Pattern magnitudes in dB relative to `main_beam`, floored at `-clamp_db`.
pub fn format_pattern(pattern: &HarmonicPattern, main_beam: f64, clamp_db: f64) -> String {
    let mut out = String::with_capacity(24 * pattern.len());
    out.push_str(PATTERN_HEADER);
    out.push('\n');
    for (theta, mag) in pattern.theta_radians.iter().zip(&pattern.magnitude) {
        let db = if *mag > 0.0 {
            (20.0 * (mag / main_beam).log10()).max(-clamp_db)
        } else {
            -clamp_db
        };
        writeln!(out, "{:.6},{:.6}", theta.to_degrees(), db).unwrap();
    }
    out
}

/// Parses a pattern table back into `(theta_deg, db)` pairs.
pub fn parse_pattern(text: &str) -> Result<Vec<(f64, f64)>> {
    parse_csv(text, PATTERN_HEADER)?
        .into_iter()
        .map(|(line, fields)| match fields.as_slice() {
            [theta, db] => Ok((
                parse_f64(theta, line, 1)?,
                parse_f64(db, line, theta.len() + 2)?,
            )),
            _ => Err(parse_error(line, 1, "expected 2 columns")),
        })
        .collect()
}

pub const TRACE_HEADER: &str =
    "generation,best_fitness,avg_fitness,best_sll_db,best_sbl_db,survivors";

pub fn format_trace(trace: &GaTrace) -> String {
    let mut out = String::with_capacity(80 * (trace.len() + 1));
    out.push_str(TRACE_HEADER);
    out.push('\n');
    for r in &trace.rows {
        writeln!(
            out,
            "{},{},{},{},{},{}",
            r.generation,
            r.best_fitness,
            r.average_fitness,
            -r.best_sll_suppression_db,
            -r.best_sbl_suppression_db,
            r.survivor_count
        )
        .unwrap();
    }
    out
}

/// Parses a trace table. The clone-fallback flag is not stored and comes
/// back `false`.
pub fn parse_trace(text: &str) -> Result<GaTrace> {
    let rows = parse_csv(text, TRACE_HEADER)?
        .into_iter()
        .map(|(line, f)| {
            if f.len() != 6 {
                return Err(parse_error(line, 1, "expected 6 columns"));
            }
            let int = |s: &str, col| {
                s.parse::<usize>()
                    .map_err(|_| parse_error(line, col, format!("`{s}` is not an integer")))
            };
            Ok(TraceRow {
                generation: int(f[0], 1)?,
                best_fitness: parse_f64(f[1], line, 2)?,
                average_fitness: parse_f64(f[2], line, 3)?,
                best_sll_suppression_db: -parse_f64(f[3], line, 4)?,
                best_sbl_suppression_db: -parse_f64(f[4], line, 5)?,
                survivor_count: int(f[5], 6)?,
                cloned_best: false,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(GaTrace { rows })
}

fn parse_f64(s: &str, line: usize, column: usize) -> Result<f64> {
    s.trim()
        .parse()
        .map_err(|_| parse_error(line, column, format!("`{s}` is not a number")))
}

fn parse_csv<'a>(text: &'a str, header: &str) -> Result<Vec<(usize, Vec<&'a str>)>> {
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, h)) if h.trim() == header => {}
        _ => return Err(parse_error(1, 1, format!("expected header `{header}`"))),
    }
    Ok(lines
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| (i + 1, l.split(',').collect()))
        .collect())
}

/// `key=value` summary of one schedule's levels.
pub fn format_metrics(
    array: &ArrayConfig,
    metrics: &PatternMetrics,
    fitness: Option<f64>,
) -> String {
    let mut out = String::new();
    writeln!(out, "main_beam_db={}", metrics.main_beam_db).unwrap();
    writeln!(out, "sll_db={}", metrics.sll_db()).unwrap();
    writeln!(out, "sbl_db={}", metrics.sbl_db()).unwrap();
    if let Some(f) = fitness {
        writeln!(out, "fitness={f}").unwrap();
    }
    for (i, s) in metrics.per_sideband_suppression_db.iter().enumerate() {
        let n = i as i32 + 1;
        writeln!(out, "sideband_{n}_db={}", -s).unwrap();
        writeln!(
            out,
            "sideband_{n}_frequency_hz={:.3}",
            array.harmonic_frequency_hz(n)
        )
        .unwrap();
    }
    let angles: Vec<String> = metrics
        .sidelobe_angles
        .iter()
        .map(|a| a.to_degrees().to_string())
        .collect();
    writeln!(out, "sidelobe_angles_deg={}", angles.join(";")).unwrap();
    out
}

/// Parses a `key=value` file into `(line, key, value)` triples.
pub fn parse_key_values(text: &str) -> Result<Vec<(usize, String, String)>> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let body = content(raw);
        if body.trim().is_empty() {
            continue;
        }
        let (k, v) = body.split_once('=').ok_or_else(|| {
            parse_error(
                i + 1,
                1,
                format!("expected key=value, found `{}`", body.trim()),
            )
        })?;
        out.push((i + 1, k.trim().to_string(), v.trim().to_string()));
    }
    Ok(out)
}

/// Everything a command needs: array, metrics and optimizer settings plus
/// the output directory.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct RunConfig {
    pub array: ArrayConfig,
    pub metrics: MetricsConfig,
    pub ga: GaConfig,
    pub out_dir: Option<PathBuf>,
}

/// Keys accepted by [`RunConfig::set`].
pub const RUN_CONFIG_KEYS: &[&str] = &[
    "element_pairs",
    "spacing_wavelengths",
    "time_steps",
    "max_gene",
    "modulation_period_seconds",
    "carrier_frequency_hz",
    "grid_points",
    "sideband_count",
    "suppression_clamp_db",
    "refine_extrema",
    "population_size",
    "generations",
    "crossover_probability",
    "mutation_probability",
    "mutation_mode",
    "elite_count",
    "w1",
    "w2",
    "rng_seed",
    "early_stop",
    "early_stop_closeness_db",
    "early_stop_floor_db",
    "out_dir",
];

fn value<T: std::str::FromStr>(key: &'static str, v: &str) -> Result<T> {
    v.parse().map_err(|_| Error::InvalidConfig {
        field: key,
        reason: format!("cannot parse `{v}`"),
    })
}

impl RunConfig {
    /// Sets one field by name.
    pub fn set(&mut self, key: &str, v: &str) -> Result<()> {
        let key: &'static str =
            RUN_CONFIG_KEYS
                .iter()
                .find(|&&k| k == key)
                .ok_or_else(|| Error::InvalidConfig {
                    field: "config",
                    reason: format!("unknown key `{key}`"),
                })?;
        match key {
            "element_pairs" => self.array.element_pairs = value(key, v)?,
            "spacing_wavelengths" => self.array.spacing_wavelengths = value(key, v)?,
            "time_steps" => self.array.time_steps = value(key, v)?,
            "max_gene" => self.array.max_gene = value(key, v)?,
            "modulation_period_seconds" => self.array.modulation_period_seconds = value(key, v)?,
            "carrier_frequency_hz" => self.array.carrier_frequency_hz = value(key, v)?,
            "grid_points" => self.metrics.grid_points = value(key, v)?,
            "sideband_count" => self.metrics.sideband_count = value(key, v)?,
            "suppression_clamp_db" => self.metrics.suppression_clamp_db = value(key, v)?,
            "refine_extrema" => self.metrics.refine_extrema = value(key, v)?,
            "population_size" => self.ga.population_size = value(key, v)?,
            "generations" => self.ga.generations = value(key, v)?,
            "crossover_probability" => self.ga.crossover_probability = value(key, v)?,
            "mutation_probability" => self.ga.mutation_probability = value(key, v)?,
            "mutation_mode" => {
                self.ga.mutation_mode = match v {
                    "per_gene" => MutationMode::PerGene,
                    "per_chromosome" => MutationMode::PerChromosome,
                    _ => {
                        return Err(Error::InvalidConfig {
                            field: key,
                            reason: format!("`{v}` is not per_gene or per_chromosome"),
                        })
                    }
                }
            }
            "elite_count" => self.ga.elite_count = value(key, v)?,
            "w1" => self.ga.w1 = value(key, v)?,
            "w2" => self.ga.w2 = value(key, v)?,
            "rng_seed" => self.ga.rng_seed = value(key, v)?,
            "early_stop" => {
                let on: bool = value(key, v)?;
                self.ga.early_stop = match (on, self.ga.early_stop) {
                    (false, _) => None,
                    (true, Some(s)) => Some(s),
                    (true, None) => Some(EarlyStop::default()),
                };
            }
            "early_stop_closeness_db" => {
                self.ga
                    .early_stop
                    .get_or_insert_with(EarlyStop::default)
                    .closeness_db = value(key, v)?
            }
            "early_stop_floor_db" => {
                self.ga
                    .early_stop
                    .get_or_insert_with(EarlyStop::default)
                    .floor_db = value(key, v)?
            }
            "out_dir" => self.out_dir = Some(PathBuf::from(v)),
            _ => unreachable!("key list and match arms agree"),
        }
        Ok(())
    }

    /// Parses a `key=value` configuration on top of the defaults.
    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = Self::default();
        cfg.apply_text(text)?;
        Ok(cfg)
    }

    pub fn apply_text(&mut self, text: &str) -> Result<()> {
        for (line, key, v) in parse_key_values(text)? {
            self.set(&key, &v).map_err(|e| match e {
                Error::InvalidConfig { field, reason } => {
                    parse_error(line, 1, format!("{field}: {reason}"))
                }
                other => other,
            })?;
        }
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::parse(&fs::read_to_string(path)?)
    }

    pub fn validate(&self) -> Result<()> {
        self.array.validate()?;
        self.metrics.validate()?;
        self.ga.validate()
    }

    /// Serializes every field; [`RunConfig::parse`] reads it back unchanged.
    pub fn to_text(&self) -> String {
        let a = &self.array;
        let m = &self.metrics;
        let g = &self.ga;
        let mut out = String::new();
        let mut kv = |k: &str, v: String| writeln!(out, "{k}={v}").unwrap();
        kv("element_pairs", a.element_pairs.to_string());
        kv("spacing_wavelengths", a.spacing_wavelengths.to_string());
        kv("time_steps", a.time_steps.to_string());
        kv("max_gene", a.max_gene.to_string());
        kv(
            "modulation_period_seconds",
            a.modulation_period_seconds.to_string(),
        );
        kv("carrier_frequency_hz", a.carrier_frequency_hz.to_string());
        kv("grid_points", m.grid_points.to_string());
        kv("sideband_count", m.sideband_count.to_string());
        kv("suppression_clamp_db", m.suppression_clamp_db.to_string());
        kv("refine_extrema", m.refine_extrema.to_string());
        kv("population_size", g.population_size.to_string());
        kv("generations", g.generations.to_string());
        kv("crossover_probability", g.crossover_probability.to_string());
        kv("mutation_probability", g.mutation_probability.to_string());
        kv(
            "mutation_mode",
            match g.mutation_mode {
                MutationMode::PerGene => "per_gene".into(),
                MutationMode::PerChromosome => "per_chromosome".into(),
            },
        );
        kv("elite_count", g.elite_count.to_string());
        kv("w1", g.w1.to_string());
        kv("w2", g.w2.to_string());
        kv("rng_seed", g.rng_seed.to_string());
        kv("early_stop", g.early_stop.is_some().to_string());
        if let Some(s) = g.early_stop {
            kv("early_stop_closeness_db", s.closeness_db.to_string());
            kv("early_stop_floor_db", s.floor_db.to_string());
        }
        if let Some(dir) = &self.out_dir {
            kv("out_dir", dir.display().to_string());
        }
        out
    }
}
