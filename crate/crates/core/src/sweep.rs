//! Repeated optimizer runs over several fitness weightings.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use crate::array::ArrayConfig;
use crate::error::{Error, Result};
use crate::ga::{evolve, GaConfig, GaOutcome};
use crate::metrics::MetricsConfig;

/// Fitness weights `(w1, w2)` on sidelobe and sideband suppression.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WeightRatio {
    pub w1: f64,
    pub w2: f64,
}

impl WeightRatio {
    pub const fn new(w1: f64, w2: f64) -> Self {
        Self { w1, w2 }
    }

    /// The four weightings `1:1, 1:3, 1:6, 1:10`.
    pub fn standard() -> Vec<Self> {
        [1.0, 3.0, 6.0, 10.0]
            .into_iter()
            .map(|w2| Self::new(1.0, w2))
            .collect()
    }
}

impl fmt::Display for WeightRatio {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.w1, self.w2)
    }
}

impl FromStr for WeightRatio {
    type Err = Error;

    /// Parses `"w1:w2"`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidConfig {
            field: "ratios",
            reason: format!("`{s}` is not of the form w1:w2"),
        };
        let (a, b) = s.trim().split_once(':').ok_or_else(bad)?;
        let w1 = a.trim().parse().map_err(|_| bad())?;
        let w2 = b.trim().parse().map_err(|_| bad())?;
        Ok(Self { w1, w2 })
    }
}

#[derive(Clone, Debug)]
pub struct SweepRun {
    pub ratio: WeightRatio,
    pub seed: u64,
    pub outcome: GaOutcome,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RatioSummary {
    pub ratio: WeightRatio,
    pub runs: usize,
    pub median_sll_suppression_db: f64,
    pub median_sbl_suppression_db: f64,
    pub median_fitness: f64,
}

pub fn median(values: &[f64]) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    match n {
        0 => f64::NAN,
        _ if n % 2 == 1 => v[n / 2],
        _ => 0.5 * (v[n / 2 - 1] + v[n / 2]),
    }
}

/// One optimizer run per `(ratio, seed)`. Runs execute in parallel and come
/// back ordered by ratio, then seed; each is identical to a lone [`evolve`]
/// with the same configuration.
pub fn sweep(
    array: &ArrayConfig,
    base: &GaConfig,
    metrics: &MetricsConfig,
    ratios: &[WeightRatio],
    seeds: &[u64],
) -> Result<(Vec<SweepRun>, Vec<RatioSummary>)> {
    if ratios.is_empty() {
        return Err(Error::InvalidConfig {
            field: "ratios",
            reason: "at least one weight ratio is required".into(),
        });
    }
    if seeds.is_empty() {
        return Err(Error::InvalidConfig {
            field: "seeds_per_ratio",
            reason: "at least one seed is required".into(),
        });
    }
    let jobs: Vec<(WeightRatio, u64)> = ratios
        .iter()
        .flat_map(|&r| seeds.iter().map(move |&s| (r, s)))
        .collect();
    let runs = jobs
        .into_par_iter()
        .map(|(ratio, seed)| {
            let ga = GaConfig {
                w1: ratio.w1,
                w2: ratio.w2,
                rng_seed: seed,
                ..base.clone()
            };
            evolve(array, &ga, metrics).map(|outcome| SweepRun {
                ratio,
                seed,
                outcome,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let summaries = summarize(ratios, &runs);
    Ok((runs, summaries))
}

pub fn summarize(ratios: &[WeightRatio], runs: &[SweepRun]) -> Vec<RatioSummary> {
    ratios
        .iter()
        .map(|&ratio| {
            let of_ratio: Vec<&SweepRun> = runs.iter().filter(|r| r.ratio == ratio).collect();
            let collect =
                |f: fn(&SweepRun) -> f64| of_ratio.iter().map(|r| f(r)).collect::<Vec<_>>();
            RatioSummary {
                ratio,
                runs: of_ratio.len(),
                median_sll_suppression_db: median(&collect(|r| {
                    r.outcome.metrics.sll_suppression_db
                })),
                median_sbl_suppression_db: median(&collect(|r| {
                    r.outcome.metrics.sbl_suppression_db
                })),
                median_fitness: median(&collect(|r| r.outcome.best_fitness)),
            }
        })
        .collect()
}
