//! Sidelobe and sideband levels of a schedule, and the weighted fitness the
//! optimizer maximizes.
//!
//! All levels are carried as positive *suppression* in dB, i.e. how far below
//! the center-frequency main beam `|E_0(0)|` a lobe sits. The display layer
//! negates them (`SLL = -29.3 dB` means 29.3 dB of suppression).
//!
//! Stationary points of a pattern are located on a uniform angle grid by
//! neighbour comparison, optionally refined with one parabolic step.

use crate::array::{AngleGrid, ArrayConfig, ExcitationSchedule, HarmonicPattern, PatternEvaluator};
use crate::error::{Error, Result};

/// Magnitudes below this fraction of the main beam count as a null.
const NULL_FRACTION: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq)]
pub struct MetricsConfig {
    /// Uniform samples over `[0, π/2]`.
    pub grid_points: usize,
    /// Sidebands `1..=sideband_count` enter the sideband level.
    pub sideband_count: usize,
    /// Upper bound on any reported suppression (numerically-zero lobes).
    pub suppression_clamp_db: f64,
    /// Refine each interior peak with a parabola through its three samples.
    pub refine_extrema: bool,
}

impl Default for MetricsConfig {
    fn default() -> Self {
        Self {
            grid_points: 2001,
            sideband_count: 10,
            suppression_clamp_db: 240.0,
            refine_extrema: true,
        }
    }
}

impl MetricsConfig {
    pub fn validate(&self) -> Result<()> {
        if self.grid_points < 3 {
            return Err(Error::InvalidConfig {
                field: "grid_points",
                reason: format!("{} < 3", self.grid_points),
            });
        }
        if self.sideband_count == 0 {
            return Err(Error::InvalidConfig {
                field: "sideband_count",
                reason: "must be at least 1".into(),
            });
        }
        if !(self.suppression_clamp_db.is_finite() && self.suppression_clamp_db > 0.0) {
            return Err(Error::InvalidConfig {
                field: "suppression_clamp_db",
                reason: "must be a positive number".into(),
            });
        }
        Ok(())
    }
}

/// A local maximum of a sampled pattern.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Peak {
    /// Grid index of the sample the peak was found at.
    pub index: usize,
    pub theta: f64,
    pub magnitude: f64,
}

/// Level summary of one schedule.
#[derive(Clone, Debug, PartialEq)]
pub struct PatternMetrics {
    /// `20 log10 |E_0(0)|`.
    pub main_beam_db: f64,
    pub sll_suppression_db: f64,
    /// Minimum over [`per_sideband_suppression_db`](Self::per_sideband_suppression_db).
    pub sbl_suppression_db: f64,
    /// Entry `n - 1` is the suppression of the strongest lobe of sideband `n`.
    pub per_sideband_suppression_db: Vec<f64>,
    /// Angles of the center-frequency sidelobe peaks outside the main lobe.
    pub sidelobe_angles: Vec<f64>,
}

impl PatternMetrics {
    /// Sidelobe level in the usual negative-dB convention.
    pub fn sll_db(&self) -> f64 {
        -self.sll_suppression_db
    }

    /// Sideband level in the usual negative-dB convention.
    pub fn sbl_db(&self) -> f64 {
        -self.sbl_suppression_db
    }
}

/// Local maxima of `pattern`.
///
/// Interior samples strictly above both neighbours are peaks; a flat run
/// that is higher than both sides reports its first sample. An endpoint is a
/// peak when it is above its single neighbour. With `refine`, interior peaks
/// move to the vertex of the parabola through their three samples.
pub fn find_local_maxima(pattern: &HarmonicPattern, refine: bool) -> Result<Vec<Peak>> {
    if pattern.len() < 3 {
        return Err(Error::GridTooShort(pattern.len()));
    }
    Ok(local_maxima(
        &pattern.theta_radians,
        &pattern.magnitude,
        refine,
    ))
}

pub(crate) fn local_maxima(theta: &[f64], y: &[f64], refine: bool) -> Vec<Peak> {
    let n = y.len();
    let mut peaks = Vec::new();
    let mut start = 0;
    while start < n {
        let mut end = start + 1;
        while end < n && y[end] == y[start] {
            end += 1;
        }
        let left_lower = start == 0 || y[start - 1] < y[start];
        let right_lower = end == n || y[end] < y[start];
        let whole = start == 0 && end == n;
        if left_lower && right_lower && !whole {
            let peak = if refine && start > 0 && start + 1 < n {
                parabolic_vertex(theta, y, start)
            } else {
                Peak {
                    index: start,
                    theta: theta[start],
                    magnitude: y[start],
                }
            };
            peaks.push(peak);
        }
        start = end;
    }
    peaks
}

fn parabolic_vertex(theta: &[f64], y: &[f64], i: usize) -> Peak {
    let sample = Peak {
        index: i,
        theta: theta[i],
        magnitude: y[i],
    };
    // Local coordinates around the centre sample.
    let (u0, u2) = (theta[i - 1] - theta[i], theta[i + 1] - theta[i]);
    let (d0, d2) = (y[i - 1] - y[i], y[i + 1] - y[i]);
    let det = u0 * u2 * (u0 - u2);
    if det == 0.0 {
        return sample;
    }
    let a = (d0 * u2 - d2 * u0) / det;
    let b = (d2 * u0 * u0 - d0 * u2 * u2) / det;
    if a >= 0.0 || a.is_nan() {
        return sample;
    }
    let u = (-b / (2.0 * a)).clamp(u0, u2);
    Peak {
        index: i,
        theta: theta[i] + u,
        magnitude: (a * u * u + b * u + y[i]).max(y[i]),
    }
}

/// `20 log10(main / peak)`, clamped to `clamp` (and to `clamp` for zero peaks).
fn suppression_db(main: f64, peak: f64, clamp: f64) -> f64 {
    if peak <= 0.0 {
        return clamp;
    }
    (20.0 * (main / peak).log10()).min(clamp)
}

/// Metrics of many schedules on one array and grid.
#[derive(Clone, Debug)]
pub struct MetricsEvaluator {
    patterns: PatternEvaluator,
    config: MetricsConfig,
}

impl MetricsEvaluator {
    pub fn new(array: ArrayConfig, config: MetricsConfig) -> Result<Self> {
        config.validate()?;
        let grid = AngleGrid::uniform(config.grid_points)?;
        Ok(Self {
            patterns: PatternEvaluator::new(array, grid)?,
            config,
        })
    }

    pub fn array(&self) -> &ArrayConfig {
        self.patterns.config()
    }

    pub fn config(&self) -> &MetricsConfig {
        &self.config
    }

    pub fn patterns(&self) -> &PatternEvaluator {
        &self.patterns
    }

    fn main_beam(&self, schedule: &ExcitationSchedule) -> Result<f64> {
        self.array().check_schedule(schedule)?;
        if schedule.is_all_zero() {
            return Err(Error::DegenerateSchedule);
        }
        Ok(2.0 * schedule.gene_sum() as f64 / self.array().time_steps as f64)
    }

    fn sll_with(
        &self,
        schedule: &ExcitationSchedule,
        main: f64,
        buf: &mut Vec<f64>,
    ) -> (f64, Vec<f64>) {
        self.patterns.magnitudes_into(schedule, 0, buf);
        let y = buf.as_slice();
        let floor = NULL_FRACTION * main;
        let first_null = (1..y.len())
            .find(|&i| y[i] < floor || (i + 1 < y.len() && y[i] < y[i - 1] && y[i] < y[i + 1]));
        let Some(null) = first_null else {
            return (self.config.suppression_clamp_db, Vec::new());
        };
        let sidelobes: Vec<Peak> =
            local_maxima(self.patterns.grid().angles(), y, self.config.refine_extrema)
                .into_iter()
                .filter(|p| p.index > null)
                .collect();
        let strongest = sidelobes.iter().map(|p| p.magnitude).fold(0.0, f64::max);
        let angles = sidelobes.iter().map(|p| p.theta).collect();
        (
            suppression_db(main, strongest, self.config.suppression_clamp_db),
            angles,
        )
    }

    fn sbl_with(
        &self,
        schedule: &ExcitationSchedule,
        main: f64,
        buf: &mut Vec<f64>,
    ) -> (f64, Vec<f64>) {
        let clamp = self.config.suppression_clamp_db;
        let per_sideband: Vec<f64> = (1..=self.config.sideband_count)
            .map(|n| {
                self.patterns.magnitudes_into(schedule, n as i32, buf);
                let sampled = buf.iter().copied().fold(0.0, f64::max);
                let peak = local_maxima(
                    self.patterns.grid().angles(),
                    buf,
                    self.config.refine_extrema,
                )
                .iter()
                .map(|p| p.magnitude)
                .fold(sampled, f64::max);
                suppression_db(main, peak, clamp)
            })
            .collect();
        let worst = per_sideband.iter().copied().fold(f64::INFINITY, f64::min);
        (worst, per_sideband)
    }

    /// Sidelobe suppression and the angles of the sidelobe peaks considered.
    ///
    /// Every maximum before the first null after broadside belongs to the main
    /// lobe. A pattern without sidelobes reports the clamp value.
    pub fn sll(&self, schedule: &ExcitationSchedule) -> Result<(f64, Vec<f64>)> {
        let main = self.main_beam(schedule)?;
        Ok(self.sll_with(schedule, main, &mut Vec::new()))
    }

    /// Minimum sideband suppression and the per-sideband list.
    ///
    /// Each sideband contributes its global maximum over `[0, π/2]`,
    /// broadside included. Negative harmonics mirror the positive ones.
    pub fn sbl(&self, schedule: &ExcitationSchedule) -> Result<(f64, Vec<f64>)> {
        let main = self.main_beam(schedule)?;
        Ok(self.sbl_with(schedule, main, &mut Vec::new()))
    }

    pub fn metrics(&self, schedule: &ExcitationSchedule) -> Result<PatternMetrics> {
        let main = self.main_beam(schedule)?;
        let mut buf = Vec::with_capacity(self.config.grid_points);
        let (sll, sidelobe_angles) = self.sll_with(schedule, main, &mut buf);
        let (sbl, per_sideband) = self.sbl_with(schedule, main, &mut buf);
        Ok(PatternMetrics {
            main_beam_db: 20.0 * main.log10(),
            sll_suppression_db: sll,
            sbl_suppression_db: sbl,
            per_sideband_suppression_db: per_sideband,
            sidelobe_angles,
        })
    }

    /// `w1·SLL + w2·SBL` in suppression dB (larger is better).
    pub fn fitness(
        &self,
        schedule: &ExcitationSchedule,
        w1: f64,
        w2: f64,
    ) -> Result<(f64, PatternMetrics)> {
        check_weights(w1, w2)?;
        let metrics = self.metrics(schedule)?;
        Ok((weighted(&metrics, w1, w2), metrics))
    }
}

pub(crate) fn check_weights(w1: f64, w2: f64) -> Result<()> {
    for (field, w) in [("w1", w1), ("w2", w2)] {
        if !(w.is_finite() && w >= 0.0) {
            return Err(Error::InvalidConfig {
                field,
                reason: format!("weight {w} must be a nonnegative number"),
            });
        }
    }
    if w1 == 0.0 && w2 == 0.0 {
        return Err(Error::ZeroWeights);
    }
    Ok(())
}

/// Weighted fitness of precomputed metrics.
pub fn weighted(metrics: &PatternMetrics, w1: f64, w2: f64) -> f64 {
    w1 * metrics.sll_suppression_db + w2 * metrics.sbl_suppression_db
}

pub fn compute_sll(
    config: &ArrayConfig,
    schedule: &ExcitationSchedule,
    metrics_cfg: &MetricsConfig,
) -> Result<(f64, Vec<f64>)> {
    MetricsEvaluator::new(config.clone(), metrics_cfg.clone())?.sll(schedule)
}

pub fn compute_sbl(
    config: &ArrayConfig,
    schedule: &ExcitationSchedule,
    metrics_cfg: &MetricsConfig,
) -> Result<(f64, Vec<f64>)> {
    MetricsEvaluator::new(config.clone(), metrics_cfg.clone())?.sbl(schedule)
}

pub fn fitness(
    config: &ArrayConfig,
    schedule: &ExcitationSchedule,
    w1: f64,
    w2: f64,
    metrics_cfg: &MetricsConfig,
) -> Result<(f64, PatternMetrics)> {
    check_weights(w1, w2)?;
    MetricsEvaluator::new(config.clone(), metrics_cfg.clone())?.fitness(schedule, w1, w2)
}
