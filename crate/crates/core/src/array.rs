//! Array geometry, excitation schedules and harmonic radiation patterns.
//!
//! A broadside linear array of `2N` isotropic elements, symmetric about its
//! center, is described by `N` element pairs. Pair `k` (1-based, counted
//! outward from the center) sits at a half-offset of `(2k - 1) d / 2` from the
//! array center, so its contribution to the array factor is
//! `cos((2k - 1) π (d/λ) sin θ)`. Each pair is switched through `L` equal time
//! steps per modulation period; the integer level during step `q` is the gene
//! `g_q^k` of the [`ExcitationSchedule`].
//!
//! The periodic excitation radiates at the harmonic frequencies `f0 + m·prf`.
//! [`harmonic_coefficient`] gives the closed-form Fourier coefficient of each
//! pair's switching waveform and [`harmonic_pattern`] turns those into
//! `|E_m(θ)|`. [`instantaneous_field`] and [`numeric_fourier_coefficient`]
//! are an independent time-domain route used to cross-check the closed form.

use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Geometry and modulation parameters of a symmetric time-modulated array.
#[derive(Clone, Debug, PartialEq)]
pub struct ArrayConfig {
    /// Number of symmetric element pairs `N` (the array has `2N` elements).
    pub element_pairs: usize,
    /// Element spacing in wavelengths, `d/λ`.
    pub spacing_wavelengths: f64,
    /// Time steps `L` per modulation period.
    pub time_steps: usize,
    /// Highest excitation level a gene may take.
    pub max_gene: u8,
    /// Modulation period `T_p` in seconds.
    pub modulation_period_seconds: f64,
    /// Carrier frequency `f0`. Only used to label absolute sideband frequencies.
    pub carrier_frequency_hz: f64,
}

impl Default for ArrayConfig {
    fn default() -> Self {
        Self {
            element_pairs: 8,
            spacing_wavelengths: 0.5,
            time_steps: 10,
            max_gene: 7,
            modulation_period_seconds: 1e-5,
            carrier_frequency_hz: 0.0,
        }
    }
}

impl ArrayConfig {
    pub fn validate(&self) -> Result<()> {
        if self.element_pairs == 0 {
            return Err(invalid("element_pairs", "must be at least 1"));
        }
        if self.time_steps == 0 {
            return Err(invalid("time_steps", "must be at least 1"));
        }
        if self.max_gene == 0 {
            return Err(invalid("max_gene", "must be at least 1"));
        }
        if !(self.spacing_wavelengths.is_finite() && self.spacing_wavelengths > 0.0) {
            return Err(invalid("spacing_wavelengths", "must be a positive number"));
        }
        if !(self.modulation_period_seconds.is_finite() && self.modulation_period_seconds > 0.0) {
            return Err(invalid(
                "modulation_period_seconds",
                "must be a positive number",
            ));
        }
        if !(self.carrier_frequency_hz.is_finite() && self.carrier_frequency_hz >= 0.0) {
            return Err(invalid("carrier_frequency_hz", "must be nonnegative"));
        }
        Ok(())
    }

    /// Normalized step length `τ/T_p = 1/L`.
    pub fn normalized_step(&self) -> f64 {
        1.0 / self.time_steps as f64
    }

    /// Duration of one time step, `τ = T_p / L`.
    pub fn step_seconds(&self) -> f64 {
        self.modulation_period_seconds / self.time_steps as f64
    }

    /// Modulation frequency `prf = 1/T_p`.
    pub fn modulation_frequency_hz(&self) -> f64 {
        1.0 / self.modulation_period_seconds
    }

    /// Absolute frequency of harmonic `m`, `f0 + m·prf`.
    pub fn harmonic_frequency_hz(&self, m: i32) -> f64 {
        self.carrier_frequency_hz + m as f64 * self.modulation_frequency_hz()
    }

    /// Chromosome length `N·L`.
    pub fn chromosome_len(&self) -> usize {
        self.element_pairs * self.time_steps
    }

    /// Phase argument `(2k - 1) π (d/λ) sin θ` of pair `k` (1-based).
    #[inline]
    pub fn pair_phase(&self, k: usize, theta: f64) -> f64 {
        (2 * k - 1) as f64 * PI * self.spacing_wavelengths * theta.sin()
    }

    /// Checks that `schedule` has this array's shape and gene range.
    pub fn check_schedule(&self, schedule: &ExcitationSchedule) -> Result<()> {
        if schedule.elements() != self.element_pairs || schedule.steps() != self.time_steps {
            return Err(Error::DimensionMismatch {
                expected_rows: self.element_pairs,
                expected_cols: self.time_steps,
                found_rows: schedule.elements(),
                found_cols: schedule.steps(),
            });
        }
        for (i, &g) in schedule.genes().iter().enumerate() {
            if g > self.max_gene {
                return Err(Error::GeneOutOfRange {
                    element: i / self.time_steps + 1,
                    step: i % self.time_steps + 1,
                    value: g as u32,
                    max_gene: self.max_gene,
                });
            }
        }
        Ok(())
    }
}

fn invalid(field: &'static str, reason: &str) -> Error {
    Error::InvalidConfig {
        field,
        reason: reason.to_string(),
    }
}

/// Integer excitation levels, one row per element pair (center outward) and
/// one column per time step.
///
/// Stored row-major, so [`genes`](Self::genes) is exactly the chromosome
/// `g_1^1 … g_L^1 g_1^2 … g_L^N`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ExcitationSchedule {
    elements: usize,
    steps: usize,
    genes: Vec<u8>,
}

impl ExcitationSchedule {
    /// Builds a schedule from a flattened chromosome.
    pub fn new(elements: usize, steps: usize, genes: Vec<u8>) -> Result<Self> {
        if elements == 0 || steps == 0 || genes.len() != elements * steps {
            return Err(Error::DimensionMismatch {
                expected_rows: elements,
                expected_cols: steps,
                found_rows: genes.len().checked_div(steps).unwrap_or(0),
                found_cols: steps,
            });
        }
        Ok(Self {
            elements,
            steps,
            genes,
        })
    }

    pub fn from_rows(rows: &[Vec<u8>]) -> Result<Self> {
        let steps = rows.first().map_or(0, Vec::len);
        if let Some(bad) = rows.iter().find(|r| r.len() != steps) {
            return Err(Error::DimensionMismatch {
                expected_rows: rows.len(),
                expected_cols: steps,
                found_rows: rows.len(),
                found_cols: bad.len(),
            });
        }
        Self::new(rows.len(), steps, rows.concat())
    }

    /// Every gene set to `level`.
    pub fn uniform(elements: usize, steps: usize, level: u8) -> Self {
        Self {
            elements,
            steps,
            genes: vec![level; elements * steps],
        }
    }

    pub fn elements(&self) -> usize {
        self.elements
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    pub fn genes(&self) -> &[u8] {
        &self.genes
    }

    pub fn genes_mut(&mut self) -> &mut [u8] {
        &mut self.genes
    }

    pub fn into_genes(self) -> Vec<u8> {
        self.genes
    }

    /// Gene of element `element` at step `step`, both 0-based.
    pub fn gene(&self, element: usize, step: usize) -> u8 {
        self.genes[element * self.steps + step]
    }

    pub fn set_gene(&mut self, element: usize, step: usize, value: u8) {
        self.genes[element * self.steps + step] = value;
    }

    /// Time sequence of one element pair (0-based).
    pub fn row(&self, element: usize) -> &[u8] {
        &self.genes[element * self.steps..(element + 1) * self.steps]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[u8]> {
        self.genes.chunks_exact(self.steps)
    }

    pub fn is_all_zero(&self) -> bool {
        self.genes.iter().all(|&g| g == 0)
    }

    /// True when every row holds a single level for the whole period.
    pub fn is_static(&self) -> bool {
        self.rows().all(|r| r.iter().all(|&g| g == r[0]))
    }

    pub fn gene_sum(&self) -> u64 {
        self.genes.iter().map(|&g| g as u64).sum()
    }

    /// Multiplies every gene by `factor`, or `None` on `u8` overflow.
    pub fn scaled(&self, factor: u8) -> Option<Self> {
        let genes = self
            .genes
            .iter()
            .map(|&g| g.checked_mul(factor))
            .collect::<Option<Vec<_>>>()?;
        Some(Self { genes, ..*self })
    }
}

/// Strictly increasing observation angles inside `[0, π/2]`.
#[derive(Clone, Debug, PartialEq)]
pub struct AngleGrid(Vec<f64>);

impl AngleGrid {
    pub fn new(theta_radians: Vec<f64>) -> Result<Self> {
        if theta_radians.is_empty() {
            return Err(Error::InvalidGrid("grid is empty".into()));
        }
        if let Some(bad) = theta_radians
            .iter()
            .find(|t| !(t.is_finite() && (0.0..=FRAC_PI_2).contains(*t)))
        {
            return Err(Error::InvalidGrid(format!(
                "angle {bad} rad is outside [0, pi/2]"
            )));
        }
        if let Some(w) = theta_radians.windows(2).position(|w| w[1] <= w[0]) {
            return Err(Error::InvalidGrid(format!(
                "angles must be strictly increasing (index {})",
                w + 1
            )));
        }
        Ok(Self(theta_radians))
    }

    /// `points` equally spaced angles covering `[0, π/2]` inclusive.
    pub fn uniform(points: usize) -> Result<Self> {
        match points {
            0 => Err(Error::InvalidGrid("grid is empty".into())),
            1 => Ok(Self(vec![0.0])),
            _ => {
                let step = FRAC_PI_2 / (points - 1) as f64;
                let mut theta: Vec<f64> = (0..points).map(|i| i as f64 * step).collect();
                theta[points - 1] = FRAC_PI_2;
                Ok(Self(theta))
            }
        }
    }

    pub fn angles(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// Sampled `|E_m(θ)|` for one harmonic index.
#[derive(Clone, Debug, PartialEq)]
pub struct HarmonicPattern {
    pub harmonic_index: i32,
    pub theta_radians: Vec<f64>,
    pub magnitude: Vec<f64>,
}

impl HarmonicPattern {
    pub fn new(harmonic_index: i32, theta_radians: Vec<f64>, magnitude: Vec<f64>) -> Result<Self> {
        if theta_radians.len() != magnitude.len() {
            return Err(Error::InvalidGrid(format!(
                "{} angles but {} magnitudes",
                theta_radians.len(),
                magnitude.len()
            )));
        }
        if theta_radians.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidGrid(
                "angles must be strictly increasing".into(),
            ));
        }
        Ok(Self {
            harmonic_index,
            theta_radians,
            magnitude,
        })
    }

    pub fn len(&self) -> usize {
        self.magnitude.len()
    }

    pub fn is_empty(&self) -> bool {
        self.magnitude.is_empty()
    }
}

/// `sin(π m τ̄) / (π m)` with `τ̄ = 1/L`, exact at the removable singularity
/// `m = 0` and at the zeros `m ≡ 0 (mod L)`.
fn harmonic_prefactor(m: i32, steps: usize) -> f64 {
    if m == 0 {
        return 1.0 / steps as f64;
    }
    if (m.unsigned_abs() as usize).is_multiple_of(steps) {
        return 0.0;
    }
    let pm = PI * m as f64;
    (pm / steps as f64).sin() / pm
}

/// Closed-form Fourier coefficient of one element's switching sequence.
pub(crate) fn row_coefficient(row: &[u8], m: i32) -> Complex64 {
    let steps = row.len();
    let prefactor = harmonic_prefactor(m, steps);
    if prefactor == 0.0 {
        return Complex64::new(0.0, 0.0);
    }
    if m == 0 {
        let sum: u64 = row.iter().map(|&g| g as u64).sum();
        return Complex64::new(prefactor * sum as f64, 0.0);
    }
    let phase_unit = -PI * m as f64 / steps as f64;
    let sum: Complex64 = row
        .iter()
        .enumerate()
        .filter(|(_, &g)| g != 0)
        .map(|(q, &g)| g as f64 * Complex64::cis(phase_unit * (2 * q + 1) as f64))
        .sum();
    sum * prefactor
}

/// Fourier coefficient `a_mk` of element pair `k` (1-based) at harmonic `m`:
///
/// `a_mk = sin(π m τ̄)/(π m) · Σ_q g_q^k exp(-j π m τ̄ (2q - 1))`, with the
/// prefactor taken as `τ̄` at `m = 0`.
pub fn harmonic_coefficient(
    config: &ArrayConfig,
    schedule: &ExcitationSchedule,
    k: usize,
    m: i32,
) -> Result<Complex64> {
    config.check_schedule(schedule)?;
    check_element(config, k)?;
    Ok(row_coefficient(schedule.row(k - 1), m))
}

/// Same quantity as [`harmonic_coefficient`], obtained by integrating the
/// piecewise-constant waveform `U_k(t)` against `exp(-j 2π m t / T_p)` over one
/// period, step by step in closed form.
pub fn numeric_fourier_coefficient(
    config: &ArrayConfig,
    schedule: &ExcitationSchedule,
    k: usize,
    m: i32,
) -> Result<Complex64> {
    config.check_schedule(schedule)?;
    check_element(config, k)?;
    let period = config.modulation_period_seconds;
    let tau = config.step_seconds();
    let row = schedule.row(k - 1);
    let integral: Complex64 = if m == 0 {
        row.iter()
            .map(|&g| Complex64::new(g as f64 * tau, 0.0))
            .sum()
    } else {
        let omega = 2.0 * PI * m as f64 / period;
        row.iter()
            .enumerate()
            .map(|(q, &g)| {
                let start = q as f64 * tau;
                let end = start + tau;
                // ∫ exp(-jωt) dt over [start, end]
                let antiderivative_diff =
                    Complex64::cis(-omega * start) - Complex64::cis(-omega * end);
                g as f64 * antiderivative_diff / Complex64::new(0.0, omega)
            })
            .sum()
    };
    Ok(integral / period)
}

/// Instantaneous array factor `2 Σ_k U_k(t) cos((2k - 1) π (d/λ) sin θ)`.
///
/// The carrier factor `exp(j 2π f0 t)` is omitted: it has unit modulus and
/// drops out of every pattern magnitude. The result is therefore real.
pub fn instantaneous_field(
    config: &ArrayConfig,
    schedule: &ExcitationSchedule,
    theta: f64,
    t: f64,
) -> Result<Complex64> {
    config.check_schedule(schedule)?;
    let period = config.modulation_period_seconds;
    if !(0.0..period).contains(&t) {
        return Err(Error::TimeOutOfRange { t, period });
    }
    let step =
        ((t * config.time_steps as f64 / period).floor() as usize).min(config.time_steps - 1);
    let sum: f64 = (1..=config.element_pairs)
        .map(|k| schedule.gene(k - 1, step) as f64 * config.pair_phase(k, theta).cos())
        .sum();
    Ok(Complex64::new(2.0 * sum, 0.0))
}

/// `|E_m(θ)|` sampled on `grid`.
pub fn harmonic_pattern(
    config: &ArrayConfig,
    schedule: &ExcitationSchedule,
    m: i32,
    grid: &AngleGrid,
) -> Result<HarmonicPattern> {
    PatternEvaluator::new(config.clone(), grid.clone())?.pattern(schedule, m)
}

fn check_element(config: &ArrayConfig, k: usize) -> Result<()> {
    if k == 0 || k > config.element_pairs {
        return Err(Error::ElementIndex {
            k,
            element_pairs: config.element_pairs,
        });
    }
    Ok(())
}

/// Evaluates harmonic patterns of many schedules on a fixed grid.
///
/// The per-pair cosine table is built once; each pattern then costs one
/// coefficient per pair plus `2N` multiply-adds per angle.
#[derive(Clone, Debug)]
pub struct PatternEvaluator {
    config: ArrayConfig,
    grid: AngleGrid,
    // point-major: cosines[i * N + (k - 1)]
    cosines: Vec<f64>,
}

impl PatternEvaluator {
    pub fn new(config: ArrayConfig, grid: AngleGrid) -> Result<Self> {
        config.validate()?;
        let cosines = grid
            .angles()
            .iter()
            .flat_map(|&theta| {
                let config = &config;
                (1..=config.element_pairs).map(move |k| config.pair_phase(k, theta).cos())
            })
            .collect();
        Ok(Self {
            config,
            grid,
            cosines,
        })
    }

    pub fn config(&self) -> &ArrayConfig {
        &self.config
    }

    pub fn grid(&self) -> &AngleGrid {
        &self.grid
    }

    /// `a_mk` for every pair, innermost first. The schedule is assumed checked.
    pub fn coefficients(&self, schedule: &ExcitationSchedule, m: i32) -> Vec<Complex64> {
        schedule.rows().map(|row| row_coefficient(row, m)).collect()
    }

    /// Writes `|E_m(θ_i)|` for every grid angle into `out`. The schedule is
    /// assumed to have passed [`ArrayConfig::check_schedule`].
    pub fn magnitudes_into(&self, schedule: &ExcitationSchedule, m: i32, out: &mut Vec<f64>) {
        let n = self.config.element_pairs;
        let coeffs = self.coefficients(schedule, m);
        out.clear();
        if coeffs.iter().all(|c| c.re == 0.0 && c.im == 0.0) {
            out.resize(self.grid.len(), 0.0);
            return;
        }
        let (re, im): (Vec<f64>, Vec<f64>) = coeffs.iter().map(|c| (c.re, c.im)).unzip();
        out.extend(self.cosines.chunks_exact(n).map(|cos| {
            let mut acc_re = 0.0;
            let mut acc_im = 0.0;
            for ((c, r), i) in cos.iter().zip(&re).zip(&im) {
                acc_re += r * c;
                acc_im += i * c;
            }
            2.0 * acc_re.hypot(acc_im)
        }));
    }

    pub fn pattern(&self, schedule: &ExcitationSchedule, m: i32) -> Result<HarmonicPattern> {
        self.config.check_schedule(schedule)?;
        let mut magnitude = Vec::with_capacity(self.grid.len());
        self.magnitudes_into(schedule, m, &mut magnitude);
        Ok(HarmonicPattern {
            harmonic_index: m,
            theta_radians: self.grid.angles().to_vec(),
            magnitude,
        })
    }
}
