//! Synthesis of time-modulated linear antenna arrays.
//!
//! Each element pair of a symmetric broadside array is driven by an integer
//! excitation level that changes over `L` equal time steps per modulation
//! period. The periodic switching moves part of the radiated power into
//! sidebands at `f0 + m·prf`. This crate evaluates the center-frequency and
//! sideband patterns of such schedules, measures their sidelobe (SLL) and
//! sideband (SBL) levels, and searches for schedules that keep both low with
//! an integer-coded genetic algorithm.
//!
//! ```
//! use tmarray::{ArrayConfig, ExcitationSchedule, MetricsConfig, MetricsEvaluator};
//!
//! let eval = MetricsEvaluator::new(ArrayConfig::default(), MetricsConfig::default()).unwrap();
//! let uniform = ExcitationSchedule::uniform(8, 10, 1);
//! let m = eval.metrics(&uniform).unwrap();
//! assert!((m.sll_db() + 13.15).abs() < 0.05);
//! ```

pub mod array;
pub mod error;
pub mod ga;
pub mod io;
pub mod metrics;
pub mod sweep;

pub use array::{
    harmonic_coefficient, harmonic_pattern, instantaneous_field, numeric_fourier_coefficient,
    AngleGrid, ArrayConfig, ExcitationSchedule, HarmonicPattern, PatternEvaluator,
};
pub use error::{Error, Result};
pub use ga::{evolve, EarlyStop, GaConfig, GaOutcome, GaTrace, MutationMode, TraceRow};
pub use metrics::{
    compute_sbl, compute_sll, find_local_maxima, fitness, MetricsConfig, MetricsEvaluator,
    PatternMetrics, Peak,
};
pub use sweep::{sweep, RatioSummary, SweepRun, WeightRatio};
