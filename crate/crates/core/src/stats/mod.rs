//! Estimators, fits, envelope checks and exact oracles over trajectories.

mod audit;
mod binomial;
mod envelope;
mod fit;
mod progress;
mod summary;

pub use audit::{gap_audit, pooled_activation_z, GapAudit};
pub use binomial::{bernoulli_tail_bound, exact_binomial_tail, EXACT_TAIL_MAX_N};
pub use envelope::{envelope_violations, first_violation_lag_linear, Envelope};
pub use fit::{exponent_fit, ExponentFit};
pub use progress::{windowed_progress, windowed_progress_with_horizon, WindowedProgress, PROGRESS_SAMPLES};
pub use summary::{
    speed_estimate, z_for_level, EnsembleSummary, MetricSummary, QuantileSketch, RunSummary, SpeedEstimate,
};
