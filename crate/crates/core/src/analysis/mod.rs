//! Offline analysis: zero-lag filtering and gait/energetics metrics.

pub mod filter;
pub mod metrics;

pub use filter::{butterworth_zero_lag, moving_average, residual_cutoff, FilterError};
pub use metrics::{
    classify_failures, coh, cot, cycle_time_std, engagement_delay, recovery_steps, FailureCounts,
    MetricsError, StepFlags, WorkLoop,
};
