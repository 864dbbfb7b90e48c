//! Trial output: sampled trace, per-step summaries, outcome and energy
//! audit.

use serde::{Deserialize, Serialize};

use crate::real::Real;

/// One 1 kHz trace row. `x` is the hip travel coordinate (zero on the
/// vertical rig); forces are tendon-level, `grf` is the ground-normal
/// reaction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TraceSample<T> {
    pub t: T,
    pub x: T,
    pub y: T,
    pub vy: T,
    pub alpha: T,
    pub grf: T,
    pub f_spring: T,
    pub f_damper: T,
    pub piston_pos: T,
    pub tau_hip: T,
    pub tau_knee: T,
    pub p_elec: T,
}

/// One completed step: touchdown through liftoff to the following apex.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StepSummary<T> {
    /// 1-based step index.
    pub step: u32,
    pub touchdown_t: T,
    pub liftoff_t: T,
    /// Instant of the post-liftoff flight apex [s].
    pub apex_t: T,
    /// Foot clearance at the post-liftoff apex [m], relative to the ground
    /// level in effect at that apex.
    pub apex: T,
    /// Forward travel between this touchdown and the next [m]; zero on the
    /// vertical rig.
    pub step_length: T,
    /// Damper work-loop energy absorbed during stance [J].
    pub e_d: T,
    /// Damper force onset delay after spring force onset [ms]; `None` when
    /// the damper never fired during the stance.
    pub delay_ms: Option<T>,
    pub slip: bool,
    pub stop: bool,
}

/// How the trial ended.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Outcome<T> {
    /// Ran to its configured length.
    Completed,
    /// Knee reached the bottom-out angle.
    BottomedOut { t: T },
    /// Forward progress over a full controller cycle fell below 10 mm.
    Stopped { t: T },
    /// Event localization failed; indicates an internal inconsistency.
    NonConvergent { t: T },
    /// Hard wall-clock cap hit before the distance target.
    TimedOut { t: T },
}

impl<T> Outcome<T> {
    pub fn is_failure(&self) -> bool {
        !matches!(self, Outcome::Completed)
    }
}

/// Full result of one simulated trial.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord<T> {
    pub samples: Vec<TraceSample<T>>,
    pub steps: Vec<StepSummary<T>>,
    pub outcome: Outcome<T>,
    /// Total electrical energy drawn [J].
    pub e_elec: T,
    /// Mechanical motor work split by sign [J]; `w_neg` is non-positive.
    pub w_pos: T,
    pub w_neg: T,
    /// Damper viscous heat [J] and tendon work-loop intake [J].
    pub dissipated: T,
    pub absorbed: T,
    /// Simulated time [s] and forward travel [m].
    pub duration: T,
    pub distance: T,
    /// Peak mechanical energy seen [J] and the largest energy-ledger defect
    /// against it [J].
    pub peak_energy: T,
    pub max_ledger_defect: T,
    /// Instant of the scheduled perturbation (step-down removal), if any.
    pub perturbation_t: Option<T>,
}

impl<T: Real> TrialRecord<T> {
    pub fn new() -> Self {
        Self {
            samples: Vec::new(),
            steps: Vec::new(),
            outcome: Outcome::Completed,
            e_elec: T::zero(),
            w_pos: T::zero(),
            w_neg: T::zero(),
            dissipated: T::zero(),
            absorbed: T::zero(),
            duration: T::zero(),
            distance: T::zero(),
            peak_energy: T::zero(),
            max_ledger_defect: T::zero(),
            perturbation_t: None,
        }
    }

    /// Largest ledger defect as a fraction of peak mechanical energy.
    pub fn ledger_defect_fraction(&self) -> T {
        if self.peak_energy > T::zero() {
            self.max_ledger_defect / self.peak_energy
        } else {
            T::zero()
        }
    }
}

impl<T: Real> Default for TrialRecord<T> {
    fn default() -> Self {
        Self::new()
    }
}
