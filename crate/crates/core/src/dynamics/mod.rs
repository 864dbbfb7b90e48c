//! Hybrid flight/stance simulation for the vertical slider rig and the
//! boom-guided forward rig.
//!
//! Both simulators share the same skeleton: fixed-step RK4 on a master time
//! grid, sub-segments split at control discontinuities, guard events
//! (touchdown, liftoff, damper engage, bottom-out, apex) localized by
//! bisection, and energy bookkeeping integrated inside the state vector so
//! the ledger can be audited at every trace sample.

pub mod forward;
pub mod integrate;
pub mod record;
pub mod vertical;

pub use forward::simulate_forward;
pub use record::{Outcome, StepSummary, TraceSample, TrialRecord};
pub use vertical::simulate_vertical;

use crate::compliance::{damper_force_at, spring_force, viscous_force, DamperParams, SpringParams};
use crate::kinematics::{tendon_excursion, LegGeometry};
use crate::real::Real;

/// Loadcell-style force-onset threshold [N] for per-step delay summaries.
pub const FORCE_ONSET_N: f64 = 0.5;

/// Instantaneous leg forces at one kinematic state.
#[derive(Debug, Clone, Copy)]
pub(crate) struct LegForces<T> {
    /// Spring tendon tension [N].
    pub f_spring: T,
    /// Damper tendon force [N].
    pub f_damper: T,
    /// Axial force along the virtual leg, knee torque included [N].
    pub f_axial: T,
    pub piston_pos: T,
    pub piston_vel: T,
}

/// Evaluates the compliant elements and the knee drive at knee angle
/// `alpha`, knee rate `alpha_dot`, and joint-side knee torque `tau_knee`.
/// Pure in the state: the slaved piston makes damper force a function of
/// the knee coordinate alone.
pub(crate) fn leg_forces<T: Real>(
    geom: &LegGeometry<T>,
    spring: &SpringParams<T>,
    damper: &DamperParams<T>,
    alpha: T,
    alpha_dot: T,
    tau_knee: T,
) -> LegForces<T> {
    let x_s = tendon_excursion(geom.r_k, geom.alpha0, alpha);
    let x_d = tendon_excursion(geom.r_d, geom.alpha0, alpha);
    let engaged = x_d > damper.slack;
    let piston_pos = (x_d - damper.slack).max(T::zero());
    let piston_vel = if engaged {
        -geom.r_d * alpha_dot
    } else {
        T::zero()
    };
    let f_spring = spring_force(spring, x_s);
    let f_damper = damper_force_at(damper, piston_pos, piston_vel, engaged);
    let jac = geom.leg_jacobian_clamped(alpha);
    let f_axial = (f_spring * geom.r_k + f_damper * geom.r_d + tau_knee) / jac;
    LegForces {
        f_spring,
        f_damper,
        f_axial,
        piston_pos,
        piston_vel,
    }
}

/// Viscous heating rate [W]; non-negative.
pub(crate) fn dissipation_rate<T: Real>(damper: &DamperParams<T>, piston_vel: T) -> T {
    viscous_force(damper, piston_vel) * piston_vel
}

/// Deterministic per-trial jitter in [0, 1) derived from the config seed
/// (SplitMix64 finalizer).
pub(crate) fn seed_fraction(seed: u64) -> f64 {
    let mut z = seed.wrapping_add(0x9e3779b97f4a7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
    z = z ^ (z >> 31);
    (z >> 11) as f64 / (1u64 << 53) as f64
}

/// Linear-interpolated threshold-crossing detector for force onsets,
/// updated at every committed integration point.
#[derive(Debug, Clone, Copy)]
pub(crate) struct OnsetTracker<T> {
    prev_t: T,
    prev_f: T,
    pub onset: Option<T>,
    threshold: T,
}

impl<T: Real> OnsetTracker<T> {
    pub fn new(t: T, f: T, threshold: T) -> Self {
        Self {
            prev_t: t,
            prev_f: f,
            onset: None,
            threshold,
        }
    }

    pub fn update(&mut self, t: T, f: T) {
        if self.onset.is_none() && f > self.threshold {
            let span = f - self.prev_f;
            let frac = if span > T::zero() {
                ((self.threshold - self.prev_f) / span).max(T::zero()).min(T::one())
            } else {
                T::zero()
            };
            self.onset = Some(self.prev_t + frac * (t - self.prev_t));
        }
        self.prev_t = t;
        self.prev_f = f;
    }
}

/// Bookkeeping for the step currently in stance or flight.
#[derive(Debug, Clone, Copy)]
pub(crate) struct OpenStep<T> {
    pub index: u32,
    pub touchdown_t: T,
    pub touchdown_x: T,
    pub absorbed_at_touchdown: T,
    pub liftoff_t: Option<T>,
    pub e_d: T,
    pub spring: OnsetTracker<T>,
    pub damper: OnsetTracker<T>,
    pub slip: bool,
}

impl<T: Real> OpenStep<T> {
    pub fn new(index: u32, t: T, x: T, absorbed: T) -> Self {
        let thr = T::of(FORCE_ONSET_N);
        Self {
            index,
            touchdown_t: t,
            touchdown_x: x,
            absorbed_at_touchdown: absorbed,
            liftoff_t: None,
            e_d: T::zero(),
            spring: OnsetTracker::new(t, T::zero(), thr),
            damper: OnsetTracker::new(t, T::zero(), thr),
            slip: false,
        }
    }

    /// Delay between damper and spring force onsets [ms], clamped at zero;
    /// `None` when the damper never fired.
    pub fn delay_ms(&self) -> Option<T> {
        let d = self.damper.onset?;
        let s = self.spring.onset.unwrap_or(self.touchdown_t);
        Some((d - s).max(T::zero()) * T::of(1000.0))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::compliance::DamperParams;

    #[test]
    fn onset_tracker_interpolates_the_crossing() {
        let mut tr = OnsetTracker::new(0.0_f64, 0.0, 0.5);
        tr.update(0.001, 0.2);
        assert!(tr.onset.is_none());
        tr.update(0.002, 1.2);
        let t = tr.onset.unwrap();
        assert!((t - 0.0013).abs() < 1e-12, "onset {t}");
        // Latches the first crossing.
        tr.update(0.003, 0.0);
        tr.update(0.004, 2.0);
        assert_eq!(tr.onset.unwrap(), t);
    }

    #[test]
    fn seed_fraction_is_deterministic_and_spread() {
        assert_eq!(seed_fraction(7), seed_fraction(7));
        assert_ne!(seed_fraction(7), seed_fraction(8));
        for s in 0..100 {
            let u = seed_fraction(s);
            assert!((0.0..1.0).contains(&u));
        }
    }

    #[test]
    fn leg_forces_respect_slack_and_clamps() {
        let geom = LegGeometry::<f64>::standard();
        let spring = SpringParams::standard();
        let damper = DamperParams {
            slack: 0.004,
            ..DamperParams::standard()
        };
        // Compressed past slack while closing: damper transmits.
        let alpha = geom.alpha0 - 0.3;
        let f = leg_forces(&geom, &spring, &damper, alpha, -2.0, 0.0);
        assert!(f.piston_pos > 0.0 && f.f_damper > 0.0 && f.f_spring > 0.0);
        let jac = geom.leg_jacobian_clamped(alpha);
        let expect = (f.f_spring * geom.r_k + f.f_damper * geom.r_d) / jac;
        assert!((f.f_axial - expect).abs() < 1e-12 * expect.abs());
        // Within slack: piston idle.
        let f = leg_forces(&geom, &spring, &damper, geom.alpha0 - 0.1, -2.0, 0.0);
        assert_eq!(f.piston_pos, 0.0);
        assert_eq!(f.f_damper, 0.0);
        // Past rest: tendons slack, only the knee torque pushes.
        let f = leg_forces(&geom, &spring, &damper, geom.alpha0 + 0.1, 1.0, 2.0);
        assert_eq!(f.f_spring, 0.0);
        assert_eq!(f.f_damper, 0.0);
        assert!(f.f_axial > 0.0);
    }

    #[test]
    fn dissipation_rate_is_non_negative_both_ways() {
        let damper = DamperParams::<f64>::standard();
        assert!(dissipation_rate(&damper, 0.2) > 0.0);
        assert!(dissipation_rate(&damper, -0.2) > 0.0);
        assert_eq!(dissipation_rate(&damper, 0.0), 0.0);
    }
}
