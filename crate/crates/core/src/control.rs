//! Feed-forward controllers.
//!
//! Vertical hopping uses a bare square-wave knee schedule. Forward hopping
//! uses a clock-driven CPG: the hip tracks a cosine whose phase is warped so
//! the retraction half-cycle occupies a configurable duty fraction, and the
//! knee fires a square-wave push-off pulse phase-locked to the same clock.
//! Both controllers are pure functions of time; gait phase locking emerges
//! from the dynamics, not from sensing.

use serde::{Deserialize, Serialize};

use crate::real::Real;

fn fract<T: Real>(x: T) -> T {
    x - x.floor()
}

/// Next time strictly after `t` at which `frequency * t + offset` crosses the
/// fractional position `p` (mod 1). Used to keep integration segments clear
/// of control discontinuities.
fn next_phase_time<T: Real>(frequency: T, offset: T, p: T, t: T) -> T {
    let u = frequency * t + offset;
    let mut n = (u - p).ceil();
    let eps = T::of(1e-9);
    if n + p <= u + eps {
        n += T::one();
    }
    (n + p - offset) / frequency
}

/// Square wave used for knee push-off pulses: `amplitude` while the cycle
/// fraction of `frequency * t` lies in `[phase_shift, phase_shift + duty)`
/// (wrapping), zero otherwise.
pub fn square_wave<T: Real>(frequency: T, amplitude: T, duty: T, phase_shift: T, t: T) -> T {
    let u = fract(frequency * t);
    let rel = fract(u - phase_shift);
    if rel < duty {
        amplitude
    } else {
        T::zero()
    }
}

/// PD torque toward a moving reference.
pub fn pd_torque<T: Real>(kp: T, kd: T, theta_ref: T, dtheta_ref: T, theta: T, dtheta: T) -> T {
    kp * (theta_ref - theta) + kd * (dtheta_ref - dtheta)
}

/// Critically damped derivative gain for a proportional gain `kp` acting on
/// inertia `inertia`.
pub fn critically_damped_kd<T: Real>(kp: T, inertia: T) -> T {
    T::of(2.0) * (kp * inertia).sqrt()
}

/// Open-loop vertical hopping schedule: a knee torque pulse of `duty`
/// fraction per cycle, placed at cycle fraction `phase0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VerticalSchedule<T> {
    /// Hopping frequency [Hz].
    pub frequency: T,
    /// Pulse torque at the knee joint [N·m].
    pub torque: T,
    /// Pulse width as a cycle fraction.
    pub duty: T,
    /// Cycle fraction at which the pulse starts; tuned so the pulse lands in
    /// the second half of stance once the gait entrains.
    pub phase0: T,
}

impl<T: Real> VerticalSchedule<T> {
    pub fn standard() -> Self {
        Self {
            frequency: T::of(2.2),
            torque: T::of(4.0),
            duty: T::of(0.22),
            phase0: T::of(0.40),
        }
    }

    pub fn knee_torque_at(&self, t: T) -> T {
        square_wave(self.frequency, self.torque, self.duty, self.phase0, t)
    }

    /// Next pulse edge strictly after `t`.
    pub fn next_discontinuity(&self, t: T) -> T {
        let on = next_phase_time(self.frequency, T::zero(), self.phase0, t);
        let off = next_phase_time(
            self.frequency,
            T::zero(),
            fract(self.phase0 + self.duty),
            t,
        );
        on.min(off)
    }
}

/// Clock-driven CPG for forward hopping.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CpgParams<T> {
    /// Hip swing amplitude [rad].
    pub hip_amplitude: T,
    /// Hip swing offset [rad].
    pub hip_offset: T,
    /// Cycle frequency [Hz].
    pub frequency: T,
    /// Fraction of the cycle spent on the retraction half (virtual duty).
    pub virtual_duty: T,
    /// Knee pulse torque [N·m].
    pub knee_torque: T,
    /// Knee pulse start as a cycle fraction.
    pub knee_phase_shift: T,
    /// Knee pulse width as a cycle fraction.
    pub knee_duty: T,
    /// Hip tracking gains.
    pub kp: T,
    pub kd: T,
    /// Lumped leg inertia about the hip used for swing-power estimates
    /// [kg·m^2].
    pub swing_inertia: T,
    /// Initial cycle phase as a fraction; repetitions randomize this.
    pub phase_offset: T,
}

impl<T: Real> CpgParams<T> {
    pub fn standard() -> Self {
        let deg = std::f64::consts::PI / 180.0;
        Self {
            hip_amplitude: T::of(18.0 * deg),
            hip_offset: T::of(2.0 * deg),
            frequency: T::of(1.85),
            virtual_duty: T::of(0.4),
            knee_torque: T::of(1.3),
            knee_phase_shift: T::of(0.75),
            knee_duty: T::of(0.2),
            kp: T::of(16.0),
            kd: T::of(0.88),
            swing_inertia: T::of(0.012),
            phase_offset: T::zero(),
        }
    }

    /// Raw and warped phase at time `t`.
    pub fn state_at(&self, t: T) -> CpgState<T> {
        let phi = T::of(2.0) * T::PI() * fract(self.frequency * t + self.phase_offset);
        CpgState {
            phi,
            warped: warp_phase(self.virtual_duty, phi),
        }
    }

    /// Hip reference angle at warped phase `warped`.
    pub fn hip_reference(&self, warped: T) -> T {
        self.hip_amplitude * warped.cos() + self.hip_offset
    }

    /// Hip reference angle, rate and acceleration at time `t`.
    ///
    /// The warped phase advances at a constant rate within each half-cycle,
    /// so the acceleration has no phase-rate term away from the two kinks.
    pub fn hip_kinematics_at(&self, t: T) -> (T, T, T) {
        let st = self.state_at(t);
        let two_pi = T::of(2.0) * T::PI();
        let d = self.virtual_duty;
        let rate = if st.phi < two_pi * d {
            two_pi * self.frequency / (T::of(2.0) * d)
        } else {
            two_pi * self.frequency / (T::of(2.0) * (T::one() - d))
        };
        let theta = self.hip_reference(st.warped);
        let dtheta = -self.hip_amplitude * st.warped.sin() * rate;
        let ddtheta = -self.hip_amplitude * st.warped.cos() * rate * rate;
        (theta, dtheta, ddtheta)
    }

    pub fn knee_torque_at(&self, t: T) -> T {
        square_wave(
            self.frequency,
            self.knee_torque,
            self.knee_duty,
            self.knee_phase_shift,
            t + self.phase_offset / self.frequency,
        )
    }

    /// Next control discontinuity strictly after `t`: knee pulse edges, the
    /// cycle wrap and the warp kink.
    pub fn next_discontinuity(&self, t: T) -> T {
        let f = self.frequency;
        let offs = self.phase_offset;
        let candidates = [
            next_phase_time(f, offs, self.knee_phase_shift, t),
            next_phase_time(f, offs, fract(self.knee_phase_shift + self.knee_duty), t),
            next_phase_time(f, offs, T::zero(), t),
            next_phase_time(f, offs, self.virtual_duty, t),
        ];
        candidates
            .into_iter()
            .fold(T::infinity(), |acc, c| acc.min(c))
    }
}

/// Phase of the CPG clock: raw `phi` and duty-warped `warped`, both in
/// `[0, 2 pi)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CpgState<T> {
    pub phi: T,
    pub warped: T,
}

/// Piecewise-linear phase warp. The first `virtual_duty` fraction of the raw
/// cycle maps onto `[0, pi)` (retraction half), the remainder onto
/// `[pi, 2 pi)`, keeping the map continuous and strictly increasing.
pub fn warp_phase<T: Real>(virtual_duty: T, phi: T) -> T {
    debug_assert!(
        virtual_duty > T::zero() && virtual_duty < T::one(),
        "virtual duty must lie in (0, 1)"
    );
    debug_assert!(
        phi >= T::zero() && phi < T::of(2.0) * T::PI() + T::of(1e-9),
        "phi must lie in [0, 2 pi)"
    );
    let two_pi = T::of(2.0) * T::PI();
    let d = virtual_duty;
    if phi < two_pi * d {
        phi / (T::of(2.0) * d)
    } else {
        (phi + two_pi * (T::one() - T::of(2.0) * d)) / (T::of(2.0) * (T::one() - d))
    }
}
