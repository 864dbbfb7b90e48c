//! Motor and gearbox model for the hip and knee drives.
//!
//! Both joints use the same outrunner with different reductions: a 5:1
//! planetary at the hip, plus a 25:12 belt stage at the knee. Torque
//! commands are clamped by the motor's peak torque reflected through the
//! gearing; the electrical model charges positive mechanical work plus
//! winding Joule losses and, by default, recuperates nothing while braking.

use serde::{Deserialize, Serialize};

use crate::real::Real;

/// Nominal bus voltage [V]: a fully charged 3S pack. Together with `kt` it
/// fixes the no-load speed and thus how quickly available torque collapses
/// when a joint runs away from the motor.
pub const BUS_VOLTAGE: f64 = 14.8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Joint {
    Hip,
    Knee,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MotorParams<T> {
    /// Torque constant [N·m/A].
    pub kt: T,
    /// Winding resistance [ohm]; lumps driver losses as well.
    pub winding_resistance: T,
    /// Peak motor-side torque [N·m].
    pub tau_max_motor: T,
    /// Hip reduction ratio (joint torque = motor torque * gear).
    pub gear_hip: T,
    /// Knee reduction ratio, planetary times belt stage.
    pub gear_knee: T,
    /// When true, negative mechanical power offsets the electrical draw.
    pub allow_regen: bool,
}

impl<T: Real> MotorParams<T> {
    /// Reference drive: KV 115 outrunner (kt = 60 / (2 pi 115)), 1.3 N·m
    /// peak, 5:1 hip reduction, 5 * 25/12 knee reduction.
    pub fn standard() -> Self {
        Self {
            kt: T::of(60.0 / (2.0 * std::f64::consts::PI * 115.0)),
            winding_resistance: T::of(1.0),
            tau_max_motor: T::of(1.3),
            gear_hip: T::of(5.0),
            gear_knee: T::of(5.0 * 25.0 / 12.0),
            allow_regen: false,
        }
    }

    pub fn gear(&self, joint: Joint) -> T {
        match joint {
            Joint::Hip => self.gear_hip,
            Joint::Knee => self.gear_knee,
        }
    }

    /// Largest joint-side torque the drive can deliver.
    pub fn tau_max_joint(&self, joint: Joint) -> T {
        self.tau_max_motor * self.gear(joint)
    }

    /// Joint-side no-load speed at the nominal bus voltage [rad/s].
    pub fn no_load_speed(&self, joint: Joint) -> T {
        T::of(BUS_VOLTAGE) / (self.kt * self.gear(joint))
    }
}

/// Clamps a commanded joint torque to the drive's capability.
pub fn joint_torque<T: Real>(params: &MotorParams<T>, tau_cmd: T, joint: Joint) -> T {
    let limit = params.tau_max_joint(joint);
    tau_cmd.max(-limit).min(limit)
}

/// Clamps a commanded joint torque to what the drive can deliver at the
/// current joint speed. Against the motion the driver can always source the
/// peak clamp (it just dumps the back-EMF), but along the motion the supply
/// voltage caps the current, so torque follows the falling line
/// `kt (V - kt w) / R` and vanishes at the no-load speed. Without this the
/// knee could keep feeding energy into an extending leg at speeds the real
/// motor cannot reach.
pub fn available_torque<T: Real>(
    params: &MotorParams<T>,
    tau_cmd: T,
    joint: Joint,
    omega_joint: T,
) -> T {
    let tau = joint_torque(params, tau_cmd, joint);
    let dir = if tau >= T::zero() { T::one() } else { -T::one() };
    let kt_joint = params.kt * params.gear(joint);
    let emf_line = kt_joint * (T::of(BUS_VOLTAGE) - kt_joint * omega_joint * dir)
        / params.winding_resistance;
    let avail = emf_line.min(params.tau_max_joint(joint)).max(T::zero());
    dir * tau.abs().min(avail)
}

/// Electrical power drawn while exerting `tau_joint` at joint speed
/// `omega_joint`: positive mechanical power plus `I^2 R` winding losses.
/// Braking work is discarded unless `allow_regen` is set.
pub fn electrical_power<T: Real>(
    params: &MotorParams<T>,
    tau_joint: T,
    omega_joint: T,
    joint: Joint,
) -> T {
    let gear = params.gear(joint);
    let tau_m = tau_joint / gear;
    let omega_m = omega_joint * gear;
    let mech = tau_m * omega_m;
    let mech_term = if params.allow_regen {
        mech
    } else {
        mech.max(T::zero())
    };
    let current = tau_m / params.kt;
    mech_term + current * current * params.winding_resistance
}
