//! Virtual-leg reduction of the segmented leg.
//!
//! The physical leg is a pantograph of three equal segments; for the sagittal
//! dynamics it is reduced to a symmetric two-segment virtual leg whose knee
//! angle `alpha` fully determines the hip-to-foot distance. Tendon-driven
//! elements (spring, damper) wrap pulleys on the knee shaft, so their linear
//! excursion is proportional to the knee flexion angle.

use serde::{Deserialize, Serialize};

use crate::real::Real;

/// Jacobian magnitudes below this are treated as a kinematic singularity.
const JACOBIAN_SINGULAR: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum KinematicsError<T: Real> {
    #[error("knee angle {alpha} rad outside the open interval (0, pi)")]
    AngleOutOfRange { alpha: T },
    #[error("leg length {length} m outside the reachable range (0, {max}]")]
    LengthOutOfRange { length: T, max: T },
    #[error("leg jacobian singular at alpha = {alpha} rad")]
    SingularJacobian { alpha: T },
    #[error("geometry field {field} must be positive, got {value}")]
    NonPositive { field: &'static str, value: T },
}

impl<T: Real> KinematicsError<T> {
    /// Name of the geometry field at fault; used for error paths in config
    /// validation.
    pub fn field(&self) -> &'static str {
        match self {
            KinematicsError::NonPositive { field, .. } => field,
            KinematicsError::AngleOutOfRange { .. }
            | KinematicsError::SingularJacobian { .. } => "alpha0",
            KinematicsError::LengthOutOfRange { .. } => "l0",
        }
    }
}

/// Link lengths, pulley radii and the rest pose of the leg.
///
/// `l_eff` is derived on construction so that the virtual leg reproduces the
/// physical rest length `l0` at the rest knee angle `alpha0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LegGeometry<T> {
    /// Rest hip-to-foot length [m].
    pub l0: T,
    /// Physical segment lengths [m]; informational for the reduced model.
    pub l1: T,
    pub l2: T,
    pub l3: T,
    /// Spring tendon pulley radius at the knee [m].
    pub r_k: T,
    /// Damper tendon pulley radius at the knee [m].
    pub r_d: T,
    /// Knee output (belt) pulley radius [m]; informational.
    pub r_pk: T,
    /// Rest knee angle [rad].
    pub alpha0: T,
    /// Virtual segment length [m], `l0 / (2 sin(alpha0 / 2))`.
    pub l_eff: T,
}

impl<T: Real> LegGeometry<T> {
    pub fn new(
        l0: T,
        l1: T,
        l2: T,
        l3: T,
        r_k: T,
        r_d: T,
        r_pk: T,
        alpha0: T,
    ) -> Result<Self, KinematicsError<T>> {
        for (field, value) in [
            ("l0", l0),
            ("l1", l1),
            ("l2", l2),
            ("l3", l3),
            ("r_k", r_k),
            ("r_d", r_d),
            ("r_pk", r_pk),
        ] {
            if value <= T::zero() {
                return Err(KinematicsError::NonPositive { field, value });
            }
        }
        if alpha0 <= T::zero() || alpha0 >= T::PI() {
            return Err(KinematicsError::AngleOutOfRange { alpha: alpha0 });
        }
        let l_eff = l0 / (T::of(2.0) * (alpha0.half()).sin());
        Ok(Self {
            l0,
            l1,
            l2,
            l3,
            r_k,
            r_d,
            r_pk,
            alpha0,
            l_eff,
        })
    }

    /// Reference build: 310 mm leg, 150 mm segments, 30/20/32 mm pulleys,
    /// 100 degree rest knee angle.
    pub fn standard() -> Self {
        Self::new(
            T::of(0.310),
            T::of(0.150),
            T::of(0.150),
            T::of(0.150),
            T::of(0.030),
            T::of(0.020),
            T::of(0.032),
            T::of(100.0 * std::f64::consts::PI / 180.0),
        )
        .expect("standard geometry is valid")
    }

    /// Hip-to-foot distance at knee angle `alpha`: `2 l_eff sin(alpha/2)`.
    pub fn leg_length(&self, alpha: T) -> Result<T, KinematicsError<T>> {
        if alpha <= T::zero() || alpha >= T::PI() {
            return Err(KinematicsError::AngleOutOfRange { alpha });
        }
        Ok(T::of(2.0) * self.l_eff * alpha.half().sin())
    }

    /// d(length)/d(alpha) = `l_eff cos(alpha/2)`.
    pub fn leg_jacobian(&self, alpha: T) -> Result<T, KinematicsError<T>> {
        if alpha <= T::zero() || alpha >= T::PI() {
            return Err(KinematicsError::AngleOutOfRange { alpha });
        }
        Ok(self.l_eff * alpha.half().cos())
    }

    /// Inverse of [`Self::leg_length`] on (0, pi).
    pub fn alpha_of_length(&self, length: T) -> Result<T, KinematicsError<T>> {
        let max = T::of(2.0) * self.l_eff;
        if length <= T::zero() || length > max {
            return Err(KinematicsError::LengthOutOfRange { length, max });
        }
        let s = length / max;
        // s == 1 maps to alpha == pi which leg_length rejects; callers stay
        // clear of full extension in practice.
        Ok(T::of(2.0) * s.asin())
    }

    /// Infallible [`Self::alpha_of_length`] for simulation hot paths: the
    /// length ratio is clamped into the reachable domain, so out-of-range
    /// lengths map to the nearest pose instead of erroring. Callers keep the
    /// state in range via guards (bottom-out, liftoff).
    pub fn alpha_of_length_clamped(&self, length: T) -> T {
        let s = (length / (T::of(2.0) * self.l_eff))
            .max(T::of(1e-9))
            .min(T::one());
        T::of(2.0) * s.asin()
    }

    /// Infallible [`Self::leg_length`]; `alpha` clamped into (0, pi].
    pub fn leg_length_clamped(&self, alpha: T) -> T {
        let a = alpha.max(T::of(1e-9)).min(T::PI());
        T::of(2.0) * self.l_eff * a.half().sin()
    }

    /// Infallible [`Self::leg_jacobian`] with a singularity floor; always
    /// positive.
    pub fn leg_jacobian_clamped(&self, alpha: T) -> T {
        (self.l_eff * alpha.half().cos()).max(T::of(1e-3))
    }

    /// Maps a knee torque to the axial force along the virtual leg,
    /// `F = tau / (dl/dalpha)`. Positive torque pushes the hip away from
    /// the foot.
    pub fn knee_torque_to_axial_force(
        &self,
        alpha: T,
        tau: T,
    ) -> Result<T, KinematicsError<T>> {
        let jac = self.leg_jacobian(alpha)?;
        if jac.abs() < T::of(JACOBIAN_SINGULAR) {
            return Err(KinematicsError::SingularJacobian { alpha });
        }
        Ok(tau / jac)
    }
}

impl<T: Real> Default for LegGeometry<T> {
    fn default() -> Self {
        Self::standard()
    }
}

/// Linear excursion of a tendon wrapped on a knee pulley of radius `radius`
/// when the knee flexes from `alpha0` to `alpha`. Clamped at zero: the tendon
/// goes slack instead of pushing when the knee extends past rest.
pub fn tendon_excursion<T: Real>(radius: T, alpha0: T, alpha: T) -> T {
    (radius * (alpha0 - alpha)).max(T::zero())
}
