//! Ground profiles for the vertical rig and the boom track.
//!
//! Forward profiles are periodic in the travelled distance with period
//! `track_length` (one boom revolution). The vertical step-down profile is
//! special: its height change is scheduled in time (a block removed during a
//! flight phase), not in space, so queries carry a `removed` flag maintained
//! by the simulation.

use serde::{Deserialize, Serialize};

use crate::real::Real;

/// Boom arm radius [m] of the reference circular track.
pub const BOOM_RADIUS: f64 = 1.613;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TerrainKind<T> {
    Flat,
    /// Elevated block under the vertical rig, removed mid-flight after the
    /// given number of completed steps.
    StepDown { block_height: T, removal_step: u32 },
    /// Sinusoidal block region followed by a flat connector.
    Sinusoid {
        amplitude: T,
        wavelength: T,
        connector_length: T,
    },
    /// Linear ramp with an instantaneous drop at its end.
    RampStep {
        ramp_length: T,
        ramp_height: T,
        ramp_start: T,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TerrainProfile<T> {
    #[serde(flatten)]
    pub kind: TerrainKind<T>,
    /// Period of the profile in travelled distance [m].
    pub track_length: T,
}

impl<T: Real> TerrainProfile<T> {
    pub fn flat() -> Self {
        Self {
            kind: TerrainKind::Flat,
            track_length: T::of(2.0 * std::f64::consts::PI * BOOM_RADIUS),
        }
    }

    pub fn step_down(block_height: T, removal_step: u32) -> Self {
        Self {
            kind: TerrainKind::StepDown {
                block_height,
                removal_step,
            },
            track_length: T::of(2.0 * std::f64::consts::PI * BOOM_RADIUS),
        }
    }

    /// Reference rough track: 27 sinusoid blocks of 360 mm on one boom
    /// revolution, remainder flat.
    pub fn sinusoid(amplitude: T) -> Self {
        let track = T::of(2.0 * std::f64::consts::PI * BOOM_RADIUS);
        let wavelength = T::of(0.36);
        let blocks = T::of(27.0);
        Self {
            kind: TerrainKind::Sinusoid {
                amplitude,
                wavelength,
                connector_length: track - blocks * wavelength,
            },
            track_length: track,
        }
    }

    /// Reference ramp track: 3 m rise starting 4 m into the revolution.
    pub fn ramp_step(ramp_height: T) -> Self {
        Self {
            kind: TerrainKind::RampStep {
                ramp_length: T::of(3.0),
                ramp_height,
                ramp_start: T::of(4.0),
            },
            track_length: T::of(2.0 * std::f64::consts::PI * BOOM_RADIUS),
        }
    }

    fn wrap(&self, x: T) -> T {
        let track = self.track_length;
        x - (x / track).floor() * track
    }

    /// Ground height below travelled position `x`. `removed` reports whether
    /// the scheduled step-down removal has already happened.
    pub fn height_at(&self, x: T, removed: bool) -> T {
        match self.kind {
            TerrainKind::Flat => T::zero(),
            TerrainKind::StepDown { block_height, .. } => {
                if removed {
                    T::zero()
                } else {
                    block_height
                }
            }
            TerrainKind::Sinusoid {
                amplitude,
                wavelength,
                connector_length,
            } => {
                let xm = self.wrap(x);
                let region = self.track_length - connector_length;
                if xm < region {
                    amplitude * (T::of(2.0) * T::PI() * xm / wavelength).sin()
                } else {
                    T::zero()
                }
            }
            TerrainKind::RampStep {
                ramp_length,
                ramp_height,
                ramp_start,
            } => {
                let xm = self.wrap(x);
                if xm >= ramp_start && xm < ramp_start + ramp_length {
                    ramp_height * (xm - ramp_start) / ramp_length
                } else {
                    T::zero()
                }
            }
        }
    }

    /// Ground slope dh/dx below `x`, for contact-normal computations.
    pub fn slope_at(&self, x: T, _removed: bool) -> T {
        match self.kind {
            TerrainKind::Flat | TerrainKind::StepDown { .. } => T::zero(),
            TerrainKind::Sinusoid {
                amplitude,
                wavelength,
                connector_length,
            } => {
                let xm = self.wrap(x);
                let region = self.track_length - connector_length;
                if xm < region {
                    let k = T::of(2.0) * T::PI() / wavelength;
                    amplitude * k * (k * xm).cos()
                } else {
                    T::zero()
                }
            }
            TerrainKind::RampStep {
                ramp_length,
                ramp_height,
                ramp_start,
            } => {
                let xm = self.wrap(x);
                if xm >= ramp_start && xm < ramp_start + ramp_length {
                    ramp_height / ramp_length
                } else {
                    T::zero()
                }
            }
        }
    }

    /// Positions within one period where the profile changes non-smoothly:
    /// the true height jump at the ramp end, the slope kinks at the sinusoid
    /// region boundaries. The step-down change is temporal and reported
    /// empty here.
    pub fn discontinuities(&self) -> Vec<T> {
        match self.kind {
            TerrainKind::Flat | TerrainKind::StepDown { .. } => Vec::new(),
            TerrainKind::Sinusoid {
                connector_length, ..
            } => vec![T::zero(), self.track_length - connector_length],
            TerrainKind::RampStep {
                ramp_length,
                ramp_start,
                ..
            } => vec![ramp_start + ramp_length],
        }
    }

    /// Scheduled removal step for step-down profiles.
    pub fn removal_step(&self) -> Option<u32> {
        match self.kind {
            TerrainKind::StepDown { removal_step, .. } => Some(removal_step),
            _ => None,
        }
    }
}
