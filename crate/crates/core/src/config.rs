//! Scenario configuration: one fully deterministic experiment description.
//!
//! A [`ScenarioConfig`] bundles everything a trial needs (body, leg, spring,
//! damper, motor, controller, terrain, integrator, run length, seed) and is
//! the unit of serialization for the harness. Validation reports the
//! offending field by path, e.g. `damper.slack`, and normalizes derived
//! quantities so that parse → validate → serialize round-trips exactly.

use serde::{Deserialize, Serialize};

use crate::actuation::MotorParams;
use crate::compliance::{DamperParams, SpringParams};
use crate::control::{CpgParams, VerticalSchedule};
use crate::kinematics::LegGeometry;
use crate::real::Real;
use crate::terrain::{TerrainKind, TerrainProfile};

/// Version tag written into every config file.
pub const CONFIG_SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("{field}: {reason}")]
pub struct ConfigError {
    /// Dotted path of the offending field, e.g. `damper.slack`.
    pub field: String,
    pub reason: String,
}

fn invalid(field: impl Into<String>, reason: impl Into<String>) -> ConfigError {
    ConfigError {
        field: field.into(),
        reason: reason.into(),
    }
}

/// Rigid-body constants of the reduced model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound(deserialize = "T: serde::Deserialize<'de> + Real"))]
pub struct BodyParams<T> {
    /// Hopping mass [kg].
    pub mass: T,
    /// Gravitational acceleration [m/s²].
    pub gravity: T,
    /// Ground friction coefficient; consulted by the forward rig only.
    #[serde(default = "default_friction")]
    pub friction: T,
}

fn default_friction<T: Real>() -> T {
    T::of(0.6)
}

impl<T: Real> BodyParams<T> {
    /// Vertical slider rig: carriage plus leg.
    pub fn vertical() -> Self {
        Self {
            mass: T::of(1.94),
            gravity: T::of(9.81),
            friction: default_friction(),
        }
    }

    /// Boom-mounted forward rig (boom carries part of the weight).
    pub fn forward() -> Self {
        Self {
            mass: T::of(0.94),
            gravity: T::of(9.81),
            friction: default_friction(),
        }
    }
}

/// Fixed-step integrator and event-localization settings.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntegratorConfig<T> {
    /// Integration step [s].
    pub dt: T,
    /// Bisection tolerance for guard events [s].
    pub event_tol: T,
    /// Trace sampling rate [Hz]; samples land on the integration grid.
    pub sample_rate: T,
    /// Bottom-out knee angle [rad]; reaching it aborts the trial.
    pub alpha_min: T,
}

impl<T: Real> IntegratorConfig<T> {
    pub fn standard() -> Self {
        Self {
            dt: T::of(1e-4),
            event_tol: T::of(1e-7),
            sample_rate: T::of(1000.0),
            alpha_min: T::of(35.0 * std::f64::consts::PI / 180.0),
        }
    }
}

/// One vertical knee-pulse torque assignment for a damper slack setting.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SlackTorque<T> {
    /// Damper tendon slack [m].
    pub slack: T,
    /// Knee pulse torque [N·m].
    pub torque: T,
}

/// Default slack → torque map: tighter slack bleeds more energy per hop, so
/// holding the hop height takes more torque at the low end of the band. One
/// entry per published slack setting, tuned to equalize apex height.
pub fn default_torque_map<T: Real>() -> Vec<SlackTorque<T>> {
    vec![
        SlackTorque {
            slack: T::zero(),
            torque: T::of(4.30),
        },
        SlackTorque {
            slack: T::of(0.003),
            torque: T::of(4.21),
        },
        SlackTorque {
            slack: T::of(0.006),
            torque: T::of(4.10),
        },
        SlackTorque {
            slack: T::of(0.010),
            torque: T::of(4.00),
        },
    ]
}

/// Piecewise-linear lookup in a slack → torque map, clamped at both ends.
pub fn torque_for_slack<T: Real>(map: &[SlackTorque<T>], fallback: T, slack: T) -> T {
    let Some(first) = map.first() else {
        return fallback;
    };
    if slack <= first.slack {
        return first.torque;
    }
    for w in map.windows(2) {
        if slack <= w[1].slack {
            let t = (slack - w[0].slack) / (w[1].slack - w[0].slack);
            return w[0].torque + t * (w[1].torque - w[0].torque);
        }
    }
    map.last().unwrap().torque
}

/// Controller variant; selects the rig the trial runs on.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
#[serde(bound(deserialize = "T: serde::Deserialize<'de> + Real"))]
pub enum Controller<T> {
    /// Open-loop vertical hopping. `torque_by_slack` overrides the schedule
    /// torque per damper slack setting; an explicit empty list falls back to
    /// `schedule.torque` unconditionally.
    Vertical {
        schedule: VerticalSchedule<T>,
        #[serde(default = "default_torque_map")]
        torque_by_slack: Vec<SlackTorque<T>>,
    },
    /// CPG-driven forward hopping on the boom.
    Cpg { params: CpgParams<T> },
}

impl<T: Real> Controller<T> {
    /// Vertical schedule with the slack-appropriate pulse torque substituted;
    /// `None` for the CPG variant.
    pub fn vertical_schedule_for(&self, slack: T) -> Option<VerticalSchedule<T>> {
        match self {
            Controller::Vertical {
                schedule,
                torque_by_slack,
            } => {
                let mut s = *schedule;
                s.torque = torque_for_slack(torque_by_slack, schedule.torque, slack);
                Some(s)
            }
            Controller::Cpg { .. } => None,
        }
    }

    pub fn cpg_params(&self) -> Option<&CpgParams<T>> {
        match self {
            Controller::Cpg { params } => Some(params),
            Controller::Vertical { .. } => None,
        }
    }
}

/// Trial length: wall-clock seconds (vertical rig) or boom revolutions
/// (forward rig).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RunLength<T> {
    Duration(T),
    Revolutions(u32),
}

/// One fully deterministic experiment description.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound(deserialize = "T: serde::Deserialize<'de> + Real"))]
pub struct ScenarioConfig<T> {
    pub schema_version: u32,
    pub body: BodyParams<T>,
    pub geometry: LegGeometry<T>,
    pub spring: SpringParams<T>,
    pub damper: DamperParams<T>,
    pub motor: MotorParams<T>,
    pub controller: Controller<T>,
    pub terrain: TerrainProfile<T>,
    pub integrator: IntegratorConfig<T>,
    pub run: RunLength<T>,
    /// Initial apex height above the rest pose [m]; `None` derives a small
    /// seeded drop so repetitions decorrelate.
    #[serde(default)]
    pub drop_height: Option<T>,
    /// Repetitions of this scenario with seeded phase variation.
    pub repetitions: u32,
    pub seed: u64,
}

impl<T: Real> ScenarioConfig<T> {
    /// Reference vertical-hopping trial: flat ground, 60 s.
    pub fn vertical_default() -> Self {
        Self {
            schema_version: CONFIG_SCHEMA_VERSION,
            body: BodyParams::vertical(),
            geometry: LegGeometry::standard(),
            spring: SpringParams::standard(),
            damper: DamperParams::standard(),
            motor: MotorParams::standard(),
            controller: Controller::Vertical {
                schedule: VerticalSchedule::standard(),
                torque_by_slack: default_torque_map(),
            },
            terrain: TerrainProfile::flat(),
            integrator: IntegratorConfig::standard(),
            run: RunLength::Duration(T::of(60.0)),
            drop_height: None,
            repetitions: 10,
            seed: 1,
        }
    }

    /// Reference forward-hopping trial: flat track, one boom revolution.
    pub fn forward_default() -> Self {
        Self {
            schema_version: CONFIG_SCHEMA_VERSION,
            body: BodyParams::forward(),
            geometry: LegGeometry::standard(),
            spring: SpringParams::standard(),
            damper: DamperParams::standard(),
            motor: MotorParams::standard(),
            controller: Controller::Cpg {
                // Launch half a cycle in so the first touchdown falls inside
                // the retraction window; from a standstill the swing-phase
                // start basin-hops into a backward-tripping gait.
                params: CpgParams {
                    phase_offset: T::of(0.4),
                    ..CpgParams::standard()
                },
            },
            terrain: TerrainProfile::flat(),
            integrator: IntegratorConfig::standard(),
            run: RunLength::Revolutions(6),
            drop_height: None,
            repetitions: 4,
            seed: 1,
        }
    }

    /// Checks every field, normalizes derived quantities (the geometry's
    /// virtual segment length), and returns the cleaned config.
    pub fn validated(mut self) -> Result<Self, ConfigError> {
        if self.schema_version != CONFIG_SCHEMA_VERSION {
            return Err(invalid(
                "schema_version",
                format!(
                    "unsupported version {}, expected {CONFIG_SCHEMA_VERSION}",
                    self.schema_version
                ),
            ));
        }

        let positive = |field: &str, v: T| -> Result<(), ConfigError> {
            if v > T::zero() {
                Ok(())
            } else {
                Err(invalid(field, format!("must be positive, got {v}")))
            }
        };
        let non_negative = |field: &str, v: T| -> Result<(), ConfigError> {
            if v >= T::zero() {
                Ok(())
            } else {
                Err(invalid(field, format!("must be non-negative, got {v}")))
            }
        };
        let unit_fraction = |field: &str, v: T| -> Result<(), ConfigError> {
            if v >= T::zero() && v < T::one() {
                Ok(())
            } else {
                Err(invalid(field, format!("must lie in [0, 1), got {v}")))
            }
        };

        positive("body.mass", self.body.mass)?;
        positive("body.gravity", self.body.gravity)?;
        positive("body.friction", self.body.friction)?;

        let g = &self.geometry;
        self.geometry = LegGeometry::new(
            g.l0, g.l1, g.l2, g.l3, g.r_k, g.r_d, g.r_pk, g.alpha0,
        )
        .map_err(|e| invalid(format!("geometry.{}", e.field()), e.to_string()))?;

        positive("spring.stiffness", self.spring.stiffness)?;

        non_negative("damper.c", self.damper.c)?;
        positive("damper.exponent", self.damper.exponent)?;
        non_negative("damper.k_rec", self.damper.k_rec)?;
        non_negative("damper.slack", self.damper.slack)?;

        if let Some(h) = self.drop_height {
            positive("drop_height", h)?;
        }

        positive("motor.kt", self.motor.kt)?;
        positive("motor.winding_resistance", self.motor.winding_resistance)?;
        positive("motor.tau_max_motor", self.motor.tau_max_motor)?;
        positive("motor.gear_hip", self.motor.gear_hip)?;
        positive("motor.gear_knee", self.motor.gear_knee)?;

        match &self.controller {
            Controller::Vertical {
                schedule,
                torque_by_slack,
            } => {
                positive("controller.schedule.frequency", schedule.frequency)?;
                non_negative("controller.schedule.torque", schedule.torque)?;
                if schedule.duty <= T::zero() || schedule.duty > T::one() {
                    return Err(invalid(
                        "controller.schedule.duty",
                        format!("must lie in (0, 1], got {}", schedule.duty),
                    ));
                }
                unit_fraction("controller.schedule.phase0", schedule.phase0)?;
                for pair in torque_by_slack {
                    non_negative("controller.torque_by_slack.slack", pair.slack)?;
                    non_negative("controller.torque_by_slack.torque", pair.torque)?;
                }
                if torque_by_slack.windows(2).any(|w| w[1].slack <= w[0].slack) {
                    return Err(invalid(
                        "controller.torque_by_slack",
                        "slack values must be strictly ascending",
                    ));
                }
                match self.terrain.kind {
                    TerrainKind::Flat | TerrainKind::StepDown { .. } => {}
                    _ => {
                        return Err(invalid(
                            "controller",
                            "vertical protocol runs on flat or step-down terrain",
                        ))
                    }
                }
                if matches!(self.run, RunLength::Revolutions(_)) {
                    return Err(invalid(
                        "run",
                        "vertical protocol needs a duration, not revolutions",
                    ));
                }
            }
            Controller::Cpg { params } => {
                non_negative("controller.params.hip_amplitude", params.hip_amplitude)?;
                positive("controller.params.frequency", params.frequency)?;
                if params.virtual_duty <= T::zero() || params.virtual_duty >= T::one() {
                    return Err(invalid(
                        "controller.params.virtual_duty",
                        format!("must lie in (0, 1), got {}", params.virtual_duty),
                    ));
                }
                non_negative("controller.params.knee_torque", params.knee_torque)?;
                unit_fraction(
                    "controller.params.knee_phase_shift",
                    params.knee_phase_shift,
                )?;
                unit_fraction("controller.params.knee_duty", params.knee_duty)?;
                positive("controller.params.kp", params.kp)?;
                non_negative("controller.params.kd", params.kd)?;
                positive("controller.params.swing_inertia", params.swing_inertia)?;
                unit_fraction("controller.params.phase_offset", params.phase_offset)?;
                if matches!(self.terrain.kind, TerrainKind::StepDown { .. }) {
                    return Err(invalid(
                        "controller",
                        "forward protocol does not run on step-down terrain",
                    ));
                }
            }
        }

        positive("terrain.track_length", self.terrain.track_length)?;
        match self.terrain.kind {
            TerrainKind::Flat => {}
            TerrainKind::StepDown { block_height, .. } => {
                non_negative("terrain.block_height", block_height)?;
            }
            TerrainKind::Sinusoid {
                amplitude,
                wavelength,
                connector_length,
            } => {
                non_negative("terrain.amplitude", amplitude)?;
                positive("terrain.wavelength", wavelength)?;
                non_negative("terrain.connector_length", connector_length)?;
            }
            TerrainKind::RampStep {
                ramp_length,
                ramp_height,
                ramp_start,
            } => {
                positive("terrain.ramp_length", ramp_length)?;
                non_negative("terrain.ramp_height", ramp_height)?;
                non_negative("terrain.ramp_start", ramp_start)?;
            }
        }

        positive("integrator.dt", self.integrator.dt)?;
        if self.integrator.event_tol <= T::zero() || self.integrator.event_tol >= self.integrator.dt
        {
            return Err(invalid(
                "integrator.event_tol",
                format!(
                    "must lie in (0, dt), got {} at dt {}",
                    self.integrator.event_tol, self.integrator.dt
                ),
            ));
        }
        positive("integrator.sample_rate", self.integrator.sample_rate)?;
        if self.integrator.alpha_min <= T::zero()
            || self.integrator.alpha_min >= self.geometry.alpha0
        {
            return Err(invalid(
                "integrator.alpha_min",
                "must lie strictly between 0 and the rest knee angle",
            ));
        }

        match self.run {
            RunLength::Duration(d) => positive("run.duration", d)?,
            RunLength::Revolutions(r) => {
                if r == 0 {
                    return Err(invalid("run.revolutions", "must be at least 1"));
                }
            }
        }
        if self.repetitions == 0 {
            return Err(invalid("repetitions", "must be at least 1"));
        }

        Ok(self)
    }
}
