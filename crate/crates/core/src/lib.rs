//! Hybrid-dynamics simulator for a spring-loaded hopping leg with a
//! slack-tendon damper.
//!
//! The crate models a single pantograph leg on two rigs: a vertical slider
//! and a boom-guided planar runner. A knee spring carries the stance load; a
//! hydraulic damper engages only after its tendon takes up an adjustable
//! slack, which turns damping into a perturbation-triggered element. The
//! simulator resolves the flight/stance hybrid dynamics with event
//! localization, tracks an energy ledger, and feeds an analysis layer
//! (zero-lag filtering, energetics and robustness metrics) plus an
//! experiment harness for parameter sweeps and calibration.
//!
//! All numerics are generic over the scalar type through [`real::Real`];
//! the `*64` aliases below fix `f64` for ordinary use.

pub mod actuation;
pub mod analysis;
pub mod compliance;
pub mod config;
pub mod control;
pub mod dynamics;
pub mod kinematics;
pub mod real;
pub mod terrain;

pub use real::Real;

pub type BodyParams64 = config::BodyParams<f64>;
pub type IntegratorConfig64 = config::IntegratorConfig<f64>;
pub type ScenarioConfig64 = config::ScenarioConfig<f64>;
pub type LegGeometry64 = kinematics::LegGeometry<f64>;
pub type SpringParams64 = compliance::SpringParams<f64>;
pub type DamperParams64 = compliance::DamperParams<f64>;
pub type DamperState64 = compliance::DamperState<f64>;
pub type MotorParams64 = actuation::MotorParams<f64>;
pub type VerticalSchedule64 = control::VerticalSchedule<f64>;
pub type CpgParams64 = control::CpgParams<f64>;
pub type TerrainProfile64 = terrain::TerrainProfile<f64>;
pub type TrialRecord64 = dynamics::TrialRecord<f64>;
