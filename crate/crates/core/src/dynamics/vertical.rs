//! Vertical slider rig: the body is a point mass on a frictionless vertical
//! guide, hopping in place over flat ground or a removable block.
//!
//! Flight convention: the unloaded leg rests at its standing length and the
//! knee motor, if the pulse overlaps flight, stalls against the extension
//! hardstop (Joule heat, no mechanical work on the mass). Stance pins the
//! foot; leg length is the hip height above the ground the foot landed on.

use super::integrate::{bisect_event, rk4_step};
use super::record::{Outcome, StepSummary, TraceSample, TrialRecord};
use super::{dissipation_rate, leg_forces, seed_fraction, OpenStep};
use crate::actuation::{available_torque, electrical_power, joint_torque, Joint, MotorParams};
use crate::compliance::{spring_energy, DamperParams, SpringParams};
use crate::config::{ConfigError, RunLength, ScenarioConfig};
use crate::control::VerticalSchedule;
use crate::kinematics::{tendon_excursion, LegGeometry};
use crate::real::Real;
use crate::terrain::TerrainKind;

const Y: usize = 0;
const VY: usize = 1;
const E_ELEC: usize = 2;
const W_POS: usize = 3;
const W_NEG: usize = 4;
const DISS: usize = 5;
const ABS: usize = 6;
const N: usize = 7;

/// Knee angle treated as full extension; past it the linkage locks out and
/// the foot unloads.
const ALPHA_LOCKOUT_DEG: f64 = 176.0;

/// Base drop height plus seeded jitter span [m]. Repetitions of one scenario
/// vary only through this initial condition, which shifts the touchdown
/// phase relative to the knee clock by a sizeable fraction of a hop cycle.
const DROP_BASE: f64 = 0.010;
const DROP_SPAN: f64 = 0.010;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Mode {
    Flight,
    Stance,
}

/// Guard identifiers, listed in tie-break priority order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum Guard {
    /// Knee closed to the bottom-out angle (stance, downward crossing).
    BottomOut,
    /// Leg back at standing length under zero knee torque (stance, upward).
    Liftoff,
    /// Knee opened to full extension while pushing (stance, upward).
    Lockout,
    /// Foot reaches the ground (flight, downward).
    Touchdown,
    /// Damper tendon excursion crosses the slack gap (stance, upward).
    /// No state change, but the force law kinks here.
    Engage,
    /// Top of flight (flight, downward on vertical speed).
    Apex,
}

struct Rig<'a, T: Real> {
    geom: &'a LegGeometry<T>,
    spring: &'a SpringParams<T>,
    damper: &'a DamperParams<T>,
    motor: &'a MotorParams<T>,
    mass: T,
    gravity: T,
    alpha_min: T,
    alpha_lock: T,
}

impl<T: Real> Rig<'_, T> {
    fn deriv(&self, mode: Mode, ground: T, tau: T, y: &[T; N]) -> [T; N] {
        match mode {
            Mode::Flight => {
                let p_elec = electrical_power(self.motor, tau, T::zero(), Joint::Knee);
                [
                    y[VY],
                    -self.gravity,
                    p_elec,
                    T::zero(),
                    T::zero(),
                    T::zero(),
                    T::zero(),
                ]
            }
            Mode::Stance => {
                let l = y[Y] - ground;
                let alpha = self.geom.alpha_of_length_clamped(l);
                let jac = self.geom.leg_jacobian_clamped(alpha);
                let alpha_dot = y[VY] / jac;
                // Fast extension outruns the knee drive's voltage headroom.
                let tau = available_torque(self.motor, tau, Joint::Knee, alpha_dot);
                let lf = leg_forces(self.geom, self.spring, self.damper, alpha, alpha_dot, tau);
                let p_mech = tau * alpha_dot;
                [
                    y[VY],
                    lf.f_axial / self.mass - self.gravity,
                    electrical_power(self.motor, tau, alpha_dot, Joint::Knee),
                    p_mech.max(T::zero()),
                    p_mech.min(T::zero()),
                    dissipation_rate(self.damper, lf.piston_vel),
                    lf.f_damper * lf.piston_vel,
                ]
            }
        }
    }

    fn guard_value(&self, which: Guard, ground: T, y: &[T; N]) -> T {
        let l = y[Y] - ground;
        match which {
            Guard::Touchdown => l - self.geom.l0,
            Guard::Apex => y[VY],
            Guard::Liftoff => l - self.geom.l0,
            Guard::BottomOut => self.geom.alpha_of_length_clamped(l) - self.alpha_min,
            Guard::Lockout => self.geom.alpha_of_length_clamped(l) - self.alpha_lock,
            Guard::Engage => {
                let alpha = self.geom.alpha_of_length_clamped(l);
                tendon_excursion(self.geom.r_d, self.geom.alpha0, alpha) - self.damper.slack
            }
        }
    }

    /// Crossing direction: `true` for downward (armed positive).
    fn downward(which: Guard) -> bool {
        matches!(which, Guard::Touchdown | Guard::Apex | Guard::BottomOut)
    }

    fn active_guards(mode: Mode, powered: bool) -> &'static [Guard] {
        match (mode, powered) {
            (Mode::Flight, _) => &[Guard::Touchdown, Guard::Apex],
            (Mode::Stance, true) => &[Guard::BottomOut, Guard::Lockout, Guard::Engage],
            (Mode::Stance, false) => {
                &[Guard::BottomOut, Guard::Liftoff, Guard::Lockout, Guard::Engage]
            }
        }
    }
}

/// Simulates one vertical-rig trial. The config must describe the vertical
/// controller on flat or step-down terrain; trial length is a duration.
pub fn simulate_vertical<T: Real>(cfg: &ScenarioConfig<T>) -> Result<TrialRecord<T>, ConfigError> {
    let schedule: VerticalSchedule<T> = cfg
        .controller
        .vertical_schedule_for(cfg.damper.slack)
        .ok_or_else(|| ConfigError {
            field: "controller".into(),
            reason: "vertical rig requires the vertical controller".into(),
        })?;
    let duration = match cfg.run {
        RunLength::Duration(d) => d,
        RunLength::Revolutions(_) => {
            return Err(ConfigError {
                field: "run".into(),
                reason: "vertical rig runs for a duration, not revolutions".into(),
            })
        }
    };
    let (block_height, removal_step) = match cfg.terrain.kind {
        TerrainKind::Flat => (T::zero(), None),
        TerrainKind::StepDown {
            block_height,
            removal_step,
        } => (block_height, Some(removal_step)),
        _ => {
            return Err(ConfigError {
                field: "terrain".into(),
                reason: "vertical rig supports flat and step_down terrain".into(),
            })
        }
    };

    let rig = Rig {
        geom: &cfg.geometry,
        spring: &cfg.spring,
        damper: &cfg.damper,
        motor: &cfg.motor,
        mass: cfg.body.mass,
        gravity: cfg.body.gravity,
        alpha_min: cfg.integrator.alpha_min,
        alpha_lock: T::of(ALPHA_LOCKOUT_DEG * std::f64::consts::PI / 180.0),
    };
    let dt = cfg.integrator.dt;
    let tol = cfg.integrator.event_tol;
    let stride = ((T::one() / (cfg.integrator.sample_rate * dt)).f64().round() as u64).max(1);
    let n_grid = (duration / dt).f64().ceil() as u64;

    let ground = |removed: bool| {
        if removal_step.is_some() && !removed {
            block_height
        } else {
            T::zero()
        }
    };

    // Trial state.
    let drop = cfg
        .drop_height
        .unwrap_or_else(|| T::of(DROP_BASE + DROP_SPAN * seed_fraction(cfg.seed)));
    let mut state = [T::zero(); N];
    state[Y] = ground(false) + rig.geom.l0 + drop;
    let mut mode = Mode::Flight;
    let mut stance_ground = ground(false);
    let mut removed = false;
    let mut steps_done: u32 = 0;
    let mut open: Option<OpenStep<T>> = None;

    let mut record = TrialRecord::new();
    record.samples.reserve((n_grid / stride + 2) as usize);
    let e0 = mech_energy(&rig, mode, stance_ground, &state);
    record.peak_energy = e0;

    let probe_trace = |mode: Mode, stance_ground: T, t: T, y: &[T; N]| -> TraceSample<T> {
        let tau = joint_torque(rig.motor, schedule.knee_torque_at(t), Joint::Knee);
        match mode {
            Mode::Flight => TraceSample {
                t,
                x: T::zero(),
                y: y[Y],
                vy: y[VY],
                alpha: rig.geom.alpha0,
                grf: T::zero(),
                f_spring: T::zero(),
                f_damper: T::zero(),
                piston_pos: T::zero(),
                tau_hip: T::zero(),
                tau_knee: tau,
                p_elec: electrical_power(rig.motor, tau, T::zero(), Joint::Knee),
            },
            Mode::Stance => {
                let l = y[Y] - stance_ground;
                let alpha = rig.geom.alpha_of_length_clamped(l);
                let jac = rig.geom.leg_jacobian_clamped(alpha);
                let alpha_dot = y[VY] / jac;
                let tau = available_torque(rig.motor, tau, Joint::Knee, alpha_dot);
                let lf = leg_forces(rig.geom, rig.spring, rig.damper, alpha, alpha_dot, tau);
                TraceSample {
                    t,
                    x: T::zero(),
                    y: y[Y],
                    vy: y[VY],
                    alpha,
                    grf: lf.f_axial,
                    f_spring: lf.f_spring,
                    f_damper: lf.f_damper,
                    piston_pos: lf.piston_pos,
                    tau_hip: T::zero(),
                    tau_knee: tau,
                    p_elec: electrical_power(rig.motor, tau, alpha_dot, Joint::Knee),
                }
            }
        }
    };

    record
        .samples
        .push(probe_trace(mode, stance_ground, T::zero(), &state));

    let mut t_final = T::zero();
    'grid: for k in 0..n_grid {
        let t0 = dt * T::of(k as f64);
        let t1 = (dt * T::of((k + 1) as f64)).min(duration);
        let mut ta = t0;

        while ta < t1 {
            let edge = schedule.next_discontinuity(ta);
            let tb = edge.min(t1);
            let tau = joint_torque(rig.motor, schedule.knee_torque_at(ta), Joint::Knee);
            let powered = tau > T::zero();

            // Entering a powered-off segment with the leg at or past standing
            // length means the foot is unloaded: lift off immediately.
            if mode == Mode::Stance && !powered {
                let l = state[Y] - stance_ground;
                if l > rig.geom.l0 || (l == rig.geom.l0 && state[VY] > T::zero()) {
                    do_liftoff(ta, &state, &mut mode, &mut steps_done, &mut open);
                }
            }

            // Integrate [ta, tb] under one smooth law, stopping at guards.
            loop {
                let mut f = |_t: T, y: &[T; N]| rig.deriv(mode, stance_ground, tau, y);
                let cand = rk4_step(&mut f, ta, &state, tb - ta);

                let mut hit: Option<(T, Guard)> = None;
                for &which in Rig::<T>::active_guards(mode, powered) {
                    let g_ground = match mode {
                        Mode::Flight => ground(removed),
                        Mode::Stance => stance_ground,
                    };
                    let g_a = rig.guard_value(which, g_ground, &state);
                    let g_b = rig.guard_value(which, g_ground, &cand);
                    let crossed = if Rig::<T>::downward(which) {
                        g_a > T::zero() && g_b <= T::zero()
                    } else {
                        g_a < T::zero() && g_b >= T::zero()
                    };
                    if !crossed {
                        continue;
                    }
                    let mut probe = |t: T| {
                        let mut f = |_t: T, y: &[T; N]| rig.deriv(mode, stance_ground, tau, y);
                        let s = rk4_step(&mut f, ta, &state, t - ta);
                        rig.guard_value(which, g_ground, &s)
                    };
                    match bisect_event(&mut probe, ta, tb, g_a, tol) {
                        Ok(te) => {
                            let better = match hit {
                                None => true,
                                Some((t_best, g_best)) => {
                                    te < t_best || (te == t_best && which < g_best)
                                }
                            };
                            if better {
                                hit = Some((te, which));
                            }
                        }
                        Err(_) => {
                            record.outcome = Outcome::NonConvergent { t: ta };
                            t_final = ta;
                            break 'grid;
                        }
                    }
                }

                match hit {
                    None => {
                        state = cand;
                        ta = tb;
                        commit_onsets(&rig, mode, stance_ground, ta, &state, &mut open);
                        break;
                    }
                    Some((te, which)) => {
                        state = rk4_step(&mut f, ta, &state, te - ta);
                        ta = te;
                        commit_onsets(&rig, mode, stance_ground, ta, &state, &mut open);
                        match which {
                            Guard::Touchdown => {
                                mode = Mode::Stance;
                                stance_ground = ground(removed);
                                open = Some(OpenStep::new(steps_done + 1, te, T::zero(), state[ABS]));
                            }
                            Guard::Liftoff | Guard::Lockout => {
                                do_liftoff(te, &state, &mut mode, &mut steps_done, &mut open);
                            }
                            Guard::Apex => {
                                if let Some(rs) = removal_step {
                                    if !removed && steps_done >= rs {
                                        removed = true;
                                        record.perturbation_t = Some(te);
                                    }
                                }
                                if let Some(step) = open.take() {
                                    if let Some(liftoff_t) = step.liftoff_t {
                                        record.steps.push(StepSummary {
                                            step: step.index,
                                            touchdown_t: step.touchdown_t,
                                            liftoff_t,
                                            apex_t: te,
                                            apex: state[Y] - rig.geom.l0 - ground(removed),
                                            step_length: T::zero(),
                                            e_d: step.e_d,
                                            delay_ms: step.delay_ms(),
                                            slip: false,
                                            stop: false,
                                        });
                                    }
                                }
                            }
                            Guard::Engage => {} // force-law kink only
                            Guard::BottomOut => {
                                record.outcome = Outcome::BottomedOut { t: te };
                                t_final = te;
                                break 'grid;
                            }
                        }
                        if te >= tb {
                            break;
                        }
                    }
                }
            }
        }

        t_final = t1;
        if (k + 1) % stride == 0 {
            record
                .samples
                .push(probe_trace(mode, stance_ground, t1, &state));
            let e = mech_energy(&rig, mode, stance_ground, &state);
            record.peak_energy = record.peak_energy.max(e);
            let defect = (e - e0 - state[W_POS] - state[W_NEG] + state[ABS]).abs();
            record.max_ledger_defect = record.max_ledger_defect.max(defect);
        }
    }

    record.outcome = match record.outcome {
        Outcome::Completed => Outcome::Completed,
        other => other,
    };
    record.e_elec = state[E_ELEC];
    record.w_pos = state[W_POS];
    record.w_neg = state[W_NEG];
    record.dissipated = state[DISS];
    record.absorbed = state[ABS];
    record.duration = t_final;
    record.distance = T::zero();
    Ok(record)
}

fn do_liftoff<T: Real>(
    t: T,
    state: &[T; N],
    mode: &mut Mode,
    steps_done: &mut u32,
    open: &mut Option<OpenStep<T>>,
) {
    if let Some(step) = open.as_mut() {
        if step.liftoff_t.is_none() {
            step.liftoff_t = Some(t);
            step.e_d = state[ABS] - step.absorbed_at_touchdown;
        }
    }
    *steps_done += 1;
    *mode = Mode::Flight;
}

/// Feeds the per-step force-onset trackers at a committed state.
fn commit_onsets<T: Real>(
    rig: &Rig<'_, T>,
    mode: Mode,
    stance_ground: T,
    t: T,
    state: &[T; N],
    open: &mut Option<OpenStep<T>>,
) {
    if mode != Mode::Stance {
        return;
    }
    let Some(step) = open.as_mut() else {
        return;
    };
    if step.liftoff_t.is_some() {
        return;
    }
    let l = state[Y] - stance_ground;
    let alpha = rig.geom.alpha_of_length_clamped(l);
    let jac = rig.geom.leg_jacobian_clamped(alpha);
    let alpha_dot = state[VY] / jac;
    let lf = leg_forces(rig.geom, rig.spring, rig.damper, alpha, alpha_dot, T::zero());
    step.spring.update(t, lf.f_spring);
    step.damper.update(t, lf.f_damper);
}

fn mech_energy<T: Real>(rig: &Rig<'_, T>, mode: Mode, stance_ground: T, state: &[T; N]) -> T {
    let kin = rig.mass.half() * state[VY] * state[VY];
    let pot = rig.mass * rig.gravity * state[Y];
    let elastic = match mode {
        Mode::Flight => T::zero(),
        Mode::Stance => {
            let l = state[Y] - stance_ground;
            let alpha = rig.geom.alpha_of_length_clamped(l);
            let x_s = tendon_excursion(rig.geom.r_k, rig.geom.alpha0, alpha);
            spring_energy(rig.spring, x_s)
        }
    };
    kin + pot + elastic
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::{default_torque_map, Controller};
    use crate::terrain::TerrainProfile;
    use crate::ScenarioConfig64;

    fn passive_config(run_s: f64) -> ScenarioConfig64 {
        let mut cfg = ScenarioConfig64::vertical_default();
        cfg.run = RunLength::Duration(run_s);
        cfg.damper.slack = 0.5; // never engages
        match &mut cfg.controller {
            Controller::Vertical {
                schedule,
                torque_by_slack,
            } => {
                schedule.torque = 0.0;
                torque_by_slack.clear();
            }
            Controller::Cpg { .. } => unreachable!(),
        }
        cfg.validated().unwrap()
    }

    fn actuated_config(run_s: f64, slack: f64) -> ScenarioConfig64 {
        let mut cfg = ScenarioConfig64::vertical_default();
        cfg.run = RunLength::Duration(run_s);
        cfg.damper.slack = slack;
        cfg.validated().unwrap()
    }

    #[test]
    fn passive_bouncing_conserves_energy() {
        let rec = simulate_vertical(&passive_config(10.0)).unwrap();
        assert!(matches!(rec.outcome, Outcome::Completed));
        assert!(rec.steps.len() > 10, "expected many hops, got {}", rec.steps.len());
        assert!(
            rec.max_ledger_defect < 1e-4 * rec.peak_energy,
            "defect {} vs peak {}",
            rec.max_ledger_defect,
            rec.peak_energy
        );
        // Without damper or motor, apex height must not drift.
        let first = rec.steps.first().unwrap().apex;
        let last = rec.steps.last().unwrap().apex;
        assert!(
            (first - last).abs() < 1e-4,
            "apex drifted from {first} to {last}"
        );
        assert_eq!(rec.e_elec, 0.0);
        assert_eq!(rec.absorbed, 0.0);
    }

    #[test]
    fn rebound_apex_matches_drop_height() {
        let cfg = passive_config(2.0);
        let drop = DROP_BASE + DROP_SPAN * seed_fraction(cfg.seed);
        let rec = simulate_vertical(&cfg).unwrap();
        let first = rec.steps.first().unwrap();
        assert!(
            (first.apex - drop).abs() < 1e-4,
            "rebound {} vs drop {}",
            first.apex,
            drop
        );
        // Flight portions are ballistic: apex time consistent with the
        // liftoff speed of a conservative bounce.
        assert!(first.delay_ms.is_none());
        assert_eq!(first.e_d, 0.0);
    }

    #[test]
    fn trials_are_bitwise_deterministic() {
        let cfg = actuated_config(5.0, 0.006);
        let a = simulate_vertical(&cfg).unwrap();
        let b = simulate_vertical(&cfg).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn actuated_hopping_closes_the_energy_ledger() {
        let rec = simulate_vertical(&actuated_config(20.0, 0.006)).unwrap();
        assert!(matches!(rec.outcome, Outcome::Completed));
        assert!(rec.steps.len() > 20, "expected a sustained gait, got {} steps", rec.steps.len());
        assert!(rec.ledger_defect_fraction() < 5e-3);
        assert!(rec.max_ledger_defect < 2e-3, "defect {}", rec.max_ledger_defect);
        assert!(rec.e_elec > 0.0);
        assert!(rec.w_pos > 0.0);
        assert!(rec.w_neg <= 0.0);
    }

    #[test]
    fn zero_slack_damper_fires_with_the_spring() {
        let rec = simulate_vertical(&actuated_config(10.0, 0.0)).unwrap();
        assert!(rec.steps.len() > 10);
        for step in &rec.steps {
            let delay = step.delay_ms.expect("damper must engage every step");
            assert!(delay < 1.0, "step {} delay {delay} ms", step.step);
            assert!(step.e_d > 0.0);
        }
    }

    #[test]
    fn wider_slack_absorbs_less() {
        let tight = simulate_vertical(&actuated_config(15.0, 0.0)).unwrap();
        let wide = simulate_vertical(&actuated_config(15.0, 0.010)).unwrap();
        assert!(wide.absorbed < tight.absorbed);
    }

    #[test]
    fn block_removal_is_recorded_and_survived() {
        let block = 0.02;
        let mut cfg = actuated_config(20.0, 0.006);
        cfg.terrain = TerrainProfile::step_down(block, 5);
        let cfg = cfg.validated().unwrap();
        let rec = simulate_vertical(&cfg).unwrap();
        let t_pert = rec.perturbation_t.expect("removal must happen");
        assert!(matches!(rec.outcome, Outcome::Completed));
        let after = rec.steps.iter().filter(|s| s.apex_t > t_pert).count();
        assert!(after > 3, "gait must continue after removal, got {after} steps");
        // The step whose flight saw the removal is measured against the
        // lowered ground, so its clearance must exceed the block height.
        let hit = rec
            .steps
            .iter()
            .find(|s| s.apex_t >= t_pert)
            .expect("a step spans the removal");
        assert!(
            hit.apex > block,
            "removal-step apex {} must clear the removed block {block}",
            hit.apex
        );
    }

    #[test]
    fn soft_spring_bottoms_out() {
        let mut cfg = passive_config(5.0);
        cfg.spring.stiffness = 30.0;
        let cfg = cfg.validated().unwrap();
        let rec = simulate_vertical(&cfg).unwrap();
        match rec.outcome {
            Outcome::BottomedOut { t } => assert!(t < 5.0),
            other => panic!("expected bottom-out, got {other:?}"),
        }
        assert!(rec.duration < 5.0);
    }

    #[test]
    fn step_refinement_holds_the_apex() {
        // Zero slack gives the most contractive hopping cycle; looser slacks
        // wander enough that trajectory-level dt comparisons measure the
        // gait's sensitivity rather than integrator error.
        let run = |dt: f64| {
            let mut cfg = actuated_config(3.0, 0.0);
            cfg.integrator.dt = dt;
            let rec = simulate_vertical(&cfg.validated().unwrap()).unwrap();
            rec.steps.last().unwrap().apex
        };
        let coarse = run(1e-4);
        let fine = run(5e-5);
        assert!(
            (coarse - fine).abs() < 1e-4,
            "apex moved from {coarse} to {fine} under refinement"
        );
    }

    #[test]
    #[ignore = "scratch dashboard, run with --ignored"]
    fn diag_vertical() {
        let settle_t = 5.0;
        let body = ScenarioConfig64::vertical_default().body;
        let t_clock = 1.0 / VerticalSchedule::<f64>::standard().frequency;
        println!("--- standby ---");
        let mut standby_ed = [0.0f64; 4];
        for (i, slack) in [0.010f64, 0.006, 0.003, 0.0].into_iter().enumerate() {
            let rec = simulate_vertical(&actuated_config(20.0, slack)).unwrap();
            let steady: Vec<_> = rec.steps.iter().filter(|s| s.apex_t >= settle_t).collect();
            let n = steady.len() as f64;
            let ed = steady.iter().map(|s| s.e_d).sum::<f64>() / n;
            let apex = steady.iter().map(|s| s.apex).sum::<f64>() / n;
            let apex_std = (steady.iter().map(|s| (s.apex - apex).powi(2)).sum::<f64>()
                / (n - 1.0))
                .sqrt();
            let misses = steady.iter().filter(|s| s.delay_ms.is_none()).count();
            let delays: Vec<f64> = steady.iter().filter_map(|s| s.delay_ms).collect();
            let delay = delays.iter().sum::<f64>() / delays.len().max(1) as f64;
            let e_per_hop = rec.e_elec / rec.steps.len() as f64;
            let coh = crate::analysis::coh(e_per_hop, body.mass, body.gravity, apex).unwrap();
            standby_ed[i] = ed;
            let td_ph = steady.iter().map(|s| (s.touchdown_t / t_clock).fract()).sum::<f64>() / n;
            let lo_ph =
                steady.iter().map(|s| (s.liftoff_t / t_clock).fract()).sum::<f64>() / n;
            println!(
                "slack {:>4.1} mm: steps {:>3}  E_d {:>6.1} mJ  delay {:>5.1} ms (miss {}/{})  \
                 apex {:>5.1}±{:>4.1} mm  CoH {:.3}  td@{:.3} lo@{:.3}  {:?}",
                slack * 1e3, rec.steps.len(), ed * 1e3, delay, misses, steady.len(),
                apex * 1e3, apex_std * 1e3, coh, td_ph, lo_ph, rec.outcome
            );
            let tail: Vec<String> = rec.steps[rec.steps.len() - 8..]
                .iter()
                .map(|s| format!("{:.1}", s.apex * 1e3))
                .collect();
            println!("    tail apexes: {}", tail.join(" "));
        }
        println!("--- step-down ---");
        for block in [0.031f64, 0.0465] {
            for (i, slack) in [0.010f64, 0.006, 0.003, 0.0].into_iter().enumerate() {
                let mut cfg = actuated_config(30.0, slack);
                cfg.terrain = TerrainProfile::step_down(block, 25);
                let cfg = cfg.validated().unwrap();
                let rec = simulate_vertical(&cfg).unwrap();
                let t_pert = rec.perturbation_t.unwrap();
                let idx = rec.steps.iter().position(|s| s.touchdown_t > t_pert).unwrap();
                let hit = &rec.steps[idx];
                let apexes: Vec<f64> = rec.steps.iter().map(|s| s.apex).collect();
                let rcv = crate::analysis::recovery_steps(&apexes, idx).unwrap();
                println!(
                    "block {:>4.1} mm slack {:>4.1} mm: E_d hit {:>6.1} mJ standby {:>6.1} \
                     extra {:>5.1}% recovery {:?} outcome {:?}",
                    block * 1e3, slack * 1e3, hit.e_d * 1e3, standby_ed[i] * 1e3,
                    (hit.e_d - standby_ed[i]) / standby_ed[i] * 100.0, rcv, rec.outcome
                );
                let lo = idx.saturating_sub(4);
                let shown: Vec<String> = apexes[lo..(idx + 12).min(apexes.len())]
                    .iter()
                    .map(|a| format!("{:.1}", a * 1e3))
                    .collect();
                println!("    apexes[{}..]: {}", lo, shown.join(" "));
            }
        }
    }

    #[test]
    fn torque_map_controls_the_schedule() {
        // An explicit empty map must fall back to the schedule torque.
        let mut cfg = actuated_config(1.0, 0.0);
        match &mut cfg.controller {
            Controller::Vertical {
                torque_by_slack, ..
            } => {
                assert_eq!(*torque_by_slack, default_torque_map::<f64>());
                torque_by_slack.clear();
            }
            Controller::Cpg { .. } => unreachable!(),
        }
        let sched = cfg.controller.vertical_schedule_for(0.0).unwrap();
        assert_eq!(sched.torque, VerticalSchedule::<f64>::standard().torque);
    }
}
