//! Boom-guided forward rig: a point mass at the hip moving in the unrolled
//! sagittal plane, driven by the CPG hip reference and the knee push-off
//! pulse over periodic terrain.
//!
//! Flight convention: the massless leg tracks the hip reference exactly, so
//! the foot lands wherever the CPG points it; the hip motor's flight effort
//! is booked as the torque needed to swing a configurable leg inertia along
//! the reference (electrical draw only, no mechanical work on the mass).
//! Stance pins the foot where it touched down; the spring/damper/knee act
//! along the hip-foot axis and the hip motor acts on the leg angle.

use super::integrate::{bisect_event, rk4_step};
use super::record::{Outcome, StepSummary, TraceSample, TrialRecord};
use super::{dissipation_rate, leg_forces, seed_fraction, OpenStep};
use crate::actuation::{available_torque, electrical_power, joint_torque, Joint, MotorParams};
use crate::compliance::{spring_energy, DamperParams, SpringParams};
use crate::config::{ConfigError, Controller, RunLength, ScenarioConfig};
use crate::control::{pd_torque, CpgParams};
use crate::kinematics::{tendon_excursion, LegGeometry};
use crate::real::Real;
use crate::terrain::TerrainProfile;

const X: usize = 0;
const Y: usize = 1;
const VX: usize = 2;
const VY: usize = 3;
const E_ELEC: usize = 4;
const W_POS: usize = 5;
const W_NEG: usize = 6;
const DISS: usize = 7;
const ABS: usize = 8;
const N: usize = 9;

/// Knee angle treated as full extension, as on the vertical rig.
const ALPHA_LOCKOUT_DEG: f64 = 176.0;

/// Initial hip drop above the touchdown sphere [m].
const DROP: f64 = 0.010;

/// Minimum forward progress per controller cycle [m]; below this the trial
/// is classified as stopped.
const STOP_PROGRESS: f64 = 0.010;

/// Cycles exempt from the stop check while the gait starts from rest.
const STOP_GRACE_CYCLES: u32 = 2;

/// Ground-normal force above which the friction cone is evaluated [N].
const SLIP_NORMAL_MIN: f64 = 5.0;

/// Hard simulated-time cap [s]; generous next to the stop detector, which
/// ends a stalled gait within a couple of cycles.
const TIME_CAP: f64 = 600.0;

/// Span of the seeded terrain-pattern shift [m]; one block wavelength, which
/// is also about one step length.
const PATTERN_SPAN: f64 = 0.36;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Mode {
    Flight,
    Stance,
}

/// Guard identifiers in tie-break priority order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum Guard {
    BottomOut,
    Liftoff,
    Lockout,
    Touchdown,
    Engage,
    Apex,
}

/// Stance geometry derived from the hip state and the foot anchor.
#[derive(Debug, Clone, Copy)]
struct StanceFrame<T> {
    l: T,
    l_dot: T,
    /// Leg angle from vertical, positive with the foot behind the hip, so
    /// the reference sweep from negative to positive carries the body
    /// forward over the anchored foot.
    theta: T,
    theta_dot: T,
    alpha: T,
    alpha_dot: T,
}

struct Rig<'a, T: Real> {
    geom: &'a LegGeometry<T>,
    spring: &'a SpringParams<T>,
    damper: &'a DamperParams<T>,
    motor: &'a MotorParams<T>,
    cpg: &'a CpgParams<T>,
    terrain: &'a TerrainProfile<T>,
    x_shift: T,
    mass: T,
    gravity: T,
    mu: T,
    alpha_min: T,
    alpha_lock: T,
}

impl<T: Real> Rig<'_, T> {
    /// Terrain height under track coordinate `x`, pattern shift applied.
    fn ground(&self, x: T) -> T {
        self.terrain.height_at(x + self.x_shift, false)
    }

    fn frame(&self, anchor: (T, T), y: &[T; N]) -> StanceFrame<T> {
        let dx = y[X] - anchor.0;
        let dy = y[Y] - anchor.1;
        let l = (dx * dx + dy * dy).sqrt().max(T::of(1e-9));
        let theta = dx.atan2(dy);
        let l_dot = (y[VX] * dx + y[VY] * dy) / l;
        let theta_dot = (y[VX] * dy - y[VY] * dx) / (l * l);
        let alpha = self.geom.alpha_of_length_clamped(l);
        let jac = self.geom.leg_jacobian_clamped(alpha);
        StanceFrame {
            l,
            l_dot,
            theta,
            theta_dot,
            alpha,
            alpha_dot: l_dot / jac,
        }
    }

    /// Clamped hip PD torque tracking the CPG reference.
    fn hip_torque(&self, t: T, fr: &StanceFrame<T>) -> T {
        let (theta_ref, dtheta_ref, _) = self.cpg.hip_kinematics_at(t);
        let cmd = pd_torque(
            self.cpg.kp,
            self.cpg.kd,
            theta_ref,
            dtheta_ref,
            fr.theta,
            fr.theta_dot,
        );
        available_torque(self.motor, cmd, Joint::Hip, fr.theta_dot)
    }

    /// Hip torque the flight swing would need along the reference.
    fn swing_torque(&self, t: T) -> T {
        let (_, dtheta_ref, ddtheta_ref) = self.cpg.hip_kinematics_at(t);
        available_torque(
            self.motor,
            self.cpg.swing_inertia * ddtheta_ref,
            Joint::Hip,
            dtheta_ref,
        )
    }

    fn deriv(&self, mode: Mode, anchor: (T, T), tau_knee: T, t: T, y: &[T; N]) -> [T; N] {
        match mode {
            Mode::Flight => {
                let (_, dtheta_ref, _) = self.cpg.hip_kinematics_at(t);
                let p_knee = electrical_power(self.motor, tau_knee, T::zero(), Joint::Knee);
                let p_hip =
                    electrical_power(self.motor, self.swing_torque(t), dtheta_ref, Joint::Hip);
                let mut d = [T::zero(); N];
                d[X] = y[VX];
                d[Y] = y[VY];
                d[VX] = T::zero();
                d[VY] = -self.gravity;
                d[E_ELEC] = p_knee + p_hip;
                d
            }
            Mode::Stance => {
                let fr = self.frame(anchor, y);
                // Fast extension outruns the knee drive's voltage headroom.
                let tau_knee = available_torque(self.motor, tau_knee, Joint::Knee, fr.alpha_dot);
                let lf = leg_forces(
                    self.geom,
                    self.spring,
                    self.damper,
                    fr.alpha,
                    fr.alpha_dot,
                    tau_knee,
                );
                let tau_hip = self.hip_torque(t, &fr);
                let f_t = tau_hip / fr.l;
                let (sin_t, cos_t) = (fr.theta.sin(), fr.theta.cos());
                // Unit vectors: radial anchor->hip (sin, cos), tangential
                // toward +theta (cos, -sin); positive hip torque propels.
                let fx = lf.f_axial * sin_t + f_t * cos_t;
                let fy = lf.f_axial * cos_t - f_t * sin_t;
                let p_knee_mech = tau_knee * fr.alpha_dot;
                let p_hip_mech = tau_hip * fr.theta_dot;
                let mut d = [T::zero(); N];
                d[X] = y[VX];
                d[Y] = y[VY];
                d[VX] = fx / self.mass;
                d[VY] = fy / self.mass - self.gravity;
                d[E_ELEC] = electrical_power(self.motor, tau_knee, fr.alpha_dot, Joint::Knee)
                    + electrical_power(self.motor, tau_hip, fr.theta_dot, Joint::Hip);
                d[W_POS] = p_knee_mech.max(T::zero()) + p_hip_mech.max(T::zero());
                d[W_NEG] = p_knee_mech.min(T::zero()) + p_hip_mech.min(T::zero());
                d[DISS] = dissipation_rate(self.damper, lf.piston_vel);
                d[ABS] = lf.f_damper * lf.piston_vel;
                d
            }
        }
    }

    /// Foot position with the leg on the flight reference.
    fn flight_foot(&self, t: T, y: &[T; N]) -> (T, T) {
        let (theta_ref, _, _) = self.cpg.hip_kinematics_at(t);
        (
            y[X] - self.geom.l0 * theta_ref.sin(),
            y[Y] - self.geom.l0 * theta_ref.cos(),
        )
    }

    fn guard_value(&self, which: Guard, anchor: (T, T), t: T, y: &[T; N]) -> T {
        match which {
            Guard::Touchdown => {
                let (fx, fy) = self.flight_foot(t, y);
                fy - self.ground(fx)
            }
            Guard::Apex => y[VY],
            Guard::Liftoff => self.frame(anchor, y).l - self.geom.l0,
            Guard::BottomOut => self.frame(anchor, y).alpha - self.alpha_min,
            Guard::Lockout => self.frame(anchor, y).alpha - self.alpha_lock,
            Guard::Engage => {
                let fr = self.frame(anchor, y);
                tendon_excursion(self.geom.r_d, self.geom.alpha0, fr.alpha) - self.damper.slack
            }
        }
    }

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

/// Simulates one forward-rig trial. The config must describe the CPG
/// controller; the trial length is a revolution count (or a plain duration
/// cap, mainly for tests).
pub fn simulate_forward<T: Real>(cfg: &ScenarioConfig<T>) -> Result<TrialRecord<T>, ConfigError> {
    let base_cpg = match &cfg.controller {
        Controller::Cpg { params } => params.clone(),
        Controller::Vertical { .. } => {
            return Err(ConfigError {
                field: "controller".into(),
                reason: "forward rig requires the CPG controller".into(),
            })
        }
    };
    // Repetitions differ by the uncontrolled phase between the gait and the
    // terrain pattern; the seed slides the pattern under the track by up to
    // one block wavelength. The launch itself stays identical across reps.
    let cpg = base_cpg;
    let x_shift = T::of(seed_fraction(cfg.seed) * PATTERN_SPAN);

    let (target_x, cap) = match cfg.run {
        RunLength::Revolutions(n) => (
            Some(cfg.terrain.track_length * T::of(n as f64)),
            T::of(TIME_CAP),
        ),
        RunLength::Duration(d) => (None, d),
    };

    let rig = Rig {
        geom: &cfg.geometry,
        spring: &cfg.spring,
        damper: &cfg.damper,
        motor: &cfg.motor,
        cpg: &cpg,
        terrain: &cfg.terrain,
        x_shift,
        mass: cfg.body.mass,
        gravity: cfg.body.gravity,
        mu: cfg.body.friction,
        alpha_min: cfg.integrator.alpha_min,
        alpha_lock: T::of(ALPHA_LOCKOUT_DEG * std::f64::consts::PI / 180.0),
    };
    let dt = cfg.integrator.dt;
    let tol = cfg.integrator.event_tol;
    let stride = ((T::one() / (cfg.integrator.sample_rate * dt)).f64().round() as u64).max(1);
    let n_grid = (cap / dt).f64().ceil() as u64;

    // Start in flight just above the touchdown sphere at the reference pose,
    // moving at the speed a reference-tracking vault would impose. With the
    // hip amplitude zeroed this degenerates to a standstill launch.
    let drop = cfg.drop_height.unwrap_or_else(|| T::of(DROP));
    let (theta0, dtheta0, _) = cpg.hip_kinematics_at(T::zero());
    let foot_x0 = -(rig.geom.l0 * theta0.sin());
    let mut state = [T::zero(); N];
    state[X] = T::zero();
    state[Y] = rig.ground(foot_x0) + rig.geom.l0 * theta0.cos() + drop;
    state[VX] = rig.geom.l0 * theta0.cos() * dtheta0;
    let mut mode = Mode::Flight;
    let mut anchor = (T::zero(), T::zero());
    let mut steps_done: u32 = 0;
    let mut open: Option<OpenStep<T>> = None;
    let mut prev_td: Option<(usize, T)> = None;

    // Stop detection bookkeeping: progress over whole controller cycles.
    let cycle = T::one() / cpg.frequency;
    let mut cycle_end = cycle;
    let mut cycles_done: u32 = 0;
    let mut x_at_cycle_start = state[X];

    let mut record = TrialRecord::new();
    record.samples.reserve((n_grid / stride + 2) as usize);
    let e0 = mech_energy(&rig, mode, anchor, &state);
    record.peak_energy = e0;

    let probe_trace = |mode: Mode, anchor: (T, T), t: T, y: &[T; N]| -> TraceSample<T> {
        let tau_knee = joint_torque(rig.motor, cpg.knee_torque_at(t), Joint::Knee);
        match mode {
            Mode::Flight => {
                let (_, dtheta_ref, _) = cpg.hip_kinematics_at(t);
                let tau_hip = rig.swing_torque(t);
                TraceSample {
                    t,
                    x: y[X],
                    y: y[Y],
                    vy: y[VY],
                    alpha: rig.geom.alpha0,
                    grf: T::zero(),
                    f_spring: T::zero(),
                    f_damper: T::zero(),
                    piston_pos: T::zero(),
                    tau_hip,
                    tau_knee,
                    p_elec: electrical_power(rig.motor, tau_knee, T::zero(), Joint::Knee)
                        + electrical_power(rig.motor, tau_hip, dtheta_ref, Joint::Hip),
                }
            }
            Mode::Stance => {
                let fr = rig.frame(anchor, y);
                let tau_knee = available_torque(rig.motor, tau_knee, Joint::Knee, fr.alpha_dot);
                let lf = leg_forces(
                    rig.geom,
                    rig.spring,
                    rig.damper,
                    fr.alpha,
                    fr.alpha_dot,
                    tau_knee,
                );
                let tau_hip = rig.hip_torque(t, &fr);
                let f_t = tau_hip / fr.l;
                let grf = lf.f_axial * fr.theta.cos() - f_t * fr.theta.sin();
                TraceSample {
                    t,
                    x: y[X],
                    y: y[Y],
                    vy: y[VY],
                    alpha: fr.alpha,
                    grf,
                    f_spring: lf.f_spring,
                    f_damper: lf.f_damper,
                    piston_pos: lf.piston_pos,
                    tau_hip,
                    tau_knee,
                    p_elec: electrical_power(rig.motor, tau_knee, fr.alpha_dot, Joint::Knee)
                        + electrical_power(rig.motor, tau_hip, fr.theta_dot, Joint::Hip),
                }
            }
        }
    };

    record.samples.push(probe_trace(mode, anchor, T::zero(), &state));

    let mut t_final = T::zero();
    'grid: for k in 0..n_grid {
        let t0 = dt * T::of(k as f64);
        let t1 = (dt * T::of((k + 1) as f64)).min(cap);
        let mut ta = t0;

        while ta < t1 {
            let edge = cpg.next_discontinuity(ta);
            let tb = edge.min(t1);
            let tau_knee = joint_torque(rig.motor, cpg.knee_torque_at(ta), Joint::Knee);
            let powered = tau_knee > T::zero();

            if mode == Mode::Stance && !powered {
                let fr = rig.frame(anchor, &state);
                if fr.l > rig.geom.l0 || (fr.l == rig.geom.l0 && fr.l_dot > T::zero()) {
                    do_liftoff(ta, &state, &mut mode, &mut steps_done, &mut open);
                }
            }

            // A foot that never cleared the surface cannot produce a
            // touchdown crossing; once the hip is falling, plant it.
            if mode == Mode::Flight && state[VY] <= T::zero() {
                let (fx, fy) = rig.flight_foot(ta, &state);
                if fy - rig.ground(fx) <= T::zero() {
                    do_touchdown(
                        &rig,
                        ta,
                        &state,
                        &mut mode,
                        &mut anchor,
                        steps_done,
                        &mut prev_td,
                        &mut record,
                        &mut open,
                    );
                }
            }

            loop {
                let mut f = |t: T, y: &[T; N]| rig.deriv(mode, anchor, tau_knee, t, y);
                let cand = rk4_step(&mut f, ta, &state, tb - ta);

                let mut hit: Option<(T, Guard)> = None;
                for &which in Rig::<T>::active_guards(mode, powered) {
                    let g_a = rig.guard_value(which, anchor, ta, &state);
                    let g_b = rig.guard_value(which, anchor, tb, &cand);
                    let crossed = if Rig::<T>::downward(which) {
                        g_a > T::zero() && g_b <= T::zero()
                    } else {
                        g_a < T::zero() && g_b >= T::zero()
                    };
                    if !crossed {
                        continue;
                    }
                    let mut probe = |t: T| {
                        let mut f = |t: T, y: &[T; N]| rig.deriv(mode, anchor, tau_knee, t, y);
                        let s = rk4_step(&mut f, ta, &state, t - ta);
                        rig.guard_value(which, anchor, t, &s)
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
                        commit_stance_probes(&rig, mode, anchor, tau_knee, ta, &state, &mut open);
                        break;
                    }
                    Some((te, which)) => {
                        state = rk4_step(&mut f, ta, &state, te - ta);
                        ta = te;
                        commit_stance_probes(&rig, mode, anchor, tau_knee, ta, &state, &mut open);
                        match which {
                            Guard::Touchdown => {
                                do_touchdown(
                                    &rig,
                                    te,
                                    &state,
                                    &mut mode,
                                    &mut anchor,
                                    steps_done,
                                    &mut prev_td,
                                    &mut record,
                                    &mut open,
                                );
                            }
                            Guard::Liftoff | Guard::Lockout => {
                                do_liftoff(te, &state, &mut mode, &mut steps_done, &mut open);
                            }
                            Guard::Apex => {
                                if let Some(step) = open.take() {
                                    if let Some(liftoff_t) = step.liftoff_t {
                                        let clearance =
                                            state[Y] - rig.geom.l0 - rig.ground(state[X]);
                                        record.steps.push(StepSummary {
                                            step: step.index,
                                            touchdown_t: step.touchdown_t,
                                            liftoff_t,
                                            apex_t: te,
                                            apex: clearance,
                                            step_length: T::zero(),
                                            e_d: step.e_d,
                                            delay_ms: step.delay_ms(),
                                            slip: step.slip,
                                            stop: false,
                                        });
                                        prev_td =
                                            Some((record.steps.len() - 1, step.touchdown_x));
                                    }
                                }
                            }
                            Guard::Engage => {}
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

            // Controller-cycle boundaries drive the stall detector.
            while ta >= cycle_end {
                cycles_done += 1;
                let progress = state[X] - x_at_cycle_start;
                x_at_cycle_start = state[X];
                cycle_end = cycle * T::of((cycles_done + 1) as f64);
                if cycles_done > STOP_GRACE_CYCLES && progress < T::of(STOP_PROGRESS) {
                    if let Some(last) = record.steps.last_mut() {
                        last.stop = true;
                    }
                    record.outcome = Outcome::Stopped { t: ta };
                    t_final = ta;
                    break 'grid;
                }
            }

            if let Some(goal) = target_x {
                if state[X] >= goal {
                    t_final = ta;
                    break 'grid;
                }
            }
        }

        t_final = t1;
        if (k + 1) % stride == 0 {
            record.samples.push(probe_trace(mode, anchor, t1, &state));
            let e = mech_energy(&rig, mode, anchor, &state);
            record.peak_energy = record.peak_energy.max(e);
            let defect = (e - e0 - state[W_POS] - state[W_NEG] + state[ABS]).abs();
            record.max_ledger_defect = record.max_ledger_defect.max(defect);
        }

        if t1 >= cap {
            if target_x.is_some() {
                record.outcome = Outcome::TimedOut { t: t1 };
            }
            break;
        }
    }

    record.e_elec = state[E_ELEC];
    record.w_pos = state[W_POS];
    record.w_neg = state[W_NEG];
    record.dissipated = state[DISS];
    record.absorbed = state[ABS];
    record.duration = t_final;
    record.distance = state[X];
    Ok(record)
}

#[allow(clippy::too_many_arguments)]
fn do_touchdown<T: Real>(
    rig: &Rig<'_, T>,
    t: T,
    state: &[T; N],
    mode: &mut Mode,
    anchor: &mut (T, T),
    steps_done: u32,
    prev_td: &mut Option<(usize, T)>,
    record: &mut TrialRecord<T>,
    open: &mut Option<OpenStep<T>>,
) {
    *mode = Mode::Stance;
    let (fx, _) = rig.flight_foot(t, state);
    // Anchor on the surface: a foot still below ground at the crossing
    // tolerance scuffs straight onto it rather than through it.
    *anchor = (fx, rig.ground(fx));
    if let Some((idx, td_x)) = prev_td.take() {
        if let Some(s) = record.steps.get_mut(idx) {
            s.step_length = state[X] - td_x;
        }
    }
    *open = Some(OpenStep::new(steps_done + 1, t, state[X], state[ABS]));
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

/// Feeds force-onset trackers and the friction-cone slip flag at a
/// committed stance state.
fn commit_stance_probes<T: Real>(
    rig: &Rig<'_, T>,
    mode: Mode,
    anchor: (T, T),
    tau_knee: T,
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
    let fr = rig.frame(anchor, state);
    let tau_knee = available_torque(rig.motor, tau_knee, Joint::Knee, fr.alpha_dot);
    // Tendon load cells see the compliant elements alone; the friction
    // cone sees the full axial force with the knee drive included.
    let lf = leg_forces(
        rig.geom,
        rig.spring,
        rig.damper,
        fr.alpha,
        fr.alpha_dot,
        tau_knee,
    );
    step.spring.update(t, lf.f_spring);
    step.damper.update(t, lf.f_damper);
    let tau_hip = rig.hip_torque(t, &fr);
    let f_t = tau_hip / fr.l;
    let (sin_t, cos_t) = (fr.theta.sin(), fr.theta.cos());
    let f_normal = lf.f_axial * cos_t - f_t * sin_t;
    let f_tangent = lf.f_axial * sin_t + f_t * cos_t;
    if f_normal > T::of(SLIP_NORMAL_MIN) && f_tangent.abs() > rig.mu * f_normal {
        step.slip = true;
    }
}

fn mech_energy<T: Real>(rig: &Rig<'_, T>, mode: Mode, anchor: (T, T), state: &[T; N]) -> T {
    let kin = rig.mass.half() * (state[VX] * state[VX] + state[VY] * state[VY]);
    let pot = rig.mass * rig.gravity * state[Y];
    let elastic = match mode {
        Mode::Flight => T::zero(),
        Mode::Stance => {
            let fr = rig.frame(anchor, state);
            let x_s = tendon_excursion(rig.geom.r_k, rig.geom.alpha0, fr.alpha);
            spring_energy(rig.spring, x_s)
        }
    };
    kin + pot + elastic
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::ScenarioConfig;
    use crate::terrain::TerrainProfile;

    fn forward_config(revs: u32) -> ScenarioConfig<f64> {
        let mut cfg = ScenarioConfig::forward_default();
        cfg.run = RunLength::Revolutions(revs);
        cfg
    }

    #[test]
    fn flat_default_reaches_cruise_speed() {
        let cfg = forward_config(2).validated().unwrap();
        let rec = simulate_forward(&cfg).unwrap();
        assert_eq!(rec.outcome, Outcome::Completed, "{:?}", rec.outcome);
        // Judge speed over the second revolution to skip the launch
        // transient.
        let track = cfg.terrain.track_length;
        let t_half = rec
            .samples
            .iter()
            .find(|s| s.x >= track)
            .map(|s| s.t)
            .unwrap();
        let speed = (rec.distance - track) / (rec.duration - t_half);
        assert!(
            (0.5..=1.0).contains(&speed),
            "cruise speed {speed} m/s out of band"
        );
    }

    #[test]
    fn zero_hip_amplitude_stalls_out() {
        let mut cfg = forward_config(2);
        match &mut cfg.controller {
            Controller::Cpg { params } => params.hip_amplitude = 0.0,
            _ => unreachable!(),
        }
        let rec = simulate_forward(&cfg.validated().unwrap()).unwrap();
        assert!(
            matches!(rec.outcome, Outcome::Stopped { .. }),
            "expected a stall, got {:?}",
            rec.outcome
        );
        assert!(rec.distance < 0.5);
    }

    #[test]
    fn infinite_friction_never_slips() {
        let mut cfg = forward_config(1);
        cfg.body.friction = f64::INFINITY;
        let rec = simulate_forward(&cfg.validated().unwrap()).unwrap();
        assert_eq!(rec.outcome, Outcome::Completed);
        assert!(rec.steps.iter().all(|s| !s.slip));
    }

    #[test]
    fn same_seed_reproduces_the_record() {
        let mut cfg = forward_config(1);
        cfg.run = RunLength::Duration(5.0);
        let cfg = cfg.validated().unwrap();
        let a = simulate_forward(&cfg).unwrap();
        let b = simulate_forward(&cfg).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn seeds_slide_the_terrain_pattern() {
        let mut cfg = forward_config(1);
        cfg.run = RunLength::Duration(6.0);
        cfg.terrain = TerrainProfile::sinusoid(0.010);
        let a = simulate_forward(&cfg.clone().validated().unwrap()).unwrap();
        cfg.seed = 2;
        let b = simulate_forward(&cfg.validated().unwrap()).unwrap();
        // Same launch, different pattern phase: the step records diverge.
        let apex = |r: &TrialRecord<f64>| r.steps.iter().map(|s| s.apex).collect::<Vec<_>>();
        assert_ne!(apex(&a), apex(&b));
    }

    #[test]
    fn ledger_closes_on_an_actuated_trial() {
        let mut cfg = forward_config(1);
        cfg.run = RunLength::Duration(10.0);
        let rec = simulate_forward(&cfg.validated().unwrap()).unwrap();
        assert_eq!(rec.outcome, Outcome::Completed);
        assert!(
            rec.ledger_defect_fraction() < 0.005,
            "ledger defect {}",
            rec.ledger_defect_fraction()
        );
    }

    #[test]
    fn steps_carry_positive_lengths_at_cruise() {
        let mut cfg = forward_config(1);
        cfg.run = RunLength::Duration(12.0);
        let rec = simulate_forward(&cfg.validated().unwrap()).unwrap();
        let n = rec.steps.len();
        assert!(n > 10, "too few steps: {n}");
        // All mid-trial steps have their length patched by the next
        // touchdown; the last may legitimately be zero.
        for s in &rec.steps[3..n - 1] {
            assert!(
                s.step_length > 0.0,
                "step {} length {}",
                s.step,
                s.step_length
            );
        }
    }


    #[test]
    fn diag_gait() {
        for (kp, kd) in [(5.0, 0.45), (8.0, 0.6), (16.0, 0.88)] {
        println!("== kp {kp} kd {kd} ==");
        for slack in [0.010f64, 0.006, 0.003, 0.0] {
            let mut cfg = forward_config(1);
            cfg.run = RunLength::Duration(12.0);
            cfg.drop_height = Some(0.080);
            cfg.damper.slack = slack;
            if let Controller::Cpg { ref mut params, .. } = cfg.controller {
                params.kp = kp;
                params.kd = kd;
            }
            let cfg = cfg.validated().unwrap();
            let rec = simulate_forward(&cfg).unwrap();
            let speed = rec.distance / rec.duration;
            let cot = rec.e_elec / (0.94 * 9.81 * rec.distance);
            let slips = rec.steps.iter().filter(|s| s.slip).count();
            // Settled-window tallies from the trace: electrical power after
            // t = 6 s, trapezoid rule.
            let mut e_late = 0.0;
            for w in rec.samples.windows(2) {
                if w[0].t >= 6.0 {
                    e_late += 0.5 * (w[0].p_elec + w[1].p_elec) * (w[1].t - w[0].t);
                }
            }
            let late: Vec<_> = rec.steps.iter().filter(|s| s.touchdown_t >= 6.0).collect();
            let ed_sum: f64 = late.iter().map(|s| s.e_d).sum();
            let d_late: f64 = late.iter().map(|s| s.step_length).sum();
            let f = 1.85f64;
            let p0 = 0.4f64;
            let fr_td: Vec<f64> = late.iter().map(|s| ((s.touchdown_t * f + p0).fract() * 100.0).round() / 100.0).collect();
            // Knee electrical reconstructed from the trace (alpha finite
            // difference); remainder is the hip.
            let motor = MotorParams::<f64>::standard();
            let mut e_knee = 0.0;
            let mut e_hip_st = 0.0;
            let mut e_hip_fl = 0.0;
            for w in rec.samples.windows(2) {
                if w[0].t < 6.0 {
                    continue;
                }
                let dt = w[1].t - w[0].t;
                let in_stance = w[0].grf > 0.0 || w[1].grf > 0.0;
                let ad = if in_stance { (w[1].alpha - w[0].alpha) / dt } else { 0.0 };
                let pk = 0.5
                    * (electrical_power(&motor, w[0].tau_knee, ad, Joint::Knee)
                        + electrical_power(&motor, w[1].tau_knee, ad, Joint::Knee));
                e_knee += pk * dt;
                let ph = 0.5 * (w[0].p_elec + w[1].p_elec) * dt - pk * dt;
                if in_stance {
                    e_hip_st += ph;
                } else {
                    e_hip_fl += ph;
                }
            }
            println!(
                "slack {:4.1} mm: {:?} steps {:2} speed {speed:.3} cot {cot:.3} e {:6.1} slips {slips:2} | settled: e {:5.1} J (knee {:4.1} hip_st {:4.1} hip_fl {:4.1}), e_d/step {:5.1} mJ, cot {:.3}",
                slack * 1e3, rec.outcome, rec.steps.len(), rec.e_elec,
                e_late, e_knee, e_hip_st, e_hip_fl,
                ed_sum * 1e3 / late.len() as f64,
                e_late / (0.94 * 9.81 * d_late),
            );
            println!("   td fracs {:?}", fr_td);
        }
        }
    }

    #[test]
    fn rejects_the_vertical_controller() {
        let cfg = ScenarioConfig::<f64>::vertical_default().validated().unwrap();
        assert!(simulate_forward(&cfg).is_err());
    }
}
