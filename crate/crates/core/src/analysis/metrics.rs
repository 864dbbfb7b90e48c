//! Energetics and robustness metrics computed from step summaries and
//! traces.

use crate::real::Real;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum MetricsError {
    #[error("metric undefined: {0}")]
    Undefined(&'static str),
    #[error("need at least {need} samples, got {got}")]
    TooFewSamples { need: usize, got: usize },
    #[error("spring force never crossed the onset threshold")]
    NoSpringOnset,
}

/// Cost of hopping: electrical energy of one hop normalized by the potential
/// energy at the apex, `E / (m g h)`.
pub fn coh<T: Real>(e_elec: T, mass: T, gravity: T, h_apex: T) -> Result<T, MetricsError> {
    if h_apex <= T::zero() {
        return Err(MetricsError::Undefined("apex height must be positive"));
    }
    if mass <= T::zero() || gravity <= T::zero() {
        return Err(MetricsError::Undefined("mass and gravity must be positive"));
    }
    Ok(e_elec / (mass * gravity * h_apex))
}

/// Cost of transport: electrical energy normalized by weight times distance,
/// `E / (m g d)`.
pub fn cot<T: Real>(e_elec: T, mass: T, gravity: T, distance: T) -> Result<T, MetricsError> {
    if distance <= T::zero() {
        return Err(MetricsError::Undefined("distance must be positive"));
    }
    if mass <= T::zero() || gravity <= T::zero() {
        return Err(MetricsError::Undefined("mass and gravity must be positive"));
    }
    Ok(e_elec / (mass * gravity * distance))
}

/// Number of steps to return into the apex reference band after a
/// perturbation.
///
/// The reference is the mean apex over up to ten steps immediately before
/// `perturb_index`; recovery is the first apex at or after `perturb_index`
/// inside `[0.96, 1.04] * reference`, reported 1-based. `None` means the
/// series never recovered.
pub fn recovery_steps<T: Real>(
    apex_series: &[T],
    perturb_index: usize,
) -> Result<Option<usize>, MetricsError> {
    if perturb_index < 3 {
        return Err(MetricsError::TooFewSamples {
            need: 3,
            got: perturb_index,
        });
    }
    if perturb_index >= apex_series.len() {
        return Err(MetricsError::Undefined("perturbation index beyond series"));
    }
    let pre_start = perturb_index.saturating_sub(10);
    let pre = &apex_series[pre_start..perturb_index];
    let reference = pre.iter().fold(T::zero(), |a, &b| a + b) / T::of(pre.len() as f64);
    let lo = T::of(0.96) * reference;
    let hi = T::of(1.04) * reference;
    for (k, &apex) in apex_series[perturb_index..].iter().enumerate() {
        if apex >= lo && apex <= hi {
            return Ok(Some(k + 1));
        }
    }
    Ok(None)
}

/// Time between spring-force onset and damper viscous-force onset within one
/// stance, both detected by the first sample exceeding `threshold`.
///
/// `Ok(None)` reports that the damper never fired; a damper onset at or
/// before the spring onset clamps to zero delay.
pub fn engagement_delay<T: Real>(
    spring_force: &[T],
    damper_force: &[T],
    dt: T,
    threshold: T,
) -> Result<Option<T>, MetricsError> {
    let spring_on = spring_force.iter().position(|&f| f > threshold);
    let damper_on = damper_force.iter().position(|&f| f > threshold);
    let spring_on = spring_on.ok_or(MetricsError::NoSpringOnset)?;
    match damper_on {
        None => Ok(None),
        Some(d) => {
            let delay = T::of(d.saturating_sub(spring_on) as f64) * dt;
            Ok(Some(delay))
        }
    }
}

/// Sample standard deviation of the intervals between successive events.
pub fn cycle_time_std<T: Real>(event_times: &[T]) -> Result<T, MetricsError> {
    if event_times.len() < 3 {
        return Err(MetricsError::TooFewSamples {
            need: 3,
            got: event_times.len(),
        });
    }
    let intervals: Vec<T> = event_times.windows(2).map(|w| w[1] - w[0]).collect();
    let n = T::of(intervals.len() as f64);
    let mean = intervals.iter().fold(T::zero(), |a, &b| a + b) / n;
    let ss = intervals
        .iter()
        .fold(T::zero(), |a, &b| a + (b - mean) * (b - mean));
    Ok((ss / (n - T::one())).sqrt())
}

/// Per-step failure flags as recorded by the simulator.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct StepFlags {
    pub slip: bool,
    pub stop: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FailureCounts {
    /// Perturbation encounters followed by a failure within the window.
    pub failed_encounters: usize,
    /// Total encounters examined.
    pub encounters: usize,
    /// Total steps carrying any failure flag.
    pub failure_steps: usize,
}

/// Attributes failures to perturbation encounters: an encounter counts as
/// failed if any step within `window` steps at or after it carries a slip or
/// stop flag.
pub fn classify_failures(
    flags: &[StepFlags],
    encounters: &[usize],
    window: usize,
) -> FailureCounts {
    let failed = encounters
        .iter()
        .filter(|&&e| {
            flags
                .iter()
                .skip(e)
                .take(window)
                .any(|f| f.slip || f.stop)
        })
        .count();
    FailureCounts {
        failed_encounters: failed,
        encounters: encounters.len(),
        failure_steps: flags.iter().filter(|f| f.slip || f.stop).count(),
    }
}

/// Damper force-vs-compression samples over one stance.
#[derive(Debug, Clone, PartialEq)]
pub struct WorkLoop<T> {
    /// Piston compression [m].
    pub excursion: Vec<T>,
    /// Transmitted damper force [N].
    pub force: Vec<T>,
}

impl<T: Real> WorkLoop<T> {
    /// Enclosed loop integral of force over excursion (trapezoidal, closed
    /// polygon); positive when the loop dissipates energy.
    pub fn enclosed_energy(&self) -> T {
        let n = self.excursion.len().min(self.force.len());
        if n < 2 {
            return T::zero();
        }
        let mut acc = T::zero();
        for i in 0..n {
            let j = (i + 1) % n;
            let dx = self.excursion[j] - self.excursion[i];
            acc += (self.force[i] + self.force[j]).half() * dx;
        }
        acc
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn coh_reference_value() {
        let v = coh(6.39_f64, 1.94, 9.81, 0.0533).unwrap();
        assert!((v - 6.30).abs() < 5e-3, "coh = {v}");
    }

    #[test]
    fn cot_reference_value() {
        let v = cot(93.1_f64, 0.94, 9.81, 10.0).unwrap();
        assert!((v - 1.01).abs() < 5e-3, "cot = {v}");
    }

    #[test]
    fn undefined_metrics_error_out() {
        assert!(coh(1.0_f64, 1.94, 9.81, 0.0).is_err());
        assert!(coh(1.0_f64, 1.94, 9.81, -0.01).is_err());
        assert!(cot(1.0_f64, 0.94, 9.81, 0.0).is_err());
    }

    #[test]
    fn recovery_matches_hand_worked_sequence() {
        // Ten steady apexes at 50 mm, then 44, 47, 48.3, 49.5: the band is
        // [48, 52], so step 3 recovers.
        let mut series = vec![0.050_f64; 10];
        series.extend_from_slice(&[0.044, 0.047, 0.0483, 0.0495]);
        let r = recovery_steps(&series, 10).unwrap();
        assert_eq!(r, Some(3));
    }

    #[test]
    fn recovery_reports_non_recovery() {
        let mut series = vec![0.050_f64; 8];
        series.extend_from_slice(&[0.030, 0.035, 0.040, 0.043]);
        assert_eq!(recovery_steps(&series, 8).unwrap(), None);
    }

    #[test]
    fn recovery_band_is_inclusive() {
        let mut series = vec![0.050_f64; 5];
        series.push(0.048); // exactly 0.96 * reference
        assert_eq!(recovery_steps(&series, 5).unwrap(), Some(1));
    }

    #[test]
    fn recovery_needs_enough_pre_steps() {
        let series = vec![0.05_f64; 6];
        assert!(recovery_steps(&series, 2).is_err());
        assert!(recovery_steps(&series, 3).is_ok());
    }

    #[test]
    fn engagement_delay_measures_threshold_gap() {
        let dt = 1e-3_f64;
        let mut spring = vec![0.0_f64; 100];
        let mut damper = vec![0.0_f64; 100];
        for i in 3..100 {
            spring[i] = 2.0;
        }
        for i in 54..100 {
            damper[i] = 1.5;
        }
        let d = engagement_delay(&spring, &damper, dt, 0.5).unwrap().unwrap();
        assert!((d - 0.051).abs() < 1e-9, "delay = {d}");
    }

    #[test]
    fn engagement_delay_no_engagement_and_synchrony() {
        let dt = 1e-3_f64;
        let spring = vec![0.0, 0.0, 2.0, 2.0, 2.0];
        let silent = vec![0.0; 5];
        assert_eq!(engagement_delay(&spring, &silent, dt, 0.5).unwrap(), None);
        // Damper fires on the same sample as the spring: zero delay.
        let damper = vec![0.0, 0.0, 3.0, 3.0, 3.0];
        assert_eq!(
            engagement_delay(&spring, &damper, dt, 0.5).unwrap(),
            Some(0.0)
        );
        // Damper fires first (zero slack): clamps to zero.
        let early = vec![3.0, 3.0, 3.0, 3.0, 3.0];
        assert_eq!(
            engagement_delay(&spring, &early, dt, 0.5).unwrap(),
            Some(0.0)
        );
        // No spring onset at all is ill-posed.
        assert!(matches!(
            engagement_delay(&silent, &damper, dt, 0.5),
            Err(MetricsError::NoSpringOnset)
        ));
    }

    #[test]
    fn cycle_std_reference_value() {
        let times = [0.0_f64, 0.5, 1.1, 1.6, 2.2];
        let s = cycle_time_std(&times).unwrap();
        assert!((s - 0.0577).abs() < 2e-4, "std = {s}");
    }

    #[test]
    fn cycle_std_needs_three_events() {
        assert!(cycle_time_std(&[0.0_f64, 1.0]).is_err());
    }

    #[test]
    fn failure_classification_counts_windows() {
        let mut flags = vec![StepFlags::default(); 30];
        flags[7].slip = true; // within 5 of encounter at 5
        flags[20].stop = true; // not within 5 of encounter at 10
        let counts = classify_failures(&flags, &[5, 10], 5);
        assert_eq!(counts.failed_encounters, 1);
        assert_eq!(counts.encounters, 2);
        assert_eq!(counts.failure_steps, 2);
    }

    #[test]
    fn work_loop_area_of_a_rectangle() {
        // Compress at 1 N, return at 0 N: encloses 1 J per meter stroke.
        let loop_ = WorkLoop {
            excursion: vec![0.0_f64, 1.0, 1.0, 0.0],
            force: vec![1.0, 1.0, 0.0, 0.0],
        };
        assert!((loop_.enclosed_energy() - 1.0).abs() < 1e-12);
        // Traversed the other way round the energy is returned.
        let loop_ = WorkLoop {
            excursion: vec![0.0_f64, 1.0, 1.0, 0.0],
            force: vec![0.0, 0.0, 1.0, 1.0],
        };
        assert!((loop_.enclosed_energy() + 1.0).abs() < 1e-12);
    }
}
