//! Fixed-step integration and guard-event localization.
//!
//! One trial is a sequence of smooth segments separated by control
//! discontinuities and guard events; within a segment the state advances
//! with classical RK4 steps. Guards are localized by bisection over the
//! step interval, probing with a single RK4 sub-step from the committed
//! segment-start state, so localized events are exactly reproducible.

use crate::real::Real;

#[derive(Debug, Clone, Copy, PartialEq, Eq, thiserror::Error)]
pub enum EventError {
    #[error("guard does not change sign over the bracket")]
    NoSignChange,
}

/// One classical 4th-order Runge-Kutta step of width `dt`.
pub fn rk4_step<T: Real, const N: usize>(
    f: &mut impl FnMut(T, &[T; N]) -> [T; N],
    t: T,
    y: &[T; N],
    dt: T,
) -> [T; N] {
    let half = dt.half();
    let k1 = f(t, y);
    let k2 = f(t + half, &add_scaled(y, &k1, half));
    let k3 = f(t + half, &add_scaled(y, &k2, half));
    let k4 = f(t + dt, &add_scaled(y, &k3, dt));
    let sixth = dt / T::of(6.0);
    let mut out = *y;
    for i in 0..N {
        out[i] += sixth * (k1[i] + T::of(2.0) * (k2[i] + k3[i]) + k4[i]);
    }
    out
}

fn add_scaled<T: Real, const N: usize>(y: &[T; N], k: &[T; N], s: T) -> [T; N] {
    let mut out = *y;
    for i in 0..N {
        out[i] += s * k[i];
    }
    out
}

/// Bisects a guard crossing inside `(lo, hi]` down to `tol` and returns the
/// far side of the final bracket, so the state advanced to the returned time
/// has crossed.
///
/// `g_lo` is the already-evaluated guard value at `lo`; `guard(t)` evaluates
/// the guard at a candidate time.
pub fn bisect_event<T: Real>(
    guard: &mut impl FnMut(T) -> T,
    lo: T,
    hi: T,
    g_lo: T,
    tol: T,
) -> Result<T, EventError> {
    let g_hi = guard(hi);
    if g_lo == T::zero() {
        // Crossing at the bracket start counts as already localized.
        return Ok(lo);
    }
    if (g_lo > T::zero()) == (g_hi > T::zero()) && g_hi != T::zero() {
        return Err(EventError::NoSignChange);
    }
    let mut a = lo;
    let mut b = hi;
    let lo_positive = g_lo > T::zero();
    while b - a > tol {
        let mid = (a + b).half();
        if mid <= a || mid >= b {
            break; // float resolution exhausted
        }
        let g_mid = guard(mid);
        if g_mid == T::zero() {
            return Ok(mid);
        }
        if (g_mid > T::zero()) == lo_positive {
            a = mid;
        } else {
            b = mid;
        }
    }
    Ok(b)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rk4_reproduces_exponential_decay() {
        let mut f = |_t: f64, y: &[f64; 1]| [-y[0]];
        let mut y = [1.0_f64];
        let dt = 0.01;
        for k in 0..100 {
            y = rk4_step(&mut f, k as f64 * dt, &y, dt);
        }
        assert!((y[0] - (-1.0_f64).exp()).abs() < 1e-9);
    }

    #[test]
    fn rk4_is_fourth_order() {
        // Halving the step shrinks the global error by about 2^4.
        let run = |dt: f64| {
            let mut f = |t: f64, y: &[f64; 2]| [y[1], -t.sin() - y[0]];
            let mut y = [1.0_f64, 0.0];
            let n = (1.0 / dt).round() as usize;
            for k in 0..n {
                y = rk4_step(&mut f, k as f64 * dt, &y, dt);
            }
            y[0]
        };
        let exact = run(1e-5);
        let e1 = (run(0.02) - exact).abs();
        let e2 = (run(0.01) - exact).abs();
        let order = (e1 / e2).log2();
        assert!(order > 3.5, "observed order {order}");
    }

    #[test]
    fn bisection_localizes_a_linear_guard() {
        // g(t) = 0.37 - t crosses mid-interval.
        let mut g = |t: f64| 0.37 - t;
        let g0 = g(0.0);
        let t = bisect_event(&mut g, 0.0, 1.0, g0, 1e-7).unwrap();
        assert!((t - 0.37).abs() <= 1e-7);
        assert!(g(t) <= 0.0, "returned time must be past the crossing");
    }

    #[test]
    fn bisection_rejects_a_non_crossing_bracket() {
        let mut g = |t: f64| 1.0 + t;
        let g0 = g(0.0);
        assert_eq!(
            bisect_event(&mut g, 0.0, 1.0, g0, 1e-7),
            Err(EventError::NoSignChange)
        );
    }

    #[test]
    fn bisection_handles_downward_and_upward_crossings() {
        let mut up = |t: f64| t - 0.6;
        let g0 = up(0.0);
        let t = bisect_event(&mut up, 0.0, 1.0, g0, 1e-9).unwrap();
        assert!((t - 0.6).abs() <= 1e-9 && up(t) >= 0.0);

        let mut down = |t: f64| 0.25 - t * t;
        let g0 = down(0.0);
        let t = bisect_event(&mut down, 0.0, 1.0, g0, 1e-9).unwrap();
        assert!((t - 0.5).abs() <= 1e-9 && down(t) <= 0.0);
    }
}
