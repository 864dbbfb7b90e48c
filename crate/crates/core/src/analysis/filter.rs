//! Offline signal conditioning: zero-lag Butterworth low-pass, automatic
//! cutoff selection by residual analysis, and a centered moving average.
//!
//! The zero-lag filter is a 4th-order Butterworth applied forward and
//! backward as a cascade of two biquad sections, with odd-reflection padding
//! and steady-state initial conditions so constants pass through exactly.

use crate::real::Real;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum FilterError {
    #[error("cutoff must lie strictly between 0 and the Nyquist frequency")]
    CutoffOutOfRange,
    #[error("series of length {len} too short, need more than {min} samples")]
    SeriesTooShort { len: usize, min: usize },
    #[error("candidate cutoffs must be ascending, at least 4, inside (0, Nyquist)")]
    BadCandidates,
    #[error("moving-average span must be odd and non-zero")]
    BadSpan,
}

/// One second-order section, denominator normalized to `a0 = 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Biquad<T> {
    pub b0: T,
    pub b1: T,
    pub b2: T,
    pub a1: T,
    pub a2: T,
}

impl<T: Real> Biquad<T> {
    fn dc_gain(&self) -> T {
        (self.b0 + self.b1 + self.b2) / (T::one() + self.a1 + self.a2)
    }

    /// State that makes a step of height `x0` pass through without a start
    /// transient (direct form II transposed).
    fn steady_state(&self, x0: T) -> (T, T) {
        let k = self.dc_gain();
        let z2 = self.b2 - self.a2 * k;
        let z1 = self.b1 + self.b2 - (self.a1 + self.a2) * k;
        (z1 * x0, z2 * x0)
    }

    fn run(&self, x: &mut [T]) {
        let (mut z1, mut z2) = match x.first() {
            Some(&x0) => self.steady_state(x0),
            None => return,
        };
        for v in x.iter_mut() {
            let xi = *v;
            let y = self.b0 * xi + z1;
            z1 = self.b1 * xi - self.a1 * y + z2;
            z2 = self.b2 * xi - self.a2 * y;
            *v = y;
        }
    }
}

/// Butterworth low-pass of even order as biquad sections (bilinear transform
/// with frequency prewarping).
pub fn butterworth_lowpass<T: Real>(
    order: usize,
    cutoff_hz: T,
    sample_rate_hz: T,
) -> Result<Vec<Biquad<T>>, FilterError> {
    assert!(order >= 2 && order % 2 == 0, "even filter order required");
    if cutoff_hz <= T::zero() || cutoff_hz >= sample_rate_hz.half() {
        return Err(FilterError::CutoffOutOfRange);
    }
    let w = (T::PI() * cutoff_hz / sample_rate_hz).tan();
    let n = order;
    let mut sos = Vec::with_capacity(n / 2);
    for k in 0..n / 2 {
        // Pole-pair damping of the analog prototype.
        let zeta = (T::PI() * T::of((2 * k + 1) as f64) / T::of((2 * n) as f64)).cos();
        let a0 = T::one() + T::of(2.0) * zeta * w + w * w;
        sos.push(Biquad {
            b0: w * w / a0,
            b1: T::of(2.0) * w * w / a0,
            b2: w * w / a0,
            a1: (T::of(2.0) * w * w - T::of(2.0)) / a0,
            a2: (T::one() - T::of(2.0) * zeta * w + w * w) / a0,
        });
    }
    Ok(sos)
}

fn reflect_pad<T: Real>(x: &[T], pad: usize) -> Vec<T> {
    let n = x.len();
    let two = T::of(2.0);
    let mut out = Vec::with_capacity(n + 2 * pad);
    for i in (1..=pad).rev() {
        out.push(two * x[0] - x[i]);
    }
    out.extend_from_slice(x);
    for i in 1..=pad {
        out.push(two * x[n - 1] - x[n - 1 - i]);
    }
    out
}

/// 4th-order zero-lag Butterworth low-pass (forward-backward filtering with
/// odd-reflection padding).
pub fn butterworth_zero_lag<T: Real>(
    series: &[T],
    cutoff_hz: T,
    sample_rate_hz: T,
) -> Result<Vec<T>, FilterError> {
    const ORDER: usize = 4;
    let min = 6 * ORDER;
    if series.len() <= min {
        return Err(FilterError::SeriesTooShort {
            len: series.len(),
            min,
        });
    }
    let sos = butterworth_lowpass(ORDER, cutoff_hz, sample_rate_hz)?;
    let pad = 3 * (2 * sos.len() + 1);
    let mut buf = reflect_pad(series, pad.min(series.len() - 1));
    for s in &sos {
        s.run(&mut buf);
    }
    buf.reverse();
    for s in &sos {
        s.run(&mut buf);
    }
    buf.reverse();
    let pad = pad.min(series.len() - 1);
    Ok(buf[pad..pad + series.len()].to_vec())
}

/// Mean-square difference between the series and its filtered version. For
/// broadband noise this is linear in the cutoff (removed bandwidth), which
/// keeps the tail-line fit in `residual_cutoff` well conditioned.
fn residual_power<T: Real>(
    series: &[T],
    cutoff_hz: T,
    sample_rate_hz: T,
) -> Result<T, FilterError> {
    let filtered = butterworth_zero_lag(series, cutoff_hz, sample_rate_hz)?;
    let mut acc = T::zero();
    for (a, b) in series.iter().zip(&filtered) {
        let d = *a - *b;
        acc += d * d;
    }
    Ok(acc / T::of(series.len() as f64))
}

/// Automatic cutoff selection by residual analysis.
///
/// The mean-square residual is probed on the candidate grid; a straight line
/// fitted to its high-frequency (noise-dominated) tail is extrapolated to
/// 0 Hz, and the chosen cutoff is where the curve first meets that noise
/// intercept. Noise-free input degenerates to the highest candidate, pure
/// noise to the lowest.
pub fn residual_cutoff<T: Real>(
    series: &[T],
    sample_rate_hz: T,
    candidates: &[T],
) -> Result<T, FilterError> {
    if candidates.len() < 4 || candidates.windows(2).any(|w| w[1] <= w[0]) {
        return Err(FilterError::BadCandidates);
    }
    let residuals: Vec<T> = candidates
        .iter()
        .map(|&fc| residual_power(series, fc, sample_rate_hz))
        .collect::<Result<_, _>>()?;

    // Least-squares line through the top 40% of the candidate range.
    let tail_start = candidates.len() - (candidates.len() * 2 / 5).max(2);
    let xs = &candidates[tail_start..];
    let ys = &residuals[tail_start..];
    let n = T::of(xs.len() as f64);
    let sx = xs.iter().fold(T::zero(), |a, &b| a + b);
    let sy = ys.iter().fold(T::zero(), |a, &b| a + b);
    let sxx = xs.iter().fold(T::zero(), |a, &b| a + b * b);
    let sxy = xs
        .iter()
        .zip(ys)
        .fold(T::zero(), |a, (&x, &y)| a + x * y);
    let denom = n * sxx - sx * sx;
    let slope = (n * sxy - sx * sy) / denom;
    let intercept = (sy - slope * sx) / n;

    let max_power = residuals.iter().fold(T::zero(), |a, &b| a.max(b));
    if intercept <= T::of(1e-6) * max_power {
        // No measurable noise floor: nothing to remove.
        return Ok(*candidates.last().unwrap());
    }

    for (i, (&fc, &r)) in candidates.iter().zip(&residuals).enumerate() {
        if r <= intercept {
            if i == 0 {
                return Ok(fc);
            }
            // Interpolate the crossing between the bracketing candidates.
            let (f0, r0) = (candidates[i - 1], residuals[i - 1]);
            let t = (r0 - intercept) / (r0 - r);
            return Ok(f0 + t * (fc - f0));
        }
    }
    Ok(*candidates.last().unwrap())
}

/// Centered moving average with shrinking half-windows at the edges.
pub fn moving_average<T: Real>(series: &[T], span: usize) -> Result<Vec<T>, FilterError> {
    if span == 0 || span % 2 == 0 {
        return Err(FilterError::BadSpan);
    }
    let half = span / 2;
    let n = series.len();
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let lo = i.saturating_sub(half);
        let hi = (i + half + 1).min(n);
        let mut acc = T::zero();
        for &v in &series[lo..hi] {
            acc += v;
        }
        out.push(acc / T::of((hi - lo) as f64));
    }
    Ok(out)
}
