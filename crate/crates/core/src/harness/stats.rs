//! Binomial confidence intervals and threshold crossings of sampled curves.

/// 95 % normal-approximation half-width, `1.96 sqrt(p (1 - p) / n)`.
pub fn ci_halfwidth(p: f64, n: u64) -> f64 {
    if n == 0 {
        return f64::NAN;
    }
    1.96 * (p * (1.0 - p) / n as f64).sqrt()
}

/// SNR at which an increasing curve first reaches `target`, linearly
/// interpolated between grid points. `None` if it never does.
pub fn rising_crossing(curve: &[(f64, f64)], target: f64) -> Option<f64> {
    let k = curve.iter().position(|&(_, v)| v >= target)?;
    if k == 0 {
        return Some(curve[0].0);
    }
    let (x0, y0) = curve[k - 1];
    let (x1, y1) = curve[k];
    Some(x0 + (target - y0) / (y1 - y0) * (x1 - x0))
}

/// SNR at which a decreasing error-rate curve first falls to `target`,
/// interpolated in the log domain (linearly when the lower point is zero).
pub fn falling_crossing(curve: &[(f64, f64)], target: f64) -> Option<f64> {
    let k = curve.iter().position(|&(_, v)| v <= target)?;
    if k == 0 {
        return Some(curve[0].0);
    }
    let (x0, y0) = curve[k - 1];
    let (x1, y1) = curve[k];
    if y1 > 0.0 && y0 > 0.0 && target > 0.0 {
        let (l0, l1, lt) = (y0.log10(), y1.log10(), target.log10());
        Some(x0 + (l0 - lt) / (l0 - l1) * (x1 - x0))
    } else {
        Some(x0 + (y0 - target) / (y0 - y1) * (x1 - x0))
    }
}
