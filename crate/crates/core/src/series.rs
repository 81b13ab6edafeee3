//! Helpers for uniformly sampled series.

use num_complex::Complex64 as C64;

/// Values at the half-step points `T_j + dt/2`, `j = 0..n−1`, from a cubic
/// through the four nearest samples (one-sided at the ends). Linear
/// interpolation would cap an RK4 march at second order.
pub fn midpoints(f: &[C64]) -> Vec<C64> {
    let n = f.len();
    if n < 2 {
        return Vec::new();
    }
    if n < 4 {
        return f.windows(2).map(|w| 0.5 * (w[0] + w[1])).collect();
    }
    let mut out = Vec::with_capacity(n - 1);
    out.push((5.0 * f[0] + 15.0 * f[1] - 5.0 * f[2] + f[3]) / 16.0);
    for j in 1..n - 2 {
        out.push((-f[j - 1] + 9.0 * f[j] + 9.0 * f[j + 1] - f[j + 2]) / 16.0);
    }
    out.push((f[n - 4] - 5.0 * f[n - 3] + 15.0 * f[n - 2] + 5.0 * f[n - 1]) / 16.0);
    out
}

pub fn trapezoid(f: &[f64], dt: f64) -> f64 {
    match f.len() {
        0 | 1 => 0.0,
        n => dt * (f[1..n - 1].iter().sum::<f64>() + 0.5 * (f[0] + f[n - 1])),
    }
}

pub fn trapezoid_c(f: &[C64], dt: f64) -> C64 {
    match f.len() {
        0 | 1 => C64::new(0.0, 0.0),
        n => dt * (f[1..n - 1].iter().sum::<C64>() + 0.5 * (f[0] + f[n - 1])),
    }
}

/// Central differences in the interior, second-order one-sided at the ends.
pub fn derivative(f: &[f64], h: f64) -> Vec<f64> {
    let n = f.len();
    match n {
        0 => Vec::new(),
        1 => vec![0.0],
        2 => vec![(f[1] - f[0]) / h; 2],
        _ => {
            let mut d = Vec::with_capacity(n);
            d.push((-3.0 * f[0] + 4.0 * f[1] - f[2]) / (2.0 * h));
            for j in 1..n - 1 {
                d.push((f[j + 1] - f[j - 1]) / (2.0 * h));
            }
            d.push((3.0 * f[n - 1] - 4.0 * f[n - 2] + f[n - 3]) / (2.0 * h));
            d
        }
    }
}

pub fn max_abs(f: &[C64]) -> f64 {
    f.iter().map(|v| v.norm()).fold(0.0, f64::max)
}

pub fn max_imag(f: &[C64]) -> f64 {
    f.iter().map(|v| v.im.abs()).fold(0.0, f64::max)
}

/// Real parts, or an error when any imaginary part exceeds `1e-10` of the peak
/// magnitude.
pub fn require_real(f: &[C64]) -> crate::Result<Vec<f64>> {
    let im = max_imag(f);
    if im > 1e-10 * max_abs(f) {
        return Err(crate::Error::ComplexInput { max_imag: im });
    }
    Ok(f.iter().map(|v| v.re).collect())
}
