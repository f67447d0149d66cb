//! Spectral differentiation of periodic samples on a uniform grid.

use rustfft::num_complex::Complex;
use rustfft::FftPlanner;

/// Derivative of order `order` of uniformly sampled periodic data over one
/// period of length `period`. The Nyquist mode is dropped for odd orders.
pub fn derivative(values: &[f64], period: f64, order: u32) -> Vec<f64> {
    let m = values.len();
    if m == 0 {
        return Vec::new();
    }
    let mut planner = FftPlanner::<f64>::new();
    let fwd = planner.plan_fft_forward(m);
    let inv = planner.plan_fft_inverse(m);
    let mut buf: Vec<Complex<f64>> = values.iter().map(|&v| Complex::new(v, 0.0)).collect();
    fwd.process(&mut buf);
    let base = 2.0 * std::f64::consts::PI / period;
    for (j, c) in buf.iter_mut().enumerate() {
        let k = if j <= m / 2 { j as f64 } else { j as f64 - m as f64 };
        if m % 2 == 0 && j == m / 2 && order % 2 == 1 {
            *c = Complex::new(0.0, 0.0);
            continue;
        }
        let ik = Complex::new(0.0, k * base);
        let mut factor = Complex::new(1.0, 0.0);
        for _ in 0..order {
            factor *= ik;
        }
        *c *= factor;
    }
    inv.process(&mut buf);
    buf.iter().map(|c| c.re / m as f64).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn differentiates_trig_polynomial() {
        let m = 64;
        let th: Vec<f64> = (0..m).map(|j| 2.0 * PI * j as f64 / m as f64).collect();
        let f: Vec<f64> = th.iter().map(|t| (3.0 * t).sin() + 0.5 * t.cos()).collect();
        let d = derivative(&f, 2.0 * PI, 1);
        let d2 = derivative(&f, 2.0 * PI, 2);
        for (j, t) in th.iter().enumerate() {
            assert!((d[j] - (3.0 * (3.0 * t).cos() - 0.5 * t.sin())).abs() < 1e-12);
            assert!((d2[j] - (-9.0 * (3.0 * t).sin() - 0.5 * t.cos())).abs() < 1e-11);
        }
    }
}
