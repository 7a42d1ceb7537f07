//! Thin wrapper around rustfft: one process-wide planner, unnormalized
//! transforms. Forward is sum x_j exp(-i 2 pi j k / n); inverse carries no
//! 1/n, callers divide where needed.

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use std::sync::{Arc, Mutex, OnceLock};

static PLANNER: OnceLock<Mutex<FftPlanner<f64>>> = OnceLock::new();

fn plan(len: usize, inverse: bool) -> Arc<dyn Fft<f64>> {
    let mut planner = PLANNER
        .get_or_init(|| Mutex::new(FftPlanner::new()))
        .lock()
        .expect("fft planner lock poisoned");
    if inverse {
        planner.plan_fft_inverse(len)
    } else {
        planner.plan_fft_forward(len)
    }
}

/// Forward DFT of a real signal; returns all n complex bins.
pub(crate) fn real_dft(x: &[f64]) -> Vec<Complex64> {
    let mut buf: Vec<Complex64> = x.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    plan(buf.len(), false).process(&mut buf);
    buf
}

/// Unnormalized inverse DFT; divide by n to invert `real_dft`.
pub(crate) fn idft(c: &[Complex64]) -> Vec<Complex64> {
    let mut buf = c.to_vec();
    plan(buf.len(), true).process(&mut buf);
    buf
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_recovers_signal() {
        let x: Vec<f64> = (0..16).map(|i| (i as f64 * 0.37).sin()).collect();
        let c = real_dft(&x);
        let back = idft(&c);
        let n = x.len() as f64;
        for (a, b) in x.iter().zip(&back) {
            assert!((a - b.re / n).abs() < 1e-12);
            assert!(b.im.abs() / n < 1e-12);
        }
    }

    #[test]
    fn unit_cosine_lands_on_its_bin() {
        // cos(2 pi k0 j / n) has DFT n/2 at bins k0 and n - k0.
        let n = 64;
        let k0 = 5;
        let x: Vec<f64> = (0..n)
            .map(|j| (std::f64::consts::TAU * k0 as f64 * j as f64 / n as f64).cos())
            .collect();
        let c = real_dft(&x);
        assert!((c[k0].re - n as f64 / 2.0).abs() < 1e-9);
        assert!(c[k0].im.abs() < 1e-9);
        assert!((c[n - k0].re - n as f64 / 2.0).abs() < 1e-9);
        for (k, v) in c.iter().enumerate() {
            if k != k0 && k != n - k0 {
                assert!(v.norm() < 1e-9, "leakage at bin {k}");
            }
        }
    }
}
