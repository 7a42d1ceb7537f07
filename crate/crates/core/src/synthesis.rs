//! Time-domain record synthesis: seeded Gaussian quadrature noise with a
//! prescribed variance spectrum, and the photocurrent pipelines that
//! consume it.
//!
//! Two pipelines produce photocurrent records. The linearized one adds the
//! small-signal response N theta(t) (1 + cos 2 Omega t) to the carrier-
//! demodulated readout quadrature; it splits cleanly into signal and noise
//! parts. The exact one pushes the full complex fields through both beam
//! splitters and subtracts output intensities with no small-angle
//! approximation; it is the reference the linearized pipeline is checked
//! against.
//!
//! Reproducibility contract: every random record is a pure function of
//! (spectrum, grid, seed). Seeds for independent streams are derived from
//! one master seed via [`derive_seed`], so realization r of any ensemble is
//! identical no matter how many worker threads run or in what order
//! realizations complete.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use std::f64::consts::FRAC_PI_2;

use crate::fft;
use crate::model::{
    evaluate_effective_spectrum, evaluate_orthogonal_spectrum, CarrierConfig, CarrierMode,
    PhaseSignal, PhotocurrentTrace, SqueezingModel, TimeGrid, TraceParts,
};

/// Stream tag for the readout-quadrature noise record.
pub const STREAM_READOUT: u64 = 1;
/// Stream tag for the orthogonal-quadrature noise record.
pub const STREAM_ORTHOGONAL: u64 = 2;

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

/// splitmix64 finalizer; full avalanche on one word.
fn mix(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Derive an independent child seed from (base, index, stream).
///
/// `index` numbers realizations within an ensemble, `stream` separates
/// logical noise channels of one realization. Distinct inputs give
/// unrelated outputs; the same inputs always give the same output.
pub fn derive_seed(base: u64, index: u64, stream: u64) -> u64 {
    let a = mix(base.wrapping_add(GOLDEN));
    let b = mix(a ^ index.wrapping_add(GOLDEN));
    mix(b ^ stream.wrapping_add(GOLDEN))
}

/// Synthesize one stationary Gaussian record whose periodogram expectation
/// equals `spectrum` (one value per nonnegative bin, two-sided PSD
/// convention).
///
/// Synthesis is done in the frequency domain: each bin k in 0..=n/2 gets an
/// independent complex Gaussian with E|c_k|^2 = spectrum[k] * n * fs, the
/// negative bins mirror conjugate-symmetrically, and one inverse FFT yields
/// the record. Bins are drawn in ascending k order from a ChaCha stream
/// seeded with `seed`, which fixes the record bit-for-bit.
pub fn synthesize_noise(spectrum: &[f64], grid: &TimeGrid, seed: u64) -> Vec<f64> {
    let n = grid.n_samples();
    assert_eq!(
        spectrum.len(),
        grid.n_bins(),
        "need one variance per nonnegative bin"
    );
    let scale = n as f64 * grid.sample_rate();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut coeffs = vec![Complex64::new(0.0, 0.0); n];
    for k in 0..=n / 2 {
        let sigma = (spectrum[k] * scale).sqrt();
        if k == 0 || k == n / 2 {
            // Self-conjugate bins are real and carry the full variance.
            let g: f64 = rng.sample(StandardNormal);
            coeffs[k] = Complex64::new(sigma * g, 0.0);
        } else {
            let g_re: f64 = rng.sample(StandardNormal);
            let g_im: f64 = rng.sample(StandardNormal);
            let c = Complex64::new(g_re, g_im) * (sigma / std::f64::consts::SQRT_2);
            coeffs[k] = c;
            coeffs[n - k] = c.conj();
        }
    }
    fft::idft(&coeffs)
        .iter()
        .map(|z| z.re / n as f64)
        .collect()
}

/// Both quadrature records of one dark-port field realization.
#[derive(Debug, Clone, PartialEq)]
pub struct SqueezedField {
    /// Quadrature the readout projects onto; variance spectrum V_eff.
    pub readout: Vec<f64>,
    /// Orthogonal quadrature; only the exact pipeline sees it.
    pub orthogonal: Vec<f64>,
}

/// Synthesize both quadratures of the squeezed dark-port field.
///
/// The readout quadrature uses child seed (seed, 0, [`STREAM_READOUT`]) and
/// the orthogonal one (seed, 0, [`STREAM_ORTHOGONAL`]), so the readout
/// record equals what [`synthesize_noise`] produces from the effective
/// spectrum with that child seed. The linearized and exact pipelines fed
/// from the same seed therefore share their readout noise exactly.
pub fn synthesize_squeezed_field(
    model: &SqueezingModel,
    grid: &TimeGrid,
    seed: u64,
) -> SqueezedField {
    let eff = evaluate_effective_spectrum(model, grid);
    let orth = evaluate_orthogonal_spectrum(model, grid);
    SqueezedField {
        readout: synthesize_noise(&eff, grid, derive_seed(seed, 0, STREAM_READOUT)),
        orthogonal: synthesize_noise(&orth, grid, derive_seed(seed, 0, STREAM_ORTHOGONAL)),
    }
}

/// Small-signal photocurrent: response plus carrier-weighted readout noise.
///
/// Two-frequency mode: i = N theta(t) (1 + cos 2 Omega t)
///                       + sqrt(2N) x1(t) cos Omega t.
/// Single-frequency mode: i = N theta(t) + sqrt(N) x1(t).
/// The returned trace carries its signal and noise parts separately.
pub fn linearized_photocurrent(
    carrier: &CarrierConfig,
    signal: &PhaseSignal,
    readout_noise: &[f64],
    grid: &TimeGrid,
) -> PhotocurrentTrace {
    assert_eq!(readout_noise.len(), grid.n_samples(), "noise record length");
    let n_flux = carrier.photon_flux;
    let mut sig = Vec::with_capacity(grid.n_samples());
    let mut noise = Vec::with_capacity(grid.n_samples());
    match carrier.mode {
        CarrierMode::TwoFrequency => {
            let amp = (2.0 * n_flux).sqrt();
            for (j, t) in grid.times().enumerate() {
                let beat = (carrier.omega_big * t).cos();
                sig.push(n_flux * signal.theta_at(t) * (1.0 + (2.0 * carrier.omega_big * t).cos()));
                noise.push(amp * readout_noise[j] * beat);
            }
        }
        CarrierMode::SingleFrequency => {
            let amp = n_flux.sqrt();
            for (j, t) in grid.times().enumerate() {
                sig.push(n_flux * signal.theta_at(t));
                noise.push(amp * readout_noise[j]);
            }
        }
    }
    let samples = sig.iter().zip(&noise).map(|(a, b)| a + b).collect();
    PhotocurrentTrace {
        grid: *grid,
        samples,
        parts: Some(TraceParts { signal: sig, noise }),
    }
}

/// Exact photocurrent: full complex fields through both beam splitters,
/// output intensities subtracted, no small-angle approximation.
///
/// The bright input is A(t) = sqrt(2N) cos Omega t (or sqrt(N) constant in
/// single-frequency mode). The dark input is assembled from the quadrature
/// records so that the quadrature at angle phi + pi/2 is exactly x1 and the
/// orthogonal one x2; the second splitter applies the phase pi/2 + theta(t).
/// The subtracted intensity collapses to
///     i = sin theta (|A|^2 - |B|^2) - 2 cos theta Im(conj(A) B e^{i phi}),
/// which this routine evaluates directly. At theta = 0 it reduces to
/// A(t) x1(t) with no bias term, matching the linearized noise exactly.
pub fn exact_photocurrent(
    carrier: &CarrierConfig,
    signal: &PhaseSignal,
    field: &SqueezedField,
    grid: &TimeGrid,
) -> PhotocurrentTrace {
    assert_eq!(field.readout.len(), grid.n_samples(), "readout record length");
    assert_eq!(
        field.orthogonal.len(),
        grid.n_samples(),
        "orthogonal record length"
    );
    let n_flux = carrier.photon_flux;
    let dark_rot = Complex64::from_polar(1.0, -(carrier.phi + FRAC_PI_2));
    let readout_rot = Complex64::from_polar(1.0, carrier.phi);
    let samples = grid
        .times()
        .enumerate()
        .map(|(j, t)| {
            let a = match carrier.mode {
                CarrierMode::TwoFrequency => {
                    (2.0 * n_flux).sqrt() * (carrier.omega_big * t).cos()
                }
                CarrierMode::SingleFrequency => n_flux.sqrt(),
            };
            let b = dark_rot
                * Complex64::new(field.readout[j], -field.orthogonal[j])
                * 0.5;
            let theta = signal.theta_at(t);
            let (sin_t, cos_t) = theta.sin_cos();
            sin_t * (a * a - b.norm_sqr()) - 2.0 * cos_t * (a * b * readout_rot).im
        })
        .collect();
    PhotocurrentTrace {
        grid: *grid,
        samples,
        parts: None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{SignalComponent, SqueezingModel};
    use std::f64::consts::TAU;

    fn grid() -> TimeGrid {
        TimeGrid::new(2048.0, 8.0).unwrap()
    }

    fn two_freq_carrier() -> CarrierConfig {
        CarrierConfig {
            photon_flux: 1e6,
            omega_big: TAU * 200.0,
            phi: 0.0,
            mode: CarrierMode::TwoFrequency,
        }
    }

    #[test]
    fn derived_seeds_are_stable_and_distinct() {
        let s = derive_seed(1, 0, STREAM_READOUT);
        assert_eq!(s, derive_seed(1, 0, STREAM_READOUT));
        assert_ne!(s, derive_seed(1, 0, STREAM_ORTHOGONAL));
        assert_ne!(s, derive_seed(1, 1, STREAM_READOUT));
        assert_ne!(s, derive_seed(2, 0, STREAM_READOUT));
    }

    #[test]
    fn noise_record_is_deterministic_in_the_seed() {
        let g = grid();
        let spec = vec![1.0; g.n_bins()];
        let a = synthesize_noise(&spec, &g, 42);
        let b = synthesize_noise(&spec, &g, 42);
        assert_eq!(a, b);
        let c = synthesize_noise(&spec, &g, 43);
        assert_ne!(a, c);
    }

    #[test]
    fn flat_unit_spectrum_gives_variance_equal_to_sample_rate() {
        // Two-sided PSD V = 1 over the full band means Var(x) = V * fs.
        let g = grid();
        let spec = vec![1.0; g.n_bins()];
        let x = synthesize_noise(&spec, &g, 7);
        let mean = x.iter().sum::<f64>() / x.len() as f64;
        let var = x.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / x.len() as f64;
        let fs = g.sample_rate();
        assert!(
            (var / fs - 1.0).abs() < 0.05,
            "variance {var} should be close to sample rate {fs}"
        );
        assert!(mean.abs() < 3.0 * (fs / x.len() as f64).sqrt());
    }

    #[test]
    fn squeezed_field_shares_readout_record_with_direct_synthesis() {
        let g = grid();
        let model = SqueezingModel::flat(0.1, 10.0, 0.0);
        let field = synthesize_squeezed_field(&model, &g, 5);
        let eff = evaluate_effective_spectrum(&model, &g);
        let direct = synthesize_noise(&eff, &g, derive_seed(5, 0, STREAM_READOUT));
        assert_eq!(field.readout, direct);
        assert_ne!(field.readout, field.orthogonal);
    }

    #[test]
    fn linearized_response_at_t0_matches_closed_form() {
        // At t = 0: signal part N * theta * 2 = 2000, noise sqrt(2N) * x1(0).
        let g = grid();
        let carrier = two_freq_carrier();
        let signal = PhaseSignal::new(vec![SignalComponent {
            omega: TAU * 5.0,
            theta: 1e-3,
        }]);
        let mut x1 = vec![0.0; g.n_samples()];
        x1[0] = 0.7;
        let trace = linearized_photocurrent(&carrier, &signal, &x1, &g);
        let parts = trace.parts.as_ref().unwrap();
        assert!((parts.signal[0] - 2000.0).abs() < 1e-9);
        let expected_noise = (2.0f64 * 1e6).sqrt() * 0.7;
        assert!((parts.noise[0] - expected_noise).abs() < 1e-9);
        assert!((trace.samples[0] - (2000.0 + expected_noise)).abs() < 1e-9);
    }

    #[test]
    fn single_frequency_response_has_no_beat_weighting() {
        let g = grid();
        let carrier = CarrierConfig {
            mode: CarrierMode::SingleFrequency,
            ..two_freq_carrier()
        };
        let signal = PhaseSignal::new(vec![SignalComponent {
            omega: TAU * 5.0,
            theta: 1e-3,
        }]);
        let mut x1 = vec![0.0; g.n_samples()];
        x1[0] = 0.7;
        let trace = linearized_photocurrent(&carrier, &signal, &x1, &g);
        let parts = trace.parts.as_ref().unwrap();
        assert!((parts.signal[0] - 1000.0).abs() < 1e-9);
        assert!((parts.noise[0] - 1e3 * 0.7).abs() < 1e-9);
    }

    #[test]
    fn exact_pipeline_equals_linearized_noise_at_zero_signal() {
        let g = grid();
        let carrier = two_freq_carrier();
        let signal = PhaseSignal::default();
        let field = synthesize_squeezed_field(&SqueezingModel::vacuum(), &g, 11);
        let exact = exact_photocurrent(&carrier, &signal, &field, &g);
        let lin = linearized_photocurrent(&carrier, &signal, &field.readout, &g);
        for (a, b) in exact.samples.iter().zip(&lin.samples) {
            assert!(
                (a - b).abs() <= 1e-9 * b.abs().max(1.0),
                "theta = 0 must make the pipelines identical: {a} vs {b}"
            );
        }
    }

    #[test]
    fn exact_pipeline_with_silent_dark_port_is_pure_response() {
        let g = grid();
        let carrier = two_freq_carrier();
        let signal = PhaseSignal::new(vec![SignalComponent {
            omega: TAU * 5.0,
            theta: 1e-3,
        }]);
        let field = SqueezedField {
            readout: vec![0.0; g.n_samples()],
            orthogonal: vec![0.0; g.n_samples()],
        };
        let exact = exact_photocurrent(&carrier, &signal, &field, &g);
        // sin(theta) |A|^2 vs the linearized theta |A|^2: relative error
        // is theta^2/6 ~ 2e-7 at theta = 1e-3.
        for (j, t) in g.times().enumerate() {
            let lin = 1e6 * signal.theta_at(t) * (1.0 + (2.0 * carrier.omega_big * t).cos());
            assert!(
                (exact.samples[j] - lin).abs() <= 1e-6 * lin.abs().max(1e-3),
                "sample {j}: exact {} vs linearized {lin}",
                exact.samples[j]
            );
        }
    }

    #[test]
    fn phi_rotation_leaves_readout_projection_invariant() {
        // The dark-port field is defined relative to phi, so the
        // photocurrent must not depend on phi at all.
        let g = grid();
        let signal = PhaseSignal::default();
        let field = synthesize_squeezed_field(&SqueezingModel::vacuum(), &g, 3);
        let base = exact_photocurrent(&two_freq_carrier(), &signal, &field, &g);
        let rotated_carrier = CarrierConfig {
            phi: 1.234,
            ..two_freq_carrier()
        };
        let rotated = exact_photocurrent(&rotated_carrier, &signal, &field, &g);
        for (a, b) in base.samples.iter().zip(&rotated.samples) {
            assert!((a - b).abs() <= 1e-9 * a.abs().max(1.0));
        }
    }
}
