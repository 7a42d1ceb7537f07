//! Spectral estimation: periodograms, band powers, ensemble averages and
//! line detection.
//!
//! Convention: `psd[k] = dt^2 |DFT_k|^2 / T`, a two-sided power spectral
//! density sampled at the nonnegative bins k = 0..n/2. A unit-amplitude
//! on-bin cosine gives psd = T/4 at its bin, and a band power (which folds
//! the mirror bin in) of 1/2, the familiar a^2/2. Records are rectangular
//! windowed; scenario validation guarantees every deliberate tone sits
//! exactly on a bin, so leakage never enters.
//!
//! Two routes to the same density exist on purpose: [`periodogram`] squares
//! the DFT directly, [`wiener_khinchine_psd`] transforms the time-domain
//! circular autocorrelation. They agree bin for bin to rounding error and
//! are checked against each other rather than collapsed into one.

use rayon::prelude::*;

use crate::fft;
use crate::model::{evaluate_effective_spectrum, PhaseSignal, Scenario, TimeGrid};
use crate::synthesis::{derive_seed, linearized_photocurrent, synthesize_noise, STREAM_READOUT};
use crate::{Error, Result};

/// Two-sided PSD estimate of one record: dt^2 |DFT_k|^2 / T per
/// nonnegative bin.
pub fn periodogram(trace: &[f64], grid: &TimeGrid) -> Vec<f64> {
    let n = grid.n_samples();
    assert_eq!(trace.len(), n, "record length must match the grid");
    let spectrum = fft::real_dft(trace);
    let scale = grid.dt() * grid.dt() / grid.duration();
    (0..grid.n_bins())
        .map(|k| scale * spectrum[k].norm_sqr())
        .collect()
}

/// The same density via the autocorrelation theorem.
///
/// The circular autocorrelation R_m = (1/n) sum_j x_j x_{j-m} is computed
/// directly in the time domain (O(n^2), parallel over lags), then
/// transformed: psd_k = dt Re DFT(R)_k. Algebraically identical to
/// [`periodogram`]; kept as an independent cross-check route. Tiny negative
/// rounding residues are clamped to zero.
pub fn wiener_khinchine_psd(trace: &[f64], grid: &TimeGrid) -> Vec<f64> {
    let n = grid.n_samples();
    assert_eq!(trace.len(), n, "record length must match the grid");
    let autocorr: Vec<f64> = (0..n)
        .into_par_iter()
        .map(|m| {
            let mut s = 0.0;
            for j in 0..n {
                s += trace[j] * trace[(j + n - m) % n];
            }
            s / n as f64
        })
        .collect();
    let spectrum = fft::real_dft(&autocorr);
    (0..grid.n_bins())
        .map(|k| (grid.dt() * spectrum[k].re).max(0.0))
        .collect()
}

/// Power in the one-bin band around an on-bin center: 2 psd_k / T, the
/// mirror bin folded in. The center must lie strictly between DC and
/// Nyquist.
pub fn band_power(psd: &[f64], grid: &TimeGrid, center_omega: f64) -> Result<f64> {
    let k = grid.bin_index(center_omega)?;
    if k == 0 || k + 1 >= grid.n_bins() {
        return Err(Error::InvalidInput(format!(
            "band center {center_omega} rad must lie strictly between DC and Nyquist"
        )));
    }
    Ok(band_power_at_bin(psd, grid, k))
}

/// Band power of one interior bin without the on-bin lookup.
pub fn band_power_at_bin(psd: &[f64], grid: &TimeGrid, k: usize) -> f64 {
    2.0 * psd[k] / grid.duration()
}

/// Mean square of the record reconstructed from its PSD: DC and Nyquist
/// count once, interior bins twice. Equals (1/n) sum x^2 exactly.
pub fn mean_square_from_psd(psd: &[f64], grid: &TimeGrid) -> f64 {
    let last = psd.len() - 1;
    let interior: f64 = psd[1..last].iter().sum();
    (psd[0] + psd[last] + 2.0 * interior) / grid.duration()
}

/// Ensemble-averaged periodogram over `n_realizations` records produced by
/// `make_trace(r)`.
///
/// Realizations are grouped into fixed batches of 32; batches run in
/// parallel but are reduced in index order with sequential sums inside each
/// batch, so the result is bit-identical for any worker count.
pub fn averaged_periodogram<F>(grid: &TimeGrid, n_realizations: usize, make_trace: F) -> Vec<f64>
where
    F: Fn(usize) -> Vec<f64> + Sync,
{
    assert!(n_realizations > 0, "need at least one realization");
    const BATCH: usize = 32;
    let n_bins = grid.n_bins();
    let n_batches = n_realizations.div_ceil(BATCH);
    let partials: Vec<Vec<f64>> = (0..n_batches)
        .into_par_iter()
        .map(|b| {
            let mut acc = vec![0.0; n_bins];
            for r in b * BATCH..((b + 1) * BATCH).min(n_realizations) {
                let psd = periodogram(&make_trace(r), grid);
                for (a, p) in acc.iter_mut().zip(&psd) {
                    *a += p;
                }
            }
            acc
        })
        .collect();
    let mut total = vec![0.0; n_bins];
    for part in &partials {
        for (t, p) in total.iter_mut().zip(part) {
            *t += p;
        }
    }
    for t in &mut total {
        *t /= n_realizations as f64;
    }
    total
}

/// Monte-Carlo estimate of the single-bin SNR and its ingredients.
///
/// Both band powers follow the one-sided estimator convention of this
/// module; the closed forms use the signed-frequency convention instead,
/// so this estimate sits a fixed factor below them (see
/// [`crate::analytic::BRIDGE_K`]).
#[derive(Debug, Clone, PartialEq)]
pub struct SnrEstimate {
    pub snr: f64,
    /// Band power at w1 of the deterministic response (one record, exact).
    pub signal_band_power: f64,
    /// Band power at w1 of the ensemble-averaged noise PSD.
    pub noise_band_power: f64,
    pub n_realizations: usize,
}

/// Estimate the single-bin SNR at w1 from simulated records.
///
/// The deterministic response needs no averaging and is measured from one
/// noiseless record; the noise floor is the band power of the periodogram
/// averaged over `n_realizations` independent noise records. Realization r
/// draws its readout noise with child seed (seed, r, STREAM_READOUT), so
/// the estimate is a pure function of the arguments.
pub fn estimate_snr(
    scenario: &Scenario,
    w1: f64,
    n_realizations: usize,
    seed: u64,
) -> Result<SnrEstimate> {
    let grid = scenario.grid();
    let carrier = scenario.carrier();
    let silent = vec![0.0; grid.n_samples()];
    let response = linearized_photocurrent(carrier, scenario.signal(), &silent, grid);
    let p_signal = band_power(&periodogram(&response.samples, grid), grid, w1)?;

    let eff = evaluate_effective_spectrum(scenario.squeezing(), grid);
    let quiet = PhaseSignal::default();
    let mean_psd = averaged_periodogram(grid, n_realizations, |r| {
        let x1 = synthesize_noise(&eff, grid, derive_seed(seed, r as u64, STREAM_READOUT));
        linearized_photocurrent(carrier, &quiet, &x1, grid).samples
    });
    let p_noise = band_power(&mean_psd, grid, w1)?;

    Ok(SnrEstimate {
        snr: p_signal / p_noise,
        signal_band_power: p_signal,
        noise_band_power: p_noise,
        n_realizations,
    })
}

/// A bin whose band power stands clear of its local noise floor.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralLine {
    pub bin: usize,
    pub omega: f64,
    pub band_power: f64,
    /// Median band power of the 16 nearest interior neighbors.
    pub floor: f64,
    /// band_power / floor; infinite when the floor is zero.
    pub ratio: f64,
}

/// Find interior bins whose band power exceeds `threshold` times the local
/// floor.
///
/// The floor for bin k is the median band power of its 16 nearest interior
/// neighbors, gathered by walking outward one bin at a time alternating
/// sides and skipping k itself; near the band edges the walk continues on
/// the open side. The median of an even count is the mean of the middle
/// two. Lines are returned in ascending bin order.
pub fn detect_lines(psd: &[f64], grid: &TimeGrid, threshold: f64) -> Vec<SpectralLine> {
    assert!(threshold > 0.0, "threshold must be positive");
    let n_bins = psd.len();
    if n_bins < 4 {
        return Vec::new();
    }
    let bp: Vec<f64> = (0..n_bins)
        .map(|k| band_power_at_bin(psd, grid, k))
        .collect();
    let lo = 1;
    let hi = n_bins - 2;
    let mut lines = Vec::new();
    for k in lo..=hi {
        let floor = neighbor_median(&bp, k, lo, hi, 16);
        let value = bp[k];
        let ratio = if floor > 0.0 {
            value / floor
        } else if value > 0.0 {
            f64::INFINITY
        } else {
            continue;
        };
        if ratio > threshold {
            lines.push(SpectralLine {
                bin: k,
                omega: grid.bin_omega(k),
                band_power: value,
                floor,
                ratio,
            });
        }
    }
    lines
}

/// Local noise-floor estimate at interior bin k: the median band power of
/// its 16 nearest interior neighbors, the same statistic line detection
/// uses.
pub fn local_floor(psd: &[f64], grid: &TimeGrid, k: usize) -> f64 {
    let n_bins = psd.len();
    assert!(k > 0 && k + 1 < n_bins, "floor is defined on interior bins");
    let bp: Vec<f64> = (0..n_bins)
        .map(|i| band_power_at_bin(psd, grid, i))
        .collect();
    neighbor_median(&bp, k, 1, n_bins - 2, 16)
}

fn neighbor_median(values: &[f64], k: usize, lo: usize, hi: usize, want: usize) -> f64 {
    let mut picked = Vec::with_capacity(want);
    let mut step = 1usize;
    while picked.len() < want {
        let left = k.checked_sub(step).filter(|&i| i >= lo);
        let right = Some(k + step).filter(|&i| i <= hi);
        if left.is_none() && right.is_none() {
            break;
        }
        if let Some(i) = left {
            picked.push(values[i]);
        }
        if picked.len() < want {
            if let Some(i) = right {
                picked.push(values[i]);
            }
        }
        step += 1;
    }
    if picked.is_empty() {
        return 0.0;
    }
    picked.sort_by(|a, b| a.partial_cmp(b).expect("band powers are finite"));
    let m = picked.len();
    if m % 2 == 1 {
        picked[m / 2]
    } else {
        0.5 * (picked[m / 2 - 1] + picked[m / 2])
    }
}
