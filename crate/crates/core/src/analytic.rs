//! Closed-form predictions: noise PSD, band powers, SNR, the deterministic
//! line set, and carrier retuning.
//!
//! All quantities here follow the signed-frequency convention: the
//! deterministic line at the measurement frequency carries power
//! N^2 theta_eff^2 and the one-bin noise power is N dw (V+ + V-) / (4 pi).
//! The spectral estimators fold negative frequencies into one-sided band
//! powers instead, which halves the signal figure and doubles the noise
//! figure; the two conventions therefore differ by exactly [`BRIDGE_K`] in
//! the SNR ratio. The Monte-Carlo estimate is reported raw, next to this
//! constant, rather than silently rescaled.

use crate::model::{
    effective_variance, same_frequency, CarrierConfig, CarrierMode, PhaseSignal, Scenario,
    SignalComponent, SqueezingModel,
};
use crate::{Error, Result};
use std::f64::consts::PI;

/// Exact ratio between the spectral-estimator SNR and the closed-form SNR.
pub const BRIDGE_K: f64 = 0.25;

/// Beat partner frequencies of a measurement frequency: components sitting
/// at w1 + 2 Omega and |w1 - 2 Omega| fold into the w1 bin with half
/// weight.
pub fn beat_partners(omega_big: f64, w1: f64) -> (f64, f64) {
    (w1 + 2.0 * omega_big, (w1 - 2.0 * omega_big).abs())
}

/// Noise floor of the photocurrent PSD at angular frequency omega.
///
/// Two-frequency carrier: (N/2) [V_eff(omega + Omega) + V_eff(|omega - Omega|)];
/// the readout noise rides on cos(Omega t), so the floor at a signal
/// frequency samples the squeezing spectrum at Omega +/- omega.
/// Single-frequency carrier: N V_eff(omega).
pub fn noise_psd(carrier: &CarrierConfig, squeezing: &SqueezingModel, omega: f64) -> f64 {
    match carrier.mode {
        CarrierMode::TwoFrequency => {
            let hi = effective_variance(squeezing, omega + carrier.omega_big);
            let lo = effective_variance(squeezing, (omega - carrier.omega_big).abs());
            0.5 * carrier.photon_flux * (hi + lo)
        }
        CarrierMode::SingleFrequency => {
            carrier.photon_flux * effective_variance(squeezing, omega)
        }
    }
}

/// Noise floor evaluated at every nonnegative grid bin.
pub fn noise_psd_spectrum(
    carrier: &CarrierConfig,
    squeezing: &SqueezingModel,
    grid: &crate::model::TimeGrid,
) -> Vec<f64> {
    (0..grid.n_bins())
        .map(|k| noise_psd(carrier, squeezing, grid.bin_omega(k)))
        .collect()
}

/// Effective amplitude seen at w1 once beat partners fold in:
/// theta(w1) + theta(w1 + 2 Omega)/2 + theta(|w1 - 2 Omega|)/2.
fn effective_amplitude(carrier: &CarrierConfig, signal: &PhaseSignal, w1: f64) -> f64 {
    match carrier.mode {
        CarrierMode::TwoFrequency => {
            let (up, down) = beat_partners(carrier.omega_big, w1);
            signal.amplitude_at(w1)
                + 0.5 * signal.amplitude_at(up)
                + 0.5 * signal.amplitude_at(down)
        }
        CarrierMode::SingleFrequency => signal.amplitude_at(w1),
    }
}

/// Closed-form signal power in the w1 bin, N^2 theta_eff^2.
pub fn signal_band_power(carrier: &CarrierConfig, signal: &PhaseSignal, w1: f64) -> f64 {
    let theta = effective_amplitude(carrier, signal, w1);
    (carrier.photon_flux * theta).powi(2)
}

/// Closed-form noise power in the one-bin band around w1,
/// noise_psd(w1) * dw / (2 pi) with dw = 2 pi / duration.
pub fn noise_band_power(
    carrier: &CarrierConfig,
    squeezing: &SqueezingModel,
    w1: f64,
    duration: f64,
) -> f64 {
    noise_psd(carrier, squeezing, w1) / duration
}

/// Signal components that alias into the w1 bin from the beat partners.
pub fn contamination_terms(
    carrier: &CarrierConfig,
    signal: &PhaseSignal,
    w1: f64,
) -> Vec<SignalComponent> {
    if carrier.mode != CarrierMode::TwoFrequency {
        return Vec::new();
    }
    let (up, down) = beat_partners(carrier.omega_big, w1);
    signal
        .components
        .iter()
        .filter(|c| {
            c.theta > 0.0 && (same_frequency(c.omega, up) || same_frequency(c.omega, down))
        })
        .copied()
        .collect()
}

/// Closed-form single-bin SNR and its ingredients.
#[derive(Debug, Clone, PartialEq)]
pub struct ClosedFormSnr {
    /// Signal-to-noise with beat partners folded into the signal power.
    pub snr: f64,
    /// The same ratio with only the component at w1 in the numerator.
    pub snr_clean: f64,
    pub signal_band_power: f64,
    pub noise_band_power: f64,
    /// Components aliasing in from w1 +/- 2 Omega; empty means clean.
    pub contamination: Vec<SignalComponent>,
}

impl ClosedFormSnr {
    pub fn contaminated(&self) -> bool {
        !self.contamination.is_empty()
    }
}

/// Evaluate the closed-form SNR of a scenario at measurement frequency w1.
///
/// snr = signal_band_power / noise_band_power, which for a two-frequency
/// carrier reduces to 2 N T theta_eff^2 / (V+ + V-). A zero noise power
/// (idealized perfect squeezing at both partner frequencies) yields an
/// infinite SNR, reported as such.
pub fn closed_form_snr(scenario: &Scenario, w1: f64) -> ClosedFormSnr {
    let carrier = scenario.carrier();
    let signal = scenario.signal();
    let p_s = signal_band_power(carrier, signal, w1);
    let p_n = noise_band_power(
        carrier,
        scenario.squeezing(),
        w1,
        scenario.grid().duration(),
    );
    let clean = (carrier.photon_flux * signal.amplitude_at(w1)).powi(2);
    ClosedFormSnr {
        snr: p_s / p_n,
        snr_clean: clean / p_n,
        signal_band_power: p_s,
        noise_band_power: p_n,
        contamination: contamination_terms(carrier, signal, w1),
    }
}

/// One deterministic line of the mean photocurrent PSD.
#[derive(Debug, Clone, PartialEq)]
pub struct PredictedLine {
    pub omega: f64,
    /// Delta-line coefficient in the signed-frequency convention; the
    /// closed-form band power in the line's bin is weight / pi.
    pub weight: f64,
}

/// Deterministic line set of the mean photocurrent PSD.
///
/// A two-frequency carrier maps each signal component at w_s to lines at
/// w_s, w_s + 2 Omega and |w_s - 2 Omega|; cross terms between components
/// separated by exactly 2 Omega or 4 Omega modify the weights, and lines
/// from different components landing on the same frequency merge
/// additively. A single-frequency carrier maps each component to the single
/// line at w_s. Lines come back sorted by frequency.
pub fn predict_lines(carrier: &CarrierConfig, signal: &PhaseSignal) -> Vec<PredictedLine> {
    let n = carrier.photon_flux;
    let mut lines: Vec<PredictedLine> = Vec::new();
    let mut add = |omega: f64, weight: f64| {
        if weight <= 0.0 {
            return;
        }
        if let Some(line) = lines.iter_mut().find(|l| same_frequency(l.omega, omega)) {
            line.weight += weight;
        } else {
            lines.push(PredictedLine { omega, weight });
        }
    };
    match carrier.mode {
        CarrierMode::SingleFrequency => {
            for c in &signal.components {
                add(c.omega, PI * (n * c.theta).powi(2));
            }
        }
        CarrierMode::TwoFrequency => {
            let two_omega = 2.0 * carrier.omega_big;
            let amp = |w: f64| signal.amplitude_at(w);
            for c in &signal.components {
                let w = c.omega;
                let th = c.theta;
                let up = w + two_omega;
                let down = (w - two_omega).abs();
                add(
                    w,
                    (PI * n * n / 2.0) * (2.0 * th * th + th * amp(down) + th * amp(up)),
                );
                add(
                    up,
                    (PI * n * n / 4.0)
                        * (th * th + th * amp(w + 2.0 * two_omega) + 2.0 * th * amp(up)),
                );
                add(
                    down,
                    (PI * n * n / 4.0)
                        * (th * th + th * amp((w - 2.0 * two_omega).abs()) + 2.0 * th * amp(down)),
                );
            }
        }
    }
    lines.sort_by(|a, b| a.omega.partial_cmp(&b.omega).expect("finite frequencies"));
    lines
}

/// One candidate in a retuning ranking.
#[derive(Debug, Clone, PartialEq)]
pub struct RetuneEntry {
    pub omega_big: f64,
    pub snr: f64,
    /// True when some signal component folds into the w1 bin at this
    /// carrier offset.
    pub contaminated: bool,
}

/// Rank candidate carrier offsets for measuring at w1.
///
/// Every candidate is revalidated in place of the current offset (beat
/// commensurability and Nyquist headroom included); any invalid candidate
/// aborts the ranking. Order: uncontaminated candidates first, then
/// descending closed-form SNR, with ties (to 1e-9 relative) broken by the
/// smaller offset.
pub fn retune_omega(
    scenario: &Scenario,
    w1: f64,
    candidates: &[f64],
) -> Result<Vec<RetuneEntry>> {
    if scenario.carrier().mode != CarrierMode::TwoFrequency {
        return Err(Error::InvalidInput(
            "retuning applies to the two-frequency carrier".to_string(),
        ));
    }
    if candidates.is_empty() {
        return Err(Error::InvalidInput(
            "need at least one candidate offset".to_string(),
        ));
    }
    let mut entries = Vec::with_capacity(candidates.len());
    for &omega_big in candidates {
        let carrier = CarrierConfig {
            omega_big,
            ..*scenario.carrier()
        };
        let candidate = crate::model::validate_scenario(
            carrier,
            scenario.signal().clone(),
            scenario.squeezing().clone(),
            *scenario.grid(),
        )
        .map_err(|v| {
            Error::InvalidInput(format!(
                "candidate offset {omega_big} rad is invalid:\n{v}"
            ))
        })?;
        let closed = closed_form_snr(&candidate, w1);
        entries.push(RetuneEntry {
            omega_big,
            snr: closed.snr,
            contaminated: closed.contaminated(),
        });
    }
    entries.sort_by(|a, b| {
        a.contaminated
            .cmp(&b.contaminated)
            .then(b.snr.partial_cmp(&a.snr).unwrap_or(std::cmp::Ordering::Equal))
            .then(a.omega_big.partial_cmp(&b.omega_big).expect("finite offsets"))
    });
    // Near-equal SNRs (and equal infinities) are one tie class; order each
    // class by ascending offset.
    let mut i = 0;
    while i < entries.len() {
        let mut j = i + 1;
        while j < entries.len()
            && entries[j].contaminated == entries[i].contaminated
            && snr_near_equal(entries[i].snr, entries[j].snr)
        {
            j += 1;
        }
        entries[i..j].sort_by(|a, b| {
            a.omega_big
                .partial_cmp(&b.omega_big)
                .expect("finite offsets")
        });
        i = j;
    }
    Ok(entries)
}

fn snr_near_equal(a: f64, b: f64) -> bool {
    a == b || (a - b).abs() <= 1e-9 * a.abs().max(b.abs())
}
