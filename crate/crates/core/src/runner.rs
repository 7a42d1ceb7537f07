//! Command implementations behind the CLI: each takes a validated scenario
//! plus run settings, returns the document for stdout, and writes artifact
//! files when an output directory is set.
//!
//! Realization fan-out happens inside the spectral estimators; everything
//! here reduces in deterministic order and writes files single-threaded,
//! so a fixed config and seed give byte-identical outputs at any worker
//! count.

use std::path::Path;

use crate::analytic::{
    beat_partners, closed_form_snr, predict_lines, retune_omega, BRIDGE_K,
};
use crate::config::{EmitKind, RunSettings};
use crate::model::{
    validate_scenario, CarrierConfig, CarrierMode, Scenario, SqueezingModel,
    TimeGrid,
};
use crate::report;
use crate::spectral::{
    averaged_periodogram, band_power, detect_lines, estimate_snr, local_floor,
    SnrEstimate,
};
use crate::synthesis::{
    derive_seed, linearized_photocurrent, synthesize_noise, STREAM_READOUT,
};
use crate::{Error, Result};

/// What a command hands back: the stdout document plus human notes for
/// stderr.
#[derive(Debug, Clone, PartialEq)]
pub struct CommandOutput {
    pub stdout: String,
    pub notes: Vec<String>,
}

fn write_artifact(dir: &Path, name: &str, content: &str) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    std::fs::write(dir.join(name), content)?;
    Ok(())
}

fn fmt(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.16e}")
    } else {
        "null".to_string()
    }
}

/// Closed forms only; no simulation.
pub fn cmd_analytic(scenario: &Scenario, run: &RunSettings) -> Result<CommandOutput> {
    let closed = closed_form_snr(scenario, run.measure_omega);
    let doc = report::summary_json(&closed, None, run.seed);
    if let Some(dir) = &run.out_dir {
        write_artifact(dir, "summary.json", &doc)?;
    }
    let mut notes: Vec<String> = scenario.warnings().to_vec();
    if closed.noise_band_power == 0.0 {
        notes.push(
            "noise band power is zero (perfect squeezing at both sidebands): SNR is infinite"
                .to_string(),
        );
    }
    Ok(CommandOutput { stdout: doc, notes })
}

/// Ensemble-averaged PSD of full (signal + noise) records.
fn mean_total_psd(scenario: &Scenario, n_realizations: usize, seed: u64) -> Vec<f64> {
    let grid = scenario.grid();
    let eff = crate::model::evaluate_effective_spectrum(scenario.squeezing(), grid);
    averaged_periodogram(grid, n_realizations, |r| {
        let x1 = synthesize_noise(&eff, grid, derive_seed(seed, r as u64, STREAM_READOUT));
        linearized_photocurrent(scenario.carrier(), scenario.signal(), &x1, grid).samples
    })
}

/// Monte-Carlo SNR estimation plus optional spectrum/trace artifacts.
///
/// By default the signal power comes from the deterministic signal part
/// and the noise power from the noise-only ensemble average; with
/// `combined` both are taken from the full signal + noise spectrum the way
/// an experimenter would, the floor at the measurement bin estimated from
/// its 16 nearest neighbors and subtracted.
pub fn cmd_simulate(
    scenario: &Scenario,
    run: &RunSettings,
    combined: bool,
) -> Result<CommandOutput> {
    let grid = scenario.grid();
    let w1 = run.measure_omega;
    let closed = closed_form_snr(scenario, w1);

    let need_total = combined || run.emit.contains(&EmitKind::Spectrum);
    let total_psd = if need_total {
        Some(mean_total_psd(scenario, run.realizations, run.seed))
    } else {
        None
    };

    let estimate = if combined {
        let psd = total_psd.as_ref().expect("combined mode computed the total");
        let k = grid.bin_index(w1)?;
        if k == 0 || k + 1 >= grid.n_bins() {
            return Err(Error::InvalidInput(format!(
                "measurement frequency {w1} rad must lie strictly between DC and Nyquist"
            )));
        }
        let floor = local_floor(psd, grid, k);
        let total = band_power(psd, grid, w1)?;
        SnrEstimate {
            snr: (total - floor) / floor,
            signal_band_power: total - floor,
            noise_band_power: floor,
            n_realizations: run.realizations,
        }
    } else {
        estimate_snr(scenario, w1, run.realizations, run.seed)?
    };

    let doc = report::summary_json(&closed, Some(&estimate), run.seed);
    if let Some(dir) = &run.out_dir {
        write_artifact(dir, "summary.json", &doc)?;
        if let Some(psd) = &total_psd {
            if run.emit.contains(&EmitKind::Spectrum) {
                write_artifact(
                    dir,
                    "spectrum.csv",
                    &report::spectrum_csv(grid, psd, run.realizations),
                )?;
            }
        }
        if run.emit.contains(&EmitKind::Trace) {
            let eff = crate::model::evaluate_effective_spectrum(scenario.squeezing(), grid);
            let x1 = synthesize_noise(&eff, grid, derive_seed(run.seed, 0, STREAM_READOUT));
            let trace = linearized_photocurrent(scenario.carrier(), scenario.signal(), &x1, grid);
            write_artifact(dir, "trace.csv", &report::trace_csv(&trace))?;
        }
    }

    let mut notes: Vec<String> = scenario.warnings().to_vec();
    if closed.snr.is_finite() && closed.snr > 0.0 && estimate.snr.is_finite() {
        let deviation = (estimate.snr / BRIDGE_K - closed.snr).abs() / closed.snr;
        notes.push(format!(
            "snr_est / bridge_k deviates from the closed form by {:.2}%",
            100.0 * deviation
        ));
    }
    if closed.noise_band_power == 0.0 {
        notes.push(
            "noise band power is zero (perfect squeezing at both sidebands): SNR is infinite"
                .to_string(),
        );
    }
    Ok(CommandOutput { stdout: doc, notes })
}

/// One detected line plus its hazard classification.
#[derive(Debug, Clone, PartialEq)]
pub struct DiagnoseReport {
    pub lines: Vec<crate::spectral::SpectralLine>,
    /// Frequencies of detected lines sitting at w1 +/- 2 Omega.
    pub hazards: Vec<f64>,
}

/// Single-frequency diagnostic: rerun the scenario with one carrier at the
/// same flux, scan the averaged spectrum for lines, flag beat partners.
///
/// The carrier mode is forced to single-frequency no matter what the
/// config says; Omega is kept so the hazard frequencies w1 +/- 2 Omega are
/// known. A detected line within half a bin of either partner frequency is
/// flagged: it would fold into the w1 measurement once the two-frequency
/// carrier is switched back on.
pub fn cmd_diagnose(scenario: &Scenario, run: &RunSettings) -> Result<CommandOutput> {
    let carrier = CarrierConfig {
        mode: CarrierMode::SingleFrequency,
        ..*scenario.carrier()
    };
    let scenario = validate_scenario(
        carrier,
        scenario.signal().clone(),
        scenario.squeezing().clone(),
        *scenario.grid(),
    )
    .map_err(Error::Validation)?;
    let grid = scenario.grid();
    let psd = mean_total_psd(&scenario, run.realizations, run.seed);
    let lines = detect_lines(&psd, grid, run.detect_threshold);

    let (up, down) = beat_partners(carrier.omega_big, run.measure_omega);
    let half_bin = 0.5 * grid.delta_omega();
    let hazards: Vec<f64> = lines
        .iter()
        .map(|l| l.omega)
        .filter(|&w| (w - up).abs() < half_bin || (w - down).abs() < half_bin)
        .collect();

    let line_docs: Vec<String> = lines
        .iter()
        .map(|l| {
            format!(
                "{{\"omega\": {}, \"band_power\": {}, \"floor\": {}, \"ratio\": {}}}",
                fmt(l.omega),
                fmt(l.band_power),
                fmt(l.floor),
                fmt(l.ratio)
            )
        })
        .collect();
    let hazard_docs: Vec<String> = hazards.iter().map(|&w| fmt(w)).collect();
    let doc = format!(
        "{{\n  \"mode\": \"single-frequency\",\n  \"measure_omega\": {},\n  \
         \"threshold\": {},\n  \"lines\": [{}],\n  \"hazards\": [{}],\n  \
         \"hazard\": {},\n  \"seed\": {},\n  \"n_realizations\": {}\n}}\n",
        fmt(run.measure_omega),
        fmt(run.detect_threshold),
        line_docs.join(", "),
        hazard_docs.join(", "),
        !hazards.is_empty(),
        run.seed,
        run.realizations,
    );

    if let Some(dir) = &run.out_dir {
        write_artifact(dir, "lines.csv", &report::lines_csv(&lines, grid))?;
        if run.emit.contains(&EmitKind::Spectrum) {
            write_artifact(
                dir,
                "spectrum.csv",
                &report::spectrum_csv(grid, &psd, run.realizations),
            )?;
        }
    }

    let mut notes: Vec<String> = scenario.warnings().to_vec();
    notes.push(format!(
        "detected {} line(s); {} hazard(s) at the beat partner frequencies",
        lines.len(),
        hazards.len()
    ));
    Ok(CommandOutput { stdout: doc, notes })
}

/// Rank candidate carrier offsets; stdout is the ranking CSV itself.
pub fn cmd_retune(
    scenario: &Scenario,
    run: &RunSettings,
    candidates: &[f64],
) -> Result<CommandOutput> {
    let entries = retune_omega(scenario, run.measure_omega, candidates)?;
    let doc = report::ranking_csv(&entries);
    if let Some(dir) = &run.out_dir {
        write_artifact(dir, "ranking.csv", &doc)?;
    }
    let mut notes: Vec<String> = scenario.warnings().to_vec();
    let best = &entries[0];
    notes.push(format!(
        "best candidate: {} rad ({}), closed-form SNR {}",
        best.omega_big,
        if best.contaminated {
            "contaminated"
        } else {
            "clean"
        },
        best.snr
    ));
    Ok(CommandOutput { stdout: doc, notes })
}

/// Parameter axes a sweep can walk.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepAxis {
    /// Flat squeezing variance; the antisqueezed side is set to its
    /// reciprocal (or the value itself above 1), mismatch 0.
    FlatVariance,
    /// Amplitude of the component at the measurement frequency.
    ThetaW1,
    PhotonFlux,
    Duration,
    MismatchAngle,
}

impl SweepAxis {
    pub fn parse(s: &str) -> Result<Self> {
        Ok(match s {
            "v_flat" | "V" => SweepAxis::FlatVariance,
            "theta_w1" => SweepAxis::ThetaW1,
            "photon_flux" | "N" => SweepAxis::PhotonFlux,
            "duration" | "T" => SweepAxis::Duration,
            "mismatch" | "mismatch_angle" => SweepAxis::MismatchAngle,
            other => {
                return Err(Error::InvalidInput(format!(
                    "unknown sweep axis {other:?}; expected one of \
                     v_flat, theta_w1, photon_flux, duration, mismatch"
                )))
            }
        })
    }
}

fn apply_axis_at(
    scenario: &Scenario,
    measure_omega: f64,
    axis: SweepAxis,
    value: f64,
) -> Result<Scenario> {
    let mut carrier = *scenario.carrier();
    let mut signal = scenario.signal().clone();
    let mut squeezing = scenario.squeezing().clone();
    let mut grid = *scenario.grid();
    match axis {
        SweepAxis::FlatVariance => {
            if !(value > 0.0) {
                return Err(Error::InvalidInput(format!(
                    "flat squeezing variance must be positive, got {value}"
                )));
            }
            squeezing = SqueezingModel::flat(value, (1.0 / value).max(value), 0.0);
        }
        SweepAxis::ThetaW1 => {
            let at_w1 = signal
                .components
                .iter()
                .position(|c| crate::model::same_frequency(c.omega, measure_omega))
                .ok_or_else(|| {
                    Error::InvalidInput(
                        "theta_w1 sweep needs a signal component at the measurement frequency"
                            .to_string(),
                    )
                })?;
            signal.components[at_w1].theta = value;
        }
        SweepAxis::PhotonFlux => carrier.photon_flux = value,
        SweepAxis::Duration => grid = TimeGrid::new(grid.sample_rate(), value)?,
        SweepAxis::MismatchAngle => squeezing.mismatch_angle = value,
    }
    validate_scenario(carrier, signal, squeezing, grid).map_err(Error::Validation)
}

/// Closed-form (and optionally Monte-Carlo) SNR at each value of one
/// parameter axis.
pub fn cmd_sweep(
    scenario: &Scenario,
    run: &RunSettings,
    axis: SweepAxis,
    values: &[f64],
    with_estimate: bool,
) -> Result<CommandOutput> {
    if values.is_empty() {
        return Err(Error::InvalidInput(
            "sweep needs at least one value".to_string(),
        ));
    }
    let mut rows = Vec::with_capacity(values.len());
    for &value in values {
        let point = apply_axis_at(scenario, run.measure_omega, axis, value)?;
        let closed = closed_form_snr(&point, run.measure_omega);
        let snr_est = if with_estimate {
            Some(estimate_snr(&point, run.measure_omega, run.realizations, run.seed)?.snr)
        } else {
            None
        };
        rows.push(report::SweepRow {
            value,
            snr: closed.snr,
            snr_est,
        });
    }
    let doc = report::sweep_csv(&rows);
    if let Some(dir) = &run.out_dir {
        write_artifact(dir, "sweep.csv", &doc)?;
    }
    Ok(CommandOutput {
        stdout: doc,
        notes: scenario.warnings().to_vec(),
    })
}

/// Deterministic line positions the two-frequency run will place in its
/// spectrum; exposed for examples and tests.
pub fn predicted_line_set(scenario: &Scenario) -> Vec<crate::analytic::PredictedLine> {
    predict_lines(scenario.carrier(), scenario.signal())
}
