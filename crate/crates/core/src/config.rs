//! TOML configuration: file schema, unit conversion and defaults.
//!
//! Config files state frequencies in cycles per unit time because that is
//! how bench parameters are written down; everything behind
//! [`load_config`] works in angular frequency. One file fully determines a
//! run: the physical scenario plus run settings (realizations, seed,
//! measurement frequency, detection threshold, artifact selection).

use serde::Deserialize;
use std::f64::consts::TAU;
use std::path::{Path, PathBuf};

use crate::model::{
    validate_scenario, CarrierConfig, CarrierMode, PhaseSignal, Scenario, SignalComponent,
    SpectrumFn, SqueezingModel, TimeGrid,
};
use crate::{Error, Result};

/// Artifacts a run can write beyond its summary.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EmitKind {
    /// Ensemble-averaged photocurrent PSD, one row per bin.
    Spectrum,
    /// Time-domain record of realization 0.
    Trace,
}

impl EmitKind {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "spectrum" => Ok(EmitKind::Spectrum),
            "trace" => Ok(EmitKind::Trace),
            other => Err(Error::Config(format!(
                "unknown emit kind {other:?}; expected \"spectrum\" or \"trace\""
            ))),
        }
    }
}

/// Run settings resolved from the `[run]` table and its defaults.
#[derive(Debug, Clone, PartialEq)]
pub struct RunSettings {
    pub realizations: usize,
    pub seed: u64,
    /// Measurement frequency, rad; defaults to the first signal component.
    pub measure_omega: f64,
    pub detect_threshold: f64,
    pub emit: Vec<EmitKind>,
    pub out_dir: Option<PathBuf>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    carrier: CarrierSpec,
    #[serde(default)]
    signal: SignalSpec,
    squeezing: Option<SqueezingSpec>,
    grid: GridSpec,
    #[serde(default)]
    run: RunSpec,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct CarrierSpec {
    photon_flux: f64,
    /// Carrier offset Omega, cycles.
    omega: f64,
    #[serde(default)]
    phi: f64,
    #[serde(default)]
    mode: ModeSpec,
}

#[derive(Debug, Clone, Copy, Default, Deserialize)]
#[serde(rename_all = "kebab-case")]
enum ModeSpec {
    #[default]
    TwoFrequency,
    SingleFrequency,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct SignalSpec {
    #[serde(default)]
    components: Vec<ComponentSpec>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ComponentSpec {
    /// Cycles.
    frequency: f64,
    /// Radians of phase.
    amplitude: f64,
}

#[derive(Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
enum SqueezingSpec {
    Vacuum,
    Flat {
        v_min: f64,
        v_max: Option<f64>,
        #[serde(default)]
        mismatch: f64,
    },
    Tabulated {
        /// Rows of [frequency_cycles, variance].
        v_min: Vec<(f64, f64)>,
        v_max: Vec<(f64, f64)>,
        #[serde(default)]
        mismatch: f64,
    },
    LorentzianOpo {
        eta: f64,
        pump: f64,
        /// Cavity half-width, cycles.
        gamma: f64,
        #[serde(default)]
        mismatch: f64,
    },
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct GridSpec {
    sample_rate: f64,
    duration: f64,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RunSpec {
    realizations: Option<usize>,
    seed: Option<u64>,
    /// Cycles; defaults to the first signal component.
    measure: Option<f64>,
    detect_threshold: Option<f64>,
    emit: Option<Vec<String>>,
    out_dir: Option<String>,
}

fn table_to_spectrum(rows: &[(f64, f64)]) -> SpectrumFn {
    SpectrumFn::Tabulated {
        points: rows.iter().map(|&(f, v)| (TAU * f, v)).collect(),
    }
}

fn build_squeezing(spec: Option<SqueezingSpec>) -> Result<SqueezingModel> {
    Ok(match spec {
        None | Some(SqueezingSpec::Vacuum) => SqueezingModel::vacuum(),
        Some(SqueezingSpec::Flat {
            v_min,
            v_max,
            mismatch,
        }) => {
            let v_max = match v_max {
                Some(v) => v,
                None if v_min > 0.0 => (1.0 / v_min).max(v_min),
                None => {
                    return Err(Error::Config(
                        "squeezing.v_max is required when v_min is 0".to_string(),
                    ))
                }
            };
            SqueezingModel::flat(v_min, v_max, mismatch)
        }
        Some(SqueezingSpec::Tabulated {
            v_min,
            v_max,
            mismatch,
        }) => SqueezingModel {
            v_min: table_to_spectrum(&v_min),
            v_max: table_to_spectrum(&v_max),
            mismatch_angle: mismatch,
        },
        Some(SqueezingSpec::LorentzianOpo {
            eta,
            pump,
            gamma,
            mismatch,
        }) => SqueezingModel::lorentzian_opo(eta, pump, TAU * gamma, mismatch),
    })
}

/// Parse a config document and validate the scenario it describes.
pub fn parse_config(text: &str) -> Result<(Scenario, RunSettings)> {
    let file: FileConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;

    let carrier = CarrierConfig {
        photon_flux: file.carrier.photon_flux,
        omega_big: TAU * file.carrier.omega,
        phi: file.carrier.phi,
        mode: match file.carrier.mode {
            ModeSpec::TwoFrequency => CarrierMode::TwoFrequency,
            ModeSpec::SingleFrequency => CarrierMode::SingleFrequency,
        },
    };
    let signal = PhaseSignal::new(
        file.signal
            .components
            .iter()
            .map(|c| SignalComponent {
                omega: TAU * c.frequency,
                theta: c.amplitude,
            })
            .collect(),
    );
    let squeezing = build_squeezing(file.squeezing)?;
    let grid = TimeGrid::new(file.grid.sample_rate, file.grid.duration)?;

    let measure_omega = match file.run.measure {
        Some(cycles) => TAU * cycles,
        None => {
            signal
                .components
                .first()
                .ok_or_else(|| {
                    Error::Config(
                        "run.measure is required when the signal has no components".to_string(),
                    )
                })?
                .omega
        }
    };
    let emit = file
        .run
        .emit
        .unwrap_or_default()
        .iter()
        .map(|s| EmitKind::parse(s))
        .collect::<Result<Vec<_>>>()?;

    let scenario = validate_scenario(carrier, signal, squeezing, grid).map_err(Error::Validation)?;
    let run = RunSettings {
        realizations: file.run.realizations.unwrap_or(500),
        seed: file.run.seed.unwrap_or(1),
        measure_omega,
        detect_threshold: file.run.detect_threshold.unwrap_or(5.0),
        emit,
        out_dir: file.run.out_dir.map(PathBuf::from),
    };
    Ok((scenario, run))
}

/// Read and parse a config file. An unreadable path is a config error
/// (exit 2), not a runtime failure.
pub fn load_config(path: &Path) -> Result<(Scenario, RunSettings)> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
    parse_config(&text).map_err(|e| match e {
        Error::Config(msg) => Error::Config(format!("{}: {msg}", path.display())),
        other => other,
    })
}
