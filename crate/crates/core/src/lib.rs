//! Two-frequency interferometer readout with a squeezed dark port.
//!
//! A Mach-Zehnder interferometer driven by a pair of carriers at +/- Omega
//! around the optical center frequency converts a slow phase modulation
//! theta(t) into a photocurrent line at the modulation frequency, while the
//! quantum noise entering the dark port is sampled at the sidebands of
//! +/- Omega. Squeezing that port at high frequency therefore improves a
//! low-frequency phase measurement.
//!
//! The crate has four layers:
//!
//! * [`model`]: scenario description (carriers, phase signal, squeezing
//!   spectrum, time grid) and validation.
//! * [`synthesis`]: time-domain realizations: colored Gaussian quadrature
//!   noise, the deterministic beat-modulated signal term, a linearized
//!   photocurrent and an exact bilinear one.
//! * [`spectral`]: periodogram / autocorrelation PSD estimates in the
//!   finite-record convention, band powers, Monte-Carlo SNR estimation.
//! * [`analytic`]: closed-form line weights, noise PSD, band powers, SNR,
//!   contamination detection and carrier-offset retuning.
//!
//! [`config`] and [`runner`] wrap these into config-file driven commands;
//! the `twofreq` binary is a thin CLI over [`runner`]. Each major
//! capability also has a runnable example under `examples/`.

pub mod analytic;
pub mod config;
pub mod model;
pub mod report;
pub mod runner;
pub mod spectral;
pub mod synthesis;

mod fft;

pub use model::{
    effective_variance, photon_flux_from_power, validate_scenario, CarrierConfig, CarrierMode,
    PhaseSignal, PhotocurrentTrace, Scenario, SignalComponent, SpectrumFn, SqueezingModel,
    TimeGrid, Violation, Violations,
};

/// Crate-wide error type.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// One or more scenario invariants are violated.
    #[error("invalid scenario:\n{0}")]
    Validation(Violations),
    /// An operation was called with arguments outside its contract.
    #[error("{0}")]
    InvalidInput(String),
    /// Config file could not be read or parsed.
    #[error("config error: {0}")]
    Config(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Process exit code for the CLI: 2 for bad input, 3 for runtime failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Validation(_) | Error::InvalidInput(_) | Error::Config(_) => 2,
            Error::Io(_) => 3,
        }
    }
}
