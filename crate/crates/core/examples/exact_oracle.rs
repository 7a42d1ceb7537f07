//! Exact beam-splitter pipeline against the linearized response: the
//! linearized photocurrent drops terms quadratic in the small quantities
//! (theta and the dark-port amplitude), so the two agree at the signal
//! bins to better than a percent for theta <= 1e-2 and diverge as theta
//! grows.
//!
//!     cargo run --example exact_oracle

use std::f64::consts::TAU;
use twofreq::spectral::{band_power, periodogram};
use twofreq::synthesis::{
    exact_photocurrent, linearized_photocurrent, synthesize_squeezed_field,
};
use twofreq::{CarrierConfig, CarrierMode, PhaseSignal, SignalComponent, SqueezingModel, TimeGrid};

fn main() {
    let grid = TimeGrid::new(2048.0, 8.0).expect("power-of-two grid");
    let w1 = TAU * 5.0;
    let squeezing = SqueezingModel::vacuum();

    println!(
        "{:>10} {:>10} {:>16} {:>16} {:>12} {:>14}",
        "theta", "N", "bp exact", "bp linearized", "bp ratio", "residual rms"
    );
    for &(theta, n_flux) in &[
        (1e-4, 1e6),
        (1e-3, 1e6),
        (1e-2, 1e6),
        (1e-2, 1e4),
        (1e-1, 1e6),
    ] {
        let carrier = CarrierConfig {
            photon_flux: n_flux,
            omega_big: TAU * 200.0,
            phi: 0.0,
            mode: CarrierMode::TwoFrequency,
        };
        let signal = PhaseSignal::new(vec![SignalComponent {
            omega: w1,
            theta,
        }]);
        let field = synthesize_squeezed_field(&squeezing, &grid, 1);
        let exact = exact_photocurrent(&carrier, &signal, &field, &grid);
        let lin = linearized_photocurrent(&carrier, &signal, &field.readout, &grid);

        let bp_exact = band_power(&periodogram(&exact.samples, &grid), &grid, w1)
            .expect("w1 is on-bin");
        let bp_lin = band_power(&periodogram(&lin.samples, &grid), &grid, w1)
            .expect("w1 is on-bin");

        let n = grid.n_samples() as f64;
        let rms_lin = (lin.samples.iter().map(|v| v * v).sum::<f64>() / n).sqrt();
        let rms_res = (exact
            .samples
            .iter()
            .zip(&lin.samples)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            / n)
            .sqrt();

        println!(
            "{theta:>10.0e} {n_flux:>10.0e} {bp_exact:>16.8e} {bp_lin:>16.8e} {:>12.6} {:>13.4}%",
            bp_exact / bp_lin,
            100.0 * rms_res / rms_lin
        );
    }

    println!(
        "\nat theta = 0.1 the scenario is outside the validated small-signal\n\
         regime (validation would warn above 0.05 and reject above 0.3);\n\
         the pipelines are compared raw here to show the trend."
    );
}
