//! Monte-Carlo SNR estimation next to the closed form, demonstrating the
//! fixed convention bridge between the two.
//!
//! The closed forms count signal power on signed frequencies and take the
//! noise in a single signed bin; the estimator folds mirror bins into
//! one-sided band powers. The SNR ratio between the conventions is exactly
//! BRIDGE_K = 1/4, so estimate/closed-form hovers there with Monte-Carlo
//! scatter shrinking as 1/sqrt(M).
//!
//!     cargo run --example monte_carlo_snr

use std::f64::consts::TAU;
use twofreq::analytic::{closed_form_snr, BRIDGE_K};
use twofreq::spectral::estimate_snr;
use twofreq::{
    validate_scenario, CarrierConfig, CarrierMode, PhaseSignal, SignalComponent, SqueezingModel,
    TimeGrid,
};

fn main() {
    let carrier = CarrierConfig {
        photon_flux: 1e6,
        omega_big: TAU * 200.0,
        phi: 0.0,
        mode: CarrierMode::TwoFrequency,
    };
    let signal = PhaseSignal::new(vec![SignalComponent {
        omega: TAU * 5.0,
        theta: 1e-3,
    }]);
    let grid = TimeGrid::new(2048.0, 8.0).expect("power-of-two grid");
    let scenario = validate_scenario(carrier, signal, SqueezingModel::vacuum(), grid)
        .expect("reference scenario is valid");
    let w1 = TAU * 5.0;

    let closed = closed_form_snr(&scenario, w1);
    println!("closed form: snr = {}, p_s = {:.4e}, p_n = {:.4e}\n", closed.snr,
        closed.signal_band_power, closed.noise_band_power);

    println!("{:>6} {:>12} {:>12} {:>22}", "M", "snr_est", "est/closed", "deviation from 1/4");
    for m in [50, 200, 500, 2000] {
        let est = estimate_snr(&scenario, w1, m, 1).expect("on-bin measurement");
        let ratio = est.snr / closed.snr;
        println!(
            "{m:>6} {:>12.5} {:>12.5} {:>21.2}%",
            est.snr,
            ratio,
            100.0 * (ratio / BRIDGE_K - 1.0)
        );
    }

    println!("\nthe signal estimate is deterministic (p_s_est = p_s/2 exactly);");
    println!("all scatter comes from the noise floor average.");
}
