//! Scenario description and validation.
//!
//! A scenario is the full physical configuration of one measurement: the
//! carrier pair (total photon flux N, offset Omega, interferometer phase
//! phi), the phase signal theta(t) as a sum of cosine components, the
//! squeezing model for the dark-port field, and the sampling grid. All
//! frequencies are angular (rad per unit time); the config layer converts
//! from cycles.

use crate::{Error, Result};

/// Planck constant [J s]; enters only through [`photon_flux_from_power`].
pub const PLANCK_H: f64 = 6.626_070_15e-34;
/// Speed of light [m/s]; enters only through [`photon_flux_from_power`].
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// Warn when the largest phase amplitude exceeds this (linearization strain).
pub const THETA_WARN_THRESHOLD: f64 = 0.05;
/// Reject scenarios whose largest phase amplitude exceeds this.
pub const THETA_REJECT_THRESHOLD: f64 = 0.3;
/// The highest beat line (2 Omega + max w_s) must sit below Nyquist by this factor.
pub const NYQUIST_HEADROOM: f64 = 1.25;
/// Every signal component must satisfy w_s * T >= this (resolvable lines).
pub const MIN_OMEGA_T_PRODUCT: f64 = 16.0;

/// Frequencies closer than this relative tolerance are treated as equal.
const FREQ_MATCH_TOL: f64 = 1e-9;

/// True when two angular frequencies agree to within [`FREQ_MATCH_TOL`].
pub(crate) fn same_frequency(a: f64, b: f64) -> bool {
    (a - b).abs() <= FREQ_MATCH_TOL * a.abs().max(b.abs()).max(1.0)
}

/// Convert optical power to photon flux N = P / (h c / lambda).
///
/// This is the only place physical constants enter; everything downstream
/// works in photon-flux units.
pub fn photon_flux_from_power(power_watts: f64, wavelength_m: f64) -> Result<f64> {
    if !(power_watts > 0.0) || !power_watts.is_finite() {
        return Err(Error::InvalidInput(format!(
            "power must be positive and finite, got {power_watts}"
        )));
    }
    if !(wavelength_m > 0.0) || !wavelength_m.is_finite() {
        return Err(Error::InvalidInput(format!(
            "wavelength must be positive and finite, got {wavelength_m}"
        )));
    }
    let photon_energy = PLANCK_H * SPEED_OF_LIGHT / wavelength_m;
    Ok(power_watts / photon_energy)
}

/// Carrier layout at the bright input port.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CarrierMode {
    /// Two equal carriers at +/- Omega around the optical center frequency.
    TwoFrequency,
    /// A single carrier at the center frequency with the same total flux;
    /// used as the diagnostic configuration.
    SingleFrequency,
}

/// Bright-port carrier configuration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CarrierConfig {
    /// Total photon flux N (photons per unit time, both carriers combined).
    pub photon_flux: f64,
    /// Half the carrier spacing, rad per unit time.
    pub omega_big: f64,
    /// Interferometer phase between the bright and dark input ports.
    pub phi: f64,
    pub mode: CarrierMode,
}

/// One cosine component of the phase signal: theta * cos(omega * t).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SignalComponent {
    /// Angular frequency, rad per unit time; positive.
    pub omega: f64,
    /// Phase amplitude in radians; nonnegative.
    pub theta: f64,
}

/// The phase signal theta(t) as a finite sum of cosines.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct PhaseSignal {
    pub components: Vec<SignalComponent>,
}

impl PhaseSignal {
    pub fn new(components: Vec<SignalComponent>) -> Self {
        Self { components }
    }

    /// Amplitude of the component at |omega|, or 0 when none is present.
    /// The spectrum is even, so negative frequencies fold.
    pub fn amplitude_at(&self, omega: f64) -> f64 {
        let target = omega.abs();
        self.components
            .iter()
            .find(|c| same_frequency(c.omega, target))
            .map(|c| c.theta)
            .unwrap_or(0.0)
    }

    /// theta(t) evaluated at one instant.
    pub fn theta_at(&self, t: f64) -> f64 {
        self.components
            .iter()
            .map(|c| c.theta * (c.omega * t).cos())
            .sum()
    }

    pub fn max_theta(&self) -> f64 {
        self.components.iter().map(|c| c.theta).fold(0.0, f64::max)
    }

    pub fn max_omega(&self) -> f64 {
        self.components.iter().map(|c| c.omega).fold(0.0, f64::max)
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }
}

/// A one-quadrature variance spectrum, vacuum normalized to 1.
#[derive(Debug, Clone, PartialEq)]
pub enum SpectrumFn {
    Flat {
        value: f64,
    },
    /// Piecewise-linear table of (omega, variance), clamped beyond the ends.
    /// Points must be sorted by strictly increasing omega.
    Tabulated {
        points: Vec<(f64, f64)>,
    },
    /// Output variance of a below-threshold parametric oscillator with
    /// escape efficiency `eta`, pump parameter `pump` and cavity half-width
    /// `gamma`. The squeezed branch dips below 1, the antisqueezed branch
    /// rises above it; the pair is minimum-uncertainty at eta = 1.
    LorentzianOpo {
        eta: f64,
        pump: f64,
        gamma: f64,
        antisqueezed: bool,
    },
}

impl SpectrumFn {
    /// Evaluate at an angular frequency; even in omega.
    pub fn eval(&self, omega: f64) -> f64 {
        let w = omega.abs();
        match self {
            SpectrumFn::Flat { value } => *value,
            SpectrumFn::Tabulated { points } => {
                if points.is_empty() {
                    return 0.0;
                }
                if w <= points[0].0 {
                    return points[0].1;
                }
                if w >= points[points.len() - 1].0 {
                    return points[points.len() - 1].1;
                }
                let i = points.partition_point(|p| p.0 <= w);
                let (w0, v0) = points[i - 1];
                let (w1, v1) = points[i];
                v0 + (v1 - v0) * (w - w0) / (w1 - w0)
            }
            SpectrumFn::LorentzianOpo {
                eta,
                pump,
                gamma,
                antisqueezed,
            } => {
                let d = (w / gamma).powi(2);
                if *antisqueezed {
                    1.0 + 4.0 * eta * pump / ((1.0 - pump).powi(2) + d)
                } else {
                    1.0 - 4.0 * eta * pump / ((1.0 + pump).powi(2) + d)
                }
            }
        }
    }
}

/// Dark-port squeezing model: variance spectra of the ellipse minor and
/// major axes plus the angle between the minor axis and the readout
/// quadrature.
#[derive(Debug, Clone, PartialEq)]
pub struct SqueezingModel {
    pub v_min: SpectrumFn,
    pub v_max: SpectrumFn,
    /// Angle between the squeezing ellipse minor axis and the readout
    /// quadrature; 0 means the readout sees v_min.
    pub mismatch_angle: f64,
}

impl SqueezingModel {
    /// Unsqueezed vacuum: both quadratures at variance 1.
    pub fn vacuum() -> Self {
        Self {
            v_min: SpectrumFn::Flat { value: 1.0 },
            v_max: SpectrumFn::Flat { value: 1.0 },
            mismatch_angle: 0.0,
        }
    }

    pub fn flat(v_min: f64, v_max: f64, mismatch_angle: f64) -> Self {
        Self {
            v_min: SpectrumFn::Flat { value: v_min },
            v_max: SpectrumFn::Flat { value: v_max },
            mismatch_angle,
        }
    }

    pub fn lorentzian_opo(eta: f64, pump: f64, gamma: f64, mismatch_angle: f64) -> Self {
        Self {
            v_min: SpectrumFn::LorentzianOpo {
                eta,
                pump,
                gamma,
                antisqueezed: false,
            },
            v_max: SpectrumFn::LorentzianOpo {
                eta,
                pump,
                gamma,
                antisqueezed: true,
            },
            mismatch_angle,
        }
    }
}

/// Variance seen by the readout quadrature:
/// V_eff(w) = v_min(w) cos^2(mismatch) + v_max(w) sin^2(mismatch).
pub fn effective_variance(model: &SqueezingModel, omega: f64) -> f64 {
    let (s, c) = model.mismatch_angle.sin_cos();
    model.v_min.eval(omega) * c * c + model.v_max.eval(omega) * s * s
}

/// Variance of the quadrature orthogonal to the readout.
pub fn orthogonal_variance(model: &SqueezingModel, omega: f64) -> f64 {
    let (s, c) = model.mismatch_angle.sin_cos();
    model.v_min.eval(omega) * s * s + model.v_max.eval(omega) * c * c
}

/// Readout-quadrature variance evaluated at every nonnegative FFT bin.
pub fn evaluate_effective_spectrum(model: &SqueezingModel, grid: &TimeGrid) -> Vec<f64> {
    (0..grid.n_bins())
        .map(|k| effective_variance(model, grid.bin_omega(k)))
        .collect()
}

/// Orthogonal-quadrature variance evaluated at every nonnegative FFT bin.
pub fn evaluate_orthogonal_spectrum(model: &SqueezingModel, grid: &TimeGrid) -> Vec<f64> {
    (0..grid.n_bins())
        .map(|k| orthogonal_variance(model, grid.bin_omega(k)))
        .collect()
}

/// Uniform sampling grid covering one record of duration T.
///
/// The sample count is sample_rate * duration exactly and must be a power
/// of two; all spectral machinery relies on the resulting bin spacing
/// 2 pi / T.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeGrid {
    sample_rate: f64,
    duration: f64,
    n_samples: usize,
}

impl TimeGrid {
    pub fn new(sample_rate: f64, duration: f64) -> Result<Self> {
        if !(sample_rate > 0.0) || !sample_rate.is_finite() {
            return Err(Error::InvalidInput(format!(
                "sample_rate must be positive and finite, got {sample_rate}"
            )));
        }
        if !(duration > 0.0) || !duration.is_finite() {
            return Err(Error::InvalidInput(format!(
                "duration must be positive and finite, got {duration}"
            )));
        }
        let n_f = sample_rate * duration;
        let n = n_f.round();
        if (n_f - n).abs() > 1e-6 || n < 4.0 {
            return Err(Error::InvalidInput(format!(
                "sample_rate * duration must be an integer sample count >= 4, got {n_f}"
            )));
        }
        let n = n as usize;
        if !n.is_power_of_two() {
            return Err(Error::InvalidInput(format!(
                "sample count must be a power of two, got {n}"
            )));
        }
        Ok(Self {
            sample_rate,
            duration,
            n_samples: n,
        })
    }

    pub fn sample_rate(&self) -> f64 {
        self.sample_rate
    }

    pub fn duration(&self) -> f64 {
        self.duration
    }

    pub fn n_samples(&self) -> usize {
        self.n_samples
    }

    pub fn dt(&self) -> f64 {
        1.0 / self.sample_rate
    }

    /// Spectral bin spacing, 2 pi / T.
    pub fn delta_omega(&self) -> f64 {
        std::f64::consts::TAU / self.duration
    }

    pub fn nyquist_omega(&self) -> f64 {
        std::f64::consts::PI * self.sample_rate
    }

    /// Number of nonnegative FFT bins, n_samples / 2 + 1.
    pub fn n_bins(&self) -> usize {
        self.n_samples / 2 + 1
    }

    pub fn bin_omega(&self, k: usize) -> f64 {
        k as f64 * self.delta_omega()
    }

    pub fn bin_omegas(&self) -> Vec<f64> {
        (0..self.n_bins()).map(|k| self.bin_omega(k)).collect()
    }

    /// Sample instants t_i = i / sample_rate.
    pub fn times(&self) -> impl Iterator<Item = f64> + '_ {
        let dt = self.dt();
        (0..self.n_samples).map(move |i| i as f64 * dt)
    }

    /// Whether omega sits on a spectral bin (within 1e-6 of a bin index).
    pub fn is_on_bin(&self, omega: f64) -> bool {
        let ratio = omega / self.delta_omega();
        (ratio - ratio.round()).abs() <= 1e-6
    }

    /// Bin index of an on-bin frequency in [0, Nyquist].
    pub fn bin_index(&self, omega: f64) -> Result<usize> {
        let ratio = omega / self.delta_omega();
        let k = ratio.round();
        if (ratio - k).abs() > 1e-6 || k < 0.0 || k as usize >= self.n_bins() {
            return Err(Error::InvalidInput(format!(
                "frequency {omega} rad is not on a bin of spacing {} rad",
                self.delta_omega()
            )));
        }
        Ok(k as usize)
    }
}

/// Signal and noise parts of a photocurrent record.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceParts {
    pub signal: Vec<f64>,
    pub noise: Vec<f64>,
}

/// Subtracted photocurrent of the two interferometer outputs, in
/// photon-flux units.
#[derive(Debug, Clone, PartialEq)]
pub struct PhotocurrentTrace {
    pub grid: TimeGrid,
    pub samples: Vec<f64>,
    /// Present only for the linearized pipeline, where signal and noise
    /// separate exactly; samples = signal + noise elementwise.
    pub parts: Option<TraceParts>,
}

/// One violated invariant, with the offending field.
#[derive(Debug, Clone, PartialEq)]
pub struct Violation {
    pub field: String,
    pub message: String,
}

/// All violations found by [`validate_scenario`].
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Violations {
    pub items: Vec<Violation>,
}

impl std::fmt::Display for Violations {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for (i, v) in self.items.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "  {}: {}", v.field, v.message)?;
        }
        Ok(())
    }
}

/// A validated, immutable scenario. Construct via [`validate_scenario`].
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    carrier: CarrierConfig,
    signal: PhaseSignal,
    squeezing: SqueezingModel,
    grid: TimeGrid,
    warnings: Vec<String>,
}

impl Scenario {
    pub fn carrier(&self) -> &CarrierConfig {
        &self.carrier
    }

    pub fn signal(&self) -> &PhaseSignal {
        &self.signal
    }

    pub fn squeezing(&self) -> &SqueezingModel {
        &self.squeezing
    }

    pub fn grid(&self) -> &TimeGrid {
        &self.grid
    }

    /// Non-fatal validation findings (for example a large phase amplitude).
    pub fn warnings(&self) -> &[String] {
        &self.warnings
    }

    /// Validation is idempotent: revalidating returns an equal scenario.
    pub fn revalidate(&self) -> std::result::Result<Scenario, Violations> {
        validate_scenario(
            self.carrier,
            self.signal.clone(),
            self.squeezing.clone(),
            self.grid,
        )
    }
}

struct Checker {
    violations: Vec<Violation>,
    warnings: Vec<String>,
}

impl Checker {
    fn fail(&mut self, field: &str, message: String) {
        self.violations.push(Violation {
            field: field.to_string(),
            message,
        });
    }

    fn warn(&mut self, message: String) {
        self.warnings.push(message);
    }
}

/// Check every invariant and cross-constraint; return a sealed scenario or
/// the full list of violations.
///
/// Cross-constraints: the highest beat line must clear Nyquist with
/// [`NYQUIST_HEADROOM`], every signal frequency and the beat frequency
/// 2 Omega must sit exactly on spectral bins (commensurability), and each
/// component must satisfy w_s * T >= [`MIN_OMEGA_T_PRODUCT`].
pub fn validate_scenario(
    carrier: CarrierConfig,
    signal: PhaseSignal,
    squeezing: SqueezingModel,
    grid: TimeGrid,
) -> std::result::Result<Scenario, Violations> {
    let mut c = Checker {
        violations: Vec::new(),
        warnings: Vec::new(),
    };

    check_carrier(&carrier, &mut c);
    check_signal(&signal, &grid, &mut c);
    check_squeezing(&squeezing, &grid, &mut c);
    check_cross(&carrier, &signal, &grid, &mut c);

    if c.violations.is_empty() {
        Ok(Scenario {
            carrier,
            signal,
            squeezing,
            grid,
            warnings: c.warnings,
        })
    } else {
        Err(Violations {
            items: c.violations,
        })
    }
}

fn check_carrier(carrier: &CarrierConfig, c: &mut Checker) {
    if !(carrier.photon_flux > 0.0) || !carrier.photon_flux.is_finite() {
        c.fail(
            "carrier.photon_flux",
            format!("must be positive and finite, got {}", carrier.photon_flux),
        );
    }
    match carrier.mode {
        CarrierMode::TwoFrequency => {
            if !(carrier.omega_big > 0.0) || !carrier.omega_big.is_finite() {
                c.fail(
                    "carrier.omega_big",
                    format!(
                        "must be positive and finite in two-frequency mode, got {}",
                        carrier.omega_big
                    ),
                );
            }
        }
        CarrierMode::SingleFrequency => {
            if !(carrier.omega_big >= 0.0) || !carrier.omega_big.is_finite() {
                c.fail(
                    "carrier.omega_big",
                    format!("must be nonnegative and finite, got {}", carrier.omega_big),
                );
            }
        }
    }
    if !carrier.phi.is_finite() {
        c.fail("carrier.phi", format!("must be finite, got {}", carrier.phi));
    }
}

fn check_signal(signal: &PhaseSignal, grid: &TimeGrid, c: &mut Checker) {
    for (i, comp) in signal.components.iter().enumerate() {
        let field = format!("signal.components[{i}]");
        if !(comp.omega > 0.0) || !comp.omega.is_finite() {
            c.fail(
                &field,
                format!("frequency must be positive and finite, got {}", comp.omega),
            );
            continue;
        }
        if !(comp.theta >= 0.0) || !comp.theta.is_finite() {
            c.fail(
                &field,
                format!(
                    "amplitude must be nonnegative and finite, got {}",
                    comp.theta
                ),
            );
        }
        for other in &signal.components[..i] {
            if same_frequency(comp.omega, other.omega) {
                c.fail(
                    &field,
                    format!("duplicate component frequency {} rad", comp.omega),
                );
            }
        }
        if comp.omega * grid.duration() < MIN_OMEGA_T_PRODUCT {
            c.fail(
                &field,
                format!(
                    "component at {} rad needs omega * T >= {MIN_OMEGA_T_PRODUCT}; \
                     the record of duration {} is too short to resolve it",
                    comp.omega,
                    grid.duration()
                ),
            );
        }
    }
    let max_theta = signal.max_theta();
    if max_theta > THETA_REJECT_THRESHOLD {
        c.fail(
            "signal",
            format!(
                "largest amplitude {max_theta} exceeds the small-signal limit \
                 {THETA_REJECT_THRESHOLD}"
            ),
        );
    } else if max_theta > THETA_WARN_THRESHOLD {
        c.warn(format!(
            "largest phase amplitude {max_theta} exceeds {THETA_WARN_THRESHOLD}; \
             linearization error grows quadratically"
        ));
    }
}

fn check_squeezing(squeezing: &SqueezingModel, grid: &TimeGrid, c: &mut Checker) {
    if !squeezing.mismatch_angle.is_finite() {
        c.fail(
            "squeezing.mismatch_angle",
            format!("must be finite, got {}", squeezing.mismatch_angle),
        );
    }
    for (name, f) in [("squeezing.v_min", &squeezing.v_min), ("squeezing.v_max", &squeezing.v_max)]
    {
        check_spectrum_fn(name, f, c);
    }
    if !c.violations.is_empty() {
        return;
    }
    // Pointwise checks over the grid band: ordering and the uncertainty
    // product. v_min = 0 is allowed as the idealized perfect-squeezing
    // limit; the product bound applies wherever v_min > 0.
    for k in 0..grid.n_bins() {
        let w = grid.bin_omega(k);
        let lo = squeezing.v_min.eval(w);
        let hi = squeezing.v_max.eval(w);
        if lo < 0.0 || !lo.is_finite() || hi < 0.0 || !hi.is_finite() {
            c.fail(
                "squeezing",
                format!("variance must be nonnegative and finite; at {w} rad got {lo} / {hi}"),
            );
            return;
        }
        if hi < lo * (1.0 - 1e-12) {
            c.fail(
                "squeezing",
                format!("v_max({w}) = {hi} is below v_min({w}) = {lo}"),
            );
            return;
        }
        if lo > 0.0 && lo * hi < 1.0 - 1e-9 {
            c.fail(
                "squeezing",
                format!(
                    "uncertainty product v_min * v_max = {} at {w} rad is below 1",
                    lo * hi
                ),
            );
            return;
        }
    }
}

fn check_spectrum_fn(field: &str, f: &SpectrumFn, c: &mut Checker) {
    match f {
        SpectrumFn::Flat { value } => {
            if !(*value >= 0.0) || !value.is_finite() {
                c.fail(field, format!("flat value must be >= 0, got {value}"));
            }
        }
        SpectrumFn::Tabulated { points } => {
            if points.is_empty() {
                c.fail(field, "table must not be empty".to_string());
                return;
            }
            for (i, (w, v)) in points.iter().enumerate() {
                if !w.is_finite() || *w < 0.0 || !v.is_finite() || *v < 0.0 {
                    c.fail(field, format!("table entry {i} = ({w}, {v}) is invalid"));
                }
                if i > 0 && *w <= points[i - 1].0 {
                    c.fail(
                        field,
                        format!("table frequencies must be strictly increasing at entry {i}"),
                    );
                }
            }
        }
        SpectrumFn::LorentzianOpo {
            eta, pump, gamma, ..
        } => {
            if !(*eta >= 0.0 && *eta <= 1.0) {
                c.fail(field, format!("eta must be in [0, 1], got {eta}"));
            }
            if !(*pump >= 0.0 && *pump < 1.0) {
                c.fail(field, format!("pump must be in [0, 1), got {pump}"));
            }
            if !(*gamma > 0.0) || !gamma.is_finite() {
                c.fail(field, format!("gamma must be positive, got {gamma}"));
            }
        }
    }
}

fn check_cross(carrier: &CarrierConfig, signal: &PhaseSignal, grid: &TimeGrid, c: &mut Checker) {
    let beat = 2.0 * carrier.omega_big;
    let top = beat + signal.max_omega();
    if grid.nyquist_omega() <= NYQUIST_HEADROOM * top {
        c.fail(
            "grid.sample_rate",
            format!(
                "Nyquist {} rad must exceed {NYQUIST_HEADROOM} x the highest beat line {top} rad",
                grid.nyquist_omega()
            ),
        );
    }
    for (i, comp) in signal.components.iter().enumerate() {
        check_on_bin(
            &format!("signal.components[{i}].frequency"),
            comp.omega,
            grid,
            c,
        );
    }
    if carrier.omega_big > 0.0 {
        check_on_bin("carrier.omega_big (beat 2*Omega)", beat, grid, c);
    }
}

fn check_on_bin(field: &str, omega: f64, grid: &TimeGrid, c: &mut Checker) {
    if !grid.is_on_bin(omega) {
        let dw = grid.delta_omega();
        let nearest = (omega / dw).round() * dw;
        let cyc = std::f64::consts::TAU;
        c.fail(
            field,
            format!(
                "{omega} rad ({} cycles) is not a multiple of the bin spacing {dw} rad \
                 ({} cycles); nearest on-bin frequency is {nearest} rad ({} cycles)",
                omega / cyc,
                dw / cyc,
                nearest / cyc
            ),
        );
    }
}
