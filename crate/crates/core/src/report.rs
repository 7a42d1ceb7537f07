//! Machine-readable outputs: the summary JSON document and the CSV
//! artifacts.
//!
//! Everything here is emitted by hand with a fixed key order and floats
//! printed as `{:.16e}` (17 significant digits, enough to round-trip f64
//! exactly), so identical runs produce byte-identical files. Non-finite
//! floats become JSON `null`; an infinite SNR is still recoverable from
//! its ingredients (a zero noise power next to a positive signal power).
//! All frequencies in these outputs are angular (rad per unit time).

use crate::analytic::{ClosedFormSnr, RetuneEntry, BRIDGE_K};
use crate::model::{PhotocurrentTrace, TimeGrid};
use crate::spectral::{SnrEstimate, SpectralLine};

fn fmt(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.16e}")
    } else {
        "null".to_string()
    }
}

/// The summary document of an `analytic` or `simulate` run.
///
/// Fixed schema, fixed key order. The `*_est` fields are null and
/// `n_realizations` is 0 when no simulation was run.
pub fn summary_json(closed: &ClosedFormSnr, estimate: Option<&SnrEstimate>, seed: u64) -> String {
    let (snr_est, p_s_est, p_n_est, n_real) = match estimate {
        Some(e) => (
            fmt(e.snr),
            fmt(e.signal_band_power),
            fmt(e.noise_band_power),
            e.n_realizations,
        ),
        None => ("null".into(), "null".into(), "null".into(), 0),
    };
    let terms: Vec<String> = closed
        .contamination
        .iter()
        .map(|c| format!("[{}, {}]", fmt(c.omega), fmt(c.theta)))
        .collect();
    format!(
        "{{\n  \"snr_paper\": {},\n  \"snr_clean_paper\": {},\n  \"snr_est\": {},\n  \
         \"p_s_paper\": {},\n  \"p_n_paper\": {},\n  \"p_s_est\": {},\n  \"p_n_est\": {},\n  \
         \"bridge_k\": {},\n  \"contaminated\": {},\n  \"contamination_terms\": [{}],\n  \
         \"seed\": {},\n  \"n_realizations\": {}\n}}\n",
        fmt(closed.snr),
        fmt(closed.snr_clean),
        snr_est,
        fmt(closed.signal_band_power),
        fmt(closed.noise_band_power),
        p_s_est,
        p_n_est,
        fmt(BRIDGE_K),
        closed.contaminated(),
        terms.join(", "),
        seed,
        n_real,
    )
}

/// Time-domain record CSV: `t,i[,signal,noise]` depending on whether the
/// trace carries its parts.
pub fn trace_csv(trace: &PhotocurrentTrace) -> String {
    let mut out = String::new();
    match &trace.parts {
        Some(parts) => {
            out.push_str("t,i,signal,noise\n");
            for (j, t) in trace.grid.times().enumerate() {
                out.push_str(&format!(
                    "{},{},{},{}\n",
                    fmt(t),
                    fmt(trace.samples[j]),
                    fmt(parts.signal[j]),
                    fmt(parts.noise[j]),
                ));
            }
        }
        None => {
            out.push_str("t,i\n");
            for (j, t) in trace.grid.times().enumerate() {
                out.push_str(&format!("{},{}\n", fmt(t), fmt(trace.samples[j])));
            }
        }
    }
    out
}

/// Spectrum CSV: `omega,psd,n_avg`, one row per nonnegative bin.
pub fn spectrum_csv(grid: &TimeGrid, psd: &[f64], n_avg: usize) -> String {
    let mut out = String::from("omega,psd,n_avg\n");
    for (k, v) in psd.iter().enumerate() {
        out.push_str(&format!("{},{},{n_avg}\n", fmt(grid.bin_omega(k)), fmt(*v)));
    }
    out
}

/// Detected-line CSV: `center,width,value` with the band power as value.
pub fn lines_csv(lines: &[SpectralLine], grid: &TimeGrid) -> String {
    let mut out = String::from("center,width,value\n");
    let width = grid.delta_omega();
    for line in lines {
        out.push_str(&format!(
            "{},{},{}\n",
            fmt(line.omega),
            fmt(width),
            fmt(line.band_power),
        ));
    }
    out
}

/// Retune ranking CSV: `omega,snr_paper,contaminated`, best candidate
/// first.
pub fn ranking_csv(entries: &[RetuneEntry]) -> String {
    let mut out = String::from("omega,snr_paper,contaminated\n");
    for e in entries {
        out.push_str(&format!(
            "{},{},{}\n",
            fmt(e.omega_big),
            fmt(e.snr),
            e.contaminated,
        ));
    }
    out
}

/// Machine-readable error document, written to stderr on failure.
pub fn error_json(err: &crate::Error) -> String {
    let items: Vec<(String, String)> = match err {
        crate::Error::Validation(v) => v
            .items
            .iter()
            .map(|i| (i.field.clone(), i.message.clone()))
            .collect(),
        crate::Error::InvalidInput(msg) => vec![("input".to_string(), msg.clone())],
        crate::Error::Config(msg) => vec![("config".to_string(), msg.clone())],
        crate::Error::Io(e) => vec![("io".to_string(), e.to_string())],
    };
    let body: Vec<String> = items
        .iter()
        .map(|(field, message)| {
            format!(
                "{{\"field\": {}, \"message\": {}}}",
                json_string(field),
                json_string(message)
            )
        })
        .collect();
    format!("{{\"errors\": [{}]}}\n", body.join(", "))
}

fn json_string(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\r' => out.push_str("\\r"),
            '\t' => out.push_str("\\t"),
            c if (c as u32) < 0x20 => out.push_str(&format!("\\u{:04x}", c as u32)),
            c => out.push(c),
        }
    }
    out.push('"');
    out
}

/// One row of a parameter sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub value: f64,
    pub snr: f64,
    pub snr_est: Option<f64>,
}

/// Sweep CSV: `value,snr_paper` plus an `snr_est` column when any row
/// carries an estimate.
pub fn sweep_csv(rows: &[SweepRow]) -> String {
    let with_est = rows.iter().any(|r| r.snr_est.is_some());
    let mut out = String::from(if with_est {
        "value,snr_paper,snr_est\n"
    } else {
        "value,snr_paper\n"
    });
    for r in rows {
        if with_est {
            out.push_str(&format!(
                "{},{},{}\n",
                fmt(r.value),
                fmt(r.snr),
                r.snr_est.map(fmt).unwrap_or_default(),
            ));
        } else {
            out.push_str(&format!("{},{}\n", fmt(r.value), fmt(r.snr)));
        }
    }
    out
}
