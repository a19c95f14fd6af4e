//! Versioned JSON output for norm results and CSV helpers.

use hinf_core::{NormResult, Variant};
use serde::{Deserialize, Serialize};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NormReport {
    pub schema_version: u32,
    pub gamma: f64,
    /// `null` when the maximum is attained at infinity.
    pub frequency: Option<f64>,
    pub at_infinity: bool,
    pub certified_global: bool,
    pub iterations: usize,
    pub pencil_eig_count: usize,
    pub gain_eval_count: usize,
    pub variant: String,
    pub history: Vec<(usize, f64)>,
}

impl NormReport {
    pub fn new(r: &NormResult, variant: Variant) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            gamma: r.gamma,
            frequency: (!r.frequency.at_infinity).then_some(r.frequency.value),
            at_infinity: r.frequency.at_infinity,
            certified_global: r.certified_global,
            iterations: r.iterations,
            pencil_eig_count: r.pencil_eig_count,
            gain_eval_count: r.gain_eval_count,
            variant: variant.name().to_string(),
            history: r.history.clone(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

/// 17 significant digits; enough to reproduce every `f64`.
pub fn csv_float(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else if x.is_nan() {
        "nan".into()
    } else if x > 0.0 {
        "inf".into()
    } else {
        "-inf".into()
    }
}

/// Quotes a CSV field when it contains a separator, quote or newline.
pub fn csv_text(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}
