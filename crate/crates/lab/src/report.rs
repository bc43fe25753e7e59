//! Versioned JSON reports for verification runs.
//!
//! A report carries everything needed to re-run and re-judge an experiment:
//! the schema version, the experiment kind, the full configuration echo
//! (seed included), the matrix parameters in force, the raw estimates, any
//! closed-form overlay curves, and one verdict per checked criterion.
//! Reports with equal configuration are byte-identical except for
//! `duration_seconds`, which is the one wall-clock field;
//! [`deterministic_view`] strips it for comparisons.

use serde::{Deserialize, Serialize};
use serde_json::Value;
use sscjl_core::JlParams;

/// Bumped whenever a field changes meaning or moves.
pub const SCHEMA_VERSION: u32 = 1;

/// One checked criterion. The convention is uniform: `pass` is exactly
/// `observed <= threshold`, so a verdict can always be re-derived from its
/// own numbers.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Verdict {
    /// Stable snake_case name of the criterion.
    pub criterion: String,
    pub pass: bool,
    pub observed: f64,
    pub threshold: f64,
    /// Human-readable context: worst grid point, the numbers involved.
    pub detail: String,
}

impl Verdict {
    /// Builds the verdict, deriving `pass = observed <= threshold`.
    /// A NaN observation fails.
    pub fn at_most(criterion: &str, observed: f64, threshold: f64, detail: String) -> Self {
        Verdict {
            criterion: criterion.to_string(),
            pass: observed <= threshold,
            observed,
            threshold,
            detail,
        }
    }
}

/// Matrix parameters echoed with derived quantities materialized.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ParamsEcho {
    pub epsilon: f64,
    pub delta: f64,
    pub d: usize,
    pub s: usize,
    pub p_nominal: f64,
    pub p_actual: f64,
    pub feasible: bool,
    pub clamped: bool,
}

impl From<&JlParams> for ParamsEcho {
    fn from(p: &JlParams) -> Self {
        ParamsEcho {
            epsilon: p.epsilon,
            delta: p.delta,
            d: p.d,
            s: p.s,
            p_nominal: p.p_nominal,
            p_actual: p.p_actual(),
            feasible: p.feasible(),
            clamped: p.clamped,
        }
    }
}

/// Top-level report document.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub schema_version: u32,
    /// Experiment kind: "moments", "tails", "djl", "mgf", "baseline".
    pub kind: String,
    /// Echo of the effective configuration, master seed included.
    pub config: Value,
    /// Matrix parameters, when the experiment has them.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub params: Option<ParamsEcho>,
    /// The measured quantities, shaped per kind.
    pub estimates: Value,
    /// Closed-form curves evaluated on the same grids as the estimates.
    #[serde(skip_serializing_if = "Value::is_null", default)]
    pub overlays: Value,
    pub verdicts: Vec<Verdict>,
    pub all_pass: bool,
    /// Wall-clock duration; the only field excluded from determinism
    /// comparisons.
    pub duration_seconds: f64,
}

impl ExperimentReport {
    /// Serializes with a trailing newline, keys in declaration order.
    pub fn to_json_pretty(&self) -> String {
        let mut out = serde_json::to_string_pretty(self).expect("report serializes");
        out.push('\n');
        out
    }
}

/// Conjunction of verdicts; vacuously true for informational runs.
pub fn all_pass(verdicts: &[Verdict]) -> bool {
    verdicts.iter().all(|v| v.pass)
}

/// A parsed report with the wall-clock field removed, for comparing runs.
pub fn deterministic_view(report: &Value) -> Value {
    let mut v = report.clone();
    if let Some(map) = v.as_object_mut() {
        map.remove("duration_seconds");
    }
    v
}
