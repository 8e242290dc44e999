//! Structured record of one identity check.

use serde::{Deserialize, Serialize};

use crate::domains::Estimate;
use crate::numeric::C;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub identity: String,
    pub p: usize,
    pub q: usize,
    pub n: i64,
    pub m: Option<Vec<i64>>,
    pub method: String,
    /// Node counts / sample specs of every engine involved.
    pub nodes: serde_json::Value,
    pub seed: Option<u64>,
    pub lhs: C,
    pub rhs: C,
    pub reference: Option<C>,
    pub abs_err: f64,
    pub rel_err: f64,
    pub pass: bool,
    pub wall_time_ms: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
    /// Suite-specific structured payload (diagrams, operator counts, …).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub detail: Option<serde_json::Value>,
}

/// Largest deviation of the estimates from `target`, absolute and relative,
/// and whether each estimate is within `tol` (relative, or absolute when the
/// target vanishes) or within three standard errors.
pub fn judge(estimates: &[Estimate], target: C, tol: f64) -> (f64, f64, bool) {
    let scale = target.norm();
    let mut abs_err = 0.0f64;
    let mut pass = true;
    for e in estimates {
        let err = (e.value - target).norm();
        abs_err = abs_err.max(err);
        let allowed = if scale > 0.0 { tol * scale } else { tol };
        let sampled = e.std_error.map(|s| 3.0 * s).unwrap_or(0.0);
        pass &= err.is_finite() && err <= allowed.max(sampled);
    }
    let rel_err = if scale > 0.0 { abs_err / scale } else { abs_err };
    (abs_err, rel_err, pass)
}

impl VerificationReport {
    pub fn line(&self) -> String {
        let m = self
            .m
            .as_ref()
            .map(|m| format!(" m={m:?}"))
            .unwrap_or_default();
        format!(
            "[{}] {} (p,q,n)=({},{},{}){} lhs={:.10} rhs={:.10} rel_err={:.2e}",
            if self.pass { "PASS" } else { "FAIL" },
            self.identity,
            self.p,
            self.q,
            self.n,
            m,
            self.lhs,
            self.rhs,
            self.rel_err
        )
    }
}
