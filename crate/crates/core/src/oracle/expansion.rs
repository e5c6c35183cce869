use serde::{Deserialize, Serialize};

use super::report::{TracePoint, VerificationReport};
use crate::constants::{ELECTRON_MASS, HBAR};
use crate::error::{Error, Result};
use crate::klystron::wavenumber_after_emission_approx;

/// Expected order of the truncation error of the second-order form.
pub const EXPECTED_ORDER: f64 = 3.0;
/// Expected leading remainder constant: `√(1−2α) = 1 − α − α²/2 − α³/2 − …`.
pub const EXPECTED_CONSTANT: f64 = 0.5;
pub const ORDER_TOLERANCE: f64 = 0.05;
pub const CONSTANT_TOLERANCE: f64 = 0.02;

/// Fit of `|k′_approx − k′_exact|/k` against α.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExpansionFit {
    /// Least-squares slope of `ln error` against `ln α`.
    pub slope: f64,
    /// `error/α³` at the smallest α of the schedule.
    pub remainder_constant: f64,
    /// `(α, error)` for every schedule entry, in schedule order.
    pub points: Vec<TracePoint>,
    pub reports: Vec<VerificationReport>,
}

/// Truncation error of the library's small-α wavenumber against
/// `k√(1 − 2α)` over a schedule of α values (each `0 < α < 0.1`, at least
/// three of them). The photon frequency for each α is `ω = αħk²/m`.
pub fn verify_expansion(k: f64, alphas: &[f64]) -> Result<ExpansionFit> {
    if !(k.is_finite() && k > 0.0) {
        return Err(Error::arg("k", format!("must be finite and positive, got {k}")));
    }
    if alphas.len() < 3 {
        return Err(Error::arg(
            "alpha_schedule",
            format!("need at least 3 points, got {}", alphas.len()),
        ));
    }
    if let Some(bad) = alphas.iter().find(|a| !(**a > 0.0 && **a < 0.1)) {
        return Err(Error::arg(
            "alpha_schedule",
            format!("every alpha must lie in (0, 0.1), got {bad}"),
        ));
    }
    let mut points = Vec::with_capacity(alphas.len());
    for &alpha in alphas {
        let omega = alpha * HBAR * k * k / ELECTRON_MASS;
        let approx = wavenumber_after_emission_approx(k, omega)?;
        let exact = k * (1.0 - 2.0 * alpha).sqrt();
        let error = (approx - exact).abs() / k;
        if error == 0.0 {
            return Err(Error::arg(
                "alpha_schedule",
                format!("alpha = {alpha} is too small to resolve the truncation error in double precision"),
            ));
        }
        points.push(TracePoint { control: alpha, error });
    }

    let logs: Vec<(f64, f64)> = points.iter().map(|p| (p.control.ln(), p.error.ln())).collect();
    let m = logs.len() as f64;
    let mx = logs.iter().map(|p| p.0).sum::<f64>() / m;
    let my = logs.iter().map(|p| p.1).sum::<f64>() / m;
    let sxx: f64 = logs.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::arg("alpha_schedule", "alpha values must not all be equal"));
    }
    let slope = logs.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum::<f64>() / sxx;
    let smallest = points
        .iter()
        .min_by(|a, b| a.control.total_cmp(&b.control))
        .expect("at least three points");
    let remainder_constant = smallest.error / smallest.control.powi(3);

    let reports = vec![
        VerificationReport::compare(
            "expansion_order",
            EXPECTED_ORDER,
            slope,
            ORDER_TOLERANCE / EXPECTED_ORDER,
        )
        .with_note("log-log slope of the truncation error in alpha"),
        VerificationReport::compare(
            "expansion_constant",
            EXPECTED_CONSTANT,
            remainder_constant,
            CONSTANT_TOLERANCE / EXPECTED_CONSTANT,
        )
        .with_note("error / alpha^3 at the smallest alpha"),
    ];
    Ok(ExpansionFit {
        slope,
        remainder_constant,
        points,
        reports,
    })
}

/// `count` log-spaced values from `largest` down to `smallest`.
pub fn log_schedule(largest: f64, smallest: f64, count: usize) -> Vec<f64> {
    if count == 1 {
        return vec![largest];
    }
    let step = (smallest / largest).ln() / (count - 1) as f64;
    (0..count).map(|i| largest * (step * i as f64).exp()).collect()
}
