use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::report::VerificationReport;
use crate::constants::{ELECTRON_MASS, ELEMENTARY_CHARGE, HBAR, SPEED_OF_LIGHT};
use crate::error::Result;
use crate::klystron::{Capacitance, Klystron, KlystronParams};

/// Relative tolerance of every rate identity.
pub const IDENTITY_TOLERANCE: f64 = 1e-12;

/// `(γcotγ − 1)·sin⁴γ` evaluated directly; adequate away from γ = 0.
fn gain(gamma: f64) -> f64 {
    (gamma * gamma.cos() / gamma.sin() - 1.0) * gamma.sin().powi(4)
}

fn rel(reference: f64, value: f64, scale: f64) -> f64 {
    let diff = (value - reference).abs();
    if scale == 0.0 {
        diff
    } else {
        diff / scale.abs()
    }
}

/// Checks the rate bookkeeping at one operating point.
///
/// Three residuals are combined (the largest is reported):
/// - `total` against `stimulated + spontaneous`;
/// - `stimulated` against `2E_p²·32π³J₀²g/(mħ⁴C²d⁴ω⁷)`, rebuilt here from the
///   raw parameters;
/// - the emission − absorption difference of the on-shell coefficients against
///   `K[(2n+1)sin⁴γ + 2αg(2n²+2n+1)]`, `K = 16π³e²v⁶/(ħL⁶C²d⁴ω⁶)`,
///   relative to `emission + absorption`.
pub fn verify_rate_identity(params: &KlystronParams) -> Result<VerificationReport> {
    let device = Klystron::new(*params)?;
    let rates = device.rate_total();
    let sum_residual = rates.identity_residual();

    let p = params;
    let c = device.capacitance();
    let d = p.gap_width;
    let flux = ELEMENTARY_CHARGE * p.velocity * p.electrons / p.volume;
    let gamma = p.omega * d / (2.0 * p.velocity);
    let g = gain(gamma);
    let stored = p.photons * HBAR * p.omega;
    // 32π³J₀²/(mħ⁴C²d⁴ω⁷), grouped to stay in range.
    let c32 = 32.0 * PI.powi(3) * (flux / (c * d * d)).powi(2) / (ELECTRON_MASS * HBAR.powi(4) * p.omega.powi(7));
    let stimulated = 2.0 * stored * stored * c32 * g;
    let coefficient_residual = rel(stimulated, rates.stimulated, stimulated);

    let alpha = HBAR * p.omega / (ELECTRON_MASS * p.velocity * p.velocity);
    let n = p.photons;
    let s4 = gamma.sin().powi(4);
    let k =
        16.0 * PI.powi(3) * (ELEMENTARY_CHARGE / (c * d * d)).powi(2) * (p.velocity / (p.box_length * p.omega)).powi(6)
            / HBAR;
    let expected = k * ((2.0 * n + 1.0) * s4 + 2.0 * alpha * g * (2.0 * n * n + 2.0 * n + 1.0));
    let emission = device.reduced_emission_rate(n)?;
    let absorption = device.reduced_absorption_rate(n)?;
    let difference_residual = rel(expected, emission - absorption, emission + absorption);

    let worst = sum_residual.max(coefficient_residual).max(difference_residual);
    Ok(
        VerificationReport::from_error("rate_identity", rates.total, rates.stimulated + rates.spontaneous, worst, IDENTITY_TOLERANCE)
            .with_note(format!(
                "residuals: total vs sum {sum_residual:e}, stimulated coefficient {coefficient_residual:e}, emission - absorption {difference_residual:e}"
            )),
    )
}

fn log_uniform(rng: &mut impl Rng, lo: f64, hi: f64) -> f64 {
    rng.random_range(lo.ln()..hi.ln()).exp()
}

/// Random operating point inside the model's validity range: v/c between
/// 10⁻⁴ and 5·10⁻³, γ in [0.5, 12] kept at least 0.05 away from the zeros
/// of sin γ, and ω chosen to realise that γ.
pub fn random_valid_params(rng: &mut impl Rng) -> KlystronParams {
    let gamma = loop {
        let g: f64 = rng.random_range(0.5..12.0);
        if g.sin().abs() > 0.05 {
            break g;
        }
    };
    let gap_width = log_uniform(rng, 1e-4, 1e-2);
    let velocity = SPEED_OF_LIGHT * log_uniform(rng, 1e-4, 5e-3);
    KlystronParams {
        omega: 2.0 * gamma * velocity / gap_width,
        gap_width,
        capacitance: Capacitance::Farads(log_uniform(rng, 1e-15, 1e-11)),
        volume: log_uniform(rng, 1e-9, 1e-5),
        box_length: log_uniform(rng, 1e-3, 1.0),
        drift_length: log_uniform(rng, 1e-3, 1e-1),
        velocity,
        electrons: log_uniform(rng, 1.0, 1e9).round(),
        photons: f64::from(rng.random_range(0..=1000u32)),
    }
}

/// [`verify_rate_identity`] over `count` random operating points; the
/// worst residual is reported.
pub fn verify_rate_identity_randomized(count: usize, seed: u64) -> Result<VerificationReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst: Option<VerificationReport> = None;
    for _ in 0..count {
        let report = verify_rate_identity(&random_valid_params(&mut rng))?;
        if worst.as_ref().is_none_or(|w| report.relative_error > w.relative_error) {
            worst = Some(report);
        }
    }
    let worst = worst.ok_or_else(|| crate::Error::arg("count", "must be at least 1"))?;
    Ok(VerificationReport {
        name: "rate_identity_randomized".into(),
        note: Some(format!(
            "worst of {count} random parameter sets; {}",
            worst.note.unwrap_or_default()
        )),
        ..worst
    })
}
