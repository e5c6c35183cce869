//! Closed-form physics of the double-gap reflex klystron.
//!
//! Both electron beams are symmetric (`N_x = N_y = N`, `v_x = v_y = v`,
//! `k_x = k_y = k`). The photon-pair output rates are the k-summed,
//! on-shell results; energy-conserving delta functions are never evaluated
//! numerically, the emission/absorption rates are exposed as the
//! coefficients that multiply them.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::constants::{ELECTRON_MASS, ELEMENTARY_CHARGE, HBAR, SPEED_OF_LIGHT, VACUUM_PERMITTIVITY};
use crate::error::{require_positive, Error, Result};

/// Below this |γ| the gain factor is evaluated from its Taylor series.
pub const GAIN_SERIES_THRESHOLD: f64 = 1e-3;

/// `v/c` above which a relativity warning is attached.
pub const RELATIVITY_WARNING: f64 = 0.01;
/// `v/c` at or above which the nonrelativistic model is refused.
pub const RELATIVITY_LIMIT: f64 = 0.1;
/// `α = ħω/(mv²)` above which the small-α expansion is flagged.
pub const ALPHA_WARNING: f64 = 0.1;

/// Gap transit angle `γ = ωd/(2v)`; half the gap transit phase `θ_g`.
pub fn transit_angle(omega: f64, gap_width: f64, velocity: f64) -> Result<f64> {
    require_positive("omega", omega)?;
    require_positive("gap_width", gap_width)?;
    require_positive("velocity", velocity)?;
    Ok(omega * gap_width / (2.0 * velocity))
}

/// Gain factor `g(γ) = (γ cot γ − 1) sin⁴ γ`.
///
/// Exactly zero at `γ = 0` and at nonzero multiples of π (the `sin⁴` zero
/// dominates the pole of `cot`). Near the origin the closed form cancels
/// catastrophically, so `|γ| < 1e-3` uses
/// `−γ⁶/3 + γ⁸/5 − 17γ¹⁰/315`.
pub fn gain_factor(gamma: f64) -> Result<f64> {
    if !gamma.is_finite() {
        return Err(Error::arg("gamma", format!("must be finite, got {gamma}")));
    }
    let x = gamma.abs();
    if x < GAIN_SERIES_THRESHOLD {
        let x2 = x * x;
        let x6 = x2 * x2 * x2;
        return Ok(x6 * (-1.0 / 3.0 + x2 * (1.0 / 5.0 - x2 * 17.0 / 315.0)));
    }
    let turns = (x / PI).round();
    if (x - turns * PI).abs() <= 4.0 * f64::EPSILON * x {
        return Ok(0.0);
    }
    let s = x.sin();
    let s2 = s * s;
    Ok((x / x.tan() - 1.0) * s2 * s2)
}

/// `C = ε₀A/d` for parallel plates of effective area `A` and separation `d`.
pub fn plate_capacitance(area: f64, gap_width: f64) -> Result<f64> {
    require_positive("plate_area", area)?;
    require_positive("gap_width", gap_width)?;
    Ok(VACUUM_PERMITTIVITY * area / gap_width)
}

/// Gap capacitance, given directly or through the plate area.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Capacitance {
    /// Farads.
    Farads(f64),
    /// Effective plate area in m²; `C = ε₀A/d` follows the gap width.
    PlateArea(f64),
}

/// Device and beam parameters, SI units.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KlystronParams {
    /// Photon angular frequency ω, rad/s.
    pub omega: f64,
    /// Gap width d, m.
    pub gap_width: f64,
    pub capacitance: Capacitance,
    /// Quantization volume V, m³.
    pub volume: f64,
    /// Quantization box length L, m. Only the on-shell emission/absorption
    /// coefficients depend on it.
    pub box_length: f64,
    /// Gap-to-repeller drift length l, m.
    pub drift_length: f64,
    /// Electron speed v, m/s.
    pub velocity: f64,
    /// Electrons per beam N.
    pub electrons: f64,
    /// Stored photons per mode n.
    pub photons: f64,
}

impl KlystronParams {
    /// Effective gap capacitance in farads.
    pub fn capacitance_farads(&self) -> Result<f64> {
        match self.capacitance {
            Capacitance::Farads(c) => require_positive("capacitance", c),
            Capacitance::PlateArea(a) => plate_capacitance(a, self.gap_width),
        }
    }
}

/// A validated operating point.
///
/// Construction checks the parameter invariants and records soft warnings
/// (mildly relativistic beam, large α).
#[derive(Debug, Clone, PartialEq)]
pub struct Klystron {
    params: KlystronParams,
    capacitance: f64,
    warnings: Vec<String>,
}

impl Klystron {
    pub fn new(params: KlystronParams) -> Result<Self> {
        require_positive("omega", params.omega)?;
        require_positive("gap_width", params.gap_width)?;
        require_positive("volume", params.volume)?;
        require_positive("box_length", params.box_length)?;
        require_positive("drift_length", params.drift_length)?;
        require_positive("velocity", params.velocity)?;
        for (name, value) in [("electrons", params.electrons), ("photons", params.photons)] {
            if !value.is_finite() || value < 0.0 {
                return Err(Error::arg(name, format!("must be finite and >= 0, got {value}")));
            }
        }
        let capacitance = params.capacitance_farads()?;

        let mut warnings = Vec::new();
        let beta = params.velocity / SPEED_OF_LIGHT;
        if beta >= RELATIVITY_LIMIT {
            return Err(Error::PhysicalValidity(format!(
                "v/c = {beta:.4e} is at or above {RELATIVITY_LIMIT}; the nonrelativistic model does not apply"
            )));
        }
        if beta > RELATIVITY_WARNING {
            warnings.push(format!(
                "v/c = {beta:.4e} exceeds {RELATIVITY_WARNING}; relativistic corrections are not modelled"
            ));
        }
        let alpha = HBAR * params.omega / (ELECTRON_MASS * params.velocity * params.velocity);
        if alpha >= 1.0 {
            return Err(Error::PhysicalValidity(format!(
                "alpha = hbar*omega/(m v^2) = {alpha:.4e} >= 1; the photon energy exceeds the electron kinetic-energy scale"
            )));
        }
        if alpha > ALPHA_WARNING {
            warnings.push(format!(
                "alpha = {alpha:.4e} exceeds {ALPHA_WARNING}; the small-alpha expansion is unreliable"
            ));
        }
        Ok(Self {
            params,
            capacitance,
            warnings,
        })
    }

    pub fn params(&self) -> &KlystronParams {
        &self.params
    }

    pub fn warnings(&self) -> &[String] {
        &self.warnings
    }

    pub fn capacitance(&self) -> f64 {
        self.capacitance
    }

    /// `γ = ωd/(2v)`.
    pub fn transit_angle(&self) -> f64 {
        self.params.omega * self.params.gap_width / (2.0 * self.params.velocity)
    }

    pub fn gain_factor(&self) -> f64 {
        // γ is finite by construction.
        gain_factor(self.transit_angle()).unwrap_or(0.0)
    }

    /// Electron flux `J₀ = evN/V`.
    pub fn electron_flux(&self) -> f64 {
        ELEMENTARY_CHARGE * self.params.velocity * self.params.electrons / self.params.volume
    }

    /// Stored photon energy `E_p = nħω`, J.
    pub fn stored_energy(&self) -> f64 {
        self.params.photons * HBAR * self.params.omega
    }

    /// `α = ħω/(mv²) = mω/(ħk²)`.
    pub fn alpha(&self) -> f64 {
        HBAR * self.params.omega / (ELECTRON_MASS * self.params.velocity * self.params.velocity)
    }

    /// Electron wavenumber `k = mv/ħ`, 1/m.
    pub fn wavenumber(&self) -> f64 {
        ELECTRON_MASS * self.params.velocity / HBAR
    }

    /// `J₀² / (C² d⁴)`, shared by every rate.
    fn flux_factor(&self) -> f64 {
        let d = self.params.gap_width;
        let r = self.electron_flux() / (self.capacitance * d * d);
        r * r
    }

    /// Stimulated photon-pair output rate `64π³J₀²E_p²g(γ)/(mħ⁴C²d⁴ω⁷)`, pairs/s.
    pub fn rate_stimulated(&self) -> f64 {
        let omega = self.params.omega;
        let field = self.stored_energy() / HBAR;
        64.0 * PI.powi(3) * self.flux_factor() * field * field * self.gain_factor()
            / (ELECTRON_MASS * HBAR * HBAR * omega.powi(7))
    }

    /// Spontaneous photon-pair output rate, pairs/s:
    /// `32π³J₀²(ħω)²g(γ)/(mħ⁴C²d⁴ω⁷) + 16π³J₀²v²/(ħ³C²d⁴ω⁶)`.
    pub fn rate_spontaneous(&self) -> f64 {
        let omega = self.params.omega;
        32.0 * PI.powi(3) * self.flux_factor() * omega * omega * self.gain_factor()
            / (ELECTRON_MASS * HBAR * HBAR * omega.powi(7))
            + self.velocity_term()
    }

    /// `16π³J₀²v²/(ħ³C²d⁴ω⁶)`; the part of the rate that does not involve g(γ).
    fn velocity_term(&self) -> f64 {
        let v = self.params.velocity;
        16.0 * PI.powi(3) * self.flux_factor() * v * v / (HBAR.powi(3) * self.params.omega.powi(6))
    }

    /// Net photon-pair output rate.
    ///
    /// `total` is evaluated from the combined expression
    /// `32π³J₀²[2E_p² + (ħω)²]g(γ)/(mħ⁴C²d⁴ω⁷) + 16π³J₀²v²/(ħ³C²d⁴ω⁶)`,
    /// independently of the two components.
    pub fn rate_total(&self) -> RateBreakdown {
        let omega = self.params.omega;
        let field = self.stored_energy() / HBAR;
        let total = 32.0 * PI.powi(3) * self.flux_factor() * (2.0 * field * field + omega * omega) * self.gain_factor()
            / (ELECTRON_MASS * HBAR * HBAR * omega.powi(7))
            + self.velocity_term();
        RateBreakdown {
            stimulated: self.rate_stimulated(),
            spontaneous: self.rate_spontaneous(),
            total,
        }
    }

    /// `16π³e²ħ⁵k⁶/(L⁶C²d⁴m⁶ω⁶)`, the common prefactor of the on-shell
    /// emission and absorption coefficients.
    fn on_shell_prefactor(&self) -> f64 {
        let d = self.params.gap_width;
        let charge = ELEMENTARY_CHARGE / (self.capacitance * d * d);
        // ħ⁵k⁶/m⁶ = (ħk/m)⁶/ħ
        let group_velocity = HBAR * self.wavenumber() / ELECTRON_MASS;
        16.0 * PI.powi(3) * charge * charge * (group_velocity / (self.params.box_length * self.params.omega)).powi(6)
            / HBAR
    }

    /// Coefficient of `δ(E_I − E_F − 2ħω)` in the emission rate with `n` photons stored:
    /// `16π³e²ħ⁵k⁶/(L⁶C²d⁴m⁶ω⁶)·(n+1)²·[1 − 2α(1 − γcotγ)]·sin⁴γ`, in J/s.
    pub fn reduced_emission_rate(&self, n: f64) -> Result<f64> {
        let n = require_photon_number(n)?;
        Ok(self.on_shell_prefactor() * (n + 1.0).powi(2) * self.asymmetry_bracket(1.0))
    }

    /// Absorption counterpart: `(n+1)² → n²` and `α → −α`.
    pub fn reduced_absorption_rate(&self, n: f64) -> Result<f64> {
        let n = require_photon_number(n)?;
        Ok(self.on_shell_prefactor() * n * n * self.asymmetry_bracket(-1.0))
    }

    /// `[1 ∓ 2α(1 − γcotγ)]·sin⁴γ`, written as `sin⁴γ ± 2α·g(γ)` to avoid the cot pole.
    fn asymmetry_bracket(&self, sign: f64) -> f64 {
        let s = self.transit_angle().sin();
        s.powi(4) + sign * 2.0 * self.alpha() * self.gain_factor()
    }
}

fn require_photon_number(n: f64) -> Result<f64> {
    if n.is_finite() && n >= 0.0 {
        Ok(n)
    } else {
        Err(Error::arg("n", format!("must be finite and >= 0, got {n}")))
    }
}

/// Photon-pair output rates, pairs per second.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RateBreakdown {
    pub stimulated: f64,
    pub spontaneous: f64,
    pub total: f64,
}

impl RateBreakdown {
    /// `|total − (stimulated + spontaneous)| / |total|` (absolute when total is 0).
    pub fn identity_residual(&self) -> f64 {
        let diff = (self.total - (self.stimulated + self.spontaneous)).abs();
        if self.total == 0.0 {
            diff
        } else {
            diff / self.total.abs()
        }
    }
}

fn expansion_alpha(k: f64, omega: f64) -> Result<f64> {
    require_positive("k", k)?;
    if !omega.is_finite() {
        return Err(Error::arg("omega", format!("must be finite, got {omega}")));
    }
    Ok(ELECTRON_MASS * omega / (HBAR * k * k))
}

/// Electron wavenumber after emitting one photon of angular frequency `omega`,
/// from exact energy conservation: `k′ = k·√(1 − 2α)`, `α = mω/(ħk²)`.
///
/// A negative `omega` describes absorption. Fails when the electron lacks the
/// kinetic energy to emit (`α > 1/2`).
pub fn wavenumber_after_emission_exact(k: f64, omega: f64) -> Result<f64> {
    let alpha = expansion_alpha(k, omega)?;
    let mut radicand = 1.0 - 2.0 * alpha;
    // α = 1/2 up to rounding: all kinetic energy goes into the photon.
    if radicand < 0.0 && radicand > -4.0 * f64::EPSILON {
        radicand = 0.0;
    }
    if radicand < 0.0 {
        return Err(Error::PhysicalValidity(format!(
            "electron with k = {k:e} 1/m cannot emit at omega = {omega:e} rad/s (alpha = {alpha:e} > 1/2)"
        )));
    }
    Ok(k * radicand.sqrt())
}

/// Second-order small-α form `k′ = k·[1 − α(1 + α/2)]`.
pub fn wavenumber_after_emission_approx(k: f64, omega: f64) -> Result<f64> {
    let alpha = expansion_alpha(k, omega)?;
    if alpha >= 1.0 {
        return Err(Error::arg(
            "omega",
            format!("alpha = {alpha:e} must be < 1 for the expansion"),
        ));
    }
    Ok(k * (1.0 - alpha * (1.0 + 0.5 * alpha)))
}

/// Wavenumbers `k_ν = νπ/(2l)`, `ν = 1..=count`, allowed by an infinitely high
/// repeller wall at drift distance `l`.
pub fn allowed_wavenumbers(drift_length: f64, count: usize) -> Result<Vec<f64>> {
    require_positive("drift_length", drift_length)?;
    if count == 0 {
        return Err(Error::arg("count", "must be at least 1"));
    }
    Ok((1..=count).map(|nu| nu as f64 * PI / (2.0 * drift_length)).collect())
}
