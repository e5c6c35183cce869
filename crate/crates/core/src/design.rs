//! Design layer on top of the closed forms: where the gain factor peaks,
//! what the gain curve looks like, and what beam a given frequency and gap
//! width call for.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::constants::{ELECTRON_MASS, ELEMENTARY_CHARGE, HBAR, SPEED_OF_LIGHT};
use crate::error::{require_positive, Error, Result};
use crate::klystron::{
    gain_factor, Klystron, KlystronParams, RateBreakdown, ALPHA_WARNING, RELATIVITY_LIMIT, RELATIVITY_WARNING,
};

/// Default upper end of the peak-search window, `(0, 2π]`.
///
/// The positive lobes of `g` grow roughly linearly with γ, so "the" peak is
/// only meaningful relative to a window. `(0, 2π]` covers one full period:
/// the negative lobe on `(0, π)` and the first positive lobe, whose maximum
/// sits at γ ≈ 4.0935.
pub const DEFAULT_PEAK_WINDOW: f64 = 2.0 * PI;

/// Largest coarse-scan spacing used by [`peak_gain`].
pub const MAX_SCAN_STEP: f64 = 1e-3;

/// Bracket width at which golden-section refinement stops.
pub const REFINE_TOLERANCE: f64 = 1e-8;

/// Result of a gain-peak search over `(0, window]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GainPeak {
    pub gamma: f64,
    pub gain: f64,
    pub window: f64,
    /// True when the maximum sits on the window edge rather than at an
    /// interior stationary point.
    pub at_boundary: bool,
}

/// Global maximum of the gain factor on `(0, window]` with the default
/// scan step.
pub fn peak_gain(window: f64) -> Result<GainPeak> {
    peak_gain_with_step(window, MAX_SCAN_STEP)
}

/// Dense scan with spacing at most `scan_step`, then golden-section
/// refinement of the best bracket down to [`REFINE_TOLERANCE`].
pub fn peak_gain_with_step(window: f64, scan_step: f64) -> Result<GainPeak> {
    require_positive("gamma_max", window)?;
    require_positive("scan_step", scan_step)?;
    let intervals = (window / scan_step.min(MAX_SCAN_STEP)).ceil().max(2.0) as usize;
    let h = window / intervals as f64;

    let mut best = (1, f64::NEG_INFINITY);
    for i in 1..=intervals {
        let g = gain_factor(i as f64 * h)?;
        if g > best.1 {
            best = (i, g);
        }
    }
    let lo = (best.0 - 1) as f64 * h;
    let hi = ((best.0 + 1) as f64 * h).min(window);
    let (gamma, gain) = golden_section_max(
        |x| gain_factor(x).unwrap_or(f64::NEG_INFINITY),
        lo,
        hi,
        REFINE_TOLERANCE,
    );
    // The bracket may not beat the grid point when the maximum is on an edge.
    let (gamma, gain) = if gain >= best.1 {
        (gamma, gain)
    } else {
        (best.0 as f64 * h, best.1)
    };
    let at_boundary = window - gamma < 10.0 * REFINE_TOLERANCE || gamma < 10.0 * REFINE_TOLERANCE;
    Ok(GainPeak {
        gamma,
        gain,
        window,
        at_boundary,
    })
}

/// Golden-section search for the maximum of a unimodal `f` on `[lo, hi]`.
fn golden_section_max(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, tol: f64) -> (f64, f64) {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = hi - inv_phi * (hi - lo);
    let mut x2 = lo + inv_phi * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    while hi - lo > tol {
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + inv_phi * (hi - lo);
            f2 = f(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - inv_phi * (hi - lo);
            f1 = f(x1);
        }
    }
    let x = 0.5 * (lo + hi);
    (x, f(x))
}

/// Operating point solved from a photon frequency and gap width.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DesignReport {
    pub gamma_star: f64,
    pub g_star: f64,
    /// Gap transit phase `θ_g = 2γ`.
    pub theta_g: f64,
    #[serde(rename = "v_m_per_s")]
    pub v: f64,
    pub v_over_c: f64,
    /// Acceleration voltage from `eU₀ = mv²/2`.
    #[serde(rename = "U0_volts")]
    pub u0: f64,
    pub alpha: f64,
    pub warnings: Vec<String>,
}

/// Beam velocity, acceleration voltage and α needed to run a gap of width
/// `gap_width` at transit angle `gamma_target` for photons of frequency
/// `frequency_hz` (ω = 2πf). Without a target the peak of the default
/// window is used.
pub fn design_for(frequency_hz: f64, gap_width: f64, gamma_target: Option<f64>) -> Result<DesignReport> {
    require_positive("frequency", frequency_hz)?;
    require_positive("gap_width", gap_width)?;
    let gamma = match gamma_target {
        Some(g) => require_positive("gamma", g)?,
        None => peak_gain(DEFAULT_PEAK_WINDOW)?.gamma,
    };
    let omega = 2.0 * PI * frequency_hz;
    let v = omega * gap_width / (2.0 * gamma);
    let v_over_c = v / SPEED_OF_LIGHT;
    if v_over_c >= RELATIVITY_LIMIT {
        return Err(Error::PhysicalValidity(format!(
            "required beam speed v = {v:.4e} m/s (v/c = {v_over_c:.4e}) is at or above {RELATIVITY_LIMIT} c"
        )));
    }
    let alpha = HBAR * omega / (ELECTRON_MASS * v * v);
    let mut warnings = Vec::new();
    if v_over_c > RELATIVITY_WARNING {
        warnings.push(format!(
            "v/c = {v_over_c:.4e} exceeds {RELATIVITY_WARNING}; relativistic corrections are not modelled"
        ));
    }
    if alpha > ALPHA_WARNING {
        warnings.push(format!(
            "alpha = {alpha:.4e} exceeds {ALPHA_WARNING}; the small-alpha expansion is unreliable"
        ));
    }
    Ok(DesignReport {
        gamma_star: gamma,
        g_star: gain_factor(gamma)?,
        theta_g: 2.0 * gamma,
        v,
        v_over_c,
        u0: ELECTRON_MASS * v * v / (2.0 * ELEMENTARY_CHARGE),
        alpha,
        warnings,
    })
}

/// Samples `g` at `γ_i = γ_min + i·(γ_max − γ_min)/steps`, `i = 1..=steps`,
/// i.e. on the half-open window `(γ_min, γ_max]`.
///
/// Grid points that coincide with a multiple of π to within rounding carry
/// an exact zero.
pub fn sweep_gain(gamma_min: f64, gamma_max: f64, steps: usize) -> Result<Vec<(f64, f64)>> {
    if !(gamma_min.is_finite() && gamma_max.is_finite()) || gamma_min < 0.0 || gamma_min >= gamma_max {
        return Err(Error::arg(
            "gamma range",
            format!("need 0 <= gamma_min < gamma_max, got ({gamma_min}, {gamma_max}]"),
        ));
    }
    if steps < 2 {
        return Err(Error::arg("steps", format!("need at least 2 samples, got {steps}")));
    }
    let h = (gamma_max - gamma_min) / steps as f64;
    let snap = 1e-12 * gamma_max.max(1.0);
    (1..=steps)
        .map(|i| {
            let gamma = gamma_min + i as f64 * h;
            if (gamma - (gamma / PI).round() * PI).abs() <= snap {
                Ok((gamma, 0.0))
            } else {
                gain_factor(gamma).map(|g| (gamma, g))
            }
        })
        .collect()
}

/// Parameter swept by [`sweep_rates`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RateAxis {
    /// Angular frequency ω, rad/s.
    Omega,
    /// Gap width d, m. A capacitance given by plate area follows `ε₀A/d`.
    GapWidth,
    /// Electron speed v, m/s.
    Velocity,
    /// Stored photon number n.
    Photons,
    /// Electrons per beam N.
    Electrons,
}

impl RateAxis {
    pub fn name(self) -> &'static str {
        match self {
            RateAxis::Omega => "omega",
            RateAxis::GapWidth => "d",
            RateAxis::Velocity => "v",
            RateAxis::Photons => "n",
            RateAxis::Electrons => "N",
        }
    }

    pub fn from_name(name: &str) -> Result<Self> {
        match name {
            "omega" => Ok(RateAxis::Omega),
            "d" | "gap_width" => Ok(RateAxis::GapWidth),
            "v" | "velocity" => Ok(RateAxis::Velocity),
            "n" | "photons" => Ok(RateAxis::Photons),
            "N" | "electrons" => Ok(RateAxis::Electrons),
            other => Err(Error::arg(
                "axis",
                format!("unknown sweep axis `{other}` (expected omega, d, v, n or N)"),
            )),
        }
    }

    fn apply(self, params: &mut KlystronParams, value: f64) {
        match self {
            RateAxis::Omega => params.omega = value,
            RateAxis::GapWidth => params.gap_width = value,
            RateAxis::Velocity => params.velocity = value,
            RateAxis::Photons => params.photons = value,
            RateAxis::Electrons => params.electrons = value,
        }
    }
}

/// One sweep row; a row whose parameters violate the model carries the error.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub value: f64,
    pub rates: Result<RateBreakdown>,
}

/// Evaluates the rates at `steps` evenly spaced values of `axis` from
/// `start` to `stop` inclusive (`steps = 1` evaluates `start` alone).
/// Every row is computed independently from `base`.
pub fn sweep_rates(
    base: &KlystronParams,
    axis: RateAxis,
    start: f64,
    stop: f64,
    steps: usize,
) -> Result<Vec<SweepRow>> {
    if !(start.is_finite() && stop.is_finite()) {
        return Err(Error::arg(
            "range",
            format!("sweep bounds must be finite, got {start}..{stop}"),
        ));
    }
    if steps == 0 {
        return Err(Error::arg("steps", "need at least 1 row"));
    }
    let h = if steps == 1 {
        0.0
    } else {
        (stop - start) / (steps - 1) as f64
    };
    Ok((0..steps)
        .map(|i| {
            let value = if i + 1 == steps && steps > 1 {
                stop
            } else {
                start + i as f64 * h
            };
            let mut params = *base;
            axis.apply(&mut params, value);
            SweepRow {
                value,
                rates: Klystron::new(params).map(|k| k.rate_total()),
            }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::klystron::{transit_angle, Capacitance};
    use approx::assert_relative_eq;

    #[test]
    fn default_peak_is_first_positive_lobe() {
        let peak = peak_gain(DEFAULT_PEAK_WINDOW).unwrap();
        // 40-digit root of g'(γ) = 0: γ* = 4.0934720037243357, g* = 0.84314551092580826
        assert!((peak.gamma - 4.093_472_003_724_336).abs() < 1e-7, "{peak:?}");
        assert!((peak.gain - 0.843_145_510_925_808_3).abs() < 1e-13, "{peak:?}");
        assert!(!peak.at_boundary);
    }

    #[test]
    fn wider_window_finds_larger_lobes() {
        let peak = peak_gain(4.0 * PI).unwrap();
        assert!(peak.gamma > 3.0 * PI && peak.gain > 2.8, "{peak:?}");
    }

    #[test]
    fn first_half_period_has_no_positive_gain() {
        let peak = peak_gain(PI).unwrap();
        assert!(peak.gain <= 0.0);
        assert!(peak.at_boundary);
        assert!((peak.gamma - PI).abs() < 1e-6);
    }

    #[test]
    fn refinement_does_not_depend_on_scan_step() {
        let a = peak_gain_with_step(DEFAULT_PEAK_WINDOW, 1e-3).unwrap();
        let b = peak_gain_with_step(DEFAULT_PEAK_WINDOW, 5e-4).unwrap();
        assert!((a.gamma - b.gamma).abs() < 1e-6);
    }

    #[test]
    fn peak_search_is_bitwise_reproducible() {
        let a = peak_gain(DEFAULT_PEAK_WINDOW).unwrap();
        let b = peak_gain(DEFAULT_PEAK_WINDOW).unwrap();
        assert_eq!(a.gamma.to_bits(), b.gamma.to_bits());
        assert_eq!(a.gain.to_bits(), b.gain.to_bits());
    }

    #[test]
    fn one_gigahertz_one_millimetre_design() {
        let r = design_for(1e9, 1e-3, None).unwrap();
        assert!((r.u0 - 1.72).abs() / 1.72 < 0.03, "{r:?}");
        assert!((r.v_over_c - 2.56e-3).abs() / 2.56e-3 < 0.01, "{r:?}");
        assert!(r.warnings.is_empty());
        assert_relative_eq!(r.g_star, gain_factor(r.gamma_star).unwrap(), max_relative = 1e-12);
        assert_relative_eq!(
            r.u0,
            ELECTRON_MASS * r.v * r.v / (2.0 * ELEMENTARY_CHARGE),
            max_relative = 1e-12
        );
        assert_relative_eq!(r.theta_g, 2.0 * r.gamma_star);
        let gamma = transit_angle(2.0 * PI * 1e9, 1e-3, r.v).unwrap();
        assert_relative_eq!(gamma, r.gamma_star, max_relative = 1e-12);
    }

    #[test]
    fn design_scales_with_gap_width() {
        let a = design_for(1e9, 1e-3, Some(4.09)).unwrap();
        let b = design_for(1e9, 2e-3, Some(4.09)).unwrap();
        assert_relative_eq!(b.v, 2.0 * a.v, max_relative = 1e-14);
        assert_relative_eq!(b.u0, 4.0 * a.u0, max_relative = 1e-14);
    }

    #[test]
    fn design_refuses_relativistic_beam() {
        assert!(matches!(design_for(1e12, 10.0, None), Err(Error::PhysicalValidity(_))));
        let r = design_for(1e10, 1.3e-3, None).unwrap();
        assert!(r.v_over_c > RELATIVITY_WARNING);
        assert_eq!(r.warnings.len(), 1);
        assert!(design_for(0.0, 1e-3, None).is_err());
        assert!(design_for(1e9, 1e-3, Some(-1.0)).is_err());
    }

    #[test]
    fn gain_curve_has_exact_zeros_at_multiples_of_pi() {
        let curve = sweep_gain(0.0, 4.0 * PI, 2000).unwrap();
        assert_eq!(curve.len(), 2000);
        for m in 1..=4 {
            let (gamma, g) = curve[500 * m - 1];
            assert!((gamma - m as f64 * PI).abs() < 1e-12);
            assert_eq!(g, 0.0);
        }
        assert!(curve
            .iter()
            .filter(|(gamma, _)| *gamma < PI - 1e-9)
            .all(|(_, g)| *g < 0.0));
    }

    #[test]
    fn gain_curve_maximum_matches_peak_search() {
        for window in [DEFAULT_PEAK_WINDOW, 4.0 * PI] {
            let curve = sweep_gain(0.0, window, 4000).unwrap();
            let (gamma, g) = curve
                .iter()
                .copied()
                .fold((0.0, f64::NEG_INFINITY), |a, b| if b.1 > a.1 { b } else { a });
            let peak = peak_gain(window).unwrap();
            let h = window / 4000.0;
            assert!((gamma - peak.gamma).abs() <= h);
            assert!(g <= peak.gain && peak.gain - g < 1e-4);
        }
    }

    #[test]
    fn gain_curve_validation() {
        assert!(sweep_gain(0.0, 1.0, 1).is_err());
        assert!(sweep_gain(1.0, 1.0, 10).is_err());
        assert!(sweep_gain(-1.0, 1.0, 10).is_err());
        assert!(sweep_gain(0.0, f64::NAN, 10).is_err());
    }

    fn base() -> KlystronParams {
        KlystronParams {
            omega: 2.0 * PI * 1e9,
            gap_width: 1e-3,
            capacitance: Capacitance::PlateArea(1e-4),
            volume: 1e-6,
            box_length: 1e-2,
            drift_length: 5e-3,
            velocity: 7.7e5,
            electrons: 1e6,
            photons: 4.0,
        }
    }

    #[test]
    fn photon_sweep_is_quadratic_in_stimulated_rate() {
        let rows = sweep_rates(&base(), RateAxis::Photons, 0.0, 10.0, 11).unwrap();
        let unit = rows[1].rates.as_ref().unwrap().stimulated;
        for row in &rows {
            let r = row.rates.as_ref().unwrap();
            assert_relative_eq!(
                r.stimulated,
                unit * row.value * row.value,
                max_relative = 1e-13,
                epsilon = 0.0
            );
        }
        assert_eq!(rows[0].rates.as_ref().unwrap().stimulated, 0.0);
    }

    #[test]
    fn electron_sweep_scales_quadratically() {
        let rows = sweep_rates(&base(), RateAxis::Electrons, 1e6, 4e6, 4).unwrap();
        let first = *rows[0].rates.as_ref().unwrap();
        for row in &rows {
            let r = row.rates.as_ref().unwrap();
            let s = (row.value / 1e6).powi(2);
            assert_relative_eq!(r.total, first.total * s, max_relative = 1e-13);
            assert_relative_eq!(r.spontaneous, first.spontaneous * s, max_relative = 1e-13);
        }
    }

    #[test]
    fn single_point_sweep_equals_direct_evaluation() {
        let rows = sweep_rates(&base(), RateAxis::Velocity, 8e5, 9e5, 1).unwrap();
        assert_eq!(rows.len(), 1);
        let mut p = base();
        p.velocity = 8e5;
        assert_eq!(rows[0].rates.as_ref().unwrap(), &Klystron::new(p).unwrap().rate_total());
    }

    #[test]
    fn invalid_rows_do_not_abort_the_sweep() {
        let rows = sweep_rates(&base(), RateAxis::Velocity, 1e6, 1e8, 3).unwrap();
        assert!(rows[0].rates.is_ok());
        assert!(matches!(rows[2].rates, Err(Error::PhysicalValidity(_))));
        assert_eq!(rows[2].value, 1e8);
    }

    #[test]
    fn sweeps_are_reproducible() {
        let a = sweep_rates(&base(), RateAxis::Omega, 1e9, 1e10, 7).unwrap();
        let b = sweep_rates(&base(), RateAxis::Omega, 1e9, 1e10, 7).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn axis_names_round_trip() {
        for axis in [
            RateAxis::Omega,
            RateAxis::GapWidth,
            RateAxis::Velocity,
            RateAxis::Photons,
            RateAxis::Electrons,
        ] {
            assert_eq!(RateAxis::from_name(axis.name()).unwrap(), axis);
        }
        assert!(RateAxis::from_name("q").is_err());
    }
}
