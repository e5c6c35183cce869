//! Reference operating point checked against values evaluated independently
//! in 60-digit arithmetic (30-digit evaluation agrees to 1e-30).

#![allow(clippy::excessive_precision)]

use std::f64::consts::PI;

use qklyst_core::design::{design_for, peak_gain, DEFAULT_PEAK_WINDOW};
use qklyst_core::klystron::{gain_factor, Capacitance, Klystron, KlystronParams};

fn reference() -> KlystronParams {
    KlystronParams {
        omega: 2.0 * PI * 1e9,
        gap_width: 1e-3,
        capacitance: Capacitance::PlateArea(1e-4),
        volume: 1e-6,
        box_length: 1e-2,
        drift_length: 5e-3,
        velocity: 7.674640624710513e5,
        electrons: 1e6,
        photons: 10.0,
    }
}

fn assert_rel(value: f64, expected: f64, tol: f64, what: &str) {
    let rel = ((value - expected) / expected).abs();
    assert!(rel <= tol, "{what}: {value:e} vs {expected:e} (rel {rel:e})");
}

#[test]
fn reference_transit_angle_and_alpha() {
    let k = Klystron::new(reference()).unwrap();
    assert_rel(k.transit_angle(), 4.0934720037243359, 1e-14, "gamma");
    assert_rel(k.gain_factor(), 0.84314551092580826, 1e-13, "g");
    assert_rel(k.alpha(), 1.2349544435590324e-6, 1e-13, "alpha");
}

#[test]
fn reference_rates() {
    let rates = Klystron::new(reference()).unwrap().rate_total();
    assert_rel(rates.stimulated, 3.2526017343015624e88, 1e-12, "stimulated");
    assert_rel(rates.spontaneous, 7.8094119579347659e91, 1e-12, "spontaneous");
    assert_rel(rates.total, 7.8126645596690674e91, 1e-12, "total");
}

#[test]
fn reference_on_shell_coefficients() {
    let k = Klystron::new(reference()).unwrap();
    assert_rel(
        k.reduced_emission_rate(10.0).unwrap(),
        2.7242885028916851e25,
        1e-12,
        "emission",
    );
    assert_rel(
        k.reduced_absorption_rate(10.0).unwrap(),
        2.2514567956916854e25,
        1e-12,
        "absorption",
    );
}

#[test]
fn gain_peak_matches_design_values() {
    let peak = peak_gain(DEFAULT_PEAK_WINDOW).unwrap();
    assert!((4.08..=4.10).contains(&peak.gamma));
    assert!((0.841..=0.845).contains(&peak.gain));
    assert!((peak.gamma - 4.0934720037243357).abs() < 1e-7);
    assert!(!peak.at_boundary);
}

#[test]
fn one_gigahertz_design_chain() {
    let r = design_for(1e9, 1e-3, None).unwrap();
    assert!((r.u0 - 1.72).abs() / 1.72 < 0.03, "U0 = {}", r.u0);
    assert!((r.v_over_c - 2.56e-3).abs() / 2.56e-3 < 0.01, "v/c = {}", r.v_over_c);
    assert_rel(r.v, 767464.06, 1e-7, "v");
    assert!(r.warnings.is_empty());
}

#[test]
fn gain_factor_reference_points() {
    assert_rel(gain_factor(4.09).unwrap(), 0.84308908441880556, 1e-14, "g(4.09)");
    assert_rel(gain_factor(1.0).unwrap(), -0.17944329704570825, 1e-14, "g(1)");
    assert_rel(gain_factor(5e-4).unwrap(), -5.2083325520833860e-21, 1e-14, "g(5e-4)");
}
