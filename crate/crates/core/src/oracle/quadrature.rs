use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::report::{relative_error, VerificationReport};
use crate::error::{Error, Result};

/// Absolute tolerance of the matrix-element quadrature on the unit interval.
pub const QUADRATURE_TOLERANCE: f64 = 1e-12;
/// Relative agreement required between quadrature and closed form.
pub const MATRIX_ELEMENT_TOLERANCE: f64 = 1e-8;
/// Pairs with `|k − k′| < SINGULAR_EXCLUSION · k` are rejected.
pub const SINGULAR_EXCLUSION: f64 = 1e-6;

const MAX_INTERVALS: usize = 10_000;

// 15-point Kronrod abscissae on [-1, 1] (non-negative half) and weights;
// the odd-indexed abscissae are the 7-point Gauss nodes.
#[allow(clippy::excessive_precision)]
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];
#[allow(clippy::excessive_precision)]
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];
#[allow(clippy::excessive_precision)]
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

/// Result of an adaptive integration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Quadrature {
    pub value: f64,
    /// Sum of the per-interval |Kronrod − Gauss| estimates.
    pub error_estimate: f64,
    pub intervals: usize,
}

fn kronrod_15(f: &impl Fn(f64) -> f64, a: f64, b: f64) -> (f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = WGK[7] * fc;
    let mut gauss = WG[3] * fc;
    for j in 0..7 {
        let dx = half * XGK[j];
        let pair = f(center - dx) + f(center + dx);
        kronrod += WGK[j] * pair;
        if j % 2 == 1 {
            gauss += WG[j / 2] * pair;
        }
    }
    (kronrod * half, ((kronrod - gauss) * half).abs())
}

/// Globally adaptive Gauss–Kronrod (7, 15) integration of `f` over `[a, b]`.
///
/// The interval with the largest error estimate is bisected until the
/// summed estimate drops below `abs_tol`. Fails if that takes more than
/// 10 000 subintervals.
pub fn adaptive_gauss_kronrod(f: impl Fn(f64) -> f64, a: f64, b: f64, abs_tol: f64) -> Result<Quadrature> {
    if !(a.is_finite() && b.is_finite()) || a >= b {
        return Err(Error::arg("interval", format!("need finite a < b, got [{a}, {b}]")));
    }
    if abs_tol.is_nan() || abs_tol <= 0.0 {
        return Err(Error::arg("abs_tol", format!("must be positive, got {abs_tol}")));
    }
    // (a, b, value, error)
    let (v, e) = kronrod_15(&f, a, b);
    let mut pieces = vec![(a, b, v, e)];
    loop {
        let total_err: f64 = pieces.iter().map(|p| p.3).sum();
        let value: f64 = pieces.iter().map(|p| p.2).sum();
        if !value.is_finite() {
            return Err(Error::arg("integrand", "produced a non-finite value"));
        }
        if total_err <= abs_tol {
            return Ok(Quadrature {
                value,
                error_estimate: total_err,
                intervals: pieces.len(),
            });
        }
        if pieces.len() >= MAX_INTERVALS {
            return Err(Error::arg(
                "integrand",
                format!("no convergence after {MAX_INTERVALS} subintervals (error estimate {total_err:e})"),
            ));
        }
        let worst = pieces
            .iter()
            .enumerate()
            .max_by(|x, y| x.1 .3.total_cmp(&y.1 .3))
            .map(|(i, _)| i)
            .unwrap_or(0);
        let (lo, hi, _, _) = pieces.swap_remove(worst);
        let mid = 0.5 * (lo + hi);
        let (vl, el) = kronrod_15(&f, lo, mid);
        let (vr, er) = kronrod_15(&f, mid, hi);
        pieces.push((lo, mid, vl, el));
        pieces.push((mid, hi, vr, er));
    }
}

fn check_pair(k: f64, k_prime: f64, gap_width: f64, box_length: f64) -> Result<f64> {
    for (name, value) in [
        ("k", k),
        ("k_prime", k_prime),
        ("gap_width", gap_width),
        ("box_length", box_length),
    ] {
        if !(value.is_finite() && value > 0.0) {
            return Err(Error::arg(name, format!("must be finite and positive, got {value}")));
        }
    }
    if gap_width >= box_length {
        return Err(Error::arg(
            "gap_width",
            format!("need d < L, got d = {gap_width}, L = {box_length}"),
        ));
    }
    let delta = k - k_prime;
    if delta.abs() < SINGULAR_EXCLUSION * k {
        return Err(Error::arg(
            "k_prime",
            format!(
                "|k − k′| = {:e} is inside the excluded neighbourhood of k = k′",
                delta.abs()
            ),
        ));
    }
    Ok(delta)
}

/// `(2/L²)·sin²[(k − k′)d/2]/(k − k′)⁴`.
pub fn matrix_element_closed_form(k: f64, k_prime: f64, gap_width: f64, box_length: f64) -> Result<f64> {
    let delta = check_pair(k, k_prime, gap_width, box_length)?;
    let s = (0.5 * delta * gap_width).sin();
    let l2 = box_length * box_length;
    let d2 = delta * delta;
    Ok(2.0 * s * s / (l2 * d2 * d2))
}

/// Squared gap matrix element by numerical integration.
///
/// The standing waves `(e^{ikx} + e^{−ikx})/√(2L)` contribute two slowly
/// oscillating cross terms `e^{±i(k−k′)x}/(2L)`. Integrating `x·e^{±iΔx}`
/// by parts over `[0, d]`, the resonant piece of each is
/// `(±i/Δ)·∫₀ᵈ e^{±iΔx} dx`. The oscillatory integral is evaluated by
/// adaptive quadrature on the rescaled interval `t = x/d ∈ [0, 1]` and the
/// two cross terms are combined in quadrature.
pub fn matrix_element_quadrature(k: f64, k_prime: f64, gap_width: f64, box_length: f64) -> Result<f64> {
    let delta = check_pair(k, k_prime, gap_width, box_length)?;
    let phase = delta * gap_width;
    let mut sum_sq = 0.0;
    for sign in [1.0, -1.0] {
        let re = adaptive_gauss_kronrod(|t| (sign * phase * t).cos(), 0.0, 1.0, QUADRATURE_TOLERANCE)?;
        let im = adaptive_gauss_kronrod(|t| (sign * phase * t).sin(), 0.0, 1.0, QUADRATURE_TOLERANCE)?;
        // |(±i/Δ)·d·(re + i·im)| / (2L)
        let magnitude = gap_width * re.value.hypot(im.value) / (delta.abs() * 2.0 * box_length);
        sum_sq += magnitude * magnitude;
    }
    Ok(sum_sq)
}

/// One randomized comparison.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MatrixElementCheck {
    pub k: f64,
    pub k_prime: f64,
    pub gap_width: f64,
    pub box_length: f64,
    pub closed_form: f64,
    pub quadrature: f64,
    pub relative_error: f64,
}

fn log_uniform(rng: &mut impl Rng, lo: f64, hi: f64) -> f64 {
    (rng.random_range(lo.ln()..hi.ln())).exp()
}

/// Compares quadrature and closed form on `count` random tuples.
///
/// `k` spans 10³–10⁵ m⁻¹, `k′ = k√(1 − 2α)` with α in 10⁻⁴–5·10⁻², `d` in
/// 10⁻⁴–10⁻² m and `L` between 10d and 10³d. Tuples whose phase `(k−k′)d/2`
/// lies within 0.1 of a nonzero multiple of π, where the closed form
/// vanishes and a relative comparison is meaningless, are redrawn.
pub fn verify_matrix_elements(count: usize, seed: u64) -> Result<(VerificationReport, Vec<MatrixElementCheck>)> {
    if count == 0 {
        return Err(Error::arg("count", "must be at least 1"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut checks = Vec::with_capacity(count);
    while checks.len() < count {
        let k = log_uniform(&mut rng, 1e3, 1e5);
        let alpha = log_uniform(&mut rng, 1e-4, 5e-2);
        let k_prime = k * (1.0 - 2.0 * alpha).sqrt();
        let gap_width = log_uniform(&mut rng, 1e-4, 1e-2);
        let box_length = gap_width * log_uniform(&mut rng, 10.0, 1e3);
        let half_phase = 0.5 * (k - k_prime) * gap_width;
        let nearest = (half_phase / PI).round();
        if nearest != 0.0 && (half_phase - nearest * PI).abs() < 0.1 {
            continue;
        }
        let closed_form = matrix_element_closed_form(k, k_prime, gap_width, box_length)?;
        let quadrature = matrix_element_quadrature(k, k_prime, gap_width, box_length)?;
        checks.push(MatrixElementCheck {
            k,
            k_prime,
            gap_width,
            box_length,
            closed_form,
            quadrature,
            relative_error: relative_error(closed_form, quadrature),
        });
    }
    let worst = checks
        .iter()
        .max_by(|a, b| a.relative_error.total_cmp(&b.relative_error))
        .copied()
        .expect("count >= 1");
    let report = VerificationReport::compare(
        "matrix_element_quadrature",
        worst.closed_form,
        worst.quadrature,
        MATRIX_ELEMENT_TOLERANCE,
    )
    .with_note(format!("worst of {count} random (k, k', d, L) tuples"));
    Ok((report, checks))
}
