use nalgebra::{Matrix4, SymmetricEigen, Vector4};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use super::report::VerificationReport;
use crate::error::Result;
use crate::quantum_state::{concurrence, werner_state, BellKind, DensityMatrix4, C64};

/// Negativity above which a state is classified as entangled.
pub const ENTANGLEMENT_THRESHOLD: f64 = 1e-10;

/// Outcome of the positive-partial-transpose test.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PptResult {
    pub is_entangled: bool,
    /// Sum of the magnitudes of the negative eigenvalues of `ρ^{T_B}`.
    pub negativity: f64,
}

/// Transpose over the second qubit: `ρ[(a,b),(c,d)] → ρ[(a,d),(c,b)]`.
pub fn partial_transpose(rho: &DensityMatrix4) -> Matrix4<C64> {
    let m = rho.matrix();
    Matrix4::from_fn(|row, col| {
        let (a, b) = (row / 2, row % 2);
        let (c, d) = (col / 2, col % 2);
        m[(2 * a + d, 2 * c + b)]
    })
}

pub fn ppt_negativity(rho: &DensityMatrix4) -> PptResult {
    let pt = partial_transpose(rho);
    let pt = (pt + pt.adjoint()) * C64::new(0.5, 0.0);
    let negativity: f64 = SymmetricEigen::new(pt)
        .eigenvalues
        .iter()
        .filter(|&&l| l < 0.0)
        .map(|l| -l)
        .sum();
    PptResult {
        is_entangled: negativity > ENTANGLEMENT_THRESHOLD,
        negativity,
    }
}

/// Mixture of `components` Haar-random pure states with uniformly random weights.
pub fn random_mixed_state(rng: &mut impl Rng, components: usize) -> Result<DensityMatrix4> {
    let components = components.max(1);
    let weights: Vec<f64> = (0..components).map(|_| rng.random_range(0.0..1.0) + 1e-3).collect();
    let total: f64 = weights.iter().sum();
    let mut rho = Matrix4::<C64>::zeros();
    for w in weights {
        let v = Vector4::<C64>::from_fn(|_, _| C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)));
        let v = v.normalize();
        rho += v * v.adjoint() * C64::new(w / total, 0.0);
    }
    // Restore exact Hermiticity and trace after rounding.
    let rho = (rho + rho.adjoint()) * C64::new(0.5, 0.0);
    let trace = rho.trace();
    DensityMatrix4::new(rho / trace)
}

/// Counts disagreements between `concurrence > 0` and the PPT verdict over
/// `count` random mixtures (one to four components) plus a Werner-state
/// grid through the separability boundary p = 1/3.
pub fn verify_ppt_equivalence(count: usize, seed: u64) -> Result<VerificationReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut states = Vec::with_capacity(count + 22);
    for i in 0..count {
        states.push(random_mixed_state(&mut rng, 1 + i % 4)?);
    }
    for bell in BellKind::ALL {
        for p in [0.0, 0.2, 1.0 / 3.0, 0.34, 0.6, 1.0] {
            states.push(werner_state(p, bell)?);
        }
    }
    let mut disagreements = 0usize;
    let mut entangled = 0usize;
    for rho in &states {
        let by_concurrence = concurrence(rho) > 0.0;
        let by_ppt = ppt_negativity(rho).is_entangled;
        entangled += usize::from(by_ppt);
        disagreements += usize::from(by_concurrence != by_ppt);
    }
    let total = states.len();
    Ok(VerificationReport::from_error(
        "ppt_equivalence",
        0.0,
        disagreements as f64,
        disagreements as f64 / total as f64,
        0.0,
    )
    .with_note(format!(
        "{disagreements} disagreements over {total} states ({entangled} entangled by PPT)"
    )))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantum_state::{bell_state, density_matrix};

    #[test]
    fn bell_state_negativity_is_one_half() {
        for bell in BellKind::ALL {
            let r = ppt_negativity(&density_matrix(&bell_state(bell)).unwrap());
            assert!(r.is_entangled);
            assert!((r.negativity - 0.5).abs() < 1e-12);
        }
    }

    #[test]
    fn maximally_mixed_is_separable() {
        let r = ppt_negativity(&DensityMatrix4::maximally_mixed());
        assert!(!r.is_entangled);
        assert_eq!(r.negativity, 0.0);
    }

    #[test]
    fn werner_boundary() {
        let r = ppt_negativity(&werner_state(1.0 / 3.0, BellKind::PsiMinus).unwrap());
        assert!(!r.is_entangled);
        assert!(r.negativity < 1e-12);
        for p in [0.5, 0.8] {
            let r = ppt_negativity(&werner_state(p, BellKind::PhiPlus).unwrap());
            assert!((r.negativity - (3.0 * p - 1.0) / 4.0).abs() < 1e-12);
        }
    }

    #[test]
    fn partial_transpose_twice_is_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let rho = random_mixed_state(&mut rng, 2).unwrap();
        let pt = partial_transpose(&rho);
        let back = Matrix4::from_fn(|row, col| {
            let (a, b) = (row / 2, row % 2);
            let (c, d) = (col / 2, col % 2);
            pt[(2 * a + d, 2 * c + b)]
        });
        assert_eq!(&back, rho.matrix());
    }

    #[test]
    fn random_states_agree_with_concurrence() {
        let r = verify_ppt_equivalence(300, 11).unwrap();
        assert!(r.passed, "{r:?}");
    }
}
