use nalgebra::Matrix4;

use super::{Basis, DensityMatrix4, TwoPhotonState, C64};
use crate::error::{Error, Result};

const OVERLAP_TOLERANCE: f64 = 1e-12;

/// One term of a photon ⊗ environment superposition: the photon pair sits in
/// `basis` with `amplitude`, and the environment (the electrons) is left in
/// the state labelled `environment`.
#[derive(Debug, Clone, PartialEq)]
pub struct Branch<E> {
    pub basis: Basis,
    pub amplitude: C64,
    pub environment: E,
}

/// Reduced photon density matrix after tracing out the environment.
///
/// `ρ[i,j] = Σ amp_a · conj(amp_b) · overlap(env_a, env_b)` over all branch
/// pairs `(a, b)` with `basis_a = i` and `basis_b = j`. The overlap must
/// behave like an inner product on the labels that occur: unit diagonal,
/// Hermitian, bounded by 1 in modulus.
pub fn partial_trace_environment<E, F>(branches: &[Branch<E>], overlap: F) -> Result<DensityMatrix4>
where
    F: Fn(&E, &E) -> C64,
{
    if branches.is_empty() {
        return Err(Error::arg("branch_amplitudes", "at least one branch is required"));
    }
    for (a, ba) in branches.iter().enumerate() {
        let diag = overlap(&ba.environment, &ba.environment);
        if (diag - C64::new(1.0, 0.0)).norm() > OVERLAP_TOLERANCE {
            return Err(Error::InvalidOverlap(format!(
                "overlap of branch {a} with itself is {diag}, expected 1"
            )));
        }
        for (b, bb) in branches.iter().enumerate().skip(a + 1) {
            let ab = overlap(&ba.environment, &bb.environment);
            let ba_ = overlap(&bb.environment, &ba.environment);
            if (ab - ba_.conj()).norm() > OVERLAP_TOLERANCE {
                return Err(Error::InvalidOverlap(format!(
                    "overlap between branches {a} and {b} is not Hermitian ({ab} vs conj {})",
                    ba_.conj()
                )));
            }
            if ab.norm() > 1.0 + OVERLAP_TOLERANCE {
                return Err(Error::InvalidOverlap(format!(
                    "overlap between branches {a} and {b} has modulus {} > 1",
                    ab.norm()
                )));
            }
        }
    }

    let mut rho = Matrix4::<C64>::zeros();
    for ba in branches {
        for bb in branches {
            rho[(ba.basis.index(), bb.basis.index())] +=
                ba.amplitude * bb.amplitude.conj() * overlap(&ba.environment, &bb.environment);
        }
    }
    let norm_sqr = rho.trace();
    if (norm_sqr.re - 1.0).abs() > super::NORM_TOLERANCE || norm_sqr.im.abs() > super::NORM_TOLERANCE {
        return Err(Error::NotNormalized { norm_sqr: norm_sqr.re });
    }
    DensityMatrix4::new(rho)
}

/// Total photon numbers left in the X and Y rails of the cavity by one
/// branch, summed over both pair members. The electrons crossing the x and y
/// gaps exchange energy with exactly these populations, so two branches leave
/// the electrons in identical states iff their signatures coincide.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct GapSignature {
    pub x_rail: u32,
    pub y_rail: u32,
}

impl GapSignature {
    pub fn of(basis: Basis, n: u32) -> Self {
        let (first, second) = basis.pair();
        let (x1, y1) = first.rail_occupation(n);
        let (x2, y2) = second.rail_occupation(n);
        Self {
            x_rail: x1 + x2,
            y_rail: y1 + y2,
        }
    }
}

/// One-pair amplification `|n,0⟩ → |n+1,0⟩`, `|0,n⟩ → |0,n+1⟩` followed by
/// tracing out the electrons.
///
/// Branches with equal [`GapSignature`] leave the electrons in the same
/// final state and keep full mutual coherence; branches with different
/// signatures keep a fraction `eta` of it (`eta = 0`: the electron finals are
/// orthogonal). The rail labels map one-to-one onto the effective qubit
/// labels, so the result is expressed in the same `{XX, XY, YX, YY}` basis.
pub fn amplify_channel(state: &TwoPhotonState, n: u32, eta: f64) -> Result<DensityMatrix4> {
    if n < 1 {
        return Err(Error::arg("n", "photon number must be at least 1"));
    }
    if !(0.0..=1.0).contains(&eta) {
        return Err(Error::arg("eta", format!("must lie in [0, 1], got {eta}")));
    }
    let branches: Vec<Branch<GapSignature>> = Basis::ALL
        .into_iter()
        .filter(|b| state.amplitude(*b).norm_sqr() > 0.0)
        .map(|b| Branch {
            basis: b,
            amplitude: state.amplitude(b),
            environment: GapSignature::of(b, n),
        })
        .collect();
    partial_trace_environment(
        &branches,
        |a, b| {
            if a == b {
                C64::new(1.0, 0.0)
            } else {
                C64::new(eta, 0.0)
            }
        },
    )
}
