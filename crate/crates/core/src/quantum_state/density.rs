use nalgebra::{Matrix4, SymmetricEigen, Vector4};

use super::{TwoPhotonState, C64};
use crate::error::{Error, Result};

/// Maximum elementwise deviation from Hermiticity.
pub const HERMITIAN_TOLERANCE: f64 = 1e-12;
/// Maximum deviation of the trace from 1.
pub const TRACE_TOLERANCE: f64 = 1e-12;
/// Most negative eigenvalue still accepted as positive semidefinite.
pub const PSD_TOLERANCE: f64 = 1e-10;
/// Eigenvalues of the spin-flipped product below this magnitude are treated as zero.
pub const CONCURRENCE_EIGEN_CLAMP: f64 = 1e-10;

/// Validated two-qubit density matrix over `{XX, XY, YX, YY}`.
///
/// Construction checks Hermiticity, unit trace and (numerical)
/// positive semidefiniteness.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix4 {
    entries: Matrix4<C64>,
}

impl DensityMatrix4 {
    pub fn new(entries: Matrix4<C64>) -> Result<Self> {
        if entries.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::InvalidDensityMatrix("non-finite entry".into()));
        }
        let hermitian_dev = (entries - entries.adjoint())
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max);
        if hermitian_dev > HERMITIAN_TOLERANCE {
            return Err(Error::InvalidDensityMatrix(format!(
                "not Hermitian (max deviation {hermitian_dev:e})"
            )));
        }
        let trace = entries.trace();
        if (trace - C64::new(1.0, 0.0)).norm() > TRACE_TOLERANCE {
            return Err(Error::InvalidDensityMatrix(format!(
                "trace is {} + {}i, expected 1",
                trace.re, trace.im
            )));
        }
        let min_eigen = hermitian_eigenvalues(&entries).min();
        if min_eigen < -PSD_TOLERANCE {
            return Err(Error::InvalidDensityMatrix(format!(
                "not positive semidefinite (eigenvalue {min_eigen:e})"
            )));
        }
        Ok(Self { entries })
    }

    pub fn matrix(&self) -> &Matrix4<C64> {
        &self.entries
    }

    pub fn entry(&self, row: usize, col: usize) -> C64 {
        self.entries[(row, col)]
    }

    pub fn trace(&self) -> C64 {
        self.entries.trace()
    }

    /// `Tr(ρ²)`.
    pub fn purity(&self) -> f64 {
        (self.entries * self.entries).trace().re
    }

    /// Eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> [f64; 4] {
        let mut ev: [f64; 4] = hermitian_eigenvalues(&self.entries).into();
        ev.sort_by(f64::total_cmp);
        ev
    }

    /// Maximally mixed state `I/4`.
    pub fn maximally_mixed() -> Self {
        Self {
            entries: Matrix4::identity() * C64::new(0.25, 0.0),
        }
    }
}

fn hermitian_eigenvalues(m: &Matrix4<C64>) -> Vector4<f64> {
    // Symmetrize so round-off in the strict upper triangle cannot leak in.
    let h = (m + m.adjoint()) * C64::new(0.5, 0.0);
    SymmetricEigen::new(h).eigenvalues
}

/// Pure-state projector `|ψ⟩⟨ψ|`.
pub fn density_matrix(state: &TwoPhotonState) -> Result<DensityMatrix4> {
    let v = Vector4::from_column_slice(state.amplitudes());
    DensityMatrix4::new(v * v.adjoint())
}

/// Wootters concurrence of a two-qubit density matrix.
///
/// The eigenvalues of `ρ·ρ̃`, with `ρ̃ = (σy⊗σy) ρ* (σy⊗σy)`, are obtained as
/// the spectrum of the Hermitian matrix `√ρ ρ̃ √ρ`, which shares them.
pub fn concurrence(rho: &DensityMatrix4) -> f64 {
    let m = rho.matrix();
    let flip = spin_flip();
    let tilde = flip * m.conjugate() * flip;

    let eig = SymmetricEigen::new((m + m.adjoint()) * C64::new(0.5, 0.0));
    let sqrt_diag = Matrix4::from_diagonal(&eig.eigenvalues.map(|l| C64::new(l.max(0.0).sqrt(), 0.0)));
    let sqrt_rho = eig.eigenvectors * sqrt_diag * eig.eigenvectors.adjoint();

    let r = sqrt_rho * tilde * sqrt_rho;
    let r = (r + r.adjoint()) * C64::new(0.5, 0.0);
    let mut lambdas: Vec<f64> = SymmetricEigen::new(r)
        .eigenvalues
        .iter()
        .map(|&mu| {
            if mu.abs() < CONCURRENCE_EIGEN_CLAMP || mu < 0.0 {
                0.0
            } else {
                mu.sqrt()
            }
        })
        .collect();
    lambdas.sort_by(|a, b| b.total_cmp(a));
    (lambdas[0] - lambdas[1] - lambdas[2] - lambdas[3]).clamp(0.0, 1.0)
}

/// `σy ⊗ σy` in the `{XX, XY, YX, YY}` basis.
fn spin_flip() -> Matrix4<C64> {
    let mut f = Matrix4::<C64>::zeros();
    f[(0, 3)] = C64::new(-1.0, 0.0);
    f[(1, 2)] = C64::new(1.0, 0.0);
    f[(2, 1)] = C64::new(1.0, 0.0);
    f[(3, 0)] = C64::new(-1.0, 0.0);
    f
}
