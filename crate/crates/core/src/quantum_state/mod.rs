//! Two-photon polarization states and the operations the amplifier acts on.
//!
//! States live in the effective two-qubit space spanned by
//! `{XX, XY, YX, YY}` (in that order, first letter = photon 1). In the
//! Fock-rail picture of the cavity modes a polarization label stands for a
//! photon-number configuration of the two rails of one pair member:
//!
//! | label | before amplification | after amplification |
//! |-------|----------------------|---------------------|
//! | `X`   | `|n,0⟩`              | `|n+1,0⟩`           |
//! | `Y`   | `|0,n⟩`              | `|0,n+1⟩`           |
//!
//! The photon number `n` is carried as metadata by the operations that need
//! it; no Fock-space arrays are ever built.

mod channel;
mod density;
mod werner;

pub use channel::{amplify_channel, partial_trace_environment, Branch, GapSignature};
pub use density::{concurrence, density_matrix, DensityMatrix4};
pub use werner::{werner_p, werner_state, Spin, WernerConvention, WernerSpec};

use std::fmt;
use std::str::FromStr;

use nalgebra::Complex;

use crate::error::{Error, Result};

pub type C64 = Complex<f64>;

/// Tolerance on `Σ|amplitude|² = 1`.
pub const NORM_TOLERANCE: f64 = 1e-12;

/// Single-photon polarization.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Polarization {
    /// Horizontal; rail configuration `|n,0⟩`.
    X,
    /// Vertical; rail configuration `|0,n⟩`.
    Y,
}

impl Polarization {
    /// Photon numbers `(x_rail, y_rail)` of one pair member carrying `n` photons.
    pub fn rail_occupation(self, n: u32) -> (u32, u32) {
        match self {
            Polarization::X => (n, 0),
            Polarization::Y => (0, n),
        }
    }
}

/// Product basis of the two-photon space, in storage order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Basis {
    XX = 0,
    XY = 1,
    YX = 2,
    YY = 3,
}

impl Basis {
    pub const ALL: [Basis; 4] = [Basis::XX, Basis::XY, Basis::YX, Basis::YY];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(index: usize) -> Option<Basis> {
        Basis::ALL.get(index).copied()
    }

    pub fn from_pair(first: Polarization, second: Polarization) -> Basis {
        use Polarization::*;
        match (first, second) {
            (X, X) => Basis::XX,
            (X, Y) => Basis::XY,
            (Y, X) => Basis::YX,
            (Y, Y) => Basis::YY,
        }
    }

    pub fn pair(self) -> (Polarization, Polarization) {
        use Polarization::*;
        match self {
            Basis::XX => (X, X),
            Basis::XY => (X, Y),
            Basis::YX => (Y, X),
            Basis::YY => (Y, Y),
        }
    }
}

/// The four Bell states.
///
/// `Φ±` superpose `XY` and `YX`; `Ψ±` superpose `XX` and `YY`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BellKind {
    PhiPlus,
    PhiMinus,
    PsiPlus,
    PsiMinus,
}

impl BellKind {
    pub const ALL: [BellKind; 4] = [
        BellKind::PhiPlus,
        BellKind::PhiMinus,
        BellKind::PsiPlus,
        BellKind::PsiMinus,
    ];
}

impl fmt::Display for BellKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            BellKind::PhiPlus => "PhiPlus",
            BellKind::PhiMinus => "PhiMinus",
            BellKind::PsiPlus => "PsiPlus",
            BellKind::PsiMinus => "PsiMinus",
        };
        f.write_str(name)
    }
}

impl FromStr for BellKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "PhiPlus" => Ok(BellKind::PhiPlus),
            "PhiMinus" => Ok(BellKind::PhiMinus),
            "PsiPlus" => Ok(BellKind::PsiPlus),
            "PsiMinus" => Ok(BellKind::PsiMinus),
            other => Err(Error::arg(
                "bell",
                format!("unknown Bell state `{other}` (expected PhiPlus, PhiMinus, PsiPlus or PsiMinus)"),
            )),
        }
    }
}

/// Normalized pure state of a photon pair over `{XX, XY, YX, YY}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoPhotonState {
    amplitudes: [C64; 4],
}

impl TwoPhotonState {
    /// Builds a state from amplitudes in basis order; they must already be normalized.
    pub fn new(amplitudes: [C64; 4]) -> Result<Self> {
        let norm_sqr: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum();
        if !norm_sqr.is_finite() || (norm_sqr - 1.0).abs() > NORM_TOLERANCE {
            return Err(Error::NotNormalized { norm_sqr });
        }
        Ok(Self { amplitudes })
    }

    pub fn product(first: Polarization, second: Polarization) -> Self {
        let mut amplitudes = [C64::new(0.0, 0.0); 4];
        amplitudes[Basis::from_pair(first, second).index()] = C64::new(1.0, 0.0);
        Self { amplitudes }
    }

    pub fn amplitudes(&self) -> &[C64; 4] {
        &self.amplitudes
    }

    pub fn amplitude(&self, basis: Basis) -> C64 {
        self.amplitudes[basis.index()]
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }
}

pub fn bell_state(kind: BellKind) -> TwoPhotonState {
    let h = C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    let zero = C64::new(0.0, 0.0);
    let amplitudes = match kind {
        BellKind::PhiPlus => [zero, h, h, zero],
        BellKind::PhiMinus => [zero, h, -h, zero],
        BellKind::PsiPlus => [h, zero, zero, h],
        BellKind::PsiMinus => [h, zero, zero, -h],
    };
    TwoPhotonState { amplitudes }
}
