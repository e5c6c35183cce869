use std::fmt;
use std::str::FromStr;

use nalgebra::Matrix4;

use super::{bell_state, density_matrix, BellKind, DensityMatrix4, C64};
use crate::error::{Error, Result};

/// Non-negative half-integer spin quantum number, stored as `2S`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Spin {
    twice: u32,
}

impl Spin {
    pub const ZERO: Spin = Spin { twice: 0 };
    pub const HALF: Spin = Spin { twice: 1 };

    pub fn from_twice(twice: u32) -> Self {
        Self { twice }
    }

    /// Accepts `0, 0.5, 1, 1.5, ...`; anything else is rejected.
    pub fn from_f64(value: f64) -> Result<Self> {
        let twice = 2.0 * value;
        if !value.is_finite() || value < 0.0 || (twice - twice.round()).abs() > 1e-9 || twice > u32::MAX as f64 {
            return Err(Error::arg(
                "spin",
                format!("{value} is not a non-negative half-integer"),
            ));
        }
        Ok(Self {
            twice: twice.round() as u32,
        })
    }

    pub fn value(self) -> f64 {
        f64::from(self.twice) / 2.0
    }

    /// `S(S+1)`.
    pub fn casimir(self) -> f64 {
        let s = self.value();
        s * (s + 1.0)
    }
}

impl fmt::Display for Spin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.twice.is_multiple_of(2) {
            write!(f, "{}", self.twice / 2)
        } else {
            write!(f, "{}/2", self.twice)
        }
    }
}

/// Sign convention for the spin-recoupling formula of the entanglement
/// parameter `p(S_I, S_M, S_F)`.
///
/// With `3/4 − S_M(S_M+1) − S_I(S_I+1)` inside the square the formula gives
/// `p(0, 1/2, 0) = 0`, yet the singlet-to-singlet photoionization–Auger
/// cascade is maximally entangled (`p = 1`). Flipping the sign of the `S_M`
/// term restores that value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum WernerConvention {
    /// `[3/4 − S_M(S_M+1) − S_I(S_I+1)]² / (3 S_M(S_M+1))`.
    AsPrinted,
    /// `[3/4 + S_M(S_M+1) − S_I(S_I+1)]² / (3 S_M(S_M+1))`; reproduces `p(0, 1/2, 0) = 1`.
    #[default]
    ExampleConsistent,
}

impl FromStr for WernerConvention {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "as-printed" => Ok(WernerConvention::AsPrinted),
            "example-consistent" => Ok(WernerConvention::ExampleConsistent),
            other => Err(Error::arg(
                "convention",
                format!("unknown convention `{other}` (expected as-printed or example-consistent)"),
            )),
        }
    }
}

/// Spins of the initial atom, intermediate ion and final dication of a
/// photoionization–Auger cascade.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct WernerSpec {
    pub initial: Spin,
    pub intermediate: Spin,
    pub final_: Spin,
    pub convention: WernerConvention,
}

impl WernerSpec {
    pub fn new(initial: Spin, intermediate: Spin, final_: Spin) -> Self {
        Self {
            initial,
            intermediate,
            final_,
            convention: WernerConvention::default(),
        }
    }

    pub fn with_convention(mut self, convention: WernerConvention) -> Self {
        self.convention = convention;
        self
    }
}

/// Entanglement parameter of the photoelectron–Auger-electron Werner state.
///
/// Defined for `S_I = S_F` and `S_M > 0`. A result outside `[0, 1]` is
/// reported as [`Error::OutOfRange`] carrying the raw value; it is never clamped.
pub fn werner_p(spec: &WernerSpec) -> Result<f64> {
    if spec.initial != spec.final_ {
        return Err(Error::arg(
            "spins",
            format!(
                "requires S_I = S_F, got S_I = {} and S_F = {}",
                spec.initial, spec.final_
            ),
        ));
    }
    if spec.intermediate == Spin::ZERO {
        return Err(Error::arg("spins", "requires S_M > 0"));
    }
    let m = spec.intermediate.casimir();
    let i = spec.initial.casimir();
    let bracket = match spec.convention {
        WernerConvention::AsPrinted => 0.75 - m - i,
        WernerConvention::ExampleConsistent => 0.75 + m - i,
    };
    let p = bracket * bracket / (3.0 * m);
    if (0.0..=1.0).contains(&p) {
        Ok(p)
    } else {
        Err(Error::OutOfRange {
            what: "p",
            raw: p,
            range: "[0, 1]",
        })
    }
}

/// `p·|Bell⟩⟨Bell| + (1 − p)·I/4`.
pub fn werner_state(p: f64, bell: BellKind) -> Result<DensityMatrix4> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::OutOfRange {
            what: "p",
            raw: p,
            range: "[0, 1]",
        });
    }
    let projector = density_matrix(&bell_state(bell))?;
    let mixed = Matrix4::<C64>::identity() * C64::new(0.25, 0.0);
    DensityMatrix4::new(projector.matrix() * C64::new(p, 0.0) + mixed * C64::new(1.0 - p, 0.0))
}
