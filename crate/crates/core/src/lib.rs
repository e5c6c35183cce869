//! Quantum model of a double-gap reflex klystron used as an amplifier of
//! polarization-entangled photon pairs.
//!
//! The crate is split along the physics:
//!
//! * [`quantum_state`]: two-photon polarization states, density matrices,
//!   concurrence, the amplification channel and Werner states.
//! * [`klystron`]: closed-form device physics: transit angle, gain factor,
//!   photon-pair output rates and electron wavenumber kinematics.
//! * [`design`]: gain-peak search, gain curves, the frequency/gap design
//!   chain and parameter sweeps.
//! * [`oracle`]: brute-force verifiers (quadrature, discrete golden-rule
//!   sums, expansion remainders, PPT) that share no formula code with the
//!   closed forms they check.

pub mod constants;
pub mod design;
pub mod error;
pub mod klystron;
pub mod oracle;
pub mod quantum_state;

pub use error::{Error, Result};
