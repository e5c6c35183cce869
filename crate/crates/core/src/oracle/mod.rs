//! Independent verifiers for the closed-form results.
//!
//! Nothing here calls the formula internals of [`crate::klystron`]: the
//! quadrature and discrete-sum oracles rebuild what they need from scratch,
//! and the identity checks only use the public rate functions they are
//! checking.

mod expansion;
mod golden_rule;
mod identity;
mod ppt;
mod quadrature;
mod report;

pub use expansion::{log_schedule, verify_expansion, ExpansionFit};
pub use golden_rule::{
    analytic_on_shell_coefficient, box_size_sensitivity, discrete_coefficient, golden_rule_sum, photon_number_exponent,
    verify_golden_rule, GoldenRuleSetup, RegulatorSchedule,
};
pub use identity::{random_valid_params, verify_rate_identity, verify_rate_identity_randomized};
pub use ppt::{partial_transpose, ppt_negativity, random_mixed_state, verify_ppt_equivalence, PptResult};
pub use quadrature::{
    adaptive_gauss_kronrod, matrix_element_closed_form, matrix_element_quadrature, verify_matrix_elements,
    MatrixElementCheck, Quadrature,
};
pub use report::{TracePoint, VerificationReport};
