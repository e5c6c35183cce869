use serde::{Deserialize, Serialize};

/// One entry of a convergence study: the value of the control parameter
/// (regulator, box size, expansion parameter, ...) and the error observed there.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TracePoint {
    pub control: f64,
    pub error: f64,
}

/// Outcome of one oracle check.
///
/// `passed` is recomputed from the numeric fields whenever they change:
/// it holds iff the relative error is within tolerance and the convergence
/// trace (if any) is non-increasing after its first entry.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub name: String,
    pub analytic: f64,
    pub oracle: f64,
    pub relative_error: f64,
    pub tolerance: f64,
    pub converged: bool,
    pub passed: bool,
    pub trace: Vec<TracePoint>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl VerificationReport {
    /// Report comparing `oracle` against `analytic` by relative error.
    pub fn compare(name: impl Into<String>, analytic: f64, oracle: f64, tolerance: f64) -> Self {
        let relative_error = relative_error(analytic, oracle);
        Self::from_error(name, analytic, oracle, relative_error, tolerance)
    }

    /// Report with an externally computed error measure.
    pub fn from_error(
        name: impl Into<String>,
        analytic: f64,
        oracle: f64,
        relative_error: f64,
        tolerance: f64,
    ) -> Self {
        let mut report = Self {
            name: name.into(),
            analytic,
            oracle,
            relative_error,
            tolerance,
            converged: true,
            passed: false,
            trace: Vec::new(),
            note: None,
        };
        report.evaluate();
        report
    }

    pub fn with_trace(mut self, trace: Vec<TracePoint>) -> Self {
        self.trace = trace;
        self.evaluate();
        self
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }

    /// Replaces the tolerance and re-derives the verdict.
    pub fn with_tolerance(mut self, tolerance: f64) -> Self {
        self.tolerance = tolerance;
        self.evaluate();
        self
    }

    fn evaluate(&mut self) {
        self.converged = self.trace.windows(2).skip(1).all(|w| w[1].error <= w[0].error)
            && self.trace.iter().all(|p| p.error.is_finite());
        self.passed = self.converged && self.relative_error.is_finite() && self.relative_error <= self.tolerance;
    }
}

/// `|oracle − analytic| / |analytic|`, or the absolute difference when the
/// analytic value is exactly zero.
pub fn relative_error(analytic: f64, oracle: f64) -> f64 {
    let diff = (oracle - analytic).abs();
    if analytic == 0.0 {
        diff
    } else {
        diff / analytic.abs()
    }
}
