//! Structured results shared by the verification-style operations.

use alloc::string::String;
use alloc::vec::Vec;

/// Outcome of a pointwise inequality sweep `RHS - n|H| > 0`.
///
/// `min_margin` is the smallest sampled margin; the bound is admissible
/// when it is strictly positive.
#[derive(Debug, Clone)]
pub struct BoundReport {
    /// Name of the inequality that was swept.
    pub name: String,
    /// Smallest sampled value of `RHS - n|H|`.
    pub min_margin: f64,
    /// Sample location (radius, or node index for grid sweeps) attaining
    /// the minimum.
    pub witness: f64,
    /// Number of samples inspected.
    pub samples: usize,
    /// Free-form diagnostics (asymptotic ratios, decay trends).
    pub notes: Vec<String>,
}

impl BoundReport {
    pub fn admissible(&self) -> bool {
        self.min_margin > 0.0
    }
}

/// Result of a single named hypothesis check.
#[derive(Debug, Clone)]
pub struct AssumptionCheck {
    pub name: String,
    pub pass: bool,
    /// First sample at which the check failed, when it did.
    pub witness: Option<f64>,
    pub detail: String,
}

/// Per-assumption report produced by `validate_assumptions`.
#[derive(Debug, Clone)]
pub struct ValidationReport {
    pub checks: Vec<AssumptionCheck>,
}

impl ValidationReport {
    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn check(&self, name: &str) -> Option<&AssumptionCheck> {
        self.checks.iter().find(|c| c.name == name)
    }
}

/// Result of a discrete supersolution sweep (`Q[w] - nH < 0` on a region).
#[derive(Debug, Clone)]
pub struct VerificationReport {
    pub name: String,
    /// Largest value of the discrete operator over the region.
    pub max_value: f64,
    /// Node index attaining the maximum.
    pub argmax: usize,
    /// Region nodes where the strict inequality failed.
    pub violations: Vec<usize>,
    /// Total region size.
    pub region_size: usize,
}

impl VerificationReport {
    pub fn pass(&self) -> bool {
        self.violations.is_empty() && self.max_value < 0.0
    }
}
