use crate::format::csv_num;
use crate::numerics::IntegralResult;
use crate::unitlaw::MonteCarloEstimate;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    pub abs: f64,
    pub rel: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            abs: 1e-6,
            rel: 1e-6,
        }
    }
}

/// Diagnostics for one quadrature that fed a report.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureNote {
    pub term: String,
    pub value: f64,
    pub error_estimate: f64,
    pub subdivisions: usize,
}

impl QuadratureNote {
    pub fn from_result(term: &str, r: &IntegralResult) -> Self {
        Self {
            term: term.to_string(),
            value: r.value,
            error_estimate: r.error_estimate,
            subdivisions: r.subdivisions_used,
        }
    }
}

/// Monte Carlo estimates of both sides next to their quadrature values.
#[derive(Debug, Clone, PartialEq)]
pub struct MonteCarloSummary {
    pub seed: u64,
    pub lhs: MonteCarloEstimate,
    pub rhs: MonteCarloEstimate,
    pub quadrature_lhs: f64,
    pub quadrature_rhs: f64,
    pub sigmas: f64,
}

impl MonteCarloSummary {
    pub fn lhs_agrees(&self) -> bool {
        self.lhs.agrees_with(self.quadrature_lhs, self.sigmas)
    }

    pub fn rhs_agrees(&self) -> bool {
        self.rhs.agrees_with(self.quadrature_rhs, self.sigmas)
    }
}

/// Pointwise comparison of a numeric density against a printed closed form.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityCheck {
    pub formula: String,
    pub points: usize,
    pub max_rel_deviation: f64,
    pub worst_u: f64,
    pub tolerance: f64,
}

impl DensityCheck {
    pub fn pass(&self) -> bool {
        self.max_rel_deviation <= self.tolerance
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct IdentityReport {
    pub identity_id: String,
    pub lhs: f64,
    pub rhs: f64,
    pub abs_residual: f64,
    pub rel_residual: f64,
    pub tolerances: Tolerances,
    pub pass: bool,
    pub notes: Vec<String>,
    pub quadrature: Vec<QuadratureNote>,
    pub density_checks: Vec<DensityCheck>,
    pub monte_carlo: Option<MonteCarloSummary>,
}

impl IdentityReport {
    pub fn new(identity_id: impl Into<String>, lhs: f64, rhs: f64, tolerances: Tolerances) -> Self {
        let abs_residual = (lhs - rhs).abs();
        let scale = lhs.abs().max(rhs.abs());
        let rel_residual = if scale > 0.0 {
            abs_residual / scale
        } else {
            0.0
        };
        let pass = abs_residual <= tolerances.abs || rel_residual <= tolerances.rel;
        Self {
            identity_id: identity_id.into(),
            lhs,
            rhs,
            abs_residual,
            rel_residual,
            tolerances,
            pass,
            notes: Vec::new(),
            quadrature: Vec::new(),
            density_checks: Vec::new(),
            monte_carlo: None,
        }
    }

    /// Re-judges the report under different tolerances.
    pub fn with_tolerances(mut self, tolerances: Tolerances) -> Self {
        self.tolerances = tolerances;
        self.pass = (self.abs_residual <= tolerances.abs || self.rel_residual <= tolerances.rel)
            && self.density_checks.iter().all(DensityCheck::pass)
            && self
                .monte_carlo
                .as_ref()
                .is_none_or(|m| m.lhs_agrees() && m.rhs_agrees());
        self
    }

    pub fn with_quadrature(mut self, notes: Vec<QuadratureNote>) -> Self {
        self.quadrature = notes;
        self
    }

    pub fn note(mut self, text: impl Into<String>) -> Self {
        self.notes.push(text.into());
        self
    }

    /// Attaches a density check; a failing check fails the report.
    pub fn with_density_check(mut self, check: DensityCheck) -> Self {
        self.pass &= check.pass();
        self.density_checks.push(check);
        self
    }

    pub const CSV_HEADER: &'static str = "identity_id,lhs,rhs,abs_res,rel_res,pass";

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{}",
            self.identity_id,
            csv_num(self.lhs),
            csv_num(self.rhs),
            csv_num(self.abs_residual),
            csv_num(self.rel_residual),
            self.pass
        )
    }
}
