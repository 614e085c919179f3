//! Quantile-first distributions.
//!
//! A law is anything that can report its quantile function `Q`, quantile
//! density `q = Q'`, cdf and (optionally) pdf. [`QuantileModel`] wraps a law
//! with the cached facts every other module asks for: the mean, the value of
//! `Q(0⁺)` and whether the law belongs to class D (nonnegative, `Q(0⁺) = 0`,
//! finite mean).

mod catalog;
mod tabulated;

use std::fmt;
use std::sync::Arc;

pub use catalog::{
    BlockPiecewise, Exponential, FrechetType, GeoMaxExp, Lomax, ParetoI, PowerScale, PowerUnit,
    Rayleigh, Uniform,
};
pub use tabulated::Tabulated;

use crate::error::{Error, Result};
use crate::numerics::{integrate, QuadratureSpec};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Support {
    pub lower: f64,
    pub upper: f64,
}

impl Support {
    pub fn new(lower: f64, upper: f64) -> Self {
        debug_assert!(lower < upper);
        Self { lower, upper }
    }

    pub fn contains_interior(&self, x: f64) -> bool {
        x > self.lower && x < self.upper
    }
}

/// What a law knows about its own mean without integrating.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MeanForm {
    Finite(f64),
    Infinite,
    Unknown,
}

pub trait QuantileLaw: Send + Sync + fmt::Debug {
    fn label(&self) -> String;
    fn quantile(&self, u: f64) -> f64;
    fn quantile_density(&self, u: f64) -> f64;
    fn cdf(&self, x: f64) -> f64;
    fn survival(&self, x: f64) -> f64 {
        1.0 - self.cdf(x)
    }
    fn pdf(&self, x: f64) -> Option<f64>;
    fn support(&self) -> Support;
    fn mean_form(&self) -> MeanForm {
        MeanForm::Unknown
    }
    /// Closed-form CVaR (mean excess over `Q(p)`), where one is known.
    fn cvar_closed_form(&self, _p: f64) -> Option<f64> {
        None
    }
    /// Closed-form AVaR `(1/v)∫₀^v Q`, where one is known.
    fn avar_closed_form(&self, _v: f64) -> Option<f64> {
        None
    }
}

#[derive(Clone)]
pub struct QuantileModel {
    law: Arc<dyn QuantileLaw>,
    mean: std::result::Result<f64, Error>,
    origin: f64,
    class_d: bool,
}

impl fmt::Debug for QuantileModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("QuantileModel")
            .field("law", &self.law.label())
            .field("mean", &self.mean)
            .field("class_d", &self.class_d)
            .finish()
    }
}

impl QuantileModel {
    pub fn new(law: impl QuantileLaw + 'static) -> Self {
        Self::from_arc(Arc::new(law))
    }

    pub fn from_arc(law: Arc<dyn QuantileLaw>) -> Self {
        let origin = law.quantile(0.0);
        let mean = match law.mean_form() {
            MeanForm::Finite(m) => Ok(m),
            MeanForm::Infinite => Err(Error::InfiniteMean(law.label())),
            MeanForm::Unknown => mean_by_quadrature(law.as_ref()),
        };
        let class_d = origin.is_finite()
            && origin.abs() <= 1e-9
            && law.support().lower >= 0.0
            && mean.is_ok();
        Self {
            law,
            mean,
            origin,
            class_d,
        }
    }

    pub fn label(&self) -> String {
        self.law.label()
    }

    pub fn law(&self) -> &Arc<dyn QuantileLaw> {
        &self.law
    }

    pub fn quantile(&self, u: f64) -> f64 {
        self.law.quantile(u)
    }

    pub fn quantile_density(&self, u: f64) -> f64 {
        self.law.quantile_density(u)
    }

    pub fn cdf(&self, x: f64) -> f64 {
        self.law.cdf(x)
    }

    pub fn survival(&self, x: f64) -> f64 {
        self.law.survival(x)
    }

    pub fn pdf(&self, x: f64) -> Option<f64> {
        self.law.pdf(x)
    }

    pub fn support(&self) -> Support {
        self.law.support()
    }

    /// `Q(0⁺)`; zero for class-D members.
    pub fn origin(&self) -> f64 {
        self.origin
    }

    pub fn class_d(&self) -> bool {
        self.class_d
    }

    pub fn mean(&self) -> Result<f64> {
        self.mean.clone()
    }

    pub fn require_class_d(&self) -> Result<()> {
        if self.class_d {
            return Ok(());
        }
        self.mean.clone()?;
        Err(Error::Domain(format!(
            "{} is not in class D (Q(0+) = {})",
            self.label(),
            self.origin
        )))
    }

    pub fn pdf_or_err(&self, x: f64) -> Result<f64> {
        self.pdf(x)
            .ok_or_else(|| Error::MissingDensity(self.label()))
    }
}

fn mean_by_quadrature(law: &dyn QuantileLaw) -> Result<f64> {
    let r = integrate(|u| law.quantile(u), 0.0, 1.0, &QuadratureSpec::default());
    match r {
        Ok(r) if r.converged => Ok(r.value),
        Ok(_) | Err(Error::NonFiniteEvaluation { .. }) => Err(Error::InfiniteMean(law.label())),
        Err(e) => Err(e),
    }
}

/// `∫₀¹ Q(u) du` by quadrature, regardless of any closed form.
pub fn mean_numeric(model: &QuantileModel) -> Result<f64> {
    mean_by_quadrature(model.law.as_ref())
}

/// Mean of the model; closed form when the law has one.
pub fn mean(model: &QuantileModel) -> Result<f64> {
    model.mean()
}

/// Reversed hazard rate `τ(x) = f(x)/F(x)`.
pub fn reversed_hazard(model: &QuantileModel, x: f64) -> Result<f64> {
    if !model.support().contains_interior(x) {
        return Err(Error::Domain(format!(
            "x = {x} is outside the support interior"
        )));
    }
    let big_f = model.cdf(x);
    if !(big_f > 0.0) {
        return Err(Error::Domain(format!("F({x}) = 0")));
    }
    Ok(model.pdf_or_err(x)? / big_f)
}

/// Mean residual life `E[X − t | X > t]`, integrated in quantile space:
/// `(1/F̄(t)) ∫_{F(t)}^1 (Q(u) − t) du`.
pub fn mean_residual_life(model: &QuantileModel, t: f64) -> Result<f64> {
    model.mean()?;
    if !(t >= 0.0) {
        return Err(Error::Domain(format!(
            "mean residual life needs t >= 0, got {t}"
        )));
    }
    let big_f = model.cdf(t);
    let sbar = model.survival(t);
    if !(big_f < 1.0) || !(sbar > 0.0) {
        return Err(Error::Domain(format!("F({t}) = 1")));
    }
    let lo = big_f.max(0.0);
    let r = integrate(
        |u| (model.quantile(u) - t).max(0.0),
        lo,
        1.0,
        &QuadratureSpec::precise(),
    )?;
    Ok(r.value / sbar)
}

/// Equilibrium density `F̄(x)/E[X]`.
pub fn equilibrium_density(model: &QuantileModel, x: f64) -> Result<f64> {
    model.require_class_d()?;
    if !(x >= 0.0) {
        return Err(Error::Domain(format!(
            "equilibrium density needs x >= 0, got {x}"
        )));
    }
    Ok(model.survival(x) / model.mean()?)
}

/// `E[g(X) | Q(p1) < X ≤ Q(p2)] = (p2 − p1)⁻¹ ∫_{p1}^{p2} g(Q(u)) du`.
pub fn conditional_mean_between_quantiles(
    model: &QuantileModel,
    g: impl Fn(f64) -> f64,
    p1: f64,
    p2: f64,
) -> Result<f64> {
    if !(0.0 <= p1 && p1 < p2 && p2 <= 1.0) {
        return Err(Error::Domain(format!(
            "need 0 <= p1 < p2 <= 1, got ({p1}, {p2})"
        )));
    }
    let r = integrate(|u| g(model.quantile(u)), p1, p2, &QuadratureSpec::precise())?;
    if !r.converged {
        return Err(Error::NonConvergence(format!(
            "conditional mean of {} on ({p1}, {p2})",
            model.label()
        )));
    }
    Ok(r.value / (p2 - p1))
}

/// Catalog tag plus parameters.
#[derive(Debug, Clone, PartialEq)]
pub enum FamilySpec {
    Exponential { lambda: f64 },
    Uniform { a: f64 },
    PowerUnit { alpha: f64 },
    PowerScale { alpha: f64, beta: f64 },
    Lomax { alpha: f64, lambda: f64 },
    ParetoI { alpha: f64, beta: f64 },
    Rayleigh { alpha: f64 },
    GeoMaxExp { lambda: f64, delta: f64 },
    FrechetType { c: f64, gamma: f64 },
    BlockPiecewise,
    Tabulated { pairs: Vec<(f64, f64)> },
}

pub fn make_model(spec: &FamilySpec) -> Result<QuantileModel> {
    Ok(match *spec {
        FamilySpec::Exponential { lambda } => QuantileModel::new(Exponential::new(lambda)?),
        FamilySpec::Uniform { a } => QuantileModel::new(Uniform::new(a)?),
        FamilySpec::PowerUnit { alpha } => QuantileModel::new(PowerUnit::new(alpha)?),
        FamilySpec::PowerScale { alpha, beta } => QuantileModel::new(PowerScale::new(alpha, beta)?),
        FamilySpec::Lomax { alpha, lambda } => QuantileModel::new(Lomax::new(alpha, lambda)?),
        FamilySpec::ParetoI { alpha, beta } => QuantileModel::new(ParetoI::new(alpha, beta)?),
        FamilySpec::Rayleigh { alpha } => QuantileModel::new(Rayleigh::new(alpha)?),
        FamilySpec::GeoMaxExp { lambda, delta } => {
            QuantileModel::new(GeoMaxExp::new(lambda, delta)?)
        }
        FamilySpec::FrechetType { c, gamma } => QuantileModel::new(FrechetType::new(c, gamma)?),
        FamilySpec::BlockPiecewise => QuantileModel::new(BlockPiecewise),
        FamilySpec::Tabulated { ref pairs } => QuantileModel::new(Tabulated::from_pairs(pairs)?),
    })
}

pub(crate) fn positive(name: &str, v: f64) -> Result<f64> {
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(Error::InvalidParameter(format!(
            "{name} must be positive and finite, got {v}"
        )))
    }
}
