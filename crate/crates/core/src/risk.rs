//! Risk measures and the models derived from a parent at a quantile level.
//!
//! CVaR here is the mean excess over the quantile,
//! `CVaR[X;p] = (1−p)⁻¹ ∫_p^1 (Q(t) − Q(p)) dt`, so `CVaR[X;0] = E[X]` and
//! `CVaR[X;p] = mrl(Q(p))`. Other texts use the tail mean `E[X | X > Q(p)]`,
//! which is this plus `Q(p)`.

use std::fmt;
use std::io::Write;
use std::str::FromStr;
use std::sync::Arc;

use crate::distributions::{MeanForm, QuantileLaw, QuantileModel, Support};
use crate::error::{Error, Result};
use crate::format::csv_num;
use crate::numerics::grid::chebyshev_unit;
use crate::numerics::{integrate, QuadratureSpec};
use crate::orders::{Verdict, VerdictStatus, Witness};

fn open_level(name: &str, p: f64) -> Result<f64> {
    if p > 0.0 && p < 1.0 {
        Ok(p)
    } else {
        Err(Error::Domain(format!("{name} must lie in (0, 1), got {p}")))
    }
}

/// Value-at-risk, `Q(p)`.
pub fn var(x: &QuantileModel, p: f64) -> Result<f64> {
    open_level("p", p)?;
    Ok(x.quantile(p))
}

/// `1 − (1−u)(1−p)`, kept strictly below 1 so tail quantiles stay finite.
fn tail_level(u: f64, p: f64) -> f64 {
    if u >= 1.0 {
        return 1.0;
    }
    (1.0 - (1.0 - u) * (1.0 - p)).min(1.0 - f64::EPSILON / 2.0)
}

/// Mean excess over `Q(p)`, `(1−p)⁻¹ ∫_p^1 (Q(t) − Q(p)) dt`, by quadrature.
/// Needs a finite mean.
pub fn cvar(x: &QuantileModel, p: f64) -> Result<f64> {
    if p == 0.0 {
        return x.mean();
    }
    open_level("p", p)?;
    x.mean()?;
    let qp = x.quantile(p);
    let r = integrate(|t| x.quantile(t) - qp, p, 1.0, &QuadratureSpec::default())?;
    if !r.converged {
        return Err(Error::NonConvergence(format!(
            "CVaR of {} at p = {p}",
            x.label()
        )));
    }
    Ok(r.value / (1.0 - p))
}

/// The law's own closed form for CVaR, where it has one.
pub fn cvar_closed_form(x: &QuantileModel, p: f64) -> Option<f64> {
    x.law().cvar_closed_form(p)
}

/// Right spread `∫_{Q(p)}^∞ F̄(y) dy = (1 − p)·CVaR[X;p]`.
pub fn right_spread(x: &QuantileModel, p: f64) -> Result<f64> {
    if p == 0.0 {
        return x.mean();
    }
    Ok((1.0 - open_level("p", p)?) * cvar(x, p)?)
}

/// Average value-at-risk `(1/v) ∫₀^v Q(u) du`; `v = 1` gives the mean.
pub fn avar(x: &QuantileModel, v: f64) -> Result<f64> {
    if v == 1.0 {
        return x.mean();
    }
    open_level("v", v)?;
    let r = integrate(|u| x.quantile(u), 0.0, v, &QuadratureSpec::default())?;
    if !r.converged {
        return Err(Error::NonConvergence(format!(
            "AVaR of {} at v = {v}",
            x.label()
        )));
    }
    Ok(r.value / v)
}

/// The law's own closed form for AVaR, where it has one.
pub fn avar_closed_form(x: &QuantileModel, v: f64) -> Option<f64> {
    x.law().avar_closed_form(v)
}

/// `CVaR[X;p] / Q(p)`, the mean of the proportional residual.
pub fn proportional_cvar(x: &QuantileModel, p: f64) -> Result<f64> {
    let qp = var(x, p)?;
    if !(qp > 0.0) {
        return Err(Error::QZero(p));
    }
    Ok(cvar(x, p)? / qp)
}

/// Pdf of the parent, falling back to `1/q(F(x))` for laws without one.
fn parent_pdf(parent: &QuantileModel, x: f64) -> f64 {
    parent
        .pdf(x)
        .unwrap_or_else(|| 1.0 / parent.quantile_density(parent.cdf(x)))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DerivedModelKind {
    /// `X_{Q(p)} = [X − Q(p) | X > Q(p)]`.
    ResidualAtQuantile(f64),
    /// `X̃_p = X_{Q(p)} / Q(p)`.
    ProportionalResidual(f64),
    /// `X*_v` with cdf `Q(vx)/Q(v)` on (0,1).
    StarModel(f64),
    /// `X̂_v` with cdf `Q(x)/Q(v)` on (0,v).
    HatModel(f64),
}

impl DerivedModelKind {
    pub fn parameter(self) -> f64 {
        match self {
            DerivedModelKind::ResidualAtQuantile(p)
            | DerivedModelKind::ProportionalResidual(p)
            | DerivedModelKind::StarModel(p)
            | DerivedModelKind::HatModel(p) => p,
        }
    }

    pub fn tag(self) -> &'static str {
        match self {
            DerivedModelKind::ResidualAtQuantile(_) => "residual",
            DerivedModelKind::ProportionalResidual(_) => "propresidual",
            DerivedModelKind::StarModel(_) => "star",
            DerivedModelKind::HatModel(_) => "hat",
        }
    }
}

impl fmt::Display for DerivedModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.tag(), self.parameter())
    }
}

impl FromStr for DerivedModelKind {
    type Err = Error;

    /// `residual:0.3`, `propresidual:0.3`, `star:0.3`, `hat:0.3`.
    fn from_str(s: &str) -> Result<Self> {
        let (tag, value) = s.split_once(':').ok_or_else(|| Error::UnknownName {
            kind: "derived model",
            name: s.to_string(),
        })?;
        let v: f64 = value
            .trim()
            .parse()
            .map_err(|_| Error::InvalidParameter(format!("bad level '{value}' in '{s}'")))?;
        Ok(match tag.trim().to_ascii_lowercase().as_str() {
            "residual" => DerivedModelKind::ResidualAtQuantile(v),
            "propresidual" => DerivedModelKind::ProportionalResidual(v),
            "star" => DerivedModelKind::StarModel(v),
            "hat" => DerivedModelKind::HatModel(v),
            _ => {
                return Err(Error::UnknownName {
                    kind: "derived model",
                    name: tag.to_string(),
                })
            }
        })
    }
}

/// Builds the derived model as a full [`QuantileModel`] over `x`.
pub fn derive(x: &QuantileModel, kind: DerivedModelKind) -> Result<QuantileModel> {
    let level = open_level("derived-model level", kind.parameter())?;
    let law: Arc<dyn QuantileLaw> = match kind {
        DerivedModelKind::ResidualAtQuantile(p) => Arc::new(ResidualLaw {
            parent: x.clone(),
            p,
            qp: x.quantile(p),
            mean: cvar(x, p)?,
        }),
        DerivedModelKind::ProportionalResidual(p) => {
            let qp = x.quantile(p);
            if !(qp > 0.0) {
                return Err(Error::QZero(p));
            }
            Arc::new(ProportionalResidualLaw {
                parent: x.clone(),
                p,
                qp,
                mean: cvar(x, p)? / qp,
            })
        }
        DerivedModelKind::StarModel(v) | DerivedModelKind::HatModel(v) => {
            let qv = x.quantile(v);
            if !(qv > 0.0 && qv.is_finite()) {
                return Err(Error::QZero(v));
            }
            let ratio = avar_closed_form(x, v).map_or_else(|| avar(x, v), Ok)? / qv;
            if matches!(kind, DerivedModelKind::StarModel(_)) {
                Arc::new(StarLaw {
                    parent: x.clone(),
                    v,
                    qv,
                    mean: 1.0 - ratio,
                })
            } else {
                Arc::new(HatLaw {
                    parent: x.clone(),
                    v,
                    qv,
                    mean: level * (1.0 - ratio),
                })
            }
        }
    };
    Ok(QuantileModel::from_arc(law))
}

#[derive(Debug)]
struct ResidualLaw {
    parent: QuantileModel,
    p: f64,
    qp: f64,
    mean: f64,
}

impl QuantileLaw for ResidualLaw {
    fn label(&self) -> String {
        format!("residual:{}[{}]", self.p, self.parent.label())
    }
    fn quantile(&self, u: f64) -> f64 {
        if u <= 0.0 {
            // 1 − (1 − p) need not round back to p
            return 0.0;
        }
        self.parent.quantile(tail_level(u, self.p)) - self.qp
    }
    fn quantile_density(&self, u: f64) -> f64 {
        self.parent.quantile_density(tail_level(u, self.p)) * (1.0 - self.p)
    }
    fn cdf(&self, x: f64) -> f64 {
        1.0 - self.survival(x)
    }
    fn survival(&self, x: f64) -> f64 {
        if x <= 0.0 {
            return 1.0;
        }
        (self.parent.survival(x + self.qp) / (1.0 - self.p)).clamp(0.0, 1.0)
    }
    fn pdf(&self, x: f64) -> Option<f64> {
        if x < 0.0 {
            return Some(0.0);
        }
        self.parent.pdf(x + self.qp).map(|f| f / (1.0 - self.p))
    }
    fn support(&self) -> Support {
        Support::new(0.0, self.parent.support().upper - self.qp)
    }
    fn mean_form(&self) -> MeanForm {
        MeanForm::Finite(self.mean)
    }
}

#[derive(Debug)]
struct ProportionalResidualLaw {
    parent: QuantileModel,
    p: f64,
    qp: f64,
    mean: f64,
}

impl QuantileLaw for ProportionalResidualLaw {
    fn label(&self) -> String {
        format!("propresidual:{}[{}]", self.p, self.parent.label())
    }
    fn quantile(&self, u: f64) -> f64 {
        if u <= 0.0 {
            return 0.0;
        }
        self.parent.quantile(tail_level(u, self.p)) / self.qp - 1.0
    }
    fn quantile_density(&self, u: f64) -> f64 {
        self.parent.quantile_density(tail_level(u, self.p)) * (1.0 - self.p) / self.qp
    }
    fn cdf(&self, x: f64) -> f64 {
        1.0 - self.survival(x)
    }
    fn survival(&self, x: f64) -> f64 {
        if x <= 0.0 {
            return 1.0;
        }
        (self.parent.survival((1.0 + x) * self.qp) / (1.0 - self.p)).clamp(0.0, 1.0)
    }
    fn pdf(&self, x: f64) -> Option<f64> {
        if x < 0.0 {
            return Some(0.0);
        }
        self.parent
            .pdf((1.0 + x) * self.qp)
            .map(|f| f * self.qp / (1.0 - self.p))
    }
    fn support(&self) -> Support {
        Support::new(0.0, self.parent.support().upper / self.qp - 1.0)
    }
    fn mean_form(&self) -> MeanForm {
        MeanForm::Finite(self.mean)
    }
}

#[derive(Debug)]
struct StarLaw {
    parent: QuantileModel,
    v: f64,
    qv: f64,
    mean: f64,
}

impl QuantileLaw for StarLaw {
    fn label(&self) -> String {
        format!("star:{}[{}]", self.v, self.parent.label())
    }
    fn quantile(&self, u: f64) -> f64 {
        (self.parent.cdf(self.qv * u) / self.v).clamp(0.0, 1.0)
    }
    fn quantile_density(&self, u: f64) -> f64 {
        parent_pdf(&self.parent, self.qv * u) * self.qv / self.v
    }
    fn cdf(&self, x: f64) -> f64 {
        if x <= 0.0 {
            0.0
        } else if x >= 1.0 {
            1.0
        } else {
            self.parent.quantile(self.v * x) / self.qv
        }
    }
    fn pdf(&self, x: f64) -> Option<f64> {
        Some(if x <= 0.0 || x >= 1.0 {
            0.0
        } else {
            self.v * self.parent.quantile_density(self.v * x) / self.qv
        })
    }
    fn support(&self) -> Support {
        Support::new(0.0, 1.0)
    }
    fn mean_form(&self) -> MeanForm {
        MeanForm::Finite(self.mean)
    }
}

#[derive(Debug)]
struct HatLaw {
    parent: QuantileModel,
    v: f64,
    qv: f64,
    mean: f64,
}

impl QuantileLaw for HatLaw {
    fn label(&self) -> String {
        format!("hat:{}[{}]", self.v, self.parent.label())
    }
    fn quantile(&self, u: f64) -> f64 {
        self.parent.cdf(self.qv * u).clamp(0.0, self.v)
    }
    fn quantile_density(&self, u: f64) -> f64 {
        parent_pdf(&self.parent, self.qv * u) * self.qv
    }
    fn cdf(&self, x: f64) -> f64 {
        if x <= 0.0 {
            0.0
        } else if x >= self.v {
            1.0
        } else {
            self.parent.quantile(x) / self.qv
        }
    }
    fn pdf(&self, x: f64) -> Option<f64> {
        Some(if x <= 0.0 || x >= self.v {
            0.0
        } else {
            self.parent.quantile_density(x) / self.qv
        })
    }
    fn support(&self) -> Support {
        Support::new(0.0, self.v)
    }
    fn mean_form(&self) -> MeanForm {
        MeanForm::Finite(self.mean)
    }
}

/// Checks that `CVaR[X;p] / CVaR[Y;p]` is constant on a Chebyshev p-grid.
/// The violation is the largest relative deviation from the first ratio.
pub fn proportionality_check(
    x: &QuantileModel,
    y: &QuantileModel,
    grid_size: usize,
    tol: f64,
) -> Result<Verdict> {
    x.require_class_d()?;
    y.require_class_d()?;
    let grid = chebyshev_unit(grid_size);
    let mut reference = None;
    let mut worst: Option<Witness> = None;
    for &p in &grid {
        let cy = cvar(y, p)?;
        if !(cy > 1e-300) {
            continue;
        }
        let ratio = cvar(x, p)? / cy;
        let r0 = *reference.get_or_insert(ratio);
        let dev = ((ratio - r0) / r0).abs();
        if dev > tol && worst.as_ref().map_or(true, |w| dev > w.violation) {
            worst = Some(Witness {
                location: vec![p],
                quantity: format!("CVaR ratio constant (reference {})", csv_num(r0)),
                violation: dev,
            });
        }
    }
    let status = match (&reference, &worst) {
        (None, _) => VerdictStatus::Inconclusive,
        (_, Some(_)) => VerdictStatus::Fails,
        _ => VerdictStatus::HoldsOnGrid,
    };
    Ok(Verdict {
        relation: "proportional".into(),
        status,
        witness: worst,
        grid_size,
        tolerance: tol,
    })
}

/// A named risk measure evaluated at a level in (0,1).
pub trait RiskMeasure: Send + Sync {
    fn name(&self) -> &'static str;
    fn evaluate(&self, x: &QuantileModel, p: f64) -> Result<f64>;
}

struct FnMeasure {
    name: &'static str,
    eval: fn(&QuantileModel, f64) -> Result<f64>,
}

impl RiskMeasure for FnMeasure {
    fn name(&self) -> &'static str {
        self.name
    }

    fn evaluate(&self, x: &QuantileModel, p: f64) -> Result<f64> {
        (self.eval)(x, p)
    }
}

pub fn risk_measures() -> Vec<Box<dyn RiskMeasure>> {
    let table: [(&'static str, fn(&QuantileModel, f64) -> Result<f64>); 5] = [
        ("var", var),
        ("cvar", cvar),
        ("avar", avar),
        ("right-spread", right_spread),
        ("pcvar", proportional_cvar),
    ];
    table
        .into_iter()
        .map(|(name, eval)| Box::new(FnMeasure { name, eval }) as Box<dyn RiskMeasure>)
        .collect()
}

pub fn risk_measure(name: &str) -> Result<Box<dyn RiskMeasure>> {
    risk_measures()
        .into_iter()
        .find(|m| m.name().eq_ignore_ascii_case(name))
        .ok_or_else(|| Error::UnknownName {
            kind: "risk measure",
            name: name.to_string(),
        })
}

#[derive(Debug, Clone, PartialEq)]
pub struct RiskCurve {
    pub measure: String,
    pub points: Vec<(f64, f64)>,
}

impl RiskCurve {
    pub fn evaluate(x: &QuantileModel, measure: &dyn RiskMeasure, levels: &[f64]) -> Result<Self> {
        if levels.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::InvalidParameter(
                "levels must be strictly increasing".into(),
            ));
        }
        let points = levels
            .iter()
            .map(|&p| {
                open_level("p", p)?;
                Ok((p, measure.evaluate(x, p)?))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            measure: measure.name().to_string(),
            points,
        })
    }

    /// CSV with header `p,value`, 12 significant digits, LF line ends.
    pub fn write_csv(&self, mut out: impl Write) -> Result<()> {
        writeln!(out, "p,value")?;
        for &(p, v) in &self.points {
            writeln!(out, "{},{}", csv_num(p), csv_num(v))?;
        }
        Ok(())
    }

    pub fn to_csv(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("ascii output")
    }
}
