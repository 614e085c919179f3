//! Identities for the six ordered pairs built from one parent law: residual
//! lives, proportional residuals, star models and hat models.

use std::fmt;

use super::printed::{family_density, generic_density, require_level, DensityFn};
use super::report::{DensityCheck, IdentityReport};
use super::testfn::TestFunction;
use super::verify::mvt_report;
use crate::distributions::QuantileModel;
use crate::error::{Error, Result};
use crate::numerics::grid::chebyshev_unit;
use crate::orders::{
    check_ifr, check_nbu, check_order, check_proportional_ifr, check_xtau_decreasing,
    strictly_decreasing_verdict, OrderRelation, Verdict,
};
use crate::risk::{avar, avar_closed_form, cvar, cvar_closed_form, derive, DerivedModelKind};

/// Strictness slack for "strictly decreasing" hypotheses.
pub const STRICT_SLACK: f64 = 1e-10;
/// Pointwise tolerance for the printed-density comparison.
pub const DENSITY_TOL: f64 = 1e-6;
pub const DENSITY_POINTS: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ApplicationKind {
    /// `Ψ^L(X_{Q(p)}, X)`.
    Nbu { p: f64 },
    /// `Ψ^L(X_{Q(p)}, X_{Q(r)})`, `r < p`.
    Ifr { r: f64, p: f64 },
    /// `Ψ^L(X̃_p, X)`.
    Risk1 { p: f64 },
    /// `Ψ^L(X̃_p, X̃_r)`, `r < p`.
    Risk2 { r: f64, p: f64 },
    /// `Ψ^L(X*_v, X*_w)`, `v < w`.
    Avar { v: f64, w: f64 },
    /// `Ψ^L(X̂_v, X̂_w)`, `v < w`.
    Hat { v: f64, w: f64 },
}

/// Level parameters as they arrive from a command line.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Levels {
    pub p: Option<f64>,
    pub r: Option<f64>,
    pub v: Option<f64>,
    pub w: Option<f64>,
}

impl ApplicationKind {
    pub const IDS: [&'static str; 6] = [
        "app-nbu",
        "app-ifr",
        "app-risk1",
        "app-risk2",
        "app-avar",
        "app-hat",
    ];

    pub fn id(self) -> &'static str {
        match self {
            ApplicationKind::Nbu { .. } => "app-nbu",
            ApplicationKind::Ifr { .. } => "app-ifr",
            ApplicationKind::Risk1 { .. } => "app-risk1",
            ApplicationKind::Risk2 { .. } => "app-risk2",
            ApplicationKind::Avar { .. } => "app-avar",
            ApplicationKind::Hat { .. } => "app-hat",
        }
    }

    pub fn from_id(id: &str, levels: Levels) -> Result<Self> {
        let need = |name: &str, v: Option<f64>| {
            v.ok_or_else(|| Error::InvalidParameter(format!("{id} needs --{name}")))
        };
        let kind = match id {
            "app-nbu" => ApplicationKind::Nbu {
                p: need("p", levels.p)?,
            },
            "app-ifr" => ApplicationKind::Ifr {
                r: need("r", levels.r)?,
                p: need("p", levels.p)?,
            },
            "app-risk1" => ApplicationKind::Risk1 {
                p: need("p", levels.p)?,
            },
            "app-risk2" => ApplicationKind::Risk2 {
                r: need("r", levels.r)?,
                p: need("p", levels.p)?,
            },
            "app-avar" => ApplicationKind::Avar {
                v: need("v", levels.v)?,
                w: need("w", levels.w)?,
            },
            "app-hat" => ApplicationKind::Hat {
                v: need("v", levels.v)?,
                w: need("w", levels.w)?,
            },
            _ => {
                return Err(Error::UnknownName {
                    kind: "application identity",
                    name: id.to_string(),
                })
            }
        };
        kind.validate()?;
        Ok(kind)
    }

    pub fn validate(self) -> Result<()> {
        let ordered = |a: f64, b: f64, names: &str| -> Result<()> {
            require_level(names, a)?;
            require_level(names, b)?;
            if a < b {
                Ok(())
            } else {
                Err(Error::InvalidParameter(format!(
                    "{names} must satisfy {a} < {b}"
                )))
            }
        };
        match self {
            ApplicationKind::Nbu { p } | ApplicationKind::Risk1 { p } => {
                require_level("p", p).map(|_| ())
            }
            ApplicationKind::Ifr { r, p } | ApplicationKind::Risk2 { r, p } => {
                ordered(r, p, "r < p")
            }
            ApplicationKind::Avar { v, w } | ApplicationKind::Hat { v, w } => {
                ordered(v, w, "v < w")
            }
        }
    }

    /// The ordered pair `(A, B)` with `A ≤st B` expected.
    pub fn pair(self, x: &QuantileModel) -> Result<(QuantileModel, QuantileModel)> {
        self.validate()?;
        use DerivedModelKind as D;
        Ok(match self {
            ApplicationKind::Nbu { p } => (derive(x, D::ResidualAtQuantile(p))?, x.clone()),
            ApplicationKind::Ifr { r, p } => (
                derive(x, D::ResidualAtQuantile(p))?,
                derive(x, D::ResidualAtQuantile(r))?,
            ),
            ApplicationKind::Risk1 { p } => (derive(x, D::ProportionalResidual(p))?, x.clone()),
            ApplicationKind::Risk2 { r, p } => (
                derive(x, D::ProportionalResidual(p))?,
                derive(x, D::ProportionalResidual(r))?,
            ),
            ApplicationKind::Avar { v, w } => {
                (derive(x, D::StarModel(v))?, derive(x, D::StarModel(w))?)
            }
            ApplicationKind::Hat { v, w } => {
                (derive(x, D::HatModel(v))?, derive(x, D::HatModel(w))?)
            }
        })
    }
}

impl fmt::Display for ApplicationKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            ApplicationKind::Nbu { p } | ApplicationKind::Risk1 { p } => {
                write!(f, "{}(p={p})", self.id())
            }
            ApplicationKind::Ifr { r, p } | ApplicationKind::Risk2 { r, p } => {
                write!(f, "{}(r={r}, p={p})", self.id())
            }
            ApplicationKind::Avar { v, w } | ApplicationKind::Hat { v, w } => {
                write!(f, "{}(v={v}, w={w})", self.id())
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ApplicationOptions {
    /// Skip the class-wide hypothesis and keep only the fixed-level one.
    pub local: bool,
    /// Grid for the class-wide checks.
    pub gate_grid: usize,
}

impl Default for ApplicationOptions {
    fn default() -> Self {
        Self {
            local: false,
            gate_grid: 64,
        }
    }
}

fn gate(hypothesis: &str, v: Verdict) -> Result<String> {
    if v.holds() {
        return Ok(format!("{hypothesis}: {}", v.status));
    }
    Err(Error::HypothesisFailed {
        hypothesis: hypothesis.to_string(),
        witness: v.to_string(),
    })
}

fn strictly_decreasing(name: &str, grid: usize, f: impl Fn(f64) -> Result<f64>) -> Result<String> {
    let points = chebyshev_unit(grid)
        .into_iter()
        .map(|p| f(p).map(|v| (p, v)))
        .collect::<Result<Vec<_>>>()?;
    gate(
        &format!("{name} strictly decreasing"),
        strictly_decreasing_verdict(name, name, &points, STRICT_SLACK),
    )
}

fn best_cvar(x: &QuantileModel, p: f64) -> Result<f64> {
    cvar_closed_form(x, p).map_or_else(|| cvar(x, p), Ok)
}

fn best_avar(x: &QuantileModel, v: f64) -> Result<f64> {
    avar_closed_form(x, v).map_or_else(|| avar(x, v), Ok)
}

/// Checks the proposition's hypotheses on grids. Returns what was checked.
pub fn check_hypotheses(
    x: &QuantileModel,
    kind: ApplicationKind,
    options: ApplicationOptions,
) -> Result<Vec<String>> {
    kind.validate()?;
    let n = options.gate_grid;
    let tol = crate::orders::DEFAULT_TOL;
    let mut checked = Vec::new();
    if !options.local {
        match kind {
            ApplicationKind::Nbu { .. } => checked.push(gate("NBU", check_nbu(x, n, tol)?)?),
            ApplicationKind::Ifr { .. } => {
                checked.push(gate("IFR", check_ifr(x, n, tol)?)?);
                checked.push(strictly_decreasing("CVaR", n, |p| best_cvar(x, p))?);
            }
            ApplicationKind::Risk1 { .. } => checked.push(
                "class-wide proportional NBU not required; checked at the fixed level".into(),
            ),
            ApplicationKind::Risk2 { .. } => {
                checked.push(gate(
                    "proportional IFR",
                    check_proportional_ifr(x, n, tol)?,
                )?);
                checked.push(strictly_decreasing("CVaR/Q", n, |p| {
                    Ok(best_cvar(x, p)? / x.quantile(p))
                })?);
            }
            ApplicationKind::Avar { .. } => {
                checked.push(gate(
                    "x*tau(x) decreasing",
                    check_xtau_decreasing(x, 4 * n, tol)?,
                )?);
                checked.push(strictly_decreasing("AVaR/Q", n, |v| {
                    Ok(best_avar(x, v)? / x.quantile(v))
                })?);
            }
            ApplicationKind::Hat { .. } => {}
        }
    } else {
        checked.push("local version: class-wide hypothesis not checked".into());
    }
    Ok(checked)
}

/// Builds the pair, gates it, runs the mean-value identity on it and compares
/// the numeric `Z^L` density with the closed forms.
pub fn verify_application(
    x: &QuantileModel,
    kind: ApplicationKind,
    g: &TestFunction,
    options: ApplicationOptions,
) -> Result<IdentityReport> {
    let checked = check_hypotheses(x, kind, options)?;
    let (a, b) = kind.pair(x)?;
    let st = check_order(
        &a,
        &b,
        OrderRelation::St,
        crate::orders::DEFAULT_GRID,
        crate::orders::DEFAULT_TOL,
    )?;
    let mut notes = checked;
    notes.push(gate("pair ordered (st)", st)?);
    let (ea, eb) = (a.mean()?, b.mean()?);
    if !(eb - ea > 1e-12 * ea.abs().max(eb.abs()).max(1.0)) {
        return Err(Error::HypothesisFailed {
            hypothesis: "strictly ordered means".into(),
            witness: format!("E[A] = {ea}, E[B] = {eb}"),
        });
    }
    if let ApplicationKind::Risk1 { p } = kind {
        let c = best_cvar(x, p)?;
        let rhs = x.mean()? * x.quantile(p);
        if !(c < rhs) {
            return Err(Error::HypothesisFailed {
                hypothesis: "CVaR_p < E[X] Q(p)".into(),
                witness: format!("CVaR = {c}, E[X] Q(p) = {rhs}"),
            });
        }
    }

    let mut report = mvt_report(kind.id(), &a, &b, g)?.note(format!("{kind} on {}", x.label()));
    for n in notes {
        report = report.note(n);
    }
    // normalize by direct quadrature so the comparison does not reuse the
    // closed-form means
    let gap = super::verify::Quad::default().run("E[B]-E[A]", |u| b.quantile(u) - a.quantile(u))?;
    let numeric = move |u: f64| (b.quantile(u) - a.quantile(u)) / gap;
    let generic = generic_density(x, kind)?;
    report =
        report.with_density_check(compare_densities("parent-form density", &numeric, &generic));
    if let Some((name, f)) = family_density(x, kind) {
        report = report.with_density_check(compare_densities(name, &numeric, &f));
    }
    Ok(report)
}

/// Largest relative deviation of `candidate` from `printed` on the check
/// grid.
pub fn compare_densities(
    formula: &str,
    candidate: &dyn Fn(f64) -> f64,
    printed: &DensityFn,
) -> DensityCheck {
    let mut worst = (0.0f64, f64::NAN);
    for u in chebyshev_unit(DENSITY_POINTS) {
        let (c, p) = (candidate(u), printed(u));
        let dev = if c == p { 0.0 } else { (c - p).abs() / p.abs() };
        let dev = if dev.is_nan() { f64::INFINITY } else { dev };
        if dev > worst.0 || worst.1.is_nan() {
            worst = (dev, u);
        }
    }
    DensityCheck {
        formula: formula.to_string(),
        points: DENSITY_POINTS,
        max_rel_deviation: worst.0,
        worst_u: worst.1,
        tolerance: DENSITY_TOL,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distributions::{Exponential, FrechetType, GeoMaxExp, Lomax, Rayleigh};

    fn show(r: &IdentityReport) -> String {
        format!("{r:#?}")
    }

    #[test]
    fn geomax_ifr_pair() {
        let x = QuantileModel::new(GeoMaxExp::new(1.0, 0.5).unwrap());
        let kind = ApplicationKind::Ifr { r: 0.3, p: 0.7 };
        let r =
            verify_application(&x, kind, &TestFunction::Power(2.0), Default::default()).unwrap();
        assert!(r.pass && r.rel_residual < 1e-6, "{}", show(&r));
        assert_eq!(r.density_checks.len(), 1);
    }

    #[test]
    fn rayleigh_proportional_pair_is_scale_free() {
        let kind = ApplicationKind::Risk2 { r: 0.3, p: 0.7 };
        let g = TestFunction::Power(2.0);
        let x1 = QuantileModel::new(Rayleigh::new(1.0).unwrap());
        let r = verify_application(&x1, kind, &g, Default::default()).unwrap();
        assert!(r.pass, "{}", show(&r));
        assert_eq!(r.density_checks.len(), 2);
        let x4 = QuantileModel::new(Rayleigh::new(4.0).unwrap());
        let (a1, b1) = kind.pair(&x1).unwrap();
        let (a4, b4) = kind.pair(&x4).unwrap();
        let (g1, g4) = (
            b1.mean().unwrap() - a1.mean().unwrap(),
            b4.mean().unwrap() - a4.mean().unwrap(),
        );
        for u in chebyshev_unit(32) {
            let d1 = (b1.quantile(u) - a1.quantile(u)) / g1;
            let d4 = (b4.quantile(u) - a4.quantile(u)) / g4;
            assert!((d1 - d4).abs() < 1e-9);
        }
    }

    #[test]
    fn frechet_star_pair() {
        let x = QuantileModel::new(FrechetType::new(1.0, 1.0).unwrap());
        let kind = ApplicationKind::Avar { v: 0.3, w: 0.7 };
        let r =
            verify_application(&x, kind, &TestFunction::Power(2.0), Default::default()).unwrap();
        assert!(r.pass && r.rel_residual < 1e-6, "{}", show(&r));
        assert_eq!(r.density_checks.len(), 2);
    }

    #[test]
    fn exponential_hat_pair() {
        let x = QuantileModel::new(Exponential::new(3.0).unwrap());
        let kind = ApplicationKind::Hat { v: 0.1, w: 0.2 };
        let r = verify_application(&x, kind, &TestFunction::Exp, Default::default()).unwrap();
        assert!(r.pass, "{}", show(&r));
        assert_eq!(r.density_checks.len(), 2);
    }

    #[test]
    fn nbu_and_risk1_pairs() {
        let x = QuantileModel::new(Rayleigh::new(1.0).unwrap());
        let g = TestFunction::Power(3.0);
        let r = verify_application(&x, ApplicationKind::Nbu { p: 0.4 }, &g, Default::default())
            .unwrap();
        assert!(r.pass, "{}", show(&r));
        let r = verify_application(
            &x,
            ApplicationKind::Risk1 { p: 0.8 },
            &g,
            Default::default(),
        )
        .unwrap();
        assert!(r.pass, "{}", show(&r));
    }

    #[test]
    fn lomax_fails_ifr_gate() {
        let x = QuantileModel::new(Lomax::new(2.0, 1.0).unwrap());
        let err = verify_application(
            &x,
            ApplicationKind::Ifr { r: 0.3, p: 0.7 },
            &TestFunction::Power(2.0),
            Default::default(),
        )
        .unwrap_err();
        assert!(
            matches!(err, Error::HypothesisFailed { ref hypothesis, .. } if hypothesis == "IFR")
        );
    }

    #[test]
    fn level_validation() {
        assert!(ApplicationKind::Ifr { r: 0.7, p: 0.3 }.validate().is_err());
        assert!(ApplicationKind::from_id(
            "app-hat",
            Levels {
                v: Some(0.1),
                ..Default::default()
            }
        )
        .is_err());
        let k = ApplicationKind::from_id(
            "app-nbu",
            Levels {
                p: Some(0.5),
                ..Default::default()
            },
        )
        .unwrap();
        assert_eq!(k, ApplicationKind::Nbu { p: 0.5 });
    }
}
