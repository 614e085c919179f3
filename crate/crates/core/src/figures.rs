//! The three families of `Z^L` density curves: Rayleigh proportional
//! residuals, Fréchet star models (`γ = 1`) and exponential hat models.
//!
//! Curves are evaluated from the closed forms. Every curve is also rebuilt
//! numerically as `Ψ^L(A, B)` of the derived models and compared.

use std::fmt;
use std::str::FromStr;

use crate::distributions::{Exponential, FrechetType, QuantileModel, Rayleigh};
use crate::error::{Error, Result};
use crate::identities::application::compare_densities;
use crate::identities::printed::{
    exponential_hat_density, frechet_star_density, rayleigh_proportional_density, DensityFn,
};
use crate::identities::ApplicationKind;
use crate::numerics::grid::{chebyshev_unit, uniform_open};
use crate::numerics::{integrate, QuadratureSpec};

pub const NORMALIZATION_TOL: f64 = 1e-5;
pub const INDEPENDENCE_TOL: f64 = 1e-9;
pub const CROSS_CHECK_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FigureId {
    Fig1,
    Fig2a,
    Fig2b,
    Fig3,
}

impl FigureId {
    pub const ALL: [FigureId; 4] = [
        FigureId::Fig1,
        FigureId::Fig2a,
        FigureId::Fig2b,
        FigureId::Fig3,
    ];

    pub fn tag(self) -> &'static str {
        match self {
            FigureId::Fig1 => "1",
            FigureId::Fig2a => "2a",
            FigureId::Fig2b => "2b",
            FigureId::Fig3 => "3",
        }
    }
}

impl fmt::Display for FigureId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "fig{}", self.tag())
    }
}

impl FromStr for FigureId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim().to_ascii_lowercase();
        let t = t.strip_prefix("fig").unwrap_or(&t);
        FigureId::ALL
            .into_iter()
            .find(|f| f.tag() == t)
            .ok_or_else(|| Error::UnknownName {
                kind: "figure",
                name: s.to_string(),
            })
    }
}

/// How the curves, in listed order, must compare at the probe point.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Ordering {
    Increasing,
    Decreasing,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FigureSpec {
    pub id: FigureId,
    /// `(r, p)` for Figure 1, `(v, w)` otherwise.
    pub params: &'static [(f64, f64)],
    pub probe_u: f64,
    pub ordering: Ordering,
    pub title: &'static str,
}

impl FigureSpec {
    pub fn get(id: FigureId) -> Self {
        match id {
            FigureId::Fig1 => FigureSpec {
                id,
                params: &[(0.1, 0.3), (0.4, 0.6), (0.7, 0.9)],
                probe_u: 0.02,
                ordering: Ordering::Decreasing,
                title: "Rayleigh proportional residuals, (r,p)",
            },
            FigureId::Fig2a => FigureSpec {
                id,
                params: &[(0.1, 0.9), (0.3, 0.9), (0.5, 0.9), (0.7, 0.9)],
                probe_u: 0.02,
                ordering: Ordering::Increasing,
                title: "Frechet star models, w = 0.9",
            },
            FigureId::Fig2b => FigureSpec {
                id,
                params: &[(0.1, 0.3), (0.1, 0.5), (0.1, 0.7), (0.1, 0.9)],
                probe_u: 0.98,
                ordering: Ordering::Decreasing,
                title: "Frechet star models, v = 0.1",
            },
            FigureId::Fig3 => FigureSpec {
                id,
                params: &[(0.1, 0.2), (0.3, 0.4), (0.5, 0.6), (0.7, 0.8)],
                probe_u: 0.02,
                ordering: Ordering::Increasing,
                title: "Exponential hat models, (v,w)",
            },
        }
    }

    pub fn curve_label(&self, (a, b): (f64, f64)) -> String {
        match self.id {
            FigureId::Fig1 => format!("r={a},p={b}"),
            _ => format!("v={a},w={b}"),
        }
    }

    pub fn kind(&self, (a, b): (f64, f64)) -> ApplicationKind {
        match self.id {
            FigureId::Fig1 => ApplicationKind::Risk2 { r: a, p: b },
            FigureId::Fig2a | FigureId::Fig2b => ApplicationKind::Avar { v: a, w: b },
            FigureId::Fig3 => ApplicationKind::Hat { v: a, w: b },
        }
    }

    pub fn closed_form(&self, (a, b): (f64, f64)) -> DensityFn {
        match self.id {
            FigureId::Fig1 => Box::new(move |u| rayleigh_proportional_density(a, b, u)),
            FigureId::Fig2a | FigureId::Fig2b => {
                Box::new(move |u| frechet_star_density(a, b, u).unwrap_or(f64::NAN))
            }
            FigureId::Fig3 => Box::new(move |u| exponential_hat_density(a, b, u)),
        }
    }

    /// Parent law with the given free parameter (scale, `c` or rate).
    pub fn parent(&self, param: f64) -> Result<QuantileModel> {
        Ok(match self.id {
            FigureId::Fig1 => QuantileModel::new(Rayleigh::new(param)?),
            FigureId::Fig2a | FigureId::Fig2b => QuantileModel::new(FrechetType::new(param, 1.0)?),
            FigureId::Fig3 => QuantileModel::new(Exponential::new(param)?),
        })
    }
}

/// `(E[B] − E[A])`-normalized `Q_B − Q_A` for the derived pair of `parent`.
pub fn numeric_density(
    spec: &FigureSpec,
    parent: &QuantileModel,
    params: (f64, f64),
) -> Result<DensityFn> {
    let (a, b) = spec.kind(params).pair(parent)?;
    let r = integrate(
        |u| b.quantile(u) - a.quantile(u),
        0.0,
        1.0,
        &QuadratureSpec::default(),
    )?;
    let gap = r.value;
    Ok(Box::new(move |u| (b.quantile(u) - a.quantile(u)) / gap))
}

#[derive(Debug, Clone, PartialEq)]
pub struct Curve {
    pub label: String,
    pub params: (f64, f64),
    pub u: Vec<f64>,
    pub density: Vec<f64>,
    pub normalization: f64,
    pub probe_value: f64,
    /// Largest relative gap to the numeric `Ψ^L` construction.
    pub cross_check: f64,
}

impl Curve {
    pub fn normalized(&self) -> bool {
        (self.normalization - 1.0).abs() <= NORMALIZATION_TOL
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("u,density\n");
        for (u, d) in self.u.iter().zip(&self.density) {
            out.push_str(&format!(
                "{},{}\n",
                crate::format::csv_num(*u),
                crate::format::csv_num(*d)
            ));
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Figure {
    pub spec: FigureSpec,
    pub curves: Vec<Curve>,
    /// Largest pointwise gap between numeric curves at different values of
    /// the parent's free parameter.
    pub independence: Option<f64>,
}

impl Figure {
    pub fn ordering_holds(&self) -> bool {
        self.curves.windows(2).all(|w| match self.spec.ordering {
            Ordering::Increasing => w[0].probe_value < w[1].probe_value,
            Ordering::Decreasing => w[0].probe_value > w[1].probe_value,
        })
    }

    pub fn all_normalized(&self) -> bool {
        self.curves.iter().all(Curve::normalized)
    }

    pub fn cross_checks_hold(&self) -> bool {
        self.curves.iter().all(|c| c.cross_check <= CROSS_CHECK_TOL)
    }

    pub fn independence_holds(&self) -> bool {
        self.independence.is_none_or(|d| d <= INDEPENDENCE_TOL)
    }

    pub fn pass(&self) -> bool {
        self.ordering_holds()
            && self.all_normalized()
            && self.cross_checks_hold()
            && self.independence_holds()
    }

    /// One line per check, for logs.
    pub fn summary(&self) -> Vec<String> {
        let mut out: Vec<String> = self
            .curves
            .iter()
            .map(|c| {
                format!(
                    "{} {}: integral {:.10}, density({}) = {:.6}, numeric gap {:.1e}",
                    self.spec.id,
                    c.label,
                    c.normalization,
                    self.spec.probe_u,
                    c.probe_value,
                    c.cross_check
                )
            })
            .collect();
        out.push(format!(
            "{} ordering {:?} at u = {}: {}",
            self.spec.id,
            self.spec.ordering,
            self.spec.probe_u,
            if self.ordering_holds() {
                "holds"
            } else {
                "FAILS"
            }
        ));
        if let Some(d) = self.independence {
            out.push(format!(
                "{} parameter independence: max gap {d:.1e}",
                self.spec.id
            ));
        }
        out
    }
}

/// Parent parameters used for the independence check.
pub const INDEPENDENCE_PARAMS: [f64; 3] = [0.5, 1.0, 3.0];

/// Evaluates every curve of `id` on `grid` interior points.
pub fn render(id: FigureId, grid: usize) -> Result<Figure> {
    if grid == 0 {
        return Err(Error::InvalidParameter(
            "grid must have at least one point".into(),
        ));
    }
    let spec = FigureSpec::get(id);
    let parent = spec.parent(1.0)?;
    let u = uniform_open(grid);
    let mut curves = Vec::new();
    for &params in spec.params {
        let f = spec.closed_form(params);
        let norm = integrate(&f, 0.0, 1.0, &QuadratureSpec::default())?;
        if !norm.converged {
            return Err(Error::NonConvergence(format!(
                "{id} {params:?} normalization"
            )));
        }
        let numeric = numeric_density(&spec, &parent, params)?;
        let check = compare_densities("closed form", &numeric, &f);
        curves.push(Curve {
            label: spec.curve_label(params),
            params,
            density: u.iter().map(|&x| f(x)).collect(),
            u: u.clone(),
            normalization: norm.value,
            probe_value: f(spec.probe_u),
            cross_check: check.max_rel_deviation,
        });
    }
    let independence = match id {
        FigureId::Fig1 | FigureId::Fig3 => Some(parameter_independence(&spec)?),
        _ => None,
    };
    Ok(Figure {
        spec,
        curves,
        independence,
    })
}

/// Largest pointwise difference between numeric curves built from parents
/// with different free parameters.
pub fn parameter_independence(spec: &FigureSpec) -> Result<f64> {
    let points = chebyshev_unit(64);
    let mut worst = 0.0f64;
    for &params in spec.params {
        let reference = numeric_density(spec, &spec.parent(INDEPENDENCE_PARAMS[0])?, params)?;
        for &p in &INDEPENDENCE_PARAMS[1..] {
            let other = numeric_density(spec, &spec.parent(p)?, params)?;
            for &u in &points {
                worst = worst.max((reference(u) - other(u)).abs());
            }
        }
    }
    Ok(worst)
}
