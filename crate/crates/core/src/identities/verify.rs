//! Taylor-type, mean-value and proportional-quantile identities.
//!
//! Every expectation over `U` is an integral over (0,1). When a law has
//! `Q(0⁺) = a ≠ 0` (ParetoI), the identities are applied to `X − a`, which has
//! the same `q`; the report notes the offset `a·(g(1) − g(0))` by which the
//! unanchored right-hand side differs.

use super::report::{IdentityReport, QuadratureNote, Tolerances};
use super::testfn::{binomial, factorial, TestFunction};
use crate::distributions::QuantileModel;
use crate::error::{Error, Result};
use crate::format::csv_num;
use crate::numerics::grid::chebyshev_unit;
use crate::numerics::{integrate, QuadratureSpec};
use crate::unitlaw::check_psi_preconditions;

/// Runs quadratures and keeps their diagnostics.
#[derive(Default)]
pub(crate) struct Quad {
    pub notes: Vec<QuadratureNote>,
}

impl Quad {
    pub fn run(&mut self, term: &str, f: impl Fn(f64) -> f64) -> Result<f64> {
        let r = integrate(f, 0.0, 1.0, &QuadratureSpec::default())?;
        if !r.converged {
            return Err(Error::NonConvergence(format!(
                "{term}: error estimate {:e} after {} subdivisions",
                r.error_estimate, r.subdivisions_used
            )));
        }
        self.notes.push(QuadratureNote::from_result(term, &r));
        Ok(r.value)
    }
}

/// `Q(0⁺)` and `E[X] − Q(0⁺)`; needs a finite mean.
pub(crate) fn anchor(x: &QuantileModel) -> Result<(f64, f64)> {
    let mean = x.mean()?;
    let q0 = x.origin();
    if !q0.is_finite() {
        return Err(Error::Domain(format!("{} has Q(0+) = {q0}", x.label())));
    }
    Ok((q0, mean - q0))
}

fn boundary(g: &TestFunction) -> Result<f64> {
    let b = g.boundary_value();
    if !b.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "{g} has no finite value at 1"
        )));
    }
    Ok(b)
}

fn anchor_note(q0: f64, g: &TestFunction) -> String {
    let gap = q0 * (g.boundary_value() - g.eval(0.0));
    format!(
        "anchored at Q(0+) = {}; the unanchored right-hand side differs by {}",
        csv_num(q0),
        csv_num(gap)
    )
}

fn taylor_report(
    id: &str,
    x: &QuantileModel,
    g: &TestFunction,
    n: usize,
) -> Result<IdentityReport> {
    if n == 0 {
        return Err(Error::InvalidParameter("order n must be at least 1".into()));
    }
    g.require_order(n)?;
    boundary(g)?;
    let (q0, mean_a) = anchor(x)?;
    let mut quad = Quad::default();
    let lhs = quad.run("E[(g(1)-g(U)) q(U)]", |u| {
        g.drop_to_one(u) * x.quantile_density(u)
    })?;
    let mut rhs = 0.0;
    for k in 1..n {
        let term = quad.run(&format!("E[g^({k})(U)(1-U)^{k} q(U)]"), |u| {
            g.derivative(k, u) * (1.0 - u).powi(k as i32) * x.quantile_density(u)
        })?;
        rhs += term / factorial(k);
    }
    let remainder = quad.run(&format!("E[g^({n})(X^L)(1-X^L)^{} ] E[X]", n - 1), |u| {
        g.derivative(n, u) * (1.0 - u).powi(n as i32 - 1) * (x.quantile(u) - q0)
    })?;
    rhs += remainder / factorial(n - 1);
    let mut report = IdentityReport::new(id, lhs, rhs, Tolerances::default())
        .with_quadrature(quad.notes)
        .note(format!(
            "model {}, g = {g}, n = {n}, E[X] = {}",
            x.label(),
            csv_num(mean_a + q0)
        ));
    if q0 != 0.0 {
        report = report.note(anchor_note(q0, g));
    }
    Ok(report)
}

/// `E[(g(1) − g(U)) q(U)] = E[g'(X^L)] E[X]`, with the right side computed as
/// `∫ g'(u) Q(u) du`.
pub fn verify_taylor1(x: &QuantileModel, g: &TestFunction) -> Result<IdentityReport> {
    taylor_report("taylor1", x, g, 1)
}

/// The order-`n` expansion: `Σ_{k<n} (1/k!) E[g^{(k)}(U)(1−U)^k q(U)]` plus
/// the remainder `(1/(n−1)!) E[g^{(n)}(X^L)(1−X^L)^{n−1}] E[X]`.
pub fn verify_taylor_n(x: &QuantileModel, g: &TestFunction, n: usize) -> Result<IdentityReport> {
    taylor_report("taylorN", x, g, n)
}

/// `g(u) = u^α` with generalized binomial coefficients. Adds the two-term
/// special cases for `α = 1` and `α = 2`.
pub fn verify_corollary_power(
    x: &QuantileModel,
    alpha: f64,
    n: usize,
) -> Result<Vec<IdentityReport>> {
    if !(alpha > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "alpha must be positive, got {alpha}"
        )));
    }
    if n == 0 {
        return Err(Error::InvalidParameter("order n must be at least 1".into()));
    }
    let (q0, mean_a) = anchor(x)?;
    let g = TestFunction::Power(alpha);
    let q = |u: f64| x.quantile_density(u);
    let qa = |u: f64| x.quantile(u) - q0;
    let mut quad = Quad::default();
    let lhs = quad.run("E[(1-U^a) q(U)]", |u| g.drop_to_one(u) * q(u))?;
    let mut rhs = 0.0;
    for k in 1..n {
        let c = binomial(alpha, k);
        if c != 0.0 {
            rhs += c * quad.run(&format!("E[U^(a-{k})(1-U)^{k} q(U)]"), |u| {
                u.powf(alpha - k as f64) * (1.0 - u).powi(k as i32) * q(u)
            })?;
        }
    }
    let c = n as f64 * binomial(alpha, n);
    if c != 0.0 {
        rhs += c * quad.run(&format!("E[(X^L)^(a-{n})(1-X^L)^{}] E[X]", n - 1), |u| {
            u.powf(alpha - n as f64) * (1.0 - u).powi(n as i32 - 1) * qa(u)
        })?;
    }
    let describe = format!("model {}, alpha = {alpha}, n = {n}", x.label());
    let mut main = IdentityReport::new("corollary", lhs, rhs, Tolerances::default())
        .with_quadrature(quad.notes)
        .note(describe.clone());
    if q0 != 0.0 {
        main = main.note(anchor_note(q0, &g));
    }
    let mut out = vec![main];

    if alpha == 1.0 {
        let mut quad = Quad::default();
        let l = quad.run("E[(1-U) q(U)]", |u| (1.0 - u) * q(u))?;
        out.push(
            IdentityReport::new("corollary-alpha1", l, mean_a, Tolerances::default())
                .with_quadrature(quad.notes)
                .note(format!("{describe}: E[(1-U) q(U)] = E[X]")),
        );
    }
    if alpha == 2.0 {
        let mut quad = Quad::default();
        let l1 = quad.run("E[(1-U^2) q(U)]", |u| {
            TestFunction::Power(2.0).drop_to_one(u) * q(u)
        })?;
        let m1 = quad.run("E[X^L] E[X]", |u| u * qa(u))?;
        let l2 = quad.run("E[(1-U)^2 q(U)]", |u| (1.0 - u) * (1.0 - u) * q(u))?;
        let m2 = quad.run("E[1-X^L] E[X]", |u| (1.0 - u) * qa(u))?;
        let notes = quad.notes;
        out.push(
            IdentityReport::new("corollary-alpha2-a", l1, 2.0 * m1, Tolerances::default())
                .with_quadrature(notes.clone())
                .note(format!("{describe}: E[(1-U^2) q(U)] = 2 E[X^L] E[X]")),
        );
        out.push(
            IdentityReport::new("corollary-alpha2-b", l2, 2.0 * m2, Tolerances::default())
                .with_quadrature(notes)
                .note(format!("{describe}: E[(1-U)^2 q(U)] = 2 E[1-X^L] E[X]")),
        );
    }
    Ok(out)
}

/// `E[(g(1) − g(U))(q_Y(U) − q_X(U))] = E[g'(Z^L)] (E[Y] − E[X])` with
/// `Z^L = Ψ^L(X, Y)`.
pub fn verify_mvt(
    x: &QuantileModel,
    y: &QuantileModel,
    g: &TestFunction,
) -> Result<IdentityReport> {
    mvt_report("mvt", x, y, g)
}

pub(crate) fn mvt_report(
    id: &str,
    x: &QuantileModel,
    y: &QuantileModel,
    g: &TestFunction,
) -> Result<IdentityReport> {
    g.require_order(1)?;
    boundary(g)?;
    let gap = check_psi_preconditions(x, y)?;
    let (x0, _) = anchor(x)?;
    let (y0, _) = anchor(y)?;
    let shift = y0 - x0;
    let mut quad = Quad::default();
    let lhs = quad.run("E[(g(1)-g(U))(q_Y(U)-q_X(U))]", |u| {
        g.drop_to_one(u) * (y.quantile_density(u) - x.quantile_density(u))
    })?;
    let rhs = if shift == 0.0 {
        let eg = quad.run("E[g'(Z^L)]", |u| {
            g.derivative(1, u) * (y.quantile(u) - x.quantile(u)) / gap
        })?;
        eg * gap
    } else {
        quad.run("E[g'(Z^L)](E[Y]-E[X]) anchored", |u| {
            g.derivative(1, u) * ((y.quantile(u) - y0) - (x.quantile(u) - x0))
        })?
    };
    let mut report = IdentityReport::new(id, lhs, rhs, Tolerances::default())
        .with_quadrature(quad.notes)
        .note(format!(
            "X = {}, Y = {}, g = {g}, E[Y]-E[X] = {}",
            x.label(),
            y.label(),
            csv_num(gap)
        ));
    if shift != 0.0 {
        report = report.note(anchor_note(shift, g));
    }
    Ok(report)
}

/// `E[(g(1) − g(U)) φ'(U)] = η E[g'(Z^L)]` with `f_{Z^L} = φ/η` and
/// `η = ∫ φ`. When `φ(0⁺) ≠ 0` the identity is applied to `φ − φ(0⁺)`.
pub fn verify_proportional(phi: &TestFunction, g: &TestFunction) -> Result<IdentityReport> {
    g.require_order(1)?;
    boundary(g)?;
    for u in chebyshev_unit(64) {
        let d = phi.derivative(1, u);
        if !(d >= 0.0) {
            return Err(Error::NonMonotonePhi(u));
        }
    }
    let phi0 = phi.eval(0.0);
    if !phi0.is_finite() {
        return Err(Error::Domain(format!(
            "phi = {phi} has no finite value at 0"
        )));
    }
    let mut quad = Quad::default();
    let eta = quad.run("eta", |u| phi.eval(u))?;
    let lhs = quad.run("E[(g(1)-g(U)) phi'(U)]", |u| {
        g.drop_to_one(u) * phi.derivative(1, u)
    })?;
    let eg = quad.run("E[g'(Z^L)]", |u| g.derivative(1, u) * phi.eval(u) / eta)?;
    let printed = eta * eg;
    let mut report;
    if phi0 == 0.0 {
        report = IdentityReport::new("proportional", lhs, printed, Tolerances::default());
    } else {
        let rhs = quad.run("E[g'(Z^L)] eta anchored", |u| {
            g.derivative(1, u) * (phi.eval(u) - phi0)
        })?;
        report =
            IdentityReport::new("proportional", lhs, rhs, Tolerances::default()).note(format!(
                "phi(0+) = {}; unanchored eta E[g'(Z^L)] = {} differs by {}",
                csv_num(phi0),
                csv_num(printed),
                csv_num(printed - lhs)
            ));
    }
    report = report
        .note(format!("phi = {phi}, g = {g}, eta = {}", csv_num(eta)))
        .with_quadrature(std::mem::take(&mut quad.notes));
    Ok(report)
}
