//! Monte Carlo cross-checks: the left side is estimated from uniform draws,
//! the right side from draws of `X^L`, `Z^L` or `φ/η`, and both are compared
//! with the quadrature values of the same identity.

use std::sync::Arc;

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::application::{verify_application, ApplicationKind, ApplicationOptions};
use super::report::{IdentityReport, MonteCarloSummary};
use super::testfn::{factorial, TestFunction};
use super::verify::{anchor, verify_mvt, verify_proportional, verify_taylor1, verify_taylor_n};
use crate::distributions::QuantileModel;
use crate::error::{Error, Result};
use crate::unitlaw::{lift_xl, psi_l, MonteCarloEstimate, Provenance, UnitVariable};

/// Agreement band in standard errors.
pub const SIGMAS: f64 = 4.0;

/// Stream offset so the two sides use independent draws.
const RHS_STREAM: u64 = 0x9e37_79b9_7f4a_7c15;

#[derive(Debug, Clone)]
pub enum VerifierTarget {
    Taylor1 {
        x: QuantileModel,
        g: TestFunction,
    },
    TaylorN {
        x: QuantileModel,
        g: TestFunction,
        n: usize,
    },
    /// The order-`n` expansion for `g = u^α`.
    Corollary {
        x: QuantileModel,
        alpha: f64,
        n: usize,
    },
    Mvt {
        x: QuantileModel,
        y: QuantileModel,
        g: TestFunction,
    },
    Proportional {
        phi: TestFunction,
        g: TestFunction,
    },
    Application {
        x: QuantileModel,
        kind: ApplicationKind,
        g: TestFunction,
    },
}

/// Uniform on the open interval (0, 1): never returns 0 or 1.
fn open_uniform(rng: &mut ChaCha8Rng) -> f64 {
    ((rng.next_u64() >> 11) as f64 + 0.5) * (1.0 / (1u64 << 53) as f64)
}

fn uniform_mean(n: usize, seed: u64, f: impl Fn(f64) -> f64) -> MonteCarloEstimate {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    MonteCarloEstimate::from_values((0..n).map(|_| f(open_uniform(&mut rng))))
}

fn scaled(e: MonteCarloEstimate, scale: f64, offset: f64) -> MonteCarloEstimate {
    MonteCarloEstimate {
        n: e.n,
        mean: e.mean * scale + offset,
        std_error: e.std_error * scale.abs(),
    }
}

fn sample_mean(
    z: &UnitVariable,
    n: usize,
    seed: u64,
    f: impl Fn(f64) -> f64,
) -> MonteCarloEstimate {
    MonteCarloEstimate::from_values(z.sample(n, seed ^ RHS_STREAM).into_iter().map(f))
}

fn taylor_sides(
    x: &QuantileModel,
    g: &TestFunction,
    order: usize,
    n: usize,
    seed: u64,
) -> Result<(MonteCarloEstimate, MonteCarloEstimate)> {
    let (q0, _) = anchor(x)?;
    if q0 != 0.0 {
        return Err(Error::Domain(format!(
            "{} is not anchored at 0; the lift is undefined",
            x.label()
        )));
    }
    let mean = x.mean()?;
    let xl = lift_xl(x)?;
    // Every term of the left side and the polynomial part of the right side
    // share the uniform draw, so the difference is a single estimator per side.
    let lhs = uniform_mean(n, seed, |u| g.drop_to_one(u) * x.quantile_density(u));
    let poly = uniform_mean(n, seed, |u| {
        (1..order)
            .map(|k| {
                g.derivative(k, u) * (1.0 - u).powi(k as i32) * x.quantile_density(u) / factorial(k)
            })
            .sum()
    });
    let rem = sample_mean(&xl, n, seed, |z| {
        g.derivative(order, z) * (1.0 - z).powi(order as i32 - 1)
    });
    let rem = scaled(rem, mean / factorial(order - 1), 0.0);
    let rhs = MonteCarloEstimate {
        n,
        mean: poly.mean + rem.mean,
        std_error: poly.std_error.hypot(rem.std_error),
    };
    Ok((lhs, rhs))
}

fn mvt_sides(
    x: &QuantileModel,
    y: &QuantileModel,
    g: &TestFunction,
    n: usize,
    seed: u64,
) -> Result<(MonteCarloEstimate, MonteCarloEstimate)> {
    let z = psi_l(x, y)?;
    let gap = y.mean()? - x.mean()?;
    let shift = y.origin() - x.origin();
    let lhs = uniform_mean(n, seed, |u| {
        g.drop_to_one(u) * (y.quantile_density(u) - x.quantile_density(u))
    });
    let eg = sample_mean(&z, n, seed, |v| g.derivative(1, v));
    let offset = -shift * (g.boundary_value() - g.eval(0.0));
    Ok((lhs, scaled(eg, gap, offset)))
}

/// Runs the quadrature verifier for `target`, then re-estimates both sides
/// from `n` draws. The report passes only when the quadrature check passes
/// and both Monte Carlo means lie within [`SIGMAS`] standard errors of the
/// quadrature values.
pub fn monte_carlo_crosscheck(
    target: &VerifierTarget,
    n: usize,
    seed: u64,
) -> Result<IdentityReport> {
    if n == 0 {
        return Err(Error::InvalidSampleSize);
    }
    let (report, (lhs, rhs)) = match target {
        VerifierTarget::Taylor1 { x, g } => {
            (verify_taylor1(x, g)?, taylor_sides(x, g, 1, n, seed)?)
        }
        VerifierTarget::TaylorN { x, g, n: order } => (
            verify_taylor_n(x, g, *order)?,
            taylor_sides(x, g, *order, n, seed)?,
        ),
        VerifierTarget::Corollary { x, alpha, n: order } => {
            let g = TestFunction::Power(*alpha);
            let r = verify_taylor_n(x, &g, *order)?;
            let mut r = r.note(format!("corollary with alpha = {alpha}"));
            r.identity_id = "corollary".into();
            (r, taylor_sides(x, &g, *order, n, seed)?)
        }
        VerifierTarget::Mvt { x, y, g } => (verify_mvt(x, y, g)?, mvt_sides(x, y, g, n, seed)?),
        VerifierTarget::Proportional { phi, g } => {
            let report = verify_proportional(phi, g)?;
            let phi0 = phi.eval(0.0);
            let eta = report_eta(phi)?;
            let p = phi.clone();
            let z = UnitVariable::from_density(
                Arc::new(move |u| p.eval(u) / eta),
                Provenance::ClosedForm {
                    name: format!("{phi}/eta"),
                },
            )?;
            let lhs = uniform_mean(n, seed, |u| g.drop_to_one(u) * phi.derivative(1, u));
            let eg = sample_mean(&z, n, seed, |v| g.derivative(1, v));
            let offset = -phi0 * (g.boundary_value() - g.eval(0.0));
            (report, (lhs, scaled(eg, eta, offset)))
        }
        VerifierTarget::Application { x, kind, g } => {
            let report = verify_application(x, *kind, g, ApplicationOptions::default())?;
            let (a, b) = kind.pair(x)?;
            (report, mvt_sides(&a, &b, g, n, seed)?)
        }
    };
    let summary = MonteCarloSummary {
        seed,
        lhs,
        rhs,
        quadrature_lhs: report.lhs,
        quadrature_rhs: report.rhs,
        sigmas: SIGMAS,
    };
    let agrees = summary.lhs_agrees() && summary.rhs_agrees();
    let mut report = report.note(format!("monte carlo: n = {n}, seed = {seed}"));
    report.pass &= agrees;
    report.monte_carlo = Some(summary);
    Ok(report)
}

fn report_eta(phi: &TestFunction) -> Result<f64> {
    let r = crate::numerics::integrate(|u| phi.eval(u), 0.0, 1.0, &Default::default())?;
    Ok(r.value)
}
