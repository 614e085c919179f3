use crate::error::{Error, Result};
use crate::numerics::quadrature::{integrate, QuadratureSpec};

const EULER_GAMMA: f64 = 0.577_215_664_901_532_860_6;
const TINY: f64 = 1e-300;

/// Complementary error function.
pub fn erfc(x: f64) -> f64 {
    libm::erfc(x)
}

/// Upper incomplete gamma function Γ(a, x) = ∫ₓ^∞ t^{a−1} e^{−t} dt for any
/// real `a` and `x > 0`.
pub fn upper_incomplete_gamma(a: f64, x: f64) -> Result<f64> {
    if !(x > 0.0) || a.is_nan() {
        return Err(Error::Domain(format!(
            "upper incomplete gamma needs x > 0, got a = {a}, x = {x}"
        )));
    }
    if x.is_infinite() {
        return Ok(0.0);
    }
    if a > 0.0 {
        return Ok(if x < a + 1.0 {
            libm::tgamma(a) - lower_series(a, x)
        } else {
            continued_fraction(a, x)?
        });
    }
    if x >= 1.0 {
        return continued_fraction(a, x);
    }
    let nearest = a.round();
    if a == nearest {
        // Γ(0, x) = E₁(x), then step down to a = -m
        let mut g = exp_integral_e1_small(x);
        let mut s = 0.0;
        while s > a {
            s -= 1.0;
            g = (g - x.powf(s) * (-x).exp()) / s;
        }
        return Ok(g);
    }
    if (a - nearest).abs() < 1e-7 {
        // the downward recurrence divides by a tiny number here
        return by_quadrature(a, x);
    }
    let mut k = (-a).floor() + 1.0;
    if a + k < 0.5 {
        k += 1.0;
    }
    let mut s = a + k;
    let mut g = upper_incomplete_gamma(s, x)?;
    while s - 1.0 >= a - 0.5 {
        s -= 1.0;
        g = (g - x.powf(s) * (-x).exp()) / s;
    }
    Ok(g)
}

fn lower_series(a: f64, x: f64) -> f64 {
    let mut term = 1.0 / a;
    let mut sum = term;
    let mut n = 1.0;
    while n < 10_000.0 {
        term *= x / (a + n);
        sum += term;
        if term.abs() < sum.abs() * 1e-17 {
            break;
        }
        n += 1.0;
    }
    sum * (a * x.ln() - x).exp()
}

fn continued_fraction(a: f64, x: f64) -> Result<f64> {
    let mut b = x + 1.0 - a;
    let mut c = 1.0 / TINY;
    let mut d = 1.0 / b;
    let mut h = d;
    for i in 1..20_000 {
        let fi = i as f64;
        let an = -fi * (fi - a);
        b += 2.0;
        d = an * d + b;
        if d.abs() < TINY {
            d = TINY;
        }
        c = b + an / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        let del = d * c;
        h *= del;
        if (del - 1.0).abs() < 1e-16 {
            return Ok((a * x.ln() - x).exp() * h);
        }
    }
    Err(Error::NonConvergence(format!(
        "incomplete gamma continued fraction at a = {a}, x = {x}"
    )))
}

fn by_quadrature(a: f64, x: f64) -> Result<f64> {
    let spec = QuadratureSpec::with_tolerances(1e-300, 1e-13);
    let r = integrate(
        |r| (x + r).powf(a - 1.0) * (-r).exp(),
        0.0,
        f64::INFINITY,
        &spec,
    )?;
    Ok(r.value * (-x).exp())
}

/// E₁(x) for 0 < x < 1 by its power series.
fn exp_integral_e1_small(x: f64) -> f64 {
    let mut sum = 0.0;
    let mut term = 1.0;
    for k in 1..200 {
        let fk = k as f64;
        term *= -x / fk;
        let add = term / fk;
        sum += add;
        if add.abs() < 1e-18 * sum.abs().max(1e-300) {
            break;
        }
    }
    -EULER_GAMMA - x.ln() - sum
}

/// Logarithmic integral li(x) = ∫₀ˣ dt / ln t on (0, 1).
///
/// With t = e^{−s} and s = −ln x + r the integral becomes
/// `−x ∫₀^∞ e^{−r} / (r − ln x) dr`, whose integrand is smooth and bounded.
pub fn log_integral(x: f64) -> Result<f64> {
    if !(x > 0.0 && x < 1.0) {
        return Err(Error::Domain(format!(
            "log integral needs 0 < x < 1, got {x}"
        )));
    }
    let s0 = -x.ln();
    let spec = QuadratureSpec::with_tolerances(1e-300, 1e-13);
    let r = integrate(|r| (-r).exp() / (s0 + r), 0.0, f64::INFINITY, &spec)?;
    Ok(-x * r.value)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    #[test]
    fn erfc_values() {
        assert_eq!(erfc(0.0), 1.0);
        let tail = erfc(10.0);
        assert!(tail > 0.0 && tail < 1e-44);
        let oracle = integrate(
            |t| (-t * t).exp(),
            1.0,
            f64::INFINITY,
            &QuadratureSpec::with_tolerances(1e-300, 1e-13),
        )
        .unwrap()
        .value
            * 2.0
            / PI.sqrt();
        assert_relative_eq!(erfc(1.0), oracle, max_relative = 1e-12);
        assert!((erfc(1.0) - 0.157_299_207_1).abs() < 1e-9);
    }

    #[test]
    fn erfc_reflection() {
        for i in 0..=100 {
            let x = -5.0 + 0.1 * i as f64;
            assert!((erfc(x) + erfc(-x) - 2.0).abs() < 1e-12);
        }
    }

    #[test]
    fn incomplete_gamma_closed_forms() {
        let g = upper_incomplete_gamma(1.0, 0.7).unwrap();
        assert_relative_eq!(g, (-0.7f64).exp(), max_relative = 1e-14);
        assert!((g - 0.496_585_303_8).abs() < 1e-10);
        let g = upper_incomplete_gamma(0.5, 1.0).unwrap();
        assert_relative_eq!(g, PI.sqrt() * erfc(1.0), max_relative = 1e-12);
        assert!((g - 0.278_805_585_3).abs() < 1e-8);
        let g = upper_incomplete_gamma(2.0, 1.0).unwrap();
        assert_relative_eq!(g, 2.0 / std::f64::consts::E, max_relative = 1e-14);
    }

    fn quadrature_oracle(a: f64, x: f64) -> f64 {
        let spec = QuadratureSpec::with_tolerances(1e-300, 1e-13);
        integrate(|t| t.powf(a - 1.0) * (-t).exp(), x, f64::INFINITY, &spec)
            .unwrap()
            .value
    }

    #[test]
    fn incomplete_gamma_matches_defining_integral_for_nonpositive_a() {
        for &a in &[0.0, -0.5, -1.0, -1.3, -2.0, -2.7, 1e-9 - 1.0, 0.3, 3.5] {
            for &x in &[0.05, 0.4, 0.99, 1.0, 2.5, 8.0] {
                let g = upper_incomplete_gamma(a, x).unwrap();
                let o = quadrature_oracle(a, x);
                assert_relative_eq!(g, o, max_relative = 1e-10);
            }
        }
    }

    #[test]
    fn incomplete_gamma_rejects_nonpositive_x() {
        assert!(upper_incomplete_gamma(1.0, 0.0).is_err());
        assert!(upper_incomplete_gamma(1.0, -1.0).is_err());
    }

    #[test]
    fn log_integral_values() {
        assert_relative_eq!(
            log_integral(0.5).unwrap(),
            -0.378_671_043_061_088,
            max_relative = 1e-12
        );
        assert_relative_eq!(
            log_integral(0.9).unwrap(),
            -1.775_800_683_423_525,
            max_relative = 1e-12
        );
        let tiny = log_integral(1e-200).unwrap();
        assert!(tiny <= 0.0 && tiny > -1e-202);
        assert!(log_integral(0.0).is_err());
        assert!(log_integral(1.0).is_err());
    }

    #[test]
    fn log_integral_agrees_with_exponential_integral_route() {
        for &x in &[0.01, 0.2, 0.5, 0.8, 0.999] {
            let via_gamma = -upper_incomplete_gamma(0.0, -f64::ln(x)).unwrap();
            assert_relative_eq!(log_integral(x).unwrap(), via_gamma, max_relative = 1e-11);
        }
    }

    #[test]
    fn log_integral_derivative() {
        let h = 1e-5;
        for &x in &[0.2, 0.5, 0.8] {
            let d = (log_integral(x + h).unwrap() - log_integral(x - h).unwrap()) / (2.0 * h);
            assert_relative_eq!(d, 1.0 / x.ln(), max_relative = 1e-5);
        }
    }
}
