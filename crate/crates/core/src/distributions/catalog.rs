use super::{positive, MeanForm, QuantileLaw, Support};
use crate::error::{Error, Result};
use crate::numerics::{erfc, upper_incomplete_gamma};

/// `−ln(1 − u)`, accurate for small `u`.
fn neg_log1m(u: f64) -> f64 {
    -(-u).ln_1p()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Exponential {
    pub lambda: f64,
}

impl Exponential {
    pub fn new(lambda: f64) -> Result<Self> {
        Ok(Self {
            lambda: positive("lambda", lambda)?,
        })
    }
}

impl QuantileLaw for Exponential {
    fn label(&self) -> String {
        format!("exp:{}", self.lambda)
    }
    fn quantile(&self, u: f64) -> f64 {
        neg_log1m(u) / self.lambda
    }
    fn quantile_density(&self, u: f64) -> f64 {
        1.0 / (self.lambda * (1.0 - u))
    }
    fn cdf(&self, x: f64) -> f64 {
        if x <= 0.0 {
            0.0
        } else {
            -(-self.lambda * x).exp_m1()
        }
    }
    fn survival(&self, x: f64) -> f64 {
        if x <= 0.0 {
            1.0
        } else {
            (-self.lambda * x).exp()
        }
    }
    fn pdf(&self, x: f64) -> Option<f64> {
        Some(if x < 0.0 {
            0.0
        } else {
            self.lambda * (-self.lambda * x).exp()
        })
    }
    fn support(&self) -> Support {
        Support::new(0.0, f64::INFINITY)
    }
    fn mean_form(&self) -> MeanForm {
        MeanForm::Finite(1.0 / self.lambda)
    }
    fn cvar_closed_form(&self, _p: f64) -> Option<f64> {
        Some(1.0 / self.lambda)
    }
}

/// Uniform on `(0, a)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Uniform {
    pub a: f64,
}

impl Uniform {
    pub fn new(a: f64) -> Result<Self> {
        Ok(Self {
            a: positive("a", a)?,
        })
    }
}

impl QuantileLaw for Uniform {
    fn label(&self) -> String {
        format!("uniform:{}", self.a)
    }
    fn quantile(&self, u: f64) -> f64 {
        self.a * u
    }
    fn quantile_density(&self, _u: f64) -> f64 {
        self.a
    }
    fn cdf(&self, x: f64) -> f64 {
        (x / self.a).clamp(0.0, 1.0)
    }
    fn pdf(&self, x: f64) -> Option<f64> {
        Some(if x >= 0.0 && x <= self.a {
            1.0 / self.a
        } else {
            0.0
        })
    }
    fn support(&self) -> Support {
        Support::new(0.0, self.a)
    }
    fn mean_form(&self) -> MeanForm {
        MeanForm::Finite(0.5 * self.a)
    }
    fn cvar_closed_form(&self, p: f64) -> Option<f64> {
        Some(0.5 * self.a * (1.0 - p))
    }
    fn avar_closed_form(&self, v: f64) -> Option<f64> {
        Some(0.5 * self.a * v)
    }
}

/// `F(x) = x^α` on `(0, 1)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerUnit {
    pub alpha: f64,
}

impl PowerUnit {
    pub fn new(alpha: f64) -> Result<Self> {
        Ok(Self {
            alpha: positive("alpha", alpha)?,
        })
    }
}

impl QuantileLaw for PowerUnit {
    fn label(&self) -> String {
        format!("powerunit:{}", self.alpha)
    }
    fn quantile(&self, u: f64) -> f64 {
        u.powf(1.0 / self.alpha)
    }
    fn quantile_density(&self, u: f64) -> f64 {
        u.powf(1.0 / self.alpha - 1.0) / self.alpha
    }
    fn cdf(&self, x: f64) -> f64 {
        x.clamp(0.0, 1.0).powf(self.alpha)
    }
    fn pdf(&self, x: f64) -> Option<f64> {
        Some(if x > 0.0 && x <= 1.0 {
            self.alpha * x.powf(self.alpha - 1.0)
        } else {
            0.0
        })
    }
    fn support(&self) -> Support {
        Support::new(0.0, 1.0)
    }
    fn mean_form(&self) -> MeanForm {
        MeanForm::Finite(self.alpha / (self.alpha + 1.0))
    }
    fn avar_closed_form(&self, v: f64) -> Option<f64> {
        Some(v.powf(1.0 / self.alpha) * self.alpha / (self.alpha + 1.0))
    }
}

/// `F(x) = (x/α)^β` on `(0, α)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerScale {
    pub alpha: f64,
    pub beta: f64,
}

impl PowerScale {
    pub fn new(alpha: f64, beta: f64) -> Result<Self> {
        Ok(Self {
            alpha: positive("alpha", alpha)?,
            beta: positive("beta", beta)?,
        })
    }
}

impl QuantileLaw for PowerScale {
    fn label(&self) -> String {
        format!("powerscale:{},{}", self.alpha, self.beta)
    }
    fn quantile(&self, u: f64) -> f64 {
        self.alpha * u.powf(1.0 / self.beta)
    }
    fn quantile_density(&self, u: f64) -> f64 {
        self.alpha / self.beta * u.powf(1.0 / self.beta - 1.0)
    }
    fn cdf(&self, x: f64) -> f64 {
        (x / self.alpha).clamp(0.0, 1.0).powf(self.beta)
    }
    fn pdf(&self, x: f64) -> Option<f64> {
        let t = x / self.alpha;
        Some(if t > 0.0 && t <= 1.0 {
            self.beta / self.alpha * t.powf(self.beta - 1.0)
        } else {
            0.0
        })
    }
    fn support(&self) -> Support {
        Support::new(0.0, self.alpha)
    }
    fn mean_form(&self) -> MeanForm {
        MeanForm::Finite(self.alpha * self.beta / (self.beta + 1.0))
    }
    fn avar_closed_form(&self, v: f64) -> Option<f64> {
        Some(self.alpha * v.powf(1.0 / self.beta) * self.beta / (self.beta + 1.0))
    }
}

/// Lomax (Pareto type II) with shape `α > 1` and scale `λ`:
/// `F̄(x) = (1 + x/λ)^{−α}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Lomax {
    pub alpha: f64,
    pub lambda: f64,
}

impl Lomax {
    pub fn new(alpha: f64, lambda: f64) -> Result<Self> {
        positive("alpha", alpha)?;
        if !(alpha > 1.0) {
            return Err(Error::InvalidParameter(format!(
                "Lomax shape must exceed 1 for a finite mean, got {alpha}"
            )));
        }
        Ok(Self {
            alpha,
            lambda: positive("lambda", lambda)?,
        })
    }
}

impl QuantileLaw for Lomax {
    fn label(&self) -> String {
        format!("lomax:{},{}", self.alpha, self.lambda)
    }
    fn quantile(&self, u: f64) -> f64 {
        self.lambda * (neg_log1m(u) / self.alpha).exp_m1()
    }
    fn quantile_density(&self, u: f64) -> f64 {
        self.lambda / self.alpha * (1.0 - u).powf(-1.0 / self.alpha - 1.0)
    }
    fn cdf(&self, x: f64) -> f64 {
        if x <= 0.0 {
            0.0
        } else {
            -(-self.alpha * (x / self.lambda).ln_1p()).exp_m1()
        }
    }
    fn survival(&self, x: f64) -> f64 {
        if x <= 0.0 {
            1.0
        } else {
            (1.0 + x / self.lambda).powf(-self.alpha)
        }
    }
    fn pdf(&self, x: f64) -> Option<f64> {
        Some(if x < 0.0 {
            0.0
        } else {
            self.alpha / self.lambda * (1.0 + x / self.lambda).powf(-self.alpha - 1.0)
        })
    }
    fn support(&self) -> Support {
        Support::new(0.0, f64::INFINITY)
    }
    fn mean_form(&self) -> MeanForm {
        MeanForm::Finite(self.lambda / (self.alpha - 1.0))
    }
    fn cvar_closed_form(&self, p: f64) -> Option<f64> {
        Some(self.lambda * (1.0 - p).powf(-1.0 / self.alpha) / (self.alpha - 1.0))
    }
}

/// Pareto type I with scale `α` and shape `β > 1`: `F̄(x) = (x/α)^{−β}`, `x ≥ α`.
/// Not in class D, since `Q(0⁺) = α`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ParetoI {
    pub alpha: f64,
    pub beta: f64,
}

impl ParetoI {
    pub fn new(alpha: f64, beta: f64) -> Result<Self> {
        positive("beta", beta)?;
        if !(beta > 1.0) {
            return Err(Error::InvalidParameter(format!(
                "Pareto shape must exceed 1 for a finite mean, got {beta}"
            )));
        }
        Ok(Self {
            alpha: positive("alpha", alpha)?,
            beta,
        })
    }
}

impl QuantileLaw for ParetoI {
    fn label(&self) -> String {
        format!("pareto1:{},{}", self.alpha, self.beta)
    }
    fn quantile(&self, u: f64) -> f64 {
        self.alpha * (1.0 - u).powf(-1.0 / self.beta)
    }
    fn quantile_density(&self, u: f64) -> f64 {
        self.alpha / self.beta * (1.0 - u).powf(-1.0 / self.beta - 1.0)
    }
    fn cdf(&self, x: f64) -> f64 {
        if x <= self.alpha {
            0.0
        } else {
            -(-self.beta * (x / self.alpha).ln()).exp_m1()
        }
    }
    fn survival(&self, x: f64) -> f64 {
        if x <= self.alpha {
            1.0
        } else {
            (x / self.alpha).powf(-self.beta)
        }
    }
    fn pdf(&self, x: f64) -> Option<f64> {
        Some(if x < self.alpha {
            0.0
        } else {
            self.beta / self.alpha * (x / self.alpha).powf(-self.beta - 1.0)
        })
    }
    fn support(&self) -> Support {
        Support::new(self.alpha, f64::INFINITY)
    }
    fn mean_form(&self) -> MeanForm {
        MeanForm::Finite(self.alpha * self.beta / (self.beta - 1.0))
    }
    fn cvar_closed_form(&self, p: f64) -> Option<f64> {
        Some(self.alpha * (1.0 - p).powf(-1.0 / self.beta) / (self.beta - 1.0))
    }
}

/// `F(x) = 1 − e^{−αx²}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rayleigh {
    pub alpha: f64,
}

impl Rayleigh {
    pub fn new(alpha: f64) -> Result<Self> {
        Ok(Self {
            alpha: positive("alpha", alpha)?,
        })
    }
}

impl QuantileLaw for Rayleigh {
    fn label(&self) -> String {
        format!("rayleigh:{}", self.alpha)
    }
    fn quantile(&self, u: f64) -> f64 {
        (neg_log1m(u) / self.alpha).sqrt()
    }
    fn quantile_density(&self, u: f64) -> f64 {
        1.0 / (2.0 * (self.alpha * neg_log1m(u)).sqrt() * (1.0 - u))
    }
    fn cdf(&self, x: f64) -> f64 {
        if x <= 0.0 {
            0.0
        } else {
            -(-self.alpha * x * x).exp_m1()
        }
    }
    fn survival(&self, x: f64) -> f64 {
        if x <= 0.0 {
            1.0
        } else {
            (-self.alpha * x * x).exp()
        }
    }
    fn pdf(&self, x: f64) -> Option<f64> {
        Some(if x < 0.0 {
            0.0
        } else {
            2.0 * self.alpha * x * (-self.alpha * x * x).exp()
        })
    }
    fn support(&self) -> Support {
        Support::new(0.0, f64::INFINITY)
    }
    fn mean_form(&self) -> MeanForm {
        MeanForm::Finite(0.5 * (std::f64::consts::PI / self.alpha).sqrt())
    }
    fn cvar_closed_form(&self, p: f64) -> Option<f64> {
        let l = neg_log1m(p);
        Some(std::f64::consts::PI.sqrt() * erfc(l.sqrt()) / (2.0 * self.alpha.sqrt() * (1.0 - p)))
    }
}

/// Maximum of a geometric number (success probability `δ`) of independent
/// `Exp(λ)` variables.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeoMaxExp {
    pub lambda: f64,
    pub delta: f64,
}

impl GeoMaxExp {
    pub fn new(lambda: f64, delta: f64) -> Result<Self> {
        if !(delta > 0.0 && delta < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "delta must lie in (0, 1), got {delta}"
            )));
        }
        Ok(Self {
            lambda: positive("lambda", lambda)?,
            delta,
        })
    }
}

impl QuantileLaw for GeoMaxExp {
    fn label(&self) -> String {
        format!("geomax:{},{}", self.lambda, self.delta)
    }
    fn quantile(&self, u: f64) -> f64 {
        let d = self.delta;
        // ln[(δ + (1−δ)u)/δ] − ln(1−u)
        (((1.0 - d) / d * u).ln_1p() + neg_log1m(u)) / self.lambda
    }
    fn quantile_density(&self, u: f64) -> f64 {
        1.0 / (self.lambda * (1.0 - u) * (self.delta + (1.0 - self.delta) * u))
    }
    fn cdf(&self, x: f64) -> f64 {
        if x <= 0.0 {
            return 0.0;
        }
        let s = (-self.lambda * x).exp();
        let one_minus_s = -(-self.lambda * x).exp_m1();
        self.delta * one_minus_s / (self.delta + (1.0 - self.delta) * s)
    }
    fn survival(&self, x: f64) -> f64 {
        if x <= 0.0 {
            return 1.0;
        }
        let s = (-self.lambda * x).exp();
        s / (self.delta + (1.0 - self.delta) * s)
    }
    fn pdf(&self, x: f64) -> Option<f64> {
        if x < 0.0 {
            return Some(0.0);
        }
        let s = (-self.lambda * x).exp();
        let den = self.delta + (1.0 - self.delta) * s;
        Some(self.lambda * self.delta * s / (den * den))
    }
    fn support(&self) -> Support {
        Support::new(0.0, f64::INFINITY)
    }
    fn mean_form(&self) -> MeanForm {
        MeanForm::Finite(-self.delta.ln() / (self.lambda * (1.0 - self.delta)))
    }
    fn cvar_closed_form(&self, p: f64) -> Option<f64> {
        let d = self.delta;
        Some(-(p + (1.0 - p) * d).ln() / (self.lambda * (1.0 - p) * (1.0 - d)))
    }
}

/// `F(x) = exp(−c x^{−γ})`; the mean is finite only for `γ > 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrechetType {
    pub c: f64,
    pub gamma: f64,
}

impl FrechetType {
    pub fn new(c: f64, gamma: f64) -> Result<Self> {
        Ok(Self {
            c: positive("c", c)?,
            gamma: positive("gamma", gamma)?,
        })
    }
}

impl QuantileLaw for FrechetType {
    fn label(&self) -> String {
        format!("frechet:{},{}", self.c, self.gamma)
    }
    fn quantile(&self, u: f64) -> f64 {
        (self.c / -u.ln()).powf(1.0 / self.gamma)
    }
    fn quantile_density(&self, u: f64) -> f64 {
        let l = -u.ln();
        (self.c / l).powf(1.0 / self.gamma) / (self.gamma * u * l)
    }
    fn cdf(&self, x: f64) -> f64 {
        if x <= 0.0 {
            0.0
        } else {
            (-self.c * x.powf(-self.gamma)).exp()
        }
    }
    fn survival(&self, x: f64) -> f64 {
        if x <= 0.0 {
            1.0
        } else {
            -(-self.c * x.powf(-self.gamma)).exp_m1()
        }
    }
    fn pdf(&self, x: f64) -> Option<f64> {
        if x <= 0.0 {
            return Some(0.0);
        }
        let t = self.c * x.powf(-self.gamma);
        Some(self.gamma * t / x * (-t).exp())
    }
    fn support(&self) -> Support {
        Support::new(0.0, f64::INFINITY)
    }
    fn mean_form(&self) -> MeanForm {
        if self.gamma > 1.0 {
            MeanForm::Finite(self.c.powf(1.0 / self.gamma) * libm::tgamma(1.0 - 1.0 / self.gamma))
        } else {
            MeanForm::Infinite
        }
    }
    fn avar_closed_form(&self, v: f64) -> Option<f64> {
        let g = upper_incomplete_gamma(1.0 - 1.0 / self.gamma, -v.ln()).ok()?;
        Some(self.c.powf(1.0 / self.gamma) * g / v)
    }
}

/// Piecewise law with `F = exp(−1 − 1/x)` on (0,1), `exp((x² − 5)/2)` on
/// [1,2) and `exp(−1/x)` from 2 on. Its reversed hazard is `1/x²`, `x`, `1/x²`
/// on the three pieces, so `x·τ(x)` rises on [1,2). Knots take the right
/// limit. The mean is infinite.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlockPiecewise;

impl BlockPiecewise {
    const U1: f64 = 0.135_335_283_236_612_7; // e^{-2}
    const U2: f64 = 0.606_530_659_712_633_4; // e^{-1/2}

    pub fn reversed_hazard(x: f64) -> f64 {
        if (1.0..2.0).contains(&x) {
            x
        } else {
            1.0 / (x * x)
        }
    }
}

impl QuantileLaw for BlockPiecewise {
    fn label(&self) -> String {
        "block".into()
    }
    fn quantile(&self, u: f64) -> f64 {
        if u <= 0.0 {
            0.0
        } else if u < Self::U1 {
            -1.0 / (1.0 + u.ln())
        } else if u < Self::U2 {
            (5.0 + 2.0 * u.ln()).sqrt()
        } else {
            -1.0 / u.ln()
        }
    }
    fn quantile_density(&self, u: f64) -> f64 {
        let l = u.ln();
        if u < Self::U1 {
            1.0 / ((1.0 + l) * (1.0 + l) * u)
        } else if u < Self::U2 {
            1.0 / (u * (5.0 + 2.0 * l).sqrt())
        } else {
            1.0 / (u * l * l)
        }
    }
    fn cdf(&self, x: f64) -> f64 {
        if x <= 0.0 {
            0.0
        } else if x < 1.0 {
            (-1.0 - 1.0 / x).exp()
        } else if x < 2.0 {
            (0.5 * (x * x - 5.0)).exp()
        } else {
            (-1.0 / x).exp()
        }
    }
    fn survival(&self, x: f64) -> f64 {
        if x >= 2.0 {
            -(-1.0 / x).exp_m1()
        } else {
            1.0 - self.cdf(x)
        }
    }
    fn pdf(&self, x: f64) -> Option<f64> {
        Some(if x <= 0.0 {
            0.0
        } else {
            Self::reversed_hazard(x) * self.cdf(x)
        })
    }
    fn support(&self) -> Support {
        Support::new(0.0, f64::INFINITY)
    }
    fn mean_form(&self) -> MeanForm {
        MeanForm::Infinite
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn laws() -> Vec<Box<dyn QuantileLaw>> {
        vec![
            Box::new(Exponential::new(1.3).unwrap()),
            Box::new(Uniform::new(2.0).unwrap()),
            Box::new(PowerUnit::new(0.6).unwrap()),
            Box::new(PowerScale::new(2.0, 3.0).unwrap()),
            Box::new(Lomax::new(2.0, 1.0).unwrap()),
            Box::new(ParetoI::new(1.0, 2.0).unwrap()),
            Box::new(Rayleigh::new(1.0).unwrap()),
            Box::new(GeoMaxExp::new(1.0, 0.5).unwrap()),
            Box::new(FrechetType::new(1.0, 2.0).unwrap()),
            Box::new(FrechetType::new(0.5, 1.0).unwrap()),
            Box::new(BlockPiecewise),
        ]
    }

    fn probes() -> Vec<f64> {
        let mut v = vec![0.01];
        v.extend((1..10).map(|i| i as f64 / 10.0));
        v.push(0.99);
        v
    }

    #[test]
    fn cdf_inverts_quantile() {
        for law in laws() {
            for u in probes() {
                let x = law.quantile(u);
                assert!((law.cdf(x) - u).abs() <= 1e-9, "{} at u = {u}", law.label());
                assert!(
                    (law.survival(x) - (1.0 - u)).abs() <= 1e-9,
                    "{} at u = {u}",
                    law.label()
                );
            }
        }
    }

    #[test]
    fn quantile_density_is_reciprocal_density() {
        for law in laws() {
            for u in probes() {
                let q = law.quantile_density(u);
                let f = law.pdf(law.quantile(u)).unwrap();
                if f > 1e-12 {
                    assert!(
                        (q - 1.0 / f).abs() <= 1e-7 * (1.0 + q),
                        "{} at u = {u}",
                        law.label()
                    );
                }
            }
        }
    }

    #[test]
    fn quantile_density_matches_finite_differences() {
        let h = 1e-6;
        for law in laws() {
            for u in probes() {
                let fd = (law.quantile(u + h) - law.quantile(u - h)) / (2.0 * h);
                assert_relative_eq!(law.quantile_density(u), fd, max_relative = 1e-5);
            }
        }
    }

    #[test]
    fn printed_values() {
        assert_relative_eq!(
            Exponential::new(1.0).unwrap().quantile(0.5),
            std::f64::consts::LN_2
        );
        assert_relative_eq!(
            Lomax::new(2.0, 1.0).unwrap().quantile(0.75),
            1.0,
            max_relative = 1e-14
        );
        assert_relative_eq!(
            GeoMaxExp::new(1.0, 0.5).unwrap().quantile_density(0.5),
            8.0 / 3.0,
            max_relative = 1e-14
        );
        let r = Rayleigh::new(1.0).unwrap();
        assert_relative_eq!(
            r.quantile(0.5),
            0.832_554_611_157_697_8,
            max_relative = 1e-14
        );
    }

    #[test]
    fn constructors_validate() {
        assert!(Exponential::new(0.0).is_err());
        assert!(Exponential::new(f64::NAN).is_err());
        assert!(Lomax::new(1.0, 1.0).is_err());
        assert!(ParetoI::new(1.0, 0.9).is_err());
        assert!(GeoMaxExp::new(1.0, 1.0).is_err());
        assert!(FrechetType::new(-1.0, 2.0).is_err());
    }

    #[test]
    fn block_pieces_are_continuous() {
        let b = BlockPiecewise;
        for knot in [1.0, 2.0] {
            assert!((b.cdf(knot - 1e-12) - b.cdf(knot)).abs() < 1e-10);
        }
        assert_eq!(BlockPiecewise::reversed_hazard(1.0), 1.0);
        assert_eq!(BlockPiecewise::reversed_hazard(2.0), 0.25);
    }
}
