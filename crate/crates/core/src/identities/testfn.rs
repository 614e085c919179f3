use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Highest derivative order every shipped test function provides.
pub const MAX_ORDER: usize = 4;

/// A function `g` on (0,1) with analytic derivatives up to [`MAX_ORDER`].
#[derive(Debug, Clone, PartialEq)]
pub enum TestFunction {
    Constant(f64),
    /// `u^α`.
    Power(f64),
    /// `(1 − u)^a`.
    ReflectedPower(f64),
    /// `Σ c_k u^k`, coefficients from the constant term up.
    Polynomial(Vec<f64>),
    /// `e^u`.
    Exp,
    /// `ln(1 + u)`.
    Log1p,
    /// `Σ w_i g_i`.
    Combination(Vec<(f64, TestFunction)>),
}

/// `a (a−1) ⋯ (a−k+1)`.
pub fn falling_factorial(a: f64, k: usize) -> f64 {
    (0..k).map(|i| a - i as f64).product()
}

/// Generalized binomial coefficient `a choose k`.
pub fn binomial(a: f64, k: usize) -> f64 {
    falling_factorial(a, k) / factorial(k)
}

pub fn factorial(k: usize) -> f64 {
    (1..=k).map(|i| i as f64).product()
}

impl TestFunction {
    pub fn max_order(&self) -> usize {
        MAX_ORDER
    }

    pub fn require_order(&self, n: usize) -> Result<()> {
        if n > self.max_order() {
            return Err(Error::InsufficientDerivatives {
                requested: n,
                available: self.max_order(),
            });
        }
        Ok(())
    }

    pub fn eval(&self, u: f64) -> f64 {
        self.derivative(0, u)
    }

    /// `g^{(k)}(u)`; NaN beyond [`MAX_ORDER`].
    pub fn derivative(&self, k: usize, u: f64) -> f64 {
        if k > MAX_ORDER {
            return f64::NAN;
        }
        match self {
            TestFunction::Constant(c) => {
                if k == 0 {
                    *c
                } else {
                    0.0
                }
            }
            TestFunction::Power(a) => {
                let c = falling_factorial(*a, k);
                if c == 0.0 {
                    0.0
                } else {
                    c * u.powf(a - k as f64)
                }
            }
            TestFunction::ReflectedPower(a) => {
                let c = falling_factorial(*a, k);
                let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
                if c == 0.0 {
                    0.0
                } else {
                    sign * c * (1.0 - u).powf(a - k as f64)
                }
            }
            TestFunction::Polynomial(cs) => cs
                .iter()
                .enumerate()
                .skip(k)
                .rev()
                .fold(0.0, |acc, (j, &c)| {
                    acc * u + c * falling_factorial(j as f64, k)
                }),
            TestFunction::Exp => u.exp(),
            TestFunction::Log1p => {
                if k == 0 {
                    u.ln_1p()
                } else {
                    let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
                    sign * factorial(k - 1) / (1.0 + u).powi(k as i32)
                }
            }
            TestFunction::Combination(parts) => {
                parts.iter().map(|(w, g)| w * g.derivative(k, u)).sum()
            }
        }
    }

    /// `g(1)`, the limit from the left.
    pub fn boundary_value(&self) -> f64 {
        match self {
            TestFunction::ReflectedPower(a) => {
                if *a > 0.0 {
                    0.0
                } else if *a == 0.0 {
                    1.0
                } else {
                    f64::INFINITY
                }
            }
            TestFunction::Combination(parts) => {
                parts.iter().map(|(w, g)| w * g.boundary_value()).sum()
            }
            _ => self.eval(1.0),
        }
    }

    /// `g(1) − g(u)` without cancellation as `u → 1`.
    pub fn drop_to_one(&self, u: f64) -> f64 {
        let v = 1.0 - u;
        match self {
            TestFunction::Constant(_) => 0.0,
            TestFunction::Power(a) => -(a * u.ln()).exp_m1(),
            TestFunction::ReflectedPower(a) => self.boundary_value() - v.powf(*a),
            TestFunction::Polynomial(cs) => {
                // 1 − u^j = (1 − u)(1 + u + ⋯ + u^{j−1})
                let mut total = 0.0;
                let mut geometric = 0.0;
                let mut power = 1.0;
                for &c in cs.iter().skip(1) {
                    geometric += power;
                    power *= u;
                    total += c * geometric;
                }
                total * v
            }
            TestFunction::Exp => -std::f64::consts::E * (-v).exp_m1(),
            TestFunction::Log1p => (v / (1.0 + u)).ln_1p(),
            TestFunction::Combination(parts) => {
                parts.iter().map(|(w, g)| w * g.drop_to_one(u)).sum()
            }
        }
    }

    pub fn label(&self) -> String {
        match self {
            TestFunction::Constant(c) => format!("const:{c}"),
            TestFunction::Power(a) => format!("pow:{a}"),
            TestFunction::ReflectedPower(a) => format!("refpow:{a}"),
            TestFunction::Polynomial(cs) => {
                let parts: Vec<String> = cs.iter().map(|c| c.to_string()).collect();
                format!("poly:{}", parts.join(","))
            }
            TestFunction::Exp => "exp".into(),
            TestFunction::Log1p => "log1p".into(),
            TestFunction::Combination(parts) => {
                let parts: Vec<String> = parts
                    .iter()
                    .map(|(w, g)| format!("{w}*{}", g.label()))
                    .collect();
                parts.join("+")
            }
        }
    }
}

impl fmt::Display for TestFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

fn parse_numbers(s: &str) -> Result<Vec<f64>> {
    s.split(',')
        .map(|t| {
            t.trim()
                .parse::<f64>()
                .map_err(|_| Error::InvalidParameter(format!("bad number '{t}'")))
        })
        .collect()
}

impl FromStr for TestFunction {
    type Err = Error;

    /// `const[:c]`, `pow:α`, `refpow:a`, `poly:c0,c1,…`, `exp`, `log1p`;
    /// `u`, `u2`, `u3` are shorthands for `pow:1`, `pow:2`, `pow:3`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (tag, args) = match s.split_once(':') {
            Some((t, a)) => (t, Some(a)),
            None => (s, None),
        };
        let one = |args: Option<&str>| -> Result<f64> {
            let v = parse_numbers(args.unwrap_or(""))?;
            match v.as_slice() {
                [x] => Ok(*x),
                _ => Err(Error::InvalidParameter(format!(
                    "'{s}' takes one parameter"
                ))),
            }
        };
        Ok(match tag.to_ascii_lowercase().as_str() {
            "const" => TestFunction::Constant(args.map_or(Ok(1.0), |a| one(Some(a)))?),
            "pow" => TestFunction::Power(one(args)?),
            "refpow" => TestFunction::ReflectedPower(one(args)?),
            "poly" => TestFunction::Polynomial(parse_numbers(args.unwrap_or(""))?),
            "exp" => TestFunction::Exp,
            "log1p" => TestFunction::Log1p,
            "u" => TestFunction::Power(1.0),
            "u2" => TestFunction::Power(2.0),
            "u3" => TestFunction::Power(3.0),
            _ => {
                return Err(Error::UnknownName {
                    kind: "test function",
                    name: s.to_string(),
                })
            }
        })
    }
}
