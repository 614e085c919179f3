use crate::error::{Error, Result};

/// Brent's method on a sign-changing bracket.
///
/// Returns once the bracket is narrower than `tol` (plus a few ulps of the
/// root) or `f` vanishes exactly. Falls back to bisection whenever the
/// interpolation step would not shrink the bracket fast enough.
pub fn find_root<F>(f: F, lo: f64, hi: f64, tol: f64) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    if !(lo.is_finite() && hi.is_finite()) || !(tol > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "find_root needs a finite bracket and positive tolerance, got [{lo}, {hi}] tol {tol}"
        )));
    }
    let (mut a, mut b) = (lo, hi);
    let (mut fa, mut fb) = (f(a), f(b));
    if fa.is_nan() || fb.is_nan() {
        return Err(Error::NonFiniteEvaluation {
            at: if fa.is_nan() { a } else { b },
        });
    }
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if fa.signum() == fb.signum() {
        return Err(Error::InvalidBracket { lo, hi });
    }
    let mut c = a;
    let mut fc = fa;
    let mut d = b - a;
    let mut e = d;
    for _ in 0..500 {
        if fb.signum() == fc.signum() {
            c = a;
            fc = fa;
            d = b - a;
            e = d;
        }
        if fc.abs() < fb.abs() {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        let tol1 = 2.0 * f64::EPSILON * b.abs() + 0.5 * tol;
        let m = 0.5 * (c - b);
        if m.abs() <= tol1 || fb == 0.0 {
            return Ok(b);
        }
        if e.abs() >= tol1 && fa.abs() > fb.abs() {
            let s = fb / fa;
            let (mut p, mut q);
            if a == c {
                p = 2.0 * m * s;
                q = 1.0 - s;
            } else {
                let qa = fa / fc;
                let r = fb / fc;
                p = s * (2.0 * m * qa * (qa - r) - (b - a) * (r - 1.0));
                q = (qa - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if p > 0.0 {
                q = -q;
            } else {
                p = -p;
            }
            if 2.0 * p < (3.0 * m * q - (tol1 * q).abs()).min((e * q).abs()) {
                e = d;
                d = p / q;
            } else {
                d = m;
                e = m;
            }
        } else {
            d = m;
            e = m;
        }
        a = b;
        fa = fb;
        b += if d.abs() > tol1 { d } else { tol1.copysign(m) };
        fb = f(b);
        if fb.is_nan() {
            return Err(Error::NonFiniteEvaluation { at: b });
        }
    }
    Err(Error::NonConvergence(format!(
        "root search stalled near {b}"
    )))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn golden_ratio_root() {
        let x = find_root(|x| x * x - x - 1.0, 1.0, 2.0, 1e-14).unwrap();
        assert!((x - (1.0 + 5f64.sqrt()) / 2.0).abs() < 1e-10);
    }

    #[test]
    fn odd_function_root_at_zero() {
        let x = find_root(|x| x, -1.0, 1.0, 1e-14).unwrap();
        assert!(x.abs() < 1e-14);
    }

    #[test]
    fn exponential_root() {
        let x = find_root(|x| (-x).exp() - 0.5, 0.0, 2.0, 1e-14).unwrap();
        assert!((x - std::f64::consts::LN_2).abs() < 1e-12);
    }

    #[test]
    fn same_sign_bracket_is_rejected() {
        let err = find_root(|x| x * x + 1.0, -1.0, 1.0, 1e-10).unwrap_err();
        assert_eq!(err, Error::InvalidBracket { lo: -1.0, hi: 1.0 });
    }

    #[test]
    fn discontinuous_step_converges_to_jump() {
        let x = find_root(|x| if x < 0.3 { -1.0 } else { 1.0 }, 0.0, 1.0, 1e-12).unwrap();
        assert!((x - 0.3).abs() < 1e-11);
    }
}
