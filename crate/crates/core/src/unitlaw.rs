//! Laws on the unit interval built from quantile functions: the Lorenz lift
//! `X^L` with density `Q(u)/E[X]`, and `Z^L = Ψ^L(X, Y)` with density
//! `(Q_Y(u) − Q_X(u))/(E[Y] − E[X])`, which is a density exactly when
//! `X ≤_st Y`.

use std::fmt;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::distributions::{MeanForm, QuantileLaw, QuantileModel, Support};
use crate::error::{Error, Result};
use crate::numerics::grid::chebyshev_unit;
use crate::numerics::interp::MonotoneCubic;
use crate::numerics::{find_root, integrate, QuadratureSpec};

/// Number of cells in the cached cdf table.
pub const CDF_CELLS: usize = 2048;
/// Points used to confirm `Q_X ≤ Q_Y` before forming `Ψ^L(X, Y)`.
pub const ST_GRID: usize = 1024;
const ST_SLACK: f64 = 1e-9;
const NORMALIZATION_TOL: f64 = 1e-6;

pub type Density = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

#[derive(Debug, Clone, PartialEq)]
pub enum Provenance {
    /// `X^L` of the named model.
    Lift { x: String },
    /// `Ψ^L(X, Y)`; `st_grid` is the size of the grid the ordering was
    /// verified on.
    Psi {
        x: String,
        y: String,
        st_grid: usize,
    },
    /// A density given in closed form.
    ClosedForm { name: String },
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Provenance::Lift { x } => write!(f, "lift({x})"),
            Provenance::Psi { x, y, st_grid } => {
                write!(f, "psi({x}, {y}) [st verified on {st_grid}-point grid]")
            }
            Provenance::ClosedForm { name } => write!(f, "{name}"),
        }
    }
}

struct Inner {
    density: Density,
    provenance: Provenance,
    normalization: f64,
    mean: f64,
    knots: Vec<f64>,
    cumulative: Vec<f64>,
    tail: Vec<f64>,
    cdf_curve: MonotoneCubic,
}

/// An absolutely continuous law on (0, 1) given by its density, with an
/// eagerly built cdf table for inversion.
#[derive(Clone)]
pub struct UnitVariable {
    inner: Arc<Inner>,
}

impl fmt::Debug for UnitVariable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("UnitVariable")
            .field("provenance", &self.inner.provenance)
            .field("normalization", &self.inner.normalization)
            .finish()
    }
}

fn knot(i: usize) -> f64 {
    // degree-7 smoothstep spacing: cells shrink like i⁴ towards either end
    let t = i as f64 / CDF_CELLS as f64;
    if t <= 0.5 {
        let t2 = t * t;
        t2 * t2 * (35.0 + t * (-84.0 + t * (70.0 - 20.0 * t)))
    } else {
        1.0 - knot(CDF_CELLS - i)
    }
}

impl UnitVariable {
    pub fn from_density(density: Density, provenance: Provenance) -> Result<Self> {
        for u in chebyshev_unit(ST_GRID) {
            let d = density(u);
            if !d.is_finite() {
                return Err(Error::NonFiniteEvaluation { at: u });
            }
            if d < -1e-9 {
                return Err(Error::Domain(format!(
                    "{provenance}: density is negative ({d}) at u = {u}"
                )));
            }
        }
        let knots: Vec<f64> = (0..=CDF_CELLS).map(knot).collect();
        let spec = QuadratureSpec::default();
        let cells = knots
            .windows(2)
            .map(|w| integrate(|u| density(u), w[0], w[1], &spec).map(|r| r.value))
            .collect::<Result<Vec<f64>>>()?;
        let mut cumulative = Vec::with_capacity(CDF_CELLS + 1);
        cumulative.push(0.0);
        let mut acc = 0.0;
        for c in &cells {
            acc += c;
            cumulative.push(acc);
        }
        // right tails summed from the top keep relative precision near u = 1
        let mut tail = vec![0.0; CDF_CELLS + 1];
        for i in (0..CDF_CELLS).rev() {
            tail[i] = tail[i + 1] + cells[i];
        }
        let normalization = acc;
        if (normalization - 1.0).abs() > NORMALIZATION_TOL {
            return Err(Error::NotNormalized(normalization));
        }
        let mean = integrate(|u| u * density(u), 0.0, 1.0, &spec)?.value / normalization;
        // running maximum guards the interpolation against round-off dips
        let mut running = 0.0f64;
        let ys: Vec<f64> = cumulative
            .iter()
            .map(|&c| {
                running = running.max(c / normalization);
                running
            })
            .collect();
        let mut xs = Vec::with_capacity(knots.len());
        let mut kept_ys = Vec::with_capacity(knots.len());
        let mut slopes = Vec::with_capacity(knots.len());
        for (i, (&x, &y)) in knots.iter().zip(&ys).enumerate() {
            if xs.last().is_some_and(|&last: &f64| x <= last) {
                continue;
            }
            let s = if i == 0 || i == CDF_CELLS {
                f64::NAN
            } else {
                density(x) / normalization
            };
            xs.push(x);
            kept_ys.push(y);
            slopes.push(s);
        }
        let cdf_curve = MonotoneCubic::with_slopes(xs, kept_ys, slopes)?;
        Ok(Self {
            inner: Arc::new(Inner {
                density,
                provenance,
                normalization,
                mean,
                knots,
                cumulative,
                tail,
                cdf_curve,
            }),
        })
    }

    pub fn density(&self, u: f64) -> f64 {
        (self.inner.density)(u)
    }

    pub fn density_fn(&self) -> Density {
        self.inner.density.clone()
    }

    pub fn provenance(&self) -> &Provenance {
        &self.inner.provenance
    }

    /// `∫₀¹ d(u) du` as measured when the table was built.
    pub fn normalization(&self) -> f64 {
        self.inner.normalization
    }

    pub fn mean(&self) -> f64 {
        self.inner.mean
    }

    /// Cdf by table lookup plus quadrature over the partial cell.
    pub fn cdf(&self, p: f64) -> f64 {
        if p <= 0.0 {
            return 0.0;
        }
        if p >= 1.0 {
            return 1.0;
        }
        let inner = &self.inner;
        let i = inner.knots.partition_point(|&k| k <= p) - 1;
        let partial = if p > inner.knots[i] {
            integrate(
                |u| (inner.density)(u),
                inner.knots[i],
                p,
                &QuadratureSpec::precise(),
            )
            .map(|r| r.value)
            .unwrap_or(0.0)
        } else {
            0.0
        };
        ((inner.cumulative[i] + partial) / inner.normalization).clamp(0.0, 1.0)
    }

    /// `1 − cdf(p)`, computed from the right-tail table.
    pub fn survival(&self, p: f64) -> f64 {
        if p <= 0.0 {
            return 1.0;
        }
        if p >= 1.0 {
            return 0.0;
        }
        let inner = &self.inner;
        let i = inner.knots.partition_point(|&k| k < p);
        let partial = if p < inner.knots[i] {
            integrate(
                |u| (inner.density)(u),
                p,
                inner.knots[i],
                &QuadratureSpec::precise(),
            )
            .map(|r| r.value)
            .unwrap_or(0.0)
        } else {
            0.0
        };
        ((inner.tail[i] + partial) / inner.normalization).clamp(0.0, 1.0)
    }

    /// Fast approximate quantile from the interpolated cdf table.
    pub fn quantile_table(&self, p: f64) -> f64 {
        self.inner.cdf_curve.inverse(p)
    }

    /// Quantile refined by Newton steps on the exact cdf.
    pub fn quantile(&self, p: f64) -> f64 {
        if p <= 0.0 {
            return 0.0;
        }
        if p >= 1.0 {
            return 1.0;
        }
        let mut u = self.quantile_table(p);
        for _ in 0..3 {
            let d = self.density(u) / self.inner.normalization;
            if !(d > 0.0) || !d.is_finite() {
                break;
            }
            let step = (self.cdf(u) - p) / d;
            let next = u - step;
            if !(next > 0.0 && next < 1.0) {
                break;
            }
            u = next;
            if step.abs() < 1e-15 {
                break;
            }
        }
        u
    }

    /// Inverse-transform sample of size `n`; the same seed gives the same
    /// sample.
    pub fn sample(&self, n: usize, seed: u64) -> Vec<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..n)
            .map(|_| {
                let p: f64 = rng.random();
                self.quantile_table(p)
                    .clamp(f64::MIN_POSITIVE, 1.0 - f64::EPSILON / 2.0)
            })
            .collect()
    }

    /// The same law viewed as a [`QuantileModel`].
    pub fn to_model(&self) -> QuantileModel {
        QuantileModel::new(self.clone())
    }
}

impl QuantileLaw for UnitVariable {
    fn label(&self) -> String {
        self.inner.provenance.to_string()
    }
    fn quantile(&self, u: f64) -> f64 {
        UnitVariable::quantile(self, u)
    }
    fn quantile_density(&self, u: f64) -> f64 {
        self.inner.normalization / self.density(UnitVariable::quantile(self, u))
    }
    fn cdf(&self, x: f64) -> f64 {
        UnitVariable::cdf(self, x)
    }
    fn survival(&self, x: f64) -> f64 {
        UnitVariable::survival(self, x)
    }
    fn pdf(&self, x: f64) -> Option<f64> {
        Some(if x > 0.0 && x < 1.0 {
            self.density(x) / self.inner.normalization
        } else {
            0.0
        })
    }
    fn support(&self) -> Support {
        Support::new(0.0, 1.0)
    }
    fn mean_form(&self) -> MeanForm {
        MeanForm::Finite(self.inner.mean)
    }
}

fn positive_mean(x: &QuantileModel) -> Result<f64> {
    x.require_class_d()?;
    let m = x.mean()?;
    if !(m > 0.0) {
        return Err(Error::Domain(format!(
            "{} has mean {m}; a positive mean is required",
            x.label()
        )));
    }
    Ok(m)
}

/// Lorenz curve `L(p) = (1/E[X]) ∫₀^p Q(u) du`.
pub fn lorenz_curve(x: &QuantileModel, p: f64) -> Result<f64> {
    let m = positive_mean(x)?;
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::Domain(format!(
            "Lorenz curve needs p in [0, 1], got {p}"
        )));
    }
    if p == 0.0 {
        return Ok(0.0);
    }
    if p == 1.0 {
        return Ok(1.0);
    }
    let r = integrate(|u| x.quantile(u), 0.0, p, &QuadratureSpec::precise())?;
    Ok(r.value / m)
}

/// `X^L`, with density `Q(u)/E[X]`.
pub fn lift_xl(x: &QuantileModel) -> Result<UnitVariable> {
    let m = positive_mean(x)?;
    let model = x.clone();
    UnitVariable::from_density(
        Arc::new(move |u| model.quantile(u) / m),
        Provenance::Lift { x: x.label() },
    )
}

/// Confirms `Q_X ≤ Q_Y` on the Chebyshev grid and returns `E[Y] − E[X] > 0`.
pub fn check_psi_preconditions(x: &QuantileModel, y: &QuantileModel) -> Result<f64> {
    let (ex, ey) = (x.mean()?, y.mean()?);
    for u in chebyshev_unit(ST_GRID) {
        let (qx, qy) = (x.quantile(u), y.quantile(u));
        if qx > qy + ST_SLACK {
            return Err(Error::NotStochasticallyOrdered { u, qx, qy });
        }
    }
    let gap = ey - ex;
    if !(gap > 1e-12 * ex.abs().max(ey.abs()).max(1.0)) {
        return Err(Error::EqualMeans(ex));
    }
    Ok(gap)
}

/// `Z^L = Ψ^L(X, Y)` with density `(Q_Y − Q_X)/(E[Y] − E[X])`.
pub fn psi_l(x: &QuantileModel, y: &QuantileModel) -> Result<UnitVariable> {
    let gap = check_psi_preconditions(x, y)?;
    let (mx, my) = (x.clone(), y.clone());
    UnitVariable::from_density(
        Arc::new(move |u| (my.quantile(u) - mx.quantile(u)) / gap),
        Provenance::Psi {
            x: x.label(),
            y: y.label(),
            st_grid: ST_GRID,
        },
    )
}

/// `L_{X,Y}(p) = ∫₀^p (Q_Y − Q_X) du / (E[Y] − E[X])`, the cdf of `Ψ^L(X, Y)`.
pub fn generalized_lorenz(x: &QuantileModel, y: &QuantileModel, p: f64) -> Result<f64> {
    let gap = check_psi_preconditions(x, y)?;
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::Domain(format!(
            "generalized Lorenz curve needs p in [0, 1], got {p}"
        )));
    }
    if p == 0.0 {
        return Ok(0.0);
    }
    if p == 1.0 {
        return Ok(1.0);
    }
    let r = integrate(
        |u| y.quantile(u) - x.quantile(u),
        0.0,
        p,
        &QuadratureSpec::precise(),
    )?;
    Ok(r.value / gap)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MixtureCoefficient {
    /// `c = E[Y]/(E[Y] − E[X])`.
    pub c: f64,
    /// Largest relative gap between `f_{Z^L}` and `c·f_{Y^L} + (1−c)·f_{X^L}`
    /// over the check grid.
    pub max_deviation: f64,
}

/// Writes `f_{Z^L} = c·f_{Y^L} + (1 − c)·f_{X^L}` and checks it pointwise.
pub fn mixture_decomposition(x: &QuantileModel, y: &QuantileModel) -> Result<MixtureCoefficient> {
    x.require_class_d()?;
    let ey = positive_mean(y)?;
    let gap = check_psi_preconditions(x, y)?;
    let ex = x.mean()?;
    let c = ey / gap;
    let mut max_deviation: f64 = 0.0;
    for u in chebyshev_unit(256) {
        let z = (y.quantile(u) - x.quantile(u)) / gap;
        let yl = y.quantile(u) / ey;
        let xl = if ex > 0.0 { x.quantile(u) / ex } else { 0.0 };
        let mix = c * yl + if ex > 0.0 { (1.0 - c) * xl } else { 0.0 };
        max_deviation = max_deviation.max((z - mix).abs() / (1.0 + z.abs()));
    }
    if max_deviation > 1e-8 {
        return Err(Error::NonConvergence(format!(
            "mixture representation off by {max_deviation}"
        )));
    }
    Ok(MixtureCoefficient { c, max_deviation })
}

/// `E[(X^L)^k] = E[U^k Q(U)]/E[Q(U)]`.
pub fn unit_moment(x: &QuantileModel, k: u32) -> Result<f64> {
    let m = positive_mean(x)?;
    if k == 0 {
        return Ok(1.0);
    }
    let r = integrate(
        |u| u.powi(k as i32) * x.quantile(u),
        0.0,
        1.0,
        &QuadratureSpec::default(),
    )?;
    Ok(r.value / m)
}

/// `E[h(X^L)] = (1/E[X]) ∫₀¹ h(u) Q(u) du`.
pub fn expectation_h(x: &QuantileModel, h: impl Fn(f64) -> f64) -> Result<f64> {
    let m = positive_mean(x)?;
    let r = integrate(
        |u| h(u) * x.quantile(u),
        0.0,
        1.0,
        &QuadratureSpec::default(),
    )?;
    if !r.converged {
        return Err(Error::NonConvergence(format!(
            "E[h(X^L)] for {}",
            x.label()
        )));
    }
    Ok(r.value / m)
}

const QUADRATURE_REL_FLOOR: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MonteCarloEstimate {
    pub n: usize,
    pub mean: f64,
    pub std_error: f64,
}

impl MonteCarloEstimate {
    pub fn from_values(values: impl Iterator<Item = f64>) -> Self {
        // Welford
        let (mut n, mut mean, mut m2) = (0usize, 0.0, 0.0);
        for v in values {
            n += 1;
            let delta = v - mean;
            mean += delta / n as f64;
            m2 += delta * (v - mean);
        }
        let var = if n > 1 { m2 / (n - 1) as f64 } else { 0.0 };
        Self {
            n,
            mean,
            std_error: (var / n.max(1) as f64).sqrt(),
        }
    }

    /// Within `sigmas` standard errors of `value`, plus the default
    /// quadrature's relative tolerance so a zero-variance estimator can still
    /// agree with a quadrature value.
    pub fn agrees_with(&self, value: f64, sigmas: f64) -> bool {
        let floor = QUADRATURE_REL_FLOOR * value.abs().max(self.mean.abs());
        (self.mean - value).abs() <= sigmas * self.std_error + floor
    }
}

/// Monte Carlo estimate of `E[h(F(X))·X]/E[X]`, the other side of the
/// identity behind [`expectation_h`].
pub fn expectation_h_monte_carlo(
    x: &QuantileModel,
    h: impl Fn(f64) -> f64,
    n: usize,
    seed: u64,
) -> Result<MonteCarloEstimate> {
    let m = positive_mean(x)?;
    if n == 0 {
        return Err(Error::InvalidSampleSize);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok(MonteCarloEstimate::from_values((0..n).map(|_| {
        let u: f64 = rng.random();
        let xv = x.quantile(u);
        h(x.cdf(xv)) * xv / m
    })))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GoldenReport {
    /// Exponent `α` for which `PowerUnit(α)` equals its own lift in law.
    pub alpha: f64,
    /// `sup_p |L_α(p) − p^α|` over the check grid.
    pub sup_distance: f64,
    /// The value printed in the source remark, `(√5 − 1)/2`.
    pub printed_value: f64,
    pub matches_printed: bool,
    /// `|E[X^L] − E[X]|` at the returned `α`.
    pub mean_gap: f64,
}

/// Finds the power-family exponent with `X =_d X^L`. Since
/// `L(p) = p^{(α+1)/α}` and `F(p) = p^α`, the target solves `α² − α − 1 = 0`;
/// the root is located numerically from the Lorenz curve at `p = ½`.
pub fn golden_fixed_point() -> Result<GoldenReport> {
    use crate::distributions::PowerUnit;
    let lorenz_half = |alpha: f64| -> f64 {
        let model = QuantileModel::new(PowerUnit { alpha });
        let r = integrate(|u| model.quantile(u), 0.0, 0.5, &QuadratureSpec::precise())
            .map(|r| r.value)
            .unwrap_or(f64::NAN);
        r * (alpha + 1.0) / alpha
    };
    let mismatch = |alpha: f64| lorenz_half(alpha).ln() / 0.5f64.ln() - alpha;
    let alpha = find_root(mismatch, 1.0, 2.0, 1e-13)?;
    let model = QuantileModel::new(PowerUnit::new(alpha)?);
    let mut sup_distance: f64 = 0.0;
    for p in chebyshev_unit(200) {
        sup_distance = sup_distance.max((lorenz_curve(&model, p)? - p.powf(alpha)).abs());
    }
    let mean_gap = (unit_moment(&model, 1)? - model.mean()?).abs();
    let printed_value = (5f64.sqrt() - 1.0) / 2.0;
    Ok(GoldenReport {
        alpha,
        sup_distance,
        printed_value,
        matches_printed: (alpha - printed_value).abs() < 1e-8,
        mean_gap,
    })
}
