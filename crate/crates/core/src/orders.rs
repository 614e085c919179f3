//! Grid checks for stochastic orders and aging classes.
//!
//! Every verdict is a statement about the evaluation grid, never a proof.
//! "Decreasing" is non-strict: consecutive values may rise by at most
//! `tol · max(1, |previous|)`.

use std::fmt;
use std::str::FromStr;

use crate::distributions::QuantileModel;
use crate::error::{Error, Result};
use crate::numerics::grid::{chebyshev_unit, log_spaced};
use crate::numerics::{integrate, QuadratureSpec};
use crate::unitlaw::{lift_xl, psi_l};

pub const DEFAULT_GRID: usize = 512;
pub const DEFAULT_TOL: f64 = 1e-9;
/// Fraction of probability mass trimmed from each end when building x-grids.
pub const X_GRID_TRIM: f64 = 1e-4;

const RATIO_GUARD: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VerdictStatus {
    HoldsOnGrid,
    Fails,
    Inconclusive,
}

impl fmt::Display for VerdictStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            VerdictStatus::HoldsOnGrid => "holds-on-grid",
            VerdictStatus::Fails => "fails",
            VerdictStatus::Inconclusive => "inconclusive",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Witness {
    /// Grid coordinates of the violation (u, x, or a (p, r) / (s, p, r) tuple).
    pub location: Vec<f64>,
    pub quantity: String,
    /// Size of the violation, in the units the check compares against `tol`.
    pub violation: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Verdict {
    pub relation: String,
    pub status: VerdictStatus,
    pub witness: Option<Witness>,
    pub grid_size: usize,
    pub tolerance: f64,
}

impl Verdict {
    pub fn holds(&self) -> bool {
        self.status == VerdictStatus::HoldsOnGrid
    }

    pub fn fails(&self) -> bool {
        self.status == VerdictStatus::Fails
    }

    fn inconclusive(relation: &str, grid_size: usize, tolerance: f64) -> Self {
        Verdict {
            relation: relation.to_string(),
            status: VerdictStatus::Inconclusive,
            witness: None,
            grid_size,
            tolerance,
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}: {} (grid {}, tol {:e})",
            self.relation, self.status, self.grid_size, self.tolerance
        )?;
        if let Some(w) = &self.witness {
            let loc: Vec<String> = w.location.iter().map(|v| format!("{v:.6}")).collect();
            write!(
                f,
                "; {} violated by {:.3e} at ({})",
                w.quantity,
                w.violation,
                loc.join(", ")
            )?;
        }
        Ok(())
    }
}

/// Tracks the largest violation seen; ties keep the earliest location.
struct WorstViolation {
    best: Option<Witness>,
}

impl WorstViolation {
    fn new() -> Self {
        Self { best: None }
    }

    fn offer(&mut self, location: &[f64], quantity: &str, violation: f64) {
        let better = match &self.best {
            None => true,
            Some(w) => violation > w.violation,
        };
        if better {
            self.best = Some(Witness {
                location: location.to_vec(),
                quantity: quantity.to_string(),
                violation,
            });
        }
    }

    fn verdict(self, relation: &str, grid_size: usize, tolerance: f64) -> Verdict {
        let status = if self.best.is_some() {
            VerdictStatus::Fails
        } else {
            VerdictStatus::HoldsOnGrid
        };
        Verdict {
            relation: relation.to_string(),
            status,
            witness: self.best,
            grid_size,
            tolerance,
        }
    }
}

/// Non-strict "decreasing" over `(location, value)` points; `None` values are
/// skipped (guarded regions).
pub fn decreasing_verdict(
    relation: &str,
    quantity: &str,
    points: &[(f64, Option<f64>)],
    tol: f64,
) -> Verdict {
    let valid: Vec<(f64, f64)> = points
        .iter()
        .filter_map(|&(x, v)| v.filter(|v| v.is_finite()).map(|v| (x, v)))
        .collect();
    if valid.len() < 2 {
        return Verdict::inconclusive(relation, points.len(), tol);
    }
    let mut worst = WorstViolation::new();
    for w in valid.windows(2) {
        let rise = w[1].1 - w[0].1;
        let slack = tol * w[0].1.abs().max(1.0);
        if rise > slack {
            worst.offer(&[w[1].0], quantity, rise);
        }
    }
    worst.verdict(relation, points.len(), tol)
}

/// Strictly decreasing with the given strictness slack: every step must drop
/// by more than `slack · max(1, |value|)`.
pub fn strictly_decreasing_verdict(
    relation: &str,
    quantity: &str,
    points: &[(f64, f64)],
    slack: f64,
) -> Verdict {
    if points.len() < 2 || points.iter().any(|p| !p.1.is_finite()) {
        return Verdict::inconclusive(relation, points.len(), slack);
    }
    let mut worst = WorstViolation::new();
    for w in points.windows(2) {
        let drop = w[0].1 - w[1].1;
        let needed = slack * w[0].1.abs().max(1.0);
        if drop <= needed {
            worst.offer(&[w[1].0], quantity, needed - drop + slack);
        }
    }
    worst.verdict(relation, points.len(), slack)
}

/// x-grid covering the central mass of every model: log-spaced when some
/// support is unbounded above and the range is positive, linear otherwise.
pub fn x_grid(models: &[&QuantileModel], n: usize) -> Vec<f64> {
    let lo = models
        .iter()
        .map(|m| m.quantile(X_GRID_TRIM))
        .fold(f64::INFINITY, f64::min);
    let hi = models
        .iter()
        .map(|m| m.quantile(1.0 - X_GRID_TRIM))
        .fold(f64::NEG_INFINITY, f64::max);
    let unbounded = models.iter().any(|m| m.support().upper.is_infinite());
    if n < 2 || !(hi > lo) {
        return vec![lo; n.min(1)];
    }
    if unbounded && lo > 0.0 {
        log_spaced(lo, hi, n)
    } else {
        (0..n)
            .map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum OrderRelation {
    St,
    Hr,
    Rh,
    Lr,
    Star,
    Ps,
    Rps,
}

impl OrderRelation {
    pub const ALL: [OrderRelation; 7] = [
        OrderRelation::St,
        OrderRelation::Hr,
        OrderRelation::Rh,
        OrderRelation::Lr,
        OrderRelation::Star,
        OrderRelation::Ps,
        OrderRelation::Rps,
    ];

    pub fn tag(self) -> &'static str {
        match self {
            OrderRelation::St => "st",
            OrderRelation::Hr => "hr",
            OrderRelation::Rh => "rh",
            OrderRelation::Lr => "lr",
            OrderRelation::Star => "star",
            OrderRelation::Ps => "PS",
            OrderRelation::Rps => "RPS",
        }
    }

    pub fn checker(self) -> Box<dyn OrderCheck> {
        match self {
            OrderRelation::St => Box::new(UsualStochastic),
            OrderRelation::Hr => Box::new(HazardRate),
            OrderRelation::Rh => Box::new(ReversedHazard),
            OrderRelation::Lr => Box::new(LikelihoodRatio),
            OrderRelation::Star => Box::new(StarOrder),
            OrderRelation::Ps => Box::new(ProportionalShortfall),
            OrderRelation::Rps => Box::new(ReversedProportionalShortfall),
        }
    }
}

impl fmt::Display for OrderRelation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for OrderRelation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        OrderRelation::ALL
            .into_iter()
            .find(|r| r.tag().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::UnknownName {
                kind: "order relation",
                name: s.to_string(),
            })
    }
}

/// A two-sample order `X ≤ Y`.
pub trait OrderCheck: Send + Sync {
    fn relation(&self) -> OrderRelation;
    fn check(
        &self,
        x: &QuantileModel,
        y: &QuantileModel,
        grid_size: usize,
        tol: f64,
    ) -> Result<Verdict>;
}

pub fn check_order(
    x: &QuantileModel,
    y: &QuantileModel,
    rel: OrderRelation,
    grid_size: usize,
    tol: f64,
) -> Result<Verdict> {
    rel.checker().check(x, y, grid_size, tol)
}

pub struct UsualStochastic;
pub struct HazardRate;
pub struct ReversedHazard;
pub struct LikelihoodRatio;
pub struct StarOrder;
pub struct ProportionalShortfall;
pub struct ReversedProportionalShortfall;

impl OrderCheck for UsualStochastic {
    fn relation(&self) -> OrderRelation {
        OrderRelation::St
    }

    fn check(&self, x: &QuantileModel, y: &QuantileModel, n: usize, tol: f64) -> Result<Verdict> {
        let mut worst = WorstViolation::new();
        for u in chebyshev_unit(n) {
            let (qx, qy) = (x.quantile(u), y.quantile(u));
            let excess = qx - qy;
            if excess > tol * qy.abs().max(1.0) {
                worst.offer(&[u], "Q_X(u) <= Q_Y(u)", excess);
            }
        }
        Ok(worst.verdict("st", n, tol))
    }
}

impl OrderCheck for HazardRate {
    fn relation(&self) -> OrderRelation {
        OrderRelation::Hr
    }

    fn check(&self, x: &QuantileModel, y: &QuantileModel, n: usize, tol: f64) -> Result<Verdict> {
        let points: Vec<(f64, Option<f64>)> = x_grid(&[x, y], n)
            .into_iter()
            .map(|t| {
                let sy = y.survival(t);
                (t, (sy > RATIO_GUARD).then(|| x.survival(t) / sy))
            })
            .collect();
        Ok(decreasing_verdict(
            "hr",
            "survival ratio decreasing",
            &points,
            tol,
        ))
    }
}

impl OrderCheck for ReversedHazard {
    fn relation(&self) -> OrderRelation {
        OrderRelation::Rh
    }

    fn check(&self, x: &QuantileModel, y: &QuantileModel, n: usize, tol: f64) -> Result<Verdict> {
        let points: Vec<(f64, Option<f64>)> = x_grid(&[x, y], n)
            .into_iter()
            .map(|t| {
                let fy = y.cdf(t);
                (t, (fy > RATIO_GUARD).then(|| x.cdf(t) / fy))
            })
            .collect();
        Ok(decreasing_verdict(
            "rh",
            "cdf ratio decreasing",
            &points,
            tol,
        ))
    }
}

impl OrderCheck for LikelihoodRatio {
    fn relation(&self) -> OrderRelation {
        OrderRelation::Lr
    }

    fn check(&self, x: &QuantileModel, y: &QuantileModel, n: usize, tol: f64) -> Result<Verdict> {
        let grid = x_grid(&[x, y], n);
        let mut points = Vec::with_capacity(grid.len());
        for t in grid {
            let fx = x.pdf_or_err(t)?;
            let fy = y.pdf_or_err(t)?;
            points.push((t, (fy > 1e-300 && fx.is_finite()).then(|| fx / fy)));
        }
        Ok(decreasing_verdict(
            "lr",
            "density ratio decreasing",
            &points,
            tol,
        ))
    }
}

impl OrderCheck for StarOrder {
    fn relation(&self) -> OrderRelation {
        OrderRelation::Star
    }

    fn check(&self, x: &QuantileModel, y: &QuantileModel, n: usize, tol: f64) -> Result<Verdict> {
        let points: Vec<(f64, Option<f64>)> = chebyshev_unit(n)
            .into_iter()
            .map(|u| {
                let qy = y.quantile(u);
                (u, (qy > RATIO_GUARD).then(|| x.quantile(u) / qy))
            })
            .collect();
        Ok(decreasing_verdict(
            "star",
            "quantile ratio decreasing",
            &points,
            tol,
        ))
    }
}

/// `∫` of `Q` over consecutive grid cells, plus the two outer pieces.
/// Returns `None` when an outer piece diverges.
fn cell_integrals(m: &QuantileModel, grid: &[f64]) -> Result<Option<(f64, Vec<f64>, f64)>> {
    let spec = QuadratureSpec::default();
    let head = integrate(|u| m.quantile(u), 0.0, grid[0], &spec)?;
    let tail = integrate(|u| m.quantile(u), grid[grid.len() - 1], 1.0, &spec)?;
    let cells = grid
        .windows(2)
        .map(|w| integrate(|u| m.quantile(u), w[0], w[1], &spec).map(|r| r.value))
        .collect::<Result<Vec<f64>>>()?;
    if !head.converged || !tail.converged {
        return Ok(None);
    }
    Ok(Some((head.value, cells, tail.value)))
}

/// Left partial integrals `∫₀^{u_i} Q` at each grid point.
fn left_integrals(m: &QuantileModel, grid: &[f64]) -> Result<Option<Vec<f64>>> {
    Ok(cell_integrals(m, grid)?.map(|(head, cells, _)| {
        let mut out = Vec::with_capacity(grid.len());
        let mut acc = head;
        out.push(acc);
        for c in cells {
            acc += c;
            out.push(acc);
        }
        out
    }))
}

/// Right partial integrals `∫_{u_i}^1 Q` at each grid point.
fn right_integrals(m: &QuantileModel, grid: &[f64]) -> Result<Option<Vec<f64>>> {
    Ok(cell_integrals(m, grid)?.map(|(_, cells, tail)| {
        let mut out = vec![0.0; grid.len()];
        let mut acc = tail;
        out[grid.len() - 1] = acc;
        for i in (0..cells.len()).rev() {
            acc += cells[i];
            out[i] = acc;
        }
        out
    }))
}

fn partial_ratio_verdict(
    relation: &str,
    grid: &[f64],
    ix: Option<Vec<f64>>,
    iy: Option<Vec<f64>>,
    tol: f64,
) -> Verdict {
    let (Some(ix), Some(iy)) = (ix, iy) else {
        return Verdict::inconclusive(relation, grid.len(), tol);
    };
    let points: Vec<(f64, Option<f64>)> = grid
        .iter()
        .zip(ix.iter().zip(&iy))
        .map(|(&u, (&a, &b))| (u, (b > RATIO_GUARD).then(|| a / b)))
        .collect();
    decreasing_verdict(relation, "partial-integral ratio decreasing", &points, tol)
}

impl OrderCheck for ProportionalShortfall {
    fn relation(&self) -> OrderRelation {
        OrderRelation::Ps
    }

    fn check(&self, x: &QuantileModel, y: &QuantileModel, n: usize, tol: f64) -> Result<Verdict> {
        let grid = chebyshev_unit(n);
        if grid.is_empty() {
            return Ok(Verdict::inconclusive("PS", n, tol));
        }
        let ix = right_integrals(x, &grid)?;
        let iy = right_integrals(y, &grid)?;
        Ok(partial_ratio_verdict("PS", &grid, ix, iy, tol))
    }
}

impl OrderCheck for ReversedProportionalShortfall {
    fn relation(&self) -> OrderRelation {
        OrderRelation::Rps
    }

    fn check(&self, x: &QuantileModel, y: &QuantileModel, n: usize, tol: f64) -> Result<Verdict> {
        let grid = chebyshev_unit(n);
        if grid.is_empty() {
            return Ok(Verdict::inconclusive("RPS", n, tol));
        }
        let ix = left_integrals(x, &grid)?;
        let iy = left_integrals(y, &grid)?;
        Ok(partial_ratio_verdict("RPS", &grid, ix, iy, tol))
    }
}

/// NBU in quantile form: `F̄(Q(p) + Q(r)) ≤ (1 − p)(1 − r)`. The violation is
/// measured relative to the right-hand side.
pub fn check_nbu(x: &QuantileModel, grid_size: usize, tol: f64) -> Result<Verdict> {
    let grid = chebyshev_unit(grid_size);
    let q: Vec<f64> = grid.iter().map(|&u| x.quantile(u)).collect();
    let mut worst = WorstViolation::new();
    for (i, &p) in grid.iter().enumerate() {
        for (j, &r) in grid.iter().enumerate().skip(i) {
            let lhs = x.survival(q[i] + q[j]);
            let rhs = (1.0 - p) * (1.0 - r);
            let rel = lhs / rhs - 1.0;
            if rel > tol {
                worst.offer(&[p, r], "survival(Q(p)+Q(r)) <= (1-p)(1-r)", rel);
            }
        }
    }
    Ok(worst.verdict("nbu", grid_size, tol))
}

/// IFR in quantile form: for every `s` and every `r < p`,
/// `F̄(Q(s)+Q(p)) / F̄(Q(s)+Q(r)) ≤ (1 − p)/(1 − r)`, i.e. the residual life
/// at a higher quantile is stochastically smaller.
pub fn check_ifr(x: &QuantileModel, grid_size: usize, tol: f64) -> Result<Verdict> {
    let grid = chebyshev_unit(grid_size);
    let q: Vec<f64> = grid.iter().map(|&u| x.quantile(u)).collect();
    let n = grid.len();
    let mut worst = WorstViolation::new();
    let mut row = vec![0.0; n];
    for (si, &s) in grid.iter().enumerate() {
        for k in 0..n {
            row[k] = x.survival(q[si] + q[k]);
        }
        for j in 0..n {
            if row[j] < 1e-250 {
                continue;
            }
            let r = grid[j];
            for k in (j + 1)..n {
                let p = grid[k];
                // row[k]/row[j] ≤ (1−p)/(1−r), cross-multiplied
                let rel = row[k] * (1.0 - r) / (row[j] * (1.0 - p)) - 1.0;
                if rel > tol {
                    worst.offer(&[s, p, r], "survival ratio <= (1-p)/(1-r)", rel);
                }
            }
        }
    }
    Ok(worst.verdict("ifr", grid_size, tol))
}

/// `x·τ(x)` with `τ = f/F` the reversed hazard, on a log-spaced x-grid.
pub fn check_xtau_decreasing(x: &QuantileModel, grid_size: usize, tol: f64) -> Result<Verdict> {
    let lo = x.quantile(X_GRID_TRIM);
    let hi = x.quantile(1.0 - X_GRID_TRIM);
    let grid = if lo > 0.0 && hi > lo {
        log_spaced(lo, hi, grid_size)
    } else {
        x_grid(&[x], grid_size)
    };
    let mut points = Vec::with_capacity(grid.len());
    for t in grid {
        let f = x.pdf_or_err(t)?;
        let cdf = x.cdf(t);
        points.push((t, (cdf > RATIO_GUARD).then(|| t * f / cdf)));
    }
    Ok(decreasing_verdict(
        "xtau",
        "x*tau(x) decreasing",
        &points,
        tol,
    ))
}

/// Proportional NBU in quantile form: `F̄((1+x)Q(p)) ≤ F̄(x)(1 − p)` over a grid
/// of `(p, x)` with `x = Q(r)`.
pub fn check_proportional_nbu(x: &QuantileModel, grid_size: usize, tol: f64) -> Result<Verdict> {
    let grid = chebyshev_unit(grid_size);
    let q: Vec<f64> = grid.iter().map(|&u| x.quantile(u)).collect();
    let mut worst = WorstViolation::new();
    for (i, &p) in grid.iter().enumerate() {
        for (j, &r) in grid.iter().enumerate() {
            let lhs = x.survival((1.0 + q[j]) * q[i]);
            let rhs = x.survival(q[j]) * (1.0 - p);
            if rhs <= 0.0 {
                continue;
            }
            let rel = lhs / rhs - 1.0;
            if rel > tol {
                worst.offer(&[p, r], "survival((1+x)Q(p)) <= survival(x)(1-p)", rel);
            }
        }
    }
    Ok(worst.verdict("pnbu", grid_size, tol))
}

/// Proportional IFR in quantile form: for `r < p` and every `x = Q(s)`,
/// `F̄((1+x)Q(p)) / F̄((1+x)Q(r)) ≤ (1 − p)/(1 − r)`.
pub fn check_proportional_ifr(x: &QuantileModel, grid_size: usize, tol: f64) -> Result<Verdict> {
    let grid = chebyshev_unit(grid_size);
    let q: Vec<f64> = grid.iter().map(|&u| x.quantile(u)).collect();
    let n = grid.len();
    let mut worst = WorstViolation::new();
    let mut row = vec![0.0; n];
    for (si, &s) in grid.iter().enumerate() {
        for k in 0..n {
            row[k] = x.survival((1.0 + q[si]) * q[k]);
        }
        for j in 0..n {
            if row[j] < 1e-250 {
                continue;
            }
            for k in (j + 1)..n {
                let rel = row[k] * (1.0 - grid[j]) / (row[j] * (1.0 - grid[k])) - 1.0;
                if rel > tol {
                    worst.offer(&[s, grid[k], grid[j]], "survival ratio <= (1-p)/(1-r)", rel);
                }
            }
        }
    }
    Ok(worst.verdict("pifr", grid_size, tol))
}

/// A one-sample class check (aging class or monotonicity characterization).
pub trait ClassCheck: Send + Sync {
    fn name(&self) -> &'static str;
    fn check(&self, x: &QuantileModel, grid_size: usize, tol: f64) -> Result<Verdict>;
}

struct FnClassCheck {
    name: &'static str,
    run: fn(&QuantileModel, usize, f64) -> Result<Verdict>,
}

impl ClassCheck for FnClassCheck {
    fn name(&self) -> &'static str {
        self.name
    }

    fn check(&self, x: &QuantileModel, grid_size: usize, tol: f64) -> Result<Verdict> {
        (self.run)(x, grid_size, tol)
    }
}

pub fn class_checks() -> Vec<Box<dyn ClassCheck>> {
    let table: [(
        &'static str,
        fn(&QuantileModel, usize, f64) -> Result<Verdict>,
    ); 5] = [
        ("nbu", check_nbu),
        ("ifr", check_ifr),
        ("xtau", check_xtau_decreasing),
        ("pnbu", check_proportional_nbu),
        ("pifr", check_proportional_ifr),
    ];
    table
        .into_iter()
        .map(|(name, run)| Box::new(FnClassCheck { name, run }) as Box<dyn ClassCheck>)
        .collect()
}

pub fn class_check(name: &str) -> Result<Box<dyn ClassCheck>> {
    class_checks()
        .into_iter()
        .find(|c| c.name().eq_ignore_ascii_case(name))
        .ok_or_else(|| Error::UnknownName {
            kind: "class check",
            name: name.to_string(),
        })
}

/// Tolerance for antecedents: they must hold tightly before a consequent is
/// demanded.
pub const ANTECEDENT_TOL: f64 = 1e-9;
/// Tolerance for consequents between unit variables, whose cdfs and
/// quantiles come from tabulated integrals.
pub const CONSEQUENT_TOL: f64 = 1e-6;
const SUITE_GRID: usize = 256;

#[derive(Debug, Clone)]
pub struct Implication {
    pub label: String,
    pub antecedent: Verdict,
    pub consequents: Vec<(String, Verdict)>,
}

impl Implication {
    /// Antecedent holds but some consequent fails.
    pub fn violated(&self) -> bool {
        self.antecedent.holds() && self.consequents.iter().any(|(_, v)| v.fails())
    }
}

#[derive(Debug, Clone)]
pub struct ImplicationReport {
    pub implications: Vec<Implication>,
    /// `X^L ≤st Y^L`, `X^L ≤st Z^L`, `Y^L ≤st Z^L`, each at the tight and the
    /// loose tolerance.
    pub equivalence: Vec<(String, Verdict, Verdict)>,
}

impl ImplicationReport {
    pub fn violations(&self) -> Vec<String> {
        let mut out: Vec<String> = self
            .implications
            .iter()
            .filter(|i| i.violated())
            .flat_map(|i| {
                i.consequents
                    .iter()
                    .filter(|(_, v)| v.fails())
                    .map(move |(name, v)| format!("{} holds but {} fails: {}", i.label, name, v))
            })
            .collect();
        let any_tight = self.equivalence.iter().any(|(_, tight, _)| tight.holds());
        if any_tight {
            for (name, _, loose) in &self.equivalence {
                if loose.fails() {
                    out.push(format!("equivalence broken: {name} fails: {loose}"));
                }
            }
        }
        out
    }
}

/// Runs the order implications between a pair and its unit variables:
/// star ⇒ lr, PS ⇒ hr, RPS ⇒ rh (each for `X^L` vs `Z^L` and `Y^L` vs `Z^L`),
/// and the equivalence of the three st relations among `X^L`, `Y^L`, `Z^L`.
pub fn implication_suite(x: &QuantileModel, y: &QuantileModel) -> Result<ImplicationReport> {
    let xl = lift_xl(x)?.to_model();
    let yl = lift_xl(y)?.to_model();
    let zl = psi_l(x, y)?.to_model();

    let pairs = [
        (OrderRelation::Star, OrderRelation::Lr),
        (OrderRelation::Ps, OrderRelation::Hr),
        (OrderRelation::Rps, OrderRelation::Rh),
    ];
    let mut implications = Vec::new();
    for (ante, cons) in pairs {
        let antecedent = check_order(x, y, ante, DEFAULT_GRID, ANTECEDENT_TOL)?;
        let mut consequents = Vec::new();
        if antecedent.holds() {
            consequents.push((
                format!("X^L <={cons} Z^L"),
                check_order(&xl, &zl, cons, SUITE_GRID, CONSEQUENT_TOL)?,
            ));
            consequents.push((
                format!("Y^L <={cons} Z^L"),
                check_order(&yl, &zl, cons, SUITE_GRID, CONSEQUENT_TOL)?,
            ));
        }
        implications.push(Implication {
            label: format!("X <={ante} Y"),
            antecedent,
            consequents,
        });
    }

    let mut equivalence = Vec::new();
    for (name, a, b) in [
        ("X^L <=st Y^L", &xl, &yl),
        ("X^L <=st Z^L", &xl, &zl),
        ("Y^L <=st Z^L", &yl, &zl),
    ] {
        let tight = check_order(a, b, OrderRelation::St, SUITE_GRID, ANTECEDENT_TOL)?;
        let loose = check_order(a, b, OrderRelation::St, SUITE_GRID, CONSEQUENT_TOL)?;
        equivalence.push((name.to_string(), tight, loose));
    }
    Ok(ImplicationReport {
        implications,
        equivalence,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distributions::{
        BlockPiecewise, Exponential, FrechetType, GeoMaxExp, Lomax, ParetoI, PowerScale, Rayleigh,
        Uniform,
    };

    fn exp(l: f64) -> QuantileModel {
        QuantileModel::new(Exponential::new(l).unwrap())
    }

    #[test]
    fn exponential_rates_are_ordered_in_every_sense() {
        for rel in OrderRelation::ALL {
            let v = check_order(&exp(2.0), &exp(1.0), rel, 128, DEFAULT_TOL).unwrap();
            assert!(v.holds(), "{v}");
        }
    }

    #[test]
    fn reversed_pair_fails_st_with_witness() {
        let v = check_order(&exp(1.0), &exp(2.0), OrderRelation::St, 64, DEFAULT_TOL).unwrap();
        assert!(v.fails());
        let w = v.witness.unwrap();
        assert!(w.violation > v.tolerance);
        assert!(w.location[0] > 0.0 && w.location[0] < 1.0);
    }

    #[test]
    fn proportional_quantiles_are_rps_ordered() {
        let x = QuantileModel::new(PowerScale::new(1.0, 2.0).unwrap());
        let y = QuantileModel::new(PowerScale::new(2.0, 2.0).unwrap());
        let v = check_order(&x, &y, OrderRelation::Rps, 256, DEFAULT_TOL).unwrap();
        assert!(v.holds(), "{v}");
    }

    #[test]
    fn relation_tags_parse() {
        assert_eq!("ps".parse::<OrderRelation>().unwrap(), OrderRelation::Ps);
        assert_eq!("RPS".parse::<OrderRelation>().unwrap(), OrderRelation::Rps);
        assert!("foo".parse::<OrderRelation>().is_err());
    }

    #[test]
    fn lr_needs_densities() {
        let tab =
            crate::distributions::Tabulated::from_pairs(&[(0.1, 0.1), (0.5, 0.7), (0.9, 2.3)])
                .unwrap();
        let t = QuantileModel::new(tab);
        let err = check_order(&t, &exp(1.0), OrderRelation::Lr, 16, DEFAULT_TOL).unwrap_err();
        assert!(matches!(err, Error::MissingDensity(_)));
    }

    #[test]
    fn nbu_examples() {
        assert!(check_nbu(&exp(1.5), 64, DEFAULT_TOL).unwrap().holds());
        let ray = QuantileModel::new(Rayleigh::new(1.0).unwrap());
        assert!(check_nbu(&ray, 64, DEFAULT_TOL).unwrap().holds());
        let pareto = QuantileModel::new(ParetoI::new(1.0, 2.0).unwrap());
        assert!(check_nbu(&pareto, 100, DEFAULT_TOL).unwrap().fails());
    }

    #[test]
    fn ifr_examples() {
        assert!(check_ifr(&exp(1.0), 48, DEFAULT_TOL).unwrap().holds());
        let gm = QuantileModel::new(GeoMaxExp::new(1.0, 0.5).unwrap());
        assert!(check_ifr(&gm, 48, DEFAULT_TOL).unwrap().holds());
        let ray = QuantileModel::new(Rayleigh::new(1.0).unwrap());
        assert!(check_ifr(&ray, 48, DEFAULT_TOL).unwrap().holds());
        let lomax = QuantileModel::new(Lomax::new(2.0, 1.0).unwrap());
        let v = check_ifr(&lomax, 48, DEFAULT_TOL).unwrap();
        assert!(v.fails());
        assert_eq!(v.witness.unwrap().location.len(), 3);
    }

    #[test]
    fn xtau_examples() {
        let fr = QuantileModel::new(FrechetType::new(1.0, 2.0).unwrap());
        assert!(check_xtau_decreasing(&fr, 512, DEFAULT_TOL)
            .unwrap()
            .holds());
        assert!(check_xtau_decreasing(&exp(1.0), 512, DEFAULT_TOL)
            .unwrap()
            .holds());
        let block = QuantileModel::new(BlockPiecewise);
        let v = check_xtau_decreasing(&block, 512, DEFAULT_TOL).unwrap();
        assert!(v.fails());
        let at = v.witness.unwrap().location[0];
        assert!(at > 1.0 && at <= 2.0, "witness at {at}");
    }

    #[test]
    fn exponential_proportional_residuals() {
        // F̄((1+x)Q(p)) = (1−p)^{1+x} exceeds e^{−x}(1−p) once 1−p > 1/e
        let v = check_proportional_nbu(&exp(1.0), 64, DEFAULT_TOL).unwrap();
        assert!(v.fails());
        assert!(v.witness.unwrap().location[0] < 1.0 - (-1.0f64).exp());
        // X̃_p = Exp(1)/Q(p) shrinks as p grows
        assert!(check_proportional_ifr(&exp(1.0), 48, DEFAULT_TOL)
            .unwrap()
            .holds());
        let ray = QuantileModel::new(Rayleigh::new(1.0).unwrap());
        assert!(check_proportional_ifr(&ray, 48, DEFAULT_TOL)
            .unwrap()
            .holds());
    }

    #[test]
    fn class_registry_resolves_names() {
        assert_eq!(class_checks().len(), 5);
        assert_eq!(class_check("IFR").unwrap().name(), "ifr");
        assert!(class_check("nope").is_err());
    }

    #[test]
    fn strictness_detects_ties() {
        let pts = [(0.1, 3.0), (0.2, 2.0), (0.3, 2.0)];
        assert!(strictly_decreasing_verdict("s", "q", &pts, 1e-10).fails());
        let pts = [(0.1, 3.0), (0.2, 2.0), (0.3, 1.0)];
        assert!(strictly_decreasing_verdict("s", "q", &pts, 1e-10).holds());
    }

    #[test]
    fn implication_suite_on_exponentials() {
        let r = implication_suite(&exp(2.0), &exp(1.0)).unwrap();
        assert!(r.implications[0].antecedent.holds());
        assert!(r.violations().is_empty(), "{:?}", r.violations());
    }

    #[test]
    fn implication_suite_on_uniforms() {
        let x = QuantileModel::new(Uniform::new(1.0).unwrap());
        let y = QuantileModel::new(Uniform::new(2.0).unwrap());
        let r = implication_suite(&x, &y).unwrap();
        assert!(r.equivalence.iter().all(|(_, tight, _)| tight.holds()));
        assert!(r.violations().is_empty());
    }
}
