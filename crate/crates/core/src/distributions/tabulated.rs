use std::io::Read;
use std::path::Path;

use super::{QuantileLaw, Support};
use crate::error::{Error, Result};
use crate::numerics::interp::MonotoneCubic;

const FD_STEP: f64 = 1e-6;

/// A law given by a table of `(u, Q(u))` pairs, interpolated with a monotone
/// cubic and held constant beyond the first and last rows.
#[derive(Debug, Clone)]
pub struct Tabulated {
    curve: MonotoneCubic,
    label: String,
}

impl Tabulated {
    pub fn from_pairs(pairs: &[(f64, f64)]) -> Result<Self> {
        let (us, qs): (Vec<f64>, Vec<f64>) = pairs.iter().copied().unzip();
        if us.iter().any(|&u| !(u > 0.0 && u < 1.0)) {
            return Err(Error::InvalidTable("u values must lie in (0, 1)".into()));
        }
        Ok(Self {
            curve: MonotoneCubic::new(us, qs)?,
            label: format!("tab[{} rows]", pairs.len()),
        })
    }

    /// Reads a two-column `u,Q` CSV with a header row.
    pub fn from_reader(reader: impl Read) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new()
            .trim(csv::Trim::All)
            .from_reader(reader);
        let mut pairs = Vec::new();
        for row in rdr.records() {
            let row = row?;
            if row.len() != 2 {
                return Err(Error::InvalidTable(format!(
                    "expected 2 columns, found {}",
                    row.len()
                )));
            }
            let parse = |s: &str| {
                s.parse::<f64>()
                    .map_err(|_| Error::InvalidTable(format!("not a number: '{s}'")))
            };
            pairs.push((parse(&row[0])?, parse(&row[1])?));
        }
        Self::from_pairs(&pairs)
    }

    pub fn from_csv_path(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let file = std::fs::File::open(path)?;
        let mut t = Self::from_reader(file)?;
        t.label = format!("tab:{}", path.display());
        Ok(t)
    }
}

impl QuantileLaw for Tabulated {
    fn label(&self) -> String {
        self.label.clone()
    }
    fn quantile(&self, u: f64) -> f64 {
        self.curve.eval(u)
    }
    fn quantile_density(&self, u: f64) -> f64 {
        let (lo, hi) = if u - FD_STEP <= 0.0 {
            (u, u + FD_STEP)
        } else if u + FD_STEP >= 1.0 {
            (u - FD_STEP, u)
        } else {
            (u - FD_STEP, u + FD_STEP)
        };
        (self.curve.eval(hi) - self.curve.eval(lo)) / (hi - lo)
    }
    fn cdf(&self, x: f64) -> f64 {
        let values = self.curve.values();
        if x < values[0] {
            return 0.0;
        }
        if x >= values[values.len() - 1] {
            return 1.0;
        }
        // largest u with Q(u) <= x
        let knots = self.curve.knots();
        let j = values.partition_point(|&v| v <= x);
        let (mut lo, mut hi) = (knots[j - 1], knots[j]);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.curve.eval(mid) <= x {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }
    fn pdf(&self, _x: f64) -> Option<f64> {
        None
    }
    fn support(&self) -> Support {
        let v = self.curve.values();
        let (lo, hi) = (v[0], v[v.len() - 1]);
        Support::new(
            lo,
            if hi > lo {
                hi
            } else {
                lo + f64::MIN_POSITIVE.max(lo.abs() * 1e-15)
            },
        )
    }
}
