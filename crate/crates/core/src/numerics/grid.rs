//! Evaluation grids shared by the checkers and the CLI.

/// `n` points in (0, 1) at Chebyshev nodes, clustered at both ends.
pub fn chebyshev_unit(n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| {
            let theta = std::f64::consts::PI * (i as f64 + 0.5) / n as f64;
            0.5 * (1.0 - theta.cos())
        })
        .collect()
}

/// `n` equally spaced interior points `i/(n+1)`.
pub fn uniform_open(n: usize) -> Vec<f64> {
    (1..=n).map(|i| i as f64 / (n + 1) as f64).collect()
}

/// `n ≥ 2` log-spaced points on `[lo, hi]`, `0 < lo < hi`.
pub fn log_spaced(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let (a, b) = (lo.ln(), hi.ln());
    (0..n)
        .map(|i| (a + (b - a) * i as f64 / (n - 1) as f64).exp())
        .collect()
}
