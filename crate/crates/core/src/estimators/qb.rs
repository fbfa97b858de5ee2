use super::bootstrap::{resampled_frequencies, std_dev, BootstrapOptions};
use crate::error::{Error, Result};
use crate::histogram::ClickHistogram;
use crate::theory::{qb_of, ClickDistribution};

/// How the standard error of `Q_B` is obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SigmaMethod {
    /// First-order propagation of the multinomial covariance of `C^exp`.
    DeltaMethod,
    /// Standard deviation over window-bootstrap replicates.
    Bootstrap(BootstrapOptions),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QbResult {
    pub value: f64,
    pub sigma: f64,
    pub n_windows: u64,
    pub mean_clicks: f64,
    pub method: SigmaMethod,
}

/// Relative frequencies `C_k^exp = M_k / M`.
pub fn empirical_click_distribution(hist: &ClickHistogram) -> Result<ClickDistribution> {
    if hist.total() == 0 {
        return Err(Error::EmptyHistogram);
    }
    let total = hist.total() as f64;
    ClickDistribution::new(hist.counts().iter().map(|&m| m as f64 / total).collect())
}

/// `Q_B` of the empirical distribution with a delta-method standard error.
pub fn qb_estimate(hist: &ClickHistogram) -> Result<QbResult> {
    qb_estimate_with(hist, SigmaMethod::DeltaMethod)
}

pub fn qb_estimate_with(hist: &ClickHistogram, method: SigmaMethod) -> Result<QbResult> {
    let c = empirical_click_distribution(hist)?;
    let value = qb_of(&c)?;
    let sigma = match method {
        SigmaMethod::DeltaMethod => qb_delta_sigma(&c, hist.total()),
        SigmaMethod::Bootstrap(opts) => {
            let values: Vec<f64> = resampled_frequencies(hist, opts)
                .into_iter()
                .filter_map(|probs| ClickDistribution::new(probs).ok())
                .filter_map(|c| qb_of(&c).ok())
                .collect();
            if values.len() < 2 {
                return Err(Error::DegenerateMean {
                    mean: c.mean(),
                    detectors: c.detectors(),
                });
            }
            std_dev(&values)
        }
    };
    Ok(QbResult {
        value,
        sigma,
        n_windows: hist.total(),
        mean_clicks: c.mean(),
        method,
    })
}

/// Delta-method standard error of `Q_B` for `windows` multinomial windows.
///
/// With `g_k = ∂Q_B/∂C_k` and `Cov(Ĉ) = (diag C − C Cᵀ)/M`, the variance is
/// `(Σ C_k g_k² − (Σ C_k g_k)²)/M`.
pub fn qb_delta_sigma(c: &ClickDistribution, windows: u64) -> f64 {
    let n = c.detectors() as f64;
    let mean = c.mean();
    let var = c.variance();
    let denom = mean * (n - mean);
    let grad = |k: f64| {
        let d_var = k * k - 2.0 * mean * k;
        let d_denom = k * (n - 2.0 * mean);
        n * (d_var * denom - var * d_denom) / (denom * denom)
    };
    let (first, second) = c
        .probs()
        .iter()
        .enumerate()
        .fold((0.0, 0.0), |(s1, s2), (k, &p)| {
            let g = grad(k as f64);
            (s1 + p * g, s2 + p * g * g)
        });
    ((second - first * first).max(0.0) / windows as f64).sqrt()
}
