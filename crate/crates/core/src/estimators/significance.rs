//! Quadratic forms `⟨:f†f:⟩ = fᵀ MoM f` and their significance.
//!
//! A form is linear in the click frequencies: `fᵀ MoM f = Σ_k w_k C_k` with
//! `w_k = Σ_{m,m'} f_m f_{m'} binom(k, m+m') / binom(N, m+m')`. Bootstrap
//! replicates therefore only need one dot product per direction.

use super::bootstrap::{resampled_frequencies, std_dev, BootstrapOptions};
use super::moments::{all_pi_moments, pi_weights};
use super::qb::empirical_click_distribution;
use crate::error::{Error, Result};
use crate::histogram::ClickHistogram;
use crate::theory::ClickDistribution;

/// One direction's quadratic form with its bootstrap standard error.
#[derive(Debug, Clone, PartialEq)]
pub struct Significance {
    pub form: f64,
    pub sigma: f64,
    /// `|form| / sigma`; `None` when both vanish within rounding.
    pub ratio: Option<f64>,
    /// Rounding floor of `form`; only `form < −floor` counts as negative.
    pub floor: f64,
}

impl Significance {
    pub fn is_negative(&self) -> bool {
        self.form < -self.floor
    }

    /// Negative and more than `threshold` standard errors below zero.
    pub fn exceeds(&self, threshold: f64) -> bool {
        self.is_negative() && self.ratio.is_some_and(|r| r > threshold)
    }
}

fn check_dimension(n: usize, direction: &[f64]) -> Result<()> {
    let dim = n / 2 + 1;
    if direction.len() != dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            got: direction.len(),
        });
    }
    Ok(())
}

fn form_weights(n: usize, direction: &[f64]) -> Vec<f64> {
    let mut w = vec![0.0; n + 1];
    for (m, fm) in direction.iter().enumerate() {
        for (l, fl) in direction.iter().enumerate() {
            let coeff = fm * fl;
            if coeff != 0.0 {
                w.iter_mut().zip(pi_weights(n, m + l)).for_each(|(acc, x)| *acc += coeff * x);
            }
        }
    }
    w
}

fn rounding_floor(pi: &[f64], direction: &[f64]) -> f64 {
    let mut magnitude = 0.0;
    for (m, fm) in direction.iter().enumerate() {
        for (l, fl) in direction.iter().enumerate() {
            magnitude += (fm * fl * pi[m + l]).abs();
        }
    }
    16.0 * direction.len() as f64 * f64::EPSILON * magnitude
}

/// `Σ_{m,m'} f_m f_{m'} ⟨:π^{m+m'}:⟩`.
pub fn quadratic_form(c_exp: &ClickDistribution, direction: &[f64]) -> Result<f64> {
    check_dimension(c_exp.detectors(), direction)?;
    let pi = all_pi_moments(c_exp);
    let mut form = 0.0;
    for (m, fm) in direction.iter().enumerate() {
        for (l, fl) in direction.iter().enumerate() {
            form += fm * fl * pi[m + l];
        }
    }
    Ok(form)
}

/// Standard error of the form over `windows` multinomial windows, from the
/// exact covariance `(diag C − C Cᵀ)/M`.
pub fn quadratic_form_sigma(c_exp: &ClickDistribution, direction: &[f64], windows: u64) -> Result<f64> {
    check_dimension(c_exp.detectors(), direction)?;
    let w = form_weights(c_exp.detectors(), direction);
    let (first, second) = c_exp
        .probs()
        .iter()
        .zip(&w)
        .fold((0.0, 0.0), |(a, b), (c, w)| (a + c * w, b + c * w * w));
    Ok(((second - first * first).max(0.0) / windows as f64).sqrt())
}

/// Significance of one direction, `Σ = |⟨:f†f:⟩| / σ`, with σ from a window
/// bootstrap.
pub fn significance(hist: &ClickHistogram, direction: &[f64], opts: BootstrapOptions) -> Result<Significance> {
    Ok(significance_all(hist, &[direction.to_vec()], opts)?.remove(0))
}

/// Several directions sharing one set of bootstrap replicates.
pub fn significance_all(
    hist: &ClickHistogram,
    directions: &[Vec<f64>],
    opts: BootstrapOptions,
) -> Result<Vec<Significance>> {
    let c = empirical_click_distribution(hist)?;
    let n = c.detectors();
    for d in directions {
        check_dimension(n, d)?;
    }
    let pi = all_pi_moments(&c);
    let replicates = resampled_frequencies(hist, opts);
    directions
        .iter()
        .map(|d| {
            let form = quadratic_form(&c, d)?;
            let w = form_weights(n, d);
            let values: Vec<f64> = replicates
                .iter()
                .map(|freq| freq.iter().zip(&w).map(|(f, w)| f * w).sum())
                .collect();
            let sigma = std_dev(&values);
            let floor = rounding_floor(&pi, d);
            let ratio = if sigma > 0.0 {
                Some(form.abs() / sigma)
            } else if form.abs() <= floor {
                None
            } else {
                Some(f64::INFINITY)
            };
            Ok(Significance {
                form,
                sigma,
                ratio,
                floor,
            })
        })
        .collect()
}
