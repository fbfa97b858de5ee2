use super::bootstrap::BootstrapOptions;
use super::moments::{moment_matrix, MomentMatrix};
use super::qb::{empirical_click_distribution, qb_estimate, QbResult};
use super::significance::{significance_all, Significance};
use crate::error::{Error, Result};
use crate::histogram::ClickHistogram;

pub const DEFAULT_THRESHOLD: f64 = 5.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VerdictOptions {
    /// Standard errors a witness must clear.
    pub threshold: f64,
    pub bootstrap: BootstrapOptions,
}

impl Default for VerdictOptions {
    fn default() -> Self {
        Self {
            threshold: DEFAULT_THRESHOLD,
            bootstrap: BootstrapOptions::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Nonclassical,
    ClassicalConsistent,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Nonclassical => "NONCLASSICAL",
            Verdict::ClassicalConsistent => "CLASSICAL-CONSISTENT",
        }
    }
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// One eigen-direction of the matrix of moments.
#[derive(Debug, Clone, PartialEq)]
pub struct DirectionReport {
    pub eigenvalue: f64,
    pub direction: Vec<f64>,
    pub significance: Significance,
}

#[derive(Debug, Clone, PartialEq)]
pub struct NonclassicalityReport {
    pub click_distribution: Vec<f64>,
    pub qb: QbResult,
    pub moments: MomentMatrix,
    pub directions: Vec<DirectionReport>,
    pub threshold: f64,
    /// `Q_B + threshold·σ < 0`.
    pub qb_witness: bool,
    /// Some direction is negative by more than `threshold` standard errors.
    pub mom_witness: bool,
    pub verdict: Verdict,
    /// Largest `k` with `M_k > 0`. Below `N` the finite sample cannot show the
    /// full support of the underlying statistics.
    pub max_observed_clicks: usize,
    pub detectors: usize,
}

impl NonclassicalityReport {
    pub fn truncated(&self) -> bool {
        self.max_observed_clicks < self.detectors
    }
}

pub fn nonclassicality_verdict(hist: &ClickHistogram, opts: VerdictOptions) -> Result<NonclassicalityReport> {
    if !(opts.threshold.is_finite() && opts.threshold > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "threshold {} must be a positive number",
            opts.threshold
        )));
    }
    let c = empirical_click_distribution(hist)?;
    let qb = qb_estimate(hist)?;
    let moments = moment_matrix(&c)?;
    let sigs = significance_all(hist, &moments.eigenvectors, opts.bootstrap)?;
    let directions: Vec<DirectionReport> = moments
        .eigenvalues
        .iter()
        .zip(&moments.eigenvectors)
        .zip(sigs)
        .map(|((&eigenvalue, v), significance)| DirectionReport {
            eigenvalue,
            direction: v.clone(),
            significance,
        })
        .collect();

    let qb_witness = qb.value + opts.threshold * qb.sigma < 0.0;
    let mom_witness = directions.iter().any(|d| d.significance.exceeds(opts.threshold));
    let verdict = if qb_witness || mom_witness {
        Verdict::Nonclassical
    } else {
        Verdict::ClassicalConsistent
    };
    Ok(NonclassicalityReport {
        click_distribution: c.probs().to_vec(),
        qb,
        moments,
        directions,
        threshold: opts.threshold,
        qb_witness,
        mom_witness,
        verdict,
        max_observed_clicks: hist.max_observed_clicks(),
        detectors: hist.detectors(),
    })
}
