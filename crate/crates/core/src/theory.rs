//! Exact click-counting statistics of an array of on-off detectors.
//!
//! With `Ê = :exp[−(η n̂ + ν)/N]:` the single-detector no-click operator and
//! `π̂ = 1 − Ê`, the moments are
//!
//! ```text
//! ⟨:π̂^m:⟩ = Σ_l C(m,l) (−1)^l e^{−lν/N} ⟨:e^{−(lη/N) n̂}:⟩
//! C_k     = C(N,k) Σ_j C(N−k,j) (−1)^j ⟨:π̂^{k+j}:⟩
//! ```
//!
//! Both alternating sums are evaluated in double-double arithmetic with exact
//! binomial coefficients, and the residual rounding error of every `C_k` is
//! bounded before the result is returned.

use crate::error::{Error, Result};
use crate::numeric::{binomial, DoubleDouble, DD_EPSILON, MAX_EXACT_N};
use crate::state::PhotonNumberDistribution;

/// Tolerance for `|Σ q_i − 1|` and for deciding a weight vector is uniform.
pub const WEIGHT_TOLERANCE: f64 = 1e-12;
/// Largest tolerated rounding-error bound on a single analytic `C_k`.
pub const CANCELLATION_TOLERANCE: f64 = 1e-12;
/// `C_k` may dip this far below zero through roundoff.
pub const NEGATIVE_PROBABILITY_TOLERANCE: f64 = 1e-10;
/// Tolerance on `Σ C_k = 1`.
pub const CLICK_NORMALIZATION_TOLERANCE: f64 = 1e-9;
/// `⟨k⟩` closer than this to 0 or N makes Q_B undefined.
pub const DEGENERATE_MEAN_TOLERANCE: f64 = 1e-15;

/// N on-off detectors with quantum efficiency η, total dark-count parameter
/// ν per window (ν/N per channel) and the fraction of input intensity routed
/// to each channel.
#[derive(Debug, Clone, PartialEq)]
pub struct DetectorArrayConfig {
    eta: f64,
    nu: f64,
    weights: Vec<f64>,
}

impl DetectorArrayConfig {
    pub fn uniform(detectors: usize, eta: f64, nu: f64) -> Result<Self> {
        if detectors == 0 {
            return Err(Error::InvalidConfig("at least one detector is required".into()));
        }
        Self::with_weights(vec![1.0 / detectors as f64; detectors], eta, nu)
    }

    /// `N = 2^stages` detectors behind a balanced splitter cascade.
    pub fn from_stages(stages: u32, eta: f64, nu: f64) -> Result<Self> {
        if stages > 6 {
            return Err(Error::InvalidConfig(format!(
                "{stages} stages exceed the {MAX_EXACT_N}-detector limit"
            )));
        }
        Self::uniform(1 << stages, eta, nu)
    }

    pub fn with_weights(weights: Vec<f64>, eta: f64, nu: f64) -> Result<Self> {
        let n = weights.len();
        if n == 0 || n > MAX_EXACT_N {
            return Err(Error::InvalidConfig(format!(
                "detector count {n} outside 1..={MAX_EXACT_N}"
            )));
        }
        if !(0.0..=1.0).contains(&eta) {
            return Err(Error::InvalidConfig(format!("efficiency {eta} outside [0, 1]")));
        }
        if !(nu.is_finite() && nu >= 0.0) {
            return Err(Error::InvalidConfig(format!("dark-count parameter {nu} must be >= 0")));
        }
        if weights.iter().any(|q| !q.is_finite() || *q < 0.0) {
            return Err(Error::InvalidConfig("channel weights must be >= 0".into()));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > WEIGHT_TOLERANCE {
            return Err(Error::InvalidConfig(format!("channel weights sum to {total}, not 1")));
        }
        Ok(Self { eta, nu, weights })
    }

    pub fn detectors(&self) -> usize {
        self.weights.len()
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }

    pub fn nu(&self) -> f64 {
        self.nu
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn is_uniform(&self) -> bool {
        let q = 1.0 / self.detectors() as f64;
        self.weights.iter().all(|w| (w - q).abs() <= WEIGHT_TOLERANCE)
    }

    /// Same array with a different efficiency (e.g. after attenuation).
    pub fn with_eta(&self, eta: f64) -> Result<Self> {
        Self::with_weights(self.weights.clone(), eta, self.nu)
    }

    /// Per-channel dark-click probability `1 − e^{−ν/N}`.
    pub fn dark_click_probability(&self) -> f64 {
        -(-self.nu / self.detectors() as f64).exp_m1()
    }

    fn require_uniform(&self) -> Result<()> {
        if self.is_uniform() {
            Ok(())
        } else {
            Err(Error::NonUniformWeightsUnsupported)
        }
    }
}

/// Probabilities `C_k` that exactly `k` of `N` detectors click, `k = 0..=N`.
#[derive(Debug, Clone, PartialEq)]
pub struct ClickDistribution {
    probs: Vec<f64>,
}

impl ClickDistribution {
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        if probs.len() < 2 {
            return Err(Error::InvalidDistribution(
                "click distribution needs entries for k = 0..=N with N >= 1".into(),
            ));
        }
        if let Some((k, c)) = probs
            .iter()
            .enumerate()
            .find(|(_, c)| !c.is_finite() || **c < -NEGATIVE_PROBABILITY_TOLERANCE)
        {
            return Err(Error::InvalidDistribution(format!("C_{k} = {c} is not a probability")));
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > CLICK_NORMALIZATION_TOLERANCE {
            return Err(Error::InvalidDistribution(format!("C_k sum to {total}, not 1")));
        }
        Ok(Self { probs })
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn detectors(&self) -> usize {
        self.probs.len() - 1
    }

    /// `⟨k⟩ = Σ k C_k`.
    pub fn mean(&self) -> f64 {
        self.probs.iter().enumerate().map(|(k, c)| k as f64 * c).sum()
    }

    /// `⟨(Δk)²⟩`, accumulated about the mean to avoid `⟨k²⟩ − ⟨k⟩²` cancellation.
    pub fn variance(&self) -> f64 {
        let mean = self.mean();
        self.probs
            .iter()
            .enumerate()
            .map(|(k, c)| {
                let d = k as f64 - mean;
                c * d * d
            })
            .sum()
    }
}

/// `e^{−lν/N} ⟨:e^{−(lη/N) n̂}:⟩` for `l = 0..=max_order`.
fn no_click_moments(
    pnd: &PhotonNumberDistribution,
    cfg: &DetectorArrayConfig,
    max_order: usize,
) -> Vec<DoubleDouble> {
    let n = cfg.detectors() as f64;
    let step = cfg.eta / n;
    let dark = DoubleDouble::from_f64((-cfg.nu / n).exp());
    let mut dark_pow = DoubleDouble::ONE;
    (0..=max_order)
        .map(|l| {
            // y = 1 − l·(η/N), formed exactly so every order sees the same η.
            // l = 0 is the normalization, 1 by construction of the state.
            let y = DoubleDouble::ONE - DoubleDouble::product(l as f64, step);
            let value = if l == 0 {
                DoubleDouble::ONE
            } else {
                dark_pow * pnd.generating_function(y)
            };
            dark_pow = dark_pow * dark;
            value
        })
        .collect()
}

/// `⟨:π̂^m:⟩` for every `m` in `0..=max_order`, plus `Σ_l C(m,l)|E_l|` bounds.
fn pi_moments(no_click: &[DoubleDouble], max_order: usize) -> (Vec<DoubleDouble>, Vec<f64>) {
    (0..=max_order)
        .map(|m| {
            let mut acc = DoubleDouble::ZERO;
            let mut magnitude = 0.0;
            for (l, e) in no_click.iter().enumerate().take(m + 1) {
                let term = DoubleDouble::from_u128(binomial(m, l)) * *e;
                acc = if l % 2 == 0 { acc + term } else { acc - term };
                magnitude += term.abs().to_f64();
            }
            (acc, magnitude)
        })
        .unzip()
}

/// Normally ordered click-projector moment `⟨:π̂^m:⟩`.
pub fn pi_moment(pnd: &PhotonNumberDistribution, cfg: &DetectorArrayConfig, m: usize) -> Result<f64> {
    cfg.require_uniform()?;
    if m > cfg.detectors() {
        return Err(Error::OrderOutOfRange {
            order: m,
            detectors: cfg.detectors(),
        });
    }
    let no_click = no_click_moments(pnd, cfg, m);
    let (moments, _) = pi_moments(&no_click, m);
    Ok(moments[m].to_f64())
}

/// Exact `C_k` for an arbitrary photon-number input on a uniform array.
pub fn click_distribution(
    pnd: &PhotonNumberDistribution,
    cfg: &DetectorArrayConfig,
) -> Result<ClickDistribution> {
    cfg.require_uniform()?;
    let n = cfg.detectors();
    let no_click = no_click_moments(pnd, cfg, n);
    let (moments, magnitudes) = pi_moments(&no_click, n);

    let mut probs = Vec::with_capacity(n + 1);
    for k in 0..=n {
        let outer = DoubleDouble::from_u128(binomial(n, k));
        let mut acc = DoubleDouble::ZERO;
        let mut bound = 0.0;
        for j in 0..=(n - k) {
            let coef = DoubleDouble::from_u128(binomial(n - k, j));
            let term = coef * moments[k + j];
            acc = if j % 2 == 0 { acc + term } else { acc - term };
            bound += coef.to_f64() * magnitudes[k + j];
        }
        let value = (outer * acc).to_f64();
        // Every term carries a relative DD rounding error; (N + 2) covers the
        // two accumulation depths.
        let error = outer.to_f64() * bound * DD_EPSILON * (n as f64 + 2.0);
        if !value.is_finite() || error > CANCELLATION_TOLERANCE {
            return Err(Error::NumericalInstability { k, error });
        }
        probs.push(value);
    }
    let total: f64 = probs.iter().sum();
    ClickDistribution::new(probs).map_err(|_| Error::NumericalInstability {
        k: n,
        error: (total - 1.0).abs(),
    })
}

/// Click statistics of a coherent state of mean photon number `mean_photons`.
///
/// Every channel sees an independent coherent state, so the channel clicks
/// are independent Bernoulli trials with `p_i = 1 − e^{−(η μ q_i + ν/N)}`:
/// binomial for a uniform array, Poisson-binomial otherwise.
pub fn coherent_click_distribution(cfg: &DetectorArrayConfig, mean_photons: f64) -> Result<ClickDistribution> {
    if !(mean_photons.is_finite() && mean_photons >= 0.0) {
        return Err(Error::InvalidMean(mean_photons));
    }
    let n = cfg.detectors();
    if cfg.is_uniform() {
        let exponent = (cfg.eta * mean_photons + cfg.nu) / n as f64;
        let p = -(-exponent).exp_m1();
        let q = (-exponent).exp();
        let probs = (0..=n)
            .map(|k| binomial(n, k) as f64 * p.powi(k as i32) * q.powi((n - k) as i32))
            .collect();
        ClickDistribution::new(probs)
    } else {
        ClickDistribution::new(poisson_binomial(&coherent_channel_probabilities(cfg, mean_photons)))
    }
}

/// Per-channel click probabilities for a coherent input.
pub fn coherent_channel_probabilities(cfg: &DetectorArrayConfig, mean_photons: f64) -> Vec<f64> {
    let dark = cfg.nu / cfg.detectors() as f64;
    cfg.weights
        .iter()
        .map(|q| -(-(cfg.eta * mean_photons * q + dark)).exp_m1())
        .collect()
}

/// Distribution of the number of successes among independent Bernoulli
/// trials, by exact dynamic-programming convolution.
pub fn poisson_binomial(success: &[f64]) -> Vec<f64> {
    let mut dist = vec![0.0; success.len() + 1];
    dist[0] = 1.0;
    for (i, &p) in success.iter().enumerate() {
        for k in (0..=i + 1).rev() {
            let stay = dist[k] * (1.0 - p);
            let step = if k > 0 { dist[k - 1] * p } else { 0.0 };
            dist[k] = stay + step;
        }
    }
    dist
}

/// Binomial-character parameter
/// `Q_B = N ⟨(Δk)²⟩ / (⟨k⟩ (N − ⟨k⟩)) − 1`.
///
/// Positive for super-binomial, zero for binomial and negative for
/// sub-binomial click statistics.
pub fn qb_of(distribution: &ClickDistribution) -> Result<f64> {
    let n = distribution.detectors();
    if n < 2 {
        return Err(Error::TooFewDetectors(n));
    }
    let mean = distribution.mean();
    // N − ⟨k⟩ = Σ (N − k) C_k keeps its digits when ⟨k⟩ is close to N.
    let complement: f64 = distribution
        .probs()
        .iter()
        .enumerate()
        .map(|(k, c)| (n - k) as f64 * c)
        .sum();
    if mean.abs() <= DEGENERATE_MEAN_TOLERANCE || complement.abs() <= DEGENERATE_MEAN_TOLERANCE {
        return Err(Error::DegenerateMean { mean, detectors: n });
    }
    Ok(n as f64 * distribution.variance() / (mean * complement) - 1.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(n: usize, eta: f64, nu: f64) -> DetectorArrayConfig {
        DetectorArrayConfig::uniform(n, eta, nu).unwrap()
    }

    #[test]
    fn config_validation() {
        assert!(DetectorArrayConfig::uniform(0, 1.0, 0.0).is_err());
        assert!(DetectorArrayConfig::uniform(65, 1.0, 0.0).is_err());
        assert!(DetectorArrayConfig::uniform(8, 1.1, 0.0).is_err());
        assert!(DetectorArrayConfig::uniform(8, 0.5, -0.1).is_err());
        assert!(DetectorArrayConfig::with_weights(vec![0.5, 0.6], 1.0, 0.0).is_err());
        assert_eq!(DetectorArrayConfig::from_stages(3, 1.0, 0.0).unwrap().detectors(), 8);
        assert!(!DetectorArrayConfig::with_weights(vec![0.7, 0.3], 1.0, 0.0)
            .unwrap()
            .is_uniform());
    }

    #[test]
    fn pi_moment_examples() {
        let c = cfg(8, 0.7, 0.05);
        let thermal = PhotonNumberDistribution::thermal_auto(1.3).unwrap();
        assert_eq!(pi_moment(&thermal, &c, 0).unwrap(), 1.0);

        let mu = 2.0;
        let coherent = PhotonNumberDistribution::coherent_auto(mu).unwrap();
        let p = 1.0 - (-(0.7 * mu + 0.05) / 8.0f64).exp();
        for m in 0..=8 {
            let got = pi_moment(&coherent, &c, m).unwrap();
            assert!((got - p.powi(m as i32)).abs() < 1e-13, "m={m}");
        }

        let fock = PhotonNumberDistribution::fock(1, 1).unwrap();
        assert_eq!(pi_moment(&fock, &cfg(8, 1.0, 0.0), 2).unwrap(), 0.0);
        assert!(pi_moment(&fock, &cfg(8, 1.0, 0.0), 9).is_err());

        let skewed = DetectorArrayConfig::with_weights(vec![0.7, 0.3], 1.0, 0.0).unwrap();
        assert!(matches!(
            pi_moment(&fock, &skewed, 1),
            Err(Error::NonUniformWeightsUnsupported)
        ));
    }

    #[test]
    fn click_distribution_examples() {
        let vac = PhotonNumberDistribution::fock(0, 3).unwrap();
        let c = click_distribution(&vac, &cfg(8, 1.0, 0.0)).unwrap();
        assert_eq!(c.probs()[0], 1.0);
        assert!(c.probs()[1..].iter().all(|&x| x == 0.0));

        let one = PhotonNumberDistribution::fock(1, 1).unwrap();
        let c = click_distribution(&one, &cfg(8, 1.0, 0.0)).unwrap();
        for (k, &x) in c.probs().iter().enumerate() {
            let expected = if k == 1 { 1.0 } else { 0.0 };
            assert!((x - expected).abs() < 1e-15, "C_{k} = {x}");
        }

        // p = 1/2 gives C_k = C(8,k)/256.
        let mu = 8.0 * std::f64::consts::LN_2;
        let coherent = PhotonNumberDistribution::coherent_auto(mu).unwrap();
        let c = click_distribution(&coherent, &cfg(8, 1.0, 0.0)).unwrap();
        assert!((c.probs()[4] - 70.0 / 256.0).abs() < 1e-12);
        for k in 0..=8 {
            assert!((c.probs()[k] - binomial(8, k) as f64 / 256.0).abs() < 1e-12);
        }
    }

    #[test]
    fn large_arrays_report_instability() {
        let thermal = PhotonNumberDistribution::thermal_auto(3.0).unwrap();
        let err = click_distribution(&thermal, &cfg(64, 0.9, 0.1)).unwrap_err();
        assert!(matches!(err, Error::NumericalInstability { .. }), "{err}");
        assert!(click_distribution(&thermal, &cfg(16, 0.9, 0.1)).is_ok());
    }

    #[test]
    fn coherent_closed_form_examples() {
        let c8 = cfg(8, 1.0, 0.0);
        let c = coherent_click_distribution(&c8, 0.0).unwrap();
        assert_eq!(c.probs()[0], 1.0);
        assert!(coherent_click_distribution(&c8, -1.0).is_err());

        let c = cfg(8, 0.6, 0.01);
        let mu = 1.7;
        let d = coherent_click_distribution(&c, mu).unwrap();
        let p = 1.0 - (-(0.6 * mu + 0.01) / 8.0f64).exp();
        assert!((d.mean() - 8.0 * p).abs() < 1e-13);
        assert!((d.variance() - 8.0 * p * (1.0 - p)).abs() < 1e-13);

        let mut weights = vec![0.0; 8];
        weights[0] = 1.0;
        let skew = DetectorArrayConfig::with_weights(weights, 0.8, 0.2).unwrap();
        let d = coherent_click_distribution(&skew, 1.5).unwrap();
        let p1 = 1.0 - (-(0.8 * 1.5 + 0.2 / 8.0f64)).exp();
        let pd = 1.0 - (-0.2 / 8.0f64).exp();
        // Channel 0 plus seven dark-only channels.
        let mut expected = poisson_binomial(&[pd; 7]);
        expected.push(0.0);
        let expected: Vec<f64> = (0..=8)
            .map(|k| expected[k] * (1.0 - p1) + if k > 0 { expected[k - 1] * p1 } else { 0.0 })
            .collect();
        for k in 0..=8 {
            assert!((d.probs()[k] - expected[k]).abs() < 1e-15);
        }

        let no_dark = DetectorArrayConfig::with_weights(
            {
                let mut w = vec![0.0; 8];
                w[0] = 1.0;
                w
            },
            0.8,
            0.0,
        )
        .unwrap();
        let d = coherent_click_distribution(&no_dark, 1.5).unwrap();
        let p1 = 1.0 - (-(0.8 * 1.5f64)).exp();
        assert!((d.probs()[0] - (1.0 - p1)).abs() < 1e-15);
        assert!((d.probs()[1] - p1).abs() < 1e-15);
        assert!(d.probs()[2..].iter().all(|&x| x == 0.0));
    }

    #[test]
    fn poisson_binomial_uniform_reproduces_binomial() {
        for n in [1usize, 2, 5, 8, 16, 33] {
            for p in [0.0, 0.013, 0.3, 0.5, 0.97, 1.0] {
                let pb = poisson_binomial(&vec![p; n]);
                for (k, &x) in pb.iter().enumerate() {
                    let b = binomial(n, k) as f64 * p.powi(k as i32) * (1.0 - p).powi((n - k) as i32);
                    assert!((x - b).abs() <= 1e-12, "n={n} p={p} k={k}");
                }
            }
        }
    }

    #[test]
    fn qb_examples_and_errors() {
        let d = coherent_click_distribution(&cfg(8, 0.5, 0.1), 3.0).unwrap();
        assert!(qb_of(&d).unwrap().abs() < 1e-12);

        let one = PhotonNumberDistribution::fock(1, 1).unwrap();
        let d = click_distribution(&one, &cfg(8, 1.0, 0.0)).unwrap();
        assert_eq!(qb_of(&d).unwrap(), -1.0);

        let thermal = PhotonNumberDistribution::thermal_auto(2.0).unwrap();
        let d = click_distribution(&thermal, &cfg(8, 0.8, 0.0)).unwrap();
        assert!(qb_of(&d).unwrap() > 0.0);

        let single = ClickDistribution::new(vec![0.5, 0.5]).unwrap();
        assert!(matches!(qb_of(&single), Err(Error::TooFewDetectors(1))));
        let zero = ClickDistribution::new(vec![1.0, 0.0, 0.0]).unwrap();
        assert!(matches!(qb_of(&zero), Err(Error::DegenerateMean { .. })));
        let full = ClickDistribution::new(vec![0.0, 0.0, 1.0]).unwrap();
        assert!(matches!(qb_of(&full), Err(Error::DegenerateMean { .. })));
    }

    #[test]
    fn fock_one_closed_form_two_ways() {
        let one = PhotonNumberDistribution::fock(1, 1).unwrap();
        for n in [2usize, 4, 8, 16] {
            for eta in [0.1, 0.35, 0.5, 0.9, 1.0] {
                let c = cfg(n, eta, 0.0);
                let direct = qb_of(&click_distribution(&one, &c).unwrap()).unwrap();
                let pi1 = pi_moment(&one, &c, 1).unwrap();
                let pi2 = pi_moment(&one, &c, 2).unwrap();
                let via_moments = (n as f64 - 1.0) * (pi2 - pi1 * pi1) / (pi1 * (1.0 - pi1));
                let closed = -eta * (n as f64 - 1.0) / (n as f64 - eta);
                assert!((direct - closed).abs() < 1e-12);
                assert!((via_moments - closed).abs() < 1e-12);
            }
        }
    }
}
