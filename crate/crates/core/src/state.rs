//! Input light described by its photon-number distribution.

use crate::error::{Error, Result};
use crate::numeric::DoubleDouble;

/// Maximum probability a coherent constructor may discard by truncation.
pub const COHERENT_TAIL_LIMIT: f64 = 1e-12;
/// Maximum probability a thermal constructor may discard by truncation.
pub const THERMAL_TAIL_LIMIT: f64 = 1e-9;
/// Tolerance on `sum(probs) == 1` for every distribution.
pub const NORMALIZATION_TOLERANCE: f64 = 1e-12;

/// Counting statistics `P(n)` of the input field over `n = 0..=n_max`.
///
/// Immutable once built; all constructors validate non-negativity and
/// normalization.
#[derive(Debug, Clone, PartialEq)]
pub struct PhotonNumberDistribution {
    probs: Vec<f64>,
    label: String,
}

impl PhotonNumberDistribution {
    /// Poissonian statistics of a coherent state with `mean_photons = |α|²`,
    /// renormalized over `0..=n_max`.
    pub fn coherent(mean_photons: f64, n_max: usize) -> Result<Self> {
        check_mean(mean_photons)?;
        if mean_photons == 0.0 {
            return Ok(Self::point_mass(0, n_max, "coherent"));
        }
        let ln_mu = mean_photons.ln();
        let ln_term = |n: usize, prev: f64| prev + ln_mu - (n as f64).ln();

        let mut probs = Vec::with_capacity(n_max + 1);
        let mut ln_p = -mean_photons;
        probs.push(ln_p.exp());
        for n in 1..=n_max {
            ln_p = ln_term(n, ln_p);
            probs.push(ln_p.exp());
        }

        // Sum the discarded tail directly; 1 - sum(head) would cancel.
        let mut tail = 0.0;
        let mut n = n_max;
        loop {
            n += 1;
            ln_p = ln_term(n, ln_p);
            let term = ln_p.exp();
            tail += term;
            if n as f64 > mean_photons && (term <= tail * 1e-18 || term < 1e-300) {
                break;
            }
        }
        if tail > COHERENT_TAIL_LIMIT {
            return Err(Error::TailMassTooLarge {
                n_max,
                tail,
                limit: COHERENT_TAIL_LIMIT,
            });
        }
        Ok(Self::renormalized(probs, "coherent"))
    }

    /// Coherent state with the smallest cutoff that passes the tail check.
    pub fn coherent_auto(mean_photons: f64) -> Result<Self> {
        check_mean(mean_photons)?;
        Self::coherent(mean_photons, poisson_cutoff(mean_photons))
    }

    /// Photon-number eigenstate `|n⟩`.
    pub fn fock(n: usize, n_max: usize) -> Result<Self> {
        if n > n_max {
            return Err(Error::IndexOutOfRange { n, n_max });
        }
        Ok(Self::point_mass(n, n_max, "fock"))
    }

    /// Bose-Einstein (geometric) statistics `μⁿ/(1+μ)ⁿ⁺¹`.
    pub fn thermal(mean_photons: f64, n_max: usize) -> Result<Self> {
        check_mean(mean_photons)?;
        if mean_photons == 0.0 {
            return Ok(Self::point_mass(0, n_max, "thermal"));
        }
        let ratio = mean_photons / (1.0 + mean_photons);
        let tail = ratio.powf(n_max as f64 + 1.0);
        if tail > THERMAL_TAIL_LIMIT {
            return Err(Error::TailMassTooLarge {
                n_max,
                tail,
                limit: THERMAL_TAIL_LIMIT,
            });
        }
        let p0 = 1.0 / (1.0 + mean_photons);
        let probs = (0..=n_max).map(|n| p0 * ratio.powi(n as i32)).collect();
        Ok(Self::renormalized(probs, "thermal"))
    }

    pub fn thermal_auto(mean_photons: f64) -> Result<Self> {
        check_mean(mean_photons)?;
        let n_max = if mean_photons == 0.0 {
            0
        } else {
            let ratio = mean_photons / (1.0 + mean_photons);
            // Leave a factor 10 of headroom below the tail limit.
            ((THERMAL_TAIL_LIMIT / 10.0).ln() / ratio.ln()).ceil() as usize
        };
        Self::thermal(mean_photons, n_max)
    }

    /// Arbitrary probability vector; must already be normalized.
    pub fn custom(probs: Vec<f64>, label: impl Into<String>) -> Result<Self> {
        if probs.is_empty() {
            return Err(Error::InvalidDistribution("empty probability vector".into()));
        }
        if let Some((n, p)) = probs
            .iter()
            .enumerate()
            .find(|(_, p)| !p.is_finite() || **p < 0.0)
        {
            return Err(Error::InvalidDistribution(format!("P({n}) = {p} is not a probability")));
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > NORMALIZATION_TOLERANCE {
            return Err(Error::InvalidDistribution(format!(
                "probabilities sum to {total}, not 1"
            )));
        }
        Ok(Self {
            probs,
            label: label.into(),
        })
    }

    /// Convex combination `Σ w_i ρ_i` of photon-number distributions.
    pub fn mixture(components: &[(f64, &PhotonNumberDistribution)]) -> Result<Self> {
        if components.is_empty() {
            return Err(Error::InvalidDistribution("empty mixture".into()));
        }
        let weight_sum: f64 = components.iter().map(|(w, _)| w).sum();
        if components.iter().any(|(w, _)| !w.is_finite() || *w < 0.0)
            || (weight_sum - 1.0).abs() > NORMALIZATION_TOLERANCE
        {
            return Err(Error::InvalidDistribution(
                "mixture weights must be non-negative and sum to 1".into(),
            ));
        }
        let len = components.iter().map(|(_, d)| d.probs.len()).max().unwrap_or(1);
        let mut probs = vec![0.0; len];
        for (w, dist) in components {
            for (acc, p) in probs.iter_mut().zip(&dist.probs) {
                *acc += w * p;
            }
        }
        Self::custom(probs, "mixture")
    }

    fn point_mass(n: usize, n_max: usize, label: &str) -> Self {
        let mut probs = vec![0.0; n_max + 1];
        probs[n] = 1.0;
        Self {
            probs,
            label: label.into(),
        }
    }

    fn renormalized(mut probs: Vec<f64>, label: &str) -> Self {
        let total: f64 = probs.iter().sum();
        probs.iter_mut().for_each(|p| *p /= total);
        Self {
            probs,
            label: label.into(),
        }
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn n_max(&self) -> usize {
        self.probs.len() - 1
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn mean(&self) -> f64 {
        self.probs.iter().enumerate().map(|(n, p)| n as f64 * p).sum()
    }

    /// `⟨:exp(−x n̂):⟩ = Σ_n P(n) (1 − x)ⁿ`.
    ///
    /// Any real `x` is accepted; for `x > 1` the terms alternate in sign.
    pub fn normally_ordered_exp_moment(&self, x: f64) -> f64 {
        let y = DoubleDouble::ONE - DoubleDouble::from_f64(x);
        self.generating_function(y).to_f64()
    }

    /// Probability generating function `Σ_n P(n) yⁿ` by Horner's rule in
    /// double-double arithmetic.
    pub(crate) fn generating_function(&self, y: DoubleDouble) -> DoubleDouble {
        self.probs
            .iter()
            .rev()
            .fold(DoubleDouble::ZERO, |acc, &p| acc * y + DoubleDouble::from_f64(p))
    }
}

fn check_mean(mean: f64) -> Result<()> {
    if mean.is_finite() && mean >= 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidMean(mean))
    }
}

/// Smallest `n_max` whose Poisson tail is below a tenth of the coherent limit.
pub fn poisson_cutoff(mean: f64) -> usize {
    if mean <= 0.0 {
        return 0;
    }
    let target = COHERENT_TAIL_LIMIT / 10.0;
    // Walk the pmf until the remaining tail (bounded by a geometric series
    // past the mode) drops below the target.
    let mut ln_p = -mean;
    let mut n = 0usize;
    loop {
        n += 1;
        ln_p += mean.ln() - (n as f64).ln();
        let ratio = mean / (n as f64 + 1.0);
        if ratio < 1.0 {
            let tail_bound = ln_p.exp() * ratio / (1.0 - ratio);
            if tail_bound < target {
                return n;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn approx(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn coherent_vacuum_and_poisson_masses() {
        let vac = PhotonNumberDistribution::coherent(0.0, 10).unwrap();
        assert_eq!(vac.probs()[0], 1.0);
        assert!(vac.probs()[1..].iter().all(|&p| p == 0.0));

        let d = PhotonNumberDistribution::coherent(1.0, 40).unwrap();
        assert!(approx(d.probs()[0], (-1.0f64).exp(), 1e-15));
        assert!(approx(d.probs()[0], 0.367879, 1e-6));

        let d = PhotonNumberDistribution::coherent(2.5, 60).unwrap();
        let expected = (-2.5f64).exp() * 2.5 * 2.5 / 2.0;
        assert!(approx(d.probs()[2], expected, 1e-15));
        assert_eq!(d.label(), "coherent");
    }

    #[test]
    fn coherent_rejects_bad_input() {
        assert!(matches!(
            PhotonNumberDistribution::coherent(-0.1, 10),
            Err(Error::InvalidMean(_))
        ));
        assert!(matches!(
            PhotonNumberDistribution::coherent(f64::NAN, 10),
            Err(Error::InvalidMean(_))
        ));
        assert!(matches!(
            PhotonNumberDistribution::coherent(5.0, 10),
            Err(Error::TailMassTooLarge { .. })
        ));
    }

    #[test]
    fn fock_point_masses() {
        for (n, n_max) in [(0, 5), (1, 8), (3, 8)] {
            let d = PhotonNumberDistribution::fock(n, n_max).unwrap();
            assert_eq!(d.n_max(), n_max);
            for (i, &p) in d.probs().iter().enumerate() {
                assert_eq!(p, if i == n { 1.0 } else { 0.0 });
            }
        }
        assert!(matches!(
            PhotonNumberDistribution::fock(9, 8),
            Err(Error::IndexOutOfRange { n: 9, n_max: 8 })
        ));
    }

    #[test]
    fn thermal_geometric_law() {
        let vac = PhotonNumberDistribution::thermal(0.0, 5).unwrap();
        assert_eq!(vac.probs()[0], 1.0);

        let d = PhotonNumberDistribution::thermal(1.0, 100).unwrap();
        assert!(approx(d.probs()[0], 0.5, 1e-15));

        let d = PhotonNumberDistribution::thermal(0.5, 60).unwrap();
        assert!(approx(d.probs()[1] / d.probs()[0], 1.0 / 3.0, 1e-15));

        assert!(matches!(
            PhotonNumberDistribution::thermal(10.0, 20),
            Err(Error::TailMassTooLarge { .. })
        ));
    }

    #[test]
    fn custom_and_mixture_validation() {
        assert!(PhotonNumberDistribution::custom(vec![0.5, 0.5], "x").is_ok());
        assert!(PhotonNumberDistribution::custom(vec![], "x").is_err());
        assert!(PhotonNumberDistribution::custom(vec![0.5, 0.6], "x").is_err());
        assert!(PhotonNumberDistribution::custom(vec![1.5, -0.5], "x").is_err());

        let one = PhotonNumberDistribution::fock(1, 1).unwrap();
        let two = PhotonNumberDistribution::fock(2, 2).unwrap();
        let mix = PhotonNumberDistribution::mixture(&[(0.9, &one), (0.1, &two)]).unwrap();
        assert_eq!(mix.probs(), &[0.0, 0.9, 0.1]);
        assert!(PhotonNumberDistribution::mixture(&[(0.9, &one)]).is_err());
    }

    #[test]
    fn exp_moment_examples() {
        let vac = PhotonNumberDistribution::fock(0, 4).unwrap();
        for x in [-3.0, 0.0, 0.4, 1.0, 7.5] {
            assert_eq!(vac.normally_ordered_exp_moment(x), 1.0);
        }
        let one = PhotonNumberDistribution::fock(1, 3).unwrap();
        assert_eq!(one.normally_ordered_exp_moment(0.125), 0.875);
    }

    /// Independent route: expand `:exp(−x n̂):` in factorial moments,
    /// `⟨n|:n̂^j:|n⟩ = n!/(n−j)!`, so `⟨:e^{−x n̂}:⟩ = Σ_j (−x)^j/j! ⟨:n̂^j:⟩`.
    fn factorial_moment_expansion(d: &PhotonNumberDistribution, x: f64) -> f64 {
        let n_max = d.n_max();
        (0..=n_max)
            .map(|j| {
                let moment: f64 = d
                    .probs()
                    .iter()
                    .enumerate()
                    .filter(|(n, _)| *n >= j)
                    .map(|(n, p)| p * ((n - j + 1)..=n).map(|i| i as f64).product::<f64>())
                    .sum();
                let coef: f64 = (1..=j).map(|i| -x / i as f64).product();
                coef * moment
            })
            .sum()
    }

    #[test]
    fn exp_moment_matches_factorial_expansion() {
        for n in 0..6 {
            let d = PhotonNumberDistribution::fock(n, 6).unwrap();
            for x in [0.0, 0.125, 0.3, 1.0, 1.7] {
                let lhs = d.normally_ordered_exp_moment(x);
                let rhs = factorial_moment_expansion(&d, x);
                assert!(approx(lhs, rhs, 1e-12), "n={n} x={x}: {lhs} vs {rhs}");
            }
        }
    }

    #[test]
    fn cutoff_passes_tail_check() {
        for mu in [1e-6, 0.01, 0.5, 3.0, 20.0, 150.0] {
            let n_max = poisson_cutoff(mu);
            assert!(PhotonNumberDistribution::coherent(mu, n_max).is_ok(), "mu={mu}");
        }
    }

    proptest! {
        #[test]
        fn constructors_are_normalized(mu in 0.0f64..30.0, n in 0usize..20) {
            for d in [
                PhotonNumberDistribution::coherent_auto(mu).unwrap(),
                PhotonNumberDistribution::thermal_auto(mu / 3.0).unwrap(),
                PhotonNumberDistribution::fock(n, n + 3).unwrap(),
            ] {
                let total: f64 = d.probs().iter().sum();
                prop_assert!((total - 1.0).abs() <= NORMALIZATION_TOLERANCE);
                prop_assert!(d.probs().iter().all(|&p| p >= 0.0));
                prop_assert!((d.normally_ordered_exp_moment(0.0) - 1.0).abs() <= NORMALIZATION_TOLERANCE);
            }
        }

        #[test]
        fn coherent_moment_is_exponential(mu in 0.0f64..20.0, x in 0.0f64..2.0) {
            let d = PhotonNumberDistribution::coherent_auto(mu).unwrap();
            let m = d.normally_ordered_exp_moment(x);
            prop_assert!((m - (-mu * x).exp()).abs() <= 1e-10, "mu={} x={} m={}", mu, x, m);
        }

        #[test]
        fn moment_in_unit_interval(mu in 0.0f64..10.0, x in 0.0f64..=1.0) {
            for d in [
                PhotonNumberDistribution::coherent_auto(mu).unwrap(),
                PhotonNumberDistribution::thermal_auto(mu).unwrap(),
            ] {
                let m = d.normally_ordered_exp_moment(x);
                prop_assert!((-1e-15..=1.0 + 1e-12).contains(&m));
            }
        }
    }
}
