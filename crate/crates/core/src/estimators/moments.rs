use super::jacobi::symmetric_eigen;
use crate::error::{Error, Result};
use crate::numeric::{binomial, DoubleDouble};
use crate::theory::ClickDistribution;

/// Factorial moment `⟨:π^q:⟩ = (N−q)!/N! Σ_k k(k−1)…(k−q+1) C_k`.
///
/// The ratio of falling factorials equals `binom(k, q) / binom(N, q)`, which
/// is formed from exact integers; the sum runs in double-double.
pub fn factorial_pi_moment(c_exp: &ClickDistribution, order: usize) -> Result<f64> {
    let n = c_exp.detectors();
    if order > n {
        return Err(Error::OrderOutOfRange { order, detectors: n });
    }
    Ok(pi_weights(n, order)
        .zip(c_exp.probs())
        .map(|(w, &c)| DoubleDouble::from_f64(c) * w)
        .sum::<DoubleDouble>()
        .to_f64())
}

/// `binom(k, q) / binom(N, q)` for `k = 0..=N`.
pub(crate) fn pi_weights(n: usize, order: usize) -> impl Iterator<Item = f64> {
    let norm = binomial(n, order) as f64;
    (0..=n).map(move |k| if k < order { 0.0 } else { binomial(k, order) as f64 / norm })
}

/// `⟨:π^q:⟩` for `q = 0..=N`.
pub(crate) fn all_pi_moments(c_exp: &ClickDistribution) -> Vec<f64> {
    (0..=c_exp.detectors())
        .map(|q| factorial_pi_moment(c_exp, q).expect("order within range"))
        .collect()
}

/// Matrix of moments `MoM[m][n] = ⟨:π^{m+n}:⟩`, `m, n = 0..=⌊N/2⌋`, with its
/// eigen-decomposition.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentMatrix {
    pub entries: Vec<Vec<f64>>,
    /// Ascending.
    pub eigenvalues: Vec<f64>,
    /// `eigenvectors[i]` belongs to `eigenvalues[i]`.
    pub eigenvectors: Vec<Vec<f64>>,
}

impl MomentMatrix {
    pub fn dimension(&self) -> usize {
        self.entries.len()
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues[0]
    }
}

pub fn moment_matrix(c_exp: &ClickDistribution) -> Result<MomentMatrix> {
    let n = c_exp.detectors();
    if n < 2 {
        return Err(Error::TooFewDetectors(n));
    }
    let pi = all_pi_moments(c_exp);
    let dim = n / 2 + 1;
    let entries: Vec<Vec<f64>> = (0..dim).map(|m| (0..dim).map(|l| pi[m + l]).collect()).collect();
    let eigen = symmetric_eigen(&entries)?;
    Ok(MomentMatrix {
        entries,
        eigenvalues: eigen.values,
        eigenvectors: eigen.vectors,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::theory::{coherent_click_distribution, qb_of, DetectorArrayConfig};
    use proptest::prelude::*;

    fn binomial_c(n: usize, p: f64) -> ClickDistribution {
        let cfg = DetectorArrayConfig::uniform(n, 1.0, 0.0).unwrap();
        // ημ/N = −ln(1 − p)
        coherent_click_distribution(&cfg, -(n as f64) * (-p).ln_1p()).unwrap()
    }

    /// Falling factorials written out literally.
    fn falling_oracle(c: &ClickDistribution, q: usize) -> f64 {
        let n = c.detectors();
        let ff = |x: usize| (0..q).map(|i| x as f64 - i as f64).product::<f64>();
        ff(n).recip() * c.probs().iter().enumerate().map(|(k, p)| ff(k) * p).sum::<f64>()
    }

    #[test]
    fn trivial_orders() {
        let c = ClickDistribution::new(vec![0.4, 0.3, 0.2, 0.1]).unwrap();
        assert_eq!(factorial_pi_moment(&c, 0).unwrap(), 1.0);
        let vac = ClickDistribution::new(vec![1.0, 0.0, 0.0, 0.0, 0.0]).unwrap();
        for q in 1..=4 {
            assert_eq!(factorial_pi_moment(&vac, q).unwrap(), 0.0);
        }
        assert!(matches!(
            factorial_pi_moment(&c, 4),
            Err(Error::OrderOutOfRange { order: 4, detectors: 3 })
        ));
        for q in 0..=3 {
            assert!((factorial_pi_moment(&c, q).unwrap() - falling_oracle(&c, q)).abs() < 1e-15);
        }
    }

    #[test]
    fn vacuum_matrix_is_rank_one() {
        let vac = ClickDistribution::new(vec![1.0, 0.0, 0.0, 0.0, 0.0]).unwrap();
        let mom = moment_matrix(&vac).unwrap();
        assert_eq!(mom.dimension(), 3);
        assert_eq!(mom.eigenvalues, vec![0.0, 0.0, 1.0]);
        assert_eq!(mom.eigenvectors[2], vec![1.0, 0.0, 0.0]);
    }

    #[test]
    fn five_by_five_for_eight_detectors() {
        let mom = moment_matrix(&binomial_c(8, 0.2)).unwrap();
        assert_eq!(mom.dimension(), 5);
        assert!((mom.entries[0][0] - 1.0).abs() < 1e-12);
        assert!(moment_matrix(&ClickDistribution::new(vec![0.5, 0.5]).unwrap()).is_err());
    }

    proptest! {
        #[test]
        fn binomial_factorial_moments_are_powers(n in 1usize..=16, p in 0.0f64..0.95) {
            let c = binomial_c(n, p);
            for q in 0..=n {
                let got = factorial_pi_moment(&c, q).unwrap();
                prop_assert!((got - p.powi(q as i32)).abs() < 1e-12, "q={q} {got}");
            }
        }

        #[test]
        fn coherent_matrix_is_rank_one_psd(half in 1usize..=8, p in 0.0f64..0.95) {
            let n = 2 * half;
            let mom = moment_matrix(&binomial_c(n, p)).unwrap();
            let gram: f64 = (0..=half).map(|m| p.powi(2 * m as i32)).sum();
            prop_assert!(mom.min_eigenvalue() >= -1e-10);
            prop_assert_eq!(mom.eigenvalues.iter().filter(|&&l| l > 1e-8).count(), 1);
            prop_assert!((mom.eigenvalues[half] - gram).abs() < 1e-10);
        }

        #[test]
        fn second_minor_tracks_qb(raw in proptest::collection::vec(0.0f64..1.0, 3..=17)) {
            let total: f64 = raw.iter().sum();
            prop_assume!(total > 0.0);
            let c = ClickDistribution::new(raw.iter().map(|x| x / total).collect()).unwrap();
            let Ok(qb) = qb_of(&c) else { return Ok(()) };
            let p1 = factorial_pi_moment(&c, 1).unwrap();
            let p2 = factorial_pi_moment(&c, 2).unwrap();
            let minor = p2 - p1 * p1;
            let n = c.detectors() as f64;
            let linked = qb * p1 * (1.0 - p1) / (n - 1.0);
            prop_assert!((minor - linked).abs() < 1e-12, "{minor} vs {linked}");
        }
    }
}
