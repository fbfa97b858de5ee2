//! Independent oracles for the analytic click statistics.

use clickkit::numeric::binomial;
use clickkit::sim::{Simulator, SplitterTree};
use clickkit::theory::{click_distribution, coherent_click_distribution, poisson_binomial, qb_of};
use clickkit::{DetectorArrayConfig, PhotonNumberDistribution};
use proptest::prelude::*;

/// `C_k` by tracking the number of occupied channels photon by photon, then
/// adding dark clicks on the empty channels.
fn occupancy_oracle(probs: &[f64], n: usize, eta: f64, nu: f64) -> Vec<f64> {
    let dark = 1.0 - (-nu / n as f64).exp();
    let mut occupied = vec![0.0; n + 1];
    occupied[0] = 1.0;
    let mut clicks = vec![0.0; n + 1];
    for &p in probs {
        for j in 0..=n {
            for extra in 0..=(n - j) {
                let b = binomial(n - j, extra) as f64 * dark.powi(extra as i32) * (1.0 - dark).powi((n - j - extra) as i32);
                clicks[j + extra] += p * occupied[j] * b;
            }
        }
        let mut next = vec![0.0; n + 1];
        for j in 0..=n {
            let stay = (1.0 - eta) + eta * j as f64 / n as f64;
            next[j] += occupied[j] * stay;
            if j < n {
                next[j + 1] += occupied[j] * eta * (n - j) as f64 / n as f64;
            }
        }
        occupied = next;
    }
    clicks
}

fn assert_close(a: &[f64], b: &[f64], tol: f64) {
    assert_eq!(a.len(), b.len());
    for (k, (x, y)) in a.iter().zip(b).enumerate() {
        assert!((x - y).abs() <= tol, "k={k}: {x} vs {y}");
    }
}

#[test]
fn fock_states_match_occupancy_counting() {
    for n in [2, 4, 8, 16] {
        for photons in 0..=6 {
            for (eta, nu) in [(1.0, 0.0), (0.55, 0.0), (0.8, 0.1)] {
                let cfg = DetectorArrayConfig::uniform(n, eta, nu).unwrap();
                let state = PhotonNumberDistribution::fock(photons, photons).unwrap();
                let c = click_distribution(&state, &cfg).unwrap();
                assert_close(c.probs(), &occupancy_oracle(state.probs(), n, eta, nu), 1e-12);
            }
        }
    }
}

#[test]
fn thermal_and_mixtures_match_occupancy_counting() {
    let cfg = DetectorArrayConfig::uniform(8, 0.7, 0.05).unwrap();
    let thermal = PhotonNumberDistribution::thermal_auto(0.8).unwrap();
    let c = click_distribution(&thermal, &cfg).unwrap();
    assert_close(c.probs(), &occupancy_oracle(thermal.probs(), 8, 0.7, 0.05), 1e-12);

    let custom = PhotonNumberDistribution::custom(vec![0.1, 0.5, 0.2, 0.15, 0.05], "custom").unwrap();
    let c = click_distribution(&custom, &cfg).unwrap();
    assert_close(c.probs(), &occupancy_oracle(custom.probs(), 8, 0.7, 0.05), 1e-12);
}

#[test]
fn general_route_agrees_with_coherent_closed_form() {
    for n in [2, 8, 16] {
        let cfg = DetectorArrayConfig::uniform(n, 0.45, 0.02).unwrap();
        for mu in [0.05, 1.0, 6.0] {
            let state = PhotonNumberDistribution::coherent_auto(mu).unwrap();
            let general = click_distribution(&state, &cfg).unwrap();
            let closed = coherent_click_distribution(&cfg, mu).unwrap();
            assert_close(general.probs(), closed.probs(), 1e-11);
        }
    }
}

#[test]
fn single_photon_closed_form_for_sixteen_detectors() {
    let fock = PhotonNumberDistribution::fock(1, 1).unwrap();
    for eta in [0.1, 0.5, 0.9] {
        let cfg = DetectorArrayConfig::uniform(16, eta, 0.0).unwrap();
        let qb = qb_of(&click_distribution(&fock, &cfg).unwrap()).unwrap();
        assert!((qb + eta * 15.0 / (16.0 - eta)).abs() < 1e-12);
    }
}

#[test]
fn asymmetric_splitter_matches_poisson_binomial() {
    let tree = SplitterTree::new(2, vec![0.6, 0.3, 0.55]).unwrap();
    let cfg = DetectorArrayConfig::with_weights(tree.channel_probabilities(), 0.8, 0.04).unwrap();
    let c = coherent_click_distribution(&cfg, 2.5).unwrap();
    let state = PhotonNumberDistribution::coherent_auto(2.5).unwrap();
    let windows = 1_000_000u64;
    let hist = Simulator::new(&state, &tree, 0.8, 0.04, 31).unwrap().simulate_windows(windows).unwrap().histogram;
    let m = windows as f64;
    let tv: f64 = 0.5 * hist.counts().iter().zip(c.probs()).map(|(&k, p)| (k as f64 / m - p).abs()).sum::<f64>();
    let bound = 5.0 * (c.probs().iter().map(|p| p * (1.0 - p)).sum::<f64>() / m).sqrt();
    assert!(tv <= bound, "{tv} > {bound}");
    // Unequal channels make coherent light sub-binomial.
    assert!(qb_of(&c).unwrap() < 0.0);
}

#[test]
fn two_photons_land_in_distinct_channels() {
    let fock2 = PhotonNumberDistribution::fock(2, 2).unwrap();
    let windows = 400_000u64;
    let hist = Simulator::new(&fock2, &SplitterTree::balanced(3).unwrap(), 1.0, 0.0, 8)
        .unwrap()
        .simulate_windows(windows)
        .unwrap()
        .histogram;
    let p = 1.0 - 1.0 / 8.0;
    let sigma = (p * (1.0 - p) / windows as f64).sqrt();
    let observed = hist.counts()[2] as f64 / windows as f64;
    assert!((observed - p).abs() <= 4.0 * sigma, "{observed}");
    assert_eq!(hist.counts()[1] + hist.counts()[2], windows);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn random_states_match_occupancy_counting(
        raw in proptest::collection::vec(0.0f64..1.0, 1..8),
        stages in 1u32..=4,
        eta in 0.05f64..=1.0,
        nu in 0.0f64..0.2,
    ) {
        let total: f64 = raw.iter().sum();
        prop_assume!(total > 0.0);
        let probs: Vec<f64> = raw.iter().map(|x| x / total).collect();
        let state = PhotonNumberDistribution::custom(probs.clone(), "random").unwrap();
        let n = 1usize << stages;
        let cfg = DetectorArrayConfig::uniform(n, eta, nu).unwrap();
        let c = click_distribution(&state, &cfg).unwrap();
        let oracle = occupancy_oracle(&probs, n, eta, nu);
        for (x, y) in c.probs().iter().zip(&oracle) {
            prop_assert!((x - y).abs() <= 1e-12);
        }
    }

    #[test]
    fn uniform_poisson_binomial_is_binomial(n in 1usize..=20, p in 0.0f64..=1.0) {
        let dist = poisson_binomial(&vec![p; n]);
        for (k, &x) in dist.iter().enumerate() {
            let b = binomial(n, k) as f64 * p.powi(k as i32) * (1.0 - p).powi((n - k) as i32);
            prop_assert!((x - b).abs() <= 1e-12);
        }
    }
}
