//! Parameter inversions, fixtures and flux scans.
//!
//! Scans are specified by target mean click numbers `⟨k⟩`. Each family is
//! inverted to its free parameter by bisection on the exact mean-click
//! relation of the array.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::estimators::{qb_estimate, QbResult};
use crate::histogram::{ClickHistogram, WindowMode};
use crate::sim::{Simulator, StreamSeed};
use crate::state::PhotonNumberDistribution;
use crate::theory::{click_distribution, coherent_click_distribution, qb_of, ClickDistribution, DetectorArrayConfig};

/// Relative width at which parameter bisection stops.
pub const INVERSION_TOLERANCE: f64 = 1e-10;
pub const DEFAULT_LASER_NOISE: f64 = 0.3;
/// Largest photon number tried when a Fock scan needs more than one photon.
pub const MAX_FOCK_PHOTONS: usize = 64;

/// Families a flux scan can sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Family {
    /// Ideal coherent light; the free parameter is `μ`.
    Coherent,
    /// Coherent light with classical intensity noise: an equal mixture of
    /// coherent states at `μ̄(1 ± noise)`. The free parameter is `μ̄`.
    Laser { noise: f64 },
    /// `|n⟩` with the smallest `n` that reaches the target; the free
    /// parameter is the efficiency.
    Fock,
    /// Thermal light; the free parameter is `μ`.
    Thermal,
}

impl Family {
    pub fn name(&self) -> &'static str {
        match self {
            Family::Coherent => "coherent",
            Family::Laser { .. } => "laser",
            Family::Fock => "fock",
            Family::Thermal => "thermal",
        }
    }
}

/// A state and array tuned to a target `⟨k⟩`.
#[derive(Debug, Clone, PartialEq)]
pub struct TunedState {
    pub family: Family,
    pub state: PhotonNumberDistribution,
    pub config: DetectorArrayConfig,
    /// `μ` (or `μ̄`) for the mean-parameterized families, η for Fock.
    pub parameter: f64,
    /// Photon number of a Fock state.
    pub photons: Option<usize>,
    /// Exact `⟨k⟩` at the tuned parameter.
    pub mean_clicks: f64,
}

impl TunedState {
    /// Exact `C_k`; coherent-type families also support non-uniform arrays.
    pub fn click_distribution(&self) -> Result<ClickDistribution> {
        match self.family {
            Family::Coherent => coherent_click_distribution(&self.config, self.parameter),
            Family::Laser { noise } => {
                let lo = coherent_click_distribution(&self.config, self.parameter * (1.0 - noise))?;
                let hi = coherent_click_distribution(&self.config, self.parameter * (1.0 + noise))?;
                ClickDistribution::new(
                    lo.probs().iter().zip(hi.probs()).map(|(a, b)| 0.5 * (a + b)).collect(),
                )
            }
            Family::Fock | Family::Thermal => click_distribution(&self.state, &self.config),
        }
    }
}

/// `⟨k⟩` of `family` at parameter `x` (with `n` photons for Fock).
fn mean_clicks(family: Family, cfg: &DetectorArrayConfig, x: f64, photons: usize) -> f64 {
    let n = cfg.detectors() as f64;
    let dark = (-cfg.nu() / n).exp();
    let eta = cfg.eta();
    cfg.weights()
        .iter()
        .map(|&q| {
            let survive = match family {
                Family::Coherent => (-eta * x * q).exp(),
                Family::Laser { noise } => {
                    0.5 * ((-eta * x * (1.0 - noise) * q).exp() + (-eta * x * (1.0 + noise) * q).exp())
                }
                Family::Thermal => 1.0 / (1.0 + eta * x * q),
                Family::Fock => (1.0 - x * q).powi(photons as i32),
            };
            1.0 - dark * survive
        })
        .sum()
}

/// Bisection for an increasing `f` on `[lo, hi]` with `f(lo) ≤ target ≤ f(hi)`.
fn bisect(f: impl Fn(f64) -> f64, target: f64, mut lo: f64, mut hi: f64) -> f64 {
    for _ in 0..400 {
        let mid = 0.5 * (lo + hi);
        if hi - lo <= INVERSION_TOLERANCE * hi.abs().max(f64::MIN_POSITIVE) {
            break;
        }
        if f(mid) < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Tunes `family` so that the array sees `⟨k⟩ = target_clicks`.
pub fn tune_to_clicks(family: Family, cfg: &DetectorArrayConfig, target_clicks: f64) -> Result<TunedState> {
    let n = cfg.detectors() as f64;
    let floor = n * cfg.dark_click_probability();
    if !(target_clicks.is_finite() && target_clicks > floor && target_clicks < n) {
        return Err(Error::InvalidParameter(format!(
            "target ⟨k⟩ = {target_clicks} must lie in ({floor}, {n})"
        )));
    }
    if let Family::Laser { noise } = family {
        if !(0.0..1.0).contains(&noise) {
            return Err(Error::InvalidParameter(format!("laser noise {noise} must lie in [0, 1)")));
        }
    }

    if family == Family::Fock {
        let eta_max = cfg.eta();
        let photons = (1..=MAX_FOCK_PHOTONS)
            .find(|&m| mean_clicks(family, cfg, eta_max, m) >= target_clicks)
            .ok_or_else(|| {
                Error::InvalidParameter(format!(
                    "no Fock state up to {MAX_FOCK_PHOTONS} photons reaches ⟨k⟩ = {target_clicks}"
                ))
            })?;
        let eta = bisect(|e| mean_clicks(family, cfg, e, photons), target_clicks, 0.0, eta_max).min(eta_max);
        return prepare(family, cfg, eta, photons, None);
    }

    let f = |x: f64| mean_clicks(family, cfg, x, 0);
    let mut hi = 1.0;
    while f(hi) < target_clicks {
        hi *= 2.0;
        if hi > 1e12 {
            return Err(Error::InvalidParameter(format!(
                "⟨k⟩ = {target_clicks} is out of reach for {}",
                family.name()
            )));
        }
    }
    prepare(family, cfg, bisect(f, target_clicks, 0.0, hi), 0, None)
}

/// `family` at an explicit parameter: `μ` (`μ̄` for laser) or, for Fock, the
/// efficiency that replaces the array's η. `photons` is only read for Fock;
/// `n_max` overrides the automatic photon-number cutoff.
pub fn prepare(
    family: Family,
    cfg: &DetectorArrayConfig,
    parameter: f64,
    photons: usize,
    n_max: Option<usize>,
) -> Result<TunedState> {
    let coherent = |mu: f64| match n_max {
        Some(n) => PhotonNumberDistribution::coherent(mu, n),
        None => PhotonNumberDistribution::coherent_auto(mu),
    };
    let (state, config, photons) = match family {
        Family::Coherent => (coherent(parameter)?, cfg.clone(), None),
        Family::Thermal => {
            let state = match n_max {
                Some(n) => PhotonNumberDistribution::thermal(parameter, n)?,
                None => PhotonNumberDistribution::thermal_auto(parameter)?,
            };
            (state, cfg.clone(), None)
        }
        Family::Laser { noise } => {
            if !(0.0..1.0).contains(&noise) {
                return Err(Error::InvalidParameter(format!("laser noise {noise} must lie in [0, 1)")));
            }
            let lo = coherent(parameter * (1.0 - noise))?;
            let hi = coherent(parameter * (1.0 + noise))?;
            (PhotonNumberDistribution::mixture(&[(0.5, &lo), (0.5, &hi)])?, cfg.clone(), None)
        }
        Family::Fock => (
            PhotonNumberDistribution::fock(photons, n_max.unwrap_or(photons))?,
            cfg.with_eta(parameter)?,
            Some(photons),
        ),
    };
    Ok(TunedState {
        family,
        state,
        mean_clicks: mean_clicks(family, cfg, parameter, photons.unwrap_or(0)),
        config,
        parameter,
        photons,
    })
}

/// Mixture `p₀|0⟩⟨0| + p₁|1⟩⟨1| + p₂|2⟩⟨2|` whose click statistics on `cfg`
/// have mean `target_clicks` and binomial parameter `target_qb`.
///
/// `⟨k⟩` and `⟨k²⟩` are linear in the weights, so the two targets fix
/// `(p₁, p₂)` through a 2×2 linear system.
pub fn three_level_fixture(
    cfg: &DetectorArrayConfig,
    target_clicks: f64,
    target_qb: f64,
) -> Result<PhotonNumberDistribution> {
    let n = cfg.detectors() as f64;
    let moments = |photons: usize| -> Result<(f64, f64)> {
        let c = click_distribution(&PhotonNumberDistribution::fock(photons, photons)?, cfg)?;
        let second = c.probs().iter().enumerate().map(|(k, p)| (k * k) as f64 * p).sum();
        Ok((c.mean(), second))
    };
    let (m0, s0) = moments(0)?;
    let (m1, s1) = moments(1)?;
    let (m2, s2) = moments(2)?;
    let target_second = target_clicks * target_clicks + (target_qb + 1.0) * target_clicks * (n - target_clicks) / n;

    let (a11, a12, b1) = (m1 - m0, m2 - m0, target_clicks - m0);
    let (a21, a22, b2) = (s1 - s0, s2 - s0, target_second - s0);
    let det = a11 * a22 - a12 * a21;
    if det.abs() < 1e-14 {
        return Err(Error::InvalidParameter("fixture system is singular".into()));
    }
    let p1 = (b1 * a22 - a12 * b2) / det;
    let p2 = (a11 * b2 - a21 * b1) / det;
    let p0 = 1.0 - p1 - p2;
    if [p0, p1, p2].iter().any(|&p| p < 0.0) {
        return Err(Error::InvalidParameter(format!(
            "⟨k⟩ = {target_clicks}, Q_B = {target_qb} is not reachable with 0-2 photons (weights {p0}, {p1}, {p2})"
        )));
    }
    // Absorb rounding so the weights sum to one exactly.
    PhotonNumberDistribution::custom(vec![1.0 - p1 - p2, p1, p2], "three-level")
}

/// `points` targets from `lo` to `hi`, evenly or logarithmically spaced.
pub fn flux_grid(lo: f64, hi: f64, points: usize, logarithmic: bool) -> Result<Vec<f64>> {
    if points == 0 || !(lo.is_finite() && hi.is_finite() && lo > 0.0 && hi >= lo) {
        return Err(Error::InvalidParameter(format!(
            "grid {lo}..{hi} with {points} points is invalid"
        )));
    }
    if points == 1 {
        return Ok(vec![lo]);
    }
    let step = |i: usize| i as f64 / (points - 1) as f64;
    Ok((0..points)
        .map(|i| {
            if logarithmic {
                (lo.ln() + step(i) * (hi.ln() - lo.ln())).exp()
            } else {
                lo + step(i) * (hi - lo)
            }
        })
        .collect())
}

#[derive(Debug, Clone)]
pub struct ScanConfig {
    pub family: Family,
    pub config: DetectorArrayConfig,
    pub targets: Vec<f64>,
    pub windows: u64,
    pub seed: u64,
    pub window_ns: f64,
    pub mode: WindowMode,
}

#[derive(Debug, Clone)]
pub struct ScanPoint {
    pub index: usize,
    pub target_clicks: f64,
    pub seed: u64,
    pub tuned: TunedState,
    /// Exact `Q_B`, when the family has a closed form on this array.
    pub analytic_qb: Option<f64>,
    pub estimate: QbResult,
    pub histogram: ClickHistogram,
}

/// Seed of scan point `index`; a function of the scan seed and index only.
pub fn point_seed(seed: u64, index: usize) -> u64 {
    StreamSeed::new(seed).derive(index as u64).seed()
}

/// Simulates every grid point; results are ordered by grid index.
pub fn run_scan(scan: &ScanConfig) -> Result<Vec<ScanPoint>> {
    scan.targets
        .par_iter()
        .enumerate()
        .map(|(index, &target)| {
            let tuned = tune_to_clicks(scan.family, &scan.config, target)?;
            let seed = point_seed(scan.seed, index);
            let sim = Simulator::from_config(&tuned.state, &tuned.config, seed)?.with_window_ns(scan.window_ns)?;
            let run = match scan.mode {
                WindowMode::ContinuousWave => sim.simulate_windows(scan.windows)?,
                WindowMode::Triggered => sim.simulate_triggered(scan.windows)?,
            };
            let analytic_qb = match tuned.click_distribution() {
                Ok(c) => Some(qb_of(&c)?),
                Err(Error::NonUniformWeightsUnsupported) => None,
                Err(e) => return Err(e),
            };
            Ok(ScanPoint {
                index,
                target_clicks: target,
                seed,
                estimate: qb_estimate(&run.histogram)?,
                analytic_qb,
                tuned,
                histogram: run.histogram,
            })
        })
        .collect()
}
