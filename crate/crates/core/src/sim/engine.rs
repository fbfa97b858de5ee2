use std::io::Write;

use rand::Rng;
use rand_distr::{Binomial, Distribution};
use rayon::prelude::*;

use super::rng::StreamSeed;
use super::tree::SplitterTree;
use crate::error::{Error, Result};
use crate::histogram::{ClickHistogram, WindowMode};
use crate::ingest::{ns_to_ps, TagHeader, TagRecord, TagWriter};
use crate::state::PhotonNumberDistribution;
use crate::theory::{ClickDistribution, DetectorArrayConfig};

const CHUNK: u64 = 1 << 14;

/// Set of detectors that clicked in one window, as a bit mask.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct ClickPattern(pub u64);

impl ClickPattern {
    pub fn clicks(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn contains(self, channel: usize) -> bool {
        self.0 >> channel & 1 == 1
    }

    pub fn channels(self) -> impl Iterator<Item = usize> {
        (0..64).filter(move |&c| self.contains(c))
    }
}

/// Histogram of a simulation plus the per-channel click totals.
#[derive(Debug, Clone, PartialEq)]
pub struct SimulationRun {
    pub histogram: ClickHistogram,
    pub channel_clicks: Vec<u64>,
}

impl SimulationRun {
    /// Fraction of all clicks registered by each channel.
    pub fn channel_shares(&self) -> Vec<f64> {
        let total: u64 = self.channel_clicks.iter().sum();
        self.channel_clicks
            .iter()
            .map(|&c| if total == 0 { 0.0 } else { c as f64 / total as f64 })
            .collect()
    }
}

/// Per-window photon-counting experiment.
///
/// Each window: draw `n ~ P(n)`, route every photon to a channel with the
/// leaf probabilities, keep it with probability η, then let every channel
/// fire a dark click with probability `1 − e^{−ν/N}` (the chance that a
/// Poisson(ν/N) dark count is non-zero). A channel clicks if it holds at
/// least one surviving count.
#[derive(Debug, Clone)]
pub struct Simulator {
    photon_cdf: Vec<f64>,
    channel_cdf: Vec<f64>,
    eta: f64,
    dark_probability: f64,
    window_ns: f64,
    seed: StreamSeed,
}

impl Simulator {
    pub fn new(
        pnd: &PhotonNumberDistribution,
        tree: &SplitterTree,
        eta: f64,
        nu: f64,
        seed: u64,
    ) -> Result<Self> {
        let cfg = DetectorArrayConfig::with_weights(tree.channel_probabilities(), eta, nu)?;
        Self::from_config(pnd, &cfg, seed)
    }

    /// Routing by the configuration's channel weights.
    pub fn from_config(pnd: &PhotonNumberDistribution, cfg: &DetectorArrayConfig, seed: u64) -> Result<Self> {
        Ok(Self {
            photon_cdf: cumulative(pnd.probs()),
            channel_cdf: cumulative(cfg.weights()),
            eta: cfg.eta(),
            dark_probability: cfg.dark_click_probability(),
            window_ns: 10.0,
            seed: StreamSeed::new(seed),
        })
    }

    /// Coincidence window recorded on histograms and used for tag emission.
    pub fn with_window_ns(mut self, window_ns: f64) -> Result<Self> {
        if !(window_ns.is_finite() && window_ns > 0.0) {
            return Err(Error::InvalidParameter(format!("window {window_ns} ns must be > 0")));
        }
        self.window_ns = window_ns;
        Ok(self)
    }

    pub fn detectors(&self) -> usize {
        self.channel_cdf.len()
    }

    pub fn window_ns(&self) -> f64 {
        self.window_ns
    }

    /// Click pattern of window `index`; a pure function of seed and index.
    pub fn window_pattern(&self, index: u64) -> ClickPattern {
        let mut rng = self.seed.stream(index);
        let photons = sample_index(&self.photon_cdf, rng.random());
        let mut mask = 0u64;
        for _ in 0..photons {
            let channel = sample_index(&self.channel_cdf, rng.random());
            if rng.random::<f64>() < self.eta {
                mask |= 1 << channel;
            }
        }
        if self.dark_probability > 0.0 {
            for channel in 0..self.detectors() {
                if rng.random::<f64>() < self.dark_probability {
                    mask |= 1 << channel;
                }
            }
        }
        ClickPattern(mask)
    }

    /// Continuous-wave run over `windows` coincidence windows.
    pub fn simulate_windows(&self, windows: u64) -> Result<SimulationRun> {
        self.run(windows, WindowMode::ContinuousWave)
    }

    /// Heralded run: one window per trigger.
    pub fn simulate_triggered(&self, triggers: u64) -> Result<SimulationRun> {
        self.run(triggers, WindowMode::Triggered)
    }

    fn run(&self, windows: u64, mode: WindowMode) -> Result<SimulationRun> {
        if windows == 0 {
            return Err(Error::InvalidParameter("at least one window is required".into()));
        }
        let n = self.detectors();
        let empty = || (vec![0u64; n + 1], vec![0u64; n]);
        let (counts, channel_clicks) = (0..windows.div_ceil(CHUNK))
            .into_par_iter()
            .map(|chunk| {
                let (mut counts, mut channels) = empty();
                let start = chunk * CHUNK;
                for w in start..(start + CHUNK).min(windows) {
                    let pattern = self.window_pattern(w);
                    counts[pattern.clicks()] += 1;
                    for c in pattern.channels() {
                        channels[c] += 1;
                    }
                }
                (counts, channels)
            })
            .reduce(empty, |(mut a, mut b), (c, d)| {
                a.iter_mut().zip(c).for_each(|(x, y)| *x += y);
                b.iter_mut().zip(d).for_each(|(x, y)| *x += y);
                (a, b)
            });
        Ok(SimulationRun {
            histogram: ClickHistogram::new(counts, self.window_ns, mode)?,
            channel_clicks,
        })
    }

    /// Writes the click patterns of `windows` windows as a tag file.
    ///
    /// Window `w` starts at `w·Δτ`. In continuous-wave mode the file declares
    /// `N` channels; in triggered mode it declares `N + 1` with the herald on
    /// channel `N`, stamped at the window start. Channel `c` is stamped at
    /// offset `(c + 1)·Δτ/(N + 1)` inside its window.
    pub fn write_tags<W: Write>(&self, out: W, windows: u64, mode: WindowMode) -> Result<u64> {
        let n = self.detectors();
        let window_ps = ns_to_ps(self.window_ns)?;
        if window_ps < n as u64 + 1 {
            return Err(Error::InvalidParameter(format!(
                "window of {window_ps} ps cannot hold {n} distinct tag offsets"
            )));
        }
        let header = match mode {
            WindowMode::ContinuousWave => TagHeader::new(n as u32, None),
            WindowMode::Triggered => TagHeader::new(n as u32 + 1, Some(n as u32)),
        }?;
        let mut writer = TagWriter::new(out, &header)?;
        let mut written = 0u64;
        for w in 0..windows {
            let start = w * window_ps;
            if mode == WindowMode::Triggered {
                writer.write(TagRecord::new(start, n as u32))?;
                written += 1;
            }
            for c in self.window_pattern(w).channels() {
                let offset = (c as u64 + 1) * window_ps / (n as u64 + 1);
                writer.write(TagRecord::new(start + offset, c as u32))?;
                written += 1;
            }
        }
        writer.finish()?;
        Ok(written)
    }
}

fn cumulative(probs: &[f64]) -> Vec<f64> {
    probs
        .iter()
        .scan(0.0, |acc, p| {
            *acc += p;
            Some(*acc)
        })
        .collect()
}

/// Inverse-CDF draw; `u` beyond the last (rounded) cumulative value falls to
/// the last outcome with nonzero probability.
fn sample_index(cdf: &[f64], u: f64) -> usize {
    let idx = cdf.partition_point(|&c| c <= u);
    if idx < cdf.len() {
        return idx;
    }
    let last = cdf[cdf.len() - 1];
    cdf.iter().position(|&c| c == last).unwrap_or(cdf.len() - 1)
}

/// Multinomial draw of `trials` outcomes over `probs` by sequential
/// conditional binomials.
pub(crate) fn multinomial<R: Rng>(probs: &[f64], trials: u64, rng: &mut R) -> Vec<u64> {
    let mut out = vec![0u64; probs.len()];
    let mut remaining = trials;
    let mut mass: f64 = probs.iter().sum();
    for (slot, &p) in out.iter_mut().zip(probs) {
        if remaining == 0 {
            break;
        }
        let q = if mass > 0.0 { (p / mass).clamp(0.0, 1.0) } else { 1.0 };
        let draw = if q >= 1.0 {
            remaining
        } else {
            Binomial::new(remaining, q).map(|b| b.sample(rng)).unwrap_or(0)
        };
        *slot = draw;
        remaining -= draw;
        mass -= p;
    }
    // Rounding in `mass` may leave a remainder; it belongs to the last
    // outcome with positive probability.
    if remaining > 0 {
        if let Some(i) = probs.iter().rposition(|&p| p > 0.0) {
            out[i] += remaining;
        }
    }
    out
}

/// Histogram of `windows` windows drawn directly from a click distribution.
pub fn sample_histogram(
    distribution: &ClickDistribution,
    windows: u64,
    seed: u64,
    window_ns: f64,
    mode: WindowMode,
) -> Result<ClickHistogram> {
    let probs: Vec<f64> = distribution.probs().iter().map(|&c| c.max(0.0)).collect();
    let counts = multinomial(&probs, windows, &mut StreamSeed::new(seed).stream(0));
    ClickHistogram::new(counts, window_ns, mode)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inverse_cdf_skips_empty_outcomes() {
        let cdf = cumulative(&[0.0, 0.5, 0.0, 0.5, 0.0]);
        assert_eq!(sample_index(&cdf, 0.0), 1);
        assert_eq!(sample_index(&cdf, 0.49), 1);
        assert_eq!(sample_index(&cdf, 0.5), 3);
        assert_eq!(sample_index(&[0.3, 0.99999], 0.999995), 1);
    }

    #[test]
    fn vacuum_never_clicks() {
        let vac = PhotonNumberDistribution::fock(0, 2).unwrap();
        let sim = Simulator::new(&vac, &SplitterTree::balanced(3).unwrap(), 0.9, 0.0, 1).unwrap();
        let run = sim.simulate_windows(5000).unwrap();
        assert_eq!(run.histogram.counts()[0], 5000);
        assert!(run.channel_clicks.iter().all(|&c| c == 0));
    }

    #[test]
    fn ideal_single_photons_click_once() {
        let one = PhotonNumberDistribution::fock(1, 1).unwrap();
        let sim = Simulator::new(&one, &SplitterTree::balanced(3).unwrap(), 1.0, 0.0, 9).unwrap();
        let run = sim.simulate_triggered(1000).unwrap();
        assert_eq!(run.histogram.counts()[1], 1000);
        assert_eq!(run.histogram.mode(), WindowMode::Triggered);
        assert_eq!(run.channel_clicks.iter().sum::<u64>(), 1000);
    }

    #[test]
    fn multinomial_conserves_trials() {
        let mut rng = StreamSeed::new(3).stream(0);
        let draw = multinomial(&[0.2, 0.0, 0.5, 0.3], 100_000, &mut rng);
        assert_eq!(draw.iter().sum::<u64>(), 100_000);
        assert_eq!(draw[1], 0);
        let draw = multinomial(&[0.0, 1.0, 0.0], 17, &mut rng);
        assert_eq!(draw, vec![0, 17, 0]);
    }

    #[test]
    fn rejects_zero_windows() {
        let one = PhotonNumberDistribution::fock(1, 1).unwrap();
        let sim = Simulator::new(&one, &SplitterTree::balanced(1).unwrap(), 1.0, 0.0, 9).unwrap();
        assert!(sim.simulate_windows(0).is_err());
    }
}
