//! Window bootstrap.
//!
//! Resampling `M` windows with replacement from a histogram is the same as
//! drawing a multinomial histogram from `C^exp` with `M` trials, so a
//! replicate costs O(N) regardless of the window count.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::histogram::ClickHistogram;
use crate::sim::StreamSeed;

pub const MIN_BOOTSTRAP_REPLICATES: usize = 1000;
const BOOTSTRAP_STREAM_KEY: u64 = 0xB007;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BootstrapOptions {
    pub replicates: usize,
    pub seed: u64,
}

impl BootstrapOptions {
    pub fn new(replicates: usize, seed: u64) -> Result<Self> {
        if replicates < MIN_BOOTSTRAP_REPLICATES {
            return Err(Error::InvalidParameter(format!(
                "bootstrap needs at least {MIN_BOOTSTRAP_REPLICATES} replicates, got {replicates}"
            )));
        }
        Ok(Self { replicates, seed })
    }
}

impl Default for BootstrapOptions {
    fn default() -> Self {
        Self {
            replicates: MIN_BOOTSTRAP_REPLICATES,
            seed: 0,
        }
    }
}

/// Relative frequencies of every bootstrap replicate, in replicate order.
pub(crate) fn resampled_frequencies(hist: &ClickHistogram, opts: BootstrapOptions) -> Vec<Vec<f64>> {
    let total = hist.total();
    let probs: Vec<f64> = hist.counts().iter().map(|&m| m as f64 / total as f64).collect();
    let streams = StreamSeed::new(opts.seed).derive(BOOTSTRAP_STREAM_KEY);
    (0..opts.replicates as u64)
        .into_par_iter()
        .map(|r| {
            let counts = crate::sim::multinomial_draw(&probs, total, &mut streams.stream(r));
            counts.iter().map(|&m| m as f64 / total as f64).collect()
        })
        .collect()
}

/// Sample standard deviation (n − 1 denominator).
pub(crate) fn std_dev(values: &[f64]) -> f64 {
    let n = values.len() as f64;
    if values.len() < 2 {
        return 0.0;
    }
    let mean = values.iter().sum::<f64>() / n;
    (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
}
