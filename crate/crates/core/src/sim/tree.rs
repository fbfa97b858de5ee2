use crate::error::{Error, Result};

/// Complete binary cascade of two-port splitters with `2^stages` outputs.
///
/// Internal nodes are stored in heap order (root at 0, children of node `i`
/// at `2i + 1` and `2i + 2`); node `i` sends a fraction `t_i` of the light to
/// its first child and `1 − t_i` to its second.
#[derive(Debug, Clone, PartialEq)]
pub struct SplitterTree {
    stages: u32,
    transmittances: Vec<f64>,
}

impl SplitterTree {
    pub const MAX_STAGES: u32 = 6;

    /// Ideal cascade of 50/50 splitters.
    pub fn balanced(stages: u32) -> Result<Self> {
        Self::new(stages, vec![0.5; (1usize << stages.min(Self::MAX_STAGES)) - 1])
    }

    pub fn new(stages: u32, transmittances: Vec<f64>) -> Result<Self> {
        if stages > Self::MAX_STAGES {
            return Err(Error::InvalidConfig(format!(
                "{stages} stages exceed the maximum of {}",
                Self::MAX_STAGES
            )));
        }
        let nodes = (1usize << stages) - 1;
        if transmittances.len() != nodes {
            return Err(Error::DimensionMismatch {
                expected: nodes,
                got: transmittances.len(),
            });
        }
        if let Some(t) = transmittances.iter().find(|t| !(0.0..=1.0).contains(*t)) {
            return Err(Error::InvalidConfig(format!("transmittance {t} outside [0, 1]")));
        }
        Ok(Self {
            stages,
            transmittances,
        })
    }

    pub fn stages(&self) -> u32 {
        self.stages
    }

    pub fn outputs(&self) -> usize {
        1 << self.stages
    }

    pub fn transmittances(&self) -> &[f64] {
        &self.transmittances
    }

    /// Probability that a single photon leaves through each output, as the
    /// product of branch factors along its root-to-leaf path.
    pub fn channel_probabilities(&self) -> Vec<f64> {
        let mut level = vec![1.0];
        for depth in 0..self.stages {
            let first = (1usize << depth) - 1;
            level = level
                .iter()
                .enumerate()
                .flat_map(|(i, &p)| {
                    let t = self.transmittances[first + i];
                    [p * t, p * (1.0 - t)]
                })
                .collect();
        }
        level
    }
}
