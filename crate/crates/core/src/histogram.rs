use crate::error::{Error, Result};

/// How the coincidence windows of a histogram were opened.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WindowMode {
    /// Fixed grid of windows covering the recording time.
    ContinuousWave,
    /// One window per herald (trigger) click.
    Triggered,
}

impl WindowMode {
    pub fn as_str(self) -> &'static str {
        match self {
            WindowMode::ContinuousWave => "continuous_wave",
            WindowMode::Triggered => "triggered",
        }
    }
}

impl std::fmt::Display for WindowMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Absolute joint-click counts `M_k`, `k = 0..=N`, over `M = Σ M_k` windows.
#[derive(Debug, Clone, PartialEq)]
pub struct ClickHistogram {
    counts: Vec<u64>,
    total: u64,
    window_ns: f64,
    mode: WindowMode,
}

impl ClickHistogram {
    pub fn new(counts: Vec<u64>, window_ns: f64, mode: WindowMode) -> Result<Self> {
        if counts.len() < 2 {
            return Err(Error::InvalidParameter(
                "histogram needs bins for k = 0..=N with N >= 1".into(),
            ));
        }
        let total = counts.iter().sum();
        if total == 0 {
            return Err(Error::EmptyHistogram);
        }
        Ok(Self {
            counts,
            total,
            window_ns,
            mode,
        })
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    pub fn detectors(&self) -> usize {
        self.counts.len() - 1
    }

    pub fn window_ns(&self) -> f64 {
        self.window_ns
    }

    pub fn mode(&self) -> WindowMode {
        self.mode
    }

    /// Largest `k` with `M_k > 0`.
    pub fn max_observed_clicks(&self) -> usize {
        self.counts.iter().rposition(|&m| m > 0).unwrap_or(0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn totals_and_errors() {
        let h = ClickHistogram::new(vec![5, 3, 0, 2, 0], 10.0, WindowMode::ContinuousWave).unwrap();
        assert_eq!(h.total(), 10);
        assert_eq!(h.detectors(), 4);
        assert_eq!(h.max_observed_clicks(), 3);
        assert!(matches!(
            ClickHistogram::new(vec![0, 0, 0], 10.0, WindowMode::Triggered),
            Err(Error::EmptyHistogram)
        ));
        assert!(ClickHistogram::new(vec![1], 10.0, WindowMode::Triggered).is_err());
    }
}
