//! Argument groups shared by several commands and the state grammar.

use std::path::PathBuf;
use std::str::FromStr;

use clap::Args;
use clickkit::recipes::{prepare, three_level_fixture, tune_to_clicks, Family, TunedState};
use clickkit::sim::SplitterTree;
use clickkit::theory::click_distribution;
use clickkit::{ClickDistribution, DetectorArrayConfig, Error, PhotonNumberDistribution};

use crate::output::{Format, Report};
use crate::CliError;

pub const DEFAULT_DETECTORS: usize = 8;

#[derive(Args, Debug, Clone)]
pub struct ArrayArgs {
    /// Number of on-off detectors N (uniform splitting).
    #[arg(long, conflicts_with = "stages")]
    pub detectors: Option<usize>,
    /// Depth of the splitter cascade; N = 2^stages.
    #[arg(long)]
    pub stages: Option<u32>,
    /// Splitter transmittances in heap order (2^stages − 1 values).
    #[arg(long, value_delimiter = ',', requires = "stages")]
    pub transmittances: Option<Vec<f64>>,
    /// Detector quantum efficiency η.
    #[arg(long, default_value_t = 1.0)]
    pub eta: f64,
    /// Dark-count parameter ν per window, shared over the array.
    #[arg(long, default_value_t = 0.0)]
    pub nu: f64,
}

impl ArrayArgs {
    pub fn config(&self) -> Result<DetectorArrayConfig, CliError> {
        match (self.stages, &self.transmittances) {
            (Some(stages), Some(t)) => {
                let tree = SplitterTree::new(stages, t.clone())?;
                Ok(DetectorArrayConfig::with_weights(tree.channel_probabilities(), self.eta, self.nu)?)
            }
            (Some(stages), None) => Ok(DetectorArrayConfig::from_stages(stages, self.eta, self.nu)?),
            (None, _) => Ok(DetectorArrayConfig::uniform(
                self.detectors.unwrap_or(DEFAULT_DETECTORS),
                self.eta,
                self.nu,
            )?),
        }
    }

    pub fn record(&self, report: &mut Report, cfg: &DetectorArrayConfig) {
        report.param("detectors", cfg.detectors());
        if let Some(stages) = self.stages {
            report.param("stages", stages);
        }
        if let Some(t) = &self.transmittances {
            report.param("transmittances", join(t));
        }
        report.param("eta", self.eta);
        report.param("nu", self.nu);
    }
}

#[derive(Args, Debug, Clone)]
pub struct OutputArgs {
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Output file; standard output when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug, Clone)]
pub struct StateArgs {
    /// Photon-number cutoff for coherent and thermal states (automatic by default).
    #[arg(long)]
    pub n_max: Option<usize>,
    /// Mean click number that parameterless states are tuned to.
    #[arg(long)]
    pub tune_clicks: Option<f64>,
    /// Relative intensity noise of `laser` states.
    #[arg(long, default_value_t = clickkit::recipes::DEFAULT_LASER_NOISE)]
    pub noise: f64,
}

impl StateArgs {
    pub fn record(&self, report: &mut Report) {
        if let Some(n) = self.n_max {
            report.param("n_max", n);
        }
        if let Some(k) = self.tune_clicks {
            report.param("tune_clicks", k);
        }
        report.param("noise", self.noise);
    }
}

pub fn join(values: &[f64]) -> String {
    values.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(";")
}

/// `vacuum`, `coherent:MU`, `thermal:MU`, `fock:N`, `laser:MU`,
/// `custom:P0,P1,...` or `three-level:CLICKS:QB`. Coherent, thermal, laser
/// and fock given without a parameter are tuned to `--tune-clicks`.
#[derive(Debug, Clone, PartialEq)]
pub enum StateSpec {
    Vacuum,
    Coherent(Option<f64>),
    Thermal(Option<f64>),
    Fock(Option<usize>),
    Laser(Option<f64>),
    Custom(Vec<f64>),
    ThreeLevel { clicks: f64, qb: f64 },
}

fn number<T: FromStr>(text: &str, what: &str) -> Result<T, String> {
    text.trim().parse().map_err(|_| format!("invalid {what} `{text}`"))
}

impl FromStr for StateSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let (name, arg) = match s.split_once(':') {
            Some((n, a)) => (n, Some(a)),
            None => (s, None),
        };
        let opt = |what| arg.map(|a| number(a, what)).transpose();
        Ok(match name {
            "vacuum" if arg.is_none() => StateSpec::Vacuum,
            "coherent" => StateSpec::Coherent(opt("mean photon number")?),
            "thermal" => StateSpec::Thermal(opt("mean photon number")?),
            "laser" => StateSpec::Laser(opt("mean photon number")?),
            "fock" => StateSpec::Fock(arg.map(|a| number(a, "photon number")).transpose()?),
            "custom" => StateSpec::Custom(
                arg.ok_or("custom needs probabilities")?
                    .split(',')
                    .map(|p| number(p, "probability"))
                    .collect::<Result<_, _>>()?,
            ),
            "three-level" => {
                let (k, q) = arg
                    .and_then(|a| a.split_once(':'))
                    .ok_or("three-level needs CLICKS:QB")?;
                StateSpec::ThreeLevel {
                    clicks: number(k, "click target")?,
                    qb: number(q, "Q_B target")?,
                }
            }
            _ => return Err(format!("unknown state `{s}`")),
        })
    }
}

/// A state ready for theory or simulation.
#[derive(Debug, Clone)]
pub struct Prepared {
    pub state: PhotonNumberDistribution,
    pub config: DetectorArrayConfig,
    pub tuned: Option<TunedState>,
    /// Exact `C_k`, unless the state has no closed form on this array.
    pub analytic: Option<ClickDistribution>,
}

fn analytic_or_none(result: clickkit::Result<ClickDistribution>) -> Result<Option<ClickDistribution>, CliError> {
    match result {
        Ok(c) => Ok(Some(c)),
        Err(Error::NonUniformWeightsUnsupported) => Ok(None),
        Err(e) => Err(e.into()),
    }
}

impl std::fmt::Display for StateSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let opt = |name: &str, x: Option<String>| match x {
            Some(x) => format!("{name}:{x}"),
            None => name.to_string(),
        };
        let text = match self {
            StateSpec::Vacuum => "vacuum".into(),
            StateSpec::Coherent(mu) => opt("coherent", mu.map(|x| x.to_string())),
            StateSpec::Thermal(mu) => opt("thermal", mu.map(|x| x.to_string())),
            StateSpec::Laser(mu) => opt("laser", mu.map(|x| x.to_string())),
            StateSpec::Fock(n) => opt("fock", n.map(|x| x.to_string())),
            StateSpec::Custom(p) => format!(
                "custom:{}",
                p.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
            ),
            StateSpec::ThreeLevel { clicks, qb } => format!("three-level:{clicks}:{qb}"),
        };
        f.write_str(&text)
    }
}

impl StateSpec {
    fn family(&self, noise: f64) -> Option<Family> {
        match self {
            StateSpec::Coherent(_) => Some(Family::Coherent),
            StateSpec::Thermal(_) => Some(Family::Thermal),
            StateSpec::Laser(_) => Some(Family::Laser { noise }),
            StateSpec::Fock(_) => Some(Family::Fock),
            _ => None,
        }
    }

    pub fn prepare(&self, cfg: &DetectorArrayConfig, opts: &StateArgs) -> Result<Prepared, CliError> {
        let from_tuned = |t: TunedState| -> Result<Prepared, CliError> {
            Ok(Prepared {
                state: t.state.clone(),
                config: t.config.clone(),
                analytic: analytic_or_none(t.click_distribution())?,
                tuned: Some(t),
            })
        };
        let plain = |state: PhotonNumberDistribution| -> Result<Prepared, CliError> {
            Ok(Prepared {
                analytic: analytic_or_none(click_distribution(&state, cfg))?,
                state,
                config: cfg.clone(),
                tuned: None,
            })
        };

        let tune = |family: Family| -> Result<Prepared, CliError> {
            let target = opts.tune_clicks.ok_or_else(|| {
                CliError::Usage(format!("{} needs a parameter or --tune-clicks", family.name()))
            })?;
            from_tuned(tune_to_clicks(family, cfg, target)?)
        };
        match self {
            StateSpec::Vacuum => plain(PhotonNumberDistribution::custom(vec![1.0], "vacuum")?),
            StateSpec::Custom(p) => plain(PhotonNumberDistribution::custom(p.clone(), "custom")?),
            StateSpec::ThreeLevel { clicks, qb } => plain(three_level_fixture(cfg, *clicks, *qb)?),
            StateSpec::Fock(Some(n)) => from_tuned(prepare(Family::Fock, cfg, cfg.eta(), *n, opts.n_max)?),
            StateSpec::Coherent(Some(mu)) | StateSpec::Thermal(Some(mu)) | StateSpec::Laser(Some(mu)) => {
                let family = self.family(opts.noise).expect("parameterized family");
                from_tuned(prepare(family, cfg, *mu, 0, opts.n_max)?)
            }
            _ => tune(self.family(opts.noise).expect("parameterized family")),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_state_grammar() {
        assert_eq!("coherent:2.5".parse(), Ok(StateSpec::Coherent(Some(2.5))));
        assert_eq!("coherent".parse(), Ok(StateSpec::Coherent(None)));
        assert_eq!("fock:1".parse(), Ok(StateSpec::Fock(Some(1))));
        assert_eq!("vacuum".parse(), Ok(StateSpec::Vacuum));
        assert_eq!("custom:0.2,0.8".parse(), Ok(StateSpec::Custom(vec![0.2, 0.8])));
        assert_eq!(
            "three-level:0.25:-0.22".parse(),
            Ok(StateSpec::ThreeLevel { clicks: 0.25, qb: -0.22 })
        );
        for text in ["coherent:2.5", "fock", "custom:0.2,0.8", "three-level:0.25:-0.22", "laser:1"] {
            assert_eq!(text.parse::<StateSpec>().unwrap().to_string(), text);
        }
        assert!("fock:1.5".parse::<StateSpec>().is_err());
        assert!("squeezed:1".parse::<StateSpec>().is_err());
        assert!("custom".parse::<StateSpec>().is_err());
        assert!("three-level:0.25".parse::<StateSpec>().is_err());
    }
}
