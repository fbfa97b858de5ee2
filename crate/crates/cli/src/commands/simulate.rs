use std::fs::File;
use std::path::PathBuf;

use clap::{Args, ValueEnum};
use clickkit::estimators::{qb_estimate_with, BootstrapOptions, SigmaMethod, MIN_BOOTSTRAP_REPLICATES};
use clickkit::sim::Simulator;
use clickkit::theory::qb_of;
use clickkit::WindowMode;

use crate::args::{ArrayArgs, OutputArgs, StateArgs, StateSpec};
use crate::output::{Report, Table};
use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SigmaChoice {
    Delta,
    Bootstrap,
}

#[derive(Args, Debug, Clone)]
pub struct RunArgs {
    /// Coincidence windows (or triggers) to simulate.
    #[arg(long, default_value_t = 1_000_000)]
    pub windows: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Coincidence window Δτ in nanoseconds.
    #[arg(long, default_value_t = 10.0)]
    pub delta_tau_ns: f64,
    /// One window per herald click instead of a continuous grid.
    #[arg(long)]
    pub triggered: bool,
}

impl RunArgs {
    pub fn mode(&self) -> WindowMode {
        if self.triggered {
            WindowMode::Triggered
        } else {
            WindowMode::ContinuousWave
        }
    }

    pub fn record(&self, report: &mut Report) {
        report.param("windows", self.windows);
        report.param("seed", self.seed);
        report.param("delta_tau_ns", self.delta_tau_ns);
        report.param("mode", self.mode());
    }
}

#[derive(Args, Debug)]
pub struct SimulateArgs {
    #[arg(long)]
    pub state: StateSpec,
    #[command(flatten)]
    pub state_opts: StateArgs,
    #[command(flatten)]
    pub array: ArrayArgs,
    #[command(flatten)]
    pub run: RunArgs,
    /// Standard error of Q_B.
    #[arg(long, value_enum, default_value_t = SigmaChoice::Delta)]
    pub sigma: SigmaChoice,
    /// Bootstrap replicates when `--sigma bootstrap`.
    #[arg(long, default_value_t = MIN_BOOTSTRAP_REPLICATES)]
    pub replicates: usize,
    /// Also write the click patterns as a time-tag file.
    #[arg(long)]
    pub emit_tags: Option<PathBuf>,
    #[command(flatten)]
    pub output: OutputArgs,
}

pub fn run(args: SimulateArgs) -> Result<(), CliError> {
    let cfg = args.array.config()?;
    let prepared = args.state.prepare(&cfg, &args.state_opts)?;
    let mut report = Report::new("simulate");
    report.param("state", &args.state);
    args.state_opts.record(&mut report);
    args.array.record(&mut report, &cfg);
    args.run.record(&mut report);
    if let Some(t) = &prepared.tuned {
        report.param("tuned_parameter", t.parameter);
        report.param("effective_eta", t.config.eta());
    }

    let sim = Simulator::from_config(&prepared.state, &prepared.config, args.run.seed)?
        .with_window_ns(args.run.delta_tau_ns)?;
    let run = match args.run.mode() {
        WindowMode::ContinuousWave => sim.simulate_windows(args.run.windows)?,
        WindowMode::Triggered => sim.simulate_triggered(args.run.windows)?,
    };
    if let Some(path) = &args.emit_tags {
        let tags = sim.write_tags(File::create(path)?, args.run.windows, args.run.mode())?;
        report.param("emit_tags", path.display());
        report.param("tags_written", tags);
    }

    let method = match args.sigma {
        SigmaChoice::Delta => SigmaMethod::DeltaMethod,
        SigmaChoice::Bootstrap => SigmaMethod::Bootstrap(BootstrapOptions::new(args.replicates, args.run.seed)?),
    };
    report.param("sigma", format!("{:?}", args.sigma).to_lowercase());

    let hist = &run.histogram;
    let exact = prepared.analytic.as_ref();
    let mut histogram = Table::new("histogram", &["k", "count", "frequency", "c_k_exact"]);
    for (k, &m) in hist.counts().iter().enumerate() {
        histogram.push(vec![
            k.into(),
            m.into(),
            (m as f64 / hist.total() as f64).into(),
            exact.map(|c| c.probs()[k]).into(),
        ]);
    }
    let mut channels = Table::new("channels", &["channel", "clicks", "share", "weight"]);
    for (i, (clicks, share)) in run.channel_clicks.iter().zip(run.channel_shares()).enumerate() {
        channels.push(vec![i.into(), (*clicks).into(), share.into(), prepared.config.weights()[i].into()]);
    }
    let mut estimate = Table::new("estimate", &["q_b", "sigma", "mean_clicks", "n_windows", "q_b_exact"]);
    let qb = qb_estimate_with(hist, method);
    let exact_qb = exact.and_then(|c| qb_of(c).ok());
    match qb {
        Ok(q) => estimate.push(vec![
            q.value.into(),
            q.sigma.into(),
            q.mean_clicks.into(),
            q.n_windows.into(),
            exact_qb.into(),
        ]),
        // All windows at k = 0 or k = N: Q_B is undefined, the histogram still stands.
        Err(clickkit::Error::DegenerateMean { mean, .. }) => estimate.push(vec![
            None::<f64>.into(),
            None::<f64>.into(),
            mean.into(),
            hist.total().into(),
            exact_qb.into(),
        ]),
        Err(e) => return Err(e.into()),
    }
    report.table(histogram);
    report.table(channels);
    report.table(estimate);
    Ok(report.emit(args.output.format, args.output.out.as_deref())?)
}
