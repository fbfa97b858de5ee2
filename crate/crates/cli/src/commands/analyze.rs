use std::fs::File;
use std::io::BufReader;
use std::path::PathBuf;

use clap::{Args, ValueEnum};
use clickkit::estimators::{nonclassicality_verdict, BootstrapOptions, VerdictOptions, DEFAULT_THRESHOLD, MIN_BOOTSTRAP_REPLICATES};
use clickkit::ingest::{parse_tag_stream, window_continuous, window_triggered};

use crate::output::{Report, Table};
use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Cw,
    Triggered,
}

#[derive(Args, Debug)]
pub struct AnalyzeArgs {
    /// Time-tag file.
    pub tags: PathBuf,
    #[arg(long, value_enum, default_value_t = Mode::Cw)]
    pub mode: Mode,
    /// Coincidence window Δτ in nanoseconds.
    #[arg(long, default_value_t = 10.0)]
    pub delta_tau_ns: f64,
    /// Recording time T in nanoseconds (continuous-wave mode).
    #[arg(long)]
    pub total_ns: Option<f64>,
    /// Herald channel; defaults to the trigger declared in the file header.
    #[arg(long)]
    pub trigger_channel: Option<u32>,
    /// Significance a witness must exceed.
    #[arg(long, default_value_t = DEFAULT_THRESHOLD)]
    pub threshold: f64,
    #[arg(long, default_value_t = MIN_BOOTSTRAP_REPLICATES)]
    pub replicates: usize,
    /// Seed of the bootstrap replicates.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    pub output: crate::args::OutputArgs,
}

pub fn run(args: AnalyzeArgs) -> Result<(), CliError> {
    if args.mode == Mode::Cw && args.total_ns.is_none() {
        return Err(CliError::Usage("continuous-wave analysis needs --total-ns".into()));
    }
    let file = File::open(&args.tags).map_err(clickkit::Error::from)?;
    let stream = parse_tag_stream(BufReader::new(file), None)?;
    let channels = stream.header.channels;

    let mut report = Report::new("analyze");
    report.param("tags", args.tags.display());
    report.param("channels", channels);
    report.param("delta_tau_ns", args.delta_tau_ns);
    report.param("threshold", args.threshold);
    report.param("replicates", args.replicates);
    report.param("seed", args.seed);

    let windowed = match args.mode {
        Mode::Cw => {
            let total = args.total_ns.expect("checked above");
            report.param("mode", "continuous_wave");
            report.param("total_ns", total);
            window_continuous(&stream.records, args.delta_tau_ns, total, channels)?
        }
        Mode::Triggered => {
            let trigger = args.trigger_channel.or(stream.header.trigger).ok_or_else(|| {
                CliError::Usage("triggered mode needs --trigger-channel or a trigger in the header".into())
            })?;
            report.param("mode", "triggered");
            report.param("trigger_channel", trigger);
            window_triggered(&stream.records, trigger, args.delta_tau_ns, channels)?
        }
    };
    report.param("partial_window_tags", windowed.partial_window_tags);
    report.param("overlapping_triggers", windowed.overlapping_triggers);

    let opts = VerdictOptions {
        threshold: args.threshold,
        bootstrap: BootstrapOptions::new(args.replicates, args.seed)?,
    };
    let hist = &windowed.histogram;
    let r = nonclassicality_verdict(hist, opts)?;

    let mut clicks = Table::new("clicks", &["k", "count", "c_k"]);
    for (k, (&m, &c)) in hist.counts().iter().zip(&r.click_distribution).enumerate() {
        clicks.push(vec![k.into(), m.into(), c.into()]);
    }
    let mut qb = Table::new("qb", &["q_b", "sigma", "mean_clicks", "n_windows"]);
    qb.push(vec![r.qb.value.into(), r.qb.sigma.into(), r.qb.mean_clicks.into(), r.qb.n_windows.into()]);

    let mut mom = Table::new("moment_matrix", &["m", "n", "value"]);
    for (m, row) in r.moments.entries.iter().enumerate() {
        for (n, &v) in row.iter().enumerate() {
            mom.push(vec![m.into(), n.into(), v.into()]);
        }
    }
    let mut eigen = Table::new(
        "eigen",
        &["index", "eigenvalue", "form", "sigma", "significance", "negative", "significant"],
    );
    let mut vectors = Table::new("eigenvectors", &["index", "m", "component"]);
    for (i, d) in r.directions.iter().enumerate() {
        let s = &d.significance;
        eigen.push(vec![
            i.into(),
            d.eigenvalue.into(),
            s.form.into(),
            s.sigma.into(),
            s.ratio.into(),
            s.is_negative().into(),
            s.exceeds(r.threshold).into(),
        ]);
        for (m, &f) in d.direction.iter().enumerate() {
            vectors.push(vec![i.into(), m.into(), f.into()]);
        }
    }
    let mut verdict = Table::new(
        "verdict",
        &["verdict", "qb_witness", "mom_witness", "threshold", "max_observed_clicks", "detectors", "truncated"],
    );
    verdict.push(vec![
        r.verdict.as_str().into(),
        r.qb_witness.into(),
        r.mom_witness.into(),
        r.threshold.into(),
        r.max_observed_clicks.into(),
        r.detectors.into(),
        r.truncated().into(),
    ]);
    for t in [clicks, qb, mom, eigen, vectors, verdict] {
        report.table(t);
    }
    Ok(report.emit(args.output.format, args.output.out.as_deref())?)
}
