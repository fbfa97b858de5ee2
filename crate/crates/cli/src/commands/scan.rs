use clap::{Args, ValueEnum};
use clickkit::recipes::{flux_grid, run_scan, Family, ScanConfig};

use super::simulate::RunArgs;
use crate::args::{ArrayArgs, OutputArgs};
use crate::output::{Report, Table};
use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FamilyChoice {
    Coherent,
    Laser,
    Fock,
    Thermal,
}

#[derive(Args, Debug)]
pub struct ScanArgs {
    #[arg(long, value_enum)]
    pub family: FamilyChoice,
    /// Relative intensity noise of the laser family.
    #[arg(long, default_value_t = clickkit::recipes::DEFAULT_LASER_NOISE)]
    pub noise: f64,
    /// Explicit ⟨k⟩ targets.
    #[arg(long, value_delimiter = ',', conflicts_with = "grid")]
    pub clicks: Option<Vec<f64>>,
    /// Grid `LO:HI:POINTS` of ⟨k⟩ targets.
    #[arg(long, default_value = "0.05:2:8")]
    pub grid: String,
    /// Space the grid logarithmically.
    #[arg(long)]
    pub log: bool,
    #[command(flatten)]
    pub array: ArrayArgs,
    #[command(flatten)]
    pub run: RunArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

fn parse_grid(text: &str) -> Result<(f64, f64, usize), CliError> {
    let bad = || CliError::Usage(format!("grid `{text}` is not LO:HI:POINTS"));
    let parts: Vec<&str> = text.split(':').collect();
    let [lo, hi, n] = parts[..] else { return Err(bad()) };
    Ok((
        lo.parse().map_err(|_| bad())?,
        hi.parse().map_err(|_| bad())?,
        n.parse().map_err(|_| bad())?,
    ))
}

pub fn run(args: ScanArgs) -> Result<(), CliError> {
    let cfg = args.array.config()?;
    let family = match args.family {
        FamilyChoice::Coherent => Family::Coherent,
        FamilyChoice::Laser => Family::Laser { noise: args.noise },
        FamilyChoice::Fock => Family::Fock,
        FamilyChoice::Thermal => Family::Thermal,
    };
    let targets = match &args.clicks {
        Some(list) => list.clone(),
        None => {
            let (lo, hi, n) = parse_grid(&args.grid)?;
            flux_grid(lo, hi, n, args.log)?
        }
    };

    let mut report = Report::new("scan");
    report.param("family", family.name());
    if let Family::Laser { noise } = family {
        report.param("noise", noise);
    }
    report.param("targets", crate::args::join(&targets));
    args.array.record(&mut report, &cfg);
    args.run.record(&mut report);

    let points = run_scan(&ScanConfig {
        family,
        config: cfg,
        targets,
        windows: args.run.windows,
        seed: args.run.seed,
        window_ns: args.run.delta_tau_ns,
        mode: args.run.mode(),
    })?;

    let mut table = Table::new(
        "scan",
        &[
            "index", "target_clicks", "parameter", "photons", "eta", "seed", "exact_mean_clicks", "q_b_exact",
            "mean_clicks", "q_b", "sigma", "n_windows",
        ],
    );
    for p in &points {
        table.push(vec![
            p.index.into(),
            p.target_clicks.into(),
            p.tuned.parameter.into(),
            p.tuned.photons.into(),
            p.tuned.config.eta().into(),
            p.seed.into(),
            p.tuned.mean_clicks.into(),
            p.analytic_qb.into(),
            p.estimate.mean_clicks.into(),
            p.estimate.value.into(),
            p.estimate.sigma.into(),
            p.estimate.n_windows.into(),
        ]);
    }
    report.table(table);
    Ok(report.emit(args.output.format, args.output.out.as_deref())?)
}
