use clap::Args;

use super::{clicks_table, qb_cell};
use crate::args::{ArrayArgs, OutputArgs, StateArgs, StateSpec};
use crate::output::{Report, Table};
use crate::CliError;

#[derive(Args, Debug)]
pub struct TheoryArgs {
    /// State to evaluate; repeat for several states.
    #[arg(long = "state", required = true)]
    pub states: Vec<StateSpec>,
    #[command(flatten)]
    pub state_opts: StateArgs,
    #[command(flatten)]
    pub array: ArrayArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

pub fn run(args: TheoryArgs) -> Result<(), CliError> {
    let cfg = args.array.config()?;
    let mut report = Report::new("theory");
    args.array.record(&mut report, &cfg);
    args.state_opts.record(&mut report);

    let mut summary = Table::new(
        "summary",
        &["state", "parameter", "photons", "eta", "mean_photons", "mean_clicks", "variance", "q_b"],
    );
    let mut dists = Vec::new();
    for (i, spec) in args.states.iter().enumerate() {
        let prepared = spec.prepare(&cfg, &args.state_opts)?;
        let c = prepared
            .analytic
            .ok_or(CliError::Core(clickkit::Error::NonUniformWeightsUnsupported))?;
        let label = format!("{}#{i}", prepared.state.label());
        report.param(&format!("state.{i}"), spec);
        summary.push(vec![
            label.clone().into(),
            prepared.tuned.as_ref().map(|t| t.parameter).into(),
            prepared.tuned.as_ref().and_then(|t| t.photons).into(),
            prepared.config.eta().into(),
            prepared.state.mean().into(),
            c.mean().into(),
            c.variance().into(),
            qb_cell(&c),
        ]);
        dists.push((label, c));
    }
    report.table(summary);
    report.table(clicks_table("clicks", dists));
    Ok(report.emit(args.output.format, args.output.out.as_deref())?)
}
