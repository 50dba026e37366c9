//! Budget sweep over the bundled 40-object uniqueness instance, written as CSV.

use std::path::PathBuf;

use cleanplan::experiments::{run_sweep, write_sweep, Algorithm, Budgets, Objective, SolveOptions, SweepConfig};
use cleanplan::quality::MeasureKind;

fn main() -> cleanplan::Result<()> {
    let data = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data");
    let cfg = SweepConfig {
        dataset: data.join("ur40.csv"),
        covariance: None,
        claims: data.join("ur40_uniqueness.json"),
        measure: MeasureKind::Duplicity,
        objective: Objective::MinVar,
        algorithms: vec![
            Algorithm::GreedyMinVar,
            Algorithm::GreedyNaive,
            Algorithm::Best,
            Algorithm::Random,
        ],
        budgets: Budgets::Grid(11),
        options: SolveOptions::default(),
        tau: None,
        out: None,
    };
    let rows = run_sweep(&cfg)?;
    write_sweep(&rows, std::io::stdout().lock())
}
