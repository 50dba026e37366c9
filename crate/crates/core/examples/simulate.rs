//! Cleaning against hidden true values: how fast each plan finds a counter
//! to the bundled adoptions claim.

use std::path::PathBuf;

use cleanplan::experiments::{
    first_counter_budget, simulate, Algorithm, Budgets, Objective, SimulationConfig, SolveOptions, SweepConfig,
};
use cleanplan::quality::MeasureKind;

fn main() -> cleanplan::Result<()> {
    let data = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data");
    let algorithms = vec![Algorithm::GreedyMaxPr, Algorithm::GreedyMinVar, Algorithm::GreedyNaive];
    let cfg = SimulationConfig {
        sweep: SweepConfig {
            dataset: data.join("adoptions.csv"),
            covariance: None,
            claims: data.join("adoptions_claims.json"),
            measure: MeasureKind::Bias,
            objective: Objective::MaxPr,
            algorithms: algorithms.clone(),
            budgets: Budgets::Grid(51),
            options: SolveOptions::default(),
            tau: None,
            out: None,
        },
        truth_seed: 1,
        repetitions: 100,
    };
    let rows = simulate(&cfg)?;
    let total = rows.iter().map(|r| r.budget).fold(0.0, f64::max);
    for a in algorithms {
        match first_counter_budget(&rows, a, 0.2) {
            Some(b) => println!(
                "{:>14}: counter in 20% of draws from {:.0}% of the budget",
                a.name(),
                100.0 * b / total
            ),
            None => println!("{:>14}: no budget reaches a 20% counter rate", a.name()),
        }
    }
    Ok(())
}
