//! Correlated errors on the bundled 17-object series: covariance-blind and
//! covariance-aware greedy against the exhaustive optimum.

use std::path::PathBuf;

use cleanplan::datagen::with_dependency;
use cleanplan::experiments::{ingest, Algorithm, Instance, Objective, SolveOptions};
use cleanplan::quality::MeasureKind;

fn main() -> cleanplan::Result<()> {
    let data = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data");
    let ing = ingest(
        &data.join("cdc.csv"),
        None,
        &data.join("cdc_claims.json"),
        MeasureKind::Bias,
    )?;
    println!(
        "{:>5} {:>14} {:>12} {:>12}",
        "gamma", "greedy-minvar", "greedy-dep", "opt"
    );
    for g in 0..=9 {
        let gamma = g as f64 / 10.0;
        let inst = Instance::new(
            ing.query(),
            with_dependency(&ing.dataset, gamma)?,
            0.0,
            SolveOptions::default(),
        )?;
        let b = 0.3 * inst.total_cost();
        let mut row = Vec::new();
        for a in [Algorithm::GreedyMinVar, Algorithm::GreedyDep, Algorithm::Opt] {
            let plan = inst.solve(a, Objective::MinVar, b)?;
            row.push(inst.objective(Objective::MinVar, &plan.chosen)?);
        }
        println!("{gamma:>5} {:>14.3} {:>12.3} {:>12.3}", row[0], row[1], row[2]);
    }
    Ok(())
}
