//! MinVar and MaxPr plans scored under both objectives, with current values
//! at the means (as bundled) and with current values redrawn.

use std::path::PathBuf;

use cleanplan::experiments::{compare_objectives, ingest, write_compare, Budgets, MaxPrAlgorithm};
use cleanplan::quality::MeasureKind;

fn main() -> cleanplan::Result<()> {
    let data = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data");
    let ing = ingest(
        &data.join("adoptions.csv"),
        None,
        &data.join("adoptions_claims.json"),
        MeasureKind::Bias,
    )?;
    let f = ing.query();
    let budgets = Budgets::Grid(6).resolve(ing.dataset.total_cost())?;

    println!("current values at the means");
    let rows = compare_objectives(&f, &ing.dataset, ing.claims.tau, &budgets, 0, 0, MaxPrAlgorithm::Greedy)?;
    write_compare(&rows, std::io::stdout().lock())?;

    println!("current values redrawn (20 repetitions)");
    let rows = compare_objectives(
        &f,
        &ing.dataset,
        ing.claims.tau,
        &budgets,
        20,
        3,
        MaxPrAlgorithm::Greedy,
    )?;
    write_compare(&rows, std::io::stdout().lock())
}
