//! The curvature-bounded solver on overlapping threshold indicators.

use cleanplan::datagen::{generate, Family, GenSpec};
use cleanplan::evar::EvarEngine;
use cleanplan::quality::{IndicatorTerm, QueryFunction};
use cleanplan::solvers::{bruteforce_opt, greedy_minvar, plan_curvature, submodular_best, Sense};

fn main() -> cleanplan::Result<()> {
    let d = generate(&GenSpec::new(Family::Ur, 10, 5).with_range(1.0, 20.0))?;
    let terms = (0..4)
        .map(|k| IndicatorTerm::sum_below(&[2 * k, 2 * k + 1, 2 * k + 2], 30.0))
        .collect();
    let engine = EvarEngine::new(QueryFunction::Indicators(terms), d.clone())?;
    let k = engine.curvature()?;
    println!("EVar(empty) = {:.4}, curvature {:.3}", engine.evar(&[])?, k.kappa);

    for frac in [0.1, 0.25, 0.5, 0.75] {
        let b = (d.total_cost() * frac).floor();
        let best = submodular_best(&engine, b)?;
        let g = greedy_minvar(&engine, b)?;
        let opt = bruteforce_opt(&d.costs(), b, Sense::Minimize, |t| engine.evar(t))?;
        println!(
            "budget {b:>4}: best {:.4} {:?} (plan curvature {:.3?})  greedy {:.4}  opt {:.4}",
            best.objective_value,
            best.notes,
            plan_curvature(&best),
            g.objective_value,
            opt.objective_value
        );
    }
    Ok(())
}
