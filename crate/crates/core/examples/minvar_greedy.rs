//! Greedy MinVar plans on a generated dataset, compared with the naive
//! variance-per-cost order and the exhaustive optimum.

use cleanplan::claims::{window_perturbations, Claim, ClaimSystem, WindowAggregateClaim};
use cleanplan::datagen::{generate, Family, GenSpec};
use cleanplan::evar::EvarEngine;
use cleanplan::quality::{MeasureKind, QualityMeasure, QueryFunction};
use cleanplan::solvers::{bruteforce_opt, greedy_minvar, greedy_naive, Sense};

fn main() -> cleanplan::Result<()> {
    let d = generate(&GenSpec::new(Family::Sm, 14, 3))?;
    let original = WindowAggregateClaim::back_to_back(8, 3);
    let shifts = window_perturbations(&original, d.len(), 6, false)?;
    let sys = ClaimSystem::exp_decay(
        Claim::Window(original),
        shifts.into_iter().map(Claim::Window).collect(),
        1.0,
    )?;
    let f = QueryFunction::Measure(QualityMeasure::new(MeasureKind::Fragility, sys, &d)?);
    let engine = EvarEngine::new(f, d.clone())?;
    println!("EVar(empty) = {:.3}", engine.evar(&[])?);

    let total = d.total_cost();
    println!("{:>7} {:>12} {:>12} {:>12}", "budget", "minvar", "naive", "opt");
    for k in 1..=5 {
        let b = (total * k as f64 / 10.0).round();
        let mv = greedy_minvar(&engine, b)?;
        let nv = greedy_naive(&engine, b)?;
        let opt = bruteforce_opt(&d.costs(), b, Sense::Minimize, |t| engine.evar(t))?;
        println!(
            "{b:>7} {:>12.3} {:>12.3} {:>12.3}",
            mv.objective_value, nv.objective_value, opt.objective_value
        );
    }
    let k = engine.curvature()?;
    println!("curvature {:.3}, bound {:?}", k.kappa, k.ratio_bound());
    Ok(())
}
