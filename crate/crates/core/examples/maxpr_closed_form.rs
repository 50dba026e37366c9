//! Deviation probability for centered normal objects: closed form against
//! Monte Carlo, and the greedy plan that maximizes it.

use cleanplan::maxpr::{maxpr_montecarlo, maxpr_normal_linear, MaxPrEvaluator};
use cleanplan::model::{Dataset, NormalSpec, UncertainObject};
use cleanplan::quality::{LinearForm, QueryFunction};
use cleanplan::solvers::greedy_maxpr;

fn main() -> cleanplan::Result<()> {
    let sigmas = [3.0, 1.0, 2.5, 0.5, 4.0, 1.5];
    let costs = [5.0, 1.0, 3.0, 1.0, 6.0, 2.0];
    let objects = sigmas
        .iter()
        .zip(costs)
        .enumerate()
        .map(|(i, (&s, c))| UncertainObject::new(format!("x{i}"), 10.0, c, NormalSpec::new(10.0, s).unwrap()))
        .collect();
    let d = Dataset::new(objects)?;
    let form = LinearForm {
        weights: vec![1.0, -1.0, 0.5, 2.0, 1.0, -0.5],
        offset: 0.0,
    };
    let u = d.current_values();
    let tau = 3.0;
    let t = [0, 2, 4];
    let closed = maxpr_normal_linear(&form, &d, &u, &t, tau)?;
    let f = QueryFunction::Linear(form);
    let (mc, se) = maxpr_montecarlo(&f, &d, &u, &t, tau, 100_000, 1)?;
    println!(
        "clean {:?}: closed form {closed:.5}, Monte Carlo {mc:.5} (se {se:.5})",
        d.ids(&t)
    );

    let eval = MaxPrEvaluator::new(f, d.clone(), tau)?;
    for b in [2.0, 5.0, 9.0, 18.0] {
        let plan = greedy_maxpr(&eval, b)?;
        println!(
            "budget {b:>4}: {:?} p = {:.4}",
            d.ids(&plan.chosen),
            plan.objective_value
        );
    }
    Ok(())
}
