//! Small hand-checkable instances: a Bernoulli threshold query and two
//! uniform objects whose MinVar and MaxPr choices differ.

use cleanplan::claims::{Claim, ClaimSystem};
use cleanplan::evar::{evar_bruteforce, EvarEngine};
use cleanplan::maxpr::maxpr_exact;
use cleanplan::model::{Dataset, DiscreteDist, UncertainObject, DEFAULT_CAP};
use cleanplan::quality::{query_distribution, IndicatorTerm, MeasureKind, QualityMeasure, QueryFunction};
use cleanplan::solvers::{greedy_minvar, greedy_naive};

fn main() -> cleanplan::Result<()> {
    let bern = Dataset::new(vec![
        UncertainObject::new("x1", 0.0, 1.0, DiscreteDist::bernoulli(0.5)?),
        UncertainObject::new("x2", 0.0, 1.0, DiscreteDist::bernoulli(1.0 / 3.0)?),
        UncertainObject::new("x3", 0.0, 1.0, DiscreteDist::bernoulli(0.25)?),
    ])?;
    let f = QueryFunction::Indicators(vec![IndicatorTerm::sum_below(&[0, 1, 2], 3.0)]);
    let prior = query_distribution(&f, &bern, DEFAULT_CAP)?;
    println!(
        "Pr[f = 0] = {:.6}  Var(f) = {:.6}",
        prior.prob_of(0.0),
        prior.variance()
    );
    println!("EVar({{x1}}) = {:.6}", evar_bruteforce(&f, &bern, &[0])?);

    let d = Dataset::new(vec![
        UncertainObject::new("x1", 1.0, 1.0, DiscreteDist::uniform(&[0.0, 0.5, 1.0, 1.5, 2.0])?),
        UncertainObject::new("x2", 1.0, 1.0, DiscreteDist::uniform(&[1.0 / 3.0, 1.0, 5.0 / 3.0])?),
    ])?;
    let q = Claim::linear(vec![1.0, 1.0]);
    let sys = ClaimSystem::uniform(q.clone(), vec![q])?;
    let bias = QueryFunction::Measure(QualityMeasure::new(MeasureKind::Bias, sys, &d)?);
    let u = d.current_values();
    for (name, t) in [("x1", [0]), ("x2", [1])] {
        println!(
            "clean {name}: EVar = {:.6}  Pr[drop >= 7/12] = {:.6}",
            evar_bruteforce(&bias, &d, &t)?,
            maxpr_exact(&bias, &d, &u, &t, 7.0 / 12.0)?
        );
    }

    let small = QueryFunction::Indicators(vec![IndicatorTerm::sum_below(&[0, 1], 11.0 / 12.0)]);
    let engine = EvarEngine::new(small, d.clone())?;
    println!(
        "budget 1: greedy-minvar cleans {:?}, greedy-naive cleans {:?}",
        d.ids(&greedy_minvar(&engine, 1.0)?.chosen),
        d.ids(&greedy_naive(&engine, 1.0)?.chosen)
    );
    Ok(())
}
