//! The benefit-per-cost greedy template and its benefit functions.

use super::plan::{fits, CleaningPlan, PlanStep};
use crate::error::Result;
use crate::evar::EvarEngine;
use crate::maxpr::MaxPrEvaluator;
use crate::model::{CovMatrix, Dataset};
use crate::quality::QueryFunction;

/// Estimated value of cleaning `candidate` once `chosen` is cleaned.
pub trait Benefit {
    fn benefit(&mut self, chosen: &[usize], candidate: usize) -> Result<f64>;

    /// Whether any benefit so far was estimated rather than computed.
    fn approximate(&self) -> bool {
        false
    }
}

/// A fixed benefit per object.
#[derive(Debug, Clone)]
pub struct StaticBenefit(pub Vec<f64>);

impl Benefit for StaticBenefit {
    fn benefit(&mut self, _: &[usize], candidate: usize) -> Result<f64> {
        Ok(self.0[candidate])
    }
}

/// `Var(Xᵢ)` for objects the query reads, 0 for the rest.
pub fn naive_benefit(query: &QueryFunction, dataset: &Dataset) -> StaticBenefit {
    let r = query.referenced(dataset.len());
    StaticBenefit(
        dataset
            .objects
            .iter()
            .zip(r)
            .map(|(o, used)| if used { o.variance() } else { 0.0 })
            .collect(),
    )
}

/// Decrease in `EVar` from cleaning the candidate next.
pub struct MinVarBenefit<'a> {
    pub engine: &'a EvarEngine,
    approximate: bool,
}

impl<'a> MinVarBenefit<'a> {
    pub fn new(engine: &'a EvarEngine) -> Self {
        MinVarBenefit {
            engine,
            approximate: false,
        }
    }
}

impl Benefit for MinVarBenefit<'_> {
    fn benefit(&mut self, chosen: &[usize], candidate: usize) -> Result<f64> {
        let g = self.engine.gain(chosen, candidate)?;
        self.approximate |= g.approximate;
        Ok(g.value)
    }

    fn approximate(&self) -> bool {
        self.approximate
    }
}

/// Increase in the deviation probability from cleaning the candidate next.
pub struct MaxPrBenefit<'a> {
    pub eval: &'a MaxPrEvaluator,
    approximate: bool,
}

impl<'a> MaxPrBenefit<'a> {
    pub fn new(eval: &'a MaxPrEvaluator) -> Self {
        MaxPrBenefit {
            eval,
            approximate: false,
        }
    }
}

impl Benefit for MaxPrBenefit<'_> {
    fn benefit(&mut self, chosen: &[usize], candidate: usize) -> Result<f64> {
        let (p0, a0) = self.eval.probability(chosen)?;
        let mut with = chosen.to_vec();
        with.push(candidate);
        let (p1, a1) = self.eval.probability(&with)?;
        self.approximate |= a0 || a1;
        Ok(p1 - p0)
    }

    fn approximate(&self) -> bool {
        self.approximate
    }
}

/// Exact decrease of the residual `Σ_{p,q∉T} a_p a_q Cov(p,q)` from adding the candidate.
pub struct DepBenefit<'a> {
    pub weights: &'a [f64],
    pub cov: &'a CovMatrix,
}

impl Benefit for DepBenefit<'_> {
    fn benefit(&mut self, chosen: &[usize], i: usize) -> Result<f64> {
        let a = self.weights;
        let mut cross = 0.0;
        for q in 0..a.len() {
            if q != i && !chosen.contains(&q) {
                cross += a[q] * self.cov.get(i, q);
            }
        }
        Ok(2.0 * a[i] * cross + a[i] * a[i] * self.cov.get(i, i))
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct GreedyOptions {
    /// Rank by benefit alone, ignoring cost (costs still bound the plan).
    pub cost_blind: bool,
    /// Stop as soon as the best remaining benefit is negative.
    pub stop_on_negative: bool,
}

/// Adds the affordable object with the best benefit per cost until nothing
/// fits, then swaps the plan for the single affordable object with the largest
/// stand-alone benefit if that beats the plan's recorded benefit. Ties go to
/// the lowest index. `objective_value` is the total recorded benefit.
pub fn greedy(benefit: &mut dyn Benefit, costs: &[f64], budget: f64, opts: GreedyOptions) -> Result<CleaningPlan> {
    let n = costs.len();
    let mut chosen: Vec<usize> = Vec::new();
    let mut taken = vec![false; n];
    let mut trace = Vec::new();
    let mut total = 0.0;
    loop {
        let mut best: Option<(usize, f64, f64)> = None;
        for i in 0..n {
            if taken[i] || !fits(total, costs[i], budget) {
                continue;
            }
            let b = benefit.benefit(&chosen, i)?;
            let r = if opts.cost_blind { b } else { b / costs[i] };
            if best.is_none_or(|(_, _, br)| r > br) {
                best = Some((i, b, r));
            }
        }
        let Some((i, b, _)) = best else { break };
        if opts.stop_on_negative && b < 0.0 {
            break;
        }
        taken[i] = true;
        chosen.push(i);
        total += costs[i];
        trace.push(PlanStep {
            index: i,
            benefit: b,
            cost: costs[i],
        });
    }
    let gathered: f64 = trace.iter().map(|s| s.benefit).sum();
    let mut single: Option<(usize, f64)> = None;
    for i in 0..n {
        if taken[i] || !fits(0.0, costs[i], budget) {
            continue;
        }
        let b = benefit.benefit(&[], i)?;
        if single.is_none_or(|(_, sb)| b > sb) {
            single = Some((i, b));
        }
    }
    if let Some((i, b)) = single {
        if b > gathered {
            trace = vec![PlanStep {
                index: i,
                benefit: b,
                cost: costs[i],
            }];
        }
    }
    let value = trace.iter().map(|s| s.benefit).sum();
    let mut plan = CleaningPlan::from_trace("greedy", trace, value);
    plan.approximate = benefit.approximate();
    Ok(plan)
}

/// Greedy on `Var(Xᵢ)/cᵢ`; the reported objective is `EVar` of the plan.
pub fn greedy_naive(engine: &EvarEngine, budget: f64) -> Result<CleaningPlan> {
    let mut b = naive_benefit(engine.query(), engine.dataset());
    let mut plan = greedy(&mut b, &engine.dataset().costs(), budget, GreedyOptions::default())?;
    plan.algorithm = "greedy-naive".into();
    plan.objective_value = engine.evar(&plan.chosen)?;
    Ok(plan)
}

/// Greedy on `Var(Xᵢ)` alone, most uncertain first.
pub fn greedy_naive_cost_blind(engine: &EvarEngine, budget: f64) -> Result<CleaningPlan> {
    let mut b = naive_benefit(engine.query(), engine.dataset());
    let opts = GreedyOptions {
        cost_blind: true,
        ..Default::default()
    };
    let mut plan = greedy(&mut b, &engine.dataset().costs(), budget, opts)?;
    plan.algorithm = "greedy-naive-costblind".into();
    plan.objective_value = engine.evar(&plan.chosen)?;
    Ok(plan)
}

/// Greedy on the exact marginal decrease of `EVar`, recomputed every round.
pub fn greedy_minvar(engine: &EvarEngine, budget: f64) -> Result<CleaningPlan> {
    let mut b = MinVarBenefit::new(engine);
    let mut plan = greedy(&mut b, &engine.dataset().costs(), budget, GreedyOptions::default())?;
    plan.algorithm = "greedy-minvar".into();
    plan.objective_value = match engine.evar(&plan.chosen) {
        Ok(v) => v,
        Err(_) if plan.approximate => {
            engine.evar(&[]).unwrap_or(f64::NAN) - plan.trace.iter().map(|s| s.benefit).sum::<f64>()
        }
        Err(e) => return Err(e),
    };
    Ok(plan)
}

/// Greedy on the increase of the deviation probability. It stops early once
/// every remaining object would lower the probability.
pub fn greedy_maxpr(eval: &MaxPrEvaluator, budget: f64) -> Result<CleaningPlan> {
    let mut b = MaxPrBenefit::new(eval);
    let opts = GreedyOptions {
        stop_on_negative: true,
        ..Default::default()
    };
    let mut plan = greedy(&mut b, &eval.dataset().costs(), budget, opts)?;
    plan.algorithm = "greedy-maxpr".into();
    let (p, approx) = eval.probability(&plan.chosen)?;
    plan.objective_value = p;
    plan.approximate |= approx;
    Ok(plan)
}

/// Greedy on the exact decrease of the correlated residual variance of a linear query.
/// Under negative cross terms that residual can grow, so it stops at the first
/// negative benefit.
pub fn greedy_dep(weights: &[f64], cov: &CovMatrix, costs: &[f64], budget: f64) -> Result<CleaningPlan> {
    let mut b = DepBenefit { weights, cov };
    let opts = GreedyOptions {
        stop_on_negative: true,
        ..Default::default()
    };
    let mut plan = greedy(&mut b, costs, budget, opts)?;
    plan.algorithm = "greedy-dep".into();
    plan.objective_value = crate::evar::linear_residual(weights, cov, &plan.chosen);
    Ok(plan)
}
