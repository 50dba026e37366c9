//! Subset-selection algorithms for cleaning plans.

mod greedy;
mod knapsack;
mod plan;

pub use greedy::{
    greedy, greedy_dep, greedy_maxpr, greedy_minvar, greedy_naive, greedy_naive_cost_blind, naive_benefit, Benefit,
    DepBenefit, GreedyOptions, MaxPrBenefit, MinVarBenefit, StaticBenefit,
};
pub use knapsack::{integer_costs, knapsack_dp, knapsack_exhaustive, knapsack_fptas, scale_costs};
pub use plan::{fits, CleaningPlan, PlanStep, PLAN_HEADER};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::evar::EvarEngine;
use crate::maxpr::MEANINGFUL_PROBABILITY;
use crate::model::{phi, Dataset};
use crate::quality::LinearForm;

pub const BRUTEFORCE_MAX: usize = 25;
pub const MAXPR_FPTAS_EPSILON: f64 = 0.75;

/// How a modular knapsack is solved.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum KnapsackMode {
    /// DP over integer costs; fails on fractional costs.
    Exact,
    /// DP after rounding costs up (and the budget down) to this resolution.
    Scaled(f64),
    Fptas(f64),
}

/// Solves a max-knapsack in the requested mode.
pub fn solve_knapsack(values: &[f64], costs: &[f64], budget: f64, mode: KnapsackMode) -> Result<Vec<usize>> {
    match mode {
        KnapsackMode::Exact => {
            let c = integer_costs(costs)?;
            Ok(knapsack_dp(values, &c, budget.max(0.0).floor() as u64))
        }
        KnapsackMode::Scaled(res) => {
            let (c, b) = scale_costs(costs, budget, res)?;
            Ok(knapsack_dp(values, &c, b))
        }
        KnapsackMode::Fptas(eps) => knapsack_fptas(values, costs, budget, eps),
    }
}

/// Optimal plan for `EVar(T) = Σw − Σ_{i∈T} wᵢ` with `wᵢ = aᵢ²Var(Xᵢ)`.
pub fn modular_minvar_exact(weights: &[f64], costs: &[f64], budget: f64) -> Result<CleaningPlan> {
    modular_minvar(weights, costs, budget, KnapsackMode::Exact)
}

pub fn modular_minvar(weights: &[f64], costs: &[f64], budget: f64, mode: KnapsackMode) -> Result<CleaningPlan> {
    let chosen = solve_knapsack(weights, costs, budget, mode)?;
    let total: f64 = weights.iter().sum();
    let got: f64 = chosen.iter().map(|&i| weights[i]).sum();
    let name = match mode {
        KnapsackMode::Fptas(_) => "modular-minvar-fptas",
        _ => "modular-minvar-dp",
    };
    let mut plan = CleaningPlan::new(name, chosen, costs, (total - got).max(0.0));
    for s in &mut plan.trace {
        s.benefit = weights[s.index];
    }
    plan.approximate = matches!(mode, KnapsackMode::Fptas(_));
    Ok(plan)
}

/// `wᵢ = aᵢ²Var(Xᵢ)` for a linear query.
pub fn modular_weights(form: &LinearForm, dataset: &Dataset) -> Vec<f64> {
    form.weights
        .iter()
        .zip(&dataset.objects)
        .map(|(a, o)| a * a * o.variance())
        .collect()
}

/// Maximizes `S = Σ_{i∈T} aᵢ²σᵢ²`, which maximizes `Φ(−τ/√S)` for centered
/// independent normals; the plan's objective is that probability.
pub fn modular_maxpr(
    weights: &[f64],
    costs: &[f64],
    budget: f64,
    tau: f64,
    mode: KnapsackMode,
) -> Result<CleaningPlan> {
    let chosen = solve_knapsack(weights, costs, budget, mode)?;
    let s: f64 = chosen.iter().map(|&i| weights[i]).sum();
    let p = if s > 0.0 {
        phi(-tau / s.sqrt())
    } else if tau > 0.0 {
        0.0
    } else {
        return Err(Error::IllPosed("no variance to clean with tau = 0".into()));
    };
    let name = match mode {
        KnapsackMode::Fptas(_) => "modular-maxpr-fptas",
        _ => "modular-maxpr-dp",
    };
    let mut plan = CleaningPlan::new(name, chosen, costs, p);
    for st in &mut plan.trace {
        st.benefit = weights[st.index];
    }
    if p < MEANINGFUL_PROBABILITY {
        plan.notes
            .push(format!("probability {p} is below {MEANINGFUL_PROBABILITY}"));
    }
    Ok(plan)
}

/// [`modular_maxpr`] for a dataset, which must consist of normal objects.
pub fn modular_maxpr_for(
    form: &LinearForm,
    dataset: &Dataset,
    budget: f64,
    tau: f64,
    mode: KnapsackMode,
) -> Result<CleaningPlan> {
    if let Some(o) = dataset.objects.iter().find(|o| o.dist.as_normal().is_none()) {
        return Err(Error::NonNormal { id: o.id.clone() });
    }
    modular_maxpr(&modular_weights(form, dataset), &dataset.costs(), budget, tau, mode)
}

/// [`greedy_dep`] on a dataset's covariance matrix.
pub fn greedy_dep_for(form: &LinearForm, dataset: &Dataset, budget: f64) -> Result<CleaningPlan> {
    let cov = dataset.covariance.as_ref().ok_or(Error::MissingCovariance)?;
    greedy_dep(&form.weights, cov, &dataset.costs(), budget)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Sense {
    Minimize,
    Maximize,
}

/// Exhaustive optimum over every affordable subset. Ties (within 1e-12
/// relative) go to the cheaper subset, then the lexicographically smaller
/// index list.
pub fn bruteforce_opt(
    costs: &[f64],
    budget: f64,
    sense: Sense,
    mut eval: impl FnMut(&[usize]) -> Result<f64>,
) -> Result<CleaningPlan> {
    let n = costs.len();
    if n > BRUTEFORCE_MAX {
        return Err(Error::TooLarge { n, max: BRUTEFORCE_MAX });
    }
    let mut best: Option<(f64, f64, Vec<usize>)> = None;
    let mut subset = Vec::with_capacity(n);
    for mask in 0u32..(1u32 << n) {
        subset.clear();
        let mut c = 0.0;
        for i in 0..n {
            if mask & (1 << i) != 0 {
                subset.push(i);
                c += costs[i];
            }
        }
        if !fits(0.0, c, budget) {
            continue;
        }
        let v = eval(&subset)?;
        let better = match &best {
            None => true,
            Some((bv, bc, bs)) => {
                let tol = 1e-12 * bv.abs().max(v.abs()).max(1e-300);
                let d = match sense {
                    Sense::Minimize => bv - v,
                    Sense::Maximize => v - bv,
                };
                if d > tol {
                    true
                } else if d < -tol {
                    false
                } else {
                    c < *bc || (c == *bc && subset.as_slice() < bs.as_slice())
                }
            }
        };
        if better {
            best = Some((v, c, subset.clone()));
        }
    }
    let (v, _, s) = best.expect("the empty plan is always affordable");
    Ok(CleaningPlan::new("opt", s, costs, v))
}

/// Oracle for the modular subproblems inside [`submodular_best`].
fn cover_oracle(weights: &[f64], costs: &[f64], budget: f64) -> Result<Vec<usize>> {
    match integer_costs(costs) {
        Ok(c) => Ok(knapsack_dp(weights, &c, budget.max(0.0).floor() as u64)),
        Err(_) if costs.len() <= 20 => knapsack_exhaustive(weights, costs, budget),
        Err(_) => knapsack_fptas(weights, costs, budget, 0.01),
    }
}

/// Iterated modular upper bounds on the complement objective
/// `ĒVar(S) = EVar(O ∖ S)` under the cover constraint `Σ_S c ≥ Σc − C`.
///
/// The bound tight at the incumbent `X` is
/// `ĒVar(S) ≤ ĒVar(X) − Σ_{j∈X∖S} gap_j(X) + Σ_{j∈S∖X} gain_j(∅)`, so
/// minimizing it is a knapsack over the cleaned set `O ∖ S` with weight
/// `gap_j(X)` for `j ∈ X` and `gain_j(∅)` otherwise.
pub fn submodular_best(engine: &EvarEngine, budget: f64) -> Result<CleaningPlan> {
    const ROUNDS: usize = 50;
    let n = engine.len();
    let costs = engine.dataset().costs();
    let all: Vec<usize> = (0..n).collect();
    let complement = |s: &[bool]| -> Vec<usize> { all.iter().copied().filter(|&i| !s[i]).collect() };
    let hbar = |s: &[bool]| engine.evar(&complement(s));
    let h_empty = engine.evar(&all)?;
    if fits(0.0, costs.iter().sum(), budget) {
        let mut plan = CleaningPlan::new("best", all.clone(), &costs, h_empty);
        plan.notes.push("rounds=0".into());
        return Ok(plan);
    }
    let gain0: Vec<f64> = (0..n)
        .map(|j| {
            let mut s = vec![false; n];
            s[j] = true;
            Ok(hbar(&s)? - h_empty)
        })
        .collect::<Result<_>>()?;
    let mut incumbent: Option<(Vec<bool>, f64)> = None;
    let mut rounds = 0;
    for _ in 0..ROUNDS {
        rounds += 1;
        let weights: Vec<f64> = match &incumbent {
            None => gain0.clone(),
            Some((x, hx)) => (0..n)
                .map(|j| {
                    if x[j] {
                        let mut y = x.clone();
                        y[j] = false;
                        Ok((hx - hbar(&y)?).max(0.0))
                    } else {
                        Ok(gain0[j])
                    }
                })
                .collect::<Result<_>>()?,
        };
        let cleaned = cover_oracle(&weights, &costs, budget)?;
        let mut s = vec![true; n];
        for &i in &cleaned {
            s[i] = false;
        }
        let hs = hbar(&s)?;
        match &incumbent {
            Some((x, hx)) if !(hs < hx - 1e-9 * hx.abs()) || *x == s => break,
            _ => incumbent = Some((s, hs)),
        }
    }
    let (x, hx) = incumbent.expect("at least one round");
    let cleaned = complement(&x);
    let mut plan = CleaningPlan::new("best", cleaned, &costs, hx);
    plan.notes.push(format!("rounds={rounds}"));
    match engine.curvature() {
        Ok(k) => {
            plan.notes.push(format!("curvature={}", k.kappa));
            if k.fully_curved {
                plan.notes
                    .push("curvature is 1: only the O(sqrt(n) log n) guarantee applies".into());
            }
        }
        Err(Error::CurvatureUndefined) => plan.notes.push("curvature undefined".into()),
        Err(e) => return Err(e),
    }
    Ok(plan)
}

/// Reads the curvature note written by [`submodular_best`].
pub fn plan_curvature(plan: &CleaningPlan) -> Option<f64> {
    plan.notes
        .iter()
        .find_map(|n| n.strip_prefix("curvature=")?.parse().ok())
}

/// Cleans objects in a seeded random order while they fit.
pub fn random_plan(costs: &[f64], budget: f64, seed: u64) -> CleaningPlan {
    let mut order: Vec<usize> = (0..costs.len()).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let mut total = 0.0;
    let mut chosen = Vec::new();
    for i in order {
        if fits(total, costs[i], budget) {
            total += costs[i];
            chosen.push(i);
        }
    }
    CleaningPlan::new("random", chosen, costs, f64::NAN)
}
