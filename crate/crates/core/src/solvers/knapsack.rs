//! 0/1 max-knapsack: exact DP over integer costs, value-scaling FPTAS and a
//! small exhaustive solver.

use super::plan::fits;
use crate::error::{Error, Result};

/// Costs as integers, if every one is integral.
pub fn integer_costs(costs: &[f64]) -> Result<Vec<u64>> {
    costs
        .iter()
        .enumerate()
        .map(|(index, &c)| {
            if c >= 0.0 && c.fract() == 0.0 && c < 1e15 {
                Ok(c as u64)
            } else {
                Err(Error::NonIntegerCost { index, cost: c })
            }
        })
        .collect()
}

/// Rounds costs up and the budget down to multiples of `resolution`, so any
/// plan feasible after scaling is feasible before it.
pub fn scale_costs(costs: &[f64], budget: f64, resolution: f64) -> Result<(Vec<u64>, u64)> {
    if !(resolution > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "cost scale {resolution} must be positive"
        )));
    }
    let c = costs
        .iter()
        .map(|&c| (c / resolution - 1e-9).ceil().max(0.0) as u64)
        .collect();
    let b = (budget / resolution + 1e-9).floor().max(0.0) as u64;
    Ok((c, b))
}

/// Exact maximum of `Σ_{i∈T} vᵢ` subject to `Σ_{i∈T} cᵢ ≤ budget`; `O(n·budget)`.
/// Items with nonpositive value are never taken. Returns indices in increasing order.
pub fn knapsack_dp(values: &[f64], costs: &[u64], budget: u64) -> Vec<usize> {
    let n = values.len();
    let cap = budget as usize;
    let mut best = vec![0.0f64; cap + 1];
    let mut take = vec![false; n * (cap + 1)];
    for i in 0..n {
        let c = costs[i] as usize;
        if values[i] <= 0.0 || c > cap {
            continue;
        }
        for b in (c..=cap).rev() {
            let cand = best[b - c] + values[i];
            if cand > best[b] {
                best[b] = cand;
                take[i * (cap + 1) + b] = true;
            }
        }
    }
    let mut b = cap;
    let mut out = Vec::new();
    for i in (0..n).rev() {
        if take[i * (cap + 1) + b] {
            out.push(i);
            b -= costs[i] as usize;
        }
    }
    out.reverse();
    out
}

/// `(1 − ε)`-approximate knapsack: values are scaled down to
/// `⌊vᵢ·n/(ε·v_max)⌋` and solved exactly by min-cost DP over scaled value.
pub fn knapsack_fptas(values: &[f64], costs: &[f64], budget: f64, epsilon: f64) -> Result<Vec<usize>> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::InvalidArgument(format!("epsilon {epsilon} must lie in (0,1)")));
    }
    let items: Vec<usize> = (0..values.len())
        .filter(|&i| values[i] > 0.0 && fits(0.0, costs[i], budget))
        .collect();
    if items.is_empty() {
        return Ok(Vec::new());
    }
    let vmax = items.iter().map(|&i| values[i]).fold(0.0, f64::max);
    let k = epsilon * vmax / items.len() as f64;
    let scaled: Vec<usize> = items.iter().map(|&i| (values[i] / k).floor() as usize).collect();
    let total: usize = scaled.iter().sum();
    // min_cost[v] = cheapest way to reach scaled value exactly v.
    let mut min_cost = vec![f64::INFINITY; total + 1];
    min_cost[0] = 0.0;
    let mut take = vec![false; items.len() * (total + 1)];
    let mut reach = 0;
    for (j, &i) in items.iter().enumerate() {
        let s = scaled[j];
        for v in (s..=reach + s).rev() {
            let cand = min_cost[v - s] + costs[i];
            if cand < min_cost[v] {
                min_cost[v] = cand;
                take[j * (total + 1) + v] = true;
            }
        }
        reach += s;
    }
    let mut v = (0..=total).rev().find(|&v| fits(0.0, min_cost[v], budget)).unwrap_or(0);
    let mut out = Vec::new();
    for j in (0..items.len()).rev() {
        if take[j * (total + 1) + v] {
            out.push(items[j]);
            v -= scaled[j];
        }
    }
    out.reverse();
    Ok(out)
}

/// Exhaustive knapsack for small `n`.
pub fn knapsack_exhaustive(values: &[f64], costs: &[f64], budget: f64) -> Result<Vec<usize>> {
    let n = values.len();
    if n > 25 {
        return Err(Error::TooLarge { n, max: 25 });
    }
    let mut best = (0.0, 0.0, 0u32);
    for mask in 0u32..(1 << n) {
        let (mut v, mut c) = (0.0, 0.0);
        for i in 0..n {
            if mask & (1 << i) != 0 {
                v += values[i];
                c += costs[i];
            }
        }
        if !fits(0.0, c, budget) {
            continue;
        }
        if v > best.0 || (v == best.0 && c < best.1) {
            best = (v, c, mask);
        }
    }
    Ok((0..n).filter(|i| best.2 & (1 << i) != 0).collect())
}
