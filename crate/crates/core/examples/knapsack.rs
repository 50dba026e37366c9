//! Modular objectives reduce to 0/1 knapsack: exact DP, FPTAS and the
//! greedy template on the same instance.

use cleanplan::solvers::{
    greedy, knapsack_dp, knapsack_fptas, modular_maxpr, GreedyOptions, KnapsackMode, StaticBenefit,
};

fn value(v: &[f64], s: &[usize]) -> f64 {
    s.iter().map(|&i| v[i]).sum()
}

fn main() -> cleanplan::Result<()> {
    let values = [6.0, 10.0, 12.0, 7.0, 3.0, 9.0];
    let costs = [1u64, 2, 3, 2, 1, 4];
    let fcosts: Vec<f64> = costs.iter().map(|&c| c as f64).collect();
    let budget = 6;

    let dp = knapsack_dp(&values, &costs, budget);
    println!("dp     {dp:?} value {}", value(&values, &dp));
    for eps in [0.5, 0.1] {
        let s = knapsack_fptas(&values, &fcosts, budget as f64, eps)?;
        println!("fptas  {s:?} value {} (eps {eps})", value(&values, &s));
    }
    let g = greedy(
        &mut StaticBenefit(values.to_vec()),
        &fcosts,
        budget as f64,
        GreedyOptions::default(),
    )?;
    println!("greedy {:?} value {}", g.chosen, g.objective_value);

    // A cheap high-ratio item that would strand the budget.
    let trap = greedy(
        &mut StaticBenefit(vec![0.1, 10.0]),
        &[0.0001, 2.0],
        2.0,
        GreedyOptions::default(),
    )?;
    println!("trap   {:?} value {}", trap.chosen, trap.objective_value);

    let weights: Vec<f64> = values.iter().map(|v| v / 4.0).collect();
    for mode in [KnapsackMode::Exact, KnapsackMode::Fptas(0.75)] {
        let p = modular_maxpr(&weights, &fcosts, budget as f64, 2.0, mode)?;
        println!("maxpr  {:?} p = {:.4} {:?}", p.chosen, p.objective_value, p.notes);
    }
    Ok(())
}
