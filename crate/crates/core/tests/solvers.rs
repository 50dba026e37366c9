mod common;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use cleanplan::datagen::inject_dependency;
use cleanplan::evar::{linear_residual, EvarEngine};
use cleanplan::maxpr::{maxpr_normal_linear, MaxPrEvaluator};
use cleanplan::model::{phi, CovMatrix, Dataset, NormalSpec, UncertainObject};
use cleanplan::quality::{IndicatorTerm, LinearForm, QueryFunction};
use cleanplan::solvers::{
    bruteforce_opt, greedy, greedy_dep, greedy_dep_for, greedy_maxpr, greedy_minvar, knapsack_dp, knapsack_exhaustive,
    knapsack_fptas, modular_maxpr, modular_minvar, modular_minvar_exact, plan_curvature, random_plan, submodular_best,
    GreedyOptions, KnapsackMode, Sense, StaticBenefit,
};
use cleanplan::Error;
use common::*;

fn value(values: &[f64], chosen: &[usize]) -> f64 {
    chosen.iter().map(|&i| values[i]).sum()
}

fn opt_value(values: &[f64], costs: &[f64], budget: f64) -> f64 {
    let plan = bruteforce_opt(costs, budget, Sense::Maximize, |t| Ok(value(values, t))).unwrap();
    plan.objective_value
}

fn random_knapsack(r: &mut impl Rng, n: usize, integer: bool) -> (Vec<f64>, Vec<f64>, f64) {
    let values: Vec<f64> = (0..n).map(|_| r.random_range(0.01..10.0)).collect();
    let costs: Vec<f64> = (0..n)
        .map(|_| {
            if integer {
                r.random_range(1..=10) as f64
            } else {
                r.random_range(0.1..10.0)
            }
        })
        .collect();
    let total: f64 = costs.iter().sum();
    let budget = if integer {
        r.random_range(0..=total as u64) as f64
    } else {
        r.random_range(0.0..total)
    };
    (values, costs, budget)
}

#[test]
fn dp_equals_brute_force() {
    let mut r = ChaCha8Rng::seed_from_u64(1);
    for _ in 0..200 {
        let n = r.random_range(1..=15);
        let (v, c, b) = random_knapsack(&mut r, n, true);
        let ic: Vec<u64> = c.iter().map(|x| *x as u64).collect();
        let got = value(&v, &knapsack_dp(&v, &ic, b as u64));
        let opt = opt_value(&v, &c, b);
        assert!((got - opt).abs() <= 1e-9 * opt.max(1.0), "{got} vs {opt}");
    }
}

#[test]
fn fptas_meets_its_bound() {
    let mut r = ChaCha8Rng::seed_from_u64(2);
    for eps in [0.1, 0.25, 0.5] {
        for _ in 0..200 {
            let n = r.random_range(1..=12);
            let (v, c, b) = random_knapsack(&mut r, n, false);
            let plan = knapsack_fptas(&v, &c, b, eps).unwrap();
            assert!(value(&c, &plan) <= b * (1.0 + 1e-12));
            let opt = opt_value(&v, &c, b);
            assert!(
                value(&v, &plan) >= (1.0 - eps) * opt - 1e-9,
                "eps {eps}: {} < {opt}",
                value(&v, &plan)
            );
        }
    }
}

#[test]
fn fptas_small_cases() {
    assert_eq!(knapsack_fptas(&[3.0], &[2.0], 2.0, 0.5).unwrap(), vec![0]);
    let mut r = ChaCha8Rng::seed_from_u64(3);
    let mut equal = 0;
    for _ in 0..50 {
        let (v, c, b) = random_knapsack(&mut r, 12, false);
        let got = value(&v, &knapsack_fptas(&v, &c, b, 0.01).unwrap());
        let opt = opt_value(&v, &c, b);
        assert!(got >= 0.99 * opt - 1e-9);
        if (got - opt).abs() <= 1e-9 * opt.max(1.0) {
            equal += 1;
        }
    }
    assert!(equal >= 45, "only {equal} of 50 instances reached OPT at eps 0.01");
}

#[test]
fn exhaustive_knapsack_matches_brute_force() {
    let mut r = ChaCha8Rng::seed_from_u64(4);
    for _ in 0..50 {
        let n = r.random_range(1..=10);
        let (v, c, b) = random_knapsack(&mut r, n, false);
        let got = value(&v, &knapsack_exhaustive(&v, &c, b).unwrap());
        assert!((got - opt_value(&v, &c, b)).abs() <= 1e-9);
    }
}

#[test]
fn greedy_is_a_two_approximation_on_modular_instances() {
    let mut r = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..200 {
        let n = r.random_range(1..=12);
        let (v, c, b) = random_knapsack(&mut r, n, false);
        let plan = greedy(&mut StaticBenefit(v.clone()), &c, b, GreedyOptions::default()).unwrap();
        assert!(plan.total_cost <= b * (1.0 + 1e-12));
        let opt = opt_value(&v, &c, b);
        assert!(value(&v, &plan.chosen) >= opt / 2.0 - 1e-9);
    }
}

#[test]
fn modular_dp_matches_brute_force_minvar() {
    let mut r = ChaCha8Rng::seed_from_u64(6);
    for _ in 0..50 {
        let (w, c, b) = random_knapsack(&mut r, 8, true);
        let plan = modular_minvar_exact(&w, &c, b).unwrap();
        let total: f64 = w.iter().sum();
        let opt = bruteforce_opt(&c, b, Sense::Minimize, |t| Ok(total - value(&w, t))).unwrap();
        assert!((plan.objective_value - opt.objective_value).abs() <= 1e-9);
    }
}

#[test]
fn modular_dp_refuses_fractional_costs() {
    let err = modular_minvar_exact(&[1.0, 2.0], &[1.5, 1.0], 2.0).unwrap_err();
    assert!(matches!(err, Error::NonIntegerCost { index: 0, .. }));
    let scaled = modular_minvar(&[1.0, 2.0], &[1.5, 1.0], 2.0, KnapsackMode::Scaled(0.5)).unwrap();
    assert!(scaled.total_cost <= 2.0);
    assert_eq!(scaled.chosen, vec![1]);
}

#[test]
fn greedy_minvar_on_a_linear_query_uses_fixed_benefits() {
    let mut r = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..30 {
        let d = random_discrete(&mut r, 8, 4);
        let form = random_linear(&mut r, 8);
        let w = cleanplan::solvers::modular_weights(&form, &d);
        let engine = EvarEngine::new(QueryFunction::Linear(form), d.clone()).unwrap();
        let b = r.random_range(0.0..d.total_cost());
        let a = greedy_minvar(&engine, b).unwrap();
        let s = greedy(&mut StaticBenefit(w), &d.costs(), b, GreedyOptions::default()).unwrap();
        assert_eq!(a.chosen, s.chosen);
    }
}

#[test]
fn full_budget_cleans_everything() {
    let d = random_discrete(&mut ChaCha8Rng::seed_from_u64(8), 6, 4);
    let f = random_query(&mut ChaCha8Rng::seed_from_u64(9), &d);
    let engine = EvarEngine::new(f, d.clone()).unwrap();
    let total = d.total_cost();
    let g = greedy_minvar(&engine, total).unwrap();
    assert!(g.objective_value.abs() <= 1e-12);
    let best = submodular_best(&engine, total).unwrap();
    assert!(best.objective_value.abs() <= 1e-12);
    assert_eq!(best.sorted(), (0..6).collect::<Vec<_>>());
}

#[test]
fn budget_zero_gives_empty_plans() {
    let d = two_uniform();
    let engine = EvarEngine::new(small_sum_indicator(), d.clone()).unwrap();
    assert!(greedy_minvar(&engine, 0.0).unwrap().is_empty());
    assert!(submodular_best(&engine, 0.0).unwrap().is_empty());
    let opt = bruteforce_opt(&d.costs(), 0.0, Sense::Minimize, |t| engine.evar(t)).unwrap();
    assert!(opt.is_empty());
    assert!(random_plan(&d.costs(), 0.0, 3).is_empty());
}

#[test]
fn brute_force_guards_its_size() {
    let costs = vec![1.0; 26];
    let err = bruteforce_opt(&costs, 3.0, Sense::Maximize, |_| Ok(0.0)).unwrap_err();
    assert!(matches!(err, Error::TooLarge { n: 26, .. }));
}

#[test]
fn brute_force_breaks_ties_toward_cheaper_then_smaller() {
    let plan = bruteforce_opt(&[2.0, 1.0, 1.0], 2.0, Sense::Maximize, |t| {
        Ok(if t.is_empty() { 0.0 } else { 1.0 })
    })
    .unwrap();
    assert_eq!(plan.chosen, vec![1]);
}

#[test]
fn submodular_best_on_a_linear_query_matches_the_dp() {
    let mut r = ChaCha8Rng::seed_from_u64(10);
    for _ in 0..30 {
        let d = random_discrete(&mut r, 8, 4);
        let form = random_linear(&mut r, 8);
        let w = cleanplan::solvers::modular_weights(&form, &d);
        let engine = EvarEngine::new(QueryFunction::Linear(form), d.clone()).unwrap();
        let b = r.random_range(0..=d.total_cost() as u64) as f64;
        let best = submodular_best(&engine, b).unwrap();
        let dp = modular_minvar_exact(&w, &d.costs(), b).unwrap();
        assert!((best.objective_value - dp.objective_value).abs() <= 1e-9 * dp.objective_value.max(1.0));
        assert!(plan_curvature(&best).unwrap().abs() <= 1e-9);
    }
}

fn indicator_instance(r: &mut impl Rng, n: usize) -> (Dataset, QueryFunction) {
    let d = random_discrete(r, n, 3);
    let m = r.random_range(2..=4);
    let terms = (0..m)
        .map(|_| {
            let k = r.random_range(2..=3);
            let start = r.random_range(0..=n - k);
            let members: Vec<usize> = (start..start + k).collect();
            IndicatorTerm::sum_below(&members, k as f64 * r.random_range(3.0..7.0))
        })
        .collect();
    (d, QueryFunction::Indicators(terms))
}

#[test]
fn submodular_best_stays_within_its_curvature_bound() {
    let mut r = ChaCha8Rng::seed_from_u64(11);
    let mut checked = 0;
    for _ in 0..60 {
        let (d, f) = indicator_instance(&mut r, 8);
        let engine = EvarEngine::new(f, d.clone()).unwrap();
        let b = r.random_range(0.0..d.total_cost());
        let best = submodular_best(&engine, b).unwrap();
        assert!(best.total_cost <= b * (1.0 + 1e-12));
        let opt = bruteforce_opt(&d.costs(), b, Sense::Minimize, |t| engine.evar(t)).unwrap();
        assert!(best.objective_value >= opt.objective_value - 1e-12);
        let Ok(k) = engine.curvature() else { continue };
        if let Some(bound) = k.ratio_bound() {
            if k.kappa < 1.0 - 1e-6 {
                assert!(best.objective_value <= bound * opt.objective_value + 1e-9);
                checked += 1;
            }
        }
    }
    assert!(checked > 0);
}

#[test]
fn solvers_ignore_a_common_cost_scale() {
    let mut r = ChaCha8Rng::seed_from_u64(12);
    for _ in 0..30 {
        let (d, f) = indicator_instance(&mut r, 7);
        let b = r.random_range(0..=d.total_cost() as u64) as f64;
        let mut scaled = d.clone();
        for o in &mut scaled.objects {
            o.cost *= 3.0;
        }
        let e1 = EvarEngine::new(f.clone(), d.clone()).unwrap();
        let e2 = EvarEngine::new(f, scaled.clone()).unwrap();
        assert_eq!(
            greedy_minvar(&e1, b).unwrap().chosen,
            greedy_minvar(&e2, 3.0 * b).unwrap().chosen
        );
        assert_eq!(
            submodular_best(&e1, b).unwrap().sorted(),
            submodular_best(&e2, 3.0 * b).unwrap().sorted()
        );
        let o1 = bruteforce_opt(&d.costs(), b, Sense::Minimize, |t| e1.evar(t)).unwrap();
        let o2 = bruteforce_opt(&scaled.costs(), 3.0 * b, Sense::Minimize, |t| e2.evar(t)).unwrap();
        assert_eq!(o1.chosen, o2.chosen);
        let w: Vec<f64> = d.variances();
        assert_eq!(
            modular_minvar_exact(&w, &d.costs(), b).unwrap().chosen,
            modular_minvar_exact(&w, &scaled.costs(), 3.0 * b).unwrap().chosen
        );
        assert_eq!(
            knapsack_fptas(&w, &d.costs(), b, 0.25).unwrap(),
            knapsack_fptas(&w, &scaled.costs(), 3.0 * b, 0.25).unwrap()
        );
    }
}

#[test]
fn gamma_model_covariance_feeds_the_dependent_benefit() {
    let dep = inject_dependency(&[1.0, 1.0, 1.0], 0.7);
    assert!((dep.covariance.get(0, 2) - 0.49).abs() <= 1e-12);
    let w = [1.0, 1.0, 1.0];
    let plan = greedy_dep(&w, &dep.covariance, &[1.0, 1.0, 1.0], 1.0).unwrap();
    // Cleaning the middle object removes its variance and both 0.7 covariances.
    assert_eq!(plan.chosen, vec![1]);
    assert!((plan.trace[0].benefit - (1.0 + 2.0 * (0.7 + 0.7))).abs() <= 1e-12);
}

#[test]
fn greedy_dep_with_diagonal_covariance_matches_greedy_minvar() {
    let mut r = ChaCha8Rng::seed_from_u64(13);
    for _ in 0..30 {
        let d = random_discrete(&mut r, 8, 4);
        let form = random_linear(&mut r, 8);
        let cov = CovMatrix::diagonal(&d.variances());
        let b = r.random_range(0.0..d.total_cost());
        let dep = greedy_dep(&form.weights, &cov, &d.costs(), b).unwrap();
        let engine = EvarEngine::new(QueryFunction::Linear(form), d).unwrap();
        assert_eq!(dep.chosen, greedy_minvar(&engine, b).unwrap().chosen);
    }
}

#[test]
fn greedy_dep_needs_a_covariance() {
    let d = two_uniform();
    let form = LinearForm {
        weights: vec![1.0, 1.0],
        offset: 0.0,
    };
    assert!(matches!(greedy_dep_for(&form, &d, 1.0), Err(Error::MissingCovariance)));
}

fn normals(sigmas: &[f64], costs: &[f64]) -> Dataset {
    Dataset::new(
        sigmas
            .iter()
            .zip(costs)
            .enumerate()
            .map(|(i, (s, c))| UncertainObject::new(format!("x{i}"), 0.0, *c, NormalSpec::new(0.0, *s).unwrap()))
            .collect(),
    )
    .unwrap()
}

fn gamma_instance(gamma: f64) -> (CovMatrix, Vec<f64>) {
    let mut r = ChaCha8Rng::seed_from_u64(14);
    let sigmas: Vec<f64> = (0..8).map(|_| r.random_range(1.0..5.0)).collect();
    let costs: Vec<f64> = (0..8).map(|_| r.random_range(1..=5) as f64).collect();
    (inject_dependency(&sigmas, gamma).covariance, costs)
}

#[test]
fn dependent_benefit_is_the_exact_residual_decrease() {
    let (cov, costs) = gamma_instance(0.9);
    let w = vec![1.0; 8];
    let total: f64 = costs.iter().sum();
    for k in 0..=20 {
        let plan = greedy_dep(&w, &cov, &costs, total * k as f64 / 20.0).unwrap();
        let mut t = Vec::new();
        for s in &plan.trace {
            let before = linear_residual(&w, &cov, &t);
            t.push(s.index);
            assert!((before - linear_residual(&w, &cov, &t) - s.benefit).abs() <= 1e-9 * before.max(1.0));
        }
    }
}

#[test]
fn covariance_blind_greedy_can_beat_the_dependent_greedy() {
    // Under γ = 0.9 the dependent greedy takes a cheap high-ratio object and
    // strands budget that the covariance-blind order happens to use.
    let (cov, costs) = gamma_instance(0.9);
    let w = vec![1.0; 8];
    let sigmas: Vec<f64> = (0..8).map(|i| cov.get(i, i).sqrt()).collect();
    let blind = EvarEngine::new(
        QueryFunction::Linear(LinearForm {
            weights: w.clone(),
            offset: 0.0,
        }),
        normals(&sigmas, &costs),
    )
    .unwrap();
    let b = 4.35;
    let aware = greedy_dep(&w, &cov, &costs, b).unwrap();
    let unaware = greedy_minvar(&blind, b).unwrap();
    let opt = bruteforce_opt(&costs, b, Sense::Minimize, |t| Ok(linear_residual(&w, &cov, t))).unwrap();
    assert_eq!(aware.chosen, vec![0, 5]);
    assert_eq!(opt.chosen, vec![0, 6]);
    assert!(linear_residual(&w, &cov, &unaware.chosen) < aware.objective_value);
}

#[test]
fn modular_maxpr_fptas_keeps_a_constant_fraction() {
    let mut r = ChaCha8Rng::seed_from_u64(15);
    let mut checked = 0;
    for _ in 0..100 {
        let (w, c, b) = random_knapsack(&mut r, 10, true);
        let tau = r.random_range(0.5..6.0);
        let exact = modular_maxpr(&w, &c, b, tau, KnapsackMode::Exact).unwrap();
        let approx = modular_maxpr(&w, &c, b, tau, KnapsackMode::Fptas(0.75)).unwrap();
        if exact.objective_value > 0.05 {
            assert!(approx.objective_value >= exact.objective_value / 100.0);
            checked += 1;
        } else {
            assert!(exact.notes.iter().any(|n| n.contains("below")));
        }
    }
    assert!(checked > 20);
}

#[test]
fn greedy_maxpr_never_beats_brute_force() {
    let mut r = ChaCha8Rng::seed_from_u64(16);
    let mut ratios = Vec::new();
    for _ in 0..40 {
        let d = random_discrete(&mut r, 6, 4);
        let f = random_query(&mut r, &d);
        let tau = r.random_range(0.0..1.0);
        let eval = MaxPrEvaluator::new(f, d.clone(), tau).unwrap();
        let b = r.random_range(0.0..d.total_cost());
        let g = greedy_maxpr(&eval, b).unwrap();
        assert!(g.total_cost <= b * (1.0 + 1e-12));
        let opt = bruteforce_opt(&d.costs(), b, Sense::Maximize, |t| Ok(eval.probability(t)?.0)).unwrap();
        assert!(g.objective_value <= opt.objective_value + 1e-12);
        if opt.objective_value > 0.0 {
            ratios.push(g.objective_value / opt.objective_value);
        }
    }
    let mean = ratios.iter().sum::<f64>() / ratios.len() as f64;
    eprintln!("greedy-maxpr / opt over {} instances: mean {mean:.3}", ratios.len());
}

/// Strong correlation between the first two objects: cleaning either of them
/// pins most of the sum, while the third has the largest marginal variance.
fn correlated_three() -> Dataset {
    let mut cov = CovMatrix::diagonal(&[1.0, 1.0, 1.1]);
    cov.set(0, 1, 0.9);
    Dataset::new(vec![
        UncertainObject::new("x1", 0.0, 1.0, NormalSpec::new(0.0, 1.0).unwrap()),
        UncertainObject::new("x2", 0.0, 1.0, NormalSpec::new(0.0, 1.0).unwrap()),
        UncertainObject::new("x3", 0.0, 1.0, NormalSpec::new(0.0, 1.1f64.sqrt()).unwrap()),
    ])
    .unwrap()
    .with_covariance(cov)
    .unwrap()
}

#[test]
fn correlated_objectives_pick_different_objects() {
    let d = correlated_three();
    let form = LinearForm {
        weights: vec![1.0; 3],
        offset: 0.0,
    };
    let f = QueryFunction::Linear(form.clone());
    let engine = EvarEngine::new(f.clone(), d.clone()).unwrap();
    let minvar = bruteforce_opt(&d.costs(), 1.0, Sense::Minimize, |t| engine.evar(t)).unwrap();
    assert_eq!(minvar.chosen, vec![0]);
    assert!((minvar.objective_value - 2.1).abs() <= 1e-12);
    assert!((engine.evar(&[2]).unwrap() - 3.8).abs() <= 1e-12);

    let u = d.current_values();
    let tau = 1.0;
    let maxpr = bruteforce_opt(&d.costs(), 1.0, Sense::Maximize, |t| {
        maxpr_normal_linear(&form, &d, &u, t, tau)
    })
    .unwrap();
    assert_eq!(maxpr.chosen, vec![2]);
    assert!((maxpr.objective_value - phi(-1.0 / 1.1f64.sqrt())).abs() <= 1e-12);
}

#[test]
fn greedy_dep_refuses_objects_that_raise_the_residual() {
    let mut cov = CovMatrix::diagonal(&[1.0, 1.0]);
    cov.set(0, 1, -0.9);
    let w = [1.0, 1.0];
    let plan = greedy_dep(&w, &cov, &[1.0, 1.0], 1.0).unwrap();
    assert!(plan.is_empty());
    assert!((plan.objective_value - linear_residual(&w, &cov, &[])).abs() <= 1e-12);
    assert!(linear_residual(&w, &cov, &[0]) > plan.objective_value);
}
