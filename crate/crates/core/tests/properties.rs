mod common;

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use cleanplan::claims::{
    sensibility_exp_decay, window_perturbations, Claim, ClaimSystem, LinearClaim, WindowAggregateClaim,
};
use cleanplan::evar::{conditional_variance, evar_bruteforce, evar_decomposed, EvarEngine};
use cleanplan::maxpr::{maxpr_exact, maxpr_montecarlo};
use cleanplan::model::{
    discretize_normal, enumerate_realizations, pairwise_spread, validate_dataset, weighted_variance, Dataset,
    DiscreteDist, NormalSpec, Realization, DEFAULT_CAP,
};
use cleanplan::quality::{
    duplicity, fragility, query_distribution, IndicatorTerm, MeasureKind, QualityMeasure, QueryFunction,
};
use common::*;

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn random_subset(rng: &mut impl Rng, n: usize) -> Vec<usize> {
    (0..n).filter(|_| rng.random_bool(0.5)).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn variance_matches_second_moment(seed in any::<u64>()) {
        let d = random_discrete(&mut rng(seed), 1, 6);
        let x = d.objects[0].dist.as_discrete().unwrap();
        let m2: f64 = x.atoms().iter().map(|a| a.prob * a.value * a.value).sum();
        let m1: f64 = x.atoms().iter().map(|a| a.prob * a.value).sum();
        prop_assert!(x.variance() >= 0.0);
        prop_assert!((x.variance() - (m2 - m1 * m1)).abs() <= 1e-12 * m2.max(1.0));
    }

    #[test]
    fn realization_probabilities_sum_to_one(seed in any::<u64>(), n in 1usize..=6) {
        let d = random_discrete(&mut rng(seed), n, 6);
        let all: Vec<usize> = (0..n).collect();
        let total: f64 = enumerate_realizations(&d, &all, DEFAULT_CAP).unwrap().map(|r| r.probability).sum();
        prop_assert!((total - 1.0).abs() <= 1e-9);
    }

    #[test]
    fn total_expectation_and_variance(seed in any::<u64>(), n in 1usize..=5) {
        let mut r = rng(seed);
        let d = random_discrete(&mut r, n, 4);
        let f = random_query(&mut r, &d);
        let t = random_subset(&mut r, n);
        let prior = query_distribution(&f, &d, DEFAULT_CAP).unwrap();
        let (mut mean, mut second, mut within) = (0.0, 0.0, 0.0);
        for v in enumerate_realizations(&d, &t, DEFAULT_CAP).unwrap() {
            let c = cleanplan::model::condition(&d, &v).unwrap();
            let post = query_distribution(&f, &c, DEFAULT_CAP).unwrap();
            mean += v.probability * post.mean();
            second += v.probability * post.mean() * post.mean();
            within += v.probability * post.variance();
        }
        let between = second - mean * mean;
        let scale = prior.variance().max(1.0);
        prop_assert!((mean - prior.mean()).abs() <= 1e-9 * prior.mean().abs().max(1.0));
        prop_assert!((within + between - prior.variance()).abs() <= 1e-9 * scale);
        prop_assert!((within - evar_bruteforce(&f, &d, &t).unwrap()).abs() <= 1e-9 * scale);
    }

    #[test]
    fn power_mean_identity(seed in any::<u64>(), k in 1usize..=8) {
        let mut r = rng(seed);
        let raw: Vec<f64> = (0..k).map(|_| r.random_range(0.01..1.0)).collect();
        let s: f64 = raw.iter().sum();
        let w: Vec<f64> = raw.iter().map(|x| x / s).collect();
        let x: Vec<f64> = (0..k).map(|_| r.random_range(-10.0..10.0)).collect();
        let lhs = weighted_variance(&w, &x);
        let rhs = pairwise_spread(&w, &x);
        prop_assert!((lhs - rhs).abs() <= 1e-12 * 100.0f64.max(lhs.abs()));
    }

    #[test]
    fn discretization_keeps_the_mean(mu in -50.0f64..50.0, sigma in 0.01f64..20.0, k in 1usize..=64) {
        let d = discretize_normal(NormalSpec::new(mu, sigma).unwrap(), k);
        prop_assert!((d.mean() - mu).abs() <= 1e-9 * mu.abs().max(sigma).max(1.0));
        prop_assert!(d.variance() <= sigma * sigma * (1.0 + 1e-9));
        prop_assert!((d.mass() - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn sensibilities_sum_to_one_and_commute_with_permutation(seed in any::<u64>(), m in 1usize..=10, rate in 0.1f64..3.0) {
        let mut r = rng(seed);
        let dist: Vec<f64> = (0..m).map(|_| r.random_range(0.0..20.0)).collect();
        let s = sensibility_exp_decay(&dist, rate);
        prop_assert!((s.iter().sum::<f64>() - 1.0).abs() <= 1e-12);
        let rev: Vec<f64> = dist.iter().rev().copied().collect();
        let sr = sensibility_exp_decay(&rev, rate);
        for (a, b) in s.iter().zip(sr.iter().rev()) {
            prop_assert!((a - b).abs() <= 1e-15);
        }
    }

    #[test]
    fn linear_claims_are_linear(seed in any::<u64>(), n in 1usize..=8, alpha in -3.0f64..3.0, beta in -3.0f64..3.0) {
        let mut r = rng(seed);
        let q = Claim::Linear(LinearClaim { weights: (0..n).map(|_| r.random_range(-2.0..2.0)).collect(), offset: 0.0 });
        let v: Vec<f64> = (0..n).map(|_| r.random_range(-5.0..5.0)).collect();
        let w: Vec<f64> = (0..n).map(|_| r.random_range(-5.0..5.0)).collect();
        let mix: Vec<f64> = v.iter().zip(&w).map(|(a, b)| alpha * a + beta * b).collect();
        let lhs = q.eval(&mix);
        let rhs = alpha * q.eval(&v) + beta * q.eval(&w);
        prop_assert!((lhs - rhs).abs() <= 1e-9);
    }

    #[test]
    fn window_perturbations_are_distinct_and_local(n in 4usize..=30, w in 1usize..=4, count in 0usize..=12) {
        prop_assume!(2 * w <= n);
        let original = WindowAggregateClaim::back_to_back(n - 2 * w, w);
        match window_perturbations(&original, n, count, false) {
            Ok(ps) => {
                prop_assert_eq!(ps.len(), count);
                for (i, p) in ps.iter().enumerate() {
                    prop_assert!(Claim::Window(*p).referenced().len() <= 2 * w);
                    prop_assert!(p != &original);
                    prop_assert!(p.end() <= n);
                    for q in &ps[i + 1..] {
                        prop_assert!(p != q);
                    }
                }
            }
            Err(_) => prop_assert!(count > n - 2 * w),
        }
    }

    #[test]
    fn measures_stay_in_range(seed in any::<u64>(), n in 2usize..=8, m in 1usize..=5) {
        let mut r = rng(seed);
        let claims: Vec<Claim> = (0..m)
            .map(|_| Claim::linear((0..n).map(|_| r.random_range(-1.0..1.0)).collect()))
            .collect();
        let sys = ClaimSystem::uniform(Claim::linear(vec![1.0; n]), claims).unwrap();
        let u: Vec<f64> = (0..n).map(|_| r.random_range(0.0..5.0)).collect();
        let v: Vec<f64> = (0..n).map(|_| r.random_range(0.0..5.0)).collect();
        prop_assert!(duplicity(&sys, &u, &v) <= m);
        prop_assert!(fragility(&sys, &u, &v) >= 0.0);
    }

    #[test]
    fn bias_variance_is_weighted_sum(seed in any::<u64>(), n in 1usize..=5, m in 1usize..=3) {
        let mut r = rng(seed);
        let d = random_discrete(&mut r, n, 3);
        let original: Vec<f64> = (0..n).map(|_| r.random_range(-1.0..1.0)).collect();
        let claims: Vec<Vec<f64>> = (0..m).map(|_| (0..n).map(|_| r.random_range(-1.0..1.0)).collect()).collect();
        let raw: Vec<f64> = (0..m).map(|_| r.random_range(0.1..1.0)).collect();
        let t: f64 = raw.iter().sum();
        let s: Vec<f64> = raw.iter().map(|x| x / t).collect();
        let sys = ClaimSystem::new(
            Claim::linear(original),
            claims.iter().cloned().map(Claim::linear).collect(),
            s.clone(),
        ).unwrap();
        let f = QueryFunction::Measure(QualityMeasure::new(MeasureKind::Bias, sys, &d).unwrap());
        let var = query_distribution(&f, &d, DEFAULT_CAP).unwrap().variance();
        let closed: f64 = (0..n)
            .map(|i| {
                let w: f64 = (0..m).map(|k| s[k] * claims[k][i]).sum();
                w * w * d.objects[i].variance()
            })
            .sum();
        prop_assert!((var - closed).abs() <= 1e-9 * closed.max(1.0));
    }

    #[test]
    fn evar_is_monotone(seed in any::<u64>(), n in 1usize..=6) {
        let mut r = rng(seed);
        let d = random_discrete(&mut r, n, 4);
        let f = random_query(&mut r, &d);
        let e = EvarEngine::new(f, d).unwrap();
        let t = random_subset(&mut r, n);
        let j = r.random_range(0..n);
        let mut tj = t.clone();
        if !tj.contains(&j) {
            tj.push(j);
        }
        let (a, b) = (e.evar(&t).unwrap(), e.evar(&tj).unwrap());
        prop_assert!(b <= a + 1e-9, "EVar({:?}) = {} < EVar({:?}) = {}", t, a, tj, b);
    }

    #[test]
    fn evar_gains_grow_with_the_cleaned_set(seed in any::<u64>(), n in 2usize..=6) {
        let mut r = rng(seed);
        let d = random_discrete(&mut r, n, 4);
        let f = random_query(&mut r, &d);
        let e = EvarEngine::new(f, d).unwrap();
        let j = r.random_range(0..n);
        let big: Vec<usize> = (0..n).filter(|&i| i != j && r.random_bool(0.6)).collect();
        let small: Vec<usize> = big.iter().copied().filter(|_| r.random_bool(0.5)).collect();
        let with = |t: &[usize]| { let mut v = t.to_vec(); v.push(j); v };
        let lhs = e.evar(&with(&small)).unwrap() - e.evar(&small).unwrap();
        let rhs = e.evar(&with(&big)).unwrap() - e.evar(&big).unwrap();
        prop_assert!(lhs >= rhs - 1e-9);
    }

    #[test]
    fn complement_objective_is_monotone_and_submodular(seed in any::<u64>(), n in 2usize..=6) {
        let mut r = rng(seed);
        let d = random_discrete(&mut r, n, 4);
        let f = random_query(&mut r, &d);
        let e = EvarEngine::new(f, d).unwrap();
        let bar = |tbar: &[usize]| {
            let t: Vec<usize> = (0..n).filter(|i| !tbar.contains(i)).collect();
            e.evar(&t).unwrap()
        };
        let j = r.random_range(0..n);
        let b: Vec<usize> = (0..n).filter(|&i| i != j && r.random_bool(0.6)).collect();
        let a: Vec<usize> = b.iter().copied().filter(|_| r.random_bool(0.5)).collect();
        let with = |t: &[usize]| { let mut v = t.to_vec(); v.push(j); v };
        prop_assert!(bar(&with(&a)) >= bar(&a) - 1e-9);
        prop_assert!(bar(&with(&a)) - bar(&a) >= bar(&with(&b)) - bar(&b) - 1e-9);
    }

    #[test]
    fn decomposition_matches_brute_force(seed in any::<u64>(), n in 1usize..=6) {
        let mut r = rng(seed);
        let d = random_discrete(&mut r, n, 4);
        let f = random_query(&mut r, &d);
        let t = random_subset(&mut r, n);
        let brute = evar_bruteforce(&f, &d, &t).unwrap();
        let dec = evar_decomposed(&f, &d, &t).unwrap();
        prop_assert!((brute - dec).abs() <= 1e-9 * brute.max(1.0), "{} vs {}", brute, dec);
    }

    #[test]
    fn indicator_conditional_variance_is_bernoulli(seed in any::<u64>(), n in 2usize..=5) {
        let mut r = rng(seed);
        let d = random_discrete(&mut r, n, 4);
        let members: Vec<usize> = (0..n).collect();
        let f = QueryFunction::Indicators(vec![IndicatorTerm::sum_below(&members, r.random_range(0.0..10.0 * n as f64))]);
        let t = random_subset(&mut r, n);
        for v in enumerate_realizations(&d, &t, DEFAULT_CAP).unwrap() {
            let c = cleanplan::model::condition(&d, &v).unwrap();
            let p = query_distribution(&f, &c, DEFAULT_CAP).unwrap().mean();
            let cv = conditional_variance(&f, &d, &v).unwrap();
            prop_assert!((cv - p * (1.0 - p)).abs() <= 1e-12);
        }
    }

    #[test]
    fn maxpr_never_grows_with_tau(seed in any::<u64>(), n in 1usize..=5, t1 in 0.0f64..5.0, dt in 0.0f64..5.0) {
        let mut r = rng(seed);
        let d = random_discrete(&mut r, n, 4);
        let f = random_query(&mut r, &d);
        let t = random_subset(&mut r, n);
        let u = d.current_values();
        let p1 = maxpr_exact(&f, &d, &u, &t, t1).unwrap();
        let p2 = maxpr_exact(&f, &d, &u, &t, t1 + dt).unwrap();
        prop_assert!(p2 <= p1 + 1e-12);
        prop_assert_eq!(maxpr_exact(&f, &d, &u, &[], t1).unwrap(), 0.0);
    }

    #[test]
    fn generated_datasets_validate(seed in any::<u64>(), n in 1usize..=8) {
        let d = random_discrete(&mut rng(seed), n, 6);
        prop_assert!(validate_dataset(&d).is_ok());
    }
}

#[test]
fn monte_carlo_is_reproducible() {
    let mut r = rng(3);
    let d = random_discrete(&mut r, 4, 4);
    let f = random_query(&mut r, &d);
    let u = d.current_values();
    let a = maxpr_montecarlo(&f, &d, &u, &[0, 2], 0.5, 5000, 9).unwrap();
    let b = maxpr_montecarlo(&f, &d, &u, &[0, 2], 0.5, 5000, 9).unwrap();
    assert_eq!(a, b);
}

#[test]
fn monte_carlo_on_point_masses_is_zero_or_one() {
    let d = Dataset::new(vec![
        obj("a", 1.0, 1.0, &[(0.0, 1.0)]),
        obj("b", 1.0, 1.0, &[(5.0, 1.0)]),
    ])
    .unwrap();
    let f = QueryFunction::Linear(cleanplan::quality::LinearForm {
        weights: vec![1.0, 1.0],
        offset: 0.0,
    });
    let (p, se) = maxpr_montecarlo(&f, &d, &d.current_values(), &[0], 0.5, 1000, 1).unwrap();
    assert_eq!((p, se), (1.0, 0.0));
    let (p, _) = maxpr_montecarlo(&f, &d, &d.current_values(), &[1], 0.5, 1000, 1).unwrap();
    assert_eq!(p, 0.0);
}

#[test]
fn quality_distribution_agrees_with_sampling() {
    let mut r = rng(21);
    for _ in 0..5 {
        let d = random_discrete(&mut r, 4, 4);
        let f = random_query(&mut r, &d);
        let exact = query_distribution(&f, &d, DEFAULT_CAP).unwrap();
        let samples = 100_000;
        let mut s = rng(r.random());
        let (mut m1, mut m2) = (0.0, 0.0);
        for _ in 0..samples {
            let v: Vec<f64> = d.objects.iter().map(|o| o.dist.sample(&mut s)).collect();
            let y = f.evaluate(&v);
            m1 += y;
            m2 += y * y;
        }
        let mean = m1 / samples as f64;
        let var = m2 / samples as f64 - mean * mean;
        let se = (exact.variance() / samples as f64).sqrt();
        assert!(
            (mean - exact.mean()).abs() <= 3.0 * se + 1e-12,
            "{mean} vs {}",
            exact.mean()
        );
        assert!((var - exact.variance()).abs() <= 0.05 * exact.variance() + 1e-9);
    }
}

#[test]
fn a_point_mass_candidate_gains_nothing() {
    let d = Dataset::new(vec![
        obj("a", 0.0, 1.0, &uniform(&[0.0, 1.0, 2.0])),
        obj("b", 3.0, 1.0, &[(3.0, 1.0)]),
    ])
    .unwrap();
    let f = QueryFunction::Indicators(vec![IndicatorTerm::sum_below(&[0, 1], 4.0)]);
    assert_eq!(cleanplan::evar::marginal_gain(&f, &d, &[], 1).unwrap(), 0.0);
}

#[test]
fn disjoint_claims_add_up() {
    let mut objects = Vec::new();
    for k in 0..10 {
        objects.push(obj(&format!("a{k}"), 1.0, 1.0, &uniform(&[0.0, 0.5, 1.0, 1.5, 2.0])));
        objects.push(obj(&format!("b{k}"), 1.0, 1.0, &uniform(&[1.0 / 3.0, 1.0, 5.0 / 3.0])));
    }
    let d = Dataset::new(objects).unwrap();
    let terms: Vec<IndicatorTerm> = (0..10)
        .map(|k| IndicatorTerm::sum_below(&[2 * k, 2 * k + 1], 11.0 / 12.0))
        .collect();
    let f = QueryFunction::Indicators(terms);
    let single = evar_bruteforce(&small_sum_indicator(), &two_uniform(), &[0]).unwrap();
    let t: Vec<usize> = (0..10).map(|k| 2 * k).collect();
    let got = evar_decomposed(&f, &d, &t).unwrap();
    assert!((got - 10.0 * single).abs() <= 1e-9);
}

#[test]
fn overlapping_thresholds_decompose_exactly() {
    let mut r = rng(5);
    let d = random_discrete(&mut r, 4, 4);
    let f = QueryFunction::Indicators(vec![
        IndicatorTerm::sum_below(&[0, 1, 2], 12.0),
        IndicatorTerm::sum_below(&[1, 2, 3], 15.0),
    ]);
    let brute = evar_bruteforce(&f, &d, &[]).unwrap();
    let dec = evar_decomposed(&f, &d, &[]).unwrap();
    assert!((brute - dec).abs() <= 1e-9);
}

#[test]
fn validation_reports_every_problem() {
    let d = Dataset {
        objects: vec![
            cleanplan::model::UncertainObject::new(
                "a",
                0.0,
                1.0,
                DiscreteDist::new_unchecked(vec![(0.0, 0.4), (1.0, 0.5)]),
            ),
            cleanplan::model::UncertainObject::new("a", 0.0, 1.0, DiscreteDist::point(0.0)),
        ],
        covariance: None,
    };
    let errs = validate_dataset(&d).unwrap_err();
    let text: Vec<String> = errs.iter().map(|e| e.to_string()).collect();
    assert!(
        text.iter().any(|t| t.contains("duplicate") && t.contains('a')),
        "{text:?}"
    );
    assert!(text.iter().any(|t| t.contains("0.1")), "{text:?}");
    let ok = bernoulli3();
    assert!(validate_dataset(&ok).is_ok());
    assert!(Realization::empty().assignment.is_empty());
}
