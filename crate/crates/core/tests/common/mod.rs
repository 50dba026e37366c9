#![allow(dead_code)]

use std::path::PathBuf;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use cleanplan::claims::{Claim, ClaimSystem, WindowAggregateClaim};
use cleanplan::model::{CovMatrix, Dataset, DiscreteDist, NormalSpec, UncertainObject};
use cleanplan::quality::{Comparison, IndicatorTerm, LinearForm, MeasureKind, QualityMeasure, QueryFunction};

pub fn data(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data").join(name)
}

pub fn obj(id: &str, u: f64, cost: f64, atoms: &[(f64, f64)]) -> UncertainObject {
    UncertainObject::new(id, u, cost, DiscreteDist::new(atoms.to_vec()).unwrap())
}

pub fn uniform(values: &[f64]) -> Vec<(f64, f64)> {
    let p = 1.0 / values.len() as f64;
    values.iter().map(|&v| (v, p)).collect()
}

/// Three Bernoulli objects with success 1/2, 1/3, 1/4.
pub fn bernoulli3() -> Dataset {
    Dataset::new(vec![
        obj("x1", 0.0, 1.0, &[(0.0, 0.5), (1.0, 0.5)]),
        obj("x2", 0.0, 1.0, &[(0.0, 2.0 / 3.0), (1.0, 1.0 / 3.0)]),
        obj("x3", 0.0, 1.0, &[(0.0, 0.75), (1.0, 0.25)]),
    ])
    .unwrap()
}

/// `1[X₁ + X₂ + X₃ < 3]`.
pub fn sum_below_three() -> QueryFunction {
    QueryFunction::Indicators(vec![IndicatorTerm::sum_below(&[0, 1, 2], 3.0)])
}

/// X₁ uniform on {0, ½, 1, 3/2, 2}, X₂ uniform on {1/3, 1, 5/3}, u = (1, 1), unit costs.
pub fn two_uniform() -> Dataset {
    Dataset::new(vec![
        obj("x1", 1.0, 1.0, &uniform(&[0.0, 0.5, 1.0, 1.5, 2.0])),
        obj("x2", 1.0, 1.0, &uniform(&[1.0 / 3.0, 1.0, 5.0 / 3.0])),
    ])
    .unwrap()
}

/// Bias of `q° = X₁ + X₂` with `Q = {q°}` on [`two_uniform`].
pub fn sum_bias(d: &Dataset) -> QueryFunction {
    let q = Claim::linear(vec![1.0, 1.0]);
    let sys = ClaimSystem::uniform(q.clone(), vec![q]).unwrap();
    QueryFunction::Measure(QualityMeasure::new(MeasureKind::Bias, sys, d).unwrap())
}

/// `1[X₁ + X₂ < 11/12]`.
pub fn small_sum_indicator() -> QueryFunction {
    QueryFunction::Indicators(vec![IndicatorTerm::sum_below(&[0, 1], 11.0 / 12.0)])
}

pub const CRIME: [f64; 5] = [9010.0, 9275.0, 9300.0, 9125.0, 9430.0];

/// Point-mass crime series with the year-over-year claim `X₄ − X₃` and its
/// three earlier shifts.
pub fn crime_system() -> ClaimSystem {
    let original = WindowAggregateClaim::back_to_back(3, 1);
    let ps = cleanplan::claims::window_perturbations(&original, 5, 3, false).unwrap();
    ClaimSystem::uniform(Claim::Window(original), ps.into_iter().map(Claim::Window).collect()).unwrap()
}

/// Random independent discrete dataset: `n` objects, supports of 1..=`vmax`
/// values in [0, 10], costs in 1..=5.
pub fn random_discrete(rng: &mut impl Rng, n: usize, vmax: usize) -> Dataset {
    let objects = (0..n)
        .map(|i| {
            let k = rng.random_range(1..=vmax);
            let mut vals: Vec<f64> = Vec::new();
            while vals.len() < k {
                let v = rng.random_range(0..=20) as f64 / 2.0;
                if !vals.contains(&v) {
                    vals.push(v);
                }
            }
            let w: Vec<f64> = (0..k).map(|_| rng.random_range(0.05..1.0)).collect();
            let t: f64 = w.iter().sum();
            let atoms: Vec<(f64, f64)> = vals.iter().zip(&w).map(|(&v, &p)| (v, p / t)).collect();
            let d = DiscreteDist::canonical(atoms).unwrap();
            let u = d.atoms()[0].value;
            UncertainObject::new(format!("r{i}"), u, rng.random_range(1..=5) as f64, d)
        })
        .collect();
    Dataset::new(objects).unwrap()
}

/// A random query: either overlapping threshold indicators or a duplicity
/// or fragility measure over random short windows.
pub fn random_query(rng: &mut impl Rng, d: &Dataset) -> QueryFunction {
    let n = d.len();
    let members = |rng: &mut ChaCha8Rng| {
        let k = rng.random_range(1..=n.min(3));
        let start = rng.random_range(0..=n - k);
        (start..start + k).collect::<Vec<_>>()
    };
    let mut local = ChaCha8Rng::seed_from_u64(rng.random());
    match local.random_range(0..3) {
        0 => {
            let m = local.random_range(1..=3);
            let terms = (0..m)
                .map(|_| {
                    let mem = members(&mut local);
                    let t = mem.len() as f64 * local.random_range(2.0..8.0);
                    let cmp = if local.random_bool(0.5) {
                        Comparison::Lt
                    } else {
                        Comparison::Ge
                    };
                    IndicatorTerm {
                        coefficients: mem.into_iter().map(|i| (i, 1.0)).collect(),
                        threshold: t,
                        cmp,
                    }
                })
                .collect();
            QueryFunction::Indicators(terms)
        }
        kind => {
            let m = local.random_range(1..=3);
            let claims: Vec<Claim> = (0..m)
                .map(|_| {
                    let mem = members(&mut local);
                    let mut w = vec![0.0; n];
                    for i in mem {
                        w[i] = if local.random_bool(0.5) { 1.0 } else { -1.0 };
                    }
                    Claim::linear(w)
                })
                .collect();
            let sys = ClaimSystem::uniform(claims[0].clone(), claims).unwrap();
            let kind = if kind == 1 {
                MeasureKind::Duplicity
            } else {
                MeasureKind::Fragility
            };
            QueryFunction::Measure(QualityMeasure::new(kind, sys, d).unwrap())
        }
    }
}

pub fn random_linear(rng: &mut impl Rng, n: usize) -> LinearForm {
    LinearForm {
        weights: (0..n).map(|_| rng.random_range(-2.0..2.0)).collect(),
        offset: 0.0,
    }
}

/// Random covariance `B Bᵀ + δI` with unit-scale entries.
pub fn random_psd(rng: &mut impl Rng, n: usize) -> CovMatrix {
    let b: Vec<Vec<f64>> = (0..n)
        .map(|_| (0..n).map(|_| rng.random_range(-1.0..1.0)).collect())
        .collect();
    let mut c = CovMatrix::zeros(n);
    for i in 0..n {
        for j in i..n {
            let mut s: f64 = (0..n).map(|k| b[i][k] * b[j][k]).sum();
            if i == j {
                s += 0.05;
            }
            c.set(i, j, s);
        }
    }
    c
}

/// Normal objects centered at their current values with the given covariance's diagonal.
pub fn centered_normals(rng: &mut impl Rng, cov: &CovMatrix, integer_costs: bool) -> Dataset {
    let objects = (0..cov.dim())
        .map(|i| {
            let u = rng.random_range(0.0..10.0);
            let c = if integer_costs {
                rng.random_range(1..=5) as f64
            } else {
                rng.random_range(0.5..5.0)
            };
            UncertainObject::new(format!("n{i}"), u, c, NormalSpec::new(u, cov.get(i, i).sqrt()).unwrap())
        })
        .collect();
    Dataset::new(objects).unwrap()
}

pub fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(1.0)
}
