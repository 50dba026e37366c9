//! Synthetic datasets: the UR, LN and SM discrete families, fixed-mean
//! normals, cost models, the γ covariance model and small stand-in series.
//!
//! Every random draw comes from ChaCha8 seeded with the spec's seed, on
//! stream `object_index * 16 + field`, so a field's draws never depend on
//! how many draws other fields made.

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use statrs::distribution::{Continuous, ContinuousCDF, LogNormal};

use crate::error::{Error, Result};
use crate::model::{std_normal, CovMatrix, Dataset, DiscreteDist, Distribution, NormalSpec, UncertainObject};

pub const MAX_SUPPORT: usize = 6;

/// Stand-in for a yearly adoptions series (26 values).
pub const ADOPTIONS_SERIES: [f64; 26] = [
    1883.0, 1754.0, 1795.0, 2049.0, 2114.0, 2332.0, 2515.0, 2863.0, 3174.0, 3008.0, 3689.0, 3932.0, 3626.0, 3723.0,
    3896.0, 4273.0, 4559.0, 4978.0, 5269.0, 5255.0, 4925.0, 4439.0, 4068.0, 3764.0, 3661.0, 3553.0,
];

/// Stand-in for a yearly death-count series (17 values).
pub const CDC_SERIES: [f64; 17] = [
    137.0, 142.0, 129.0, 151.0, 148.0, 156.0, 161.0, 149.0, 170.0, 166.0, 158.0, 175.0, 181.0, 172.0, 190.0, 186.0,
    197.0,
];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "lowercase")]
pub enum Family {
    /// Random supports with uniform-random weights.
    Ur,
    /// Quantized log-normals: skewed, unimodal.
    Ln,
    /// Random supports with weights near 0 or near 1: multimodal.
    Sm,
    /// Normals centered at their current values, stddev uniform in the range.
    Normal { std_lo: f64, std_hi: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "lowercase")]
pub enum CostModel {
    Uniform {
        lo: f64,
        hi: f64,
        integer: bool,
    },
    /// Object `i` costs `base − i·step − U[0, jitter]`: older values cost more.
    Recency {
        base: f64,
        step: f64,
        jitter: f64,
    },
    TwoPoint {
        a: f64,
        b: f64,
    },
}

impl Default for CostModel {
    fn default() -> Self {
        CostModel::Uniform {
            lo: 1.0,
            hi: 10.0,
            integer: true,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GenSpec {
    pub family: Family,
    pub n: usize,
    pub seed: u64,
    pub cost_model: CostModel,
    /// Range of support values (UR, SM) or means (normal). LN ignores it.
    pub support_range: (f64, f64),
}

impl GenSpec {
    pub fn new(family: Family, n: usize, seed: u64) -> Self {
        GenSpec {
            family,
            n,
            seed,
            cost_model: CostModel::default(),
            support_range: (1.0, 100.0),
        }
    }

    pub fn with_costs(mut self, cost_model: CostModel) -> Self {
        self.cost_model = cost_model;
        self
    }

    pub fn with_range(mut self, lo: f64, hi: f64) -> Self {
        self.support_range = (lo, hi);
        self
    }

    fn check(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidArgument(m));
        if self.n == 0 {
            return bad("n must be at least 1".into());
        }
        let (lo, hi) = self.support_range;
        if !(lo.is_finite() && hi.is_finite() && lo <= hi) {
            return bad(format!("support range ({lo}, {hi}) is empty"));
        }
        if matches!(self.family, Family::Ur | Family::Sm) {
            let width = hi.floor() - lo.ceil() + 1.0;
            if width < MAX_SUPPORT as f64 {
                return bad(format!(
                    "support range ({lo}, {hi}) holds fewer than {MAX_SUPPORT} integers"
                ));
            }
        }
        if let Family::Normal { std_lo, std_hi } = self.family {
            if !(std_lo >= 0.0 && std_lo <= std_hi && std_hi.is_finite()) {
                return bad(format!("stddev range ({std_lo}, {std_hi}) is invalid"));
            }
        }
        match self.cost_model {
            CostModel::Uniform { lo, hi, integer } => {
                if !(lo > 0.0 && lo <= hi && hi.is_finite()) {
                    return bad(format!("cost range ({lo}, {hi}) must be positive and nonempty"));
                }
                if integer && hi.floor() < lo.ceil() {
                    return bad(format!("cost range ({lo}, {hi}) holds no integer"));
                }
            }
            CostModel::Recency { base, step, jitter } => {
                let last = base - step * (self.n - 1) as f64 - jitter;
                if !(step >= 0.0 && jitter >= 0.0 && last > 0.0) {
                    return bad(format!("recency costs reach {last}; they must stay positive"));
                }
            }
            CostModel::TwoPoint { a, b } => {
                if !(a > 0.0 && b > 0.0 && a.is_finite() && b.is_finite()) {
                    return bad(format!("two-point costs ({a}, {b}) must be positive"));
                }
            }
        }
        Ok(())
    }
}

#[derive(Clone, Copy)]
#[repr(u64)]
enum Field {
    SupportSize = 0,
    Values = 1,
    Probs = 2,
    Cost = 3,
    Current = 4,
    Spread = 5,
}

fn stream(seed: u64, object: usize, field: Field) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(object as u64 * 16 + field as u64);
    rng
}

/// Uniform draw from (0, 1].
fn open_unit(rng: &mut impl Rng) -> f64 {
    1.0 - rng.random::<f64>()
}

fn random_support(spec: &GenSpec, i: usize, k: usize) -> Vec<f64> {
    let lo = spec.support_range.0.ceil() as i64;
    let hi = spec.support_range.1.floor() as i64;
    let width = (hi - lo + 1) as usize;
    let mut values: Vec<f64> = sample(&mut stream(spec.seed, i, Field::Values), width, k)
        .into_iter()
        .map(|x| (lo + x as i64) as f64)
        .collect();
    values.sort_by(f64::total_cmp);
    values
}

/// Equal-probability quantization of `LogNormal(0, σ)` into `k` intervals,
/// each represented just left of its right end; the unbounded last one uses
/// the `(k − 0.01)/k` quantile.
pub fn lognormal_support(sigma: f64, k: usize) -> Vec<(f64, f64)> {
    let z = std_normal();
    let q = |p: f64| (sigma * z.inverse_cdf(p)).exp();
    let ln = LogNormal::new(0.0, sigma).expect("positive sigma");
    let mut atoms = Vec::with_capacity(k);
    for j in 0..k {
        let left = if j == 0 { 0.0 } else { q(j as f64 / k as f64) };
        let x = if j + 1 == k {
            q((k as f64 - 0.01) / k as f64)
        } else {
            let right = q((j + 1) as f64 / k as f64);
            right - 0.01 * (right - left)
        };
        atoms.push((x, ln.pdf(x)));
    }
    atoms
}

fn normalized(mut atoms: Vec<(f64, f64)>) -> Result<DiscreteDist> {
    let total: f64 = atoms.iter().map(|a| a.1).sum();
    for a in &mut atoms {
        a.1 /= total;
    }
    DiscreteDist::canonical(atoms)
}

fn cost(spec: &GenSpec, i: usize) -> f64 {
    let mut rng = stream(spec.seed, i, Field::Cost);
    match spec.cost_model {
        CostModel::Uniform { lo, hi, integer: true } => rng.random_range(lo.ceil() as u64..=hi.floor() as u64) as f64,
        CostModel::Uniform { lo, hi, integer: false } => lo + (hi - lo) * rng.random::<f64>(),
        CostModel::Recency { base, step, jitter } => base - step * i as f64 - jitter * rng.random::<f64>(),
        CostModel::TwoPoint { a, b } => {
            if rng.random_bool(0.5) {
                a
            } else {
                b
            }
        }
    }
}

fn object(spec: &GenSpec, i: usize) -> Result<UncertainObject> {
    let id = format!("o{i}");
    let c = cost(spec, i);
    if let Family::Normal { std_lo, std_hi } = spec.family {
        let (lo, hi) = spec.support_range;
        let mean = lo + (hi - lo) * stream(spec.seed, i, Field::Current).random::<f64>();
        let sd = std_lo + (std_hi - std_lo) * stream(spec.seed, i, Field::Spread).random::<f64>();
        return Ok(UncertainObject::new(id, mean, c, NormalSpec::new(mean, sd)?));
    }
    let k = stream(spec.seed, i, Field::SupportSize).random_range(1..=MAX_SUPPORT);
    let dist = match spec.family {
        Family::Ur => {
            let mut rng = stream(spec.seed, i, Field::Probs);
            let atoms = random_support(spec, i, k)
                .into_iter()
                .map(|v| (v, open_unit(&mut rng)))
                .collect();
            normalized(atoms)?
        }
        Family::Sm => {
            let mut rng = stream(spec.seed, i, Field::Probs);
            let atoms = random_support(spec, i, k)
                .into_iter()
                .map(|v| {
                    let u = open_unit(&mut rng);
                    let w = if rng.random_bool(0.5) { 0.1 * u } else { 0.9 + 0.1 * u };
                    (v, w)
                })
                .collect();
            normalized(atoms)?
        }
        Family::Ln => {
            let sigma = open_unit(&mut stream(spec.seed, i, Field::Spread));
            normalized(lognormal_support(sigma, k))?
        }
        Family::Normal { .. } => unreachable!(),
    };
    // The current (possibly dirty) value is one draw from the distribution.
    let dist = Distribution::Discrete(dist);
    let current = dist.sample(&mut stream(spec.seed, i, Field::Current));
    Ok(UncertainObject::new(id, current, c, dist))
}

pub fn generate(spec: &GenSpec) -> Result<Dataset> {
    spec.check()?;
    let objects = (0..spec.n).map(|i| object(spec, i)).collect::<Result<Vec<_>>>()?;
    Dataset::new(objects)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Dependency {
    pub covariance: CovMatrix,
    /// The matrix is singular (up to round-off), e.g. for γ = 1.
    pub rank_deficient: bool,
}

/// `Cov(i, j) = γ^{|j−i|}σᵢσⱼ`.
pub fn inject_dependency(sigmas: &[f64], gamma: f64) -> Dependency {
    let n = sigmas.len();
    let mut cov = CovMatrix::zeros(n);
    for i in 0..n {
        for j in i..n {
            cov.set(i, j, gamma.powi((j - i) as i32) * sigmas[i] * sigmas[j]);
        }
    }
    let rank_deficient = n > 0 && cov.is_rank_deficient();
    Dependency {
        covariance: cov,
        rank_deficient,
    }
}

/// Applies [`inject_dependency`] with the dataset's own standard deviations.
pub fn with_dependency(dataset: &Dataset, gamma: f64) -> Result<Dataset> {
    let sigmas: Vec<f64> = dataset.variances().iter().map(|v| v.sqrt()).collect();
    dataset
        .without_covariance()
        .with_covariance(inject_dependency(&sigmas, gamma).covariance)
}

/// Normals centered at the series values with stddev uniform in `[1, std_hi]`
/// and integer costs uniform in `[1, cost_hi]`. `std_hi = 0` gives point masses.
pub fn adoptions_like(series: &[f64], std_hi: f64, cost_hi: f64, seed: u64) -> Result<Dataset> {
    if !(std_hi == 0.0 || std_hi >= 1.0) || !(cost_hi >= 1.0) {
        return Err(Error::InvalidArgument(format!(
            "stddev bound {std_hi} must be 0 or at least 1, cost bound {cost_hi} at least 1"
        )));
    }
    let objects = series
        .iter()
        .enumerate()
        .map(|(i, &u)| {
            let sd = if std_hi == 0.0 {
                0.0
            } else {
                1.0 + (std_hi - 1.0) * stream(seed, i, Field::Spread).random::<f64>()
            };
            let c = stream(seed, i, Field::Cost).random_range(1..=cost_hi.floor() as u64) as f64;
            let id = format!("y{i}");
            Ok(if sd == 0.0 {
                UncertainObject::new(id, u, c, DiscreteDist::point(u))
            } else {
                UncertainObject::new(id, u, c, NormalSpec::new(u, sd)?)
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Dataset::new(objects)
}

/// The CDC stand-in: normals around [`CDC_SERIES`] with stddev uniform in
/// `[1, std_hi]` and recency costs (older years cost more).
pub fn cdc_like(std_hi: f64, seed: u64) -> Result<Dataset> {
    let mut d = adoptions_like(&CDC_SERIES, std_hi, 1.0, seed)?;
    let costs = CostModel::Recency {
        base: 200.0,
        step: 5.0,
        jitter: 5.0,
    };
    let spec = GenSpec::new(Family::Ur, CDC_SERIES.len(), seed).with_costs(costs);
    for (i, o) in d.objects.iter_mut().enumerate() {
        o.cost = cost(&spec, i).round();
    }
    Dataset::new(d.objects)
}
