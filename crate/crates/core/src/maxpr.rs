//! The MaxPr objective: probability that cleaning `T` drives the query below
//! `f(u) − τ`, with every other object pinned at its current value.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::model::{phi, Dataset, DiscreteDist, Distribution, Space, DEFAULT_CAP};
use crate::quality::{LinearForm, QueryFunction};

/// Probability threshold under which a MaxPr plan is treated as finding nothing.
pub const MEANINGFUL_PROBABILITY: f64 = 0.05;

const MC_BLOCK: usize = 1024;

fn pinned(dataset: &Dataset, u: &[f64], subset: &[usize]) -> Result<Vec<f64>> {
    if u.len() != dataset.len() {
        return Err(Error::InvalidArgument(format!(
            "{} current values for {} objects",
            u.len(),
            dataset.len()
        )));
    }
    for &i in subset {
        dataset.check_index(i)?;
    }
    Ok(u.to_vec())
}

/// Exact `Pr[f(X) < f(u) − τ]` by enumerating the cleaned objects.
pub fn maxpr_exact(query: &QueryFunction, dataset: &Dataset, u: &[f64], subset: &[usize], tau: f64) -> Result<f64> {
    maxpr_exact_capped(query, dataset, u, subset, tau, DEFAULT_CAP)
}

pub fn maxpr_exact_capped(
    query: &QueryFunction,
    dataset: &Dataset,
    u: &[f64],
    subset: &[usize],
    tau: f64,
    cap: u128,
) -> Result<f64> {
    if !dataset.is_independent() {
        return Err(Error::Dependent);
    }
    let mut values = pinned(dataset, u, subset)?;
    let threshold = query.evaluate(&values) - tau;
    let space = Space::new(dataset, subset, cap)?;
    let mut p = 0.0;
    space.for_each(&mut values, |v, q| {
        if query.evaluate(v) < threshold {
            p += q;
        }
    });
    Ok(p.clamp(0.0, 1.0))
}

/// Exact probability for a linear query over discrete objects, by convolving
/// the distributions of `aᵢ(Xᵢ − uᵢ)` instead of enumerating joint states.
pub fn maxpr_linear_discrete(
    form: &LinearForm,
    dataset: &Dataset,
    u: &[f64],
    subset: &[usize],
    tau: f64,
    max_atoms: usize,
) -> Result<f64> {
    if !dataset.is_independent() {
        return Err(Error::Dependent);
    }
    pinned(dataset, u, subset)?;
    let mut acc = DiscreteDist::point(0.0);
    for &i in subset {
        let a = form.weights.get(i).copied().unwrap_or(0.0);
        if a == 0.0 {
            continue;
        }
        let o = &dataset.objects[i];
        let d = match &o.dist {
            Distribution::Discrete(d) => d,
            Distribution::Normal(n) if n.stddev == 0.0 => &DiscreteDist::point(n.mean),
            Distribution::Normal(_) => return Err(Error::NonDiscrete { id: o.id.clone() }),
        };
        let mut pairs = Vec::with_capacity(acc.len() * d.len());
        for x in acc.atoms() {
            for y in d.atoms() {
                pairs.push((x.value + a * (y.value - u[i]), x.prob * y.prob));
            }
        }
        acc = DiscreteDist::canonical(pairs)?;
        if acc.len() > max_atoms {
            return Err(Error::CapExceeded {
                size: acc.len() as u128,
                cap: max_atoms as u128,
            });
        }
    }
    let p: f64 = acc.atoms().iter().filter(|a| a.value < -tau).map(|a| a.prob).sum();
    Ok(p.clamp(0.0, 1.0))
}

/// `Φ(−τ/√S)` with `S = Σ_{i∈T} aᵢ²σᵢ²`, for independent normals centered at
/// the current values.
pub fn maxpr_normal_closed_form(weights: &[f64], sigmas: &[f64], subset: &[usize], tau: f64) -> Result<f64> {
    if tau < 0.0 {
        return Err(Error::InvalidArgument(format!("tau {tau} must be nonnegative")));
    }
    let s: f64 = subset.iter().map(|&i| (weights[i] * sigmas[i]).powi(2)).sum();
    closed_form(s, tau)
}

fn closed_form(s: f64, tau: f64) -> Result<f64> {
    if s <= 0.0 {
        if tau > 0.0 {
            return Ok(0.0);
        }
        return Err(Error::IllPosed(
            "zero variance with tau = 0 sits on the boundary of the event".into(),
        ));
    }
    Ok(phi(-tau / s.sqrt()))
}

/// Probability for a linear query over (possibly correlated, possibly
/// off-center) normal objects: `Φ((−τ − m)/√S)` with
/// `m = Σ_{i∈T} aᵢ(μᵢ − uᵢ)` and `S = Σ_{i,j∈T} aᵢaⱼCov(Xᵢ, Xⱼ)`.
pub fn maxpr_normal_linear(form: &LinearForm, dataset: &Dataset, u: &[f64], subset: &[usize], tau: f64) -> Result<f64> {
    pinned(dataset, u, subset)?;
    let mut m = 0.0;
    let mut mask = vec![false; dataset.len()];
    for &i in subset {
        let o = &dataset.objects[i];
        if o.dist.as_normal().is_none() && !o.dist.is_point_mass() {
            return Err(Error::NonNormal { id: o.id.clone() });
        }
        m += form.weights[i] * (o.dist.mean() - u[i]);
        mask[i] = true;
    }
    let s = dataset.effective_covariance().quadratic_form(&form.weights, &mask);
    if s <= 1e-300 {
        return Ok(if m < -tau { 1.0 } else { 0.0 });
    }
    Ok(phi((-tau - m) / s.sqrt()))
}

/// Sampled frequency of the event and its binomial standard error. Draws are
/// made in fixed-size blocks, block `b` on stream `b` of the seeded generator,
/// so the parallel result equals the serial one.
pub fn maxpr_montecarlo(
    query: &QueryFunction,
    dataset: &Dataset,
    u: &[f64],
    subset: &[usize],
    tau: f64,
    samples: usize,
    seed: u64,
) -> Result<(f64, f64)> {
    if samples == 0 {
        return Err(Error::InvalidArgument("samples must be at least 1".into()));
    }
    let base = pinned(dataset, u, subset)?;
    let threshold = query.evaluate(&base) - tau;
    let mut t = subset.to_vec();
    t.sort_unstable();
    t.dedup();
    let chol = if dataset.is_independent() {
        None
    } else {
        Some(correlated_sampler(dataset, &t)?)
    };
    let blocks = samples.div_ceil(MC_BLOCK);
    let hits: usize = (0..blocks)
        .into_par_iter()
        .map(|b| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(b as u64);
            let mut values = base.clone();
            let n = MC_BLOCK.min(samples - b * MC_BLOCK);
            let mut count = 0;
            for _ in 0..n {
                match &chol {
                    None => {
                        for &i in &t {
                            values[i] = dataset.objects[i].dist.sample(&mut rng);
                        }
                    }
                    Some((mean, l)) => {
                        let z = DVector::from_fn(t.len(), |_, _| rng.sample::<f64, _>(rand_distr::StandardNormal));
                        let x = mean + l * z;
                        for (j, &i) in t.iter().enumerate() {
                            values[i] = x[j];
                        }
                    }
                }
                if query.evaluate(&values) < threshold {
                    count += 1;
                }
            }
            count
        })
        .sum();
    let p = hits as f64 / samples as f64;
    Ok((p, (p * (1.0 - p) / samples as f64).sqrt()))
}

/// Mean vector and lower Cholesky factor of the cleaned objects' joint normal.
fn correlated_sampler(dataset: &Dataset, t: &[usize]) -> Result<(DVector<f64>, DMatrix<f64>)> {
    let cov = dataset.effective_covariance();
    for &i in t {
        let o = &dataset.objects[i];
        if o.dist.as_normal().is_none() && !o.dist.is_point_mass() {
            return Err(Error::NonNormal { id: o.id.clone() });
        }
    }
    let k = t.len();
    let m = DMatrix::from_fn(k, k, |a, b| cov.get(t[a], t[b]));
    let mean = DVector::from_fn(k, |a, _| dataset.objects[t[a]].dist.mean());
    let mut jitter = 0.0;
    for _ in 0..8 {
        let mj = &m + DMatrix::identity(k, k) * jitter;
        if let Some(c) = mj.cholesky() {
            return Ok((mean, c.l()));
        }
        jitter = if jitter == 0.0 {
            1e-12 * m.diagonal().max().max(1e-300)
        } else {
            jitter * 100.0
        };
    }
    Err(Error::InvalidArgument(
        "covariance of the cleaned objects is not positive semidefinite".into(),
    ))
}

/// MaxPr evaluator that picks the cheapest exact method available.
pub struct MaxPrEvaluator {
    query: QueryFunction,
    dataset: Dataset,
    u: Vec<f64>,
    tau: f64,
    linear: Option<LinearForm>,
    mc: Option<(usize, u64)>,
}

impl MaxPrEvaluator {
    pub fn new(query: QueryFunction, dataset: Dataset, tau: f64) -> Result<Self> {
        let u = dataset.current_values();
        Self::at(query, dataset, u, tau)
    }

    /// Evaluator with explicit current values `u`.
    pub fn at(query: QueryFunction, dataset: Dataset, u: Vec<f64>, tau: f64) -> Result<Self> {
        if !(tau >= 0.0) {
            return Err(Error::InvalidArgument(format!("tau {tau} must be nonnegative")));
        }
        let linear = query.linear_form(dataset.len());
        Ok(MaxPrEvaluator {
            query,
            dataset,
            u,
            tau,
            linear,
            mc: None,
        })
    }

    /// Falls back to sampling when no exact method applies.
    pub fn with_monte_carlo(mut self, samples: usize, seed: u64) -> Self {
        self.mc = Some((samples, seed));
        self
    }

    pub fn dataset(&self) -> &Dataset {
        &self.dataset
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    /// Probability and whether it was sampled.
    pub fn probability(&self, subset: &[usize]) -> Result<(f64, bool)> {
        let all_normal = subset.iter().all(|&i| {
            self.dataset
                .objects
                .get(i)
                .is_some_and(|o| o.dist.as_normal().is_some() || o.dist.is_point_mass())
        });
        if let Some(form) = &self.linear {
            if all_normal {
                return Ok((
                    maxpr_normal_linear(form, &self.dataset, &self.u, subset, self.tau)?,
                    false,
                ));
            }
        }
        if self.dataset.is_independent() {
            match maxpr_exact(&self.query, &self.dataset, &self.u, subset, self.tau) {
                Ok(p) => return Ok((p, false)),
                Err(Error::CapExceeded { .. }) => {
                    if let Some(form) = &self.linear {
                        match maxpr_linear_discrete(form, &self.dataset, &self.u, subset, self.tau, 1_000_000) {
                            Ok(p) => return Ok((p, false)),
                            Err(Error::CapExceeded { .. }) => {}
                            Err(e) => return Err(e),
                        }
                    }
                }
                Err(e) => return Err(e),
            }
        }
        match self.mc {
            Some((samples, seed)) => {
                let (p, _) = maxpr_montecarlo(&self.query, &self.dataset, &self.u, subset, self.tau, samples, seed)?;
                Ok((p, true))
            }
            None => Err(Error::InvalidArgument(
                "no exact MaxPr method applies; enable Monte Carlo sampling".into(),
            )),
        }
    }
}
