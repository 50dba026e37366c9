use serde::{Deserialize, Serialize};
use statrs::distribution::{Continuous, ContinuousCDF, Normal};

use crate::error::{Error, Result};

/// Tolerance on the total probability mass of a discrete distribution.
pub const MASS_TOL: f64 = 1e-12;

/// Two support values closer than this (relative) are the same atom.
pub(crate) fn same_value(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-12 * a.abs().max(b.abs()).max(1.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Atom {
    pub value: f64,
    pub prob: f64,
}

/// Finite distribution with strictly increasing support.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiscreteDist {
    atoms: Vec<Atom>,
}

impl DiscreteDist {
    pub fn new(atoms: Vec<(f64, f64)>) -> Result<Self> {
        let d = Self::new_unchecked(atoms);
        let problems = d.problems();
        if problems.is_empty() {
            Ok(d)
        } else {
            Err(Error::InvalidArgument(problems.join("; ")))
        }
    }

    /// Keeps the atoms as given. Use [`DiscreteDist::problems`] to check them later.
    pub fn new_unchecked(atoms: Vec<(f64, f64)>) -> Self {
        DiscreteDist {
            atoms: atoms.into_iter().map(|(value, prob)| Atom { value, prob }).collect(),
        }
    }

    pub fn point(value: f64) -> Self {
        Self::new_unchecked(vec![(value, 1.0)])
    }

    pub fn uniform(values: &[f64]) -> Result<Self> {
        let p = 1.0 / values.len() as f64;
        let mut v: Vec<f64> = values.to_vec();
        v.sort_by(f64::total_cmp);
        Self::new(v.into_iter().map(|x| (x, p)).collect())
    }

    /// Two-point distribution on {0, 1} with `Pr[1] = p`.
    pub fn bernoulli(p: f64) -> Result<Self> {
        if p <= 0.0 {
            return Ok(Self::point(0.0));
        }
        if p >= 1.0 {
            return Ok(Self::point(1.0));
        }
        Self::new(vec![(0.0, 1.0 - p), (1.0, p)])
    }

    /// Sorts, merges equal values, drops zero-mass atoms and rescales to unit mass.
    pub fn canonical(mut pairs: Vec<(f64, f64)>) -> Result<Self> {
        pairs.retain(|&(_, p)| p > 0.0);
        if pairs.is_empty() {
            return Err(Error::InvalidArgument("distribution has no mass".into()));
        }
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut merged: Vec<(f64, f64)> = Vec::with_capacity(pairs.len());
        for (v, p) in pairs {
            match merged.last_mut() {
                Some(last) if same_value(last.0, v) => last.1 += p,
                _ => merged.push((v, p)),
            }
        }
        let total: f64 = merged.iter().map(|a| a.1).sum();
        for a in &mut merged {
            a.1 /= total;
        }
        Self::new(merged)
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn values(&self) -> impl Iterator<Item = f64> + '_ {
        self.atoms.iter().map(|a| a.value)
    }

    pub fn probs(&self) -> impl Iterator<Item = f64> + '_ {
        self.atoms.iter().map(|a| a.prob)
    }

    pub fn mass(&self) -> f64 {
        self.probs().sum()
    }

    pub fn mean(&self) -> f64 {
        self.atoms.iter().map(|a| a.prob * a.value).sum()
    }

    pub fn variance(&self) -> f64 {
        let mu = self.mean();
        let v: f64 = self
            .atoms
            .iter()
            .map(|a| a.prob * (a.value - mu) * (a.value - mu))
            .sum();
        v.max(0.0)
    }

    pub fn prob_of(&self, value: f64) -> f64 {
        self.position(value).map_or(0.0, |i| self.atoms[i].prob)
    }

    pub fn position(&self, value: f64) -> Option<usize> {
        self.atoms.iter().position(|a| same_value(a.value, value))
    }

    pub fn is_point_mass(&self) -> bool {
        self.atoms.len() == 1
    }

    /// Descriptions of every broken invariant; empty when the distribution is valid.
    pub fn problems(&self) -> Vec<String> {
        let mut out = Vec::new();
        if self.atoms.is_empty() {
            out.push("empty support".to_string());
            return out;
        }
        for a in &self.atoms {
            if !a.value.is_finite() {
                out.push(format!("non-finite support value {}", a.value));
            }
            if !(0.0..=1.0).contains(&a.prob) || a.prob.is_nan() {
                out.push(format!("probability {} outside [0,1]", a.prob));
            }
        }
        for w in self.atoms.windows(2) {
            if w[1].value <= w[0].value {
                out.push(format!(
                    "support not strictly increasing at {} -> {}",
                    w[0].value, w[1].value
                ));
            }
        }
        let mass = self.mass();
        if (mass - 1.0).abs() > MASS_TOL {
            out.push(format!(
                "probabilities sum to {mass} (deficit {})",
                ((1.0 - mass) * 1e12).round() / 1e12
            ));
        }
        out
    }
}

/// Normal error model; `stddev == 0` is a point mass.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NormalSpec {
    pub mean: f64,
    pub stddev: f64,
}

impl NormalSpec {
    pub fn new(mean: f64, stddev: f64) -> Result<Self> {
        if !mean.is_finite() || !stddev.is_finite() || stddev < 0.0 {
            return Err(Error::InvalidArgument(format!(
                "normal({mean},{stddev}) needs a finite mean and stddev >= 0"
            )));
        }
        Ok(NormalSpec { mean, stddev })
    }

    pub fn variance(&self) -> f64 {
        self.stddev * self.stddev
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Distribution {
    Discrete(DiscreteDist),
    Normal(NormalSpec),
}

impl Distribution {
    pub fn mean(&self) -> f64 {
        match self {
            Distribution::Discrete(d) => d.mean(),
            Distribution::Normal(n) => n.mean,
        }
    }

    pub fn variance(&self) -> f64 {
        variance(self)
    }

    pub fn is_point_mass(&self) -> bool {
        match self {
            Distribution::Discrete(d) => d.is_point_mass(),
            Distribution::Normal(n) => n.stddev == 0.0,
        }
    }

    pub fn as_discrete(&self) -> Option<&DiscreteDist> {
        match self {
            Distribution::Discrete(d) => Some(d),
            Distribution::Normal(_) => None,
        }
    }

    /// One draw from the distribution.
    pub fn sample<R: rand::Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match self {
            Distribution::Discrete(d) => {
                let u: f64 = rng.random();
                let mut acc = 0.0;
                for a in d.atoms() {
                    acc += a.prob;
                    if u < acc {
                        return a.value;
                    }
                }
                d.atoms().last().map_or(f64::NAN, |a| a.value)
            }
            Distribution::Normal(n) => {
                if n.stddev == 0.0 {
                    return n.mean;
                }
                let z: f64 = rng.sample(rand_distr::StandardNormal);
                n.mean + n.stddev * z
            }
        }
    }

    /// The single value of a point mass.
    pub fn point_value(&self) -> Option<f64> {
        match self {
            Distribution::Discrete(d) if d.is_point_mass() => Some(d.atoms()[0].value),
            Distribution::Normal(n) if n.stddev == 0.0 => Some(n.mean),
            _ => None,
        }
    }

    pub fn as_normal(&self) -> Option<&NormalSpec> {
        match self {
            Distribution::Normal(n) => Some(n),
            Distribution::Discrete(_) => None,
        }
    }
}

impl From<DiscreteDist> for Distribution {
    fn from(d: DiscreteDist) -> Self {
        Distribution::Discrete(d)
    }
}

impl From<NormalSpec> for Distribution {
    fn from(n: NormalSpec) -> Self {
        Distribution::Normal(n)
    }
}

pub fn variance(dist: &Distribution) -> f64 {
    match dist {
        Distribution::Discrete(d) => d.variance(),
        Distribution::Normal(n) => n.variance(),
    }
}

/// `Σ wᵢxᵢ² − (Σ wᵢxᵢ)²` for weights summing to one.
pub fn weighted_variance(weights: &[f64], values: &[f64]) -> f64 {
    let m: f64 = weights.iter().zip(values).map(|(w, x)| w * x).sum();
    let m2: f64 = weights.iter().zip(values).map(|(w, x)| w * x * x).sum();
    m2 - m * m
}

/// `Σ_{i<j} wᵢwⱼ(xᵢ − xⱼ)²`, equal to [`weighted_variance`] when the weights sum to one.
pub fn pairwise_spread(weights: &[f64], values: &[f64]) -> f64 {
    let mut s = 0.0;
    for i in 0..values.len() {
        for j in i + 1..values.len() {
            let d = values[i] - values[j];
            s += weights[i] * weights[j] * d * d;
        }
    }
    s
}

pub(crate) fn std_normal() -> Normal {
    Normal::new(0.0, 1.0).expect("standard normal")
}

/// Standard normal CDF.
pub fn phi(x: f64) -> f64 {
    std_normal().cdf(x)
}

/// Splits a normal into `points` equal-probability intervals, each represented by
/// its conditional mean.
pub fn discretize_normal(spec: NormalSpec, points: usize) -> DiscreteDist {
    if spec.stddev == 0.0 || points <= 1 {
        return DiscreteDist::point(spec.mean);
    }
    let z = std_normal();
    let k = points as f64;
    // Conditional mean of Z on (a, b) with mass 1/k is k·(φ(a) − φ(b)).
    let density = |j: usize| -> f64 {
        if j == 0 || j == points {
            0.0
        } else {
            z.pdf(z.inverse_cdf(j as f64 / k))
        }
    };
    let atoms = (0..points)
        .map(|j| {
            let m = k * (density(j) - density(j + 1));
            (spec.mean + spec.stddev * m, 1.0 / k)
        })
        .collect();
    DiscreteDist::new_unchecked(atoms)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_merges_sorts_and_rescales() {
        let d = DiscreteDist::canonical(vec![(2.0, 1.0), (1.0, 0.0), (0.0, 1.0), (2.0, 2.0)]).unwrap();
        let atoms: Vec<(f64, f64)> = d.atoms().iter().map(|a| (a.value, a.prob)).collect();
        assert_eq!(atoms, vec![(0.0, 0.25), (2.0, 0.75)]);
        assert!(DiscreteDist::canonical(vec![(1.0, 0.0)]).is_err());
    }

    #[test]
    fn bernoulli_edges_are_point_masses() {
        assert!(DiscreteDist::bernoulli(0.0).unwrap().is_point_mass());
        assert_eq!(DiscreteDist::bernoulli(1.0).unwrap().mean(), 1.0);
        assert_eq!(DiscreteDist::bernoulli(0.25).unwrap().variance(), 0.1875);
    }
}
