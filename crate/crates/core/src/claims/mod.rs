//! Claim functions over the object values, perturbation sets and sensibilities.

mod file;

pub use file::{
    parse_claims, read_claims, ClaimSpec, ClaimsConfig, ClaimsFile, IdRef, PerturbationSpec, SensibilitySpec,
};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const DEFAULT_DECAY_RATE: f64 = 1.5;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearClaim {
    pub weights: Vec<f64>,
    #[serde(default)]
    pub offset: f64,
}

/// Difference of two equal-length window sums: second window minus first.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct WindowAggregateClaim {
    pub left_start: usize,
    pub right_start: usize,
    pub window: usize,
}

impl WindowAggregateClaim {
    pub fn back_to_back(left_start: usize, window: usize) -> Self {
        WindowAggregateClaim {
            left_start,
            right_start: left_start + window,
            window,
        }
    }

    fn shifted(&self, d: isize) -> Self {
        WindowAggregateClaim {
            left_start: (self.left_start as isize + d) as usize,
            right_start: (self.right_start as isize + d) as usize,
            window: self.window,
        }
    }

    /// One past the last index either window touches.
    pub fn end(&self) -> usize {
        self.left_start.max(self.right_start) + self.window
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Below,
    Above,
}

/// Sum over a set of objects, judged against a threshold by the quality measures.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThresholdClaim {
    pub members: Vec<usize>,
    pub threshold: f64,
    pub direction: Direction,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum Claim {
    Linear(LinearClaim),
    Window(WindowAggregateClaim),
    Threshold(ThresholdClaim),
}

impl Claim {
    pub fn linear(weights: Vec<f64>) -> Self {
        Claim::Linear(LinearClaim { weights, offset: 0.0 })
    }

    /// Sparse coefficients `(index, aᵢ)` with `aᵢ ≠ 0`, sorted by index.
    pub fn coefficients(&self) -> Vec<(usize, f64)> {
        match self {
            Claim::Linear(c) => c
                .weights
                .iter()
                .enumerate()
                .filter(|(_, w)| **w != 0.0)
                .map(|(i, w)| (i, *w))
                .collect(),
            Claim::Window(c) => {
                let hi = c.end();
                let mut a = vec![0.0; hi];
                for x in &mut a[c.left_start..c.left_start + c.window] {
                    *x -= 1.0;
                }
                for x in &mut a[c.right_start..c.right_start + c.window] {
                    *x += 1.0;
                }
                a.into_iter().enumerate().filter(|(_, w)| *w != 0.0).collect()
            }
            Claim::Threshold(c) => {
                let mut m = c.members.clone();
                m.sort_unstable();
                m.dedup();
                m.into_iter().map(|i| (i, 1.0)).collect()
            }
        }
    }

    pub fn offset(&self) -> f64 {
        match self {
            Claim::Linear(c) => c.offset,
            _ => 0.0,
        }
    }

    /// Dense coefficient row of length `n`.
    pub fn dense(&self, n: usize) -> Vec<f64> {
        let mut a = vec![0.0; n];
        for (i, w) in self.coefficients() {
            if i < n {
                a[i] += w;
            }
        }
        a
    }

    pub fn referenced(&self) -> Vec<usize> {
        self.coefficients().into_iter().map(|(i, _)| i).collect()
    }

    /// Position used for sensibility distances: one past the last index touched.
    pub fn end(&self) -> usize {
        match self {
            Claim::Window(c) => c.end(),
            _ => self.referenced().last().map_or(0, |i| i + 1),
        }
    }

    /// Checks that every referenced index exists in a dataset of `n` objects.
    pub fn check(&self, n: usize) -> Result<()> {
        if let Claim::Linear(c) = self {
            if c.weights.len() != n {
                return Err(Error::Claims(format!(
                    "linear claim has {} weights for {n} objects",
                    c.weights.len()
                )));
            }
        }
        if let Claim::Window(c) = self {
            if c.window == 0 {
                return Err(Error::Claims("window length must be at least 1".into()));
            }
            if c.end() > n {
                return Err(Error::InsufficientRange(format!(
                    "windows at {} and {} of length {} exceed {n} objects",
                    c.left_start, c.right_start, c.window
                )));
            }
        }
        if let Claim::Threshold(c) = self {
            if let Some(&i) = c.members.iter().find(|&&i| i >= n) {
                return Err(Error::UnknownObject { index: i, len: n });
            }
        }
        Ok(())
    }

    /// Evaluation without bounds checks on the referenced values.
    pub fn eval(&self, values: &[f64]) -> f64 {
        match self {
            Claim::Linear(c) => c.offset + c.weights.iter().zip(values).map(|(a, x)| a * x).sum::<f64>(),
            Claim::Window(c) => {
                let r: f64 = values[c.right_start..c.right_start + c.window].iter().sum();
                let l: f64 = values[c.left_start..c.left_start + c.window].iter().sum();
                r - l
            }
            Claim::Threshold(c) => c.members.iter().map(|&i| values[i]).sum(),
        }
    }
}

/// Evaluates a claim; NaN or absent entries count as missing.
pub fn evaluate_claim(claim: &Claim, values: &[f64]) -> Result<f64> {
    let missing: Vec<usize> = claim
        .referenced()
        .into_iter()
        .filter(|&i| values.get(i).is_none_or(|v| v.is_nan()))
        .collect();
    if !missing.is_empty() {
        return Err(Error::MissingValues(missing));
    }
    if let Claim::Linear(c) = claim {
        if c.weights.len() > values.len() {
            return Err(Error::MissingValues((values.len()..c.weights.len()).collect()));
        }
    }
    Ok(claim.eval(values))
}

/// Positive when `x` strengthens the claim relative to `y`.
pub fn relative_strength(x: f64, y: f64) -> f64 {
    x - y
}

/// Time-shifted copies of `spec` over a series of `n` values: the `count`
/// shifts closest to the original, returned in order of increasing end.
pub fn window_perturbations(
    spec: &WindowAggregateClaim,
    n: usize,
    count: usize,
    include_original: bool,
) -> Result<Vec<WindowAggregateClaim>> {
    if count == 0 {
        return Ok(Vec::new());
    }
    let lo = spec.left_start.min(spec.right_start) as isize;
    let hi = spec.end() as isize;
    let mut shifts: Vec<isize> = (-lo..=(n as isize - hi))
        .filter(|&d| include_original || d != 0)
        .collect();
    if shifts.len() < count {
        return Err(Error::InsufficientRange(format!(
            "{count} shifts requested, {} fit in {n} values",
            shifts.len()
        )));
    }
    shifts.sort_by_key(|&d| (d.abs(), d));
    shifts.truncate(count);
    shifts.sort_unstable();
    Ok(shifts.into_iter().map(|d| spec.shifted(d)).collect())
}

/// `sᵢ ∝ exp(−rate·dᵢ)`, normalized.
pub fn sensibility_exp_decay(distances: &[f64], rate: f64) -> Vec<f64> {
    let dmin = distances.iter().copied().fold(f64::INFINITY, f64::min);
    let raw: Vec<f64> = distances.iter().map(|d| (-rate * (d - dmin)).exp()).collect();
    let total: f64 = raw.iter().sum();
    raw.into_iter().map(|x| x / total).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClaimSystem {
    pub original: Claim,
    pub perturbations: Vec<Claim>,
    pub sensibilities: Vec<f64>,
}

impl ClaimSystem {
    pub fn new(original: Claim, perturbations: Vec<Claim>, sensibilities: Vec<f64>) -> Result<Self> {
        if perturbations.is_empty() {
            return Err(Error::Claims("at least one perturbation is required".into()));
        }
        if perturbations.len() != sensibilities.len() {
            return Err(Error::Claims(format!(
                "{} perturbations but {} sensibilities",
                perturbations.len(),
                sensibilities.len()
            )));
        }
        if sensibilities.iter().any(|s| !(*s >= 0.0)) {
            return Err(Error::Claims("sensibilities must be nonnegative".into()));
        }
        let total: f64 = sensibilities.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::Claims(format!("sensibilities sum to {total}, not 1")));
        }
        Ok(ClaimSystem {
            original,
            perturbations,
            sensibilities,
        })
    }

    pub fn uniform(original: Claim, perturbations: Vec<Claim>) -> Result<Self> {
        let m = perturbations.len();
        Self::new(original, perturbations, vec![1.0 / m as f64; m])
    }

    /// Sensibilities decaying with the distance between claim ends.
    pub fn exp_decay(original: Claim, perturbations: Vec<Claim>, rate: f64) -> Result<Self> {
        let s = sensibility_exp_decay(&Self::distances_for(&original, &perturbations), rate);
        Self::new(original, perturbations, s)
    }

    fn distances_for(original: &Claim, perturbations: &[Claim]) -> Vec<f64> {
        let e0 = original.end() as f64;
        perturbations.iter().map(|q| (q.end() as f64 - e0).abs()).collect()
    }

    pub fn distances(&self) -> Vec<f64> {
        Self::distances_for(&self.original, &self.perturbations)
    }

    pub fn len(&self) -> usize {
        self.perturbations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.perturbations.is_empty()
    }

    pub fn check(&self, n: usize) -> Result<()> {
        self.original.check(n)?;
        for q in &self.perturbations {
            q.check(n)?;
        }
        Ok(())
    }

    /// Back-to-back window claim with `count` shifted perturbations and
    /// exponentially decaying sensibilities.
    pub fn window_shift(
        original: WindowAggregateClaim,
        n: usize,
        count: usize,
        include_original: bool,
        rate: f64,
    ) -> Result<Self> {
        let ps = window_perturbations(&original, n, count, include_original)?;
        Self::exp_decay(
            Claim::Window(original),
            ps.into_iter().map(Claim::Window).collect(),
            rate,
        )
    }
}
