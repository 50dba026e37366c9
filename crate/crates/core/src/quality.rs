//! Claim-quality measures and the query functions the planners optimize.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::claims::{relative_strength, Claim, ClaimSystem, Direction};
use crate::error::{Error, Result};
use crate::model::{condition, Dataset, DiscreteDist, Realization, Space, DEFAULT_CAP};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MeasureKind {
    Bias,
    Duplicity,
    Fragility,
}

impl FromStr for MeasureKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "bias" => Ok(MeasureKind::Bias),
            "duplicity" => Ok(MeasureKind::Duplicity),
            "fragility" => Ok(MeasureKind::Fragility),
            _ => Err(Error::InvalidArgument(format!("unknown measure `{s}`"))),
        }
    }
}

impl fmt::Display for MeasureKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            MeasureKind::Bias => "bias",
            MeasureKind::Duplicity => "duplicity",
            MeasureKind::Fragility => "fragility",
        })
    }
}

/// What perturbations are compared against. For an ordinary claim this is the
/// original claim on current data; a threshold claim is compared against its
/// threshold, flipped so that "below" counts as stronger.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Baseline {
    pub value: f64,
    pub sign: f64,
}

impl Baseline {
    pub fn of(system: &ClaimSystem, current: &[f64]) -> Self {
        match &system.original {
            Claim::Threshold(t) => Baseline {
                value: t.threshold,
                sign: if t.direction == Direction::Below { -1.0 } else { 1.0 },
            },
            q => Baseline {
                value: q.eval(current),
                sign: 1.0,
            },
        }
    }

    pub fn delta(&self, q: f64) -> f64 {
        relative_strength(self.sign * q, self.sign * self.value)
    }
}

/// Fairness: `Σ s_k Δ(q_k(values), baseline)`.
pub fn bias(system: &ClaimSystem, current: &[f64], values: &[f64]) -> f64 {
    QualityMeasure::with_baseline(MeasureKind::Bias, system.clone(), Baseline::of(system, current)).evaluate(values)
}

/// Uniqueness: number of perturbations at least as strong as the original.
pub fn duplicity(system: &ClaimSystem, current: &[f64], values: &[f64]) -> usize {
    QualityMeasure::with_baseline(MeasureKind::Duplicity, system.clone(), Baseline::of(system, current))
        .evaluate(values) as usize
}

/// Robustness: `Σ s_k min(Δ_k, 0)²`.
pub fn fragility(system: &ClaimSystem, current: &[f64], values: &[f64]) -> f64 {
    QualityMeasure::with_baseline(MeasureKind::Fragility, system.clone(), Baseline::of(system, current))
        .evaluate(values)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QualityMeasure {
    pub kind: MeasureKind,
    pub system: ClaimSystem,
    pub baseline: Baseline,
}

impl QualityMeasure {
    /// Freezes the baseline at the dataset's current values.
    pub fn new(kind: MeasureKind, system: ClaimSystem, dataset: &Dataset) -> Result<Self> {
        system.check(dataset.len())?;
        let baseline = Baseline::of(&system, &dataset.current_values());
        Ok(Self::with_baseline(kind, system, baseline))
    }

    pub fn with_baseline(kind: MeasureKind, system: ClaimSystem, baseline: Baseline) -> Self {
        QualityMeasure { kind, system, baseline }
    }

    pub fn deltas(&self, values: &[f64]) -> Vec<f64> {
        self.system
            .perturbations
            .iter()
            .map(|q| self.baseline.delta(q.eval(values)))
            .collect()
    }

    /// Contribution of perturbation `k`.
    pub fn term(&self, k: usize, values: &[f64]) -> f64 {
        let d = self.baseline.delta(self.system.perturbations[k].eval(values));
        let s = self.system.sensibilities[k];
        match self.kind {
            MeasureKind::Bias => s * d,
            MeasureKind::Duplicity => {
                if d >= 0.0 {
                    1.0
                } else {
                    0.0
                }
            }
            MeasureKind::Fragility => {
                let m = d.min(0.0);
                s * m * m
            }
        }
    }

    pub fn evaluate(&self, values: &[f64]) -> f64 {
        (0..self.system.len()).map(|k| self.term(k, values)).sum()
    }

    /// Bias over linear claims as a single linear form.
    pub fn linear_form(&self, n: usize) -> Option<LinearForm> {
        if self.kind != MeasureKind::Bias {
            return None;
        }
        let sign = self.baseline.sign;
        let mut weights = vec![0.0; n];
        let mut offset = -sign * self.baseline.value;
        for (q, s) in self.system.perturbations.iter().zip(&self.system.sensibilities) {
            for (i, a) in q.coefficients() {
                weights[i] += sign * s * a;
            }
            offset += sign * s * q.offset();
        }
        Some(LinearForm { weights, offset })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearForm {
    pub weights: Vec<f64>,
    #[serde(default)]
    pub offset: f64,
}

impl LinearForm {
    pub fn eval(&self, values: &[f64]) -> f64 {
        self.offset + self.weights.iter().zip(values).map(|(a, x)| a * x).sum::<f64>()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Comparison {
    Lt,
    Le,
    Gt,
    Ge,
}

impl Comparison {
    pub fn holds(&self, x: f64, t: f64) -> bool {
        match self {
            Comparison::Lt => x < t,
            Comparison::Le => x <= t,
            Comparison::Gt => x > t,
            Comparison::Ge => x >= t,
        }
    }
}

/// `1[Σ aᵢxᵢ ⋈ t]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IndicatorTerm {
    pub coefficients: Vec<(usize, f64)>,
    pub threshold: f64,
    pub cmp: Comparison,
}

impl IndicatorTerm {
    /// `1[Σ_{i∈members} xᵢ < t]`.
    pub fn sum_below(members: &[usize], threshold: f64) -> Self {
        IndicatorTerm {
            coefficients: members.iter().map(|&i| (i, 1.0)).collect(),
            threshold,
            cmp: Comparison::Lt,
        }
    }

    pub fn eval(&self, values: &[f64]) -> f64 {
        let x: f64 = self.coefficients.iter().map(|(i, a)| a * values[*i]).sum();
        if self.cmp.holds(x, self.threshold) {
            1.0
        } else {
            0.0
        }
    }
}

pub type CustomFn = dyn Fn(&[f64]) -> f64 + Send + Sync;

/// User-supplied query over a declared set of objects.
#[derive(Clone)]
pub struct CustomQuery {
    pub name: String,
    pub support: Vec<usize>,
    pub f: Arc<CustomFn>,
}

impl fmt::Debug for CustomQuery {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CustomQuery")
            .field("name", &self.name)
            .field("support", &self.support)
            .finish()
    }
}

/// The `f` whose post-cleaning behaviour the planners optimize.
#[derive(Debug, Clone)]
pub enum QueryFunction {
    Measure(QualityMeasure),
    Linear(LinearForm),
    Indicators(Vec<IndicatorTerm>),
    Custom(CustomQuery),
}

impl QueryFunction {
    pub fn custom(name: &str, support: Vec<usize>, f: impl Fn(&[f64]) -> f64 + Send + Sync + 'static) -> Self {
        QueryFunction::Custom(CustomQuery {
            name: name.to_string(),
            support,
            f: Arc::new(f),
        })
    }

    pub fn evaluate(&self, values: &[f64]) -> f64 {
        match self {
            QueryFunction::Measure(m) => m.evaluate(values),
            QueryFunction::Linear(l) => l.eval(values),
            QueryFunction::Indicators(ts) => ts.iter().map(|t| t.eval(values)).sum(),
            QueryFunction::Custom(c) => (c.f)(values),
        }
    }

    /// The query as `offset + a·x`, when it is linear.
    pub fn linear_form(&self, n: usize) -> Option<LinearForm> {
        match self {
            QueryFunction::Linear(l) => {
                let mut l = l.clone();
                l.weights.resize(n, 0.0);
                Some(l)
            }
            QueryFunction::Measure(m) => m.linear_form(n),
            _ => None,
        }
    }

    /// Object sets of the additive terms `f = c + Σ_k g_k`; each `g_k` only
    /// reads the objects listed for it.
    pub fn term_supports(&self) -> Vec<Vec<usize>> {
        let norm = |mut v: Vec<usize>| {
            v.sort_unstable();
            v.dedup();
            v
        };
        match self {
            QueryFunction::Measure(m) => m.system.perturbations.iter().map(|q| norm(q.referenced())).collect(),
            QueryFunction::Linear(l) => l
                .weights
                .iter()
                .enumerate()
                .filter(|(_, a)| **a != 0.0)
                .map(|(i, _)| vec![i])
                .collect(),
            QueryFunction::Indicators(ts) => ts
                .iter()
                .map(|t| norm(t.coefficients.iter().map(|(i, _)| *i).collect()))
                .collect(),
            QueryFunction::Custom(c) => vec![norm(c.support.clone())],
        }
    }

    /// Value of term `k`; with [`QueryFunction::constant`] these sum to `evaluate`.
    pub fn eval_term(&self, k: usize, values: &[f64]) -> f64 {
        match self {
            QueryFunction::Measure(m) => m.term(k, values),
            QueryFunction::Linear(l) => {
                let i = l
                    .weights
                    .iter()
                    .enumerate()
                    .filter(|(_, a)| **a != 0.0)
                    .nth(k)
                    .map(|(i, _)| i)
                    .expect("term index");
                l.weights[i] * values[i]
            }
            QueryFunction::Indicators(ts) => ts[k].eval(values),
            QueryFunction::Custom(c) => (c.f)(values),
        }
    }

    pub fn constant(&self) -> f64 {
        match self {
            QueryFunction::Linear(l) => l.offset,
            _ => 0.0,
        }
    }

    /// Objects the query can depend on.
    pub fn referenced(&self, n: usize) -> Vec<bool> {
        let mut r = vec![false; n];
        for s in self.term_supports() {
            for i in s {
                if i < n {
                    r[i] = true;
                }
            }
        }
        r
    }
}

/// Exact distribution of a query over the dataset's uncertain objects.
pub fn query_distribution(query: &QueryFunction, dataset: &Dataset, cap: u128) -> Result<DiscreteDist> {
    let referenced: Vec<usize> = query
        .referenced(dataset.len())
        .iter()
        .enumerate()
        .filter(|(_, r)| **r)
        .map(|(i, _)| i)
        .collect();
    if !dataset.is_independent() {
        return Err(Error::Dependent);
    }
    let space = Space::new(dataset, &referenced, cap)?;
    let mut values = dataset.current_values();
    let mut atoms = Vec::new();
    space.for_each(&mut values, |v, p| atoms.push((query.evaluate(v), p)));
    DiscreteDist::canonical(atoms)
}

/// Distribution of a quality measure after the objects in `cleaned` are revealed.
pub fn quality_distribution(
    measure: &QualityMeasure,
    dataset: &Dataset,
    cleaned: &Realization,
) -> Result<DiscreteDist> {
    let conditioned = condition(dataset, cleaned)?;
    query_distribution(&QueryFunction::Measure(measure.clone()), &conditioned, DEFAULT_CAP)
}
