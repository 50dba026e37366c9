use std::collections::HashSet;
use std::fmt;

use nalgebra::{DMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};

use super::dist::{same_value, DiscreteDist, Distribution};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UncertainObject {
    pub id: String,
    pub current_value: f64,
    pub cost: f64,
    pub dist: Distribution,
}

impl UncertainObject {
    pub fn new(id: impl Into<String>, current_value: f64, cost: f64, dist: impl Into<Distribution>) -> Self {
        UncertainObject {
            id: id.into(),
            current_value,
            cost,
            dist: dist.into(),
        }
    }

    pub fn variance(&self) -> f64 {
        self.dist.variance()
    }
}

/// Dense symmetric covariance matrix, row-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CovMatrix {
    n: usize,
    data: Vec<f64>,
}

impl CovMatrix {
    pub fn zeros(n: usize) -> Self {
        CovMatrix {
            n,
            data: vec![0.0; n * n],
        }
    }

    pub fn diagonal(vars: &[f64]) -> Self {
        let mut m = Self::zeros(vars.len());
        for (i, v) in vars.iter().enumerate() {
            m.set(i, i, *v);
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<f64>>) -> Self {
        let n = rows.len();
        CovMatrix {
            n,
            data: rows.into_iter().flatten().collect(),
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    /// Sets both `(i, j)` and `(j, i)`.
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.n + j] = v;
        self.data[j * self.n + i] = v;
    }

    pub fn is_diagonal(&self) -> bool {
        (0..self.n).all(|i| (0..self.n).all(|j| i == j || self.get(i, j) == 0.0))
    }

    pub fn is_symmetric(&self, tol: f64) -> bool {
        (0..self.n).all(|i| (i + 1..self.n).all(|j| (self.get(i, j) - self.get(j, i)).abs() <= tol))
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        let m = DMatrix::from_row_slice(self.n, self.n, &self.data);
        let mut ev: Vec<f64> = SymmetricEigen::new(m).eigenvalues.iter().copied().collect();
        ev.sort_by(f64::total_cmp);
        ev
    }

    /// Smallest eigenvalue is zero relative to the largest.
    pub fn is_rank_deficient(&self) -> bool {
        let ev = self.eigenvalues();
        match (ev.first(), ev.last()) {
            (Some(lo), Some(hi)) => *lo <= 1e-10 * hi.abs().max(f64::MIN_POSITIVE),
            _ => false,
        }
    }

    /// `Σ_{i,j∈S} aᵢaⱼ Cov(i,j)` over the objects flagged in `mask`.
    pub fn quadratic_form(&self, a: &[f64], mask: &[bool]) -> f64 {
        let mut s = 0.0;
        for i in 0..self.n {
            if !mask[i] || a[i] == 0.0 {
                continue;
            }
            for j in 0..self.n {
                if mask[j] {
                    s += a[i] * a[j] * self.get(i, j);
                }
            }
        }
        s
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub object: Option<String>,
    pub message: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.object {
            Some(id) => write!(f, "object `{id}`: {}", self.message),
            None => write!(f, "{}", self.message),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dataset {
    pub objects: Vec<UncertainObject>,
    pub covariance: Option<CovMatrix>,
}

impl Dataset {
    pub fn new(objects: Vec<UncertainObject>) -> Result<Self> {
        let d = Dataset {
            objects,
            covariance: None,
        };
        validate_dataset(&d).map_err(Error::Invalid)?;
        Ok(d)
    }

    pub fn with_covariance(mut self, cov: CovMatrix) -> Result<Self> {
        self.covariance = Some(cov);
        validate_dataset(&self).map_err(Error::Invalid)?;
        Ok(self)
    }

    pub fn without_covariance(&self) -> Self {
        Dataset {
            objects: self.objects.clone(),
            covariance: None,
        }
    }

    pub fn len(&self) -> usize {
        self.objects.len()
    }

    pub fn is_empty(&self) -> bool {
        self.objects.is_empty()
    }

    pub fn current_values(&self) -> Vec<f64> {
        self.objects.iter().map(|o| o.current_value).collect()
    }

    /// Current values, except that point masses contribute their only value.
    pub fn base_values(&self) -> Vec<f64> {
        self.objects
            .iter()
            .map(|o| o.dist.point_value().unwrap_or(o.current_value))
            .collect()
    }

    pub fn means(&self) -> Vec<f64> {
        self.objects.iter().map(|o| o.dist.mean()).collect()
    }

    pub fn costs(&self) -> Vec<f64> {
        self.objects.iter().map(|o| o.cost).collect()
    }

    pub fn variances(&self) -> Vec<f64> {
        self.objects.iter().map(|o| o.variance()).collect()
    }

    pub fn total_cost(&self) -> f64 {
        self.objects.iter().map(|o| o.cost).sum()
    }

    pub fn index_of(&self, id: &str) -> Result<usize> {
        self.objects
            .iter()
            .position(|o| o.id == id)
            .ok_or_else(|| Error::UnknownId(id.to_string()))
    }

    pub fn ids(&self, idx: &[usize]) -> Vec<String> {
        idx.iter().map(|&i| self.objects[i].id.clone()).collect()
    }

    /// No covariance model, or only a diagonal one.
    pub fn is_independent(&self) -> bool {
        self.covariance.as_ref().is_none_or(|c| c.is_diagonal())
    }

    /// Covariance in effect: the stored matrix or the diagonal of variances.
    pub fn effective_covariance(&self) -> CovMatrix {
        self.covariance
            .clone()
            .unwrap_or_else(|| CovMatrix::diagonal(&self.variances()))
    }

    pub fn check_index(&self, i: usize) -> Result<()> {
        if i < self.len() {
            Ok(())
        } else {
            Err(Error::UnknownObject {
                index: i,
                len: self.len(),
            })
        }
    }
}

/// Every broken invariant of the dataset, in object order.
pub fn validate_dataset(dataset: &Dataset) -> std::result::Result<(), Vec<Violation>> {
    let mut out = Vec::new();
    let mut seen = HashSet::new();
    for o in &dataset.objects {
        let bad = |message: String| Violation {
            object: Some(o.id.clone()),
            message,
        };
        if o.id.is_empty() {
            out.push(bad("empty id".into()));
        }
        if !seen.insert(o.id.as_str()) {
            out.push(bad("duplicate id".into()));
        }
        if !(o.cost > 0.0 && o.cost.is_finite()) {
            out.push(bad(format!("cost {} must be positive and finite", o.cost)));
        }
        if !o.current_value.is_finite() {
            out.push(bad(format!("current value {} is not finite", o.current_value)));
        }
        match &o.dist {
            Distribution::Discrete(d) => out.extend(d.problems().into_iter().map(&bad)),
            Distribution::Normal(n) => {
                if !n.mean.is_finite() || !n.stddev.is_finite() || n.stddev < 0.0 {
                    out.push(bad(format!("invalid normal({},{})", n.mean, n.stddev)));
                }
            }
        }
    }
    if let Some(c) = &dataset.covariance {
        let n = dataset.len();
        if c.dim() != n {
            out.push(Violation {
                object: None,
                message: format!("covariance is {0}x{0} for {n} objects", c.dim()),
            });
        } else {
            if !c.is_symmetric(1e-9) {
                out.push(Violation {
                    object: None,
                    message: "covariance is not symmetric".into(),
                });
            }
            for (i, o) in dataset.objects.iter().enumerate() {
                let v = o.variance();
                if (c.get(i, i) - v).abs() > 1e-9 * v.abs().max(1.0) {
                    out.push(Violation {
                        object: Some(o.id.clone()),
                        message: format!("covariance diagonal {} differs from variance {v}", c.get(i, i)),
                    });
                }
            }
        }
    }
    if out.is_empty() {
        Ok(())
    } else {
        Err(out)
    }
}

/// Values revealed for some objects, with the probability of that outcome.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Realization {
    pub assignment: Vec<(usize, f64)>,
    pub probability: f64,
}

impl Realization {
    pub fn empty() -> Self {
        Realization {
            assignment: Vec::new(),
            probability: 1.0,
        }
    }

    pub fn of(assignment: Vec<(usize, f64)>) -> Self {
        Realization {
            assignment,
            probability: f64::NAN,
        }
    }
}

/// Replaces each assigned object's distribution by a point mass at its value.
pub fn condition(dataset: &Dataset, realization: &Realization) -> Result<Dataset> {
    if !dataset.is_independent() && !realization.assignment.is_empty() {
        return Err(Error::Dependent);
    }
    let mut out = dataset.clone();
    for &(i, v) in &realization.assignment {
        dataset.check_index(i)?;
        let o = &mut out.objects[i];
        match &o.dist {
            Distribution::Discrete(d) => {
                let pos = d.position(v).ok_or_else(|| Error::ValueNotInSupport {
                    id: o.id.clone(),
                    value: v,
                })?;
                let exact = d.atoms()[pos].value;
                o.dist = Distribution::Discrete(DiscreteDist::point(exact));
            }
            Distribution::Normal(n) => {
                if n.stddev == 0.0 && !same_value(n.mean, v) {
                    return Err(Error::ValueNotInSupport {
                        id: o.id.clone(),
                        value: v,
                    });
                }
                o.dist = Distribution::Discrete(DiscreteDist::point(v));
            }
        }
    }
    if let Some(c) = &mut out.covariance {
        for &(i, _) in &realization.assignment {
            c.set(i, i, 0.0);
        }
    }
    Ok(out)
}
