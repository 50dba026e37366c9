//! Expected post-cleaning variance `EVar(T)`: brute force, per-claim
//! decomposition, linear closed form, marginal gains and curvature.

use std::collections::HashMap;
use std::sync::Arc;

use parking_lot::Mutex;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{condition, CovMatrix, Dataset, Realization, Space, DEFAULT_CAP};
use crate::quality::{query_distribution, LinearForm, QueryFunction};

pub const DEFAULT_MC_SAMPLES: usize = 20_000;

/// Variance of `f` once the objects in `assignment` are fixed.
pub fn conditional_variance(query: &QueryFunction, dataset: &Dataset, assignment: &Realization) -> Result<f64> {
    let d = condition(dataset, assignment)?;
    Ok(query_distribution(query, &d, DEFAULT_CAP)?.variance())
}

fn sorted(subset: &[usize]) -> Vec<usize> {
    let mut t = subset.to_vec();
    t.sort_unstable();
    t.dedup();
    t
}

fn referenced_list(query: &QueryFunction, n: usize) -> Vec<usize> {
    query
        .referenced(n)
        .into_iter()
        .enumerate()
        .filter(|(_, r)| *r)
        .map(|(i, _)| i)
        .collect()
}

/// `Σ_{v ∈ V_T} Pr[X_T = v] · Var[f | X_T = v]` by full enumeration.
pub fn evar_bruteforce(query: &QueryFunction, dataset: &Dataset, subset: &[usize]) -> Result<f64> {
    evar_bruteforce_capped(query, dataset, subset, DEFAULT_CAP)
}

pub fn evar_bruteforce_capped(query: &QueryFunction, dataset: &Dataset, subset: &[usize], cap: u128) -> Result<f64> {
    if !dataset.is_independent() {
        return Err(Error::Dependent);
    }
    let t = sorted(subset);
    let rest: Vec<usize> = referenced_list(query, dataset.len())
        .into_iter()
        .filter(|i| t.binary_search(i).is_err())
        .collect();
    let outer = Space::new(dataset, &t, cap)?;
    let inner = Space::new(dataset, &rest, cap)?;
    let size = outer.size().saturating_mul(inner.size());
    if size > cap {
        return Err(Error::CapExceeded { size, cap });
    }
    let mut values = dataset.base_values();
    let mut total = 0.0;
    let mut scratch = values.clone();
    outer.for_each(&mut values, |v, pt| {
        scratch.copy_from_slice(v);
        let (mut m1, mut m2) = (0.0, 0.0);
        inner.for_each(&mut scratch, |w, p| {
            let y = query.evaluate(w);
            m1 += p * y;
            m2 += p * y * y;
        });
        total += pt * (m2 - m1 * m1).max(0.0);
    });
    Ok(total.max(0.0))
}

/// Mixed-radix walk over position vectors.
fn for_each_state(radix: &[usize], mut f: impl FnMut(&[usize])) {
    let k = radix.len();
    let mut pos = vec![0usize; k];
    loop {
        f(&pos);
        let mut j = k;
        loop {
            if j == 0 {
                return;
            }
            j -= 1;
            pos[j] += 1;
            if pos[j] < radix[j] {
                break;
            }
            pos[j] = 0;
        }
    }
}

/// Conditional means of one term given the cleaned objects it reads.
struct TermTable {
    /// Cleaned objects of the term, sorted.
    cleaned: Vec<usize>,
    /// Mixed-radix strides over `cleaned`.
    strides: Vec<usize>,
    means: Vec<f64>,
}

/// A term (or pair) index with the cleaned objects it touches.
type TermKey = (usize, Vec<usize>);

/// Precomputed pieces of the per-claim decomposition of `EVar`.
///
/// With `f = c + Σ_k g_k` and `m_k = E[g_k | X_T]`,
/// `EVar(T) = Σ_{k,k'} (E[g_k g_k'] − E[m_k m_k'])`, where only pairs of terms
/// sharing an object contribute under independence: the diagonal gives the
/// expected conditional variances and the off-diagonal pairs the covariances.
pub struct Decomposition {
    supports: Vec<Vec<usize>>,
    /// Overlapping pairs `(k, k', E[g_k g_k'])` with `k ≤ k'`.
    pairs: Vec<(usize, usize, f64)>,
    atoms: Vec<Vec<(f64, f64)>>,
    base: Vec<f64>,
    cap: u128,
    tables: Mutex<HashMap<TermKey, Arc<TermTable>>>,
    pair_cache: Mutex<HashMap<TermKey, f64>>,
}

impl Decomposition {
    pub fn new(query: &QueryFunction, dataset: &Dataset, cap: u128) -> Result<Self> {
        if !dataset.is_independent() {
            return Err(Error::Dependent);
        }
        let n = dataset.len();
        let base = dataset.base_values();
        let all = Space::uncertain(dataset, &referenced_list(query, n), u128::MAX)?;
        let mut atoms = vec![Vec::new(); n];
        for (j, &i) in all.objects.iter().enumerate() {
            atoms[i] = all.atoms[j].clone();
        }
        let supports: Vec<Vec<usize>> = query
            .term_supports()
            .into_iter()
            .map(|s| s.into_iter().filter(|&i| !atoms[i].is_empty()).collect())
            .collect();
        let mut d = Decomposition {
            supports,
            pairs: Vec::new(),
            atoms,
            base,
            cap,
            tables: Mutex::new(HashMap::new()),
            pair_cache: Mutex::new(HashMap::new()),
        };
        let m = d.supports.len();
        for k in 0..m {
            for l in k..m {
                if k != l && !overlaps(&d.supports[k], &d.supports[l]) {
                    continue;
                }
                let u = union(&d.supports[k], &d.supports[l]);
                let e = d.expect(&u, |v| query.eval_term(k, v) * query.eval_term(l, v))?;
                d.pairs.push((k, l, e));
            }
        }
        Ok(d)
    }

    fn size_of(&self, objs: &[usize]) -> Result<()> {
        let size: u128 = objs.iter().map(|&i| self.atoms[i].len() as u128).product();
        if size > self.cap {
            return Err(Error::CapExceeded { size, cap: self.cap });
        }
        Ok(())
    }

    /// `E[h]` over the joint states of `objs`.
    fn expect(&self, objs: &[usize], h: impl Fn(&[f64]) -> f64) -> Result<f64> {
        self.size_of(objs)?;
        let radix: Vec<usize> = objs.iter().map(|&i| self.atoms[i].len()).collect();
        let mut values = self.base.clone();
        let mut total = 0.0;
        for_each_state(&radix, |pos| {
            let mut p = 1.0;
            for (j, &i) in objs.iter().enumerate() {
                let (v, q) = self.atoms[i][pos[j]];
                values[i] = v;
                p *= q;
            }
            total += p * h(&values);
        });
        Ok(total)
    }

    fn table(&self, query: &QueryFunction, k: usize, t: &[bool]) -> Result<Arc<TermTable>> {
        let cleaned: Vec<usize> = self.supports[k].iter().copied().filter(|&i| t[i]).collect();
        let key = (k, cleaned.clone());
        if let Some(tab) = self.tables.lock().get(&key) {
            return Ok(tab.clone());
        }
        let free: Vec<usize> = self.supports[k].iter().copied().filter(|&i| !t[i]).collect();
        self.size_of(&self.supports[k])?;
        let radix_c: Vec<usize> = cleaned.iter().map(|&i| self.atoms[i].len()).collect();
        let radix_f: Vec<usize> = free.iter().map(|&i| self.atoms[i].len()).collect();
        let mut strides = vec![1usize; cleaned.len()];
        for j in (0..cleaned.len().saturating_sub(1)).rev() {
            strides[j] = strides[j + 1] * radix_c[j + 1];
        }
        let mut means = Vec::with_capacity(radix_c.iter().product());
        let mut values = self.base.clone();
        for_each_state(&radix_c, |pc| {
            for (j, &i) in cleaned.iter().enumerate() {
                values[i] = self.atoms[i][pc[j]].0;
            }
            let mut m = 0.0;
            for_each_state(&radix_f, |pf| {
                let mut p = 1.0;
                for (j, &i) in free.iter().enumerate() {
                    let (v, q) = self.atoms[i][pf[j]];
                    values[i] = v;
                    p *= q;
                }
                m += p * query.eval_term(k, &values);
            });
            means.push(m);
        });
        let tab = Arc::new(TermTable {
            cleaned,
            strides,
            means,
        });
        self.tables.lock().insert(key, tab.clone());
        Ok(tab)
    }

    /// `E[m_k m_l]` for the pair at `pi`.
    fn pair_moment(&self, query: &QueryFunction, pi: usize, t: &[bool]) -> Result<f64> {
        let (k, l, _) = self.pairs[pi];
        let u = union(&self.supports[k], &self.supports[l]);
        let cleaned: Vec<usize> = u.into_iter().filter(|&i| t[i]).collect();
        let key = (pi, cleaned.clone());
        if let Some(v) = self.pair_cache.lock().get(&key) {
            return Ok(*v);
        }
        let tk = self.table(query, k, t)?;
        let tl = self.table(query, l, t)?;
        self.size_of(&cleaned)?;
        let radix: Vec<usize> = cleaned.iter().map(|&i| self.atoms[i].len()).collect();
        let stride_in = |tab: &TermTable| -> Vec<usize> {
            cleaned
                .iter()
                .map(|i| tab.cleaned.iter().position(|x| x == i).map_or(0, |p| tab.strides[p]))
                .collect()
        };
        let sk = stride_in(&tk);
        let sl = stride_in(&tl);
        let mut total = 0.0;
        for_each_state(&radix, |pos| {
            let (mut ik, mut il, mut p) = (0, 0, 1.0);
            for (j, &i) in cleaned.iter().enumerate() {
                ik += pos[j] * sk[j];
                il += pos[j] * sl[j];
                p *= self.atoms[i][pos[j]].1;
            }
            total += p * tk.means[ik] * tl.means[il];
        });
        self.pair_cache.lock().insert(key, total);
        Ok(total)
    }

    pub fn evar(&self, query: &QueryFunction, t: &[bool]) -> Result<f64> {
        let mut total = 0.0;
        for (pi, &(k, l, e)) in self.pairs.iter().enumerate() {
            let c = e - self.pair_moment(query, pi, t)?;
            total += if k == l { c } else { 2.0 * c };
        }
        Ok(total.max(0.0))
    }
}

fn overlaps(a: &[usize], b: &[usize]) -> bool {
    a.iter().any(|x| b.binary_search(x).is_ok())
}

fn union(a: &[usize], b: &[usize]) -> Vec<usize> {
    let mut u: Vec<usize> = a.iter().chain(b).copied().collect();
    u.sort_unstable();
    u.dedup();
    u
}

fn mask(n: usize, subset: &[usize]) -> Vec<bool> {
    let mut m = vec![false; n];
    for &i in subset {
        m[i] = true;
    }
    m
}

/// `EVar(T)` through the per-claim decomposition.
pub fn evar_decomposed(query: &QueryFunction, dataset: &Dataset, subset: &[usize]) -> Result<f64> {
    for &i in subset {
        dataset.check_index(i)?;
    }
    Decomposition::new(query, dataset, DEFAULT_CAP)?.evar(query, &mask(dataset.len(), subset))
}

/// Residual variance `Σ_{i,j ∉ T} aᵢaⱼ Cov(Xᵢ, Xⱼ)` of a linear query.
pub fn linear_residual(weights: &[f64], cov: &CovMatrix, subset: &[usize]) -> f64 {
    let mut free = vec![true; weights.len()];
    for &i in subset {
        free[i] = false;
    }
    cov.quadratic_form(weights, &free).max(0.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EvarMethod {
    /// Linear closed form when possible, else the decomposition.
    Auto,
    BruteForce,
    Decomposed,
    Linear,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MonteCarlo {
    pub samples: usize,
    pub seed: u64,
}

/// A marginal gain, flagged when it was estimated by sampling.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Gain {
    pub value: f64,
    pub approximate: bool,
}

enum Backend {
    Brute,
    Decomposed(Decomposition),
    Linear { form: LinearForm, cov: CovMatrix },
}

/// `EVar` evaluator for one query and dataset, with a memo table keyed by the
/// sorted subset. Safe to share between threads.
pub struct EvarEngine {
    query: QueryFunction,
    dataset: Dataset,
    backend: Backend,
    cap: u128,
    memo: Mutex<HashMap<Vec<usize>, f64>>,
    mc: Option<MonteCarlo>,
}

impl EvarEngine {
    pub fn new(query: QueryFunction, dataset: Dataset) -> Result<Self> {
        Self::with_method(query, dataset, EvarMethod::Auto)
    }

    pub fn with_method(query: QueryFunction, dataset: Dataset, method: EvarMethod) -> Result<Self> {
        let n = dataset.len();
        let linear = query.linear_form(n);
        let backend = match (method, linear) {
            (EvarMethod::Auto | EvarMethod::Linear, Some(form)) => Backend::Linear {
                form,
                cov: dataset.effective_covariance(),
            },
            (EvarMethod::Linear, None) => return Err(Error::InvalidArgument("query is not linear".into())),
            _ if !dataset.is_independent() => return Err(Error::DependentNonLinear),
            (EvarMethod::BruteForce, _) => Backend::Brute,
            _ => Backend::Decomposed(Decomposition::new(&query, &dataset, DEFAULT_CAP)?),
        };
        Ok(EvarEngine {
            query,
            dataset,
            backend,
            cap: DEFAULT_CAP,
            memo: Mutex::new(HashMap::new()),
            mc: None,
        })
    }

    /// Allows sampled marginal gains when exact enumeration exceeds the cap.
    pub fn with_monte_carlo(mut self, mc: MonteCarlo) -> Self {
        self.mc = Some(mc);
        self
    }

    pub fn query(&self) -> &QueryFunction {
        &self.query
    }

    pub fn dataset(&self) -> &Dataset {
        &self.dataset
    }

    pub fn len(&self) -> usize {
        self.dataset.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dataset.is_empty()
    }

    pub fn is_modular(&self) -> bool {
        matches!(self.backend, Backend::Linear { .. }) && self.dataset.is_independent()
    }

    pub fn clear_memo(&self) {
        self.memo.lock().clear();
    }

    pub fn evar(&self, subset: &[usize]) -> Result<f64> {
        for &i in subset {
            self.dataset.check_index(i)?;
        }
        let key = sorted(subset);
        if let Some(v) = self.memo.lock().get(&key) {
            return Ok(*v);
        }
        let v = match &self.backend {
            Backend::Brute => evar_bruteforce_capped(&self.query, &self.dataset, &key, self.cap)?,
            Backend::Decomposed(d) => d.evar(&self.query, &mask(self.dataset.len(), &key))?,
            Backend::Linear { form, cov } => linear_residual(&form.weights, cov, &key),
        };
        self.memo.lock().insert(key, v);
        Ok(v)
    }

    /// `EVar(T) − EVar(T ∪ {i})`.
    pub fn marginal_gain(&self, subset: &[usize], candidate: usize) -> Result<f64> {
        let mut with = subset.to_vec();
        with.push(candidate);
        Ok(self.evar(subset)? - self.evar(&with)?)
    }

    /// Marginal gain, sampled when exact evaluation exceeds the cap and a
    /// Monte Carlo configuration is set.
    pub fn gain(&self, subset: &[usize], candidate: usize) -> Result<Gain> {
        match self.marginal_gain(subset, candidate) {
            Ok(value) => Ok(Gain {
                value,
                approximate: false,
            }),
            Err(Error::CapExceeded { .. }) if self.mc.is_some() => {
                let mc = self.mc.unwrap();
                Ok(Gain {
                    value: gain_monte_carlo(&self.query, &self.dataset, subset, candidate, mc)?,
                    approximate: true,
                })
            }
            Err(e) => Err(e),
        }
    }

    /// `κ = 1 − min_i (EVar(∅) − EVar({i})) / EVar(O ∖ {i})`.
    pub fn curvature(&self) -> Result<Curvature> {
        let n = self.dataset.len();
        let e0 = self.evar(&[])?;
        let mut best: Option<f64> = None;
        for i in 0..n {
            let rest: Vec<usize> = (0..n).filter(|&j| j != i).collect();
            let den = self.evar(&rest)?;
            if den <= 1e-15 {
                continue;
            }
            let r = (e0 - self.evar(&[i])?) / den;
            best = Some(best.map_or(r, |b: f64| b.min(r)));
        }
        let ratio = best.ok_or(Error::CurvatureUndefined)?;
        let kappa = 1.0 - ratio;
        Ok(Curvature {
            kappa,
            fully_curved: (kappa - 1.0).abs() <= 1e-9,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Curvature {
    pub kappa: f64,
    /// `κ = 1`: only the weaker `O(√n log n)` guarantee applies.
    pub fully_curved: bool,
}

impl Curvature {
    /// Bound on `value / OPT` for the iterated modular bound, if finite.
    pub fn ratio_bound(&self) -> Option<f64> {
        (self.kappa < 1.0 - 1e-12).then(|| 1.0 / (1.0 - self.kappa))
    }
}

pub fn marginal_gain(query: &QueryFunction, dataset: &Dataset, subset: &[usize], candidate: usize) -> Result<f64> {
    EvarEngine::new(query.clone(), dataset.clone())?.marginal_gain(subset, candidate)
}

pub fn curvature(query: &QueryFunction, dataset: &Dataset) -> Result<Curvature> {
    EvarEngine::new(query.clone(), dataset.clone())?.curvature()
}

/// Sampled `E_{X_T}[Var_{X_i}(E[f | X_T, X_i])]`, which equals the marginal
/// gain of cleaning `i` after `T`. Each outer draw visits every support value
/// of `i` with its exact weight and reuses one set of inner draws across them.
pub fn gain_monte_carlo(
    query: &QueryFunction,
    dataset: &Dataset,
    subset: &[usize],
    candidate: usize,
    mc: MonteCarlo,
) -> Result<f64> {
    if !dataset.is_independent() {
        return Err(Error::Dependent);
    }
    dataset.check_index(candidate)?;
    let t = sorted(subset);
    if t.binary_search(&candidate).is_ok() {
        return Ok(0.0);
    }
    let cand = Space::new(dataset, &[candidate], u128::MAX)?;
    let cand_atoms = &cand.atoms[0];
    let rest: Vec<usize> = referenced_list(query, dataset.len())
        .into_iter()
        .filter(|i| *i != candidate && t.binary_search(i).is_err())
        .collect();
    const INNER: usize = 32;
    let outer = (mc.samples / (INNER * cand_atoms.len())).max(1);
    let mut rng = ChaCha8Rng::seed_from_u64(mc.seed);
    rng.set_stream(candidate as u64);
    let mut values = dataset.base_values();
    let mut inner_draws = vec![vec![0.0; rest.len()]; INNER];
    let mut total = 0.0;
    for _ in 0..outer {
        for &i in &t {
            values[i] = dataset.objects[i].dist.sample(&mut rng);
        }
        for draw in inner_draws.iter_mut() {
            for (slot, &i) in draw.iter_mut().zip(&rest) {
                *slot = dataset.objects[i].dist.sample(&mut rng);
            }
        }
        let (mut s1, mut s2) = (0.0, 0.0);
        for &(v, p) in cand_atoms {
            values[candidate] = v;
            let mut m = 0.0;
            for draw in &inner_draws {
                for (x, &i) in draw.iter().zip(&rest) {
                    values[i] = *x;
                }
                m += query.evaluate(&values);
            }
            m /= INNER as f64;
            s1 += p * m;
            s2 += p * m * m;
        }
        total += (s2 - s1 * s1).max(0.0);
    }
    Ok(total / outer as f64)
}
