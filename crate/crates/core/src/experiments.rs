//! Experiment harness: loading inputs, running algorithms by name, budget
//! sweeps, cleaning simulations and objective comparisons, all emitting CSV.

use std::fmt;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::claims::{read_claims, ClaimsConfig};
use crate::error::{Error, Result};
use crate::evar::{EvarEngine, MonteCarlo};
use crate::maxpr::{maxpr_normal_linear, MaxPrEvaluator};
use crate::model::{load_dataset, Dataset, Distribution, Realization, DEFAULT_CAP};
use crate::quality::{query_distribution, MeasureKind, QualityMeasure, QueryFunction};
use crate::solvers::{
    bruteforce_opt, greedy, greedy_dep_for, greedy_maxpr, greedy_minvar, greedy_naive, greedy_naive_cost_blind,
    modular_maxpr_for, modular_minvar, modular_weights, naive_benefit, random_plan, submodular_best, CleaningPlan,
    GreedyOptions, KnapsackMode, Sense, MAXPR_FPTAS_EPSILON,
};

pub const DEFAULT_GRID_POINTS: usize = 101;
pub const DEFAULT_REPETITIONS: usize = 100;
pub const SWEEP_HEADER: [&str; 6] = [
    "algorithm",
    "budget",
    "budget_fraction",
    "objective_value",
    "plan_size",
    "seconds",
];
pub const SIMULATION_HEADER: [&str; 4] = ["algorithm", "budget", "posterior_mean", "posterior_std"];
pub const COMPARE_HEADER: [&str; 4] = ["budget", "plan", "residual_variance", "probability"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Objective {
    MinVar,
    MaxPr,
}

impl FromStr for Objective {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "minvar" => Ok(Objective::MinVar),
            "maxpr" => Ok(Objective::MaxPr),
            _ => Err(Error::InvalidArgument(format!("unknown objective `{s}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Algorithm {
    GreedyMinVar,
    GreedyNaive,
    GreedyNaiveCostBlind,
    GreedyMaxPr,
    GreedyDep,
    /// Exact knapsack on the modular weights of a linear query.
    Modular,
    ModularFptas,
    /// Iterated modular bounds on the complement objective.
    Best,
    Opt,
    Random,
}

impl Algorithm {
    pub const ALL: [Algorithm; 10] = [
        Algorithm::GreedyMinVar,
        Algorithm::GreedyNaive,
        Algorithm::GreedyNaiveCostBlind,
        Algorithm::GreedyMaxPr,
        Algorithm::GreedyDep,
        Algorithm::Modular,
        Algorithm::ModularFptas,
        Algorithm::Best,
        Algorithm::Opt,
        Algorithm::Random,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Algorithm::GreedyMinVar => "greedy-minvar",
            Algorithm::GreedyNaive => "greedy-naive",
            Algorithm::GreedyNaiveCostBlind => "greedy-naive-costblind",
            Algorithm::GreedyMaxPr => "greedy-maxpr",
            Algorithm::GreedyDep => "greedy-dep",
            Algorithm::Modular => "modular",
            Algorithm::ModularFptas => "modular-fptas",
            Algorithm::Best => "best",
            Algorithm::Opt => "opt",
            Algorithm::Random => "random",
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Algorithm::ALL
            .into_iter()
            .find(|a| a.name() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown algorithm `{s}`")))
    }
}

/// Knobs shared by every solve.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct SolveOptions {
    /// FPTAS accuracy; defaults to 0.75 for MaxPr and 0.1 for MinVar.
    pub epsilon: Option<f64>,
    /// Lets the exact DP round fractional costs up to this resolution.
    pub cost_scale: Option<f64>,
    /// Enables sampled gains and probabilities where exact ones are out of reach.
    pub mc_samples: Option<usize>,
    pub seed: u64,
}

/// A query over a dataset, ready to plan against.
pub struct Instance {
    pub dataset: Dataset,
    pub query: QueryFunction,
    pub tau: f64,
    pub options: SolveOptions,
    /// Evaluates `EVar` under the dataset's true dependency model.
    oracle: EvarEngine,
    /// Ignores any covariance, as the covariance-blind algorithms do.
    blind: EvarEngine,
}

impl Instance {
    pub fn new(query: QueryFunction, dataset: Dataset, tau: f64, options: SolveOptions) -> Result<Self> {
        if !(tau >= 0.0) {
            return Err(Error::InvalidArgument(format!("tau {tau} must be nonnegative")));
        }
        let mc = options.mc_samples.map(|samples| MonteCarlo {
            samples,
            seed: options.seed,
        });
        let with_mc = |e: EvarEngine| match mc {
            Some(m) => e.with_monte_carlo(m),
            None => e,
        };
        let blind = with_mc(EvarEngine::new(query.clone(), dataset.without_covariance())?);
        let oracle = with_mc(EvarEngine::new(query.clone(), dataset.clone())?);
        Ok(Instance {
            dataset,
            query,
            tau,
            options,
            oracle,
            blind,
        })
    }

    pub fn total_cost(&self) -> f64 {
        self.dataset.total_cost()
    }

    fn evaluator(&self) -> Result<MaxPrEvaluator> {
        let e = MaxPrEvaluator::new(self.query.clone(), self.dataset.clone(), self.tau)?;
        Ok(match self.options.mc_samples {
            Some(s) => e.with_monte_carlo(s, self.options.seed),
            None => e,
        })
    }

    fn knapsack_mode(&self, fptas: bool, default_eps: f64) -> KnapsackMode {
        match (fptas, self.options.cost_scale) {
            (true, _) => KnapsackMode::Fptas(self.options.epsilon.unwrap_or(default_eps)),
            (false, Some(s)) => KnapsackMode::Scaled(s),
            (false, None) => KnapsackMode::Exact,
        }
    }

    fn linear(&self) -> Result<crate::quality::LinearForm> {
        self.query
            .linear_form(self.dataset.len())
            .ok_or_else(|| Error::InvalidArgument("algorithm needs a linear query".into()))
    }

    /// The objective of a set of cleaned objects, computed from scratch.
    pub fn objective(&self, objective: Objective, chosen: &[usize]) -> Result<f64> {
        match objective {
            Objective::MinVar => EvarEngine::new(self.query.clone(), self.dataset.clone())?.evar(chosen),
            Objective::MaxPr => Ok(self.evaluator()?.probability(chosen)?.0),
        }
    }

    /// Runs `algorithm` for `objective` at `budget`.
    pub fn solve(&self, algorithm: Algorithm, objective: Objective, budget: f64) -> Result<CleaningPlan> {
        if !(budget >= 0.0) {
            return Err(Error::InvalidArgument(format!("budget {budget} must be nonnegative")));
        }
        let costs = self.dataset.costs();
        let mut plan = match (algorithm, objective) {
            (Algorithm::GreedyMinVar, _) => greedy_minvar(&self.blind, budget)?,
            (Algorithm::GreedyNaive, Objective::MinVar) => greedy_naive(&self.blind, budget)?,
            (Algorithm::GreedyNaiveCostBlind, Objective::MinVar) => greedy_naive_cost_blind(&self.blind, budget)?,
            (Algorithm::GreedyNaive | Algorithm::GreedyNaiveCostBlind, Objective::MaxPr) => {
                let mut b = naive_benefit(&self.query, &self.dataset);
                let opts = GreedyOptions {
                    cost_blind: algorithm == Algorithm::GreedyNaiveCostBlind,
                    ..Default::default()
                };
                let mut p = greedy(&mut b, &costs, budget, opts)?;
                p.algorithm = algorithm.name().into();
                p
            }
            (Algorithm::GreedyMaxPr, _) => greedy_maxpr(&self.evaluator()?, budget)?,
            (Algorithm::GreedyDep, _) => greedy_dep_for(&self.linear()?, &self.dataset, budget)?,
            (Algorithm::Modular | Algorithm::ModularFptas, Objective::MinVar) => {
                let w = modular_weights(&self.linear()?, &self.dataset);
                modular_minvar(
                    &w,
                    &costs,
                    budget,
                    self.knapsack_mode(algorithm == Algorithm::ModularFptas, 0.1),
                )?
            }
            (Algorithm::Modular | Algorithm::ModularFptas, Objective::MaxPr) => {
                let mode = self.knapsack_mode(algorithm == Algorithm::ModularFptas, MAXPR_FPTAS_EPSILON);
                modular_maxpr_for(&self.linear()?, &self.dataset, budget, self.tau, mode)?
            }
            (Algorithm::Best, _) => submodular_best(&self.blind, budget)?,
            (Algorithm::Opt, Objective::MinVar) => {
                bruteforce_opt(&costs, budget, Sense::Minimize, |t| self.oracle.evar(t))?
            }
            (Algorithm::Opt, Objective::MaxPr) => {
                let e = self.evaluator()?;
                bruteforce_opt(&costs, budget, Sense::Maximize, |t| Ok(e.probability(t)?.0))?
            }
            (Algorithm::Random, _) => random_plan(&costs, budget, self.options.seed),
        };
        plan.algorithm = algorithm.name().into();
        Ok(plan)
    }
}

/// Dataset, claims and query read from disk.
pub struct Ingested {
    pub dataset: Dataset,
    pub claims: ClaimsConfig,
    pub measure: QualityMeasure,
}

impl Ingested {
    pub fn query(&self) -> QueryFunction {
        QueryFunction::Measure(self.measure.clone())
    }
}

pub fn ingest(dataset: &Path, covariance: Option<&Path>, claims: &Path, measure: MeasureKind) -> Result<Ingested> {
    let dataset = load_dataset(dataset, covariance)?;
    let claims = read_claims(claims, &dataset)?;
    let measure = QualityMeasure::new(measure, claims.system.clone(), &dataset)?;
    Ok(Ingested {
        dataset,
        claims,
        measure,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Budgets {
    List(Vec<f64>),
    /// `points` evenly spaced fractions of the total cost, from 0 to 1.
    Grid(usize),
}

impl Default for Budgets {
    fn default() -> Self {
        Budgets::Grid(DEFAULT_GRID_POINTS)
    }
}

impl Budgets {
    pub fn resolve(&self, total_cost: f64) -> Result<Vec<f64>> {
        match self {
            Budgets::Grid(0) => Err(Error::InvalidArgument("budget grid needs at least one point".into())),
            Budgets::Grid(1) => Ok(vec![0.0]),
            Budgets::Grid(k) => Ok((0..*k).map(|j| total_cost * j as f64 / (*k - 1) as f64).collect()),
            Budgets::List(v) => {
                for &b in v {
                    if !(b >= 0.0 && b <= total_cost * (1.0 + 1e-12)) {
                        return Err(Error::InvalidArgument(format!(
                            "budget {b} must lie in [0, {total_cost}]"
                        )));
                    }
                }
                Ok(v.clone())
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    pub dataset: PathBuf,
    pub covariance: Option<PathBuf>,
    pub claims: PathBuf,
    pub measure: MeasureKind,
    pub objective: Objective,
    pub algorithms: Vec<Algorithm>,
    pub budgets: Budgets,
    pub options: SolveOptions,
    /// Overrides the claims file's `tau`.
    pub tau: Option<f64>,
    pub out: Option<PathBuf>,
}

impl SweepConfig {
    pub fn instance(&self) -> Result<Instance> {
        let ing = ingest(&self.dataset, self.covariance.as_deref(), &self.claims, self.measure)?;
        let tau = self.tau.unwrap_or(ing.claims.tau);
        Instance::new(ing.query(), ing.dataset, tau, self.options)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub algorithm: Algorithm,
    pub budget: f64,
    pub budget_fraction: f64,
    pub objective_value: f64,
    pub plan_size: usize,
    pub seconds: f64,
    pub chosen: Vec<usize>,
    pub error: Option<String>,
}

/// One row per (algorithm, budget), algorithm-major. Cells run in parallel;
/// a failing cell keeps its error and a NaN objective.
pub fn sweep(instance: &Instance, objective: Objective, algorithms: &[Algorithm], budgets: &[f64]) -> Vec<SweepRow> {
    let total = instance.total_cost();
    let cells: Vec<(Algorithm, f64)> = algorithms
        .iter()
        .flat_map(|&a| budgets.iter().map(move |&b| (a, b)))
        .collect();
    cells
        .into_par_iter()
        .map(|(algorithm, budget)| {
            let start = Instant::now();
            let result = instance
                .solve(algorithm, objective, budget)
                .and_then(|p| Ok((instance.objective(objective, &p.chosen)?, p)));
            let seconds = start.elapsed().as_secs_f64();
            let fraction = if total > 0.0 {
                round_fraction(budget / total)
            } else {
                0.0
            };
            match result {
                Ok((value, plan)) => SweepRow {
                    algorithm,
                    budget,
                    budget_fraction: fraction,
                    objective_value: value,
                    plan_size: plan.len(),
                    seconds,
                    chosen: plan.chosen,
                    error: None,
                },
                Err(e) => {
                    log::warn!("{algorithm} at budget {budget}: {e}");
                    SweepRow {
                        algorithm,
                        budget,
                        budget_fraction: fraction,
                        objective_value: f64::NAN,
                        plan_size: 0,
                        seconds,
                        chosen: Vec::new(),
                        error: Some(e.to_string()),
                    }
                }
            }
        })
        .collect()
}

/// Drops the last bits of round-off so grid fractions print as `0.1`, not `0.09999999999999999`.
fn round_fraction(x: f64) -> f64 {
    (x * 1e12).round() / 1e12
}

pub fn run_sweep(config: &SweepConfig) -> Result<Vec<SweepRow>> {
    let instance = config.instance()?;
    let budgets = config.budgets.resolve(instance.total_cost())?;
    let rows = sweep(&instance, config.objective, &config.algorithms, &budgets);
    if let Some(out) = &config.out {
        write_sweep(&rows, std::fs::File::create(out)?)?;
    }
    Ok(rows)
}

pub fn write_sweep<W: Write>(rows: &[SweepRow], writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(SWEEP_HEADER)?;
    for r in rows {
        w.write_record([
            r.algorithm.to_string(),
            r.budget.to_string(),
            r.budget_fraction.to_string(),
            r.objective_value.to_string(),
            r.plan_size.to_string(),
            format!("{:.6}", r.seconds),
        ])?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulationConfig {
    pub sweep: SweepConfig,
    pub truth_seed: u64,
    pub repetitions: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimulationRow {
    pub algorithm: Algorithm,
    pub budget: f64,
    pub posterior_mean: f64,
    pub posterior_std: f64,
    /// Share of repetitions in which the revealed values met the MaxPr event
    /// `f(revealed) < f(u) − τ`.
    pub counter_rate: f64,
    pub error: Option<String>,
}

/// Hidden true values for repetition `rep`: object `i` is drawn on stream
/// `rep·n + i` of the truth seed.
pub fn draw_truths(dataset: &Dataset, truth_seed: u64, rep: usize) -> Vec<f64> {
    let n = dataset.len();
    dataset
        .objects
        .iter()
        .enumerate()
        .map(|(i, o)| {
            let mut rng = ChaCha8Rng::seed_from_u64(truth_seed);
            rng.set_stream((rep * n + i) as u64);
            o.dist.sample(&mut rng)
        })
        .collect()
}

/// Mean and standard deviation of the query once `revealed` is known.
pub fn posterior(query: &QueryFunction, dataset: &Dataset, revealed: &Realization) -> Result<(f64, f64)> {
    if !dataset.is_independent() {
        return Err(Error::Dependent);
    }
    let n = dataset.len();
    if let Some(form) = query.linear_form(n) {
        let mut values = dataset.means();
        let mut free = vec![true; n];
        for &(i, v) in &revealed.assignment {
            values[i] = v;
            free[i] = false;
        }
        let var: f64 = (0..n)
            .filter(|&i| free[i])
            .map(|i| form.weights[i] * form.weights[i] * dataset.objects[i].variance())
            .sum();
        return Ok((form.eval(&values), var.max(0.0).sqrt()));
    }
    let mut d = dataset.clone();
    for &(i, v) in &revealed.assignment {
        d.objects[i].dist = Distribution::Discrete(crate::model::DiscreteDist::point(v));
    }
    let dist = query_distribution(query, &d, DEFAULT_CAP)?;
    Ok((dist.mean(), dist.variance().max(0.0).sqrt()))
}

/// Cleans each plan against hidden truths and reports what is left to know.
/// Posterior moments and the counter rate are averaged over repetitions.
pub fn simulate_instance(
    instance: &Instance,
    objective: Objective,
    algorithms: &[Algorithm],
    budgets: &[f64],
    truth_seed: u64,
    repetitions: usize,
) -> Result<Vec<SimulationRow>> {
    if repetitions == 0 {
        return Err(Error::InvalidArgument("repetitions must be at least 1".into()));
    }
    let truths: Vec<Vec<f64>> = (0..repetitions)
        .map(|r| draw_truths(&instance.dataset, truth_seed, r))
        .collect();
    let u = instance.dataset.current_values();
    let threshold = instance.query.evaluate(&u) - instance.tau;
    let plans = sweep(instance, objective, algorithms, budgets);
    Ok(plans
        .into_par_iter()
        .map(|cell| {
            if let Some(e) = cell.error {
                return SimulationRow {
                    algorithm: cell.algorithm,
                    budget: cell.budget,
                    posterior_mean: f64::NAN,
                    posterior_std: f64::NAN,
                    counter_rate: f64::NAN,
                    error: Some(e),
                };
            }
            let (mut m, mut s, mut hits) = (0.0, 0.0, 0usize);
            for t in &truths {
                let revealed = Realization::of(cell.chosen.iter().map(|&i| (i, t[i])).collect());
                let (pm, ps) = match posterior(&instance.query, &instance.dataset, &revealed) {
                    Ok(x) => x,
                    Err(e) => {
                        return SimulationRow {
                            algorithm: cell.algorithm,
                            budget: cell.budget,
                            posterior_mean: f64::NAN,
                            posterior_std: f64::NAN,
                            counter_rate: f64::NAN,
                            error: Some(e.to_string()),
                        }
                    }
                };
                m += pm;
                s += ps;
                let mut values = u.clone();
                for &i in &cell.chosen {
                    values[i] = t[i];
                }
                if instance.query.evaluate(&values) < threshold {
                    hits += 1;
                }
            }
            let r = repetitions as f64;
            SimulationRow {
                algorithm: cell.algorithm,
                budget: cell.budget,
                posterior_mean: m / r,
                posterior_std: s / r,
                counter_rate: hits as f64 / r,
                error: None,
            }
        })
        .collect())
}

pub fn simulate(config: &SimulationConfig) -> Result<Vec<SimulationRow>> {
    let instance = config.sweep.instance()?;
    let budgets = config.sweep.budgets.resolve(instance.total_cost())?;
    let rows = simulate_instance(
        &instance,
        config.sweep.objective,
        &config.sweep.algorithms,
        &budgets,
        config.truth_seed,
        config.repetitions,
    )?;
    if let Some(out) = &config.sweep.out {
        write_simulation(&rows, std::fs::File::create(out)?)?;
    }
    Ok(rows)
}

/// Smallest budget at which `algorithm` found a counter in at least `level`
/// of the repetitions.
pub fn first_counter_budget(rows: &[SimulationRow], algorithm: Algorithm, level: f64) -> Option<f64> {
    rows.iter()
        .filter(|r| r.algorithm == algorithm && r.counter_rate >= level)
        .map(|r| r.budget)
        .min_by(f64::total_cmp)
}

pub fn write_simulation<W: Write>(rows: &[SimulationRow], writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(SIMULATION_HEADER)?;
    for r in rows {
        w.write_record([
            r.algorithm.to_string(),
            r.budget.to_string(),
            r.posterior_mean.to_string(),
            r.posterior_std.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum MaxPrAlgorithm {
    Greedy,
    BruteForce,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CompareRow {
    pub budget: f64,
    /// `minvar` or `maxpr`.
    pub plan: &'static str,
    pub residual_variance: f64,
    pub probability: f64,
}

/// Copy of a normal dataset whose current values are fresh draws from the
/// objects' distributions; the distributions themselves are unchanged.
pub fn resample_current(dataset: &Dataset, seed: u64) -> Dataset {
    let mut d = dataset.clone();
    for (i, o) in d.objects.iter_mut().enumerate() {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(i as u64);
        o.current_value = o.dist.sample(&mut rng);
    }
    d
}

/// Each objective's plan scored under both metrics: residual variance, and
/// the deviation probability averaged over `repetitions` resampled current
/// values. With `repetitions = 0` the current values are kept as they are.
pub fn compare_objectives(
    query: &QueryFunction,
    dataset: &Dataset,
    tau: f64,
    budgets: &[f64],
    repetitions: usize,
    seed: u64,
    maxpr: MaxPrAlgorithm,
) -> Result<Vec<CompareRow>> {
    let form = query
        .linear_form(dataset.len())
        .ok_or_else(|| Error::InvalidArgument("comparison needs a linear query".into()))?;
    if let Some(o) = dataset.objects.iter().find(|o| o.dist.as_normal().is_none()) {
        return Err(Error::NonNormal { id: o.id.clone() });
    }
    let datasets: Vec<Dataset> = if repetitions == 0 {
        vec![dataset.clone()]
    } else {
        (0..repetitions)
            .map(|r| {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                rng.set_stream(u64::MAX - r as u64);
                resample_current(dataset, rand::Rng::random(&mut rng))
            })
            .collect()
    };
    let engine = EvarEngine::new(query.clone(), dataset.clone())?;
    let costs = dataset.costs();
    let weights = modular_weights(&form, dataset);
    let minvar_plan = |b: f64| -> Result<Vec<usize>> {
        if dataset.is_independent() {
            let mode = if crate::solvers::integer_costs(&costs).is_ok() {
                KnapsackMode::Exact
            } else {
                KnapsackMode::Fptas(0.01)
            };
            Ok(modular_minvar(&weights, &costs, b, mode)?.chosen)
        } else {
            Ok(bruteforce_opt(&costs, b, Sense::Minimize, |t| engine.evar(t))?.chosen)
        }
    };
    let probability = |d: &Dataset, t: &[usize]| {
        let u = d.current_values();
        maxpr_normal_linear(&form, d, &u, t, tau)
    };
    budgets
        .par_iter()
        .map(|&b| {
            let mv = minvar_plan(b)?;
            let mut minvar_p = 0.0;
            let mut maxpr_p = 0.0;
            let mut maxpr_var = 0.0;
            for d in &datasets {
                minvar_p += probability(d, &mv)?;
                let eval = MaxPrEvaluator::new(query.clone(), d.clone(), tau)?;
                let mp = match maxpr {
                    MaxPrAlgorithm::Greedy => greedy_maxpr(&eval, b)?.chosen,
                    MaxPrAlgorithm::BruteForce => {
                        bruteforce_opt(&costs, b, Sense::Maximize, |t| Ok(eval.probability(t)?.0))?.chosen
                    }
                };
                maxpr_p += probability(d, &mp)?;
                maxpr_var += engine.evar(&mp)?;
            }
            let r = datasets.len() as f64;
            Ok(vec![
                CompareRow {
                    budget: b,
                    plan: "minvar",
                    residual_variance: engine.evar(&mv)?,
                    probability: minvar_p / r,
                },
                CompareRow {
                    budget: b,
                    plan: "maxpr",
                    residual_variance: maxpr_var / r,
                    probability: maxpr_p / r,
                },
            ])
        })
        .collect::<Result<Vec<_>>>()
        .map(|v| v.into_iter().flatten().collect())
}

pub fn write_compare<W: Write>(rows: &[CompareRow], writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(COMPARE_HEADER)?;
    for r in rows {
        w.write_record([
            r.budget.to_string(),
            r.plan.to_string(),
            r.residual_variance.to_string(),
            r.probability.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}
