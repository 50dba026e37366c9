use std::fs::File;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use cleanplan::datagen::{generate, CostModel, Family, GenSpec};
use cleanplan::experiments::{
    compare_objectives, simulate, sweep, write_compare, write_simulation, write_sweep, Algorithm, Budgets,
    MaxPrAlgorithm, Objective, SimulationConfig, SolveOptions, SweepConfig, DEFAULT_GRID_POINTS, DEFAULT_REPETITIONS,
};
use cleanplan::model::write_dataset;
use cleanplan::quality::MeasureKind;
use cleanplan::{Error, Result};

#[derive(Parser)]
#[command(
    name = "cleanplan",
    version,
    about = "Plan which uncertain values to clean before checking a claim"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Choose objects to clean within a budget.
    Plan(PlanArgs),
    /// Expected remaining variance after cleaning the given objects.
    Evar(SubsetArgs),
    /// Probability that cleaning the given objects reveals a deviation of at least tau.
    Maxpr(SubsetArgs),
    /// Run algorithms over a grid of budgets.
    Sweep(SweepArgs),
    /// Clean against hidden true values and report the posterior of the measure.
    Simulate(SimulateArgs),
    /// Score MinVar and MaxPr plans under both objectives.
    Compare(CompareArgs),
    /// Write a synthetic dataset.
    GenData(GenArgs),
}

#[derive(Args)]
struct Inputs {
    #[arg(long)]
    dataset: PathBuf,
    /// Sidecar covariance CSV (`i,j,cov`).
    #[arg(long)]
    covariance: Option<PathBuf>,
    #[arg(long)]
    claims: PathBuf,
    #[arg(long, default_value = "bias")]
    measure: MeasureKind,
    /// Overrides the claims file's tau.
    #[arg(long)]
    tau: Option<f64>,
    #[arg(long)]
    epsilon: Option<f64>,
    #[arg(long)]
    cost_scale: Option<f64>,
    #[arg(long)]
    mc_samples: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

impl Inputs {
    fn options(&self) -> SolveOptions {
        SolveOptions {
            epsilon: self.epsilon,
            cost_scale: self.cost_scale,
            mc_samples: self.mc_samples,
            seed: self.seed,
        }
    }

    fn config(&self, objective: Objective, algorithms: Vec<Algorithm>, budgets: Budgets) -> SweepConfig {
        SweepConfig {
            dataset: self.dataset.clone(),
            covariance: self.covariance.clone(),
            claims: self.claims.clone(),
            measure: self.measure,
            objective,
            algorithms,
            budgets,
            options: self.options(),
            tau: self.tau,
            out: None,
        }
    }

    fn output(&self) -> Result<Box<dyn Write>> {
        Ok(match &self.out {
            Some(p) => Box::new(File::create(p)?),
            None => Box::new(io::stdout().lock()),
        })
    }
}

#[derive(Args)]
struct BudgetArgs {
    /// Comma-separated budgets.
    #[arg(long, value_delimiter = ',', conflicts_with = "budget_grid")]
    budget: Option<Vec<f64>>,
    /// Number of evenly spaced budgets from 0 to the total cost.
    #[arg(long)]
    budget_grid: Option<usize>,
}

impl BudgetArgs {
    fn budgets(&self) -> Budgets {
        match (&self.budget, self.budget_grid) {
            (Some(b), _) => Budgets::List(b.clone()),
            (None, Some(k)) => Budgets::Grid(k),
            (None, None) => Budgets::Grid(DEFAULT_GRID_POINTS),
        }
    }
}

#[derive(Args)]
struct PlanArgs {
    #[command(flatten)]
    inputs: Inputs,
    #[arg(long, default_value = "minvar")]
    objective: Objective,
    #[arg(long, default_value = "greedy-minvar")]
    algorithm: Algorithm,
    #[arg(long)]
    budget: f64,
}

#[derive(Args)]
struct SubsetArgs {
    #[command(flatten)]
    inputs: Inputs,
    /// Comma-separated ids of the objects to clean.
    #[arg(long, value_delimiter = ',')]
    clean: Vec<String>,
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    inputs: Inputs,
    #[command(flatten)]
    budgets: BudgetArgs,
    #[arg(long, default_value = "minvar")]
    objective: Objective,
    /// Comma-separated algorithm names.
    #[arg(long, value_delimiter = ',', default_value = "greedy-minvar,greedy-naive")]
    algorithm: Vec<Algorithm>,
}

#[derive(Args)]
struct SimulateArgs {
    #[command(flatten)]
    sweep: SweepArgs,
    #[arg(long, default_value_t = 1)]
    truth_seed: u64,
    #[arg(long, default_value_t = DEFAULT_REPETITIONS)]
    repetitions: usize,
}

#[derive(Args)]
struct CompareArgs {
    #[command(flatten)]
    inputs: Inputs,
    #[command(flatten)]
    budgets: BudgetArgs,
    /// Resampled current values to average over; 0 keeps the file's values.
    #[arg(long, default_value_t = DEFAULT_REPETITIONS)]
    repetitions: usize,
    /// Solve MaxPr exactly instead of greedily.
    #[arg(long)]
    exact_maxpr: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum FamilyArg {
    Ur,
    Ln,
    Sm,
    Normal,
}

#[derive(Clone, Copy, ValueEnum)]
enum CostArg {
    Uniform,
    Recency,
    TwoPoint,
}

#[derive(Args)]
struct GenArgs {
    #[arg(long, value_enum)]
    family: FamilyArg,
    #[arg(long)]
    n: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value = "uniform")]
    costs: CostArg,
    /// Cost parameters: `lo,hi` (uniform), `base,step,jitter` (recency) or `a,b` (two-point).
    #[arg(long, value_delimiter = ',')]
    cost_params: Vec<f64>,
    #[arg(long, default_value_t = 1.0)]
    min: f64,
    #[arg(long, default_value_t = 100.0)]
    max: f64,
    /// Stddev range `lo,hi` for the normal family.
    #[arg(long, value_delimiter = ',', default_values_t = [1.0, 10.0])]
    std: Vec<f64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn param(p: &[f64], k: usize, default: f64) -> f64 {
    p.get(k).copied().unwrap_or(default)
}

fn resolve_ids(dataset: &cleanplan::model::Dataset, ids: &[String]) -> Result<Vec<usize>> {
    ids.iter()
        .filter(|s| !s.is_empty())
        .map(|s| dataset.index_of(s))
        .collect()
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Plan(a) => {
            let config = a
                .inputs
                .config(a.objective, vec![a.algorithm], Budgets::List(vec![a.budget]));
            let instance = config.instance()?;
            let mut plan = instance.solve(a.algorithm, a.objective, a.budget)?;
            plan.objective_value = instance.objective(a.objective, &plan.chosen)?;
            for n in &plan.notes {
                log::info!("{n}");
            }
            plan.write_csv(&instance.dataset, a.inputs.output()?)
        }
        Command::Evar(a) => {
            let instance = a
                .inputs
                .config(Objective::MinVar, vec![], Budgets::Grid(1))
                .instance()?;
            let t = resolve_ids(&instance.dataset, &a.clean)?;
            let v = instance.objective(Objective::MinVar, &t)?;
            writeln!(a.inputs.output()?, "evar\n{v}")?;
            Ok(())
        }
        Command::Maxpr(a) => {
            let instance = a.inputs.config(Objective::MaxPr, vec![], Budgets::Grid(1)).instance()?;
            let t = resolve_ids(&instance.dataset, &a.clean)?;
            let v = instance.objective(Objective::MaxPr, &t)?;
            writeln!(a.inputs.output()?, "probability\n{v}")?;
            Ok(())
        }
        Command::Sweep(a) => {
            let config = a.inputs.config(a.objective, a.algorithm.clone(), a.budgets.budgets());
            let instance = config.instance()?;
            let budgets = config.budgets.resolve(instance.total_cost())?;
            let rows = sweep(&instance, a.objective, &a.algorithm, &budgets);
            write_sweep(&rows, a.inputs.output()?)
        }
        Command::Simulate(a) => {
            let s = &a.sweep;
            let config = SimulationConfig {
                sweep: s.inputs.config(s.objective, s.algorithm.clone(), s.budgets.budgets()),
                truth_seed: a.truth_seed,
                repetitions: a.repetitions,
            };
            let rows = simulate(&config)?;
            write_simulation(&rows, s.inputs.output()?)
        }
        Command::Compare(a) => {
            let config = a.inputs.config(Objective::MaxPr, vec![], a.budgets.budgets());
            let instance = config.instance()?;
            let budgets = config.budgets.resolve(instance.total_cost())?;
            let alg = if a.exact_maxpr {
                MaxPrAlgorithm::BruteForce
            } else {
                MaxPrAlgorithm::Greedy
            };
            let rows = compare_objectives(
                &instance.query,
                &instance.dataset,
                instance.tau,
                &budgets,
                a.repetitions,
                a.inputs.seed,
                alg,
            )?;
            write_compare(&rows, a.inputs.output()?)
        }
        Command::GenData(a) => {
            let family = match a.family {
                FamilyArg::Ur => Family::Ur,
                FamilyArg::Ln => Family::Ln,
                FamilyArg::Sm => Family::Sm,
                FamilyArg::Normal => Family::Normal {
                    std_lo: param(&a.std, 0, 1.0),
                    std_hi: param(&a.std, 1, 10.0),
                },
            };
            let p = &a.cost_params;
            let cost_model = match a.costs {
                CostArg::Uniform => CostModel::Uniform {
                    lo: param(p, 0, 1.0),
                    hi: param(p, 1, 10.0),
                    integer: true,
                },
                CostArg::Recency => CostModel::Recency {
                    base: param(p, 0, 200.0),
                    step: param(p, 1, 5.0),
                    jitter: param(p, 2, 5.0),
                },
                CostArg::TwoPoint => CostModel::TwoPoint {
                    a: param(p, 0, 1.0),
                    b: param(p, 1, 10.0),
                },
            };
            let spec = GenSpec::new(family, a.n, a.seed)
                .with_costs(cost_model)
                .with_range(a.min, a.max);
            let d = generate(&spec)?;
            match &a.out {
                Some(path) => write_dataset(&d, File::create(path)?),
                None => write_dataset(&d, io::stdout().lock()),
            }
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::Infeasible(_) => ExitCode::from(3),
                e if e.is_validation() => ExitCode::from(2),
                _ => ExitCode::FAILURE,
            }
        }
    }
}
