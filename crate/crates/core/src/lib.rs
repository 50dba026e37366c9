//! Budgeted cleaning plans for uncertain data behind numeric claims.
//!
//! Each object has a current value, a cleaning cost and a distribution over
//! its true value. A query function (a linear form, threshold indicators, or
//! a quality measure over a claim and its perturbations) is uncertain
//! because the objects are. Under a cost budget the planners pick which
//! objects to clean so as to either
//!
//! - minimize the expected remaining variance of the query (`MinVar`), or
//! - maximize the chance that cleaning reveals a drop of at least `tau`
//!   below the value at the current data (`MaxPr`).
//!
//! [`evar::EvarEngine`] computes the expected variance exactly (closed form
//! for linear queries, per-term decomposition for indicator sums and
//! measures, enumeration otherwise). [`maxpr::MaxPrEvaluator`] does the same
//! for the deviation probability. [`solvers`] holds the greedy template,
//! knapsack reductions for modular objectives, the curvature-bounded
//! submodular solver and a brute-force oracle. [`experiments`] wires these
//! into budget sweeps, hidden-truth simulations and objective comparisons,
//! and [`datagen`] produces seeded synthetic datasets.
//!
//! Examples, runnable with `cargo run --example NAME`:
//!
//! - `golden_examples`: small instances with hand-checkable answers
//! - `minvar_greedy`: greedy MinVar against the naive order and the optimum
//! - `maxpr_closed_form`: normal closed form against Monte Carlo
//! - `knapsack`: DP, FPTAS and greedy on modular objectives
//! - `submodular_best`: the curvature-bounded solver on overlapping claims
//! - `dependency`: correlated errors and the covariance-aware greedy
//! - `sweep`, `simulate`, `compare`: the experiment drivers
//! - `gen_data`: regenerates the bundled datasets
//!
//! ```
//! use cleanplan::evar::EvarEngine;
//! use cleanplan::model::{Dataset, DiscreteDist, UncertainObject};
//! use cleanplan::quality::{IndicatorTerm, QueryFunction};
//! use cleanplan::solvers::greedy_minvar;
//!
//! let d = Dataset::new(vec![
//!     UncertainObject::new("a", 1.0, 1.0, DiscreteDist::uniform(&[0.0, 0.5, 1.0, 1.5, 2.0]).unwrap()),
//!     UncertainObject::new("b", 1.0, 1.0, DiscreteDist::uniform(&[1.0 / 3.0, 1.0, 5.0 / 3.0]).unwrap()),
//! ])
//! .unwrap();
//! let f = QueryFunction::Indicators(vec![IndicatorTerm::sum_below(&[0, 1], 11.0 / 12.0)]);
//! let engine = EvarEngine::new(f, d).unwrap();
//! let plan = greedy_minvar(&engine, 1.0).unwrap();
//! assert_eq!(plan.chosen, vec![1]);
//! assert!((plan.objective_value - 2.0 / 25.0).abs() < 1e-12);
//! ```

// `!(x > 0.0)` is how NaN inputs get rejected alongside out-of-range ones.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod claims;
pub mod datagen;
pub mod error;
pub mod evar;
pub mod experiments;
pub mod maxpr;
pub mod model;
pub mod quality;
pub mod solvers;

pub use error::{Error, Result};
