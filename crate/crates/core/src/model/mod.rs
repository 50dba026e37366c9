//! Distributions, datasets of uncertain objects, enumeration and conditioning.

mod csv_io;
mod dataset;
mod dist;
mod enumerate;

pub use csv_io::{
    format_dist, load_dataset, parse_dist, read_covariance, read_dataset, save_dataset, write_covariance,
    write_dataset, COVARIANCE_HEADER, DATASET_HEADER,
};
pub use dataset::{condition, validate_dataset, CovMatrix, Dataset, Realization, UncertainObject, Violation};
pub(crate) use dist::std_normal;
pub use dist::{
    discretize_normal, pairwise_spread, phi, variance, weighted_variance, Atom, DiscreteDist, Distribution, NormalSpec,
    MASS_TOL,
};
pub use enumerate::{enumerate_realizations, Realizations, Space, DEFAULT_CAP};

/// Replaces every normal object by its `points`-point discretization.
pub fn discretize_dataset(dataset: &Dataset, points: usize) -> Dataset {
    let mut out = dataset.clone();
    for o in &mut out.objects {
        if let Distribution::Normal(n) = o.dist {
            o.dist = Distribution::Discrete(discretize_normal(n, points));
        }
    }
    out
}
