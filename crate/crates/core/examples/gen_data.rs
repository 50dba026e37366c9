//! Generates the synthetic families and (re)writes the bundled datasets.
//!
//! ```text
//! cargo run --example gen_data -- crates/core/data
//! ```

use std::path::PathBuf;

use cleanplan::datagen::{adoptions_like, cdc_like, generate, Family, GenSpec, ADOPTIONS_SERIES};
use cleanplan::model::{save_dataset, write_covariance, Dataset};

const UR40_SEED: u64 = 7;
const ADOPTIONS_SEED: u64 = 11;
const CDC_SEED: u64 = 17;

fn summary(name: &str, d: &Dataset) {
    let sizes: Vec<usize> = d
        .objects
        .iter()
        .map(|o| o.dist.as_discrete().map_or(0, |x| x.len()))
        .collect();
    println!(
        "{name:>10}: n={} total_cost={} support sizes {:?}",
        d.len(),
        d.total_cost(),
        &sizes[..sizes.len().min(10)]
    );
}

fn main() -> cleanplan::Result<()> {
    let dir = PathBuf::from(std::env::args().nth(1).unwrap_or_else(|| "target/gen_data".into()));
    std::fs::create_dir_all(&dir)?;

    for (name, family) in [("ur", Family::Ur), ("ln", Family::Ln), ("sm", Family::Sm)] {
        summary(name, &generate(&GenSpec::new(family, 40, 1))?);
    }

    let ur40 = generate(&GenSpec::new(Family::Ur, 40, UR40_SEED))?;
    save_dataset(&ur40, &dir.join("ur40.csv"))?;

    let adoptions = adoptions_like(&ADOPTIONS_SERIES, 50.0, 100.0, ADOPTIONS_SEED)?;
    save_dataset(&adoptions, &dir.join("adoptions.csv"))?;

    let cdc = cdc_like(10.0, CDC_SEED)?;
    save_dataset(&cdc, &dir.join("cdc.csv"))?;
    let dep = cleanplan::datagen::with_dependency(&cdc, 0.6)?;
    let cov = dep.covariance.as_ref().expect("covariance was just set");
    write_covariance(cov, std::fs::File::create(dir.join("cdc_gamma06_cov.csv"))?)?;

    println!("wrote bundled datasets to {}", dir.display());
    Ok(())
}
