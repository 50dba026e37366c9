//! Dataset CSV (`id,current_value,cost,dist`) and covariance sidecar (`i,j,cov`).

use std::io::{Read, Write};
use std::path::Path;

use super::dataset::{validate_dataset, CovMatrix, Dataset, UncertainObject};
use super::dist::{DiscreteDist, Distribution, NormalSpec};
use crate::error::{Error, Result};

pub const DATASET_HEADER: [&str; 4] = ["id", "current_value", "cost", "dist"];
pub const COVARIANCE_HEADER: [&str; 3] = ["i", "j", "cov"];

/// Parses `normal(mu,sigma)` or `discrete(v1:p1|v2:p2|...)`.
pub fn parse_dist(token: &str) -> std::result::Result<Distribution, String> {
    let t = token.trim();
    let inner = |prefix: &str| -> Option<&str> {
        t.strip_prefix(prefix)
            .and_then(|r| r.trim_start().strip_prefix('('))
            .and_then(|r| r.trim_end().strip_suffix(')'))
    };
    if let Some(body) = inner("normal") {
        let parts: Vec<&str> = body.split(',').map(str::trim).collect();
        if parts.len() != 2 {
            return Err(format!("normal() takes two arguments, got `{t}`"));
        }
        let mu = parse_num(parts[0])?;
        let sigma = parse_num(parts[1])?;
        if sigma < 0.0 {
            return Err(format!("negative standard deviation in `{t}`"));
        }
        return Ok(Distribution::Normal(NormalSpec {
            mean: mu,
            stddev: sigma,
        }));
    }
    if let Some(body) = inner("discrete") {
        let mut atoms = Vec::new();
        for item in body.split('|') {
            let (v, p) = item
                .split_once(':')
                .ok_or_else(|| format!("atom `{item}` is not value:prob"))?;
            atoms.push((parse_num(v)?, parse_num(p)?));
        }
        return Ok(Distribution::Discrete(DiscreteDist::new_unchecked(atoms)));
    }
    Err(format!("unrecognized distribution `{t}`"))
}

fn parse_num(s: &str) -> std::result::Result<f64, String> {
    s.trim()
        .parse::<f64>()
        .map_err(|_| format!("`{}` is not a number", s.trim()))
}

pub fn format_dist(dist: &Distribution) -> String {
    match dist {
        Distribution::Normal(n) => format!("normal({},{})", n.mean, n.stddev),
        Distribution::Discrete(d) => {
            let atoms: Vec<String> = d.atoms().iter().map(|a| format!("{}:{}", a.value, a.prob)).collect();
            format!("discrete({})", atoms.join("|"))
        }
    }
}

/// Reads a dataset; every parse problem carries its line number and the
/// result is validated as a whole.
pub fn read_dataset<R: Read>(reader: R) -> Result<Dataset> {
    let mut rdr = csv::ReaderBuilder::new()
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let header = rdr.headers()?.clone();
    if header.iter().collect::<Vec<_>>() != DATASET_HEADER {
        return Err(Error::Parse {
            row: 1,
            message: format!("expected header `{}`", DATASET_HEADER.join(",")),
        });
    }
    let mut objects = Vec::new();
    for rec in rdr.records() {
        let rec = rec?;
        let row = rec.position().map_or(0, |p| p.line() as usize);
        let bad = |message: String| Error::Parse { row, message };
        if rec.len() < 4 {
            return Err(bad(format!("expected 4 fields, found {}", rec.len())));
        }
        let current_value = parse_num(&rec[1]).map_err(bad)?;
        let cost = parse_num(&rec[2]).map_err(bad)?;
        // An unquoted normal(mu,sigma) spills into a fifth field.
        let dist_token = rec.iter().skip(3).collect::<Vec<_>>().join(",");
        let dist = parse_dist(&dist_token).map_err(bad)?;
        objects.push(UncertainObject {
            id: rec[0].to_string(),
            current_value,
            cost,
            dist,
        });
    }
    let d = Dataset {
        objects,
        covariance: None,
    };
    validate_dataset(&d).map_err(Error::Invalid)?;
    Ok(d)
}

pub fn write_dataset<W: Write>(dataset: &Dataset, writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(DATASET_HEADER)?;
    for o in &dataset.objects {
        w.write_record([
            o.id.clone(),
            o.current_value.to_string(),
            o.cost.to_string(),
            format_dist(&o.dist),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Reads `i,j,cov` entries (0-based object positions). Missing diagonal
/// entries default to the object's variance, missing off-diagonals to zero.
pub fn read_covariance<R: Read>(dataset: &Dataset, reader: R) -> Result<CovMatrix> {
    let n = dataset.len();
    let mut m = CovMatrix::zeros(n);
    let mut diag_set = vec![false; n];
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    let header = rdr.headers()?.clone();
    if header.iter().collect::<Vec<_>>() != COVARIANCE_HEADER {
        return Err(Error::Parse {
            row: 1,
            message: format!("expected header `{}`", COVARIANCE_HEADER.join(",")),
        });
    }
    for rec in rdr.records() {
        let rec = rec?;
        let row = rec.position().map_or(0, |p| p.line() as usize);
        let bad = |message: String| Error::Parse { row, message };
        let idx = |s: &str| -> Result<usize> {
            let i: usize = s.parse().map_err(|_| bad(format!("`{s}` is not an index")))?;
            if i >= n {
                return Err(bad(format!("index {i} out of range for {n} objects")));
            }
            Ok(i)
        };
        let i = idx(&rec[0])?;
        let j = idx(&rec[1])?;
        let v = parse_num(&rec[2]).map_err(bad)?;
        if i == j {
            diag_set[i] = true;
        }
        m.set(i, j, v);
    }
    for (i, set) in diag_set.iter().enumerate() {
        if !set {
            m.set(i, i, dataset.objects[i].variance());
        }
    }
    Ok(m)
}

/// Writes the upper triangle, diagonal included, skipping zero off-diagonals.
pub fn write_covariance<W: Write>(cov: &CovMatrix, writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(COVARIANCE_HEADER)?;
    for i in 0..cov.dim() {
        for j in i..cov.dim() {
            let v = cov.get(i, j);
            if i == j || v != 0.0 {
                w.write_record([i.to_string(), j.to_string(), v.to_string()])?;
            }
        }
    }
    w.flush()?;
    Ok(())
}

pub fn load_dataset(path: &Path, covariance: Option<&Path>) -> Result<Dataset> {
    let mut d = read_dataset(std::fs::File::open(path)?)?;
    if let Some(c) = covariance {
        let m = read_covariance(&d, std::fs::File::open(c)?)?;
        d = d.with_covariance(m)?;
    }
    Ok(d)
}

pub fn save_dataset(dataset: &Dataset, path: &Path) -> Result<()> {
    write_dataset(dataset, std::fs::File::create(path)?)
}
