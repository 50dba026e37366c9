//! JSON claims files.
//!
//! ```json
//! { "original": {"type":"window","left":0,"right":4,"w":4},
//!   "perturbations": {"generate":"shift","count":18},
//!   "sensibility": {"mode":"exp","rate":1.5},
//!   "delta": "subtract", "tau": 100.0 }
//! ```
//!
//! Window positions are 0-based object positions. Threshold members may be
//! object ids (strings) or positions (integers).

use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{Claim, ClaimSystem, Direction, LinearClaim, ThresholdClaim, WindowAggregateClaim, DEFAULT_DECAY_RATE};
use crate::error::{Error, Result};
use crate::model::Dataset;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum IdRef {
    Position(usize),
    Id(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum ClaimSpec {
    Window {
        left: usize,
        right: usize,
        w: usize,
    },
    Linear {
        weights: Vec<f64>,
        #[serde(default)]
        offset: f64,
    },
    Threshold {
        ids: Vec<IdRef>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        gamma: Option<f64>,
        #[serde(default = "default_direction")]
        direction: Direction,
    },
}

fn default_direction() -> Direction {
    Direction::Below
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PerturbationSpec {
    List(Vec<ClaimSpec>),
    Generate {
        generate: String,
        count: usize,
        #[serde(default)]
        include_original: bool,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "lowercase")]
pub enum SensibilitySpec {
    Exp {
        #[serde(default = "default_rate")]
        rate: f64,
    },
    Explicit {
        values: Vec<f64>,
    },
}

fn default_rate() -> f64 {
    DEFAULT_DECAY_RATE
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClaimsFile {
    pub original: ClaimSpec,
    pub perturbations: PerturbationSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sensibility: Option<SensibilitySpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tau: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub threshold: Option<f64>,
}

/// A parsed claims file bound to a dataset.
#[derive(Debug, Clone, PartialEq)]
pub struct ClaimsConfig {
    pub system: ClaimSystem,
    /// Deviation for MaxPr; 0 when the file omits it.
    pub tau: f64,
    pub threshold: Option<f64>,
}

impl ClaimSpec {
    fn resolve(&self, dataset: &Dataset, threshold: Option<f64>) -> Result<Claim> {
        let claim = match self {
            ClaimSpec::Window { left, right, w } => Claim::Window(WindowAggregateClaim {
                left_start: *left,
                right_start: *right,
                window: *w,
            }),
            ClaimSpec::Linear { weights, offset } => Claim::Linear(LinearClaim {
                weights: weights.clone(),
                offset: *offset,
            }),
            ClaimSpec::Threshold { ids, gamma, direction } => {
                let members = ids
                    .iter()
                    .map(|r| match r {
                        IdRef::Position(i) => {
                            dataset.check_index(*i)?;
                            Ok(*i)
                        }
                        IdRef::Id(s) => dataset.index_of(s),
                    })
                    .collect::<Result<Vec<_>>>()?;
                let threshold = gamma
                    .or(threshold)
                    .ok_or_else(|| Error::Claims("threshold claim needs `gamma` or a top-level `threshold`".into()))?;
                Claim::Threshold(ThresholdClaim {
                    members,
                    threshold,
                    direction: *direction,
                })
            }
        };
        claim.check(dataset.len())?;
        Ok(claim)
    }
}

pub fn parse_claims(json: &str, dataset: &Dataset) -> Result<ClaimsConfig> {
    let file: ClaimsFile = serde_json::from_str(json)?;
    if let Some(d) = &file.delta {
        if d != "subtract" {
            return Err(Error::Claims(format!(
                "unsupported delta `{d}`; only `subtract` is available"
            )));
        }
    }
    let original = file.original.resolve(dataset, file.threshold)?;
    let perturbations = match &file.perturbations {
        PerturbationSpec::List(list) => list
            .iter()
            .map(|c| c.resolve(dataset, file.threshold))
            .collect::<Result<Vec<_>>>()?,
        PerturbationSpec::Generate {
            generate,
            count,
            include_original,
        } => {
            let Claim::Window(w) = &original else {
                return Err(Error::Claims("generated perturbations need a window original".into()));
            };
            if generate != "shift" {
                return Err(Error::Claims(format!("unknown generator `{generate}`")));
            }
            super::window_perturbations(w, dataset.len(), *count, *include_original)?
                .into_iter()
                .map(Claim::Window)
                .collect()
        }
    };
    let system = match file.sensibility.unwrap_or(SensibilitySpec::Exp {
        rate: DEFAULT_DECAY_RATE,
    }) {
        SensibilitySpec::Exp { rate } => {
            if !(rate > 0.0) {
                return Err(Error::Claims(format!("decay rate {rate} must be positive")));
            }
            ClaimSystem::exp_decay(original, perturbations, rate)?
        }
        SensibilitySpec::Explicit { mut values } => {
            let total: f64 = values.iter().sum();
            if values.iter().any(|v| !(*v >= 0.0)) || !(total > 0.0) {
                return Err(Error::Claims(
                    "explicit sensibilities must be nonnegative with positive sum".into(),
                ));
            }
            if (total - 1.0).abs() > 1e-12 {
                log::warn!("sensibilities sum to {total}; normalizing");
                for v in &mut values {
                    *v /= total;
                }
            }
            ClaimSystem::new(original, perturbations, values)?
        }
    };
    let tau = match file.tau {
        Some(t) if t < 0.0 => return Err(Error::Claims(format!("tau {t} must be nonnegative"))),
        Some(t) => t,
        None => {
            log::warn!("claims file sets no tau; using 0");
            0.0
        }
    };
    Ok(ClaimsConfig {
        system,
        tau,
        threshold: file.threshold,
    })
}

pub fn read_claims(path: &Path, dataset: &Dataset) -> Result<ClaimsConfig> {
    parse_claims(&std::fs::read_to_string(path)?, dataset)
}
