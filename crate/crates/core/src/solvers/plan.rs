use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::model::Dataset;

pub const PLAN_HEADER: [&str; 5] = ["rank", "id", "cost", "benefit", "cumulative_cost"];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PlanStep {
    pub index: usize,
    pub benefit: f64,
    pub cost: f64,
}

/// Objects chosen for cleaning, in selection order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CleaningPlan {
    pub chosen: Vec<usize>,
    pub total_cost: f64,
    pub objective_value: f64,
    pub algorithm: String,
    pub approximate: bool,
    pub trace: Vec<PlanStep>,
    pub notes: Vec<String>,
}

impl CleaningPlan {
    pub fn new(algorithm: &str, chosen: Vec<usize>, costs: &[f64], objective_value: f64) -> Self {
        let trace = chosen
            .iter()
            .map(|&i| PlanStep {
                index: i,
                benefit: f64::NAN,
                cost: costs[i],
            })
            .collect();
        CleaningPlan {
            total_cost: chosen.iter().map(|&i| costs[i]).sum(),
            chosen,
            objective_value,
            algorithm: algorithm.to_string(),
            approximate: false,
            trace,
            notes: Vec::new(),
        }
    }

    pub fn from_trace(algorithm: &str, trace: Vec<PlanStep>, objective_value: f64) -> Self {
        CleaningPlan {
            chosen: trace.iter().map(|s| s.index).collect(),
            total_cost: trace.iter().map(|s| s.cost).sum(),
            objective_value,
            algorithm: algorithm.to_string(),
            approximate: false,
            trace,
            notes: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.chosen.len()
    }

    pub fn is_empty(&self) -> bool {
        self.chosen.is_empty()
    }

    /// Chosen indices in increasing order.
    pub fn sorted(&self) -> Vec<usize> {
        let mut s = self.chosen.clone();
        s.sort_unstable();
        s
    }

    pub fn contains(&self, i: usize) -> bool {
        self.chosen.contains(&i)
    }

    /// Writes `rank,id,cost,benefit,cumulative_cost` rows and the footer line.
    pub fn write_csv<W: Write>(&self, dataset: &Dataset, mut writer: W) -> Result<()> {
        {
            let mut w = csv::Writer::from_writer(&mut writer);
            w.write_record(PLAN_HEADER)?;
            let mut cum = 0.0;
            for (rank, s) in self.trace.iter().enumerate() {
                cum += s.cost;
                w.write_record([
                    (rank + 1).to_string(),
                    dataset.objects[s.index].id.clone(),
                    s.cost.to_string(),
                    s.benefit.to_string(),
                    cum.to_string(),
                ])?;
            }
            w.flush()?;
        }
        writeln!(
            writer,
            "# objective={} algorithm={} approximate={}",
            self.objective_value, self.algorithm, self.approximate
        )?;
        Ok(())
    }
}

/// `total + c ≤ budget` up to a relative rounding margin, so that scaling
/// all costs and the budget together never changes feasibility.
pub fn fits(total: f64, cost: f64, budget: f64) -> bool {
    total + cost <= budget * (1.0 + 1e-12)
}
