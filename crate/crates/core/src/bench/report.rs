use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::Estimate;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Flag {
    /// The optimum sits at the first or last grid point: no optimum demonstrated.
    BoundaryOptimum,
    /// No point had a finite estimate.
    InsufficientSamples,
    /// Too few observations for a meaningful bootstrap.
    DegenerateBootstrap,
    /// At least one item of a pipeline failed; see the item errors.
    ItemFailed,
}

impl fmt::Display for Flag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Flag::BoundaryOptimum => "boundary_optimum",
            Flag::InsufficientSamples => "insufficient_samples",
            Flag::DegenerateBootstrap => "degenerate_bootstrap",
            Flag::ItemFailed => "item_failed",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportPoint {
    pub axis: f64,
    pub estimate: Estimate,
    pub lower: Estimate,
    pub upper: Estimate,
}

/// A metric with its bootstrap interval and, for scans, the per-point curve.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchReport {
    pub version: String,
    pub metric: String,
    pub axis_name: String,
    pub estimate: Estimate,
    pub lower: Estimate,
    pub upper: Estimate,
    pub level: f64,
    /// Axis value of the optimum, when the metric is a scan.
    pub optimum: Option<f64>,
    pub points: Vec<ReportPoint>,
    pub flags: Vec<Flag>,
    pub seeds: BTreeMap<String, u64>,
    pub params: BTreeMap<String, serde_json::Value>,
}

impl BenchReport {
    pub fn new(metric: &str, axis_name: &str, level: f64) -> Self {
        BenchReport {
            version: crate::VERSION.to_string(),
            metric: metric.to_string(),
            axis_name: axis_name.to_string(),
            estimate: Estimate::Unsolved,
            lower: Estimate::Unsolved,
            upper: Estimate::Unsolved,
            level,
            optimum: None,
            points: Vec::new(),
            flags: Vec::new(),
            seeds: BTreeMap::new(),
            params: BTreeMap::new(),
        }
    }

    pub fn has_flag(&self, flag: Flag) -> bool {
        self.flags.contains(&flag)
    }

    pub(crate) fn flag(&mut self, flag: Flag) {
        if !self.flags.contains(&flag) {
            self.flags.push(flag);
            self.flags.sort();
        }
    }

    /// `axis,estimate,lo,hi,flags`, one row per scan point. The optimum row
    /// carries `optimum` plus any report-level flags.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("axis,estimate,lo,hi,flags\n");
        for p in &self.points {
            let mut flags = Vec::new();
            if self.optimum == Some(p.axis) {
                flags.push("optimum".to_string());
                flags.extend(self.flags.iter().map(Flag::to_string));
            }
            out.push_str(&format!("{},{},{},{},{}\n", p.axis, p.estimate, p.lower, p.upper, flags.join(";")));
        }
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}
