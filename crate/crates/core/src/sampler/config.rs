use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::reflect::CheckMode;

/// Where the search gets its lower bound on `π_min` from.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PiLowerBound {
    /// `1 / (C n²)`.
    Default,
    /// The true `π_min` of the chain, for tests.
    Oracle,
    Value(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SamplerConfig {
    pub eps: f64,
    /// Copies per comparison round.
    pub copies: usize,
    /// Interval constant: the search starts on `[0, C/n]`.
    pub interval: f64,
    /// Cap on search iterations; `None` derives it from `pi_lb`.
    pub depth_cap: Option<usize>,
    pub pi_lb: PiLowerBound,
    pub seed: u64,
    pub mode: CheckMode,
    /// Lower bounds on `π_g` at or above this skip `U_main` and amplify
    /// straight from `|g⟩`.
    pub fast_path: f64,
}

impl Default for SamplerConfig {
    fn default() -> Self {
        SamplerConfig {
            eps: 0.05,
            copies: 100,
            interval: 100.0,
            depth_cap: None,
            pi_lb: PiLowerBound::Default,
            seed: 0,
            mode: CheckMode::Sampled,
            fast_path: 0.375,
        }
    }
}

impl SamplerConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.eps > 0.0 && self.eps < 1.0) {
            return Err(Error::Domain(format!("eps = {} outside (0, 1)", self.eps)));
        }
        if self.copies < 1 {
            return Err(Error::Domain("need at least one copy per round".into()));
        }
        if self.interval.is_nan() || self.interval < 2.0 {
            return Err(Error::Domain(format!("interval constant {} is below 2", self.interval)));
        }
        if self.depth_cap == Some(0) {
            return Err(Error::Domain("search depth cap must be at least 1".into()));
        }
        if let PiLowerBound::Value(v) = self.pi_lb {
            if !(v > 0.0 && v <= 1.0) {
                return Err(Error::Domain(format!("π_min lower bound {v} outside (0, 1]")));
            }
        }
        if self.fast_path.is_nan() || self.fast_path <= 0.0 {
            return Err(Error::Domain(format!("fast-path threshold {} must be positive", self.fast_path)));
        }
        Ok(())
    }

    /// The numeric lower bound on `π_min` for a chain with the given size and true minimum.
    pub fn pi_lower_bound(&self, n: usize, true_min: f64) -> f64 {
        match self.pi_lb {
            PiLowerBound::Default => 1.0 / (self.interval * (n * n) as f64),
            PiLowerBound::Oracle => true_min,
            PiLowerBound::Value(v) => v,
        }
    }

    /// `⌈log₂((C/n) / π_lb)⌉ + 10`, unless a cap is configured.
    pub fn search_cap(&self, n: usize, pi_lb: f64) -> usize {
        self.depth_cap.unwrap_or_else(|| {
            let ratio = (self.interval / n as f64) / pi_lb;
            ratio.log2().ceil().max(0.0) as usize + 10
        })
    }
}
