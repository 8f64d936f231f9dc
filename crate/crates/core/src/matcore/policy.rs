use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Thresholds that decide every numerical "= 0" and every rank.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct NumericPolicy {
    /// Absolute zero threshold.
    pub atol: f64,
    /// Relative zero threshold, multiplied by a caller-supplied scale.
    pub rtol: f64,
    /// Singular values below `rank_rtol × σ_max` count as zero.
    pub rank_rtol: f64,
    /// Largest acceptable condition number of a core-nilpotent similarity.
    pub cond_max: f64,
}

impl Default for NumericPolicy {
    fn default() -> Self {
        NumericPolicy { atol: 1e-10, rtol: 1e-8, rank_rtol: 1e-10, cond_max: 1e8 }
    }
}

impl NumericPolicy {
    pub fn validate(&self) -> Result<()> {
        let fields = [("atol", self.atol), ("rtol", self.rtol), ("rank_rtol", self.rank_rtol)];
        for (name, v) in fields {
            if !(v.is_finite() && v >= 0.0) {
                return Err(Error::InvalidPolicy(format!("{name} must be a nonnegative number, got {v}")));
            }
        }
        if !(self.cond_max > 1.0) {
            return Err(Error::InvalidPolicy(format!("cond_max must exceed 1, got {}", self.cond_max)));
        }
        Ok(())
    }

    /// `atol + rtol × scale`.
    pub fn tolerance(&self, scale: f64) -> f64 {
        self.atol + self.rtol * scale
    }

    /// Parses a (possibly partial) JSON override; missing fields keep defaults.
    pub fn from_json(text: &str) -> Result<Self> {
        let p: NumericPolicy = serde_json::from_str(text)?;
        p.validate()?;
        Ok(p)
    }
}
