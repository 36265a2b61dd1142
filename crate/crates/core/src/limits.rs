//! Budget caps for dense tables and exact enumerations.

use crate::error::{Error, Result};

/// Environment variable overriding the default DP support cap.
pub const BUDGET_ENV: &str = "NOISEFLOW_BUDGET";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Limits {
    /// Largest `n` for which a `2^n` table is materialized.
    pub dense_dim: usize,
    /// Largest support of an exact law kept during a DP.
    pub support_cap: usize,
    /// Largest horizon for exhaustive per-path enumerations.
    pub exhaustive_t: usize,
    /// Largest `n` for which all `2^n` subsets are enumerated.
    pub subset_dim: usize,
    /// Largest joint-space size in the blocked-cell projection checker.
    pub joint_support: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            dense_dim: 24,
            support_cap: 1_000_000,
            exhaustive_t: 12,
            subset_dim: 16,
            joint_support: 4096,
        }
    }
}

impl Limits {
    /// Defaults, with `support_cap` taken from [`BUDGET_ENV`] when set.
    pub fn from_env() -> Result<Self> {
        let mut limits = Limits::default();
        if let Ok(v) = std::env::var(BUDGET_ENV) {
            limits.support_cap = v.trim().parse().map_err(|_| {
                Error::InvalidParameter(format!(
                    "{BUDGET_ENV} must be a positive integer, got {v:?}"
                ))
            })?;
        }
        Ok(limits)
    }

    pub fn check_dense(&self, n: usize) -> Result<()> {
        if n > self.dense_dim || n >= usize::BITS as usize - 1 {
            return Err(Error::DimensionTooLarge {
                n,
                limit: self.dense_dim,
            });
        }
        Ok(())
    }

    pub fn check_support(&self, what: &str, size: usize) -> Result<()> {
        if size > self.support_cap {
            return Err(Error::BudgetExceeded {
                what: what.to_string(),
                size: size as u128,
                cap: self.support_cap as u128,
            });
        }
        Ok(())
    }

    pub fn check_exhaustive(&self, what: &str, t: usize) -> Result<()> {
        if t > self.exhaustive_t {
            return Err(Error::BudgetExceeded {
                what: what.to_string(),
                size: t as u128,
                cap: self.exhaustive_t as u128,
            });
        }
        Ok(())
    }

    pub fn check_subsets(&self, what: &str, n: usize) -> Result<()> {
        if n > self.subset_dim {
            return Err(Error::BudgetExceeded {
                what: what.to_string(),
                size: 1u128 << n.min(127),
                cap: 1u128 << self.subset_dim,
            });
        }
        Ok(())
    }
}
