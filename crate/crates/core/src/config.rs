//! Tolerances and resource limits read from a `key = value` file.
//!
//! Lines starting with `#` and blank lines are skipped. Unknown keys are
//! rejected. The file path can come from the `ZECKLAB_CONFIG` environment
//! variable; command-line flags take precedence over file values, which take
//! precedence over the defaults.

use std::path::Path;

use crate::error::{Error, Result};
use crate::primes::sieve::DEFAULT_MEMORY_BUDGET;

pub const CONFIG_ENV: &str = "ZECKLAB_CONFIG";

#[derive(Clone, Debug, PartialEq)]
pub struct Config {
    /// Upper bound for `sup_k |observed - predicted| / π(x)`.
    pub local_clt_sup_tol: f64,
    /// Upper bound for the relative error at the modal `k`.
    pub local_clt_modal_tol: f64,
    /// Upper bound for the residue-class deviation.
    pub residue_tol: f64,
    /// Upper bound for digit-pattern frequency errors.
    pub digit_stat_tol: f64,
    /// Upper bound for the fitted constant of the correlation identity.
    pub correlation_k: f64,
    /// Lower bound for the Fourier decay rate per unit `λ`.
    pub fourier_rate_min: f64,
    /// Memory budget for sieving, in bytes.
    pub memory_budget: u64,
}

impl Default for Config {
    fn default() -> Self {
        Config {
            local_clt_sup_tol: 0.01,
            local_clt_modal_tol: 0.10,
            residue_tol: 0.01,
            digit_stat_tol: 2e-3,
            correlation_k: 4.0,
            fourier_rate_min: 0.05,
            memory_budget: DEFAULT_MEMORY_BUDGET,
        }
    }
}

impl Config {
    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = Config::default();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::InvalidArgument(format!("line {}: expected key = value", lineno + 1)))?;
            cfg.set(key.trim(), value.trim())
                .map_err(|e| Error::InvalidArgument(format!("line {}: {e}", lineno + 1)))?;
        }
        Ok(cfg)
    }

    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let float = || {
            value
                .parse::<f64>()
                .ok()
                .filter(|v| v.is_finite() && *v >= 0.0)
                .ok_or_else(|| Error::InvalidArgument(format!("{key}: bad number {value:?}")))
        };
        match key {
            "local_clt_sup_tol" => self.local_clt_sup_tol = float()?,
            "local_clt_modal_tol" => self.local_clt_modal_tol = float()?,
            "residue_tol" => self.residue_tol = float()?,
            "digit_stat_tol" => self.digit_stat_tol = float()?,
            "correlation_k" => self.correlation_k = float()?,
            "fourier_rate_min" => self.fourier_rate_min = float()?,
            "memory_budget" => {
                self.memory_budget = value
                    .parse()
                    .map_err(|_| Error::InvalidArgument(format!("{key}: bad integer {value:?}")))?
            }
            _ => return Err(Error::InvalidArgument(format!("unknown key {key:?}"))),
        }
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::InvalidArgument(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    /// The file named by `explicit`, else by `ZECKLAB_CONFIG`, else defaults.
    pub fn resolve(explicit: Option<&Path>) -> Result<Self> {
        match explicit {
            Some(p) => Self::load(p),
            None => match std::env::var_os(CONFIG_ENV) {
                Some(p) => Self::load(Path::new(&p)),
                None => Ok(Config::default()),
            },
        }
    }
}
