//! Numerical tolerances shared by every analysis routine.
//!
//! Defaults are tuned for desk-scale problems (memory and site dimensions up
//! to about 8). They can be overridden per model file or process-wide through
//! the `FCSTOOL_TOL` environment variable, e.g. `FCSTOOL_TOL="alg=1e-9,per=1e-7"`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const TOL_ENV: &str = "FCSTOOL_TOL";

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Tolerances {
    /// Algebraic identities (products, idempotency, unitality).
    pub alg: f64,
    /// Positivity and trace checks.
    pub psd: f64,
    /// Peripheral eigenvalue detection: |λ| > 1 - per.
    pub per: f64,
    /// Components with weight at or below this are dropped.
    pub wt: f64,
    /// State equality on window evaluations.
    pub eq: f64,
    /// Gap used when clustering joint eigenvalues.
    pub cluster: f64,
    /// Integer-relation residual for commensurability of log generators.
    pub commensurate: f64,
    /// Largest denominator tried in rational approximation of generator ratios.
    pub q_max: u64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            alg: 1e-10,
            psd: 1e-10,
            per: 1e-8,
            wt: 1e-12,
            eq: 1e-9,
            cluster: 1e-8,
            commensurate: 1e-9,
            q_max: 1_000_000,
        }
    }
}

impl Tolerances {
    /// Defaults, then `FCSTOOL_TOL` overrides if the variable is set.
    pub fn from_env() -> Result<Self> {
        let mut tol = Self::default();
        if let Ok(spec) = std::env::var(TOL_ENV) {
            tol.apply_overrides(&spec)?;
        }
        Ok(tol)
    }

    /// Applies a comma separated `key=value` list. A bare number sets both
    /// `alg` and `psd`.
    pub fn apply_overrides(&mut self, spec: &str) -> Result<()> {
        for part in spec.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            let Some((key, value)) = part.split_once('=') else {
                let v = parse_positive(part)?;
                self.alg = v;
                self.psd = v;
                continue;
            };
            let key = key.trim();
            let value = value.trim();
            match key {
                "alg" => self.alg = parse_positive(value)?,
                "psd" => self.psd = parse_positive(value)?,
                "per" => self.per = parse_positive(value)?,
                "wt" => self.wt = parse_positive(value)?,
                "eq" => self.eq = parse_positive(value)?,
                "cluster" => self.cluster = parse_positive(value)?,
                "commensurate" => self.commensurate = parse_positive(value)?,
                "q_max" => {
                    self.q_max = value
                        .parse()
                        .map_err(|_| Error::Parse(format!("bad q_max `{value}`")))?
                }
                other => return Err(Error::Parse(format!("unknown tolerance key `{other}`"))),
            }
        }
        Ok(())
    }
}

fn parse_positive(s: &str) -> Result<f64> {
    let v: f64 = s
        .parse()
        .map_err(|_| Error::Parse(format!("bad tolerance value `{s}`")))?;
    if !(v > 0.0 && v.is_finite()) {
        return Err(Error::Parse(format!(
            "tolerance must be positive, got `{s}`"
        )));
    }
    Ok(v)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn overrides_parse() {
        let mut t = Tolerances::default();
        t.apply_overrides("alg=1e-9, per=1e-6,q_max=1000").unwrap();
        assert_eq!(t.alg, 1e-9);
        assert_eq!(t.per, 1e-6);
        assert_eq!(t.q_max, 1000);
        t.apply_overrides("1e-7").unwrap();
        assert_eq!(t.psd, 1e-7);
        assert!(t.apply_overrides("bogus=1").is_err());
        assert!(t.apply_overrides("alg=-1").is_err());
    }
}
