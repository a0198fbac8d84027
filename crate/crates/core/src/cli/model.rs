//! JSON model files.
//!
//! Complex entries are `[re, im]` pairs, matrices are lists of rows. Kraus
//! operators are `n × d·n` with domain index `a·n + i` for site index `a` and
//! memory index `i`. Gauge phase positions are 1-based.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::algebra::{FdAlgebra, StateOnAlgebra};
use crate::cpmap::CpMap;
use crate::error::{Error, Result};
use crate::fcs::FcsTriple;
use crate::gauge::{close_group, diagonal_cyclic, GaugeGroup, DEFAULT_MAX_ORDER};
use crate::linalg::{c, CMat};
use crate::tol::Tolerances;

pub const SCHEMA_VERSION: u32 = 1;

pub type JsonMatrix = Vec<Vec<[f64; 2]>>;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelFile {
    pub schema_version: u32,
    pub site_dim: usize,
    pub memory_dims: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kraus: Option<Vec<JsonMatrix>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub choi: Option<JsonMatrix>,
    pub rho: Vec<JsonMatrix>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub markov: Option<MarkovHint>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gauge: Option<GaugeSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub exact_rational: Option<ExactRational>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tolerances: Option<Tolerances>,
}

/// Marks the model as a quantum Markov state; `range_blocks` lists the
/// expected `(mᵢ, dᵢ)` of the range, checked when present.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MarkovHint {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub range_blocks: Option<Vec<[usize; 2]>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum GaugeSpec {
    Unitaries {
        generators: Vec<JsonMatrix>,
    },
    /// `(position, modulus)`: `diag(…, e^{2πi/modulus}, …)` at 1-based `position`.
    DiagonalCyclic {
        phases: Vec<[u64; 2]>,
    },
}

/// Generators of the spectrum group as integer vectors over the logs of a
/// declared list of positive rationals `[p, q]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExactRational {
    pub basis: Vec<[u64; 2]>,
    pub generators: Vec<Vec<i64>>,
}

pub fn to_matrix(m: &JsonMatrix) -> Result<CMat> {
    let rows = m.len();
    let cols = m.first().map_or(0, Vec::len);
    if m.iter().any(|r| r.len() != cols) {
        return Err(Error::Parse("ragged matrix".into()));
    }
    if m.iter().flatten().flatten().any(|x| !x.is_finite()) {
        return Err(Error::Parse("non-finite matrix entry".into()));
    }
    Ok(CMat::from_fn(rows, cols, |i, j| c(m[i][j][0], m[i][j][1])))
}

pub fn from_matrix(m: &CMat) -> JsonMatrix {
    (0..m.nrows())
        .map(|i| {
            (0..m.ncols())
                .map(|j| [m[(i, j)].re, m[(i, j)].im])
                .collect()
        })
        .collect()
}

impl ModelFile {
    pub fn load(path: &Path) -> Result<(Self, Vec<u8>)> {
        let bytes = std::fs::read(path)?;
        let model = Self::parse(&bytes)?;
        Ok((model, bytes))
    }

    pub fn parse(bytes: &[u8]) -> Result<Self> {
        let model: Self = serde_json::from_slice(bytes)?;
        if model.schema_version != SCHEMA_VERSION {
            return Err(Error::Parse(format!(
                "unsupported schema_version {} (expected {SCHEMA_VERSION})",
                model.schema_version
            )));
        }
        Ok(model)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("model serializes")
    }

    /// A model file describing `phi`, given by its Kraus operators.
    pub fn from_triple(phi: &FcsTriple) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            site_dim: phi.site_dim(),
            memory_dims: phi.memory().dims(),
            kraus: Some(phi.map().kraus().iter().map(from_matrix).collect()),
            choi: None,
            rho: phi
                .rho()
                .densities()
                .blocks()
                .iter()
                .map(from_matrix)
                .collect(),
            markov: None,
            gauge: None,
            exact_rational: None,
            tolerances: None,
        }
    }

    /// The model's tolerances when given (missing fields take defaults),
    /// otherwise the defaults with `FCSTOOL_TOL` applied.
    pub fn effective_tolerances(&self) -> Result<Tolerances> {
        match self.tolerances {
            Some(t) => Ok(t),
            None => Tolerances::from_env(),
        }
    }

    pub fn triple(&self) -> Result<FcsTriple> {
        let tol = self.effective_tolerances()?;
        let mem = FdAlgebra::new(&self.memory_dims)?;
        let e = match (&self.kraus, &self.choi) {
            (Some(k), None) => {
                let kraus = k.iter().map(to_matrix).collect::<Result<Vec<_>>>()?;
                CpMap::from_kraus(kraus, self.site_dim, &mem, &tol)?
            }
            (None, Some(ch)) => CpMap::from_choi(&to_matrix(ch)?, self.site_dim, &mem, &tol)?,
            _ => {
                return Err(Error::Parse(
                    "exactly one of `kraus` and `choi` must be given".into(),
                ))
            }
        };
        let blocks = self.rho.iter().map(to_matrix).collect::<Result<Vec<_>>>()?;
        let rho = StateOnAlgebra::new(&mem, blocks, tol.psd.max(1e-12))?;
        FcsTriple::new(e, rho, tol)
    }

    pub fn gauge_group(&self, tol: f64) -> Result<Option<GaugeGroup>> {
        self.gauge
            .as_ref()
            .map(|g| g.group(self.site_dim, tol))
            .transpose()
    }
}

impl GaugeSpec {
    pub fn group(&self, d: usize, tol: f64) -> Result<GaugeGroup> {
        match self {
            GaugeSpec::Unitaries { generators } => {
                let gens = generators
                    .iter()
                    .map(to_matrix)
                    .collect::<Result<Vec<_>>>()?;
                close_group(&gens, DEFAULT_MAX_ORDER, tol)
            }
            GaugeSpec::DiagonalCyclic { phases } => {
                let mut zero_based = Vec::with_capacity(phases.len());
                for &[pos, k] in phases {
                    if pos == 0 {
                        return Err(Error::Parse("gauge positions are 1-based".into()));
                    }
                    zero_based.push((pos as usize - 1, k));
                }
                diagonal_cyclic(d, &zero_based, tol)
            }
        }
    }
}

/// Group file accepted by `fcstool gauge --group`: a bare gauge spec.
pub fn load_group(path: &Path) -> Result<GaugeSpec> {
    let bytes = std::fs::read(path)?;
    Ok(serde_json::from_slice(&bytes)?)
}
