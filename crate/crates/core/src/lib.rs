//! Finitely correlated states on quantum spin chains: finite data, factor
//! decisions, ergodic decomposition, type classification for quantum Markov
//! states and gauge-invariant subfactors.

pub mod algebra;
pub mod cli;
pub mod cpmap;
pub mod error;
pub mod fcs;
pub mod fixtures;
pub mod gauge;
pub mod linalg;
pub mod markovtype;
pub mod peripheral;
pub mod rational;
pub mod tol;

pub use algebra::{AlgElement, FdAlgebra, StateOnAlgebra};
pub use cpmap::CpMap;
pub use error::{Error, Result};
pub use fcs::FcsTriple;
pub use tol::Tolerances;
