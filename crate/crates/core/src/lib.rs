//! Beam steering for reconfigurable intelligent surfaces as Ising/QUBO
//! problems, solved with a simulated QAOA loop and checked against a coupled
//! far-field model.
//!
//! The flow is: [`geometry`] lays out the array, [`coupling`] builds one of
//! four interaction models and rescales it, [`ising`] tabulates the cost
//! spectrum, [`oracle`] enumerates it exhaustively, [`qaoa`] trains the
//! circuit, [`validator`] scores the chosen phases in the far field, and
//! [`pipeline`] strings the stages together with reproducible reports.

pub mod config;
pub mod coupling;
pub mod error;
pub mod geometry;
pub mod ising;
pub mod kernels;
pub mod metrics;
pub mod optim;
pub mod oracle;
pub mod parallel;
pub mod pipeline;
pub mod qaoa;
pub mod validator;

pub use coupling::{CouplingModelSpec, IsingInstance, ModelId};
pub use error::{Error, Result};
pub use geometry::{build_geometry, ArrayGeometry, Direction, ScenarioConfig};
pub use ising::{Bitstring, CostDiagonal};
pub use oracle::OracleResult;
pub use qaoa::{OptimizerConfig, QaoaParams, QaoaState};
