//! Two-spin entanglement in quantum spin chains.
//!
//! This crate computes the Wootters concurrence and entanglement of formation
//! of two selected spins in ground and thermal states of the XXZ chain and the
//! transverse-field Ising chain, with and without small symmetry-breaking
//! fields. Ground states come from a matrix-free Lanczos solver (N up to ~20
//! sites); thermal states from full dense diagonalization (N ≤ 12).
//!
//! Alongside the general eigenvalue route, the `symmetry` module carries the
//! closed-form concurrence expressions valid for the structured two-site
//! density matrices that global Z2 / U(1) symmetries enforce, together with
//! the cubic-coefficient machinery that certifies when a symmetry-breaking
//! field leaves the concurrence unchanged.
//!
//! Modules, roughly bottom-up:
//! - [`model`]: lattices, model parameters, matrix-free Hamiltonian actions.
//! - [`solver`]: Lanczos ground states, dense spectra, Gibbs ensembles.
//! - [`reduced`]: two-site reduced density matrices and correlators.
//! - [`entangle`]: spin flip, concurrence, entanglement of formation.
//! - [`symmetry`]: structured density-matrix forms and invariance conditions.
//! - [`cli`]: parameter sweeps, matrix-file analysis, verification suites.
//!
//! ```
//! use spin_entangle::entangle::concurrence;
//! use spin_entangle::model::{build_xxz, Boundary, LatticeSpec, ModelSpec};
//! use spin_entangle::reduced::reduce_pure;
//! use spin_entangle::solver::{lanczos_ground_state, LanczosOptions};
//!
//! // Nearest-neighbor concurrence of an 8-site isotropic ring.
//! let lattice = LatticeSpec::new(8, Boundary::Periodic)?;
//! let spec = ModelSpec::xxz(lattice, 1.0, 0.0)?;
//! let hamiltonian = build_xxz(&spec)?;
//! let (ground, report) = lanczos_ground_state(&hamiltonian, &LanczosOptions::default())?;
//! assert!(report.residual < 1e-10);
//!
//! let rho = reduce_pure(&ground, 0, 1)?;
//! let c = concurrence(&rho)?.concurrence;
//! assert!((c - 0.4127).abs() < 1e-3);
//! # Ok::<(), spin_entangle::Error>(())
//! ```

use thiserror::Error;

pub mod cli;
pub mod cubic;
pub mod entangle;
pub mod model;
pub mod reduced;
pub mod sampling;
pub mod solver;
pub mod symmetry;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid lattice: {0}")]
    InvalidLattice(String),
    #[error("invalid model: {0}")]
    InvalidModel(String),
    #[error("solver did not converge after {iterations} iterations (best residual {residual:.3e})")]
    NotConverged { iterations: usize, residual: f64 },
    #[error("dimension {dim} exceeds the dense-solver limit {limit}; use the Lanczos path")]
    DenseLimit { dim: usize, limit: usize },
    #[error("invalid density matrix: {0}")]
    InvalidDensityMatrix(String),
    #[error("invalid correlators: {0}")]
    InvalidCorrelators(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

#[cfg(test)]
pub(crate) mod test_oracles;
