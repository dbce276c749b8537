//! Pseudospectral workbench for comparing the defocusing cubic NLS with its
//! Hartree-type regularization on periodic boxes.
//!
//! The crate provides the spectral substrate ([`grid`]), a registry of
//! interaction profiles with analytic Fourier transforms ([`potential`]),
//! Strang split-step integrators for both flows ([`evolution`]), Sobolev-type
//! diagnostics ([`norms`]), convergence-rate sweeps ([`harness`], [`fit`]),
//! a frequency-slab witness for the lower bound of the comparison rate
//! ([`resonance`]), exact combinatorics for iterated Duhamel bookkeeping
//! ([`boardgame`]), and the norm algebra of factorized marginal hierarchies
//! ([`hierarchy`]).

pub mod acceptance;
pub mod boardgame;
pub mod data;
pub mod error;
pub mod evolution;
pub mod fit;
pub mod grid;
pub mod harness;
pub mod hierarchy;
pub mod norms;
pub mod potential;
pub mod quad;
pub mod resonance;

pub use error::{Error, Result};
pub use grid::{GridSpec, SpectralField};
