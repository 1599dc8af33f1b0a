//! Quantum-corrected Lotka-Volterra phase-space dynamics.
//!
//! The crate evaluates the Wigner flow of an isotropic Gaussian ensemble
//! driven by the Lotka-Volterra Hamiltonian `H(x, k) = a x + k + a e^{-x} + e^{-k}`,
//! locates and classifies the stagnation points of the resulting quantum
//! velocity field, and drives continuous (RK4) and discrete (forward Euler)
//! trajectories for Poincaré sections and bifurcation scans.
//!
//! Modules:
//!
//! * [`model`]: Hamiltonian, classical flow, Gaussian ensemble, species map, purity.
//! * [`special`]: complex error function, Hermite polynomials, odd-Hermite resummation.
//! * [`flow`]: Wigner currents, quantum velocity, divergence fields, grid sampling.
//! * [`equilibria`]: Jacobians, stagnation-point search, classification, winding numbers.
//! * [`dynamics`]: trajectories, Poincaré sections, discrete map, bifurcation scans.

pub mod dynamics;
pub mod equilibria;
mod error;
pub mod flow;
pub mod model;
pub mod quadrature;
pub mod special;


pub use dynamics::{BifurcationParam, BifurcationRecord, PoincareSection, ScanConfig, Trajectory};
pub use equilibria::{JacobianSummary, StagnationKind, StagnationReport};
pub use error::{Error, Result};
pub use flow::{FlowSample, Region, SeriesConfig};
pub use model::{EnergyValue, ModelParams, PhasePoint};
