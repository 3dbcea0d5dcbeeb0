//! One-dimensional lattice Boltzmann schemes with multiple relaxation times.
//!
//! * [`fluid`]: D1Q3 scheme for isentropic compressible flow.
//! * [`advdiff`]: D1Q3 scheme for a scalar advection-diffusion equation.
//! * [`ns`]: coupled D1Q3Q3 scheme for (ρ, J, ζ = ρs) with entropy production.
//! * [`analysis`]: linearised equilibria, von Neumann scans, defects, convergence orders.
//! * [`fd`]: explicit finite-difference solver of the same Navier-Stokes system.
//! * [`harness`]: run configuration, presets and CSV output.

// `!(x > 0.0)` also rejects NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod advdiff;
pub mod analysis;
pub mod error;
pub mod fd;
pub mod fields;
pub mod fluid;
pub mod gas;
pub mod harness;
pub mod lattice;
pub mod ns;

pub use error::{Error, Result};
pub use fields::Macroscopic;
pub use gas::GasModel;
