//! Truncated-Fock-space simulator for the damped quantum harmonic
//! oscillator whose coupling to the environment is f- or q-deformed.
//!
//! The dissipative part of the master equation is built from deformed
//! ladder operators A = a f(N); the Hamiltonian stays undeformed. The
//! crate provides the generator in both operator and number-representation
//! form, a fixed-step integrator with diagnostics, the closed small-tau
//! moment dynamics, and the population chain with its geometric steady
//! state.

pub mod config;
pub mod deformation;
pub mod docs;
pub mod environment;
pub mod error;
pub mod evolve;
pub mod fock;
pub mod generator;
pub mod linalg;
pub mod moments;
pub mod populations;
pub mod state;

pub use deformation::DeformationSpec;
pub use environment::{EnvironmentCoefficients, Temperature};
pub use error::{Error, Result};
pub use evolve::{integrate, EvolveOptions, Trajectory, TrajectoryRecord};
pub use fock::FockOperators;
pub use generator::DeformedLiouvillian;
pub use moments::MomentState;
pub use populations::PopulationVector;
pub use state::DensityMatrix;
