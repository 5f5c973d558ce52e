//! Verification toolkit for weighted graph states.
//!
//! The crate is organised around the four random-sampling verification
//! protocols for weighted graph states `|G⟩ = ∏ Λ_jk(θ_jk) |+⟩^{⊗n}`:
//!
//! - [`graph`]: weighted graphs, independence covers and colorings.
//! - [`state`]: dense statevector and density-matrix simulation with
//!   Z-basis and equatorial-plane measurements.
//! - [`operators`]: dense test operators, spectral gaps and operator norms
//!   used as an oracle at small qubit counts.
//! - [`protocols`]: measurement-only per-copy tests, the N-random sampling
//!   test and the fidelity certificates attached to accepted runs.
//! - [`sources`]: honest and adversarial producers of copies.
//! - [`iqp`]: Mølmer–Sørensen graph states, IQP circuits and the link from
//!   fidelity to l1 error of the output distribution.
//! - [`cli`]: the `wgverify` command-line driver.
//!
//! Vertices are 1-indexed. Vertex `k` maps to bit `k - 1` of an amplitude
//! index (little-endian).

pub mod cli;
pub mod error;
pub mod graph;
pub mod iqp;
pub mod operators;
pub mod protocols;
pub mod sources;
pub mod state;

pub use error::{Error, Result};
pub use graph::{IndependenceCover, WeightedGraph};
pub use state::{DensityMatrix, PlaneBasis, StateVector};

pub use num_complex::Complex64;
