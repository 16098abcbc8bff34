//! Mirror-circuit process-fidelity benchmarks.
//!
//! The crate turns user circuits into scalable benchmarks: it builds mirror
//! proxy circuits with randomized compilation ([`mirror`]), simulates them
//! under configurable noise ([`sim`]), and converts shot data into process
//! fidelity estimates with bootstrap uncertainties ([`analysis`]). Exact
//! small-width oracles live alongside so every estimate can be checked.
//!
//! Conventions used throughout:
//! - qubit `i` is bit `i` of a basis index (little-endian);
//! - bitstrings are written with qubit 0 as the leftmost character;
//! - `unitary_of(a ∥ b) = unitary_of(b) · unitary_of(a)`.

pub mod circuit;
pub mod algo;
pub mod analysis;
pub mod bench;
pub mod error;
pub mod io;
pub mod mirror;
pub mod rng;
pub mod sim;
pub mod transpile;

pub use circuit::{Circuit, CouplingGraph, GateKind, GateOp, Layer, Pauli, PauliFrame};
pub use error::{Error, Result};
