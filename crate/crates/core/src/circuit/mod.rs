//! Layered circuit IR, gate semantics, Pauli frames and dense unitaries.

#[allow(clippy::module_inception)]
mod circuit;
pub mod clifford;
mod coupling;
mod gate;
pub mod matrix;
mod pauli;
pub mod unitary;

pub use circuit::{inverse_gate, Circuit, CircuitBuilder, Layer};
pub use clifford::Clifford1Q;
pub use coupling::CouplingGraph;
pub use gate::{GateKind, GateOp};
pub use pauli::{propagate_frame, Pauli, PauliFrame};
pub(crate) use pauli::propagate_in_place;
pub use unitary::{merge_1q, unitary_of, unitary_of_with_limit};
