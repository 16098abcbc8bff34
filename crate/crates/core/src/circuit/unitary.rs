//! State-vector kernels and dense unitaries.
//!
//! Time ordering: `unitary_of(a ∥ b) = unitary_of(b) · unitary_of(a)`.

use super::circuit::{Circuit, Layer};
use super::gate::{GateKind, GateOp};
use super::matrix::{self, cis, DenseMatrix, Mat2, Mat4, C64, ONE, ZERO};
use super::pauli::Pauli;
use crate::error::{Error, Result};

pub const DEFAULT_DENSE_LIMIT: usize = 12;

/// Apply a 2x2 matrix to qubit `q` of a state vector.
pub fn apply_1q(state: &mut [C64], q: usize, m: &Mat2) {
    let bit = 1usize << q;
    let (m00, m01, m10, m11) = (m[(0, 0)], m[(0, 1)], m[(1, 0)], m[(1, 1)]);
    let dim = state.len();
    let mut base = 0;
    while base < dim {
        for i in base..base + bit {
            let a = state[i];
            let b = state[i + bit];
            state[i] = m00 * a + m01 * b;
            state[i + bit] = m10 * a + m11 * b;
        }
        base += 2 * bit;
    }
}

/// Apply a diagonal single-qubit gate `diag(d0, d1)`.
pub fn apply_diag_1q(state: &mut [C64], q: usize, d0: C64, d1: C64) {
    let bit = 1usize << q;
    for (i, amp) in state.iter_mut().enumerate() {
        *amp *= if i & bit == 0 { d0 } else { d1 };
    }
}

/// Apply a 4x4 matrix with local index `b0 + 2*b1` (`b0` from `q0`).
pub fn apply_2q(state: &mut [C64], q0: usize, q1: usize, m: &Mat4) {
    let b0 = 1usize << q0;
    let b1 = 1usize << q1;
    for i in 0..state.len() {
        if i & (b0 | b1) != 0 {
            continue;
        }
        let idx = [i, i | b0, i | b1, i | b0 | b1];
        let v = [state[idx[0]], state[idx[1]], state[idx[2]], state[idx[3]]];
        for (r, &out) in idx.iter().enumerate() {
            state[out] = m[(r, 0)] * v[0] + m[(r, 1)] * v[1] + m[(r, 2)] * v[2] + m[(r, 3)] * v[3];
        }
    }
}

/// Multiply amplitudes where both bits are set by `phase`.
pub fn apply_controlled_phase(state: &mut [C64], q0: usize, q1: usize, phase: C64) {
    let mask = (1usize << q0) | (1usize << q1);
    for (i, amp) in state.iter_mut().enumerate() {
        if i & mask == mask {
            *amp *= phase;
        }
    }
}

pub fn apply_pauli(state: &mut [C64], q: usize, p: Pauli) {
    match p {
        Pauli::I => {}
        Pauli::X => apply_1q(state, q, &matrix::pauli_x()),
        Pauli::Y => apply_1q(state, q, &matrix::pauli_y()),
        Pauli::Z => apply_diag_1q(state, q, ONE, -ONE),
    }
}

/// Apply one gate to a state vector.
pub fn apply_gate(state: &mut [C64], g: &GateOp) {
    let q = g.qubits();
    match g.kind() {
        GateKind::RZ => {
            let t = g.params()[0];
            apply_diag_1q(state, q[0], cis(-t / 2.0), cis(t / 2.0));
        }
        GateKind::CZ => apply_controlled_phase(state, q[0], q[1], -ONE),
        GateKind::CP => apply_controlled_phase(state, q[0], q[1], cis(g.params()[0])),
        _ if g.arity() == 1 => apply_1q(state, q[0], &matrix::matrix_1q(g)),
        _ => apply_2q(state, q[0], q[1], &matrix::matrix_2q(g)),
    }
}

pub fn apply_layer(state: &mut [C64], layer: &Layer) {
    for g in layer.ops() {
        apply_gate(state, g);
    }
}

pub fn apply_circuit(state: &mut [C64], c: &Circuit) {
    for layer in c.layers() {
        apply_layer(state, layer);
    }
}

/// Dense unitary of a circuit, default limit of 12 qubits.
pub fn unitary_of(c: &Circuit) -> Result<DenseMatrix> {
    unitary_of_with_limit(c, DEFAULT_DENSE_LIMIT)
}

pub fn unitary_of_with_limit(c: &Circuit, limit: usize) -> Result<DenseMatrix> {
    if c.n() > limit {
        return Err(Error::Capacity {
            what: "dense unitary",
            n: c.n(),
            limit,
        });
    }
    let dim = 1usize << c.n();
    let mut u = DenseMatrix::identity(dim, dim);
    // Column-major storage: each column is the image of a basis state.
    for col in u.as_mut_slice().chunks_mut(dim) {
        apply_circuit(col, c);
    }
    Ok(u)
}

/// Product of the matrices of single-qubit gates, applied in iteration order.
pub fn chain_matrix<'a>(gates: impl IntoIterator<Item = &'a GateOp>) -> Mat2 {
    gates
        .into_iter()
        .fold(matrix::identity2(), |acc, g| matrix::matrix_1q(g) * acc)
}

fn pauli_mat(p: Pauli) -> Mat2 {
    match p {
        Pauli::I => matrix::identity2(),
        Pauli::X => matrix::pauli_x(),
        Pauli::Y => matrix::pauli_y(),
        Pauli::Z => matrix::pauli_z(),
    }
}

/// A single `U3` equal up to phase to `post · g · pre`.
pub fn merge_1q(pre: Pauli, g: &GateOp, post: Pauli) -> GateOp {
    assert_eq!(g.arity(), 1, "merge_1q needs a single-qubit gate");
    let m = pauli_mat(post) * matrix::matrix_1q(g) * pauli_mat(pre);
    u3_gate(g.qubits()[0], &m)
}

/// `U3` gate on `q` for an arbitrary 2x2 unitary.
pub fn u3_gate(q: usize, m: &Mat2) -> GateOp {
    let (t, p, l) = matrix::u3_angles(m);
    GateOp::u3(q, t, p, l)
}

/// `U3` gate for `post · pre` with no gate in between.
pub fn pauli_pair_gate(q: usize, pre: Pauli, post: Pauli) -> GateOp {
    u3_gate(q, &(pauli_mat(post) * pauli_mat(pre)))
}

/// Dense state vector `U|0…0⟩`.
pub fn statevector(c: &Circuit, limit: usize) -> Result<Vec<C64>> {
    if c.n() > limit {
        return Err(Error::Capacity {
            what: "state vector",
            n: c.n(),
            limit,
        });
    }
    let mut s = vec![ZERO; 1 << c.n()];
    s[0] = ONE;
    apply_circuit(&mut s, c);
    Ok(s)
}
