//! The 24-element single-qubit Clifford group and Pauli conjugation tables.
//!
//! Element `4 * k + p` is `P_p · A_k`, where `P_p` runs over `I, X, Y, Z` and
//! `A_k` over the coset representatives `I, S, H, S·H, H·S, S·H·S` (matrix
//! products, rightmost applied first). Indices 0..4 are therefore the Paulis.

use std::sync::LazyLock;

use super::gate::{GateKind, GateOp};
use super::matrix::{self, kron2, Mat2, Mat4};
use super::pauli::Pauli;

/// A single-qubit Clifford, identified by its table index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Clifford1Q(u8);

struct Table {
    mats: Vec<Mat2>,
    conj: Vec<[(bool, Pauli); 4]>,
    mul: Vec<[u8; 24]>,
    inv: Vec<u8>,
}

fn pauli_matrix(p: Pauli) -> Mat2 {
    match p {
        Pauli::I => matrix::identity2(),
        Pauli::X => matrix::pauli_x(),
        Pauli::Y => matrix::pauli_y(),
        Pauli::Z => matrix::pauli_z(),
    }
}

/// Identify `m` as `±P`; `m` must be a signed Hermitian Pauli.
fn identify_pauli(m: &Mat2) -> (bool, Pauli) {
    for p in Pauli::ALL {
        let t = (pauli_matrix(p) * m).trace() / 2.0;
        if (t.re - 1.0).abs() < 1e-9 {
            return (false, p);
        }
        if (t.re + 1.0).abs() < 1e-9 {
            return (true, p);
        }
    }
    panic!("matrix is not a signed Pauli: {m}");
}

fn same_up_to_phase(a: &Mat2, b: &Mat2) -> bool {
    ((a.adjoint() * b).trace().norm() - 2.0).abs() < 1e-9
}

static TABLE: LazyLock<Table> = LazyLock::new(|| {
    let s = matrix::phase_s();
    let h = matrix::hadamard();
    let reps = [
        matrix::identity2(),
        s,
        h,
        s * h,
        h * s,
        s * h * s,
    ];
    let mut mats = Vec::with_capacity(24);
    for a in &reps {
        for p in Pauli::ALL {
            mats.push(pauli_matrix(p) * a);
        }
    }
    let find = |m: &Mat2| -> u8 {
        mats.iter()
            .position(|c| same_up_to_phase(c, m))
            .expect("matrix is not a single-qubit Clifford") as u8
    };
    let conj = mats
        .iter()
        .map(|c| {
            let mut row = [(false, Pauli::I); 4];
            for p in Pauli::ALL {
                row[p as usize] = identify_pauli(&(c * pauli_matrix(p) * c.adjoint()));
            }
            row
        })
        .collect();
    let mul: Vec<[u8; 24]> = mats
        .iter()
        .map(|a| {
            let mut row = [0u8; 24];
            for (j, b) in mats.iter().enumerate() {
                row[j] = find(&(a * b));
            }
            row
        })
        .collect();
    let inv = (0..24)
        .map(|i| mul[i].iter().position(|&x| x == 0).unwrap() as u8)
        .collect();
    Table {
        mats,
        conj,
        mul,
        inv,
    }
});

impl Clifford1Q {
    pub const IDENTITY: Clifford1Q = Clifford1Q(0);

    pub fn new(index: u8) -> Self {
        assert!(index < 24, "Clifford index {index} out of range");
        Clifford1Q(index)
    }

    pub fn all() -> impl Iterator<Item = Clifford1Q> {
        (0..24).map(Clifford1Q)
    }

    pub fn pauli(p: Pauli) -> Self {
        Clifford1Q(p as u8)
    }

    /// Look up the table element equal to `m` up to phase.
    pub fn from_matrix(m: &Mat2) -> Option<Self> {
        TABLE
            .mats
            .iter()
            .position(|c| same_up_to_phase(c, m))
            .map(|i| Clifford1Q(i as u8))
    }

    /// Table element for a Clifford single-qubit gate.
    pub fn from_gate(g: &GateOp) -> Option<Self> {
        match g.kind() {
            GateKind::C1Q => Some(Clifford1Q(g.clifford_index().unwrap())),
            GateKind::X => Some(*X),
            GateKind::SX => Some(*SX),
            GateKind::H => Some(*H),
            _ => None,
        }
    }

    pub fn index(self) -> u8 {
        self.0
    }

    pub fn matrix(self) -> Mat2 {
        TABLE.mats[self.0 as usize]
    }

    pub fn inverse(self) -> Self {
        Clifford1Q(TABLE.inv[self.0 as usize])
    }

    /// `self · other` as operators (`other` applied first).
    pub fn compose(self, other: Clifford1Q) -> Self {
        Clifford1Q(TABLE.mul[self.0 as usize][other.0 as usize])
    }

    /// `C P C†` as a signed Pauli; the flag is true for a minus sign.
    pub fn conjugate(self, p: Pauli) -> (bool, Pauli) {
        TABLE.conj[self.0 as usize][p as usize]
    }
}

pub static X: LazyLock<Clifford1Q> =
    LazyLock::new(|| Clifford1Q::from_matrix(&matrix::pauli_x()).unwrap());
pub static SX: LazyLock<Clifford1Q> =
    LazyLock::new(|| Clifford1Q::from_matrix(&matrix::sqrt_x()).unwrap());
pub static SX_DAG: LazyLock<Clifford1Q> =
    LazyLock::new(|| Clifford1Q::from_matrix(&matrix::sqrt_x().adjoint()).unwrap());
pub static H: LazyLock<Clifford1Q> =
    LazyLock::new(|| Clifford1Q::from_matrix(&matrix::hadamard()).unwrap());

type Table2 = [[(bool, Pauli, Pauli); 4]; 4];

fn build_table2(g: Mat4) -> Table2 {
    let mut t = [[(false, Pauli::I, Pauli::I); 4]; 4];
    for p0 in Pauli::ALL {
        for p1 in Pauli::ALL {
            let m = g * kron2(&pauli_matrix(p1), &pauli_matrix(p0)) * g.adjoint();
            let mut found = None;
            'search: for q0 in Pauli::ALL {
                for q1 in Pauli::ALL {
                    let tr = (kron2(&pauli_matrix(q1), &pauli_matrix(q0)) * m).trace() / 4.0;
                    if (tr.re - 1.0).abs() < 1e-9 {
                        found = Some((false, q0, q1));
                        break 'search;
                    }
                    if (tr.re + 1.0).abs() < 1e-9 {
                        found = Some((true, q0, q1));
                        break 'search;
                    }
                }
            }
            t[p0 as usize][p1 as usize] = found.expect("not a Clifford");
        }
    }
    t
}

static CZ_TABLE: LazyLock<Table2> = LazyLock::new(|| build_table2(matrix::cz()));
static CX_TABLE: LazyLock<Table2> = LazyLock::new(|| build_table2(matrix::cx()));
static SWAP_TABLE: LazyLock<Table2> = LazyLock::new(|| build_table2(matrix::swap()));

/// `G (P1 ⊗ P0) G†` for a two-qubit Clifford kind, with `p0` on `qubits()[0]`.
pub fn conjugate_2q(kind: GateKind, p0: Pauli, p1: Pauli) -> Option<(bool, Pauli, Pauli)> {
    let table = match kind {
        GateKind::CZ => &*CZ_TABLE,
        GateKind::CX => &*CX_TABLE,
        GateKind::SWAP => &*SWAP_TABLE,
        _ => return None,
    };
    Some(table[p0 as usize][p1 as usize])
}
