use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Gate kinds understood by the IR.
///
/// `X`, `SX`, `RZ` and `CZ` form the native set; `U3` and `C1Q` are single-qubit
/// gates the mirror generator emits and the simulator executes directly. The
/// rest are high-level kinds that only the transpiler consumes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum GateKind {
    X,
    SX,
    RZ,
    CZ,
    CX,
    H,
    SWAP,
    CP,
    U3,
    C1Q,
}

impl GateKind {
    pub const ALL: [GateKind; 10] = [
        GateKind::X,
        GateKind::SX,
        GateKind::RZ,
        GateKind::CZ,
        GateKind::CX,
        GateKind::H,
        GateKind::SWAP,
        GateKind::CP,
        GateKind::U3,
        GateKind::C1Q,
    ];

    pub fn arity(self) -> usize {
        match self {
            GateKind::CZ | GateKind::CX | GateKind::SWAP | GateKind::CP => 2,
            _ => 1,
        }
    }

    pub fn num_params(self) -> usize {
        match self {
            GateKind::RZ | GateKind::CP | GateKind::C1Q => 1,
            GateKind::U3 => 3,
            _ => 0,
        }
    }

    /// Kinds accepted by the mirror generator and the low-level benchmarks.
    pub fn is_native(self) -> bool {
        matches!(
            self,
            GateKind::X | GateKind::SX | GateKind::RZ | GateKind::CZ | GateKind::U3 | GateKind::C1Q
        )
    }

    /// The strict hardware basis `{X, SX, RZ, CZ}` targeted by the transpiler.
    pub fn is_basis(self) -> bool {
        matches!(self, GateKind::X | GateKind::SX | GateKind::RZ | GateKind::CZ)
    }

    /// Kinds that map Paulis to Paulis regardless of parameters.
    pub fn is_clifford(self) -> bool {
        matches!(
            self,
            GateKind::X
                | GateKind::SX
                | GateKind::H
                | GateKind::CZ
                | GateKind::CX
                | GateKind::SWAP
                | GateKind::C1Q
        )
    }

    pub fn name(self) -> &'static str {
        match self {
            GateKind::X => "X",
            GateKind::SX => "SX",
            GateKind::RZ => "RZ",
            GateKind::CZ => "CZ",
            GateKind::CX => "CX",
            GateKind::H => "H",
            GateKind::SWAP => "SWAP",
            GateKind::CP => "CP",
            GateKind::U3 => "U3",
            GateKind::C1Q => "C1Q",
        }
    }
}

impl fmt::Display for GateKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for GateKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        GateKind::ALL
            .into_iter()
            .find(|k| k.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::InvalidGate(format!("unknown gate kind `{s}`")))
    }
}

/// A single gate application.
///
/// Parameters and qubits live in fixed inline arrays; only the first
/// `kind.num_params()` / `kind.arity()` entries are meaningful.
#[derive(Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawGate", into = "RawGate")]
pub struct GateOp {
    kind: GateKind,
    params: [f64; 3],
    qubits: [usize; 2],
}

impl GateOp {
    pub fn new(kind: GateKind, params: &[f64], qubits: &[usize]) -> Result<Self> {
        if params.len() != kind.num_params() {
            return Err(Error::InvalidGate(format!(
                "{kind} takes {} parameter(s), got {}",
                kind.num_params(),
                params.len()
            )));
        }
        if qubits.len() != kind.arity() {
            return Err(Error::InvalidGate(format!(
                "{kind} acts on {} qubit(s), got {}",
                kind.arity(),
                qubits.len()
            )));
        }
        if params.iter().any(|p| !p.is_finite()) {
            return Err(Error::InvalidGate(format!("{kind} has a non-finite angle")));
        }
        if qubits.len() == 2 && qubits[0] == qubits[1] {
            return Err(Error::InvalidGate(format!(
                "{kind} repeats qubit {}",
                qubits[0]
            )));
        }
        if kind == GateKind::C1Q {
            let idx = params[0];
            if idx.fract() != 0.0 || !(0.0..24.0).contains(&idx) {
                return Err(Error::InvalidGate(format!(
                    "C1Q index must be an integer in 0..24, got {idx}"
                )));
            }
        }
        let mut p = [0.0; 3];
        p[..params.len()].copy_from_slice(params);
        let mut q = [0; 2];
        q[..qubits.len()].copy_from_slice(qubits);
        Ok(GateOp {
            kind,
            params: p,
            qubits: q,
        })
    }

    fn one(kind: GateKind, q: usize, params: [f64; 3]) -> Self {
        GateOp {
            kind,
            params,
            qubits: [q, 0],
        }
    }

    fn two(kind: GateKind, a: usize, b: usize, params: [f64; 3]) -> Self {
        assert_ne!(a, b, "{kind} needs two distinct qubits");
        GateOp {
            kind,
            params,
            qubits: [a, b],
        }
    }

    pub fn x(q: usize) -> Self {
        Self::one(GateKind::X, q, [0.0; 3])
    }

    pub fn sx(q: usize) -> Self {
        Self::one(GateKind::SX, q, [0.0; 3])
    }

    pub fn h(q: usize) -> Self {
        Self::one(GateKind::H, q, [0.0; 3])
    }

    pub fn rz(q: usize, theta: f64) -> Self {
        Self::one(GateKind::RZ, q, [theta, 0.0, 0.0])
    }

    pub fn u3(q: usize, theta: f64, phi: f64, lambda: f64) -> Self {
        Self::one(GateKind::U3, q, [theta, phi, lambda])
    }

    /// Single-qubit Clifford by table index (see [`crate::circuit::clifford`]).
    pub fn c1q(q: usize, index: u8) -> Self {
        assert!(index < 24, "C1Q index out of range");
        Self::one(GateKind::C1Q, q, [f64::from(index), 0.0, 0.0])
    }

    pub fn cz(a: usize, b: usize) -> Self {
        Self::two(GateKind::CZ, a, b, [0.0; 3])
    }

    pub fn cx(control: usize, target: usize) -> Self {
        Self::two(GateKind::CX, control, target, [0.0; 3])
    }

    pub fn swap(a: usize, b: usize) -> Self {
        Self::two(GateKind::SWAP, a, b, [0.0; 3])
    }

    pub fn cp(a: usize, b: usize, theta: f64) -> Self {
        Self::two(GateKind::CP, a, b, [theta, 0.0, 0.0])
    }

    pub fn kind(&self) -> GateKind {
        self.kind
    }

    pub fn params(&self) -> &[f64] {
        &self.params[..self.kind.num_params()]
    }

    pub fn qubits(&self) -> &[usize] {
        &self.qubits[..self.kind.arity()]
    }

    pub fn arity(&self) -> usize {
        self.kind.arity()
    }

    pub fn clifford_index(&self) -> Option<u8> {
        (self.kind == GateKind::C1Q).then_some(self.params[0] as u8)
    }

    /// Same gate acting on relabeled qubits.
    pub fn remapped(&self, map: impl Fn(usize) -> usize) -> Self {
        let mut g = *self;
        for q in g.qubits[..self.kind.arity()].iter_mut() {
            *q = map(*q);
        }
        g
    }

    /// Structural equality with a tolerance on angles.
    pub fn approx_eq(&self, other: &GateOp, tol: f64) -> bool {
        self.kind == other.kind
            && self.qubits() == other.qubits()
            && self
                .params()
                .iter()
                .zip(other.params())
                .all(|(a, b)| (a - b).abs() <= tol)
    }
}

impl fmt::Debug for GateOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.kind)?;
        if !self.params().is_empty() {
            write!(f, "{:?}", self.params())?;
        }
        for q in self.qubits() {
            write!(f, " q{q}")?;
        }
        Ok(())
    }
}

#[derive(Serialize, Deserialize)]
struct RawGate {
    kind: GateKind,
    #[serde(default)]
    params: Vec<f64>,
    qubits: Vec<usize>,
}

impl TryFrom<RawGate> for GateOp {
    type Error = Error;

    fn try_from(raw: RawGate) -> Result<Self> {
        GateOp::new(raw.kind, &raw.params, &raw.qubits)
    }
}

impl From<GateOp> for RawGate {
    fn from(g: GateOp) -> Self {
        RawGate {
            kind: g.kind,
            params: g.params().to_vec(),
            qubits: g.qubits().to_vec(),
        }
    }
}
