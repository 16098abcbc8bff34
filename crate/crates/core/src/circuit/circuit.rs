use serde::{Deserialize, Serialize};

use super::clifford::{self, Clifford1Q};
use super::gate::{GateKind, GateOp};
use crate::error::{Error, Result};

/// Gates that execute in the same time step; no qubit is shared between them.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Layer {
    ops: Vec<GateOp>,
}

impl Layer {
    pub fn new(ops: Vec<GateOp>) -> Self {
        Layer { ops }
    }

    pub fn ops(&self) -> &[GateOp] {
        &self.ops
    }

    pub fn len(&self) -> usize {
        self.ops.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ops.is_empty()
    }

    pub fn push(&mut self, op: GateOp) {
        self.ops.push(op);
    }

    pub fn into_ops(self) -> Vec<GateOp> {
        self.ops
    }

    /// Layer of inverted gates (order within a layer is irrelevant).
    pub fn inverse(&self) -> Layer {
        Layer::new(self.ops.iter().map(inverse_gate).collect())
    }

    pub fn is_clifford(&self) -> bool {
        self.ops.iter().all(|g| g.kind().is_clifford())
    }

    fn check(&self, n: usize, index: usize) -> Result<()> {
        let mut used = vec![false; n];
        for op in &self.ops {
            for &q in op.qubits() {
                if q >= n {
                    return Err(Error::InvalidCircuit(format!(
                        "layer {index}: qubit {q} out of range for width {n}"
                    )));
                }
                if used[q] {
                    return Err(Error::InvalidCircuit(format!(
                        "layer {index}: qubit {q} used twice"
                    )));
                }
                used[q] = true;
            }
        }
        Ok(())
    }
}

/// Inverse of a single gate.
///
/// `SX†` is not a kind of its own, so it is written as the matching `C1Q`
/// element, and the inverse of that element maps back to `SX`.
pub fn inverse_gate(g: &GateOp) -> GateOp {
    let q = g.qubits();
    let p = g.params();
    match g.kind() {
        GateKind::X | GateKind::H | GateKind::CZ | GateKind::CX | GateKind::SWAP => *g,
        GateKind::RZ => GateOp::rz(q[0], -p[0]),
        GateKind::CP => GateOp::cp(q[0], q[1], -p[0]),
        GateKind::SX => GateOp::c1q(q[0], clifford::SX_DAG.index()),
        GateKind::U3 => GateOp::u3(q[0], -p[0], -p[2], -p[1]),
        GateKind::C1Q => {
            let inv = Clifford1Q::new(g.clifford_index().unwrap()).inverse();
            if inv == *clifford::SX {
                GateOp::sx(q[0])
            } else {
                GateOp::c1q(q[0], inv.index())
            }
        }
    }
}

/// A layered circuit on `n` qubits. Layers execute in list order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawCircuit")]
pub struct Circuit {
    pub id: String,
    n: usize,
    layers: Vec<Layer>,
}

#[derive(Deserialize)]
struct RawCircuit {
    #[serde(default)]
    id: String,
    n: usize,
    layers: Vec<Layer>,
}

impl TryFrom<RawCircuit> for Circuit {
    type Error = Error;

    fn try_from(raw: RawCircuit) -> Result<Self> {
        Circuit::new(raw.id, raw.n, raw.layers)
    }
}

impl Circuit {
    pub fn new(id: impl Into<String>, n: usize, layers: Vec<Layer>) -> Result<Self> {
        for (i, layer) in layers.iter().enumerate() {
            layer.check(n, i)?;
        }
        Ok(Circuit {
            id: id.into(),
            n,
            layers,
        })
    }

    /// Construct without validation; callers guarantee the layer invariants.
    pub(crate) fn from_layers_unchecked(id: String, n: usize, layers: Vec<Layer>) -> Self {
        debug_assert!(layers.iter().enumerate().all(|(i, l)| l.check(n, i).is_ok()));
        Circuit { id, n, layers }
    }

    pub fn empty(n: usize) -> Self {
        Circuit {
            id: String::new(),
            n,
            layers: Vec::new(),
        }
    }

    /// Greedy as-soon-as-possible layering of a flat gate list.
    pub fn from_gates(n: usize, gates: impl IntoIterator<Item = GateOp>) -> Result<Self> {
        let mut b = CircuitBuilder::new(n);
        for g in gates {
            b.push(g)?;
        }
        Ok(b.finish())
    }

    pub fn with_id(mut self, id: impl Into<String>) -> Self {
        self.id = id.into();
        self
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn width(&self) -> usize {
        self.n
    }

    pub fn depth(&self) -> usize {
        self.layers.len()
    }

    pub fn layers(&self) -> &[Layer] {
        &self.layers
    }

    pub fn into_layers(self) -> Vec<Layer> {
        self.layers
    }

    pub fn gates(&self) -> impl Iterator<Item = &GateOp> {
        self.layers.iter().flat_map(|l| l.ops())
    }

    pub fn gate_count(&self) -> usize {
        self.layers.iter().map(Layer::len).sum()
    }

    pub fn count_kind(&self, kind: GateKind) -> usize {
        self.gates().filter(|g| g.kind() == kind).count()
    }

    /// First gate outside the native set, if any.
    pub fn first_non_native(&self) -> Option<GateKind> {
        self.gates().map(GateOp::kind).find(|k| !k.is_native())
    }

    pub fn require_native(&self) -> Result<()> {
        match self.first_non_native() {
            Some(k) => Err(Error::NotNative {
                kind: k.to_string(),
            }),
            None => Ok(()),
        }
    }

    /// `self` followed by `other` (layer lists concatenated).
    pub fn concat(&self, other: &Circuit) -> Result<Circuit> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch(self.n, other.n));
        }
        let mut layers = self.layers.clone();
        layers.extend(other.layers.iter().cloned());
        Ok(Circuit {
            id: self.id.clone(),
            n: self.n,
            layers,
        })
    }

    /// Layer-by-layer inverse: layers reversed, each gate inverted.
    pub fn inverse(&self) -> Circuit {
        Circuit {
            id: self.id.clone(),
            n: self.n,
            layers: self.layers.iter().rev().map(Layer::inverse).collect(),
        }
    }

    /// Same layer structure, kinds and qubits, with angles equal within `tol`.
    pub fn structurally_eq(&self, other: &Circuit, tol: f64) -> bool {
        self.n == other.n
            && self.layers.len() == other.layers.len()
            && self.layers.iter().zip(&other.layers).all(|(a, b)| {
                a.len() == b.len() && a.ops().iter().zip(b.ops()).all(|(x, y)| x.approx_eq(y, tol))
            })
    }
}

/// Incremental ASAP layering with optional barriers.
#[derive(Debug)]
pub struct CircuitBuilder {
    n: usize,
    frontier: Vec<usize>,
    layers: Vec<Layer>,
}

impl CircuitBuilder {
    pub fn new(n: usize) -> Self {
        CircuitBuilder {
            n,
            frontier: vec![0; n],
            layers: Vec::new(),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn push(&mut self, g: GateOp) -> Result<()> {
        let mut slot = 0;
        for &q in g.qubits() {
            if q >= self.n {
                return Err(Error::InvalidCircuit(format!(
                    "qubit {q} out of range for width {}",
                    self.n
                )));
            }
            slot = slot.max(self.frontier[q]);
        }
        if slot == self.layers.len() {
            self.layers.push(Layer::default());
        }
        self.layers[slot].push(g);
        for &q in g.qubits() {
            self.frontier[q] = slot + 1;
        }
        Ok(())
    }

    /// Forces every later gate into a fresh layer.
    pub fn barrier(&mut self) {
        let top = self.layers.len();
        self.frontier.iter_mut().for_each(|f| *f = top);
    }

    pub fn finish(self) -> Circuit {
        Circuit {
            id: String::new(),
            n: self.n,
            layers: self.layers,
        }
    }
}
