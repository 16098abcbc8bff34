//! Compilation to `{X, SX, RZ, CZ}` on a coupling graph, with optional
//! approximate compilation.
//!
//! Pipeline: [`approximate_prune`] → [`decompose_to_basis`] → [`route`] →
//! decomposition of the inserted SWAPs and a final single-qubit merge.

mod decompose;
mod route;

use serde::{Deserialize, Serialize};

use crate::circuit::matrix::{self, DenseMatrix, ONE, ZERO};
use crate::circuit::{unitary_of_with_limit, Circuit, CouplingGraph, GateOp, Layer};
use crate::error::{Error, Result};
use crate::rng::derive_seed;

pub use decompose::{decompose_to_basis, zsx_sequence};
pub use route::{route, Routed};

/// Widths up to which intrinsic fidelity is computed from dense unitaries.
pub const INTRINSIC_EXACT_LIMIT: usize = 10;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TranspileConfig {
    pub coupling: CouplingGraph,
    #[serde(default = "default_degree")]
    pub approximation_degree: f64,
    #[serde(default)]
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub initial_layout: Option<Vec<usize>>,
}

fn default_degree() -> f64 {
    1.0
}

impl TranspileConfig {
    pub fn new(coupling: CouplingGraph, approximation_degree: f64, seed: u64) -> Result<Self> {
        let cfg = TranspileConfig {
            coupling,
            approximation_degree,
            seed,
            initial_layout: None,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.approximation_degree > 0.0 && self.approximation_degree <= 1.0) {
            return Err(Error::InvalidArgument(format!(
                "approximation degree {} outside (0, 1]",
                self.approximation_degree
            )));
        }
        Ok(())
    }

    /// Stable hex digest of the configuration.
    pub fn digest(&self) -> String {
        let json = serde_json::to_string(self).expect("config serializes");
        format!("{:016x}", derive_seed(0, &json))
    }
}

/// `F(g, I) = |Tr U_g|² / d²`.
pub fn identity_fidelity(g: &GateOp) -> f64 {
    let tr = if g.arity() == 1 {
        let m = matrix::matrix_1q(g);
        m[(0, 0)] + m[(1, 1)]
    } else {
        let m = matrix::matrix_2q(g);
        (0..4).map(|i| m[(i, i)]).sum()
    };
    let d = if g.arity() == 1 { 2.0 } else { 4.0 };
    tr.norm_sqr() / (d * d)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DroppedGate {
    pub layer: usize,
    pub gate: GateOp,
    pub identity_fidelity: f64,
}

/// Remove every gate whose identity fidelity reaches `degree`. A degree of
/// 1.0 or more removes nothing.
pub fn approximate_prune(c: &Circuit, degree: f64) -> (Circuit, Vec<DroppedGate>) {
    if degree >= 1.0 {
        return (c.clone(), Vec::new());
    }
    let mut dropped = Vec::new();
    let mut layers = Vec::with_capacity(c.depth());
    for (li, layer) in c.layers().iter().enumerate() {
        let mut keep = Vec::with_capacity(layer.len());
        for g in layer.ops() {
            let f = identity_fidelity(g);
            if f >= degree {
                dropped.push(DroppedGate {
                    layer: li,
                    gate: *g,
                    identity_fidelity: f,
                });
            } else {
                keep.push(*g);
            }
        }
        layers.push(Layer::new(keep));
    }
    let out = Circuit::new(c.id.clone(), c.n(), layers).expect("subset of a valid layer");
    (out, dropped)
}

/// Output of [`transpile`].
#[derive(Debug, Clone, PartialEq)]
pub struct Transpiled {
    pub circuit: Circuit,
    pub initial_layout: Vec<usize>,
    pub final_layout: Vec<usize>,
    pub swaps: usize,
    pub dropped: Vec<DroppedGate>,
}

impl Transpiled {
    /// Product of the identity fidelities of the dropped gates.
    pub fn intrinsic_budget(&self) -> f64 {
        self.dropped.iter().map(|d| d.identity_fidelity).product()
    }

    /// Unitary of `intended` expressed on physical qubits, with the initial
    /// and final layouts applied.
    pub fn intended_physical_unitary(&self, intended: &Circuit) -> Result<DenseMatrix> {
        physical_unitary(intended, self.circuit.n(), &self.initial_layout, &self.final_layout)
    }

    /// Process fidelity of the compiled circuit to `intended`: exact up to
    /// [`INTRINSIC_EXACT_LIMIT`] qubits, the drop budget above.
    pub fn intrinsic_fidelity(&self, intended: &Circuit) -> Result<f64> {
        if self.dropped.is_empty() {
            return Ok(1.0);
        }
        if self.circuit.n() > INTRINSIC_EXACT_LIMIT {
            return Ok(self.intrinsic_budget());
        }
        let target = self.intended_physical_unitary(intended)?;
        let got = unitary_of_with_limit(&self.circuit, INTRINSIC_EXACT_LIMIT)?;
        crate::sim::process_fidelity_unitaries(&target, &got)
    }
}

/// Unitary of `intended` widened to `np` physical qubits and conjugated by
/// the layouts of a compilation.
pub fn physical_unitary(
    intended: &Circuit,
    np: usize,
    initial_layout: &[usize],
    final_layout: &[usize],
) -> Result<DenseMatrix> {
    let wide = Circuit::new("", np, intended.layers().to_vec())?;
    let u = unitary_of_with_limit(&wide, INTRINSIC_EXACT_LIMIT)?;
    let pf = permutation_matrix(final_layout);
    let pi = permutation_matrix(initial_layout);
    Ok(pf * u * pi.adjoint())
}

/// Permutation sending logical basis state `x` to the physical state whose
/// bit `layout[i]` is bit `i` of `x`.
pub fn permutation_matrix(layout: &[usize]) -> DenseMatrix {
    let n = layout.len();
    let d = 1usize << n;
    let mut p = DenseMatrix::from_element(d, d, ZERO);
    for x in 0..d {
        let mut y = 0usize;
        for (i, &pi) in layout.iter().enumerate() {
            y |= (x >> i & 1) << pi;
        }
        p[(y, x)] = ONE;
    }
    p
}

pub fn transpile(c: &Circuit, cfg: &TranspileConfig) -> Result<Transpiled> {
    cfg.validate()?;
    let (pruned, dropped) = approximate_prune(c, cfg.approximation_degree);
    let native = decompose_to_basis(&pruned)?;
    let routed = route(&native, &cfg.coupling, cfg.initial_layout.as_deref(), cfg.seed)?;
    let circuit = decompose_to_basis(&routed.circuit)?;
    Ok(Transpiled {
        circuit,
        initial_layout: routed.initial_layout,
        final_layout: routed.final_layout,
        swaps: routed.swaps,
        dropped,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::matrix::distance_up_to_phase;
    use crate::circuit::unitary_of;

    #[test]
    fn identity_fidelity_closed_forms() {
        let t = 1e-4f64;
        let f = identity_fidelity(&GateOp::cp(0, 1, t));
        assert!((f - (10.0 + 6.0 * t.cos()) / 16.0).abs() < 1e-15);
        assert_eq!(identity_fidelity(&GateOp::x(0)), 0.0);
    }

    #[test]
    fn prune_rules() {
        let c = Circuit::from_gates(
            2,
            [GateOp::cp(0, 1, 1e-4), GateOp::x(0), GateOp::rz(1, 0.0)],
        )
        .unwrap();
        let (same, none) = approximate_prune(&c, 1.0);
        assert!(none.is_empty() && same == c);
        let (out, dropped) = approximate_prune(&c, 0.9999);
        assert_eq!(dropped.len(), 2);
        assert_eq!(out.gate_count(), 1);
        let (_, d) = approximate_prune(&c, 0.26);
        assert!(d.iter().all(|g| g.gate.kind() != crate::GateKind::X));
    }

    #[test]
    fn empty_circuit_stays_empty() {
        let cfg = TranspileConfig::new(CouplingGraph::all_to_all(3), 1.0, 0).unwrap();
        let t = transpile(&Circuit::empty(3), &cfg).unwrap();
        assert_eq!(t.circuit.gate_count(), 0);
    }

    #[test]
    fn routed_circuit_matches_up_to_layouts() {
        let c = Circuit::from_gates(
            3,
            [GateOp::h(0), GateOp::cp(0, 2, 0.4), GateOp::cx(2, 1), GateOp::swap(0, 1)],
        )
        .unwrap();
        let cfg = TranspileConfig::new(CouplingGraph::line(3), 1.0, 3).unwrap();
        let t = transpile(&c, &cfg).unwrap();
        assert!(t.circuit.gates().all(|g| g.kind().is_basis()));
        let target = t.intended_physical_unitary(&c).unwrap();
        let got = unitary_of(&t.circuit).unwrap();
        assert!(distance_up_to_phase(&target, &got) < 1e-9);
        assert!((t.intrinsic_fidelity(&c).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn config_json_and_validation() {
        let cfg: TranspileConfig = serde_json::from_str(
            r#"{"coupling":{"n":2,"edges":[[0,1]]},"approximation_degree":0.99,"seed":4}"#,
        )
        .unwrap();
        assert_eq!(cfg.approximation_degree, 0.99);
        assert_eq!(cfg.digest(), cfg.clone().digest());
        assert!(TranspileConfig::new(CouplingGraph::line(2), 0.0, 0).is_err());
        assert!(TranspileConfig::new(CouplingGraph::line(2), 1.01, 0).is_err());
    }
}
