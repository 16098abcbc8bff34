//! Built-in circuit families.

mod hamiltonian;
mod trotter;

use std::f64::consts::PI;

use rand::Rng as _;

use crate::circuit::{Circuit, GateOp, Layer};
use crate::error::{Error, Result};
use crate::rng::rng_from_seed;

pub use hamiltonian::{heisenberg, max3sat, tfim, PauliSumHamiltonian};
pub use trotter::{
    algorithmic_process_fidelity, exact_evolution, full_process_fidelity, pauli_exponential, trotter_circuit,
    TrotterSpec, ALGORITHMIC_LIMIT,
};

/// Quantum Fourier transform: `H` and controlled-phase ladder per qubit
/// from the top down, then the bit-reversal SWAPs. The unitary is the DFT
/// matrix `U[j][k] = ω^{jk}/√N` with `ω = e^{2πi/N}`.
pub fn qft_circuit(n: usize) -> Circuit {
    let mut gates = Vec::new();
    for j in (0..n).rev() {
        gates.push(GateOp::h(j));
        for k in (0..j).rev() {
            gates.push(GateOp::cp(j, k, PI / f64::from(1u32 << (j - k).min(31))));
        }
    }
    for i in 0..n / 2 {
        gates.push(GateOp::swap(i, n - 1 - i));
    }
    Circuit::from_gates(n, gates)
        .expect("valid gates")
        .with_id(format!("qft{n}"))
}

/// Product-state preparation of `QFT⁻¹|x⟩` followed by the QFT, so the
/// ideal output is the single bitstring `x`.
pub fn qft_roundtrip_circuit(n: usize, x: usize) -> Circuit {
    let dim = (1u64 << n) as f64;
    let mut gates = Vec::new();
    for q in 0..n {
        gates.push(GateOp::h(q));
        let phase = -2.0 * PI * (x as f64) * f64::from(1u32 << q.min(31)) / dim;
        gates.push(GateOp::rz(q, crate::circuit::matrix::wrap_angle(phase)));
    }
    let prep = Circuit::from_gates(n, gates).expect("valid gates");
    let mut layers: Vec<Layer> = prep.into_layers();
    layers.extend(qft_circuit(n).into_layers());
    Circuit::new(format!("qft{n}_x{x}"), n, layers).expect("valid layers")
}

/// A seeded QAOA instance and its parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct QaoaInstance {
    pub circuit: Circuit,
    pub edges: Vec<(usize, usize)>,
    pub gammas: Vec<f64>,
    pub betas: Vec<f64>,
}

/// QAOA on a random `GNP(n, 2 ln n / n)` graph: Hadamards, then per
/// repetition a cost layer `exp(-iγ Z_a Z_b)` per edge and an `RX(2β)` mixer.
/// `γ` and `β` are uniform in `[0, π)`.
pub fn qaoa_instance(n: usize, seed: u64, reps: usize) -> Result<QaoaInstance> {
    if n < 2 {
        return Err(Error::InvalidArgument("QAOA needs at least two qubits".into()));
    }
    let mut rng = rng_from_seed(seed);
    let p = (2.0 * (n as f64).ln() / n as f64).min(1.0);
    let mut edges = Vec::new();
    for a in 0..n {
        for b in a + 1..n {
            if rng.gen::<f64>() < p {
                edges.push((a, b));
            }
        }
    }
    let mut gates: Vec<GateOp> = (0..n).map(GateOp::h).collect();
    let (mut gammas, mut betas) = (Vec::new(), Vec::new());
    for _ in 0..reps {
        let gamma = rng.gen_range(0.0..PI);
        let beta = rng.gen_range(0.0..PI);
        for &(a, b) in &edges {
            gates.push(GateOp::cx(a, b));
            gates.push(GateOp::rz(b, 2.0 * gamma));
            gates.push(GateOp::cx(a, b));
        }
        for q in 0..n {
            gates.push(GateOp::u3(q, 2.0 * beta, -PI / 2.0, PI / 2.0));
        }
        gammas.push(gamma);
        betas.push(beta);
    }
    let circuit = Circuit::from_gates(n, gates)?.with_id(format!("qaoa{n}_s{seed}"));
    Ok(QaoaInstance {
        circuit,
        edges,
        gammas,
        betas,
    })
}

pub fn qaoa_circuit(n: usize, seed: u64, reps: usize) -> Result<Circuit> {
    qaoa_instance(n, seed, reps).map(|i| i.circuit)
}

/// Haar-random single-qubit gate as `U3`.
fn random_u3(q: usize, rng: &mut crate::rng::Rng) -> GateOp {
    let u: f64 = rng.gen();
    let theta = 2.0 * u.sqrt().asin();
    GateOp::u3(q, theta, rng.gen_range(-PI..PI), rng.gen_range(-PI..PI))
}

/// Alternating layers of random `U3` on every qubit and a staggered brick of
/// nearest-neighbour `CZ`s; exactly `depth` layers (possibly empty ones).
pub fn brickwork_u3_cz(n: usize, depth: usize, seed: u64) -> Circuit {
    let mut rng = rng_from_seed(seed);
    let mut layers = Vec::with_capacity(depth);
    for l in 0..depth {
        if l % 2 == 0 {
            layers.push(Layer::new((0..n).map(|q| random_u3(q, &mut rng)).collect()));
        } else {
            let offset = (l / 2) % 2;
            layers.push(Layer::new(
                (offset..n.saturating_sub(1))
                    .step_by(2)
                    .map(|q| GateOp::cz(q, q + 1))
                    .collect(),
            ));
        }
    }
    Circuit::new(format!("brick{n}x{depth}_s{seed}"), n, layers).expect("disjoint bricks")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::matrix::{distance_up_to_phase, DenseMatrix, C64};
    use crate::circuit::{unitary_of, GateKind};
    use crate::sim::ideal_distribution;

    #[test]
    fn qft_matches_dft() {
        assert_eq!(qft_circuit(1).gates().copied().collect::<Vec<_>>(), vec![GateOp::h(0)]);
        for n in 1..=4 {
            let d = 1usize << n;
            let dft = DenseMatrix::from_fn(d, d, |j, k| {
                C64::from_polar(1.0 / (d as f64).sqrt(), 2.0 * PI * (j * k) as f64 / d as f64)
            });
            let u = unitary_of(&qft_circuit(n)).unwrap();
            assert!(distance_up_to_phase(&u, &dft) < 1e-12, "n = {n}");
        }
        let c = qft_circuit(3);
        assert_eq!(c.count_kind(GateKind::H), 3);
        assert_eq!(c.count_kind(GateKind::CP), 3);
        assert_eq!(c.count_kind(GateKind::SWAP), 1);
    }

    #[test]
    fn roundtrip_outputs_x() {
        for (n, x) in [(3, 5), (5, 19), (6, 0)] {
            let c = qft_roundtrip_circuit(n, x);
            let d = ideal_distribution(&c).unwrap();
            let key = crate::sim::bitstring(x, n);
            assert!((d.get(&key) - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn qaoa_is_seeded_with_angles_in_range() {
        let a = qaoa_instance(6, 3, 1).unwrap();
        assert_eq!(a, qaoa_instance(6, 3, 1).unwrap());
        assert!(a.gammas.iter().chain(&a.betas).all(|t| (0.0..PI).contains(t)));
        assert!(qaoa_instance(1, 0, 1).is_err());
    }

    #[test]
    fn brickwork_shape() {
        let c = brickwork_u3_cz(2, 2, 1);
        assert_eq!(c.depth(), 2);
        assert!(c.layers()[0].ops().iter().all(|g| g.kind() == GateKind::U3));
        assert_eq!(c.layers()[1].ops(), &[GateOp::cz(0, 1)]);
        assert_eq!(brickwork_u3_cz(2, 4, 1).depth(), 4);
        assert_eq!(brickwork_u3_cz(5, 7, 9), brickwork_u3_cz(5, 7, 9));
        for g in brickwork_u3_cz(7, 16, 2).gates().filter(|g| g.arity() == 2) {
            assert_eq!(g.qubits()[1], g.qubits()[0] + 1);
        }
    }
}
