use serde::{Deserialize, Serialize};

use crate::circuit::matrix::{DenseMatrix, C64};
use crate::circuit::{inverse_gate, unitary_of_with_limit, Circuit, GateOp, Pauli};
use crate::error::{Error, Result};
use crate::sim::process_fidelity_unitaries;

use super::hamiltonian::PauliSumHamiltonian;

pub const ALGORITHMIC_LIMIT: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrotterSpec {
    pub order: u8,
    pub steps: usize,
    pub time: f64,
}

impl TrotterSpec {
    pub fn new(order: u8, steps: usize, time: f64) -> Result<Self> {
        let s = TrotterSpec { order, steps, time };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        if !matches!(self.order, 1 | 2) {
            return Err(Error::InvalidArgument(format!(
                "Trotter order must be 1 or 2, got {}",
                self.order
            )));
        }
        if self.steps == 0 {
            return Err(Error::InvalidArgument("Trotter steps must be >= 1".into()));
        }
        if !self.time.is_finite() {
            return Err(Error::InvalidArgument("Trotter time is not finite".into()));
        }
        Ok(())
    }
}

/// Gates (time order) for `exp(-iθP)`: basis change to Z, `CX` parity
/// ladder, `RZ(2θ)`, and the reverse.
pub fn pauli_exponential(paulis: &[Pauli], theta: f64) -> Vec<GateOp> {
    let support: Vec<usize> = (0..paulis.len()).filter(|&q| paulis[q] != Pauli::I).collect();
    let Some(&last) = support.last() else {
        return Vec::new();
    };
    let mut pre = Vec::new();
    for &q in &support {
        match paulis[q] {
            Pauli::X => pre.push(GateOp::h(q)),
            // SX† Z SX = Y
            Pauli::Y => pre.push(GateOp::sx(q)),
            _ => {}
        }
    }
    let ladder: Vec<GateOp> = support.windows(2).map(|w| GateOp::cx(w[0], w[1])).collect();
    let mut out = pre.clone();
    out.extend(ladder.iter().copied());
    out.push(GateOp::rz(last, 2.0 * theta));
    out.extend(ladder.iter().rev().copied());
    out.extend(pre.iter().rev().map(inverse_gate));
    out
}

/// Product-formula circuit for `exp(-iHt)`; the offset is a global phase
/// and is dropped.
pub fn trotter_circuit(h: &PauliSumHamiltonian, spec: TrotterSpec) -> Result<Circuit> {
    spec.validate()?;
    let dt = spec.time / spec.steps as f64;
    let mut gates = Vec::new();
    for _ in 0..spec.steps {
        match spec.order {
            1 => {
                for (c, p) in h.terms() {
                    gates.extend(pauli_exponential(p, c * dt));
                }
            }
            _ => {
                for (c, p) in h.terms() {
                    gates.extend(pauli_exponential(p, c * dt / 2.0));
                }
                for (c, p) in h.terms().iter().rev() {
                    gates.extend(pauli_exponential(p, c * dt / 2.0));
                }
            }
        }
    }
    Ok(Circuit::from_gates(h.n(), gates)?.with_id(format!(
        "trotter_o{}_m{}",
        spec.order, spec.steps
    )))
}

/// `exp(-iHt)` from the Hermitian eigendecomposition of the dense `H`.
pub fn exact_evolution(h: &PauliSumHamiltonian, t: f64) -> Result<DenseMatrix> {
    if h.n() > ALGORITHMIC_LIMIT {
        return Err(Error::Capacity {
            what: "exact evolution",
            n: h.n(),
            limit: ALGORITHMIC_LIMIT,
        });
    }
    let eig = h.dense().symmetric_eigen();
    let phases = eig
        .eigenvalues
        .map(|e| C64::from_polar(1.0, -e * t));
    let v = &eig.eigenvectors;
    Ok(v * DenseMatrix::from_diagonal(&phases) * v.adjoint())
}

/// `|Tr(U†Ũ)|²/4^n` between `exp(-iHt)` and the Trotter circuit's unitary.
pub fn algorithmic_process_fidelity(h: &PauliSumHamiltonian, spec: TrotterSpec) -> Result<f64> {
    let u = exact_evolution(h, spec.time)?;
    let c = trotter_circuit(h, spec)?;
    let ut = unitary_of_with_limit(&c, ALGORITHMIC_LIMIT)?;
    process_fidelity_unitaries(&u, &ut)
}

/// Product of algorithmic and noise process fidelities.
pub fn full_process_fidelity(f_alg: f64, f_noise: f64) -> Result<f64> {
    for (name, f) in [("algorithmic", f_alg), ("noise", f_noise)] {
        if !(0.0..=1.0).contains(&f) {
            return Err(Error::InvalidArgument(format!("{name} fidelity {f} outside [0, 1]")));
        }
    }
    Ok(f_alg * f_noise)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algo::{heisenberg, max3sat};
    use crate::circuit::matrix::distance_up_to_phase;
    use crate::circuit::unitary_of;

    fn dense_exp(paulis: &[Pauli], theta: f64) -> DenseMatrix {
        let mut h = PauliSumHamiltonian::new(paulis.len());
        h.push(theta, paulis.to_vec()).unwrap();
        exact_evolution(&h, 1.0).unwrap()
    }

    #[test]
    fn gadgets_match_dense_exponentials() {
        use Pauli::*;
        for (p, t) in [
            (vec![Z, Z], 0.37),
            (vec![X, I, Y], -0.8),
            (vec![Y, Z, X, Y], 1.3),
            (vec![I, Y], 0.2),
        ] {
            let c = Circuit::from_gates(p.len(), pauli_exponential(&p, t)).unwrap();
            let d = distance_up_to_phase(&unitary_of(&c).unwrap(), &dense_exp(&p, t));
            assert!(d < 1e-9, "{p:?}: {d}");
        }
    }

    #[test]
    fn single_term_is_exact() {
        let mut h = PauliSumHamiltonian::new(3);
        h.push_str(0.7, "XYZ").unwrap();
        for m in [1, 3] {
            let f = algorithmic_process_fidelity(&h, TrotterSpec::new(1, m, 1.0).unwrap()).unwrap();
            assert!((f - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn commuting_hamiltonian_is_exact() {
        let h = max3sat(5, 2, 2).unwrap();
        for order in [1, 2] {
            let f = algorithmic_process_fidelity(&h, TrotterSpec::new(order, 2, 1.0).unwrap()).unwrap();
            assert!((f - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn more_steps_and_higher_order_help() {
        let h = heisenberg(4).unwrap();
        let f = |o, m| algorithmic_process_fidelity(&h, TrotterSpec::new(o, m, 1.0).unwrap()).unwrap();
        assert!(f(1, 8) > f(1, 1));
        assert!(f(2, 3) > f(1, 3));
    }

    #[test]
    fn product_rule() {
        assert_eq!(full_process_fidelity(1.0, 0.3).unwrap(), 0.3);
        assert!((full_process_fidelity(0.98, 0.90).unwrap() - 0.882).abs() < 1e-15);
        assert!(full_process_fidelity(1.1, 0.5).is_err());
        assert!(TrotterSpec::new(3, 1, 1.0).is_err());
    }
}
