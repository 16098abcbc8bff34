//! Density-matrix evolution.
//!
//! `ρ` on `m` qubits is stored vectorized with index `row | (col << m)`, so
//! `ρ ↦ UρU†` is `U` on qubit `q` plus `conj(U)` on qubit `q + m` of a
//! `2m`-qubit vector and the state-vector kernels apply unchanged.

use crate::circuit::matrix::{Mat2, C64, ONE, ZERO};
use crate::circuit::unitary::{apply_1q, apply_2q, apply_controlled_phase, apply_diag_1q};
use crate::circuit::{matrix, GateKind, GateOp};

use super::noise::NoisyOp;

#[derive(Debug, Clone)]
pub struct DensityMatrix {
    m: usize,
    data: Vec<C64>,
}

impl DensityMatrix {
    /// `|0…0⟩⟨0…0|` on `m` qubits.
    pub fn zero_state(m: usize) -> Self {
        let mut data = vec![ZERO; 1 << (2 * m)];
        data[0] = ONE;
        DensityMatrix { m, data }
    }

    /// The operator `|i⟩⟨j|`; not a state unless `i == j`.
    pub fn basis_operator(m: usize, i: usize, j: usize) -> Self {
        let mut data = vec![ZERO; 1 << (2 * m)];
        data[i | (j << m)] = ONE;
        DensityMatrix { m, data }
    }

    /// `|ψ⟩⟨ψ|` for a state vector of length `2^m`.
    pub fn from_pure(psi: &[C64]) -> Self {
        let dim = psi.len();
        let m = dim.trailing_zeros() as usize;
        assert_eq!(1 << m, dim, "state length must be a power of two");
        let mut data = vec![ZERO; dim * dim];
        for (c, pc) in psi.iter().enumerate() {
            let pcc = pc.conj();
            for (r, pr) in psi.iter().enumerate() {
                data[r | (c << m)] = pr * pcc;
            }
        }
        DensityMatrix { m, data }
    }

    pub fn num_qubits(&self) -> usize {
        self.m
    }

    pub fn dim(&self) -> usize {
        1 << self.m
    }

    pub fn entry(&self, row: usize, col: usize) -> C64 {
        self.data[row | (col << self.m)]
    }

    pub fn trace(&self) -> C64 {
        (0..self.dim()).map(|i| self.entry(i, i)).sum()
    }

    /// Diagonal in the computational basis.
    pub fn probabilities(&self) -> Vec<f64> {
        (0..self.dim()).map(|i| self.entry(i, i).re).collect()
    }

    /// `⟨ψ|ρ|ψ⟩`.
    pub fn expectation_pure(&self, psi: &[C64]) -> f64 {
        let dim = self.dim();
        assert_eq!(psi.len(), dim);
        let mut acc = ZERO;
        for (c, pc) in psi.iter().enumerate() {
            if *pc == ZERO {
                continue;
            }
            let col = &self.data[c << self.m..(c << self.m) + dim];
            let mut row_acc = ZERO;
            for (pr, rho) in psi.iter().zip(col) {
                row_acc += pr.conj() * rho;
            }
            acc += row_acc * pc;
        }
        acc.re
    }

    pub fn apply_unitary_1q(&mut self, q: usize, u: &Mat2) {
        apply_1q(&mut self.data, q, u);
        apply_1q(&mut self.data, q + self.m, &u.map(|z| z.conj()));
    }

    pub fn apply_gate(&mut self, g: &GateOp) {
        let q = g.qubits();
        let m = self.m;
        match g.kind() {
            GateKind::RZ => {
                let t = g.params()[0];
                let (a, b) = (matrix::cis(-t / 2.0), matrix::cis(t / 2.0));
                apply_diag_1q(&mut self.data, q[0], a, b);
                apply_diag_1q(&mut self.data, q[0] + m, a.conj(), b.conj());
            }
            GateKind::CZ => {
                apply_controlled_phase(&mut self.data, q[0], q[1], -ONE);
                apply_controlled_phase(&mut self.data, q[0] + m, q[1] + m, -ONE);
            }
            GateKind::CP => {
                let ph = matrix::cis(g.params()[0]);
                apply_controlled_phase(&mut self.data, q[0], q[1], ph);
                apply_controlled_phase(&mut self.data, q[0] + m, q[1] + m, ph.conj());
            }
            _ if g.arity() == 1 => self.apply_unitary_1q(q[0], &matrix::matrix_1q(g)),
            _ => {
                let u = matrix::matrix_2q(g);
                apply_2q(&mut self.data, q[0], q[1], &u);
                apply_2q(&mut self.data, q[0] + m, q[1] + m, &u.map(|z| z.conj()));
            }
        }
    }

    /// Single-qubit depolarizing channel.
    pub fn depolarize_1q(&mut self, q: usize, lambda: f64) {
        let rb = 1usize << q;
        let cb = 1usize << (q + self.m);
        let keep = 1.0 - lambda;
        for i in 0..self.data.len() {
            if i & (rb | cb) != 0 {
                continue;
            }
            let (i00, i11) = (i, i | rb | cb);
            let t = (self.data[i00] + self.data[i11]) * 0.5;
            self.data[i00] = self.data[i00] * keep + t * lambda;
            self.data[i11] = self.data[i11] * keep + t * lambda;
            self.data[i | rb] *= keep;
            self.data[i | cb] *= keep;
        }
    }

    /// Two-qubit depolarizing channel on `a`, `b`.
    pub fn depolarize_2q(&mut self, a: usize, b: usize, lambda: f64) {
        let m = self.m;
        let rbits = [1usize << a, 1usize << b];
        let cbits = [1usize << (a + m), 1usize << (b + m)];
        let mask = rbits[0] | rbits[1] | cbits[0] | cbits[1];
        let keep = 1.0 - lambda;
        let local = |bits: [usize; 2], k: usize| (k & 1) * bits[0] + ((k >> 1) & 1) * bits[1];
        for i in 0..self.data.len() {
            if i & mask != 0 {
                continue;
            }
            let mut diag_sum = ZERO;
            for k in 0..4 {
                diag_sum += self.data[i | local(rbits, k) | local(cbits, k)];
            }
            let t = diag_sum * 0.25;
            for r in 0..4 {
                for c in 0..4 {
                    let idx = i | local(rbits, r) | local(cbits, c);
                    self.data[idx] *= keep;
                    if r == c {
                        self.data[idx] += t * lambda;
                    }
                }
            }
        }
    }

    pub(crate) fn run(&mut self, prog: &[NoisyOp]) {
        for op in prog {
            match op {
                NoisyOp::Gate(g) => self.apply_gate(g),
                NoisyOp::Unitary(q, u) => self.apply_unitary_1q(*q, u),
                NoisyOp::Depolarize1(q, l) => self.depolarize_1q(*q, *l),
                NoisyOp::Depolarize2(a, b, l) => self.depolarize_2q(*a, *b, *l),
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn full_depolarizing_gives_maximally_mixed() {
        let mut rho = DensityMatrix::zero_state(2);
        rho.apply_gate(&GateOp::h(0));
        rho.depolarize_2q(0, 1, 1.0);
        for r in 0..4 {
            for c in 0..4 {
                let expect = if r == c { 0.25 } else { 0.0 };
                assert!((rho.entry(r, c).re - expect).abs() < 1e-12);
                assert!(rho.entry(r, c).im.abs() < 1e-12);
            }
        }
    }

    #[test]
    fn single_qubit_depolarizing_shrinks_bloch_vector() {
        let mut rho = DensityMatrix::zero_state(1);
        rho.depolarize_1q(0, 0.2);
        assert!((rho.entry(0, 0).re - 0.9).abs() < 1e-12);
        assert!((rho.trace().re - 1.0).abs() < 1e-12);
    }

    #[test]
    fn pure_evolution_matches_statevector() {
        use crate::circuit::unitary::apply_gate;
        let gates = [
            GateOp::h(0),
            GateOp::cx(0, 1),
            GateOp::u3(2, 0.3, 0.2, 0.1),
            GateOp::cp(1, 2, 0.7),
            GateOp::sx(1),
            GateOp::rz(0, 0.4),
            GateOp::swap(0, 2),
        ];
        let mut psi = vec![ZERO; 8];
        psi[0] = ONE;
        let mut rho = DensityMatrix::zero_state(3);
        for g in &gates {
            apply_gate(&mut psi, g);
            rho.apply_gate(g);
        }
        let expect = DensityMatrix::from_pure(&psi);
        for (a, b) in rho.data.iter().zip(&expect.data) {
            assert!((a - b).norm() < 1e-12);
        }
    }
}
