use rand::seq::index::sample;
use rand::Rng as _;
use serde::{Deserialize, Serialize};

use crate::circuit::matrix::{DenseMatrix, C64, I, ZERO};
use crate::circuit::Pauli;
use crate::error::{Error, Result};
use crate::rng::rng_from_seed;

/// `H = offset · I + Σ_j c_j P_j`. Pauli strings put qubit 0 first; term
/// order is the product order used by Trotterization.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawHamiltonian", into = "RawHamiltonian")]
pub struct PauliSumHamiltonian {
    n: usize,
    terms: Vec<(f64, Vec<Pauli>)>,
    offset: f64,
}

#[derive(Serialize, Deserialize)]
struct RawHamiltonian {
    n: usize,
    terms: Vec<(f64, String)>,
    #[serde(default, skip_serializing_if = "is_zero")]
    offset: f64,
}

fn is_zero(x: &f64) -> bool {
    *x == 0.0
}

impl TryFrom<RawHamiltonian> for PauliSumHamiltonian {
    type Error = Error;

    fn try_from(r: RawHamiltonian) -> Result<Self> {
        let mut h = PauliSumHamiltonian::new(r.n);
        h.offset = r.offset;
        for (c, s) in r.terms {
            h.push_str(c, &s)?;
        }
        Ok(h)
    }
}

impl From<PauliSumHamiltonian> for RawHamiltonian {
    fn from(h: PauliSumHamiltonian) -> Self {
        RawHamiltonian {
            n: h.n,
            terms: h
                .terms
                .iter()
                .map(|(c, p)| (*c, p.iter().map(|x| x.as_char()).collect()))
                .collect(),
            offset: h.offset,
        }
    }
}

impl PauliSumHamiltonian {
    pub fn new(n: usize) -> Self {
        PauliSumHamiltonian {
            n,
            terms: Vec::new(),
            offset: 0.0,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn terms(&self) -> &[(f64, Vec<Pauli>)] {
        &self.terms
    }

    pub fn offset(&self) -> f64 {
        self.offset
    }

    pub fn push(&mut self, coeff: f64, paulis: Vec<Pauli>) -> Result<()> {
        if paulis.len() != self.n {
            return Err(Error::InvalidArgument(format!(
                "Pauli string of length {} for {} qubits",
                paulis.len(),
                self.n
            )));
        }
        if !coeff.is_finite() {
            return Err(Error::InvalidArgument("non-finite coefficient".into()));
        }
        if paulis.iter().all(|&p| p == Pauli::I) {
            self.offset += coeff;
        } else {
            self.terms.push((coeff, paulis));
        }
        Ok(())
    }

    pub fn push_str(&mut self, coeff: f64, s: &str) -> Result<()> {
        let paulis = s
            .chars()
            .map(|c| {
                Pauli::from_char(c)
                    .ok_or_else(|| Error::InvalidArgument(format!("bad Pauli character {c:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        self.push(coeff, paulis)
    }

    /// Add `coeff · ∏ P_q` given as sparse `(qubit, Pauli)` factors.
    fn push_sparse(&mut self, coeff: f64, factors: &[(usize, Pauli)]) {
        let mut p = vec![Pauli::I; self.n];
        for &(q, x) in factors {
            p[q] = x;
        }
        self.push(coeff, p).expect("valid term");
    }

    /// True when every pair of terms commutes.
    pub fn is_commuting(&self) -> bool {
        self.terms.iter().enumerate().all(|(i, (_, a))| {
            self.terms[i + 1..].iter().all(|(_, b)| {
                let anti = a
                    .iter()
                    .zip(b)
                    .filter(|(x, y)| **x != Pauli::I && **y != Pauli::I && x != y)
                    .count();
                anti % 2 == 0
            })
        })
    }

    /// Dense `2^n × 2^n` matrix including the offset.
    pub fn dense(&self) -> DenseMatrix {
        let d = 1usize << self.n;
        let mut h = DenseMatrix::from_element(d, d, ZERO);
        for i in 0..d {
            h[(i, i)] += C64::new(self.offset, 0.0);
        }
        for (c, p) in &self.terms {
            for x in 0..d {
                let (y, phase) = apply_string(p, x);
                h[(y, x)] += phase * *c;
            }
        }
        h
    }
}

/// `P|x⟩ = phase · |y⟩`.
fn apply_string(p: &[Pauli], x: usize) -> (usize, C64) {
    let mut y = x;
    let mut phase = C64::new(1.0, 0.0);
    for (q, &s) in p.iter().enumerate() {
        let bit = x >> q & 1;
        match s {
            Pauli::I => {}
            Pauli::X => y ^= 1 << q,
            Pauli::Y => {
                y ^= 1 << q;
                phase *= if bit == 0 { I } else { -I };
            }
            Pauli::Z => {
                if bit == 1 {
                    phase = -phase;
                }
            }
        }
    }
    (y, phase)
}

fn ring_bonds(n: usize) -> impl Iterator<Item = (usize, usize)> {
    (0..n).map(move |i| (i, (i + 1) % n))
}

/// Periodic 1D transverse-field Ising model: `Σ Z_i Z_{i+1}` over the ring,
/// then the fields `Σ 2 X_i`.
pub fn tfim(n: usize) -> Result<PauliSumHamiltonian> {
    if n < 3 {
        return Err(Error::InvalidArgument("periodic TFIM needs n >= 3".into()));
    }
    let mut h = PauliSumHamiltonian::new(n);
    for (a, b) in ring_bonds(n) {
        h.push_sparse(1.0, &[(a, Pauli::Z), (b, Pauli::Z)]);
    }
    for q in 0..n {
        h.push_sparse(2.0, &[(q, Pauli::X)]);
    }
    Ok(h)
}

/// Periodic 1D Heisenberg model: `XX + YY + ZZ` per bond, then `Σ 2 Z_i`.
pub fn heisenberg(n: usize) -> Result<PauliSumHamiltonian> {
    if n < 3 {
        return Err(Error::InvalidArgument("periodic Heisenberg needs n >= 3".into()));
    }
    let mut h = PauliSumHamiltonian::new(n);
    for (a, b) in ring_bonds(n) {
        for p in [Pauli::X, Pauli::Y, Pauli::Z] {
            h.push_sparse(1.0, &[(a, p), (b, p)]);
        }
    }
    for q in 0..n {
        h.push_sparse(2.0, &[(q, Pauli::Z)]);
    }
    Ok(h)
}

/// Random Max3SAT instance with `r·n` clauses over distinct variable
/// triples. Clause `(¬)^{s_i} x_i ∨ (¬)^{s_j} x_j ∨ (¬)^{s_k} x_k` contributes
/// `I − ⅛ ∏ (I + (−1)^s Z)`; the identity parts go to the offset.
pub fn max3sat(n: usize, r: usize, seed: u64) -> Result<PauliSumHamiltonian> {
    if n < 3 {
        return Err(Error::InvalidArgument("Max3SAT needs n >= 3".into()));
    }
    let mut rng = rng_from_seed(seed);
    let mut h = PauliSumHamiltonian::new(n);
    for _ in 0..r * n {
        let vars = sample(&mut rng, n, 3).into_vec();
        let signs: Vec<f64> = (0..3)
            .map(|_| if rng.gen::<bool>() { -1.0 } else { 1.0 })
            .collect();
        h.offset += 1.0 - 1.0 / 8.0;
        for mask in 1u8..8 {
            let mut coeff = -1.0 / 8.0;
            let mut factors = Vec::new();
            for k in 0..3 {
                if mask >> k & 1 == 1 {
                    coeff *= signs[k];
                    factors.push((vars[k], Pauli::Z));
                }
            }
            h.push_sparse(coeff, &factors);
        }
    }
    Ok(h)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::matrix::{kron2, mat4_to_dense, pauli_x, pauli_y, pauli_z};

    fn op_on(n: usize, factors: &[(usize, crate::circuit::matrix::Mat2)]) -> DenseMatrix {
        // Kronecker product with qubit 0 as the least significant factor.
        let mut m = DenseMatrix::identity(1, 1);
        for q in (0..n).rev() {
            let f = factors
                .iter()
                .find(|(i, _)| *i == q)
                .map(|(_, m)| crate::circuit::matrix::mat2_to_dense(m))
                .unwrap_or_else(|| DenseMatrix::identity(2, 2));
            m = m.kronecker(&f);
        }
        m
    }

    #[test]
    fn term_counts() {
        let t = tfim(3).unwrap();
        assert_eq!(t.terms().iter().filter(|(c, _)| *c == 1.0).count(), 3);
        assert_eq!(t.terms().iter().filter(|(c, _)| *c == 2.0).count(), 3);
        assert_eq!(heisenberg(4).unwrap().terms().len(), 16);
        let s = max3sat(4, 2, 0).unwrap();
        assert_eq!(s.terms().len(), 8 * 7);
        assert!((s.offset() - 8.0 * 7.0 / 8.0).abs() < 1e-15);
        assert!(s
            .terms()
            .iter()
            .all(|(_, p)| p.iter().all(|x| matches!(x, Pauli::I | Pauli::Z))));
        assert!(s.is_commuting());
        assert!(!heisenberg(3).unwrap().is_commuting());
    }

    #[test]
    fn dense_matches_direct_construction() {
        let n = 3;
        let mut tf = DenseMatrix::from_element(8, 8, ZERO);
        let mut he = DenseMatrix::from_element(8, 8, ZERO);
        for i in 0..n {
            let j = (i + 1) % n;
            tf += op_on(n, &[(i, pauli_z()), (j, pauli_z())]) + op_on(n, &[(i, pauli_x())]) * C64::new(2.0, 0.0);
            for p in [pauli_x(), pauli_y(), pauli_z()] {
                he += op_on(n, &[(i, p), (j, p)]);
            }
            he += op_on(n, &[(i, pauli_z())]) * C64::new(2.0, 0.0);
        }
        assert!((tfim(3).unwrap().dense() - tf).norm() < 1e-12);
        assert!((heisenberg(3).unwrap().dense() - he).norm() < 1e-12);
        let h = heisenberg(3).unwrap().dense();
        assert!((h.adjoint() - &h).norm() < 1e-12);
        // Two-qubit sanity check of the ordering convention.
        let mut xy = PauliSumHamiltonian::new(2);
        xy.push_str(1.0, "XY").unwrap();
        assert!((xy.dense() - mat4_to_dense(&kron2(&pauli_y(), &pauli_x()))).norm() < 1e-12);
    }

    #[test]
    fn clause_terms_are_projector_complements() {
        // Each clause is I minus a projector of rank 2^(n-3), so over all
        // basis states the missing weight is clauses · 2^(n-3).
        let h = max3sat(4, 1, 4).unwrap().dense();
        let mut missing = 0.0;
        for i in 0..16 {
            let v = h[(i, i)].re;
            assert!((v - v.round()).abs() < 1e-12 && (0.0..=4.0).contains(&v.round()));
            missing += 4.0 - v;
            for j in 0..16 {
                if i != j {
                    assert!(h[(i, j)].norm() < 1e-15);
                }
            }
        }
        assert!((missing - 8.0).abs() < 1e-12);
    }

    #[test]
    fn json_format() {
        let h: PauliSumHamiltonian =
            serde_json::from_str(r#"{"n":2,"terms":[[0.5,"XZ"],[1.0,"II"]]}"#).unwrap();
        assert_eq!(h.terms().len(), 1);
        assert_eq!(h.offset(), 1.0);
        assert!(serde_json::from_str::<PauliSumHamiltonian>(r#"{"n":2,"terms":[[1,"X"]]}"#).is_err());
    }
}
