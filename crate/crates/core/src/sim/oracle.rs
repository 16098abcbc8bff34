//! Exact process fidelity.
//!
//! For a target unitary `V` on `d = 2^n` dimensions and a channel `Λ`,
//! `F = ⟨Φ_V|(Λ⊗I)(|Φ⟩⟨Φ|)|Φ_V⟩ = d⁻² Σ_ij v_i† Λ(|i⟩⟨j|) v_j`, where `v_i` is
//! column `i` of `V`. This equals the Pauli transfer-matrix overlap
//! `Tr(R_Vᵀ R_Λ)/4^n`. Each `(i, j)` block is evolved independently, which
//! keeps memory at `O(4^n)` and parallelizes across blocks.

use rayon::prelude::*;

use crate::circuit::matrix::{DenseMatrix, C64, ZERO};
use crate::circuit::{unitary_of, Circuit};
use crate::error::{Error, Result};

use super::density::DensityMatrix;
use super::noise::{noisy_program, NoiseModel, NoisyOp};

pub const ORACLE_LIMIT: usize = 6;

/// Process fidelity between the ideal unitary of `c` and its noisy
/// implementation under `nm` (readout excluded).
pub fn exact_process_fidelity(c: &Circuit, nm: &NoiseModel) -> Result<f64> {
    check_limit(c.n(), ORACLE_LIMIT)?;
    let u = unitary_of(c)?;
    process_fidelity_to_target(c, nm, &u)
}

/// Process fidelity between an arbitrary target unitary and the noisy
/// implementation of `c`.
pub fn process_fidelity_to_target(c: &Circuit, nm: &NoiseModel, target: &DenseMatrix) -> Result<f64> {
    process_fidelity_to_target_with_limit(c, nm, target, ORACLE_LIMIT)
}

pub fn process_fidelity_to_target_with_limit(
    c: &Circuit,
    nm: &NoiseModel,
    target: &DenseMatrix,
    limit: usize,
) -> Result<f64> {
    check_limit(c.n(), limit)?;
    nm.validate()?;
    let d = 1usize << c.n();
    if target.nrows() != d || target.ncols() != d {
        return Err(Error::DimensionMismatch(target.nrows(), d));
    }
    if nm.is_coherent_only() {
        // Unitary channel: the overlap reduces to a trace.
        let w = noisy_unitary(c, nm);
        return process_fidelity_unitaries(target, &w);
    }
    let prog = noisy_program(c, nm);
    let cols: Vec<&[C64]> = target.as_slice().chunks(d).collect();
    let pairs: Vec<(usize, usize)> = (0..d).flat_map(|i| (i..d).map(move |j| (i, j))).collect();
    let total: f64 = pairs
        .par_iter()
        .map(|&(i, j)| {
            let term = block_term(d, &prog, cols[i], cols[j], i, j);
            // Λ(|j⟩⟨i|) = Λ(|i⟩⟨j|)†, so the (j, i) term is the conjugate.
            if i == j {
                term.re
            } else {
                2.0 * term.re
            }
        })
        .sum();
    Ok((total / (d * d) as f64).clamp(0.0, 1.0))
}

fn block_term(d: usize, prog: &[NoisyOp], vi: &[C64], vj: &[C64], i: usize, j: usize) -> C64 {
    let mut x = DensityMatrix::basis_operator(d.trailing_zeros() as usize, i, j);
    x.run(prog);
    let mut acc = ZERO;
    for (c, b) in vj.iter().enumerate() {
        if *b == ZERO {
            continue;
        }
        let mut s = ZERO;
        for (r, a) in vi.iter().enumerate() {
            s += a.conj() * x.entry(r, c);
        }
        acc += s * b;
    }
    acc
}

/// Dense unitary of the coherent-error-only implementation of `c`.
pub fn noisy_unitary(c: &Circuit, nm: &NoiseModel) -> DenseMatrix {
    use crate::circuit::unitary::{apply_1q, apply_gate};
    let prog = noisy_program(c, nm);
    let d = 1usize << c.n();
    let mut w = DenseMatrix::identity(d, d);
    for col in w.as_mut_slice().chunks_mut(d) {
        for op in &prog {
            match op {
                NoisyOp::Gate(g) => apply_gate(col, g),
                NoisyOp::Unitary(q, u) => apply_1q(col, *q, u),
                NoisyOp::Depolarize1(..) | NoisyOp::Depolarize2(..) => {}
            }
        }
    }
    w
}

/// `|Tr(U†V)|² / d²`.
pub fn process_fidelity_unitaries(u: &DenseMatrix, v: &DenseMatrix) -> Result<f64> {
    if u.shape() != v.shape() || u.nrows() != u.ncols() {
        return Err(Error::DimensionMismatch(u.nrows(), v.nrows()));
    }
    let d = u.nrows() as f64;
    let tr: C64 = u
        .as_slice()
        .iter()
        .zip(v.as_slice())
        .map(|(a, b)| a.conj() * b)
        .sum();
    Ok(tr.norm_sqr() / (d * d))
}

fn check_limit(n: usize, limit: usize) -> Result<()> {
    if n > limit {
        return Err(Error::Capacity {
            what: "process-fidelity oracle",
            n,
            limit,
        });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::matrix::{cz, mat2_to_dense, mat4_to_dense, rz};
    use crate::circuit::{GateKind, GateOp};

    #[test]
    fn unitary_closed_forms() {
        let id4 = DenseMatrix::identity(4, 4);
        let f = process_fidelity_unitaries(&id4, &mat4_to_dense(&cz())).unwrap();
        assert!((f - 0.25).abs() < 1e-12);
        let id2 = DenseMatrix::identity(2, 2);
        for t in [0.1, 1.0, 2.5] {
            let f = process_fidelity_unitaries(&id2, &mat2_to_dense(&rz(t))).unwrap();
            assert!((f - (t / 2.0).cos().powi(2)).abs() < 1e-12);
        }
        assert!(process_fidelity_unitaries(&id2, &id4).is_err());
    }

    #[test]
    fn depolarized_cz() {
        let c = Circuit::from_gates(2, [GateOp::cz(0, 1)]).unwrap();
        let f = exact_process_fidelity(&c, &NoiseModel::depolarizing(0.0, 0.005)).unwrap();
        assert!((f - 0.9953125).abs() < 1e-12, "{f}");
    }

    #[test]
    fn readout_is_excluded() {
        let c = Circuit::from_gates(3, [GateOp::h(0), GateOp::cx(0, 2), GateOp::sx(1)]).unwrap();
        let f = exact_process_fidelity(&c, &NoiseModel::readout(0.01)).unwrap();
        assert!((f - 1.0).abs() < 1e-12);
    }

    #[test]
    fn over_rotation_on_one_x() {
        let c = Circuit::from_gates(1, [GateOp::x(0)]).unwrap();
        let mut nm = NoiseModel::noiseless();
        nm.theta_over.insert(GateKind::X, 0.3);
        let f = exact_process_fidelity(&c, &nm).unwrap();
        assert!((f - (0.15f64).cos().powi(2)).abs() < 1e-12);
    }

    #[test]
    fn capacity() {
        let r = exact_process_fidelity(&Circuit::empty(7), &NoiseModel::noiseless());
        assert!(matches!(r, Err(Error::Capacity { .. })));
    }
}
