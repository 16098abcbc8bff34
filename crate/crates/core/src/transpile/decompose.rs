use std::f64::consts::{FRAC_PI_2, PI};

use crate::circuit::matrix::{self, wrap_angle, Mat2};
use crate::circuit::{Circuit, CircuitBuilder, GateKind, GateOp};
use crate::error::Result;

const ANGLE_EPS: f64 = 1e-10;

fn is_zero_angle(a: f64) -> bool {
    wrap_angle(a).abs() < 1e-12
}

fn push_rz(out: &mut Vec<GateOp>, q: usize, a: f64) {
    if !is_zero_angle(a) {
        out.push(GateOp::rz(q, wrap_angle(a)));
    }
}

/// Native `RZ`/`SX`/`X` sequence (time order) equal to `m` up to phase.
pub fn zsx_sequence(q: usize, m: &Mat2) -> Vec<GateOp> {
    let (theta, phi, lambda) = matrix::u3_angles(m);
    let mut out = Vec::with_capacity(5);
    if theta.abs() < ANGLE_EPS {
        push_rz(&mut out, q, phi + lambda);
    } else if (theta - FRAC_PI_2).abs() < ANGLE_EPS {
        push_rz(&mut out, q, lambda - FRAC_PI_2);
        out.push(GateOp::sx(q));
        push_rz(&mut out, q, phi + FRAC_PI_2);
    } else if (theta.abs() - PI).abs() < ANGLE_EPS {
        push_rz(&mut out, q, lambda - FRAC_PI_2);
        out.push(GateOp::x(q));
        push_rz(&mut out, q, phi + FRAC_PI_2);
    } else {
        push_rz(&mut out, q, lambda);
        out.push(GateOp::sx(q));
        push_rz(&mut out, q, theta + PI);
        out.push(GateOp::sx(q));
        push_rz(&mut out, q, phi + PI);
    }
    out
}

/// Expand one gate into single-qubit gates and `CZ`s (time order).
fn expand(g: &GateOp, out: &mut Vec<GateOp>) {
    let q = g.qubits();
    match g.kind() {
        GateKind::CX => {
            out.push(GateOp::h(q[1]));
            out.push(GateOp::cz(q[0], q[1]));
            out.push(GateOp::h(q[1]));
        }
        GateKind::CP => {
            let t = g.params()[0];
            out.push(GateOp::rz(q[0], t / 2.0));
            out.push(GateOp::rz(q[1], t / 2.0));
            expand(&GateOp::cx(q[0], q[1]), out);
            out.push(GateOp::rz(q[1], -t / 2.0));
            expand(&GateOp::cx(q[0], q[1]), out);
        }
        GateKind::SWAP => {
            expand(&GateOp::cx(q[0], q[1]), out);
            expand(&GateOp::cx(q[1], q[0]), out);
            expand(&GateOp::cx(q[0], q[1]), out);
        }
        _ => out.push(*g),
    }
}

/// Rewrite into `{X, SX, RZ, CZ}`. Runs of single-qubit gates are merged
/// and re-emitted in `RZ·SX·RZ·SX·RZ` form (shorter where the angles allow).
pub fn decompose_to_basis(c: &Circuit) -> Result<Circuit> {
    let mut flat = Vec::with_capacity(c.gate_count() * 2);
    for g in c.gates() {
        expand(g, &mut flat);
    }
    merge_runs(c.n(), flat).map(|out| out.with_id(c.id.clone()))
}

/// Merge maximal single-qubit runs in a time-ordered native gate list.
fn merge_runs(n: usize, gates: Vec<GateOp>) -> Result<Circuit> {
    let mut pending: Vec<Option<Mat2>> = vec![None; n];
    let mut b = CircuitBuilder::new(n);
    let flush = |b: &mut CircuitBuilder, pending: &mut Vec<Option<Mat2>>, q: usize| -> Result<()> {
        if let Some(m) = pending[q].take() {
            for g in zsx_sequence(q, &m) {
                b.push(g)?;
            }
        }
        Ok(())
    };
    for g in gates {
        if g.arity() == 1 {
            let q = g.qubits()[0];
            let m = matrix::matrix_1q(&g);
            pending[q] = Some(match pending[q] {
                Some(p) => m * p,
                None => m,
            });
        } else {
            for &q in g.qubits() {
                flush(&mut b, &mut pending, q)?;
            }
            b.push(g)?;
        }
    }
    for q in 0..n {
        flush(&mut b, &mut pending, q)?;
    }
    Ok(b.finish())
}
