//! Dense gate matrices and single-qubit Euler decompositions.
//!
//! Basis ordering is little-endian: qubit `i` is bit `i` of a basis index. For
//! two-qubit gates the local index is `b0 + 2*b1` where `b0` is the bit of
//! `qubits()[0]`.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use nalgebra::{DMatrix, Matrix2, Matrix4};
use num_complex::Complex64;

use super::clifford::Clifford1Q;
use super::gate::{GateKind, GateOp};

pub type C64 = Complex64;
pub type Mat2 = Matrix2<C64>;
pub type Mat4 = Matrix4<C64>;
pub type DenseMatrix = DMatrix<C64>;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const I: C64 = C64::new(0.0, 1.0);

pub fn cis(theta: f64) -> C64 {
    C64::from_polar(1.0, theta)
}

pub fn identity2() -> Mat2 {
    Mat2::identity()
}

pub fn pauli_x() -> Mat2 {
    Mat2::new(ZERO, ONE, ONE, ZERO)
}

pub fn pauli_y() -> Mat2 {
    Mat2::new(ZERO, -I, I, ZERO)
}

pub fn pauli_z() -> Mat2 {
    Mat2::new(ONE, ZERO, ZERO, -ONE)
}

pub fn hadamard() -> Mat2 {
    let h = C64::new(FRAC_1_SQRT_2, 0.0);
    Mat2::new(h, h, h, -h)
}

pub fn phase_s() -> Mat2 {
    Mat2::new(ONE, ZERO, ZERO, I)
}

pub fn sqrt_x() -> Mat2 {
    let a = C64::new(0.5, 0.5);
    let b = C64::new(0.5, -0.5);
    Mat2::new(a, b, b, a)
}

/// `exp(-i theta Z / 2)`.
pub fn rz(theta: f64) -> Mat2 {
    Mat2::new(cis(-theta / 2.0), ZERO, ZERO, cis(theta / 2.0))
}

/// `exp(-i theta X / 2)`.
pub fn rx(theta: f64) -> Mat2 {
    let c = C64::new((theta / 2.0).cos(), 0.0);
    let s = C64::new(0.0, -(theta / 2.0).sin());
    Mat2::new(c, s, s, c)
}

/// `exp(-i theta Y / 2)`.
pub fn ry(theta: f64) -> Mat2 {
    let c = C64::new((theta / 2.0).cos(), 0.0);
    let s = C64::new((theta / 2.0).sin(), 0.0);
    Mat2::new(c, -s, s, c)
}

/// The usual Euler parameterization
/// `[[cos(t/2), -e^{il} sin(t/2)], [e^{ip} sin(t/2), e^{i(p+l)} cos(t/2)]]`.
pub fn u3(theta: f64, phi: f64, lambda: f64) -> Mat2 {
    let c = (theta / 2.0).cos();
    let s = (theta / 2.0).sin();
    Mat2::new(
        C64::new(c, 0.0),
        -cis(lambda) * s,
        cis(phi) * s,
        cis(phi + lambda) * c,
    )
}

pub fn cz() -> Mat4 {
    Mat4::from_diagonal(&nalgebra::Vector4::new(ONE, ONE, ONE, -ONE))
}

pub fn cp(theta: f64) -> Mat4 {
    Mat4::from_diagonal(&nalgebra::Vector4::new(ONE, ONE, ONE, cis(theta)))
}

/// Controlled-X with control on local bit 0, target on local bit 1.
pub fn cx() -> Mat4 {
    let mut m = Mat4::zeros();
    m[(0, 0)] = ONE;
    m[(3, 1)] = ONE;
    m[(2, 2)] = ONE;
    m[(1, 3)] = ONE;
    m
}

pub fn swap() -> Mat4 {
    let mut m = Mat4::zeros();
    m[(0, 0)] = ONE;
    m[(2, 1)] = ONE;
    m[(1, 2)] = ONE;
    m[(3, 3)] = ONE;
    m
}

/// Kronecker product `a ⊗ b` where `b` acts on local bit 0 and `a` on bit 1.
pub fn kron2(a: &Mat2, b: &Mat2) -> Mat4 {
    let mut m = Mat4::zeros();
    for i1 in 0..2 {
        for j1 in 0..2 {
            for i0 in 0..2 {
                for j0 in 0..2 {
                    m[(i0 + 2 * i1, j0 + 2 * j1)] = a[(i1, j1)] * b[(i0, j0)];
                }
            }
        }
    }
    m
}

/// Matrix of a single-qubit gate.
pub fn matrix_1q(g: &GateOp) -> Mat2 {
    let p = g.params();
    match g.kind() {
        GateKind::X => pauli_x(),
        GateKind::SX => sqrt_x(),
        GateKind::H => hadamard(),
        GateKind::RZ => rz(p[0]),
        GateKind::U3 => u3(p[0], p[1], p[2]),
        GateKind::C1Q => Clifford1Q::new(g.clifford_index().unwrap()).matrix(),
        k => panic!("{k} is not a single-qubit gate"),
    }
}

/// Matrix of a two-qubit gate in the local ordering of `g.qubits()`.
pub fn matrix_2q(g: &GateOp) -> Mat4 {
    match g.kind() {
        GateKind::CZ => cz(),
        GateKind::CX => cx(),
        GateKind::SWAP => swap(),
        GateKind::CP => cp(g.params()[0]),
        k => panic!("{k} is not a two-qubit gate"),
    }
}

/// Map an angle into `(-pi, pi]`.
pub fn wrap_angle(a: f64) -> f64 {
    let mut r = a.rem_euclid(2.0 * PI);
    if r > PI {
        r -= 2.0 * PI;
    }
    r
}

/// Euler angles `(theta, phi, lambda)` with `u3(theta, phi, lambda)` equal to
/// `m` up to global phase.
///
/// Works through the `RZ(phi) RY(theta) RZ(lambda)` form of the special
/// unitary obtained by dividing out `sqrt(det m)`.
pub fn u3_angles(m: &Mat2) -> (f64, f64, f64) {
    let det = m[(0, 0)] * m[(1, 1)] - m[(0, 1)] * m[(1, 0)];
    let scale = det.sqrt();
    let a = m[(0, 0)] / scale;
    let b = m[(1, 0)] / scale;
    let theta = 2.0 * b.norm().atan2(a.norm());
    // RZ(phi) RY(theta) RZ(lambda) has a = e^{-i(phi+lambda)/2} cos,
    // b = e^{i(phi-lambda)/2} sin.
    let sum = if a.norm() > 1e-12 { -2.0 * a.arg() } else { 0.0 };
    let diff = if b.norm() > 1e-12 { 2.0 * b.arg() } else { 0.0 };
    let phi = (sum + diff) / 2.0;
    let lambda = (sum - diff) / 2.0;
    (wrap_angle(theta), wrap_angle(phi), wrap_angle(lambda))
}

/// `|Tr(a^dagger b)| / dim`, which is 1 exactly when `a` and `b` agree up to phase.
pub fn phase_insensitive_overlap(a: &DenseMatrix, b: &DenseMatrix) -> f64 {
    assert_eq!(a.shape(), b.shape());
    let mut tr = ZERO;
    for (x, y) in a.iter().zip(b.iter()) {
        tr += x.conj() * y;
    }
    tr.norm() / a.nrows() as f64
}

/// Smallest `max |a - e^{i phi} b|` over the phase aligning the largest entry.
pub fn distance_up_to_phase(a: &DenseMatrix, b: &DenseMatrix) -> f64 {
    assert_eq!(a.shape(), b.shape());
    let mut tr = ZERO;
    for (x, y) in a.iter().zip(b.iter()) {
        tr += y.conj() * x;
    }
    let phase = if tr.norm() > 0.0 { tr / tr.norm() } else { ONE };
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - phase * y).norm())
        .fold(0.0, f64::max)
}

pub fn mat2_to_dense(m: &Mat2) -> DenseMatrix {
    DenseMatrix::from_fn(2, 2, |i, j| m[(i, j)])
}

pub fn mat4_to_dense(m: &Mat4) -> DenseMatrix {
    DenseMatrix::from_fn(4, 4, |i, j| m[(i, j)])
}
