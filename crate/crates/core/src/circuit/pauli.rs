use std::fmt;

use serde::{Deserialize, Serialize};

use super::circuit::Layer;
use super::clifford::{conjugate_2q, Clifford1Q};
use crate::error::{Error, Result};

/// Single-qubit Pauli label.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[repr(u8)]
pub enum Pauli {
    I = 0,
    X = 1,
    Y = 2,
    Z = 3,
}

impl Pauli {
    pub const ALL: [Pauli; 4] = [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z];

    pub fn from_index(i: u8) -> Self {
        Pauli::ALL[(i & 3) as usize]
    }

    fn bits(self) -> (bool, bool) {
        match self {
            Pauli::I => (false, false),
            Pauli::X => (true, false),
            Pauli::Y => (true, true),
            Pauli::Z => (false, true),
        }
    }

    fn from_bits(x: bool, z: bool) -> Self {
        match (x, z) {
            (false, false) => Pauli::I,
            (true, false) => Pauli::X,
            (true, true) => Pauli::Y,
            (false, true) => Pauli::Z,
        }
    }

    /// Whether this Pauli flips a computational-basis measurement.
    pub fn flips_bit(self) -> bool {
        self.bits().0
    }

    /// `self · other = i^k · result`, returned as `(k mod 4, result)`.
    pub fn mul(self, other: Pauli) -> (u8, Pauli) {
        let (x1, z1) = self.bits();
        let (x2, z2) = other.bits();
        let result = Pauli::from_bits(x1 ^ x2, z1 ^ z2);
        let k = match (self, other) {
            (Pauli::X, Pauli::Y) | (Pauli::Y, Pauli::Z) | (Pauli::Z, Pauli::X) => 1,
            (Pauli::Y, Pauli::X) | (Pauli::Z, Pauli::Y) | (Pauli::X, Pauli::Z) => 3,
            _ => 0,
        };
        (k, result)
    }

    pub fn as_char(self) -> char {
        match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }

    pub fn from_char(c: char) -> Option<Self> {
        match c {
            'I' => Some(Pauli::I),
            'X' => Some(Pauli::X),
            'Y' => Some(Pauli::Y),
            'Z' => Some(Pauli::Z),
            _ => None,
        }
    }
}

/// A signed Pauli string; phases other than ±1 are dropped since they never
/// affect measurement statistics.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct PauliFrame {
    labels: Vec<Pauli>,
    negative: bool,
}

impl PauliFrame {
    pub fn identity(n: usize) -> Self {
        PauliFrame {
            labels: vec![Pauli::I; n],
            negative: false,
        }
    }

    pub fn from_labels(labels: Vec<Pauli>) -> Self {
        PauliFrame {
            labels,
            negative: false,
        }
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[Pauli] {
        &self.labels
    }

    pub fn get(&self, q: usize) -> Pauli {
        self.labels[q]
    }

    pub fn set(&mut self, q: usize, p: Pauli) {
        self.labels[q] = p;
    }

    pub fn is_negative(&self) -> bool {
        self.negative
    }

    pub fn is_identity(&self) -> bool {
        self.labels.iter().all(|&p| p == Pauli::I)
    }

    /// Product `self · other`, keeping only the real part of the phase.
    pub fn compose(&self, other: &PauliFrame) -> PauliFrame {
        assert_eq!(self.len(), other.len());
        let mut k = 0u8;
        let labels = self
            .labels
            .iter()
            .zip(&other.labels)
            .map(|(&a, &b)| {
                let (ki, p) = a.mul(b);
                k = (k + ki) % 4;
                p
            })
            .collect();
        PauliFrame {
            labels,
            negative: self.negative ^ other.negative ^ (k >= 2),
        }
    }

    /// Bitstring (qubit 0 leftmost) of the basis state `P|0…0⟩` lands on.
    pub fn flip_string(&self) -> String {
        self.labels
            .iter()
            .map(|p| if p.flips_bit() { '1' } else { '0' })
            .collect()
    }

    /// Conjugate by a single-qubit Clifford on qubit `q`.
    pub fn conjugate_1q(&mut self, q: usize, c: Clifford1Q) {
        let (neg, p) = c.conjugate(self.labels[q]);
        self.labels[q] = p;
        self.negative ^= neg;
    }
}

impl fmt::Debug for PauliFrame {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(if self.negative { "-" } else { "+" })?;
        for p in &self.labels {
            write!(f, "{}", p.as_char())?;
        }
        Ok(())
    }
}

/// Push a frame through a Clifford layer: returns `f'` with `L·f = f'·L`.
pub fn propagate_frame(f: &PauliFrame, layer: &Layer) -> Result<PauliFrame> {
    let mut out = f.clone();
    propagate_in_place(&mut out, layer)?;
    Ok(out)
}

pub(crate) fn propagate_in_place(f: &mut PauliFrame, layer: &Layer) -> Result<()> {
    for op in layer.ops() {
        if !op.kind().is_clifford() {
            return Err(Error::NonClifford {
                kind: op.kind().to_string(),
            });
        }
        let qs = op.qubits();
        if qs.len() == 1 {
            let c = Clifford1Q::from_gate(op).expect("clifford kind");
            f.conjugate_1q(qs[0], c);
        } else {
            let (neg, a, b) = conjugate_2q(op.kind(), f.labels[qs[0]], f.labels[qs[1]])
                .expect("two-qubit clifford kind");
            f.labels[qs[0]] = a;
            f.labels[qs[1]] = b;
            f.negative ^= neg;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::GateOp;

    #[test]
    fn pauli_products() {
        assert_eq!(Pauli::X.mul(Pauli::Y), (1, Pauli::Z));
        assert_eq!(Pauli::Y.mul(Pauli::X), (3, Pauli::Z));
        assert_eq!(Pauli::Z.mul(Pauli::Z), (0, Pauli::I));
    }

    #[test]
    fn frame_composition_tracks_sign() {
        // (XZ)(ZX) = (XZ)⊗(ZX) = (-iY)⊗(iY) = YY
        let a = PauliFrame::from_labels(vec![Pauli::X, Pauli::Z]);
        let b = PauliFrame::from_labels(vec![Pauli::Z, Pauli::X]);
        let c = a.compose(&b);
        assert_eq!(c.labels(), &[Pauli::Y, Pauli::Y]);
        assert!(!c.is_negative());
        // X·Y ⊗ X·Y = (iZ)(iZ) = -ZZ
        let d = PauliFrame::from_labels(vec![Pauli::X, Pauli::X])
            .compose(&PauliFrame::from_labels(vec![Pauli::Y, Pauli::Y]));
        assert!(d.is_negative());
    }

    #[test]
    fn cz_propagation_examples() {
        let layer = Layer::new(vec![GateOp::cz(0, 1)]);
        let z = PauliFrame::from_labels(vec![Pauli::Z, Pauli::I]);
        assert_eq!(propagate_frame(&z, &layer).unwrap(), z);
        let x = PauliFrame::from_labels(vec![Pauli::X, Pauli::I]);
        let out = propagate_frame(&x, &layer).unwrap();
        assert_eq!(out.labels(), &[Pauli::X, Pauli::Z]);
        let id = PauliFrame::identity(2);
        assert_eq!(propagate_frame(&id, &layer).unwrap(), id);
    }

    #[test]
    fn non_clifford_layer_is_rejected() {
        let layer = Layer::new(vec![GateOp::rz(0, 0.1)]);
        assert!(matches!(
            propagate_frame(&PauliFrame::identity(1), &layer),
            Err(Error::NonClifford { .. })
        ));
    }
}
