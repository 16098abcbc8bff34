use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::circuit::matrix::{self, Mat2};
use crate::circuit::{Circuit, GateKind, GateOp};
use crate::error::{Error, Result};

/// Error parameters of the simulated device.
///
/// Depolarizing noise follows each gate on the gate's own qubits:
/// `ρ ↦ (1-λ)ρ + λ · I/2^k ⊗ Tr_k(ρ)`. Coherent over-rotations follow the gate
/// as `exp(-iθG/2)` about the gate's generator axis (X for `X`/`SX`, Z for
/// `RZ`). Every qubit untouched by a layer receives `RZ(θ_idle)`. Readout
/// flips each measured bit independently.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NoiseModel {
    #[serde(default)]
    pub lambda_1q: f64,
    #[serde(default)]
    pub lambda_2q: f64,
    #[serde(default)]
    pub theta_over: BTreeMap<GateKind, f64>,
    #[serde(default)]
    pub theta_idle: f64,
    #[serde(default)]
    pub epsilon_ro: f64,
}

impl NoiseModel {
    pub fn noiseless() -> Self {
        Self::default()
    }

    pub fn depolarizing(lambda_1q: f64, lambda_2q: f64) -> Self {
        NoiseModel {
            lambda_1q,
            lambda_2q,
            ..Self::default()
        }
    }

    pub fn readout(epsilon: f64) -> Self {
        NoiseModel {
            epsilon_ro: epsilon,
            ..Self::default()
        }
    }

    pub fn idle(theta: f64) -> Self {
        NoiseModel {
            theta_idle: theta,
            ..Self::default()
        }
    }

    /// Gate depolarizing (0.0005 / 0.005), readout 0.01 and idle Z 0.005 rad.
    pub fn combined() -> Self {
        NoiseModel {
            lambda_1q: 0.0005,
            lambda_2q: 0.005,
            theta_idle: 0.005,
            epsilon_ro: 0.01,
            ..Self::default()
        }
    }

    /// Gate depolarizing, 0.01 rad over-rotation on `X`/`SX`, 0.01 readout.
    pub fn over_rotation_model() -> Self {
        NoiseModel {
            lambda_1q: 0.0005,
            lambda_2q: 0.005,
            theta_over: BTreeMap::from([(GateKind::X, 0.01), (GateKind::SX, 0.01)]),
            theta_idle: 0.0,
            epsilon_ro: 0.01,
        }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, l) in [("lambda_1q", self.lambda_1q), ("lambda_2q", self.lambda_2q)] {
            if !(0.0..=1.0).contains(&l) {
                return Err(Error::InvalidArgument(format!("{name} = {l} outside [0, 1]")));
            }
        }
        if !(0.0..=0.5).contains(&self.epsilon_ro) {
            return Err(Error::InvalidArgument(format!(
                "epsilon_ro = {} outside [0, 0.5]",
                self.epsilon_ro
            )));
        }
        if !self.theta_idle.is_finite() {
            return Err(Error::InvalidArgument("theta_idle is not finite".into()));
        }
        for (k, t) in &self.theta_over {
            if !t.is_finite() {
                return Err(Error::InvalidArgument(format!("theta_over[{k}] is not finite")));
            }
            if over_rotation_axis(*k).is_none() {
                return Err(Error::InvalidArgument(format!(
                    "over-rotation is defined for X, SX and RZ only, not {k}"
                )));
            }
        }
        Ok(())
    }

    /// True when the gate channel is unitary (no stochastic gate errors).
    pub fn is_coherent_only(&self) -> bool {
        self.lambda_1q == 0.0 && self.lambda_2q == 0.0
    }

    pub fn has_gate_errors(&self) -> bool {
        !self.is_coherent_only()
            || self.theta_idle != 0.0
            || self.theta_over.values().any(|&t| t != 0.0)
    }
}

#[derive(Clone, Copy)]
enum Axis {
    X,
    Z,
}

fn over_rotation_axis(kind: GateKind) -> Option<Axis> {
    match kind {
        GateKind::X | GateKind::SX => Some(Axis::X),
        GateKind::RZ => Some(Axis::Z),
        _ => None,
    }
}

/// One step of a noisy execution.
#[derive(Debug, Clone)]
pub(crate) enum NoisyOp {
    Gate(GateOp),
    Unitary(usize, Mat2),
    Depolarize1(usize, f64),
    Depolarize2(usize, usize, f64),
}

/// Flatten a circuit and a noise model into the channel sequence both
/// simulators execute. Readout is not part of it.
pub(crate) fn noisy_program(c: &Circuit, nm: &NoiseModel) -> Vec<NoisyOp> {
    let mut prog = Vec::with_capacity(c.gate_count() * 2);
    let mut busy = vec![false; c.n()];
    let idle_gate = (nm.theta_idle != 0.0).then(|| matrix::rz(nm.theta_idle));
    for layer in c.layers() {
        busy.iter_mut().for_each(|b| *b = false);
        for g in layer.ops() {
            prog.push(NoisyOp::Gate(*g));
            let qs = g.qubits();
            for &q in qs {
                busy[q] = true;
            }
            if let Some(&t) = nm.theta_over.get(&g.kind()) {
                if t != 0.0 {
                    let m = match over_rotation_axis(g.kind()) {
                        Some(Axis::X) => matrix::rx(t),
                        Some(Axis::Z) => matrix::rz(t),
                        None => continue,
                    };
                    prog.push(NoisyOp::Unitary(qs[0], m));
                }
            }
            match qs {
                [q] if nm.lambda_1q > 0.0 => prog.push(NoisyOp::Depolarize1(*q, nm.lambda_1q)),
                [a, b] if nm.lambda_2q > 0.0 => {
                    prog.push(NoisyOp::Depolarize2(*a, *b, nm.lambda_2q))
                }
                _ => {}
            }
        }
        if let Some(m) = idle_gate {
            for (q, &b) in busy.iter().enumerate() {
                if !b {
                    prog.push(NoisyOp::Unitary(q, m));
                }
            }
        }
    }
    prog
}
