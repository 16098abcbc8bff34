//! Mirror proxy circuits with randomized compilation.
//!
//! Every proxy starts with a layer `F` of uniformly random single-qubit
//! Cliffords and ends with `F⁻¹`. In a randomized half, a Pauli frame `f`
//! tracks the difference between the emitted and the ideal circuit: each
//! single-qubit layer absorbs `f` and a fresh uniform Pauli `r` into its
//! gates (`r · g · f`), and two-qubit Clifford layers conjugate `f`. The
//! residual frame, pushed through `F⁻¹`, is a Pauli `P′` whose bit-flip
//! pattern is the ideal outcome.

use rand::Rng as _;
use serde::{Deserialize, Serialize};

use crate::circuit::unitary::merge_1q;
use crate::circuit::{Circuit, Clifford1Q, GateOp, Layer, Pauli, PauliFrame};
use crate::error::{Error, Result};
use crate::rng::{derive_seed, rng_from_seed, Rng};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum MirrorKind {
    M1,
    M2,
    M3,
}

impl MirrorKind {
    pub const ALL: [MirrorKind; 3] = [MirrorKind::M1, MirrorKind::M2, MirrorKind::M3];

    pub fn as_str(self) -> &'static str {
        match self {
            MirrorKind::M1 => "M1",
            MirrorKind::M2 => "M2",
            MirrorKind::M3 => "M3",
        }
    }
}

impl std::fmt::Display for MirrorKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for MirrorKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "M1" | "m1" => Ok(MirrorKind::M1),
            "M2" | "m2" => Ok(MirrorKind::M2),
            "M3" | "m3" => Ok(MirrorKind::M3),
            _ => Err(Error::InvalidArgument(format!("unknown mirror kind {s:?}"))),
        }
    }
}

/// A proxy circuit whose noiseless outcome is `target` with certainty.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MirrorCircuit {
    pub circuit: Circuit,
    pub kind: MirrorKind,
    pub parent_id: String,
    pub target: String,
    pub seed: u64,
}

/// Number of proxies per kind and the master seed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SamplingParams {
    pub m1: usize,
    pub m2: usize,
    pub m3: usize,
    pub seed: u64,
}

impl SamplingParams {
    pub fn new(m1: usize, m2: usize, m3: usize, seed: u64) -> Result<Self> {
        let p = SamplingParams { m1, m2, m3, seed };
        p.validate()?;
        Ok(p)
    }

    pub fn uniform(m: usize, seed: u64) -> Self {
        SamplingParams {
            m1: m,
            m2: m,
            m3: m,
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.m1 == 0 || self.m2 == 0 || self.m3 == 0 {
            return Err(Error::InvalidArgument(
                "each mirror kind needs at least one circuit".into(),
            ));
        }
        Ok(())
    }

    pub fn count(&self, kind: MirrorKind) -> usize {
        match kind {
            MirrorKind::M1 => self.m1,
            MirrorKind::M2 => self.m2,
            MirrorKind::M3 => self.m3,
        }
    }

    pub fn total(&self) -> usize {
        self.m1 + self.m2 + self.m3
    }
}

fn random_clifford_layer(n: usize, rng: &mut Rng) -> Vec<Clifford1Q> {
    (0..n).map(|_| Clifford1Q::new(rng.gen_range(0..24))).collect()
}

fn random_pauli(rng: &mut Rng) -> Pauli {
    Pauli::from_index(rng.gen_range(0..4))
}

fn clifford_layer(cs: &[Clifford1Q]) -> Layer {
    Layer::new(
        cs.iter()
            .enumerate()
            .map(|(q, c)| GateOp::c1q(q, c.index()))
            .collect(),
    )
}

/// Append a randomized-compiled copy of `layers` to `out`, updating `f`.
fn randomize_into(
    layers: impl IntoIterator<Item = Layer>,
    n: usize,
    f: &mut PauliFrame,
    rng: &mut Rng,
    out: &mut Vec<Layer>,
) -> Result<()> {
    let mut single: Vec<Option<GateOp>> = vec![None; n];
    let mut on_2q = vec![false; n];
    for layer in layers {
        if layer.ops().iter().all(|g| g.arity() == 2) {
            crate::circuit::propagate_in_place(f, &layer)?;
            out.push(layer);
            continue;
        }
        single.iter_mut().for_each(|s| *s = None);
        on_2q.iter_mut().for_each(|b| *b = false);
        let mut ops = Vec::with_capacity(n);
        let mut twoq = Vec::new();
        for g in layer.into_ops() {
            if g.arity() == 1 {
                single[g.qubits()[0]] = Some(g);
            } else {
                on_2q[g.qubits()[0]] = true;
                on_2q[g.qubits()[1]] = true;
                twoq.push(g);
            }
        }
        if !twoq.is_empty() {
            crate::circuit::propagate_in_place(f, &Layer::new(twoq.clone()))?;
        }
        for q in 0..n {
            if on_2q[q] {
                continue;
            }
            let r = random_pauli(rng);
            let g = single[q].unwrap_or_else(|| GateOp::rz(q, 0.0));
            ops.push(merge_1q(f.get(q), &g, r));
            f.set(q, r);
        }
        ops.extend(twoq);
        out.push(Layer::new(ops));
    }
    Ok(())
}

fn close(
    kind: MirrorKind,
    parent_id: &str,
    n: usize,
    prefix: &[Clifford1Q],
    mut layers: Vec<Layer>,
    mut f: PauliFrame,
    seed: u64,
) -> MirrorCircuit {
    let inv: Vec<Clifford1Q> = prefix.iter().map(|c| c.inverse()).collect();
    for (q, c) in inv.iter().enumerate() {
        f.conjugate_1q(q, *c);
    }
    layers.push(clifford_layer(&inv));
    let target = f.flip_string();
    let circuit = Circuit::from_layers_unchecked(String::new(), n, layers);
    MirrorCircuit {
        circuit,
        kind,
        parent_id: parent_id.to_string(),
        target,
        seed,
    }
}

pub(crate) fn check_native(c: &Circuit) -> Result<()> {
    c.require_native()?;
    if let Some(g) = c.gates().find(|g| g.arity() == 2 && !g.kind().is_clifford()) {
        return Err(Error::NonClifford {
            kind: g.kind().to_string(),
        });
    }
    Ok(())
}

/// `F ∥ c ∥ RC(c⁻¹) ∥ F⁻¹`.
pub fn make_m1(c: &Circuit, rng: &mut Rng) -> Result<MirrorCircuit> {
    check_native(c)?;
    let n = c.n();
    let prefix = random_clifford_layer(n, rng);
    let mut layers = Vec::with_capacity(2 * c.depth() + 2);
    layers.push(clifford_layer(&prefix));
    layers.extend(c.layers().iter().cloned());
    let mut f = PauliFrame::identity(n);
    randomize_into(c.layers().iter().rev().map(Layer::inverse), n, &mut f, rng, &mut layers)?;
    Ok(close(MirrorKind::M1, &c.id, n, &prefix, layers, f, 0))
}

/// `F ∥ RC(c) ∥ RC(c⁻¹) ∥ F⁻¹`.
pub fn make_m2(c: &Circuit, rng: &mut Rng) -> Result<MirrorCircuit> {
    check_native(c)?;
    let n = c.n();
    let prefix = random_clifford_layer(n, rng);
    let mut layers = Vec::with_capacity(2 * c.depth() + 2);
    layers.push(clifford_layer(&prefix));
    let mut f = PauliFrame::identity(n);
    randomize_into(c.layers().iter().cloned(), n, &mut f, rng, &mut layers)?;
    randomize_into(c.layers().iter().rev().map(Layer::inverse), n, &mut f, rng, &mut layers)?;
    Ok(close(MirrorKind::M2, &c.id, n, &prefix, layers, f, 0))
}

/// `F ∥ P ∥ F⁻¹` with a uniformly random Pauli layer `P`.
pub fn make_m3(n: usize, rng: &mut Rng) -> MirrorCircuit {
    make_m3_for(n, "", rng)
}

fn make_m3_for(n: usize, parent_id: &str, rng: &mut Rng) -> MirrorCircuit {
    let prefix = random_clifford_layer(n, rng);
    let paulis: Vec<Pauli> = (0..n).map(|_| random_pauli(rng)).collect();
    let layers = vec![
        clifford_layer(&prefix),
        Layer::new(
            paulis
                .iter()
                .enumerate()
                .map(|(q, p)| GateOp::c1q(q, *p as u8))
                .collect(),
        ),
    ];
    let f = PauliFrame::from_labels(paulis);
    close(MirrorKind::M3, parent_id, n, &prefix, layers, f, 0)
}

/// Seed of proxy `index` of `kind` for a parent circuit.
pub fn proxy_seed(master: u64, parent_id: &str, kind: MirrorKind, index: usize) -> u64 {
    derive_seed(master, &format!("{parent_id}/{kind}/{index}"))
}

/// Identifier of proxy `index` of `kind`.
pub fn proxy_id(parent_id: &str, kind: MirrorKind, index: usize) -> String {
    format!("{parent_id}.{kind}.{index}")
}

/// Generate one proxy from its derived seed.
pub fn make_proxy(c: &Circuit, kind: MirrorKind, index: usize, master: u64) -> Result<MirrorCircuit> {
    let seed = proxy_seed(master, &c.id, kind, index);
    let mut rng = rng_from_seed(seed);
    let mut m = match kind {
        MirrorKind::M1 => make_m1(c, &mut rng)?,
        MirrorKind::M2 => make_m2(c, &mut rng)?,
        MirrorKind::M3 => make_m3_for(c.n(), &c.id, &mut rng),
    };
    m.seed = seed;
    m.circuit.id = proxy_id(&c.id, kind, index);
    Ok(m)
}

/// `(kind, index)` pairs of a suite in emission order.
pub fn suite_slots(params: &SamplingParams) -> Vec<(MirrorKind, usize)> {
    MirrorKind::ALL
        .iter()
        .flat_map(|&k| (0..params.count(k)).map(move |i| (k, i)))
        .collect()
}

/// Lazily generated suite; proxies are independent of iteration order.
pub fn suite_iter<'a>(
    c: &'a Circuit,
    params: SamplingParams,
) -> impl Iterator<Item = Result<MirrorCircuit>> + 'a {
    suite_slots(&params)
        .into_iter()
        .map(move |(k, i)| make_proxy(c, k, i, params.seed))
}

/// All `|M1| + |M2| + |M3|` proxies of `c`.
pub fn build_suite(c: &Circuit, params: SamplingParams) -> Result<Vec<MirrorCircuit>> {
    params.validate()?;
    check_native(c)?;
    suite_iter(c, params).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sim::ideal_distribution;

    fn sample_parent() -> Circuit {
        Circuit::from_gates(
            3,
            [
                GateOp::sx(0),
                GateOp::rz(1, 0.3),
                GateOp::x(2),
                GateOp::cz(0, 1),
                GateOp::u3(2, 0.4, 0.1, -0.2),
                GateOp::rz(0, 1.1),
                GateOp::cz(1, 2),
                GateOp::sx(1),
            ],
        )
        .unwrap()
        .with_id("p")
    }

    fn assert_hits_target(m: &MirrorCircuit) {
        let d = ideal_distribution(&m.circuit).unwrap();
        assert!((d.get(&m.target) - 1.0).abs() < 1e-9, "{:?}", m.kind);
    }

    #[test]
    fn empty_parent_m1() {
        let mut rng = rng_from_seed(1);
        let m = make_m1(&Circuit::empty(2), &mut rng).unwrap();
        assert_eq!(m.circuit.depth(), 2);
        assert_hits_target(&m);
    }

    #[test]
    fn all_kinds_hit_target() {
        let c = sample_parent();
        for seed in 0..20 {
            let mut rng = rng_from_seed(seed);
            assert_hits_target(&make_m1(&c, &mut rng).unwrap());
            assert_hits_target(&make_m2(&c, &mut rng).unwrap());
            assert_hits_target(&make_m3(4, &mut rng));
        }
    }

    #[test]
    fn depths() {
        let c = sample_parent();
        let mut rng = rng_from_seed(2);
        let d = c.depth();
        assert_eq!(make_m1(&c, &mut rng).unwrap().circuit.depth(), 2 * d + 2);
        assert_eq!(make_m2(&c, &mut rng).unwrap().circuit.depth(), 2 * d + 2);
        assert_eq!(make_m3(5, &mut rng).circuit.depth(), 3);
    }

    #[test]
    fn non_native_parent_is_rejected() {
        let c = Circuit::from_gates(2, [GateOp::h(0)]).unwrap();
        let mut rng = rng_from_seed(0);
        assert!(matches!(make_m1(&c, &mut rng), Err(Error::NotNative { .. })));
    }

    #[test]
    fn suite_shape_and_determinism() {
        let c = sample_parent();
        let p = SamplingParams::uniform(10, 42);
        let a = build_suite(&c, p).unwrap();
        assert_eq!(a.len(), 30);
        for k in MirrorKind::ALL {
            assert_eq!(a.iter().filter(|m| m.kind == k).count(), 10);
        }
        assert!(a.iter().all(|m| m.target.len() == 3));
        assert_eq!(a, build_suite(&c, p).unwrap());
        assert!(SamplingParams::new(1, 0, 1, 0).is_err());
    }
}
