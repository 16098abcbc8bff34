#![allow(dead_code)]

use std::f64::consts::PI;

use mirrorbench::analysis::{analyze, AnalysisConfig, FidelityRecord};
use mirrorbench::bench::{build_low_level, simulate_proxies};
use mirrorbench::mirror::SamplingParams;
use mirrorbench::rng::Rng;
use mirrorbench::sim::NoiseModel;
use mirrorbench::transpile::decompose_to_basis;
use mirrorbench::{Circuit, GateOp, Layer};
use rand::seq::SliceRandom;
use rand::Rng as _;

/// Random layered circuit over `X, SX, RZ, CZ, U3` with no empty layers.
pub fn random_native(n: usize, depth: usize, rng: &mut Rng) -> Circuit {
    let mut layers = Vec::with_capacity(depth);
    for _ in 0..depth {
        let mut qs: Vec<usize> = (0..n).collect();
        qs.shuffle(rng);
        let mut ops = Vec::new();
        let mut i = 0;
        while i < n {
            let roll: u8 = rng.gen_range(0..6);
            if roll == 0 && i + 1 < n {
                ops.push(GateOp::cz(qs[i], qs[i + 1]));
                i += 2;
                continue;
            }
            let q = qs[i];
            match roll {
                1 => ops.push(GateOp::x(q)),
                2 => ops.push(GateOp::sx(q)),
                3 => ops.push(GateOp::rz(q, rng.gen_range(-PI..PI))),
                4 => ops.push(GateOp::u3(
                    q,
                    rng.gen_range(0.0..PI),
                    rng.gen_range(-PI..PI),
                    rng.gen_range(-PI..PI),
                )),
                _ => {}
            }
            i += 1;
        }
        if ops.is_empty() {
            ops.push(GateOp::sx(qs[0]));
        }
        layers.push(Layer::new(ops));
    }
    Circuit::new("rand", n, layers).expect("disjoint gates")
}

/// Native form of a high-level circuit, keeping its id.
pub fn native(c: &Circuit) -> Circuit {
    decompose_to_basis(c).expect("decomposes").with_id(c.id.clone())
}

/// Generate, simulate and analyze a low-level suite for one circuit.
pub fn estimate(c: &Circuit, nm: &NoiseModel, per_kind: usize, shots: u64, seed: u64) -> FidelityRecord {
    let suite = build_low_level(std::slice::from_ref(c), SamplingParams::uniform(per_kind, seed), shots)
        .expect("suite");
    let (manifest, proxies) = suite.collect().expect("proxies");
    let tables = simulate_proxies(&proxies, nm, shots, seed).expect("shots");
    let cfg = AnalysisConfig {
        seed,
        ..AnalysisConfig::default()
    };
    let mut a = analyze(&manifest, &tables, &cfg).expect("analysis");
    a.records.remove(0)
}
