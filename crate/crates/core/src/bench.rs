//! Benchmark suites: choose benchmarking circuits from the inputs, then
//! attach mirror proxies to each.

use std::collections::{BTreeSet, HashSet};

use rand::seq::index::sample;
use rand::Rng as _;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::circuit::{Circuit, GateOp, Layer};
use crate::error::{Error, Result};
use crate::io::{BenchmarkType, CircuitRecord, Manifest, RecordKind, SamplingRecord};
use crate::mirror::{check_native, make_proxy, suite_slots, MirrorCircuit, MirrorKind, SamplingParams};
use crate::rng::{derive_seed, rng_from_seed, Rng};
use crate::sim::{sample_shots, NoiseModel, ShotTable};
use crate::transpile::{transpile, TranspileConfig};

/// Subcircuit shapes `(w, d)` and the number of snips `K` per shape.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ShapeSpec {
    pub shapes: Vec<(usize, usize)>,
    pub samples_per_shape: usize,
}

impl ShapeSpec {
    pub fn new(shapes: Vec<(usize, usize)>, samples_per_shape: usize) -> Result<Self> {
        let s = ShapeSpec {
            shapes,
            samples_per_shape,
        };
        s.validate()?;
        Ok(s)
    }

    /// Cartesian product of widths and depths, widths outermost.
    pub fn grid(widths: &[usize], depths: &[usize], samples_per_shape: usize) -> Result<Self> {
        let shapes = widths
            .iter()
            .flat_map(|&w| depths.iter().map(move |&d| (w, d)))
            .collect();
        Self::new(shapes, samples_per_shape)
    }

    pub fn validate(&self) -> Result<()> {
        if self.samples_per_shape == 0 {
            return Err(Error::InvalidArgument("samples_per_shape must be >= 1".into()));
        }
        if self.shapes.is_empty() {
            return Err(Error::InvalidArgument("no shapes given".into()));
        }
        Ok(())
    }

    pub fn check_fits(&self, c: &Circuit) -> Result<()> {
        for &(w, d) in &self.shapes {
            check_shape(c, w, d)?;
        }
        Ok(())
    }
}

fn check_shape(c: &Circuit, w: usize, d: usize) -> Result<()> {
    if w == 0 || d == 0 || w > c.n() || d > c.depth() {
        return Err(Error::ImpossibleShape {
            w,
            d,
            width: c.n(),
            depth: c.depth(),
        });
    }
    Ok(())
}

/// A benchmarking circuit and its manifest record.
#[derive(Debug, Clone, PartialEq)]
pub struct Benchmark {
    pub circuit: Circuit,
    pub record: CircuitRecord,
}

/// Benchmarking circuits with everything needed to generate their proxies.
#[derive(Debug, Clone, PartialEq)]
pub struct Suite {
    pub benchmark_type: BenchmarkType,
    pub params: SamplingParams,
    pub shots: u64,
    /// Input circuits when they differ from the benchmarks.
    pub inputs: Vec<Circuit>,
    pub benchmarks: Vec<Benchmark>,
}

impl Suite {
    pub fn proxy_count(&self) -> usize {
        self.benchmarks.len() * self.params.total()
    }

    /// Manifest records for the inputs and benchmarks, without proxies.
    pub fn base_manifest(&self) -> Manifest {
        let mut m = Manifest::new(
            self.benchmark_type,
            SamplingRecord {
                m1: self.params.m1,
                m2: self.params.m2,
                m3: self.params.m3,
                shots: self.shots,
                seed: self.params.seed,
            },
        );
        for c in &self.inputs {
            m.records
                .push(CircuitRecord::new(c.id.clone(), RecordKind::Input, c.n(), c.depth()));
        }
        m.records
            .extend(self.benchmarks.iter().map(|b| b.record.clone()));
        m
    }

    /// Proxies in manifest order, generated on demand.
    pub fn proxies(&self) -> impl Iterator<Item = Result<MirrorCircuit>> + '_ {
        let slots = suite_slots(&self.params);
        self.benchmarks.iter().flat_map(move |b| {
            slots
                .clone()
                .into_iter()
                .map(move |(k, i)| make_proxy(&b.circuit, k, i, self.params.seed))
        })
    }

    /// Generate every proxy, in parallel chunks of `chunk` proxies, handing
    /// each to `sink` in manifest order. Returns the full manifest.
    pub fn generate(
        &self,
        chunk: usize,
        mut sink: impl FnMut(&MirrorCircuit) -> Result<()>,
    ) -> Result<Manifest> {
        let mut manifest = self.base_manifest();
        let slots = suite_slots(&self.params);
        let jobs: Vec<(&Benchmark, MirrorKind, usize)> = self
            .benchmarks
            .iter()
            .flat_map(|b| slots.iter().map(move |&(k, i)| (b, k, i)))
            .collect();
        for part in jobs.chunks(chunk.max(1)) {
            let made: Vec<MirrorCircuit> = part
                .par_iter()
                .map(|&(b, k, i)| make_proxy(&b.circuit, k, i, self.params.seed))
                .collect::<Result<_>>()?;
            for m in &made {
                manifest.records.push(proxy_record(m));
                sink(m)?;
            }
        }
        manifest.validate()?;
        Ok(manifest)
    }

    /// Manifest and all proxies held in memory.
    pub fn collect(&self) -> Result<(Manifest, Vec<MirrorCircuit>)> {
        let mut out = Vec::with_capacity(self.proxy_count());
        let m = self.generate(rayon::current_num_threads() * 4, |p| {
            out.push(p.clone());
            Ok(())
        })?;
        Ok((m, out))
    }
}

pub fn proxy_record(m: &MirrorCircuit) -> CircuitRecord {
    let kind = match m.kind {
        MirrorKind::M1 => RecordKind::M1,
        MirrorKind::M2 => RecordKind::M2,
        MirrorKind::M3 => RecordKind::M3,
    };
    let mut r = CircuitRecord::new(m.circuit.id.clone(), kind, m.circuit.n(), m.circuit.depth());
    r.parent_id = Some(m.parent_id.clone());
    r.target_bitstring = Some(m.target.clone());
    r.seed = Some(m.seed);
    r
}

/// Shot tables for `proxies` under `nm`, in input order. Each table's
/// random stream is derived from `seed` and the proxy id.
pub fn simulate_proxies(
    proxies: &[MirrorCircuit],
    nm: &NoiseModel,
    shots: u64,
    seed: u64,
) -> Result<Vec<ShotTable>> {
    proxies
        .par_iter()
        .map(|m| sample_shots(&m.circuit, nm, shots, seed))
        .collect()
}

/// Give unnamed inputs the ids `c0, c1, ...` and reject duplicates.
fn named_inputs(cs: &[Circuit]) -> Result<Vec<Circuit>> {
    let mut seen = HashSet::new();
    let mut out = Vec::with_capacity(cs.len());
    for (i, c) in cs.iter().enumerate() {
        let mut c = c.clone();
        if c.id.is_empty() {
            c.id = format!("c{i}");
        }
        if !seen.insert(c.id.clone()) {
            return Err(Error::InvalidArgument(format!("duplicate circuit id {:?}", c.id)));
        }
        out.push(c);
    }
    if out.is_empty() {
        return Err(Error::InvalidArgument("no input circuits".into()));
    }
    Ok(out)
}

fn benchmark_record(c: &Circuit) -> CircuitRecord {
    CircuitRecord::new(c.id.clone(), RecordKind::Benchmark, c.n(), c.depth())
}

/// Benchmarks are the inputs themselves, which must be native.
pub fn build_low_level(cs: &[Circuit], params: SamplingParams, shots: u64) -> Result<Suite> {
    params.validate()?;
    let cs = named_inputs(cs)?;
    let mut benchmarks = Vec::with_capacity(cs.len());
    for c in cs {
        check_native(&c)?;
        let record = benchmark_record(&c);
        benchmarks.push(Benchmark { circuit: c, record });
    }
    Ok(Suite {
        benchmark_type: BenchmarkType::LowLevel,
        params,
        shots,
        inputs: Vec::new(),
        benchmarks,
    })
}

/// Seed of transpilation `rep` of input `id`.
pub fn transpile_seed(master: u64, id: &str, rep: usize) -> u64 {
    derive_seed(master, &format!("{id}/transpile/{rep}"))
}

/// `reps` seeded transpilations of each input. Each record carries the
/// intrinsic fidelity of the compiled circuit to the intended unitary.
pub fn build_full_stack(
    cs: &[Circuit],
    cfg: &TranspileConfig,
    reps: usize,
    params: SamplingParams,
    shots: u64,
) -> Result<Suite> {
    params.validate()?;
    cfg.validate()?;
    if reps == 0 {
        return Err(Error::InvalidArgument("reps must be >= 1".into()));
    }
    let cs = named_inputs(cs)?;
    let jobs: Vec<(usize, usize)> = (0..cs.len())
        .flat_map(|i| (0..reps).map(move |r| (i, r)))
        .collect();
    let benchmarks = jobs
        .par_iter()
        .map(|&(i, r)| {
            let c = &cs[i];
            let mut cfg_r = cfg.clone();
            cfg_r.seed = transpile_seed(cfg.seed, &c.id, r);
            let t = transpile(c, &cfg_r)?;
            let circuit = t.circuit.clone().with_id(format!("{}.t{r}", c.id));
            check_native(&circuit)?;
            let mut record = benchmark_record(&circuit);
            record.parent_id = Some(c.id.clone());
            record.transpile_config_digest = Some(cfg_r.digest());
            record.seed = Some(cfg_r.seed);
            record.intrinsic_fidelity = Some(t.intrinsic_fidelity(c)?);
            record.dropped_gates = Some(t.dropped.len());
            record.extra.insert("swaps".into(), Value::from(t.swaps));
            record
                .extra
                .insert("initial_layout".into(), Value::from(t.initial_layout.clone()));
            record
                .extra
                .insert("final_layout".into(), Value::from(t.final_layout.clone()));
            Ok(Benchmark { circuit, record })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Suite {
        benchmark_type: BenchmarkType::FullStack,
        params,
        shots,
        inputs: cs,
        benchmarks,
    })
}

/// A subcircuit and where it came from.
#[derive(Debug, Clone, PartialEq)]
pub struct Snip {
    pub circuit: Circuit,
    /// Half-open layer window `[start, end)`.
    pub window: (usize, usize),
    /// Parent qubits, sorted; parent qubit `subset[i]` becomes qubit `i`.
    pub subset: Vec<usize>,
    /// Two-qubit gates removed because they straddle the subset boundary.
    pub dropped: usize,
}

/// Cut a random `w × d` subcircuit out of `c`.
///
/// The window is a uniformly random run of `d` layers. The qubits are grown
/// from a random start by random breadth-first steps over the graph of
/// two-qubit gates in the window; when no component is large enough, they
/// are drawn from the active qubits of the window and then from all qubits.
pub fn snip(c: &Circuit, w: usize, d: usize, rng: &mut Rng) -> Result<Snip> {
    check_shape(c, w, d)?;
    let start = rng.gen_range(0..=c.depth() - d);
    let window = &c.layers()[start..start + d];
    let subset = choose_subset(c.n(), window, w, rng);

    let mut label = vec![usize::MAX; c.n()];
    for (i, &q) in subset.iter().enumerate() {
        label[q] = i;
    }
    let mut dropped = 0;
    let layers: Vec<Layer> = window
        .iter()
        .map(|layer| {
            let mut ops = Vec::new();
            for g in layer.ops() {
                let inside = g.qubits().iter().filter(|&&q| label[q] != usize::MAX).count();
                if inside == g.arity() {
                    ops.push(g.remapped(|q| label[q]));
                } else if inside > 0 {
                    dropped += 1;
                }
            }
            Layer::new(ops)
        })
        .collect();
    let circuit = Circuit::new(c.id.clone(), w, layers)?;
    Ok(Snip {
        circuit,
        window: (start, start + d),
        subset,
        dropped,
    })
}

fn choose_subset(n: usize, window: &[Layer], w: usize, rng: &mut Rng) -> Vec<usize> {
    if w == n {
        return (0..n).collect();
    }
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut is_active = vec![false; n];
    for g in window.iter().flat_map(Layer::ops) {
        for &q in g.qubits() {
            is_active[q] = true;
        }
        if let [a, b] = *g.qubits() {
            adj[a].push(b);
            adj[b].push(a);
        }
    }
    for a in adj.iter_mut() {
        a.sort_unstable();
        a.dedup();
    }

    // Qubits whose component has at least `w` members, in ascending order.
    let mut eligible = Vec::new();
    let mut seen = vec![false; n];
    let mut comp = Vec::new();
    for q in 0..n {
        if seen[q] || adj[q].is_empty() {
            continue;
        }
        comp.clear();
        comp.push(q);
        seen[q] = true;
        let mut i = 0;
        while i < comp.len() {
            for &x in &adj[comp[i]] {
                if !seen[x] {
                    seen[x] = true;
                    comp.push(x);
                }
            }
            i += 1;
        }
        if comp.len() >= w {
            eligible.extend_from_slice(&comp);
        }
    }

    let mut chosen: Vec<usize> = if !eligible.is_empty() {
        eligible.sort_unstable();
        let s = eligible[rng.gen_range(0..eligible.len())];
        let mut set = BTreeSet::from([s]);
        let mut frontier: Vec<usize> = adj[s].clone();
        while set.len() < w {
            let x = frontier.swap_remove(rng.gen_range(0..frontier.len()));
            if set.insert(x) {
                frontier.extend(adj[x].iter().filter(|y| !set.contains(y)));
            }
        }
        set.into_iter().collect()
    } else {
        let active: Vec<usize> = (0..n).filter(|&q| is_active[q]).collect();
        if active.len() >= w {
            sample(rng, active.len(), w).into_iter().map(|i| active[i]).collect()
        } else {
            let rest: Vec<usize> = (0..n).filter(|q| active.binary_search(q).is_err()).collect();
            let mut out = active.clone();
            out.extend(sample(rng, rest.len(), w - active.len()).into_iter().map(|i| rest[i]));
            out
        }
    };
    chosen.sort_unstable();
    chosen
}

/// Seed for snip `k` of shape `(w, d)` from `parent`.
pub fn snip_seed(master: u64, parent: &str, w: usize, d: usize, k: usize) -> u64 {
    derive_seed(master, &format!("{parent}/snip/{w}x{d}/{k}"))
}

/// `K` snips per shape per native parent; each snip is a benchmark.
pub fn build_subcircuit(
    cs: &[Circuit],
    shapes: &ShapeSpec,
    params: SamplingParams,
    shots: u64,
) -> Result<Suite> {
    params.validate()?;
    shapes.validate()?;
    let cs = named_inputs(cs)?;
    let mut jobs = Vec::new();
    for (i, c) in cs.iter().enumerate() {
        check_native(c)?;
        shapes.check_fits(c)?;
        for &(w, d) in &shapes.shapes {
            for k in 0..shapes.samples_per_shape {
                jobs.push((i, w, d, k));
            }
        }
    }
    let benchmarks = jobs
        .par_iter()
        .map(|&(i, w, d, k)| {
            let parent = &cs[i];
            let seed = snip_seed(params.seed, &parent.id, w, d, k);
            let s = snip(parent, w, d, &mut rng_from_seed(seed))?;
            let circuit = s.circuit.with_id(format!("{}.w{w}d{d}.{k}", parent.id));
            let mut record = benchmark_record(&circuit);
            record.parent_id = Some(parent.id.clone());
            record.shape = Some((w, d));
            record.seed = Some(seed);
            record.window = Some(s.window);
            record.subset = Some(s.subset);
            record.dropped_gates = Some(s.dropped);
            Ok(Benchmark { circuit, record })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Suite {
        benchmark_type: BenchmarkType::Subcircuit,
        params,
        shots,
        inputs: cs,
        benchmarks,
    })
}

/// Two-qubit gates of `c` within `window` that straddle `subset`.
pub fn straddling_gates(c: &Circuit, window: (usize, usize), subset: &[usize]) -> Vec<GateOp> {
    let inside: HashSet<usize> = subset.iter().copied().collect();
    c.layers()[window.0..window.1]
        .iter()
        .flat_map(Layer::ops)
        .filter(|g| {
            g.arity() == 2 && (inside.contains(&g.qubits()[0]) != inside.contains(&g.qubits()[1]))
        })
        .copied()
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algo::{brickwork_u3_cz, qft_circuit};
    use crate::circuit::CouplingGraph;

    #[test]
    fn low_level_counts_and_native_check() {
        let a = brickwork_u3_cz(3, 4, 0).with_id("a");
        let s = build_low_level(std::slice::from_ref(&a), SamplingParams::uniform(10, 1), 100).unwrap();
        assert_eq!(s.proxy_count(), 30);
        let three: Vec<Circuit> = (0..3).map(|i| brickwork_u3_cz(3, 4, i).with_id(format!("b{i}"))).collect();
        let s3 = build_low_level(&three, SamplingParams::uniform(10, 1), 100).unwrap();
        let (m, proxies) = s3.collect().unwrap();
        assert_eq!(m.benchmarks().count(), 3);
        assert_eq!(proxies.len(), 90);
        assert_eq!(m.records.len(), 93);
        let err = build_low_level(&[qft_circuit(3)], SamplingParams::uniform(1, 0), 1).unwrap_err();
        assert!(err.to_string().contains("full-stack"), "{err}");
    }

    #[test]
    fn generation_order_and_content_match_lazy_iterator() {
        let a = brickwork_u3_cz(4, 6, 2).with_id("a");
        let s = build_low_level(&[a], SamplingParams::new(2, 3, 1, 9).unwrap(), 10).unwrap();
        let lazy: Vec<MirrorCircuit> = s.proxies().collect::<Result<_>>().unwrap();
        let mut streamed = Vec::new();
        s.generate(4, |m| {
            streamed.push(m.clone());
            Ok(())
        })
        .unwrap();
        assert_eq!(lazy, streamed);
    }

    #[test]
    fn full_stack_records() {
        let cfg = TranspileConfig::new(CouplingGraph::line(3), 1.0, 5).unwrap();
        let s = build_full_stack(&[qft_circuit(3)], &cfg, 4, SamplingParams::uniform(1, 0), 10).unwrap();
        assert_eq!(s.benchmarks.len(), 4);
        for b in &s.benchmarks {
            assert_eq!(b.record.intrinsic_fidelity, Some(1.0));
            assert_eq!(b.record.parent_id.as_deref(), Some("qft3"));
            assert!(b.circuit.gates().all(|g| g.kind().is_basis()));
        }
        let m = s.base_manifest();
        m.validate().unwrap();
        assert_eq!(m.records[0].kind, RecordKind::Input);
    }

    #[test]
    fn snip_whole_circuit_is_identity() {
        let c = brickwork_u3_cz(4, 6, 3);
        let s = snip(&c, 4, 6, &mut rng_from_seed(0)).unwrap();
        assert_eq!(s.circuit.layers(), c.layers());
        assert_eq!(s.window, (0, 6));
        assert_eq!(s.dropped, 0);
    }

    #[test]
    fn single_qubit_snip_of_cz_layer_drops_it() {
        let c = Circuit::from_gates(2, [GateOp::cz(0, 1)]).unwrap();
        let s = snip(&c, 1, 1, &mut rng_from_seed(1)).unwrap();
        assert_eq!(s.circuit.depth(), 1);
        assert!(s.circuit.layers()[0].is_empty());
        assert_eq!(s.dropped, 1);
        assert!(snip(&c, 3, 1, &mut rng_from_seed(1)).is_err());
        assert!(snip(&c, 1, 2, &mut rng_from_seed(1)).is_err());
    }

    #[test]
    fn snips_are_connected_and_shaped() {
        let c = brickwork_u3_cz(10, 128, 4);
        let mut rng = rng_from_seed(2);
        for _ in 0..30 {
            let s = snip(&c, 3, 4, &mut rng).unwrap();
            assert_eq!((s.circuit.n(), s.circuit.depth()), (3, 4));
            // Nearest-neighbour bricks: a connected triple is a run.
            assert_eq!(s.subset[2] - s.subset[0], 2, "{:?}", s.subset);
            assert_eq!(s.dropped, straddling_gates(&c, s.window, &s.subset).len());
        }
    }

    #[test]
    fn subcircuit_grid_counts() {
        let c = brickwork_u3_cz(8, 128, 5).with_id("p");
        let shapes = ShapeSpec::grid(&[2, 4, 6], &[2, 8, 32, 128], 30).unwrap();
        let params = SamplingParams::uniform(1, 3);
        let s = build_subcircuit(&[c], &shapes, params, 10).unwrap();
        assert_eq!(s.benchmarks.len(), 360);
        assert_eq!(s.proxy_count(), 360 * 3);
        let m = s.base_manifest();
        m.validate().unwrap();
        let r = m.record("p.w4d8.7").unwrap();
        assert_eq!(r.shape, Some((4, 8)));
        assert_eq!(r.subset.as_ref().unwrap().len(), 4);
        assert!(ShapeSpec::new(vec![(1, 1)], 0).is_err());
    }

    #[test]
    fn suites_are_deterministic() {
        let c = brickwork_u3_cz(6, 20, 5).with_id("p");
        let shapes = ShapeSpec::new(vec![(2, 3)], 4).unwrap();
        let a = build_subcircuit(std::slice::from_ref(&c), &shapes, SamplingParams::uniform(2, 3), 1).unwrap();
        let b = build_subcircuit(&[c], &shapes, SamplingParams::uniform(2, 3), 1).unwrap();
        assert_eq!(a.collect().unwrap(), b.collect().unwrap());
    }
}
