use std::collections::{BTreeMap, HashMap};

use rand::distributions::{Distribution, WeightedIndex};
use rand::Rng as _;
use serde::{Deserialize, Serialize};

use crate::circuit::matrix::{C64, ONE, ZERO};
use crate::circuit::unitary::{apply_1q, apply_gate, apply_pauli, statevector};
use crate::circuit::{Circuit, Pauli};
use crate::error::{Error, Result};
use crate::rng::{derived_rng, rng_from_seed, Rng};

use super::density::DensityMatrix;
use super::noise::{noisy_program, NoiseModel, NoisyOp};

pub const STATEVECTOR_LIMIT: usize = 20;
pub const SAMPLING_LIMIT: usize = 12;
/// Largest width for which the automatic sampler uses density evolution.
pub const DENSITY_SAMPLING_LIMIT: usize = 6;

/// Bitstring of a basis index, qubit 0 leftmost.
pub fn bitstring(index: usize, n: usize) -> String {
    (0..n)
        .map(|q| if index >> q & 1 == 1 { '1' } else { '0' })
        .collect()
}

/// Inverse of [`bitstring`]; `None` on characters other than `0`/`1`.
pub fn bitstring_index(s: &str) -> Option<usize> {
    let mut idx = 0usize;
    for (q, ch) in s.chars().enumerate() {
        match ch {
            '0' => {}
            '1' => idx |= 1 << q,
            _ => return None,
        }
    }
    Some(idx)
}

fn is_bitstring(s: &str) -> bool {
    s.bytes().all(|b| b == b'0' || b == b'1')
}

/// Measurement counts of one circuit.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawShots", into = "RawShots")]
pub struct ShotTable {
    circuit_id: String,
    counts: BTreeMap<String, u64>,
    total: u64,
}

#[derive(Serialize, Deserialize)]
struct RawShots {
    circuit_id: String,
    counts: BTreeMap<String, u64>,
}

impl TryFrom<RawShots> for ShotTable {
    type Error = Error;

    fn try_from(r: RawShots) -> Result<Self> {
        ShotTable::new(r.circuit_id, r.counts)
    }
}

impl From<ShotTable> for RawShots {
    fn from(t: ShotTable) -> Self {
        RawShots {
            circuit_id: t.circuit_id,
            counts: t.counts,
        }
    }
}

impl ShotTable {
    /// Zero counts are dropped; bitstrings must share one length.
    pub fn new(circuit_id: impl Into<String>, counts: BTreeMap<String, u64>) -> Result<Self> {
        let counts: BTreeMap<String, u64> = counts.into_iter().filter(|(_, c)| *c > 0).collect();
        if counts.is_empty() {
            return Err(Error::EmptyShots);
        }
        let width = counts.keys().next().map(String::len).unwrap_or(0);
        for k in counts.keys() {
            if k.len() != width || !is_bitstring(k) {
                return Err(Error::InvalidArgument(format!(
                    "bad bitstring {k:?} (expected {width} characters of 0/1)"
                )));
            }
        }
        let total = counts.values().sum();
        Ok(ShotTable {
            circuit_id: circuit_id.into(),
            counts,
            total,
        })
    }

    pub fn circuit_id(&self) -> &str {
        &self.circuit_id
    }

    pub fn counts(&self) -> &BTreeMap<String, u64> {
        &self.counts
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    pub fn width(&self) -> usize {
        self.counts.keys().next().map(String::len).unwrap_or(0)
    }

    pub fn count(&self, bits: &str) -> u64 {
        self.counts.get(bits).copied().unwrap_or(0)
    }

    /// Empirical frequencies.
    pub fn frequencies(&self) -> BTreeMap<String, f64> {
        let t = self.total as f64;
        self.counts
            .iter()
            .map(|(k, &c)| (k.clone(), c as f64 / t))
            .collect()
    }

    /// Number of shots at each Hamming distance `0..=n` from `target`.
    pub fn hamming_histogram(&self, target: &str) -> Result<Vec<u64>> {
        let n = target.len();
        if self.width() != n {
            return Err(Error::DimensionMismatch(self.width(), n));
        }
        let mut h = vec![0u64; n + 1];
        for (k, &c) in &self.counts {
            let d = k.bytes().zip(target.bytes()).filter(|(a, b)| a != b).count();
            h[d] += c;
        }
        Ok(h)
    }
}

/// Sparse probability distribution over bitstrings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct OutcomeDistribution {
    probs: BTreeMap<String, f64>,
}

impl OutcomeDistribution {
    /// Probabilities must be non-negative and sum to 1 within 1e-9.
    pub fn new(probs: BTreeMap<String, f64>) -> Result<Self> {
        let width = probs.keys().next().map(String::len).unwrap_or(0);
        if probs.keys().any(|k| k.len() != width || !is_bitstring(k)) {
            return Err(Error::InvalidArgument("inconsistent bitstrings".into()));
        }
        if probs.values().any(|p| !(*p >= 0.0)) {
            return Err(Error::InvalidArgument("negative probability".into()));
        }
        let s: f64 = probs.values().sum();
        if (s - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidArgument(format!("probabilities sum to {s}")));
        }
        Ok(OutcomeDistribution { probs })
    }

    /// From a dense vector indexed by basis state; entries below `1e-15` are dropped.
    pub fn from_dense(p: &[f64]) -> Self {
        let n = p.len().trailing_zeros() as usize;
        let probs = p
            .iter()
            .enumerate()
            .filter(|(_, &v)| v > 1e-15)
            .map(|(i, &v)| (bitstring(i, n), v))
            .collect();
        OutcomeDistribution { probs }
    }

    pub fn probs(&self) -> &BTreeMap<String, f64> {
        &self.probs
    }

    pub fn get(&self, bits: &str) -> f64 {
        self.probs.get(bits).copied().unwrap_or(0.0)
    }

    pub fn width(&self) -> usize {
        self.probs.keys().next().map(String::len).unwrap_or(0)
    }
}

/// `|⟨x|U|0…0⟩|²` for every `x` with nonzero weight.
pub fn ideal_distribution(c: &Circuit) -> Result<OutcomeDistribution> {
    ideal_distribution_with_limit(c, STATEVECTOR_LIMIT)
}

pub fn ideal_distribution_with_limit(c: &Circuit, limit: usize) -> Result<OutcomeDistribution> {
    let psi = statevector(c, limit)?;
    let p: Vec<f64> = psi.iter().map(|a| a.norm_sqr()).collect();
    Ok(OutcomeDistribution::from_dense(&p))
}

/// Simulation strategy for [`sample_shots_with`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SamplingMethod {
    /// Single state vector when the gate channel is unitary, exact density
    /// evolution up to [`DENSITY_SAMPLING_LIMIT`] qubits, trajectories above.
    #[default]
    Auto,
    /// Stochastic Pauli insertion per shot.
    Trajectory,
    /// Exact output distribution by density evolution, then multinomial draws.
    Density,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SamplingConfig {
    pub method: SamplingMethod,
    pub max_qubits: usize,
}

impl Default for SamplingConfig {
    fn default() -> Self {
        SamplingConfig {
            method: SamplingMethod::Auto,
            max_qubits: SAMPLING_LIMIT,
        }
    }
}

/// Sample measurement outcomes of `c` under `nm`.
///
/// The random stream is derived from `(seed, c.id)`, so tables do not depend
/// on the order in which circuits are simulated.
pub fn sample_shots(c: &Circuit, nm: &NoiseModel, shots: u64, seed: u64) -> Result<ShotTable> {
    sample_shots_with(c, nm, shots, seed, SamplingConfig::default())
}

pub fn sample_shots_with(
    c: &Circuit,
    nm: &NoiseModel,
    shots: u64,
    seed: u64,
    cfg: SamplingConfig,
) -> Result<ShotTable> {
    if shots == 0 {
        return Err(Error::EmptyShots);
    }
    if c.n() > cfg.max_qubits {
        return Err(Error::Capacity {
            what: "noisy sampling",
            n: c.n(),
            limit: cfg.max_qubits,
        });
    }
    nm.validate()?;
    let mut rng = derived_rng(seed, &c.id);
    let prog = noisy_program(c, nm);
    let n = c.n();
    let counts = match cfg.method {
        SamplingMethod::Auto if nm.is_coherent_only() => {
            let p = readout_convolved(pure_probabilities(n, &prog, &[]), nm.epsilon_ro);
            draw(&p, shots, &mut rng)
        }
        SamplingMethod::Auto if n <= DENSITY_SAMPLING_LIMIT => density_counts(n, &prog, nm, shots, &mut rng),
        SamplingMethod::Density => density_counts(n, &prog, nm, shots, &mut rng),
        _ => trajectory_counts(n, &prog, nm, shots, &mut rng),
    };
    let counts = counts
        .into_iter()
        .map(|(i, k)| (bitstring(i, n), k))
        .collect();
    ShotTable::new(c.id.clone(), counts)
}

/// Exact noisy outcome distribution including readout error.
pub fn noisy_distribution(c: &Circuit, nm: &NoiseModel) -> Result<OutcomeDistribution> {
    if c.n() > SAMPLING_LIMIT {
        return Err(Error::Capacity {
            what: "density evolution",
            n: c.n(),
            limit: SAMPLING_LIMIT,
        });
    }
    nm.validate()?;
    let prog = noisy_program(c, nm);
    let mut rho = DensityMatrix::zero_state(c.n());
    rho.run(&prog);
    let p = readout_convolved(rho.probabilities(), nm.epsilon_ro);
    Ok(OutcomeDistribution::from_dense(&p))
}

fn density_counts(
    n: usize,
    prog: &[NoisyOp],
    nm: &NoiseModel,
    shots: u64,
    rng: &mut Rng,
) -> BTreeMap<usize, u64> {
    let mut rho = DensityMatrix::zero_state(n);
    rho.run(prog);
    let p = readout_convolved(rho.probabilities(), nm.epsilon_ro);
    draw(&p, shots, rng)
}

/// One sampled error: program position and Pauli code (two bits per qubit).
type ErrorPattern = Vec<(u32, u8)>;

fn trajectory_counts(
    n: usize,
    prog: &[NoisyOp],
    nm: &NoiseModel,
    shots: u64,
    rng: &mut Rng,
) -> BTreeMap<usize, u64> {
    // Draw every shot's error pattern first and simulate each distinct
    // pattern once; at realistic error rates most shots share the empty one.
    let mut groups: HashMap<ErrorPattern, u64> = HashMap::new();
    for _ in 0..shots {
        let mut pat = ErrorPattern::new();
        for (pos, op) in prog.iter().enumerate() {
            let (lambda, paulis) = match op {
                NoisyOp::Depolarize1(_, l) => (*l, 4u8),
                NoisyOp::Depolarize2(_, _, l) => (*l, 16u8),
                _ => continue,
            };
            // With probability λ replace the state by a uniformly random
            // Pauli image; the identity draw leaves it unchanged.
            if rng.gen::<f64>() < lambda {
                let code = rng.gen_range(0..paulis);
                if code != 0 {
                    pat.push((pos as u32, code));
                }
            }
        }
        *groups.entry(pat).or_insert(0) += 1;
    }
    let mut ordered: Vec<_> = groups.into_iter().collect();
    ordered.sort();
    let mut counts = BTreeMap::new();
    for (pat, k) in ordered {
        let p = readout_convolved(pure_probabilities(n, prog, &pat), nm.epsilon_ro);
        for (i, c) in draw(&p, k, rng) {
            *counts.entry(i).or_insert(0) += c;
        }
    }
    counts
}

/// Outcome probabilities of one trajectory with the given Pauli insertions.
fn pure_probabilities(n: usize, prog: &[NoisyOp], pat: &[(u32, u8)]) -> Vec<f64> {
    let mut psi = vec![ZERO; 1 << n];
    psi[0] = ONE;
    let mut next = pat.iter().peekable();
    for (pos, op) in prog.iter().enumerate() {
        match op {
            NoisyOp::Gate(g) => apply_gate(&mut psi, g),
            NoisyOp::Unitary(q, u) => apply_1q(&mut psi, *q, u),
            NoisyOp::Depolarize1(q, _) => {
                if let Some(&&(_, code)) = next.peek().filter(|e| e.0 as usize == pos) {
                    apply_pauli(&mut psi, *q, Pauli::from_index(code & 3));
                    next.next();
                }
            }
            NoisyOp::Depolarize2(a, b, _) => {
                if let Some(&&(_, code)) = next.peek().filter(|e| e.0 as usize == pos) {
                    apply_pauli(&mut psi, *a, Pauli::from_index(code & 3));
                    apply_pauli(&mut psi, *b, Pauli::from_index(code >> 2));
                    next.next();
                }
            }
        }
    }
    psi.iter().map(C64::norm_sqr).collect()
}

/// Apply independent symmetric bit flips of probability `eps` to a dense
/// distribution.
pub fn readout_convolved(mut p: Vec<f64>, eps: f64) -> Vec<f64> {
    if eps == 0.0 {
        return p;
    }
    let n = p.len().trailing_zeros() as usize;
    for q in 0..n {
        let bit = 1usize << q;
        for i in 0..p.len() {
            if i & bit == 0 {
                let (a, b) = (p[i], p[i | bit]);
                p[i] = (1.0 - eps) * a + eps * b;
                p[i | bit] = (1.0 - eps) * b + eps * a;
            }
        }
    }
    p
}

fn draw(p: &[f64], shots: u64, rng: &mut Rng) -> BTreeMap<usize, u64> {
    let mut counts = BTreeMap::new();
    let support: Vec<usize> = (0..p.len()).filter(|&i| p[i] > 0.0).collect();
    if support.len() == 1 {
        counts.insert(support[0], shots);
        return counts;
    }
    let dist = WeightedIndex::new(support.iter().map(|&i| p[i])).expect("valid weights");
    for _ in 0..shots {
        *counts.entry(support[dist.sample(rng)]).or_insert(0) += 1;
    }
    counts
}

/// I.i.d. uniform bitstrings, independent of any circuit.
pub fn fake_uniform_shots(
    circuit_id: impl Into<String>,
    n: usize,
    shots: u64,
    seed: u64,
) -> Result<ShotTable> {
    if shots == 0 {
        return Err(Error::EmptyShots);
    }
    if n == 0 {
        return Err(Error::InvalidArgument("fake shots need at least one qubit".into()));
    }
    let mut rng = rng_from_seed(seed);
    let mut counts = BTreeMap::new();
    let mut buf = vec![0u8; n];
    for _ in 0..shots {
        for chunk in buf.chunks_mut(64) {
            let word: u64 = rng.gen();
            for (j, b) in chunk.iter_mut().enumerate() {
                *b = b'0' + (word >> j & 1) as u8;
            }
        }
        let s = String::from_utf8(buf.clone()).expect("ascii");
        *counts.entry(s).or_insert(0) += 1;
    }
    ShotTable::new(circuit_id, counts)
}
