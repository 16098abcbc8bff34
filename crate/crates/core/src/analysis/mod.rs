//! Shot data to process-fidelity estimates.

mod report;

use std::collections::{BTreeMap, HashMap};

use rand::Rng as _;
use rand_distr::{Binomial, Distribution};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::io::{BenchmarkType, CircuitRecord, Manifest, RecordKind};
use crate::rng::{derive_seed, rng_from_seed, Rng};
use crate::sim::{OutcomeDistribution, ShotTable};

pub use report::{volumetric_svg, VolumetricCell};

/// Minimum `S̄2·S̄3` for the ratio estimator to be defined.
pub const ESTIMATE_FLOOR: f64 = 1e-4;
/// Minimum denominator of the normalized classical fidelity.
pub const CLASSICAL_FLOOR: f64 = 1e-6;
/// Nonpositive fidelities are raised to this before taking logarithms.
pub const FIDELITY_FLOOR: f64 = 1e-6;
pub const BOOTSTRAP_REPLICAS: usize = 200;

/// `4^{-n}`, underflowing to zero for large `n`.
fn inv_pow4(n: usize) -> f64 {
    0.25f64.powi(n.min(2000) as i32)
}

/// Effective polarization of one mirror circuit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolarizationEstimate {
    pub circuit_id: String,
    #[serde(rename = "S")]
    pub s: f64,
    pub shots: u64,
}

/// `S = (Σ_k (−1/2)^k h_k − 4^{−n}) / (1 − 4^{−n})` where `h_k` is the
/// fraction of shots at Hamming distance `k` and `n = h.len() − 1`.
pub fn polarization_from_histogram(h: &[u64]) -> Result<f64> {
    let total: u64 = h.iter().sum();
    if total == 0 {
        return Err(Error::EmptyShots);
    }
    if h.len() < 2 {
        return Err(Error::InvalidArgument("polarization needs at least one qubit".into()));
    }
    let mut acc = 0.0;
    let mut w = 1.0;
    for &c in h {
        acc += w * c as f64;
        w *= -0.5;
    }
    let u = inv_pow4(h.len() - 1);
    Ok((acc / total as f64 - u) / (1.0 - u))
}

pub fn effective_polarization(t: &ShotTable, target: &str) -> Result<PolarizationEstimate> {
    let h = t.hamming_histogram(target)?;
    Ok(PolarizationEstimate {
        circuit_id: t.circuit_id().to_string(),
        s: polarization_from_histogram(&h)?,
        shots: t.total(),
    })
}

/// `F = γ + (1 − γ)/4^n`.
pub fn polarization_to_fidelity(gamma: f64, n: usize) -> f64 {
    let u = inv_pow4(n);
    gamma + (1.0 - gamma) * u
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McfeEstimate {
    pub gamma: f64,
    /// NaN when the estimate is undefined.
    pub f_hat: f64,
    pub f_clamped: f64,
    pub defined: bool,
}

/// `γ̂ = S̄1/√(S̄2·S̄3)` converted to a process fidelity.
pub fn mcfe_estimate(s1: f64, s2: f64, s3: f64, n: usize) -> McfeEstimate {
    mcfe_estimate_with_floor(s1, s2, s3, n, ESTIMATE_FLOOR)
}

pub fn mcfe_estimate_with_floor(s1: f64, s2: f64, s3: f64, n: usize, floor: f64) -> McfeEstimate {
    let denom = s2 * s3;
    if !(denom > floor) || !s1.is_finite() {
        return McfeEstimate {
            gamma: f64::NAN,
            f_hat: f64::NAN,
            f_clamped: f64::NAN,
            defined: false,
        };
    }
    let gamma = s1 / denom.sqrt();
    let f_hat = polarization_to_fidelity(gamma, n);
    McfeEstimate {
        gamma,
        f_hat,
        f_clamped: f_hat.clamp(0.0, 1.0),
        defined: true,
    }
}

/// Hamming-distance histograms of every proxy of one benchmark.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct BenchmarkShots {
    pub n: usize,
    pub m1: Vec<Vec<u64>>,
    pub m2: Vec<Vec<u64>>,
    pub m3: Vec<Vec<u64>>,
}

impl BenchmarkShots {
    pub fn new(n: usize) -> Self {
        BenchmarkShots {
            n,
            ..Default::default()
        }
    }

    fn kinds(&self) -> [&[Vec<u64>]; 3] {
        [&self.m1, &self.m2, &self.m3]
    }

    /// `(S̄1, S̄2, S̄3)`.
    pub fn mean_polarizations(&self) -> Result<[f64; 3]> {
        let mut out = [0.0; 3];
        for (o, hs) in out.iter_mut().zip(self.kinds()) {
            if hs.is_empty() {
                return Err(Error::InvalidArgument("a mirror kind has no circuits".into()));
            }
            let mut acc = 0.0;
            for h in hs {
                acc += polarization_from_histogram(h)?;
            }
            *o = acc / hs.len() as f64;
        }
        Ok(out)
    }

    pub fn estimate(&self, floor: f64) -> Result<(McfeEstimate, [f64; 3])> {
        let [s1, s2, s3] = self.mean_polarizations()?;
        Ok((mcfe_estimate_with_floor(s1, s2, s3, self.n, floor), [s1, s2, s3]))
    }
}

/// Multinomial resample of a histogram with the same total.
fn resample_histogram(h: &[u64], rng: &mut Rng) -> Vec<u64> {
    let mut out = vec![0u64; h.len()];
    let mut remaining: u64 = h.iter().sum();
    let mut mass = remaining;
    for (k, &c) in h.iter().enumerate() {
        if c == 0 {
            continue;
        }
        if remaining == 0 {
            break;
        }
        if c == mass {
            out[k] = remaining;
            break;
        }
        let x = Binomial::new(remaining, c as f64 / mass as f64)
            .expect("probability in [0, 1]")
            .sample(rng);
        out[k] = x;
        remaining -= x;
        mass -= c;
    }
    out
}

fn replica_estimate(data: &BenchmarkShots, rng: &mut Rng, floor: f64) -> f64 {
    let mut s = [0.0; 3];
    for (o, hs) in s.iter_mut().zip(data.kinds()) {
        let mut acc = 0.0;
        for _ in 0..hs.len() {
            let h = &hs[rng.gen_range(0..hs.len())];
            acc += polarization_from_histogram(&resample_histogram(h, rng)).unwrap_or(f64::NAN);
        }
        *o = acc / hs.len() as f64;
    }
    mcfe_estimate_with_floor(s[0], s[1], s[2], data.n, floor).f_hat
}

/// Non-parametric bootstrap of `F̂`: circuits are resampled with
/// replacement within each kind, then each circuit's shots multinomially.
/// Returns the sample standard deviation over the defined replicas, or NaN
/// when fewer than two are defined.
pub fn bootstrap_sigma(data: &BenchmarkShots, replicas: usize, seed: u64) -> f64 {
    bootstrap_sigma_with_floor(data, replicas, seed, ESTIMATE_FLOOR)
}

pub fn bootstrap_sigma_with_floor(data: &BenchmarkShots, replicas: usize, seed: u64, floor: f64) -> f64 {
    if data.kinds().iter().any(|k| k.is_empty()) {
        return f64::NAN;
    }
    let reps: Vec<f64> = (0..replicas)
        .into_par_iter()
        .map(|b| {
            let mut rng = rng_from_seed(derive_seed(seed, &b.to_string()));
            replica_estimate(data, &mut rng, floor)
        })
        .collect();
    sample_std(reps.into_iter().filter(|x| x.is_finite()))
}

fn sample_std(xs: impl Iterator<Item = f64>) -> f64 {
    let xs: Vec<f64> = xs.collect();
    if xs.len() < 2 {
        return f64::NAN;
    }
    let mean = xs.iter().sum::<f64>() / xs.len() as f64;
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (xs.len() - 1) as f64;
    var.sqrt()
}

/// `F_c = (Σ_x √(p(x) p̃(x)))²`.
pub fn classical_fidelity(p: &OutcomeDistribution, q: &OutcomeDistribution) -> Result<f64> {
    if p.width() != q.width() {
        return Err(Error::DimensionMismatch(p.width(), q.width()));
    }
    let s: f64 = p.probs().iter().map(|(x, &px)| (px * q.get(x)).sqrt()).sum();
    Ok(s * s)
}

/// `F̄_c = (F_c − F_u)/(1 − F_u)` with `F_u = 2^{−n}(Σ_x √p(x))²`, the
/// classical fidelity of `p` to the uniform distribution.
pub fn normalized_classical_fidelity(
    p: &OutcomeDistribution,
    q: &OutcomeDistribution,
    n: usize,
) -> Result<f64> {
    if p.width() != n {
        return Err(Error::DimensionMismatch(p.width(), n));
    }
    let fc = classical_fidelity(p, q)?;
    let root: f64 = p.probs().values().map(|x| x.sqrt()).sum();
    let fu = 0.5f64.powi(n.min(4000) as i32) * root * root;
    let denom = 1.0 - fu;
    if denom <= CLASSICAL_FLOOR {
        return Err(Error::IllConditioned(format!(
            "ideal distribution is too close to uniform (1 - F_u = {denom:e})"
        )));
    }
    Ok((fc - fu) / denom)
}

/// Observed frequencies as a distribution.
pub fn empirical_distribution(t: &ShotTable) -> Result<OutcomeDistribution> {
    OutcomeDistribution::new(t.frequencies())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EffectiveErrorRate {
    pub shape: (usize, usize),
    pub epsilon: f64,
    #[serde(rename = "K")]
    pub k: usize,
    /// Inputs raised to [`FIDELITY_FLOOR`].
    pub clamped: usize,
}

/// `ε = 1 − (Π F_i)^{1/(w·d·K)}`.
pub fn effective_error_rate(fs: &[f64], w: usize, d: usize) -> Result<EffectiveErrorRate> {
    if fs.is_empty() {
        return Err(Error::InvalidArgument("no fidelities for the error rate".into()));
    }
    if w == 0 || d == 0 {
        return Err(Error::InvalidArgument("shape must be at least 1 x 1".into()));
    }
    let mut clamped = 0;
    let mut log_sum = 0.0;
    for &f in fs {
        if f.is_nan() {
            return Err(Error::InvalidArgument("NaN fidelity".into()));
        }
        let f = if f > 0.0 {
            f
        } else {
            clamped += 1;
            FIDELITY_FLOOR
        };
        log_sum += f.ln();
    }
    if clamped > 0 {
        log::warn!("{clamped} nonpositive fidelities raised to {FIDELITY_FLOOR} for shape ({w}, {d})");
    }
    let k = fs.len();
    let epsilon = 1.0 - (log_sum / (w * d * k) as f64).exp();
    Ok(EffectiveErrorRate {
        shape: (w, d),
        epsilon,
        k,
        clamped,
    })
}

/// `F = (1 − ε)^{w_c·d_c}`.
pub fn predict_full_fidelity(epsilon: f64, w_c: usize, d_c: usize) -> f64 {
    (1.0 - epsilon).powf((w_c * d_c) as f64)
}

/// Estimated fidelity of one benchmark circuit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FidelityRecord {
    pub benchmark_id: String,
    pub kind: BenchmarkType,
    pub width: usize,
    pub depth: usize,
    pub shape: (usize, usize),
    #[serde(rename = "F_hat")]
    pub f_hat: f64,
    #[serde(rename = "F_clamped")]
    pub f_clamped: f64,
    pub sigma_boot: f64,
    #[serde(rename = "S1")]
    pub s1: f64,
    #[serde(rename = "S2")]
    pub s2: f64,
    #[serde(rename = "S3")]
    pub s3: f64,
    pub flags: Vec<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AnalysisConfig {
    pub replicas: usize,
    pub seed: u64,
    pub floor: f64,
}

impl Default for AnalysisConfig {
    fn default() -> Self {
        AnalysisConfig {
            replicas: BOOTSTRAP_REPLICAS,
            seed: 0,
            floor: ESTIMATE_FLOOR,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Analysis {
    pub records: Vec<FidelityRecord>,
    /// Per-proxy polarizations, in manifest order.
    pub polarizations: Vec<(String, RecordKind, PolarizationEstimate)>,
}

/// Group mirror shot data by benchmark. Any mirror record without shots
/// yields [`Error::MissingData`] listing all of them.
pub fn gather_shots(
    manifest: &Manifest,
    shots: &[ShotTable],
) -> Result<(BTreeMap<String, BenchmarkShots>, Vec<(String, RecordKind, PolarizationEstimate)>)> {
    let mut by_id: HashMap<&str, &ShotTable> = HashMap::with_capacity(shots.len());
    for t in shots {
        if by_id.insert(t.circuit_id(), t).is_some() {
            return Err(Error::InvalidArgument(format!(
                "duplicate shot table for {:?}",
                t.circuit_id()
            )));
        }
    }
    let missing: Vec<String> = manifest
        .records
        .iter()
        .filter(|r| r.kind.is_mirror() && !by_id.contains_key(r.id.as_str()))
        .map(|r| r.id.clone())
        .collect();
    if !missing.is_empty() {
        return Err(Error::MissingData(missing));
    }
    let mut groups: BTreeMap<String, BenchmarkShots> = manifest
        .benchmarks()
        .map(|b| (b.id.clone(), BenchmarkShots::new(b.width)))
        .collect();
    let mut pols = Vec::new();
    for r in manifest.records.iter().filter(|r| r.kind.is_mirror()) {
        let t = by_id[r.id.as_str()];
        let target = r.target_bitstring.as_deref().expect("validated manifest");
        let h = t.hamming_histogram(target)?;
        pols.push((
            r.parent_id.clone().unwrap_or_default(),
            r.kind,
            PolarizationEstimate {
                circuit_id: r.id.clone(),
                s: polarization_from_histogram(&h)?,
                shots: t.total(),
            },
        ));
        let g = groups
            .get_mut(r.parent_id.as_deref().unwrap_or_default())
            .expect("validated manifest");
        match r.kind {
            RecordKind::M1 => g.m1.push(h),
            RecordKind::M2 => g.m2.push(h),
            _ => g.m3.push(h),
        }
    }
    Ok((groups, pols))
}

fn analyze_one(
    r: &CircuitRecord,
    kind: BenchmarkType,
    data: &BenchmarkShots,
    cfg: &AnalysisConfig,
) -> FidelityRecord {
    let mut flags = Vec::new();
    let (est, s) = match data.estimate(cfg.floor) {
        Ok(x) => x,
        Err(_) => {
            flags.push("missing_kind".to_string());
            (mcfe_estimate(f64::NAN, 0.0, 0.0, data.n), [f64::NAN; 3])
        }
    };
    let mut f_hat = est.f_hat;
    let mut sigma = if est.defined {
        bootstrap_sigma_with_floor(data, cfg.replicas, derive_seed(cfg.seed, &r.id), cfg.floor)
    } else {
        flags.push("estimate_undefined".to_string());
        f64::NAN
    };
    if est.defined && sigma.is_nan() {
        flags.push("bootstrap_undefined".to_string());
    }
    if let Some(fi) = r.intrinsic_fidelity {
        f_hat *= fi;
        sigma *= fi;
        if fi < 1.0 {
            flags.push("intrinsic".to_string());
        }
    }
    let f_clamped = f_hat.clamp(0.0, 1.0);
    if est.defined && f_clamped != f_hat {
        flags.push("clamped".to_string());
    }
    FidelityRecord {
        benchmark_id: r.id.clone(),
        kind,
        width: r.width,
        depth: r.depth,
        shape: r.shape.unwrap_or((r.width, r.depth)),
        f_hat,
        f_clamped,
        sigma_boot: sigma,
        s1: s[0],
        s2: s[1],
        s3: s[2],
        flags,
    }
}

/// Estimate every benchmark of an experiment.
pub fn analyze(manifest: &Manifest, shots: &[ShotTable], cfg: &AnalysisConfig) -> Result<Analysis> {
    let (groups, polarizations) = gather_shots(manifest, shots)?;
    let benches: Vec<&CircuitRecord> = manifest.benchmarks().collect();
    let records = benches
        .par_iter()
        .map(|r| analyze_one(r, manifest.benchmark_type, &groups[&r.id], cfg))
        .collect();
    Ok(Analysis {
        records,
        polarizations,
    })
}

fn fmt_f64(x: f64) -> String {
    format!("{x}")
}

pub const RESULTS_HEADER: [&str; 13] = [
    "benchmark_id",
    "kind",
    "width",
    "depth",
    "shape_w",
    "shape_d",
    "F_hat",
    "F_clamped",
    "sigma_boot",
    "S1",
    "S2",
    "S3",
    "flags",
];

pub fn results_csv(records: &[FidelityRecord]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(RESULTS_HEADER)?;
    for r in records {
        w.write_record([
            r.benchmark_id.clone(),
            r.kind.to_string(),
            r.width.to_string(),
            r.depth.to_string(),
            r.shape.0.to_string(),
            r.shape.1.to_string(),
            fmt_f64(r.f_hat),
            fmt_f64(r.f_clamped),
            fmt_f64(r.sigma_boot),
            fmt_f64(r.s1),
            fmt_f64(r.s2),
            fmt_f64(r.s3),
            r.flags.join(";"),
        ])?;
    }
    Ok(String::from_utf8(w.into_inner().map_err(|e| e.into_error())?).expect("utf-8"))
}

fn parse_f64(s: &str) -> Result<f64> {
    s.parse()
        .map_err(|_| Error::InvalidArgument(format!("bad number {s:?} in results")))
}

fn parse_usize(s: &str) -> Result<usize> {
    s.parse()
        .map_err(|_| Error::InvalidArgument(format!("bad integer {s:?} in results")))
}

/// Inverse of [`results_csv`].
pub fn read_results_csv(text: &str) -> Result<Vec<FidelityRecord>> {
    let mut rd = csv::Reader::from_reader(text.as_bytes());
    let header: Vec<String> = rd.headers()?.iter().map(str::to_string).collect();
    if header != RESULTS_HEADER {
        return Err(Error::Schema {
            path: "results.csv header".into(),
            msg: format!("expected {RESULTS_HEADER:?}"),
        });
    }
    let mut out = Vec::new();
    for row in rd.records() {
        let row = row?;
        let kind: BenchmarkType = serde_json::from_value(serde_json::Value::from(&row[1]))?;
        out.push(FidelityRecord {
            benchmark_id: row[0].to_string(),
            kind,
            width: parse_usize(&row[2])?,
            depth: parse_usize(&row[3])?,
            shape: (parse_usize(&row[4])?, parse_usize(&row[5])?),
            f_hat: parse_f64(&row[6])?,
            f_clamped: parse_f64(&row[7])?,
            sigma_boot: parse_f64(&row[8])?,
            s1: parse_f64(&row[9])?,
            s2: parse_f64(&row[10])?,
            s3: parse_f64(&row[11])?,
            flags: row[12]
                .split(';')
                .filter(|s| !s.is_empty())
                .map(str::to_string)
                .collect(),
        });
    }
    Ok(out)
}

/// Raw per-proxy polarizations.
pub fn polarizations_csv(rows: &[(String, RecordKind, PolarizationEstimate)]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["circuit_id", "benchmark_id", "kind", "shots", "S"])?;
    for (parent, kind, p) in rows {
        let kind = serde_json::to_value(kind)?;
        w.write_record([
            p.circuit_id.clone(),
            parent.clone(),
            kind.as_str().unwrap_or_default().to_string(),
            p.shots.to_string(),
            fmt_f64(p.s),
        ])?;
    }
    Ok(String::from_utf8(w.into_inner().map_err(|e| e.into_error())?).expect("utf-8"))
}

/// Mean, min and max finite `F̂` per shape.
pub fn volumetric_summary(records: &[FidelityRecord]) -> Vec<VolumetricCell> {
    let mut groups: BTreeMap<(usize, usize), Vec<f64>> = BTreeMap::new();
    for r in records {
        let g = groups.entry(r.shape).or_default();
        if r.f_hat.is_finite() {
            g.push(r.f_hat);
        }
    }
    groups
        .into_iter()
        .map(|((width, depth), fs)| {
            let count = fs.len();
            let (mean, min, max) = if fs.is_empty() {
                (f64::NAN, f64::NAN, f64::NAN)
            } else {
                (
                    fs.iter().sum::<f64>() / count as f64,
                    fs.iter().copied().fold(f64::INFINITY, f64::min),
                    fs.iter().copied().fold(f64::NEG_INFINITY, f64::max),
                )
            };
            VolumetricCell {
                width,
                depth,
                count,
                mean,
                min,
                max,
            }
        })
        .collect()
}

pub fn volumetric_csv(cells: &[VolumetricCell]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["shape_w", "shape_d", "count", "mean_F", "min_F", "max_F"])?;
    for c in cells {
        w.write_record([
            c.width.to_string(),
            c.depth.to_string(),
            c.count.to_string(),
            fmt_f64(c.mean),
            fmt_f64(c.min),
            fmt_f64(c.max),
        ])?;
    }
    Ok(String::from_utf8(w.into_inner().map_err(|e| e.into_error())?).expect("utf-8"))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn polarization_examples() {
        assert_eq!(polarization_from_histogram(&[10, 0, 0]).unwrap(), 1.0);
        // n = 1, h0 = 0.75.
        assert!(close(polarization_from_histogram(&[3, 1]).unwrap(), 0.5, 1e-15));
        // Uniform over all 2^n strings: h_k = C(n, k).
        for n in 1..=12usize {
            let mut h = vec![0u64; n + 1];
            let mut c = 1u64;
            for (k, x) in h.iter_mut().enumerate() {
                *x = c;
                c = c * (n - k) as u64 / (k + 1) as u64;
            }
            assert!(polarization_from_histogram(&h).unwrap().abs() < 1e-12, "n = {n}");
        }
        assert!(matches!(polarization_from_histogram(&[0, 0]), Err(Error::EmptyShots)));
    }

    #[test]
    fn estimator_examples() {
        assert_eq!(mcfe_estimate(1.0, 1.0, 1.0, 3).f_hat, 1.0);
        let e = mcfe_estimate(0.8, 0.9, 0.9, 2);
        let g = 0.8 / 0.9;
        assert!(close(e.gamma, g, 1e-15));
        assert!(close(e.f_hat, g + (1.0 - g) / 16.0, 1e-15));
        assert!(close(e.f_hat, 0.895_833_333_333, 1e-9));
        let u = mcfe_estimate(0.5, 1e-6, 1e-6, 4);
        assert!(!u.defined && u.f_hat.is_nan());
        assert_eq!(polarization_to_fidelity(1.0, 5), 1.0);
        assert_eq!(polarization_to_fidelity(0.0, 3), 1.0 / 64.0);
        let over = mcfe_estimate(1.0, 0.9, 0.9, 1);
        assert!(over.f_hat > 1.0 && over.f_clamped == 1.0);
    }

    #[test]
    fn classical_examples() {
        let delta = OutcomeDistribution::new(BTreeMap::from([("00".to_string(), 1.0)])).unwrap();
        let uniform = OutcomeDistribution::from_dense(&[0.25; 4]);
        assert!(close(classical_fidelity(&delta, &uniform).unwrap(), 0.25, 1e-15));
        assert!(close(normalized_classical_fidelity(&delta, &uniform, 2).unwrap(), 0.0, 1e-15));
        let p = OutcomeDistribution::from_dense(&[0.5, 0.2, 0.3, 0.0]);
        assert!(close(classical_fidelity(&p, &p).unwrap(), 1.0, 1e-12));
        assert!(close(normalized_classical_fidelity(&p, &p, 2).unwrap(), 1.0, 1e-12));
        assert!(matches!(
            normalized_classical_fidelity(&uniform, &delta, 2),
            Err(Error::IllConditioned(_))
        ));
    }

    #[test]
    fn error_rate_examples() {
        let e = effective_error_rate(&[0.96059601], 2, 2).unwrap();
        assert!(close(e.epsilon, 0.01, 1e-12));
        assert!(close(predict_full_fidelity(0.01, 6, 10), 0.99f64.powi(60), 1e-12));
        assert!(close(predict_full_fidelity(0.01, 6, 10), 0.5472, 1e-4));
        let one = effective_error_rate(&[1.0, 1.0], 3, 4).unwrap();
        assert_eq!(one.epsilon, 0.0);
        assert_eq!(predict_full_fidelity(one.epsilon, 3, 4), 1.0);
        let c = effective_error_rate(&[0.5, -0.1], 1, 1).unwrap();
        assert_eq!(c.clamped, 1);
        assert!(c.epsilon <= 1.0);
        assert!(effective_error_rate(&[], 1, 1).is_err());
    }

    #[test]
    fn bootstrap_zero_variance_and_determinism() {
        let data = BenchmarkShots {
            n: 3,
            m1: vec![vec![100, 0, 0, 0]; 4],
            m2: vec![vec![100, 0, 0, 0]; 4],
            m3: vec![vec![100, 0, 0, 0]; 4],
        };
        assert_eq!(bootstrap_sigma(&data, 50, 1), 0.0);
        let noisy = BenchmarkShots {
            n: 2,
            m1: vec![vec![80, 15, 5], vec![70, 20, 10]],
            m2: vec![vec![85, 10, 5], vec![75, 20, 5]],
            m3: vec![vec![95, 5, 0]],
        };
        let a = bootstrap_sigma(&noisy, 100, 7);
        assert!(a > 0.0);
        assert_eq!(a, bootstrap_sigma(&noisy, 100, 7));
    }

    #[test]
    fn resampling_preserves_totals() {
        let mut rng = rng_from_seed(3);
        for h in [vec![5u64, 0, 7, 1], vec![0, 0, 9], vec![1000, 1, 0, 0, 0]] {
            let r = resample_histogram(&h, &mut rng);
            assert_eq!(r.iter().sum::<u64>(), h.iter().sum::<u64>());
            for (a, b) in h.iter().zip(&r) {
                assert!(*a > 0 || *b == 0);
            }
        }
    }

    fn rec(shape: (usize, usize), f: f64) -> FidelityRecord {
        FidelityRecord {
            benchmark_id: format!("b{}x{}_{f}", shape.0, shape.1),
            kind: BenchmarkType::Subcircuit,
            width: shape.0,
            depth: shape.1,
            shape,
            f_hat: f,
            f_clamped: f.clamp(0.0, 1.0),
            sigma_boot: 0.01,
            s1: 0.9,
            s2: 0.9,
            s3: 1.0,
            flags: vec![],
        }
    }

    #[test]
    fn volumetric_cells() {
        let one = volumetric_summary(&[rec((2, 2), 0.9)]);
        assert_eq!(one.len(), 1);
        assert_eq!((one[0].mean, one[0].count), (0.9, 1));
        let two = volumetric_summary(&[rec((2, 2), 0.9), rec((2, 2), 0.7), rec((4, 8), 0.5)]);
        assert_eq!(two.len(), 2);
        assert!(close(two[0].mean, 0.8, 1e-15));
        assert_eq!((two[0].min, two[0].max), (0.7, 0.9));
    }

    #[test]
    fn results_csv_round_trip() {
        let mut r = rec((2, 4), 0.93);
        r.flags = vec!["clamped".into(), "intrinsic".into()];
        let mut u = rec((2, 4), f64::NAN);
        u.flags = vec!["estimate_undefined".into()];
        let text = results_csv(&[r.clone(), u]).unwrap();
        assert!(text.starts_with("benchmark_id,kind,width,depth,shape_w,shape_d,F_hat,F_clamped,sigma_boot,S1,S2,S3,flags\n"));
        let back = read_results_csv(&text).unwrap();
        assert_eq!(back[0], r);
        assert!(back[1].f_hat.is_nan());
    }
}
