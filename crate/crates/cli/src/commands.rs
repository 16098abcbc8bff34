//! The pipeline stages. Each reads and writes files in an experiment
//! directory.

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;
use std::fs::{self, File};
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{anyhow, Context};
use mirrorbench::algo::{algorithmic_process_fidelity, full_process_fidelity, ALGORITHMIC_LIMIT};
use mirrorbench::analysis::{
    analyze, effective_error_rate, polarizations_csv, predict_full_fidelity, read_results_csv, results_csv,
    volumetric_csv, volumetric_summary, volumetric_svg, AnalysisConfig, FidelityRecord,
};
use mirrorbench::bench::{build_full_stack, build_low_level, build_subcircuit, Suite};
use mirrorbench::io::{read_jsonl, read_manifest, write_jsonl_line, write_manifest, BenchmarkType, Manifest, RecordKind};
use mirrorbench::rng::derive_seed;
use mirrorbench::sim::{
    exact_process_fidelity, fake_uniform_shots, process_fidelity_to_target, sample_shots, NoiseModel, ShotTable,
    ORACLE_LIMIT,
};
use mirrorbench::transpile::physical_unitary;
use mirrorbench::{Circuit, Error};
use rayon::prelude::*;
use serde::Serialize;

use crate::config::ExperimentConfig;

pub const CONFIG: &str = "config.json";
pub const MANIFEST: &str = "manifest.json";
pub const CIRCUITS: &str = "circuits.jsonl";
pub const SHOTS: &str = "shots.jsonl";
pub const SIMULATION: &str = "simulation.json";
pub const RESULTS: &str = "results.csv";
pub const POLARIZATIONS: &str = "polarizations.csv";
pub const VOLUMETRIC: &str = "volumetric.csv";
pub const ORACLE: &str = "oracle.csv";
pub const REPORT: &str = "report.svg";
pub const SUMMARY: &str = "summary.txt";

/// Circuits handed to the worker pool at a time.
const CHUNK: usize = 256;

/// Failure with the process exit code it maps to.
#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub error: anyhow::Error,
}

pub type Outcome<T = ()> = Result<T, Failure>;

pub fn config_error(e: impl Into<anyhow::Error>) -> Failure {
    Failure { code: 2, error: e.into() }
}

pub fn missing(e: impl Into<anyhow::Error>) -> Failure {
    Failure { code: 3, error: e.into() }
}

pub fn failed(e: impl Into<anyhow::Error>) -> Failure {
    Failure { code: 1, error: e.into() }
}

/// Library errors: missing shot data is exit 3, everything else exit 1.
fn lib(e: Error) -> Failure {
    match e {
        Error::MissingData(_) => missing(e),
        e => failed(e),
    }
}

/// Command-line overrides shared by the stages.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub shots: Option<u64>,
    pub seed: Option<u64>,
}

impl Overrides {
    fn apply(&self, cfg: &mut ExperimentConfig) {
        if let Some(s) = self.shots {
            cfg.shots = s;
        }
        if let Some(s) = self.seed {
            cfg.seed = s;
        }
    }
}

fn write_file(path: &Path, contents: &str) -> Outcome {
    fs::write(path, contents)
        .with_context(|| format!("writing {}", path.display()))
        .map_err(failed)
}

fn require(dir: &Path, name: &str, hint: &str) -> Outcome<PathBuf> {
    let p = dir.join(name);
    if p.is_file() {
        Ok(p)
    } else {
        Err(missing(anyhow!("{} not found; {hint}", p.display())))
    }
}

fn load_dir_config(dir: &Path, ov: &Overrides) -> Outcome<ExperimentConfig> {
    let p = require(dir, CONFIG, "run `generate` first")?;
    let mut cfg = ExperimentConfig::load(&p).map_err(config_error)?;
    ov.apply(&mut cfg);
    Ok(cfg)
}

fn load_manifest(dir: &Path) -> Outcome<Manifest> {
    let p = require(dir, MANIFEST, "run `generate` first")?;
    read_manifest(&p).map_err(config_error)
}

fn load_noise(path: Option<&Path>, cfg: &ExperimentConfig) -> Outcome<NoiseModel> {
    let Some(p) = path else {
        return Ok(cfg.noise.clone());
    };
    let text = fs::read_to_string(p)
        .with_context(|| format!("reading {}", p.display()))
        .map_err(config_error)?;
    let de = &mut serde_json::Deserializer::from_str(&text);
    let nm: NoiseModel = serde_path_to_error::deserialize(de)
        .map_err(|e| config_error(anyhow!("noise model error at `{}`: {}", e.path(), e.inner())))?;
    nm.validate().map_err(config_error)?;
    Ok(nm)
}

fn build_suite(cfg: &ExperimentConfig, base: &Path) -> Outcome<Suite> {
    let inputs = cfg.build_inputs(base).map_err(config_error)?;
    let params = cfg.sampling_params();
    let suite = match cfg.benchmark_type {
        BenchmarkType::LowLevel => build_low_level(&inputs, params, cfg.shots),
        BenchmarkType::FullStack => {
            let (t, reps) = cfg.transpile_config().map_err(config_error)?.expect("validated");
            build_full_stack(&inputs, &t, reps, params, cfg.shots)
        }
        BenchmarkType::Subcircuit => {
            build_subcircuit(&inputs, cfg.shapes.as_ref().expect("validated"), params, cfg.shots)
        }
    };
    suite.map_err(config_error)
}

/// `generate`: write the config copy, all circuits and the manifest.
pub fn generate(config: &Path, out: Option<&Path>, ov: &Overrides) -> Outcome {
    let start = Instant::now();
    let mut cfg = ExperimentConfig::load(config).map_err(config_error)?;
    ov.apply(&mut cfg);
    let dir = out
        .map(Path::to_path_buf)
        .or_else(|| cfg.output.clone())
        .ok_or_else(|| config_error(anyhow!("no output directory: pass --out or set `output`")))?;
    let base = config.parent().unwrap_or(Path::new("."));
    let suite = build_suite(&cfg, base)?;

    fs::create_dir_all(&dir)
        .with_context(|| format!("creating {}", dir.display()))
        .map_err(failed)?;
    write_file(&dir.join(CONFIG), &cfg.to_json())?;
    for stale in [SHOTS, SIMULATION, RESULTS, POLARIZATIONS, VOLUMETRIC, ORACLE, REPORT, SUMMARY] {
        let _ = fs::remove_file(dir.join(stale));
    }

    let path = dir.join(CIRCUITS);
    let file = File::create(&path)
        .with_context(|| format!("writing {}", path.display()))
        .map_err(failed)?;
    let mut w = BufWriter::new(file);
    for c in suite.inputs.iter().chain(suite.benchmarks.iter().map(|b| &b.circuit)) {
        write_jsonl_line(&mut w, c).map_err(failed)?;
    }
    let manifest = suite
        .generate(CHUNK, |m| write_jsonl_line(&mut w, &m.circuit))
        .map_err(lib)?;
    w.flush().map_err(failed)?;
    write_manifest(dir.join(MANIFEST), &manifest).map_err(failed)?;

    println!(
        "{} benchmark(s), {} proxies listed in {}",
        suite.benchmarks.len(),
        suite.proxy_count(),
        dir.join(MANIFEST).display()
    );
    println!("t_c-generate: {:.3} s", start.elapsed().as_secs_f64());
    Ok(())
}

#[derive(Serialize)]
struct FailedCircuit {
    id: String,
    error: String,
}

#[derive(Serialize)]
struct SimulationLog {
    noise: Option<NoiseModel>,
    fake_uniform: bool,
    shots: u64,
    seed: u64,
    tables: usize,
    failed: Vec<FailedCircuit>,
}

/// `simulate`: one shot table per proxy, in manifest order.
pub fn simulate(dir: &Path, noise: Option<&Path>, fake_uniform: bool, ov: &Overrides) -> Outcome {
    let start = Instant::now();
    let cfg = load_dir_config(dir, ov)?;
    let manifest = load_manifest(dir)?;
    let nm = if fake_uniform { None } else { Some(load_noise(noise, &cfg)?) };
    let (shots, seed) = (cfg.shots, cfg.seed);

    let mut results: Vec<Result<ShotTable, FailedCircuit>> = Vec::new();
    let fail = |id: &str, e: Error| FailedCircuit {
        id: id.to_string(),
        error: e.to_string(),
    };
    match &nm {
        None => {
            let mirrors: Vec<_> = manifest.records.iter().filter(|r| r.kind.is_mirror()).collect();
            results = mirrors
                .par_iter()
                .map(|r| {
                    let s = derive_seed(seed, &format!("fake/{}", r.id));
                    fake_uniform_shots(r.id.clone(), r.width, shots, s).map_err(|e| fail(&r.id, e))
                })
                .collect();
        }
        Some(nm) => {
            let kinds: HashMap<&str, RecordKind> =
                manifest.records.iter().map(|r| (r.id.as_str(), r.kind)).collect();
            let path = require(dir, CIRCUITS, "run `generate` first")?;
            let file = File::open(&path).map_err(failed)?;
            let mut stream = read_jsonl::<Circuit>(BufReader::new(file)).filter(|c| match c {
                Ok(c) => kinds.get(c.id.as_str()).is_some_and(|k| k.is_mirror()),
                Err(_) => true,
            });
            loop {
                let chunk: Vec<Circuit> = stream
                    .by_ref()
                    .take(CHUNK)
                    .collect::<Result<_, _>>()
                    .map_err(config_error)?;
                if chunk.is_empty() {
                    break;
                }
                results.par_extend(
                    chunk
                        .par_iter()
                        .map(|c| sample_shots(c, nm, shots, seed).map_err(|e| fail(&c.id, e))),
                );
            }
        }
    }

    let path = dir.join(SHOTS);
    let file = File::create(&path)
        .with_context(|| format!("writing {}", path.display()))
        .map_err(failed)?;
    let mut w = BufWriter::new(file);
    let mut failures = Vec::new();
    let mut tables = 0;
    for r in results {
        match r {
            Ok(t) => {
                write_jsonl_line(&mut w, &t).map_err(failed)?;
                tables += 1;
            }
            Err(f) => failures.push(f),
        }
    }
    w.flush().map_err(failed)?;

    let n_failed = failures.len();
    let log = SimulationLog {
        noise: nm,
        fake_uniform,
        shots,
        seed,
        tables,
        failed: failures,
    };
    let mut text = serde_json::to_string_pretty(&log).expect("log serializes");
    text.push('\n');
    write_file(&dir.join(SIMULATION), &text)?;

    println!("{tables} shot table(s) written to {}", path.display());
    println!("t_simulate: {:.3} s", start.elapsed().as_secs_f64());
    if n_failed > 0 {
        return Err(failed(anyhow!(
            "{n_failed} circuit(s) could not be simulated; see {}",
            dir.join(SIMULATION).display()
        )));
    }
    Ok(())
}

/// `analyze`: fidelity estimates with bootstrap uncertainties.
pub fn analyze_dir(dir: &Path, ov: &Overrides) -> Outcome {
    let start = Instant::now();
    let cfg = load_dir_config(dir, ov)?;
    let manifest = load_manifest(dir)?;
    let path = require(dir, SHOTS, "run `simulate` first")?;
    let file = File::open(&path).map_err(failed)?;
    let tables: Vec<ShotTable> = read_jsonl(BufReader::new(file))
        .collect::<Result<_, _>>()
        .map_err(config_error)?;
    let acfg = AnalysisConfig {
        seed: cfg.seed,
        ..AnalysisConfig::default()
    };
    let a = analyze(&manifest, &tables, &acfg).map_err(lib)?;
    write_file(&dir.join(RESULTS), &results_csv(&a.records).map_err(failed)?)?;
    write_file(&dir.join(POLARIZATIONS), &polarizations_csv(&a.polarizations).map_err(failed)?)?;
    println!("{} benchmark(s) analyzed into {}", a.records.len(), dir.join(RESULTS).display());
    println!("t_analyze: {:.3} s", start.elapsed().as_secs_f64());
    Ok(())
}

fn load_results(dir: &Path) -> Outcome<Vec<FidelityRecord>> {
    let p = require(dir, RESULTS, "run `analyze` first")?;
    let text = fs::read_to_string(&p).map_err(failed)?;
    read_results_csv(&text).map_err(config_error)
}

fn fmt(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.6}")
    } else {
        "nan".into()
    }
}

/// Input id each benchmark was built from.
fn benchmark_inputs(manifest: &Manifest) -> BTreeMap<String, String> {
    manifest
        .benchmarks()
        .map(|r| (r.id.clone(), r.parent_id.clone().unwrap_or_else(|| r.id.clone())))
        .collect()
}

/// `report`: volumetric SVG and a text summary.
pub fn report(dir: &Path, ov: &Overrides) -> Outcome {
    let cfg = load_dir_config(dir, ov)?;
    let manifest = load_manifest(dir)?;
    let records = load_results(dir)?;
    let cells = volumetric_summary(&records);
    let title = format!("{} suite: mean process fidelity", manifest.benchmark_type);
    write_file(&dir.join(REPORT), &volumetric_svg(&cells, &title))?;
    write_file(&dir.join(VOLUMETRIC), &volumetric_csv(&cells).map_err(failed)?)?;

    let mut s = String::new();
    let _ = writeln!(s, "benchmark type: {}", manifest.benchmark_type);
    let _ = writeln!(
        s,
        "proxies per benchmark: {} / {} / {} (M1 / M2 / M3), {} shots, seed {}",
        manifest.sampling.m1, manifest.sampling.m2, manifest.sampling.m3, manifest.sampling.shots, manifest.sampling.seed
    );
    let _ = writeln!(s, "\n{:<32} {:>5} {:>6} {:>10} {:>10}  flags", "benchmark", "width", "depth", "F_hat", "sigma");
    for r in &records {
        let line = format!(
            "{:<32} {:>5} {:>6} {:>10} {:>10}  {}",
            r.benchmark_id,
            r.width,
            r.depth,
            fmt(r.f_hat),
            fmt(r.sigma_boot),
            r.flags.join(";")
        );
        let _ = writeln!(s, "{}", line.trim_end());
    }

    let _ = writeln!(s, "\nvolumetric summary");
    let _ = writeln!(s, "{:>5} {:>6} {:>6} {:>10} {:>10} {:>10}", "width", "depth", "count", "mean", "min", "max");
    for c in &cells {
        let _ = writeln!(
            s,
            "{:>5} {:>6} {:>6} {:>10} {:>10} {:>10}",
            c.width,
            c.depth,
            c.count,
            fmt(c.mean),
            fmt(c.min),
            fmt(c.max)
        );
    }

    if manifest.benchmark_type == BenchmarkType::Subcircuit {
        error_rate_section(&mut s, &manifest, &records);
    }
    trotter_section(&mut s, &cfg, &manifest, &records).map_err(config_error)?;

    write_file(&dir.join(SUMMARY), &s)?;
    print!("{s}");
    Ok(())
}

fn error_rate_section(s: &mut String, manifest: &Manifest, records: &[FidelityRecord]) {
    let inputs = benchmark_inputs(manifest);
    let mut groups: BTreeMap<(String, (usize, usize)), Vec<f64>> = BTreeMap::new();
    for r in records {
        if let Some(parent) = inputs.get(&r.benchmark_id) {
            groups.entry((parent.clone(), r.shape)).or_default().push(r.f_hat);
        }
    }
    let _ = writeln!(s, "\neffective error rates");
    let _ = writeln!(
        s,
        "{:<24} {:>5} {:>6} {:>12} {:>12}",
        "input", "width", "depth", "epsilon", "F_predicted"
    );
    for ((parent, (w, d)), fs) in groups {
        let full = manifest.record(&parent);
        let (eps, pred) = match effective_error_rate(&fs, w, d) {
            Ok(e) => {
                let pred = full.map(|f| predict_full_fidelity(e.epsilon, f.width, f.depth));
                (e.epsilon, pred.unwrap_or(f64::NAN))
            }
            Err(_) => (f64::NAN, f64::NAN),
        };
        let _ = writeln!(s, "{:<24} {:>5} {:>6} {:>12} {:>12}", parent, w, d, fmt(eps), fmt(pred));
    }
}

/// Algorithmic, noise and full fidelity of every Trotter benchmark.
fn trotter_section(
    s: &mut String,
    cfg: &ExperimentConfig,
    manifest: &Manifest,
    records: &[FidelityRecord],
) -> anyhow::Result<()> {
    let trotter = cfg.trotter_inputs();
    if trotter.is_empty() || manifest.benchmark_type == BenchmarkType::Subcircuit {
        return Ok(());
    }
    let inputs = benchmark_inputs(manifest);
    let mut f_alg = HashMap::new();
    for (id, t) in &trotter {
        let h = t.hamiltonian.build()?;
        let f = if h.n() <= ALGORITHMIC_LIMIT {
            algorithmic_process_fidelity(&h, t.spec)?
        } else {
            f64::NAN
        };
        f_alg.insert(id.as_str(), f);
    }
    let _ = writeln!(s, "\nTrotter fidelities");
    let _ = writeln!(s, "{:<32} {:>10} {:>10} {:>10}", "benchmark", "F_alg", "F_noise", "F_full");
    for r in records {
        let Some(&fa) = inputs.get(&r.benchmark_id).and_then(|p| f_alg.get(p.as_str())) else {
            continue;
        };
        let full = full_process_fidelity(fa, r.f_hat.clamp(0.0, 1.0)).unwrap_or(f64::NAN);
        let _ = writeln!(
            s,
            "{:<32} {:>10} {:>10} {:>10}",
            r.benchmark_id,
            fmt(fa),
            fmt(r.f_hat),
            fmt(full)
        );
    }
    Ok(())
}

#[derive(Serialize)]
struct OracleRow {
    benchmark_id: String,
    width: usize,
    depth: usize,
    #[serde(rename = "F_exact")]
    f_exact: f64,
    #[serde(rename = "F_hat")]
    f_hat: Option<f64>,
    deviation: Option<f64>,
}

/// `oracle`: exact process fidelity of every benchmark of width ≤ 6 beside
/// its estimate.
pub fn oracle(dir: &Path, noise: Option<&Path>, ov: &Overrides) -> Outcome {
    let cfg = load_dir_config(dir, ov)?;
    let manifest = load_manifest(dir)?;
    let nm = load_noise(noise, &cfg)?;
    let estimates: HashMap<String, f64> = if dir.join(RESULTS).is_file() {
        load_results(dir)?
            .into_iter()
            .map(|r| (r.benchmark_id, r.f_hat))
            .collect()
    } else {
        HashMap::new()
    };

    let wanted: HashMap<&str, RecordKind> = manifest
        .records
        .iter()
        .filter(|r| matches!(r.kind, RecordKind::Input | RecordKind::Benchmark) && r.width <= ORACLE_LIMIT)
        .map(|r| (r.id.as_str(), r.kind))
        .collect();
    let path = require(dir, CIRCUITS, "run `generate` first")?;
    let file = File::open(&path).map_err(failed)?;
    let mut circuits = HashMap::new();
    for c in read_jsonl::<Circuit>(BufReader::new(file)) {
        let c = c.map_err(config_error)?;
        if wanted.contains_key(c.id.as_str()) {
            circuits.insert(c.id.clone(), c);
        }
    }

    let benches: Vec<_> = manifest
        .benchmarks()
        .filter(|r| r.width <= ORACLE_LIMIT)
        .collect();
    let rows: Vec<OracleRow> = benches
        .par_iter()
        .map(|r| {
            let c = circuits
                .get(&r.id)
                .ok_or_else(|| missing(anyhow!("circuit {} not in {CIRCUITS}", r.id)))?;
            let f_exact = match manifest.benchmark_type {
                BenchmarkType::FullStack => {
                    let parent = r.parent_id.as_deref().unwrap_or_default();
                    let input = circuits
                        .get(parent)
                        .ok_or_else(|| missing(anyhow!("input {parent} not in {CIRCUITS}")))?;
                    let layout = |k: &str| -> Outcome<Vec<usize>> {
                        serde_json::from_value(r.extra.get(k).cloned().unwrap_or_default())
                            .map_err(|e| config_error(anyhow!("{}: bad {k}: {e}", r.id)))
                    };
                    let target = physical_unitary(input, c.n(), &layout("initial_layout")?, &layout("final_layout")?)
                        .map_err(lib)?;
                    process_fidelity_to_target(c, &nm, &target).map_err(lib)?
                }
                _ => exact_process_fidelity(c, &nm).map_err(lib)?,
            };
            let f_hat = estimates.get(&r.id).copied();
            Ok(OracleRow {
                benchmark_id: r.id.clone(),
                width: r.width,
                depth: r.depth,
                f_exact,
                f_hat,
                deviation: f_hat.map(|f| f - f_exact),
            })
        })
        .collect::<Outcome<_>>()?;

    let mut w = csv::Writer::from_writer(Vec::new());
    for row in &rows {
        w.serialize(row).map_err(failed)?;
    }
    let bytes = w.into_inner().map_err(|e| failed(anyhow!("{e}")))?;
    let text = String::from_utf8(bytes).expect("csv is utf-8");
    write_file(&dir.join(ORACLE), &text)?;
    println!("{} benchmark(s) of width <= {ORACLE_LIMIT} written to {}", rows.len(), dir.join(ORACLE).display());
    Ok(())
}
