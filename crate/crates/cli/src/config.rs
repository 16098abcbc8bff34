//! Experiment configuration files.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context};
use mirrorbench::algo::{self, PauliSumHamiltonian, TrotterSpec};
use mirrorbench::bench::ShapeSpec;
use mirrorbench::io::{parse_qasm, BenchmarkType};
use mirrorbench::mirror::SamplingParams;
use mirrorbench::rng::derive_seed;
use mirrorbench::sim::NoiseModel;
use mirrorbench::transpile::{decompose_to_basis, TranspileConfig};
use mirrorbench::{Circuit, CouplingGraph};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub benchmark_type: BenchmarkType,
    pub inputs: Vec<InputSpec>,
    #[serde(default)]
    pub noise: NoiseModel,
    pub sampling: Sampling,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub transpile: Option<TranspileSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub shapes: Option<ShapeSpec>,
    pub shots: u64,
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Sampling {
    pub m1: usize,
    pub m2: usize,
    pub m3: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TranspileSection {
    pub coupling: CouplingGraph,
    #[serde(default = "one")]
    pub approximation_degree: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub initial_layout: Option<Vec<usize>>,
    #[serde(default = "one_rep")]
    pub repetitions: usize,
}

fn one() -> f64 {
    1.0
}

fn one_rep() -> usize {
    1
}

/// One input circuit: a QASM file or a built-in family.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case", deny_unknown_fields)]
pub enum InputSpec {
    Qasm {
        path: PathBuf,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        id: Option<String>,
    },
    Qft {
        n: usize,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        id: Option<String>,
    },
    QftRoundtrip {
        n: usize,
        x: usize,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        id: Option<String>,
    },
    Brickwork {
        n: usize,
        depth: usize,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        seed: Option<u64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        id: Option<String>,
    },
    Qaoa {
        n: usize,
        #[serde(default = "one_rep")]
        reps: usize,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        seed: Option<u64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        id: Option<String>,
    },
    Trotter {
        hamiltonian: HamiltonianSpec,
        order: u8,
        steps: usize,
        #[serde(default = "one")]
        time: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        id: Option<String>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "snake_case", deny_unknown_fields)]
pub enum HamiltonianSpec {
    Tfim { n: usize },
    Heisenberg { n: usize },
    Max3sat { n: usize, r: usize, seed: u64 },
}

impl HamiltonianSpec {
    pub fn build(&self) -> mirrorbench::Result<PauliSumHamiltonian> {
        match *self {
            HamiltonianSpec::Tfim { n } => algo::tfim(n),
            HamiltonianSpec::Heisenberg { n } => algo::heisenberg(n),
            HamiltonianSpec::Max3sat { n, r, seed } => algo::max3sat(n, r, seed),
        }
    }

    fn label(&self) -> String {
        match *self {
            HamiltonianSpec::Tfim { n } => format!("tfim{n}"),
            HamiltonianSpec::Heisenberg { n } => format!("heisenberg{n}"),
            HamiltonianSpec::Max3sat { n, r, seed } => format!("max3sat{n}_r{r}_s{seed}"),
        }
    }
}

/// Trotter input with its id, for the algorithmic fidelity column.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrotterInput<'a> {
    pub hamiltonian: &'a HamiltonianSpec,
    pub spec: TrotterSpec,
}

impl InputSpec {
    fn explicit_id(&self) -> Option<&str> {
        match self {
            InputSpec::Qasm { id, .. }
            | InputSpec::Qft { id, .. }
            | InputSpec::QftRoundtrip { id, .. }
            | InputSpec::Brickwork { id, .. }
            | InputSpec::Qaoa { id, .. }
            | InputSpec::Trotter { id, .. } => id.as_deref(),
        }
    }

    /// Id of the circuit this input produces.
    pub fn id(&self, index: usize, master: u64) -> String {
        if let Some(id) = self.explicit_id() {
            return id.to_string();
        }
        match self {
            InputSpec::Qasm { path, .. } => path
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_else(|| format!("c{index}")),
            InputSpec::Qft { n, .. } => format!("qft{n}"),
            InputSpec::QftRoundtrip { n, x, .. } => format!("qft{n}_x{x}"),
            InputSpec::Brickwork { n, depth, seed, .. } => {
                format!("brick{n}x{depth}_s{}", self.family_seed(*seed, index, master))
            }
            InputSpec::Qaoa { n, seed, .. } => format!("qaoa{n}_s{}", self.family_seed(*seed, index, master)),
            InputSpec::Trotter {
                hamiltonian,
                order,
                steps,
                ..
            } => format!("{}_o{order}_m{steps}", hamiltonian.label()),
        }
    }

    fn family_seed(&self, seed: Option<u64>, index: usize, master: u64) -> u64 {
        seed.unwrap_or_else(|| derive_seed(master, &format!("input/{index}")))
    }

    pub fn trotter(&self) -> Option<TrotterInput<'_>> {
        match self {
            InputSpec::Trotter {
                hamiltonian,
                order,
                steps,
                time,
                ..
            } => Some(TrotterInput {
                hamiltonian,
                spec: TrotterSpec {
                    order: *order,
                    steps: *steps,
                    time: *time,
                },
            }),
            _ => None,
        }
    }

    /// Build the circuit. Built-in families are lowered to the basis gate
    /// set when `native` is set; QASM files are used as written.
    pub fn build(&self, index: usize, master: u64, base: &Path, native: bool) -> anyhow::Result<Circuit> {
        let c = match self {
            InputSpec::Qasm { path, .. } => {
                let p = base.join(path);
                let text = std::fs::read_to_string(&p).with_context(|| format!("reading {}", p.display()))?;
                let c = parse_qasm(&text).with_context(|| format!("parsing {}", p.display()))?;
                return Ok(c.with_id(self.id(index, master)));
            }
            InputSpec::Qft { n, .. } => algo::qft_circuit(*n),
            InputSpec::QftRoundtrip { n, x, .. } => {
                if *n >= usize::BITS as usize || *x >> *n != 0 {
                    bail!("inputs[{index}]: x = {x} does not fit in {n} bits");
                }
                algo::qft_roundtrip_circuit(*n, *x)
            }
            InputSpec::Brickwork { n, depth, seed, .. } => {
                algo::brickwork_u3_cz(*n, *depth, self.family_seed(*seed, index, master))
            }
            InputSpec::Qaoa { n, reps, seed, .. } => {
                algo::qaoa_circuit(*n, self.family_seed(*seed, index, master), *reps)?
            }
            InputSpec::Trotter { .. } => {
                let t = self.trotter().expect("trotter input");
                t.spec.validate()?;
                algo::trotter_circuit(&t.hamiltonian.build()?, t.spec)?
            }
        };
        let c = if native { decompose_to_basis(&c)? } else { c };
        Ok(c.with_id(self.id(index, master)))
    }
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> anyhow::Result<Self> {
        let de = &mut serde_json::Deserializer::from_str(text);
        let cfg: ExperimentConfig = serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            anyhow::anyhow!("config error at `{path}`: {}", e.into_inner())
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> anyhow::Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        Self::from_json(&text)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("config serializes");
        s.push('\n');
        s
    }

    pub fn validate(&self) -> anyhow::Result<()> {
        if self.inputs.is_empty() {
            bail!("config error at `inputs`: no input circuits");
        }
        if self.shots == 0 {
            bail!("config error at `shots`: must be >= 1");
        }
        self.noise.validate().context("config error at `noise`")?;
        self.sampling_params().validate().context("config error at `sampling`")?;
        match self.benchmark_type {
            BenchmarkType::FullStack if self.transpile.is_none() => {
                bail!("config error at `transpile`: full_stack suites need a transpile section")
            }
            BenchmarkType::Subcircuit => match &self.shapes {
                None => bail!("config error at `shapes`: subcircuit suites need a shape spec"),
                Some(s) => s.validate().context("config error at `shapes`")?,
            },
            _ => {}
        }
        Ok(())
    }

    pub fn sampling_params(&self) -> SamplingParams {
        SamplingParams {
            m1: self.sampling.m1,
            m2: self.sampling.m2,
            m3: self.sampling.m3,
            seed: self.seed,
        }
    }

    /// Transpile configuration with a seed derived from the master seed.
    pub fn transpile_config(&self) -> anyhow::Result<Option<(TranspileConfig, usize)>> {
        let Some(t) = &self.transpile else {
            return Ok(None);
        };
        let mut cfg = TranspileConfig::new(
            t.coupling.clone(),
            t.approximation_degree,
            derive_seed(self.seed, "transpile"),
        )
        .context("config error at `transpile`")?;
        cfg.initial_layout = t.initial_layout.clone();
        cfg.validate().context("config error at `transpile`")?;
        Ok(Some((cfg, t.repetitions)))
    }

    /// Build all input circuits.
    pub fn build_inputs(&self, base: &Path) -> anyhow::Result<Vec<Circuit>> {
        let native = self.benchmark_type != BenchmarkType::FullStack;
        self.inputs
            .iter()
            .enumerate()
            .map(|(i, spec)| spec.build(i, self.seed, base, native))
            .collect()
    }

    /// Trotter inputs keyed by input id.
    pub fn trotter_inputs(&self) -> Vec<(String, TrotterInput<'_>)> {
        self.inputs
            .iter()
            .enumerate()
            .filter_map(|(i, s)| s.trotter().map(|t| (s.id(i, self.seed), t)))
            .collect()
    }
}
