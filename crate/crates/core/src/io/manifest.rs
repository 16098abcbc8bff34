use std::collections::{HashMap, HashSet};
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BenchmarkType {
    LowLevel,
    FullStack,
    Subcircuit,
}

impl std::fmt::Display for BenchmarkType {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            BenchmarkType::LowLevel => "low_level",
            BenchmarkType::FullStack => "full_stack",
            BenchmarkType::Subcircuit => "subcircuit",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum RecordKind {
    M1,
    M2,
    M3,
    #[serde(rename = "benchmark")]
    Benchmark,
    #[serde(rename = "input")]
    Input,
}

impl RecordKind {
    pub fn is_mirror(self) -> bool {
        matches!(self, RecordKind::M1 | RecordKind::M2 | RecordKind::M3)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SamplingRecord {
    pub m1: usize,
    pub m2: usize,
    pub m3: usize,
    pub shots: u64,
    pub seed: u64,
}

/// One circuit in an experiment directory.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CircuitRecord {
    pub id: String,
    pub kind: RecordKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub parent_id: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target_bitstring: Option<String>,
    pub width: usize,
    pub depth: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub shape: Option<(usize, usize)>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub transpile_config_digest: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    /// Fidelity of the compiled circuit to the intended unitary.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub intrinsic_fidelity: Option<f64>,
    /// Half-open layer window `[start, end)` a subcircuit was cut from.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub window: Option<(usize, usize)>,
    /// Parent qubits of a subcircuit, in new-label order.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub subset: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dropped_gates: Option<usize>,
    #[serde(flatten)]
    pub extra: Map<String, Value>,
}

impl CircuitRecord {
    pub fn new(id: impl Into<String>, kind: RecordKind, width: usize, depth: usize) -> Self {
        CircuitRecord {
            id: id.into(),
            kind,
            parent_id: None,
            target_bitstring: None,
            width,
            depth,
            shape: None,
            transpile_config_digest: None,
            seed: None,
            intrinsic_fidelity: None,
            window: None,
            subset: None,
            dropped_gates: None,
            extra: Map::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub benchmark_type: BenchmarkType,
    pub sampling: SamplingRecord,
    pub records: Vec<CircuitRecord>,
    #[serde(flatten)]
    pub extra: Map<String, Value>,
}

impl Manifest {
    pub fn new(benchmark_type: BenchmarkType, sampling: SamplingRecord) -> Self {
        Manifest {
            benchmark_type,
            sampling,
            records: Vec::new(),
            extra: Map::new(),
        }
    }

    /// Check id uniqueness, parent links and target lengths.
    pub fn validate(&self) -> Result<()> {
        let mut ids = HashSet::new();
        let kinds: HashMap<&str, RecordKind> =
            self.records.iter().map(|r| (r.id.as_str(), r.kind)).collect();
        for (i, r) in self.records.iter().enumerate() {
            let path = |f: &str| format!("records[{i}].{f}");
            if !ids.insert(r.id.as_str()) {
                return Err(Error::Schema {
                    path: path("id"),
                    msg: format!("duplicate id {:?}", r.id),
                });
            }
            if let Some(t) = &r.target_bitstring {
                if t.len() != r.width {
                    return Err(Error::Schema {
                        path: path("target_bitstring"),
                        msg: format!("length {} differs from width {}", t.len(), r.width),
                    });
                }
                if !t.bytes().all(|b| b == b'0' || b == b'1') {
                    return Err(Error::Schema {
                        path: path("target_bitstring"),
                        msg: "not a bitstring".into(),
                    });
                }
            }
            if r.kind.is_mirror() {
                if r.target_bitstring.is_none() {
                    return Err(Error::Schema {
                        path: path("target_bitstring"),
                        msg: "mirror records need a target".into(),
                    });
                }
                let parent = r.parent_id.as_deref().ok_or_else(|| Error::Schema {
                    path: path("parent_id"),
                    msg: "mirror records need a parent".into(),
                })?;
                if kinds.get(parent) != Some(&RecordKind::Benchmark) {
                    return Err(Error::Schema {
                        path: path("parent_id"),
                        msg: format!("{parent:?} is not a benchmark record"),
                    });
                }
            }
        }
        Ok(())
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let de = &mut serde_json::Deserializer::from_str(text);
        let m: Manifest = serde_path_to_error::deserialize(de).map_err(|e| Error::Schema {
            path: e.path().to_string(),
            msg: e.inner().to_string(),
        })?;
        m.validate()?;
        Ok(m)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn benchmarks(&self) -> impl Iterator<Item = &CircuitRecord> {
        self.records.iter().filter(|r| r.kind == RecordKind::Benchmark)
    }

    pub fn record(&self, id: &str) -> Option<&CircuitRecord> {
        self.records.iter().find(|r| r.id == id)
    }
}

pub fn read_manifest(path: impl AsRef<Path>) -> Result<Manifest> {
    Manifest::from_json(&std::fs::read_to_string(path)?)
}

pub fn write_manifest(path: impl AsRef<Path>, m: &Manifest) -> Result<()> {
    m.validate()?;
    std::fs::write(path, m.to_json()? + "\n")?;
    Ok(())
}
