//! Circuit and experiment file formats.

mod jsonl;
mod manifest;
mod qasm;

pub use jsonl::{read_jsonl, read_jsonl_all, write_jsonl, write_jsonl_line};
pub use manifest::{
    read_manifest, write_manifest, BenchmarkType, CircuitRecord, Manifest, RecordKind,
    SamplingRecord,
};
pub use qasm::{parse_qasm, parse_qasm_program, serialize_qasm, QasmProgram};
