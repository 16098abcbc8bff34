//! JSON-lines streams: one circuit or shot table per line.

use std::io::{BufRead, Write};

use serde::de::DeserializeOwned;
use serde::Serialize;

use crate::error::{Error, Result};

/// Write each item as one compact JSON line.
pub fn write_jsonl<'a, T: Serialize + 'a>(
    mut w: impl Write,
    items: impl IntoIterator<Item = &'a T>,
) -> Result<()> {
    for item in items {
        serde_json::to_writer(&mut w, item)?;
        w.write_all(b"\n")?;
    }
    Ok(())
}

/// Append one item as a JSON line.
pub fn write_jsonl_line<T: Serialize>(mut w: impl Write, item: &T) -> Result<()> {
    serde_json::to_writer(&mut w, item)?;
    w.write_all(b"\n")?;
    Ok(())
}

/// Lazily read items; blank lines are skipped and errors name the line.
pub fn read_jsonl<T: DeserializeOwned>(r: impl BufRead) -> impl Iterator<Item = Result<T>> {
    r.lines().enumerate().filter_map(|(i, line)| {
        let line = match line {
            Ok(l) => l,
            Err(e) => return Some(Err(e.into())),
        };
        if line.trim().is_empty() {
            return None;
        }
        let de = &mut serde_json::Deserializer::from_str(&line);
        Some(
            serde_path_to_error::deserialize(de).map_err(|e| Error::Schema {
                path: format!("line {}: {}", i + 1, e.path()),
                msg: e.inner().to_string(),
            }),
        )
    })
}

pub fn read_jsonl_all<T: DeserializeOwned>(r: impl BufRead) -> Result<Vec<T>> {
    read_jsonl(r).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::{Circuit, GateOp};

    #[test]
    fn circuits_round_trip() {
        let a = Circuit::from_gates(2, [GateOp::rz(0, 0.1 + 0.2), GateOp::cz(0, 1)])
            .unwrap()
            .with_id("a");
        let b = Circuit::empty(3).with_id("b");
        let mut buf = Vec::new();
        write_jsonl(&mut buf, [&a, &b]).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert_eq!(text.lines().count(), 2);
        let back: Vec<Circuit> = read_jsonl_all(&buf[..]).unwrap();
        assert_eq!(back, vec![a, b]);
    }

    #[test]
    fn errors_name_the_line() {
        let text = "{\"id\":\"a\",\"n\":1,\"layers\":[]}\n{\"id\":\"b\",\"n\":1,\"layers\":[[{\"kind\":\"Q\",\"params\":[],\"qubits\":[0]}]]}\n";
        let err = read_jsonl_all::<Circuit>(text.as_bytes()).unwrap_err();
        match err {
            Error::Schema { path, .. } => assert!(path.starts_with("line 2"), "{path}"),
            other => panic!("{other:?}"),
        }
    }
}
