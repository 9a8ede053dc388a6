//! Deterministic JSON report emission: fixed 17-significant-digit floats and
//! sorted keys, so two runs with identical config and seed produce
//! byte-identical files.

use crate::scalar::C64;
use serde_json::ser::Formatter;
use serde_json::Value;
use std::io;

pub const SCHEMA_VERSION: u64 = 1;

/// Complex number as the [re, im] pair used throughout the reports.
pub fn cpair(z: C64) -> Value {
    serde_json::json!([z.re, z.im])
}

pub fn cvec(v: &nalgebra::DVector<C64>) -> Value {
    Value::Array(v.iter().map(|&z| cpair(z)).collect())
}

/// Matrix as row-major array of [re, im] entries.
pub fn cmatrix(m: &nalgebra::DMatrix<C64>) -> Value {
    Value::Array(
        (0..m.nrows())
            .map(|r| Value::Array((0..m.ncols()).map(|c| cpair(m[(r, c)])).collect()))
            .collect(),
    )
}

struct SciFormatter;

impl Formatter for SciFormatter {
    fn write_f64<W>(&mut self, writer: &mut W, value: f64) -> io::Result<()>
    where
        W: ?Sized + io::Write,
    {
        // 17 significant digits in scientific notation
        write!(writer, "{value:.16e}")
    }
}

/// Canonical serialization (serde_json's default map is ordered, so keys come
/// out sorted).
pub fn to_canonical_json(value: &Value) -> String {
    let mut out = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut out, SciFormatter);
    serde::Serialize::serialize(value, &mut ser).expect("in-memory serialization");
    out.push(b'\n');
    String::from_utf8(out).expect("JSON is UTF-8")
}

/// Wrap a command result with the schema header.
pub fn report_envelope(command: &str, body: Value) -> Value {
    serde_json::json!({
        "schema_version": SCHEMA_VERSION,
        "command": command,
        "report": body,
    })
}
