//! JSON and CSV emission with round-trip-safe numbers.
//!
//! Every float is printed with 17 significant digits (`{:.16e}`), which
//! round-trips 64-bit values exactly, so reports fed back in as configs
//! reproduce results bit-for-bit. Keys are emitted in sorted order, making
//! reports byte-identical across runs.

use std::io::{self, Write};

use hyperlq_core::DenseMatrix;
use serde::Serialize;
use serde_json::ser::Formatter;
use serde_json::Value;

struct SigDigits;

impl Formatter for SigDigits {
    fn write_f64<W>(&mut self, writer: &mut W, value: f64) -> io::Result<()>
    where
        W: ?Sized + Write,
    {
        if value.is_finite() {
            write!(writer, "{value:.16e}")
        } else {
            writer.write_all(b"null")
        }
    }
}

/// Serialize a JSON value with the 17-significant-digit float format.
pub fn to_json(value: &Value) -> String {
    let mut out = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut out, SigDigits);
    value
        .serialize(&mut ser)
        .expect("in-memory serialization cannot fail");
    String::from_utf8(out).expect("serializer emits UTF-8")
}

/// Real matrix as nested row arrays. CLI configs are real, so the whole
/// pipeline stays real; imaginary parts are dropped after a debug check.
pub fn matrix_value(m: &DenseMatrix) -> Value {
    let rows: Vec<Value> = (0..m.rows())
        .map(|i| {
            let row: Vec<Value> = (0..m.cols())
                .map(|j| {
                    let z = m[(i, j)];
                    debug_assert!(
                        z.im.abs() <= 1e-10 * (1.0 + z.re.abs()),
                        "unexpected imaginary component in report"
                    );
                    Value::from(z.re)
                })
                .collect();
            Value::from(row)
        })
        .collect();
    Value::from(rows)
}

/// One float cell in the fixed CSV format.
pub fn csv_cell(x: f64) -> String {
    format!("{x:.16e}")
}
