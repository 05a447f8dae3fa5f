//! BTF v1, a plain-text tensor interchange format.
//!
//! ```text
//! btf 1
//! 3 2
//! 1
//! 3
//! 5
//! 2
//! 4
//! 6
//! ```
//!
//! Line 1 is the literal `btf 1`, line 2 the space-separated mode lengths, and
//! the rest whitespace-separated decimal values in column-major order. The
//! value count must equal the product of the mode lengths. The writer emits
//! one value per line with 17 significant digits so that values round-trip.

use std::fs;
use std::io::{self, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::shape::Shape;
use crate::tensor::DenseTensor;

const MAGIC: &str = "btf 1";

pub fn parse(text: &str) -> Result<DenseTensor> {
    let mut lines = text.lines();
    match lines.next() {
        Some(l) if l.trim_end() == MAGIC => {}
        other => {
            return Err(Error::Format {
                line: 1,
                message: format!("expected {MAGIC:?}, found {:?}", other.unwrap_or("")),
            })
        }
    }
    let dims_line = lines.next().ok_or_else(|| Error::Format {
        line: 2,
        message: "missing dimension line".into(),
    })?;
    let dims = dims_line
        .split_whitespace()
        .map(|t| {
            t.parse::<usize>().map_err(|e| Error::Format {
                line: 2,
                message: format!("bad mode length {t:?}: {e}"),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    if dims.is_empty() {
        return Err(Error::Format {
            line: 2,
            message: "no mode lengths".into(),
        });
    }
    let shape = Shape::new(dims).map_err(|e| Error::Format {
        line: 2,
        message: e.to_string(),
    })?;

    let mut values = Vec::with_capacity(shape.numel());
    for (n, line) in lines.enumerate() {
        for tok in line.split_whitespace() {
            let v = tok.parse::<f64>().map_err(|e| Error::Format {
                line: n + 3,
                message: format!("bad value {tok:?}: {e}"),
            })?;
            values.push(v);
        }
    }
    if values.len() != shape.numel() {
        return Err(Error::Format {
            line: 0,
            message: format!(
                "shape {shape} needs {} values, found {}",
                shape.numel(),
                values.len()
            ),
        });
    }
    DenseTensor::new(shape, values)
}

pub fn write_to(tensor: &DenseTensor, mut out: impl Write) -> io::Result<()> {
    writeln!(out, "{MAGIC}")?;
    let dims: Vec<String> = tensor.dims().iter().map(|d| d.to_string()).collect();
    writeln!(out, "{}", dims.join(" "))?;
    for v in tensor.data() {
        writeln!(out, "{}", format_value(*v))?;
    }
    Ok(())
}

pub fn to_string(tensor: &DenseTensor) -> String {
    let mut buf = Vec::new();
    write_to(tensor, &mut buf).expect("writing to a Vec cannot fail");
    String::from_utf8(buf).expect("BTF output is ASCII")
}

pub fn read(path: impl AsRef<Path>) -> Result<DenseTensor> {
    parse(&fs::read_to_string(path)?)
}

pub fn write(tensor: &DenseTensor, path: impl AsRef<Path>) -> Result<()> {
    let file = fs::File::create(path)?;
    let mut out = io::BufWriter::new(file);
    write_to(tensor, &mut out)?;
    out.flush()?;
    Ok(())
}

/// 17 significant digits, scientific notation, `.` decimal separator.
pub fn format_value(v: f64) -> String {
    if v.is_nan() {
        "nan".to_string()
    } else if v.is_infinite() {
        if v > 0.0 { "inf" } else { "-inf" }.to_string()
    } else {
        format!("{v:.16e}")
    }
}
