//! JSON output with a fixed float format.
//!
//! Every `f64` is written with 17 significant digits in exponent form, so
//! identical inputs always produce byte-identical documents. Complex numbers
//! are written as `[re, im]` pairs.

use std::io;

use nalgebra::DMatrix;
use serde::ser::SerializeSeq;
use serde::{Serialize, Serializer};
use serde_json::ser::{Formatter, PrettyFormatter};

use crate::qla::C64;

/// Version tag written at the top of every document.
pub const SCHEMA_VERSION: u32 = 1;

pub(crate) struct ComplexPairs<'a>(pub &'a [C64]);

impl Serialize for ComplexPairs<'_> {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut seq = serializer.serialize_seq(Some(self.0.len()))?;
        for z in self.0 {
            seq.serialize_element(&[z.re, z.im])?;
        }
        seq.end()
    }
}

pub(crate) struct ComplexMatrix<'a>(pub &'a DMatrix<C64>);

impl Serialize for ComplexMatrix<'_> {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let m = self.0;
        let mut seq = serializer.serialize_seq(Some(m.nrows()))?;
        for r in 0..m.nrows() {
            let row: Vec<C64> = (0..m.ncols()).map(|c| m[(r, c)]).collect();
            seq.serialize_element(&ComplexPairs(&row))?;
        }
        seq.end()
    }
}

/// Pretty printer that writes floats as `%.16e`.
struct FixedDigits<'a>(PrettyFormatter<'a>);

impl Formatter for FixedDigits<'_> {
    fn write_f64<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        if value.is_finite() {
            // normalize -0.0 so output is independent of sign-of-zero noise
            let v = if value == 0.0 { 0.0 } else { value };
            write!(writer, "{v:.16e}")
        } else {
            writer.write_all(b"null")
        }
    }

    fn write_f32<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(writer, f64::from(value))
    }

    fn begin_array<W: ?Sized + io::Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.0.begin_array(writer)
    }

    fn end_array<W: ?Sized + io::Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.0.end_array(writer)
    }

    fn begin_array_value<W: ?Sized + io::Write>(&mut self, writer: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_array_value(writer, first)
    }

    fn end_array_value<W: ?Sized + io::Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.0.end_array_value(writer)
    }

    fn begin_object<W: ?Sized + io::Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.0.begin_object(writer)
    }

    fn end_object<W: ?Sized + io::Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.0.end_object(writer)
    }

    fn begin_object_key<W: ?Sized + io::Write>(&mut self, writer: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_object_key(writer, first)
    }

    fn begin_object_value<W: ?Sized + io::Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.0.begin_object_value(writer)
    }

    fn end_object_value<W: ?Sized + io::Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.0.end_object_value(writer)
    }
}

/// Serializes `value` as indented JSON with the fixed float format.
pub fn to_json_string<T: Serialize + ?Sized>(value: &T) -> serde_json::Result<String> {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, FixedDigits(PrettyFormatter::new()));
    value.serialize(&mut ser)?;
    Ok(String::from_utf8(buf).expect("serde_json writes UTF-8"))
}

/// Top-level envelope of every emitted document.
#[derive(Debug, Serialize)]
pub struct Document<'a, T: Serialize> {
    pub schema_version: u32,
    pub kind: &'a str,
    pub data: T,
}

/// `data` wrapped in a [`Document`] tagged `kind`, as text.
pub fn document<T: Serialize>(kind: &str, data: T) -> serde_json::Result<String> {
    to_json_string(&Document {
        schema_version: SCHEMA_VERSION,
        kind,
        data,
    })
}
