//! Number formatting shared by every command.
//!
//! JSON carries 17 significant digits so every `f64` parses back to the same
//! bits. Human-readable text uses 6. CSV uses the shortest representation that
//! round-trips.

use std::io;

use clap::ValueEnum;
use rotjac_core::{Matrix3, Vector3};
use serde::Serialize;
use serde_json::ser::{Formatter, Serializer};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Text,
}

/// Compact JSON with floats written as `d.dddddddddddddddde±x`.
#[derive(Clone, Copy, Debug, Default)]
pub struct SeventeenDigits;

impl Formatter for SeventeenDigits {
    fn write_f64<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        write!(writer, "{value:.16e}")
    }

    fn write_f32<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(writer, f64::from(value))
    }
}

pub fn to_json<T: Serialize + ?Sized>(value: &T) -> String {
    let mut buf = Vec::new();
    value
        .serialize(&mut Serializer::with_formatter(&mut buf, SeventeenDigits))
        .expect("serializing to memory cannot fail");
    String::from_utf8(buf).expect("JSON is UTF-8")
}

/// Six significant digits in scientific notation, right-aligned to a common
/// width.
pub fn text_real(x: f64) -> String {
    format!("{x:>13.5e}")
}

pub fn text_vector(v: &Vector3) -> String {
    v.to_array().iter().map(|x| text_real(*x)).collect::<Vec<_>>().join("")
}

pub fn text_matrix(m: &Matrix3) -> String {
    m.rows().iter().map(|row| row.iter().map(|x| text_real(*x)).collect::<String>()).collect::<Vec<_>>().join("\n")
}

/// Shortest round-tripping representation, always in exponent form so the
/// width stays bounded.
pub fn csv_real(x: f64) -> String {
    format!("{x:e}")
}

pub fn csv_row<I, S>(fields: I) -> String
where
    I: IntoIterator<Item = S>,
    S: AsRef<str>,
{
    let mut line = fields.into_iter().map(|f| f.as_ref().to_owned()).collect::<Vec<_>>().join(",");
    line.push('\n');
    line
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_floats_round_trip() {
        let values: [f64; 6] = [0.1, -1.0 / 3.0, 6.123233995736766e-17, 1e300, -0.0, 2.0];
        let text = to_json(&values);
        let back: Vec<f64> = serde_json::from_str(&text).unwrap();
        for (a, b) in values.iter().zip(&back) {
            assert_eq!(a.to_bits(), b.to_bits());
        }
        assert!(text.starts_with("[1.0000000000000001e-1,"));
    }

    #[test]
    fn non_finite_becomes_null() {
        assert_eq!(to_json(&[f64::NAN]), "[null]");
    }

    #[test]
    fn text_has_six_significant_digits() {
        assert_eq!(text_real(1.0).trim(), "1.00000e0");
        assert_eq!(text_real(-0.123456789).trim(), "-1.23457e-1");
        assert_eq!(text_real(1.0).len(), text_real(-1.0e-100).len());
    }

    #[test]
    fn csv_is_lossless() {
        let x = -0.30000000000000004;
        assert_eq!(csv_real(x).parse::<f64>().unwrap(), x);
        assert_eq!(csv_row(["a", "b"]), "a,b\n");
    }
}
