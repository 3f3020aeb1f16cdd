//! JSON output with every float written to 17 significant digits, which is
//! enough to round-trip any `f64`.

use std::io;

use serde::Serialize;
use serde_json::ser::Formatter;

/// Decimal notation for exponents in `[-5, 15]`, scientific otherwise.
pub fn format_f64(v: f64) -> String {
    if v == 0.0 {
        return if v.is_sign_negative() {
            "-0.0".into()
        } else {
            "0.0".into()
        };
    }
    let sci = format!("{v:.16e}");
    let (_, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-5..=15).contains(&exp) {
        format!("{:.*}", (16 - exp) as usize, v)
    } else {
        sci
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct SignificantDigits;

impl Formatter for SignificantDigits {
    fn write_f64<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        writer.write_all(format_f64(value).as_bytes())
    }

    fn write_f32<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(writer, f64::from(value))
    }
}

pub fn to_string<T: Serialize + ?Sized>(value: &T) -> serde_json::Result<String> {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, SignificantDigits);
    value.serialize(&mut ser)?;
    buf.push(b'\n');
    Ok(String::from_utf8(buf).expect("serde_json writes UTF-8"))
}
