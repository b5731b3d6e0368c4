//! Plain-text output helpers shared by every CSV writer in the crate.
//!
//! Numbers are written in decimal with 17 significant digits, which is
//! enough for any `f64` to round-trip exactly.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::error::Result;

/// Formats `x` with 17 significant digits, `%.17g` style.
pub fn fmt17(x: f64) -> String {
    if x.is_nan() {
        return "nan".to_string();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf" } else { "-inf" }.to_string();
    }
    if x == 0.0 {
        return "0".to_string();
    }
    let sci = format!("{:.16e}", x);
    let (mantissa, exp) = sci.split_once('e').expect("scientific format has exponent");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-5..17).contains(&exp) {
        format!("{}e{}", strip_zeros(mantissa), exp)
    } else {
        let decimals = (16 - exp).max(0) as usize;
        strip_zeros(&format!("{:.*}", decimals, x)).to_string()
    }
}

fn strip_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

pub(crate) fn fmt_bool(b: bool) -> &'static str {
    if b {
        "1"
    } else {
        "0"
    }
}

/// Row-oriented CSV builder with a mandatory header.
#[derive(Debug, Clone)]
pub struct CsvTable {
    columns: usize,
    buf: String,
}

impl CsvTable {
    pub fn new<S: AsRef<str>>(header: &[S]) -> Self {
        let mut buf = String::new();
        for (i, h) in header.iter().enumerate() {
            if i > 0 {
                buf.push(',');
            }
            buf.push_str(h.as_ref());
        }
        buf.push('\n');
        CsvTable {
            columns: header.len(),
            buf,
        }
    }

    pub fn push_numbers(&mut self, row: &[f64]) {
        debug_assert_eq!(row.len(), self.columns);
        for (i, v) in row.iter().enumerate() {
            if i > 0 {
                self.buf.push(',');
            }
            self.buf.push_str(&fmt17(*v));
        }
        self.buf.push('\n');
    }

    /// Pushes pre-formatted fields.
    pub fn push_fields<S: AsRef<str>>(&mut self, row: &[S]) {
        debug_assert_eq!(row.len(), self.columns);
        for (i, v) in row.iter().enumerate() {
            if i > 0 {
                self.buf.push(',');
            }
            let _ = write!(self.buf, "{}", v.as_ref());
        }
        self.buf.push('\n');
    }

    pub fn as_str(&self) -> &str {
        &self.buf
    }

    pub fn into_string(self) -> String {
        self.buf
    }

    pub fn write_to(&self, path: &Path) -> Result<()> {
        fs::write(path, self.buf.as_bytes())?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn formats_common_values() {
        assert_eq!(fmt17(1.0), "1");
        assert_eq!(fmt17(-0.5), "-0.5");
        assert_eq!(fmt17(0.1), "0.10000000000000001");
        assert_eq!(fmt17(1e-7), "9.9999999999999995e-8");
        assert_eq!(fmt17(1e20), "1e20");
        assert_eq!(fmt17(f64::INFINITY), "inf");
    }

    #[test]
    fn header_is_first_line() {
        let mut t = CsvTable::new(&["t", "y_1"]);
        t.push_numbers(&[0.0, 2.5]);
        assert_eq!(t.as_str(), "t,y_1\n0,2.5\n");
    }

    proptest! {
        #[test]
        fn fmt17_round_trips(x in proptest::num::f64::NORMAL | proptest::num::f64::SUBNORMAL) {
            let parsed: f64 = fmt17(x).parse().unwrap();
            prop_assert_eq!(parsed, x);
        }
    }
}
