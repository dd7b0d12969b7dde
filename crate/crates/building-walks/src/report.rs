//! Deterministic output formatting shared by the library and the CLI.
//!
//! All numeric text produced here is locale-independent ('.' decimal point)
//! and reproducible bit-for-bit across runs and worker counts: floats are
//! printed with exactly 15 significant digits, exact rationals as "p/q".

use num_traits::{Signed, Zero};

use crate::scalar::Scalar;

/// Version of the library, embedded into every report.
pub fn library_version() -> &'static str {
    env!("CARGO_PKG_VERSION")
}

/// 15-significant-digit rendering: plain decimal for magnitudes in
/// `[1e-4, 1e16)`, scientific notation outside, `0` for zero.
pub fn fmt_f64(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return if x.is_nan() {
            "nan".to_string()
        } else if x > 0.0 {
            "inf".to_string()
        } else {
            "-inf".to_string()
        };
    }
    let mag = x.abs();
    if (1e-4..1e16).contains(&mag) {
        let exp = mag.log10().floor() as i32;
        let prec = (14 - exp).max(0) as usize;
        format!("{x:.prec$}")
    } else {
        format!("{x:.14e}")
    }
}

/// Scalar as CSV field text: rationals print exactly ("p/q"), floats with 15
/// significant digits.
pub fn fmt_scalar<S: Scalar>(x: &S) -> String {
    if let Some(r) = x.as_exact_rational() {
        return fmt_big_rational(&r);
    }
    fmt_f64(x.to_f64_approx())
}

pub fn fmt_big_rational(r: &num_rational::BigRational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

/// Scalar as a JSON value: exact rationals become `"p/q"` strings (type-stable
/// even for integers), floats become JSON numbers.
pub fn scalar_json<S: Scalar>(x: &S) -> serde_json::Value {
    if let Some(r) = x.as_exact_rational() {
        return serde_json::Value::String(fmt_big_rational(&r));
    }
    serde_json::Number::from_f64(x.to_f64_approx())
        .map(serde_json::Value::Number)
        .unwrap_or(serde_json::Value::Null)
}

/// Parse a `"p/q"` or integer string back into a rational.
pub fn parse_big_rational(s: &str) -> Option<num_rational::BigRational> {
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s.trim(), "1"),
    };
    let n: num_bigint::BigInt = num.parse().ok()?;
    let d: num_bigint::BigInt = den.parse().ok()?;
    if d.is_zero() {
        return None;
    }
    Some(num_rational::BigRational::new(n, d))
}

/// Minimal CSV builder with `#`-prefixed metadata comments above the header.
/// Fields are written verbatim (all our fields are numeric or word text, never
/// containing commas or quotes), so output bytes are fully determined by the
/// inputs.
pub struct Csv {
    buf: String,
}

impl Csv {
    pub fn new() -> Self {
        Csv { buf: String::new() }
    }

    pub fn comment(&mut self, text: &str) {
        for line in text.lines() {
            self.buf.push_str("# ");
            self.buf.push_str(line);
            self.buf.push('\n');
        }
    }

    pub fn row<I, T>(&mut self, fields: I)
    where
        I: IntoIterator<Item = T>,
        T: AsRef<str>,
    {
        let mut first = true;
        for f in fields {
            if !first {
                self.buf.push(',');
            }
            debug_assert!(
                !f.as_ref().contains([',', '"', '\n']),
                "CSV fields must not need quoting"
            );
            self.buf.push_str(f.as_ref());
            first = false;
        }
        self.buf.push('\n');
    }

    pub fn finish(self) -> String {
        self.buf
    }
}

impl Default for Csv {
    fn default() -> Self {
        Self::new()
    }
}

/// Positive-part helper used when printing signed rationals compactly.
pub fn fmt_signed_big_rational(r: &num_rational::BigRational) -> String {
    if r.is_negative() {
        format!("-{}", fmt_big_rational(&r.abs()))
    } else {
        fmt_big_rational(r)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;
    use num_rational::BigRational;

    #[test]
    fn float_formatting_is_fifteen_significant_digits() {
        assert_eq!(fmt_f64(0.0), "0");
        assert_eq!(fmt_f64(1.0), "1.00000000000000");
        assert_eq!(fmt_f64(0.5), "0.500000000000000");
        assert_eq!(fmt_f64(-0.125), "-0.125000000000000");
        assert_eq!(fmt_f64(12345.678), "12345.6780000000");
        // below the plain-decimal window: scientific
        assert_eq!(fmt_f64(1.5e-7), "1.50000000000000e-7");
        assert!(fmt_f64(3.2e19).contains('e'));
    }

    #[test]
    fn rational_formatting_round_trips() {
        let r = BigRational::new(BigInt::from(-16), BigInt::from(45));
        let s = fmt_signed_big_rational(&r);
        assert_eq!(s, "-16/45");
        assert_eq!(parse_big_rational("-16/45").unwrap(), r);
        assert_eq!(
            parse_big_rational("7").unwrap(),
            BigRational::from_integer(BigInt::from(7))
        );
        assert_eq!(parse_big_rational("1/0"), None);
    }

    #[test]
    fn csv_builder_layout() {
        let mut csv = Csv::new();
        csv.comment("version: 0.1.0");
        csv.row(["n", "value"]);
        csv.row(["1", "0.5"]);
        assert_eq!(csv.finish(), "# version: 0.1.0\nn,value\n1,0.5\n");
    }
}
