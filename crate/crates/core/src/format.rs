//! Number formatting shared by the machine-readable encoders.

use serde::Serialize;
use std::io;

/// Significant digits written by the CSV and JSON encoders. Seventeen is
/// enough for every `f64` to survive a decimal round trip.
pub const MACHINE_DIGITS: usize = 17;

/// Significant digits used in human-readable tables.
pub const TABLE_DIGITS: usize = 9;

/// Formats `x` with exactly `digits` significant digits, `%g` style:
/// positional notation for decimal exponents in `-4..digits`, scientific
/// otherwise. Trailing zeros are kept so columns have a stable width.
pub fn sig(x: f64, digits: usize) -> String {
    assert!(digits >= 1);
    if !x.is_finite() {
        return format!("{x}");
    }
    let sci = format!("{:.*e}", digits - 1, x);
    let exp: i32 = sci
        .rsplit_once('e')
        .and_then(|(_, e)| e.parse().ok())
        .expect("rust scientific formatting always carries an exponent");
    if exp < -4 || exp >= digits as i32 {
        sci
    } else {
        let decimals = (digits as i32 - 1 - exp) as usize;
        format!("{:.*}", decimals, x)
    }
}

/// Shorthand for [`sig`] at [`MACHINE_DIGITS`].
pub fn sig17(x: f64) -> String {
    sig(x, MACHINE_DIGITS)
}

struct Sig17Formatter;

impl serde_json::ser::Formatter for Sig17Formatter {
    fn write_f64<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        writer.write_all(sig17(value).as_bytes())
    }

    fn write_f32<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(writer, value as f64)
    }
}

/// Serializes `value` as compact JSON with every float written to 17
/// significant digits. Non-finite floats become `null`.
pub fn to_json<T: Serialize + ?Sized>(value: &T) -> serde_json::Result<String> {
    let mut out = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut out, Sig17Formatter);
    value.serialize(&mut ser)?;
    Ok(String::from_utf8(out).expect("serde_json emits UTF-8"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn positional_and_scientific() {
        assert_eq!(sig(std::f64::consts::PI, 9), "3.14159265");
        assert_eq!(sig(0.0872664626, 9), "0.0872664626");
        assert_eq!(sig(1.0, 17), "1.0000000000000000");
        assert_eq!(sig(1e-6, 3), "1.00e-6");
        assert_eq!(sig(123456.0, 3), "1.23e5");
        assert_eq!(sig(0.0, 4), "0.000");
        assert_eq!(sig(-2.5, 3), "-2.50");
    }

    #[test]
    fn rounding_that_bumps_the_exponent() {
        assert_eq!(sig(9.9999, 3), "10.0");
        assert_eq!(sig(0.099999, 2), "0.10");
    }

    #[test]
    fn json_floats_have_seventeen_digits() {
        let s = to_json(&[1.0f64 / 3.0, 2.0]).unwrap();
        assert_eq!(s, "[0.33333333333333331,2.0000000000000000]");
    }

    proptest! {
        #[test]
        fn seventeen_digits_round_trip(x in proptest::num::f64::NORMAL | proptest::num::f64::SUBNORMAL | proptest::num::f64::ZERO) {
            let s = sig17(x);
            prop_assert_eq!(s.parse::<f64>().unwrap(), x);
            let back: f64 = serde_json::from_str(&to_json(&x).unwrap()).unwrap();
            prop_assert_eq!(back, x);
        }
    }
}
