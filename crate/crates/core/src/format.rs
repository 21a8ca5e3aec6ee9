//! Number rendering shared by the CSV and JSON writers.

/// Significant digits used for every emitted number.
pub const SIG_DIGITS: usize = 12;

/// `%.12g`-style rendering: fixed notation for exponents in `[-4, 12)`,
/// scientific otherwise, trailing zeros trimmed. Exponents are not
/// zero-padded (`1e-5`, not `1e-05`).
pub fn num(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    let sci = format!("{:.*e}", SIG_DIGITS - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-4..SIG_DIGITS as i32).contains(&exp) {
        let decimals = (SIG_DIGITS as i32 - 1 - exp).max(0) as usize;
        trim(format!("{:.*}", decimals, x))
    } else {
        format!("{}e{}", trim(mantissa.to_string()), exp)
    }
}

fn trim(s: String) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

/// `x` rounded to twelve significant digits, for JSON output.
pub fn round(x: f64) -> f64 {
    if !x.is_finite() {
        return x;
    }
    num(x).parse().unwrap_or(x)
}

/// JSON number for finite values, `null` otherwise.
pub fn json_num(x: f64) -> serde_json::Value {
    if x.is_finite() {
        serde_json::json!(round(x))
    } else {
        serde_json::Value::Null
    }
}

/// RFC 4180 field quoting.
pub fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n', '\r']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn renders_like_printf_g() {
        assert_eq!(num(0.890_711_585_012_436_4), "0.890711585012");
        assert_eq!(num(2.0), "2");
        assert_eq!(num(-1.5e-20), "-1.5e-20");
        assert_eq!(num(123_456_789_012_345.0), "1.23456789012e14");
        assert_eq!(num(1e-4), "0.0001");
        assert_eq!(num(1e-5), "1e-5");
        assert_eq!(num(f64::NEG_INFINITY), "-inf");
        #[allow(clippy::approx_constant)]
        let pi_12 = 3.14159265359;
        assert_eq!(round(std::f64::consts::PI), pi_12);
    }

    #[test]
    fn csv_quoting() {
        assert_eq!(csv_field("plain"), "plain");
        assert_eq!(csv_field("a,b"), "\"a,b\"");
        assert_eq!(csv_field("say \"hi\""), "\"say \"\"hi\"\"\"");
    }
}
