//! Number formatting shared by every JSON report: exact quantities are
//! integers or `"p/q"` strings, statistics are 12-digit decimal strings.

use num_bigint::BigUint;
use num_integer::Integer;
use num_rational::Ratio;
use serde::Serializer;
use serde_json::Value;

pub fn decimal(x: f64) -> String {
    format!("{x:.12}")
}

pub fn ratio_string<T: Clone + Integer + std::fmt::Display>(r: &Ratio<T>) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

/// Integer as a JSON number when it fits in u64, otherwise as a decimal string.
pub fn big_value(n: &BigUint) -> Value {
    match u64::try_from(n) {
        Ok(v) => Value::from(v),
        Err(_) => Value::from(n.to_string()),
    }
}

/// Parses `"p/q"`, an integer, or a finite decimal such as `"0.25"` exactly.
pub fn parse_ratio(text: &str) -> Option<Ratio<u64>> {
    let text = text.trim();
    if let Some((n, d)) = text.split_once('/') {
        let (n, d): (u64, u64) = (n.trim().parse().ok()?, d.trim().parse().ok()?);
        return (d != 0).then(|| Ratio::new(n, d));
    }
    if let Some((int, frac)) = text.split_once('.') {
        if frac.is_empty() || !frac.bytes().all(|c| c.is_ascii_digit()) || frac.len() > 18 {
            return None;
        }
        let den = 10u64.checked_pow(frac.len() as u32)?;
        let int: u64 = if int.is_empty() { 0 } else { int.parse().ok()? };
        let num = int.checked_mul(den)?.checked_add(frac.parse().ok()?)?;
        return Some(Ratio::new(num, den));
    }
    text.parse().ok().map(Ratio::from_integer)
}

pub fn ser_decimal<S: Serializer>(x: &f64, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&decimal(*x))
}

pub fn ser_opt_decimal<S: Serializer>(x: &Option<f64>, s: S) -> Result<S::Ok, S::Error> {
    match x {
        Some(v) => s.serialize_str(&decimal(*v)),
        None => s.serialize_none(),
    }
}

pub fn ser_u128<S: Serializer>(x: &u128, s: S) -> Result<S::Ok, S::Error> {
    match u64::try_from(*x) {
        Ok(v) => s.serialize_u64(v),
        Err(_) => s.serialize_str(&x.to_string()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn formats() {
        assert_eq!(decimal(0.07), "0.070000000000");
        assert_eq!(ratio_string(&Ratio::new(328i64, 14)), "164/7");
        assert_eq!(big_value(&BigUint::from(82u32)), Value::from(82u64));
        let huge = BigUint::from(u64::MAX) * 10u32;
        assert_eq!(big_value(&huge), Value::from(huge.to_string()));
        assert_eq!(parse_ratio("1/4"), Some(Ratio::new(1, 4)));
        assert_eq!(parse_ratio("0.25"), Some(Ratio::new(1, 4)));
        assert_eq!(parse_ratio(".5"), Some(Ratio::new(1, 2)));
        assert_eq!(parse_ratio("3"), Some(Ratio::from_integer(3)));
        assert_eq!(parse_ratio("1/0"), None);
        assert_eq!(parse_ratio("-1"), None);
    }
}
