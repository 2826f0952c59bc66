//! Exact rational helpers shared by every score.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

pub type Rational = BigRational;

pub fn ratio(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Shapley coefficient `k! (n-k-1)! / n!`.
pub fn shapley_weight(n: usize, k: usize) -> Rational {
    debug_assert!(k < n);
    Rational::new(factorial(k) * factorial(n - k - 1), factorial(n))
}

pub fn factorial(n: usize) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, i| acc * BigInt::from(i))
}

/// Binomial coefficient table `binom[n][k]` for `n <= max`.
pub fn binomial_table(max: usize) -> Vec<Vec<BigInt>> {
    let mut rows: Vec<Vec<BigInt>> = Vec::with_capacity(max + 1);
    for n in 0..=max {
        let mut row = vec![BigInt::one(); n + 1];
        for k in 1..n {
            row[k] = &rows[n - 1][k - 1] + &rows[n - 1][k];
        }
        rows.push(row);
    }
    rows
}

/// Decimal rendering with six significant digits, trailing zeros trimmed.
pub fn to_decimal(r: &Rational) -> String {
    if r.is_zero() {
        return "0".to_string();
    }
    let v = r.to_f64().unwrap_or(f64::NAN);
    if !v.is_finite() {
        return format!("{}", r);
    }
    let mag = v.abs().log10().floor() as i32;
    if !(-6..=15).contains(&mag) {
        return format!("{:.5e}", v);
    }
    let decimals = (5 - mag).max(0) as usize;
    let s = format!("{:.*}", decimals, v);
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

/// Wire form of a rational: `{"num": .., "den": ..}`. Components that fit in
/// an `i64` are JSON integers, larger ones are decimal strings.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RationalJson {
    pub num: JsonInt,
    pub den: JsonInt,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct JsonInt(pub BigInt);

impl Serialize for JsonInt {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self.0.to_i64() {
            Some(v) => s.serialize_i64(v),
            None => s.serialize_str(&self.0.to_string()),
        }
    }
}

impl<'de> Deserialize<'de> for JsonInt {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            I(i64),
            S(String),
        }
        match Raw::deserialize(d)? {
            Raw::I(v) => Ok(JsonInt(BigInt::from(v))),
            Raw::S(s) => s
                .trim()
                .parse::<BigInt>()
                .map(JsonInt)
                .map_err(serde::de::Error::custom),
        }
    }
}

impl From<&Rational> for RationalJson {
    fn from(r: &Rational) -> Self {
        RationalJson {
            num: JsonInt(r.numer().clone()),
            den: JsonInt(r.denom().clone()),
        }
    }
}

impl TryFrom<RationalJson> for Rational {
    type Error = String;

    fn try_from(j: RationalJson) -> std::result::Result<Self, String> {
        if j.den.0.is_zero() {
            return Err("zero denominator".into());
        }
        Ok(Rational::new(j.num.0, j.den.0))
    }
}

/// Serde adapter for `Rational` fields: `#[serde(with = "rational::serde_ratio")]`.
pub mod serde_ratio {
    use super::*;

    pub fn serialize<S: Serializer>(r: &Rational, s: S) -> std::result::Result<S::Ok, S::Error> {
        RationalJson::from(r).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Rational, D::Error> {
        let j = RationalJson::deserialize(d)?;
        Rational::try_from(j).map_err(serde::de::Error::custom)
    }
}

pub fn in_unit_interval(r: &Rational) -> bool {
    !r.is_negative() && *r <= Rational::one()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shapley_weight_matches_hand_values() {
        // 1! 5! / 7! = 120 / 5040
        assert_eq!(shapley_weight(7, 1), ratio(1, 42));
        assert_eq!(shapley_weight(2, 0), ratio(1, 2));
        assert_eq!(shapley_weight(1, 0), int(1));
    }

    #[test]
    fn binomials() {
        let b = binomial_table(6);
        assert_eq!(b[6][3], BigInt::from(20));
        assert_eq!(b[0][0], BigInt::from(1));
        assert_eq!(b[5][5], BigInt::from(1));
    }

    #[test]
    fn decimal_rendering() {
        assert_eq!(to_decimal(&ratio(1, 4)), "0.25");
        assert_eq!(to_decimal(&ratio(1, 3)), "0.333333");
        assert_eq!(to_decimal(&ratio(2, 5)), "0.4");
        assert_eq!(to_decimal(&int(1)), "1");
        assert_eq!(to_decimal(&int(0)), "0");
        assert_eq!(to_decimal(&ratio(1234567, 1)), "1234567");
    }

    #[test]
    fn json_wire_form() {
        let j = serde_json::to_string(&RationalJson::from(&ratio(1, 4))).unwrap();
        assert_eq!(j, r#"{"num":1,"den":4}"#);
        let big = Rational::from_integer(BigInt::from(2).pow(80));
        let j = serde_json::to_string(&RationalJson::from(&big)).unwrap();
        assert_eq!(j, r#"{"num":"1208925819614629174706176","den":1}"#);
        let back: RationalJson = serde_json::from_str(&j).unwrap();
        assert_eq!(Rational::try_from(back).unwrap(), big);
    }
}
