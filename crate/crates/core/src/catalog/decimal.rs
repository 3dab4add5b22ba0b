use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

/// A decimal literal kept verbatim alongside its exact value.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Decimal {
    text: String,
    value: BigRational,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("invalid decimal '{0}'")]
pub struct DecimalError(pub String);

impl Decimal {
    pub fn value(&self) -> &BigRational {
        &self.value
    }

    pub fn to_f64(&self) -> f64 {
        self.value.to_f64().unwrap_or(f64::NAN)
    }

    pub fn as_str(&self) -> &str {
        &self.text
    }

    /// Digits after the decimal point.
    pub fn scale(&self) -> u32 {
        self.text.split_once('.').map_or(0, |(_, f)| f.len() as u32)
    }

    /// Half a unit in the last printed place.
    pub fn half_ulp(&self) -> f64 {
        0.5 * 10f64.powi(-(self.scale() as i32))
    }

    pub fn is_negative(&self) -> bool {
        self.value.is_negative()
    }

    /// Exact decimal rendering of a rational with a terminating expansion.
    pub fn from_rational(q: &BigRational) -> Option<Decimal> {
        let mut den = q.denom().clone();
        let (mut twos, mut fives) = (0u32, 0u32);
        let two = BigInt::from(2);
        let five = BigInt::from(5);
        while (&den % &two).is_zero() {
            den /= &two;
            twos += 1;
        }
        while (&den % &five).is_zero() {
            den /= &five;
            fives += 1;
        }
        if !den.is_one() {
            return None;
        }
        let places = twos.max(fives);
        let scaled = q * BigRational::from_integer(BigInt::from(10).pow(places));
        let n = scaled.to_integer();
        let neg = n.is_negative();
        let digits = n.abs().to_string();
        let text = if places == 0 {
            digits
        } else {
            let p = places as usize;
            let padded = format!("{:0>width$}", digits, width = p + 1);
            let (i, f) = padded.split_at(padded.len() - p);
            format!("{i}.{f}")
        };
        let text = if neg { format!("-{text}") } else { text };
        Some(Decimal {
            text,
            value: q.clone(),
        })
    }
}

impl FromStr for Decimal {
    type Err = DecimalError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = || DecimalError(s.to_string());
        let (neg, body) = match s.strip_prefix('-') {
            Some(b) => (true, b),
            None => (false, s.strip_prefix('+').unwrap_or(s)),
        };
        let (int, frac) = body.split_once('.').unwrap_or((body, ""));
        if int.is_empty() && frac.is_empty() {
            return Err(err());
        }
        if !int.bytes().chain(frac.bytes()).all(|b| b.is_ascii_digit()) {
            return Err(err());
        }
        if body.ends_with('.') {
            return Err(err());
        }
        let digits = format!("{int}{frac}");
        let num: BigInt = if digits.is_empty() {
            BigInt::zero()
        } else {
            digits.parse().map_err(|_| err())?
        };
        let den = BigInt::from(10).pow(frac.len() as u32);
        let mut value = BigRational::new(num, den);
        if neg {
            value = -value;
        }
        Ok(Decimal {
            text: s.to_string(),
            value,
        })
    }
}

impl fmt::Display for Decimal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.text)
    }
}

impl Serialize for Decimal {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.text)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_exactly() {
        let d: Decimal = "1.792812".parse().unwrap();
        assert_eq!(
            d.value(),
            &BigRational::new(1792812.into(), 1_000_000.into())
        );
        assert_eq!(d.scale(), 6);
        assert_eq!(d.to_string(), "1.792812");
        assert_eq!(
            "1.0".parse::<Decimal>().unwrap().value(),
            &BigRational::one()
        );
        assert_eq!("-0.5".parse::<Decimal>().unwrap().to_f64(), -0.5);
        assert_eq!(".25".parse::<Decimal>().unwrap().to_f64(), 0.25);
        for bad in ["", ".", "1.", "1e3", "1.2.3", "abc", "--1"] {
            assert!(bad.parse::<Decimal>().is_err(), "{bad}");
        }
    }

    #[test]
    fn renders_rationals() {
        let half_plus_one = BigRational::new(1792812.into(), 2_000_000.into()) + BigRational::one();
        assert_eq!(
            Decimal::from_rational(&half_plus_one).unwrap().as_str(),
            "1.896406"
        );
        assert_eq!(
            Decimal::from_rational(&BigRational::new(7.into(), 4.into()))
                .unwrap()
                .as_str(),
            "1.75"
        );
        assert_eq!(
            Decimal::from_rational(&BigRational::new((-1).into(), 8.into()))
                .unwrap()
                .as_str(),
            "-0.125"
        );
        assert_eq!(
            Decimal::from_rational(&BigRational::from_integer(3.into()))
                .unwrap()
                .as_str(),
            "3"
        );
        assert!(Decimal::from_rational(&BigRational::new(1.into(), 3.into())).is_none());
    }
}
