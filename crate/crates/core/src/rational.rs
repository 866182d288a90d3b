//! Exact rational helpers shared by every module.

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Arbitrary-precision rational number used for all exact computations.
pub type Rational = num_rational::BigRational;

pub fn rat(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

pub fn int(value: i64) -> Rational {
    Rational::from_integer(BigInt::from(value))
}

/// `2^-k` as an exact rational.
pub fn dyadic(k: usize) -> Rational {
    Rational::new(BigInt::one(), BigInt::one() << k)
}

pub fn pow2(n: usize) -> BigUint {
    BigUint::one() << n
}

/// Largest integer strictly smaller than `value`.
///
/// For an integer argument this is `value - 1`, otherwise the usual floor.
pub fn strict_floor(value: &Rational) -> BigInt {
    let floor = value.floor().to_integer();
    if value.is_integer() {
        floor - 1
    } else {
        floor
    }
}

/// Largest non-negative integer `k` with `k^2 < a_squared`, i.e. the strict
/// floor of `sqrt(a_squared)`. Returns 0 when `a_squared <= 1`.
pub fn strict_floor_sqrt(a_squared: &Rational) -> u64 {
    if *a_squared <= Rational::one() {
        return 0;
    }
    // Start from a float estimate and correct exactly.
    let approx = to_f64(a_squared).sqrt().floor().max(0.0) as u64;
    let mut k = approx.saturating_sub(2);
    while int_sq(k + 1) < *a_squared {
        k += 1;
    }
    while k > 0 && int_sq(k) >= *a_squared {
        k -= 1;
    }
    k
}

fn int_sq(k: u64) -> Rational {
    let k = BigInt::from(k);
    Rational::from_integer(&k * &k)
}

/// Clamps to `[0, 1]`; the flag reports whether the input was outside.
pub fn clamp_unit(value: Rational) -> (Rational, bool) {
    if value.is_negative() {
        (Rational::zero(), true)
    } else if value > Rational::one() {
        (Rational::one(), true)
    } else {
        (value, false)
    }
}

pub fn to_f64(value: &Rational) -> f64 {
    value.to_f64().unwrap_or_else(|| {
        // Fall back on a scaled conversion when numerator/denominator overflow f64.
        let shift = value.denom().bits().max(value.numer().bits()) as i64 - 1000;
        if shift <= 0 {
            return f64::NAN;
        }
        let num = (value.numer() >> shift as usize).to_f64().unwrap_or(f64::NAN);
        let den = (value.denom() >> shift as usize).to_f64().unwrap_or(f64::NAN);
        num / den
    })
}

/// Nearest rational to a finite float (exact binary expansion).
pub fn from_f64(value: f64) -> Option<Rational> {
    Rational::from_float(value)
}

/// `floor(scale * value)` for a non-negative value; negative input gives 0.
pub fn floor_scaled(value: &Rational, scale: &BigUint) -> BigUint {
    let scaled = value * Rational::from_integer(BigInt::from_biguint(Sign::Plus, scale.clone()));
    let floor = scaled.floor().to_integer();
    floor.to_biguint().unwrap_or_default()
}

/// Renders `num/den` (or just `num` for integers).
pub fn fraction_string(value: &Rational) -> String {
    if value.denom().is_one() {
        value.numer().to_string()
    } else {
        format!("{}/{}", value.numer(), value.denom())
    }
}

/// Parses `num/den`, `num`, or a decimal like `0.25` into an exact rational.
pub fn parse_rational(text: &str) -> Option<Rational> {
    let text = text.trim();
    if let Some((num, den)) = text.split_once('/') {
        let num: BigInt = num.trim().parse().ok()?;
        let den: BigInt = den.trim().parse().ok()?;
        if den.is_zero() {
            return None;
        }
        return Some(Rational::new(num, den));
    }
    if let Some((whole, frac)) = text.split_once('.') {
        let negative = whole.starts_with('-');
        let digits = format!("{}{}", whole.trim_start_matches(['-', '+']), frac);
        let num: BigInt = digits.parse().ok()?;
        let den = num_traits::pow(BigInt::from(10), frac.len());
        let value = Rational::new(num, den);
        return Some(if negative { -value } else { value });
    }
    text.parse::<BigInt>().ok().map(Rational::from_integer)
}

/// Decimal rendering with `digits` fractional digits, rounded toward +inf.
/// Used wherever a displayed bound must stay an upper bound.
pub fn decimal_up(value: &Rational, digits: usize) -> String {
    let scale = num_traits::pow(BigInt::from(10), digits);
    let scaled = (value * Rational::from_integer(scale.clone())).ceil().to_integer();
    render_scaled(&scaled, &scale, digits)
}

/// Decimal rendering with `digits` fractional digits, rounded to nearest.
pub fn decimal(value: &Rational, digits: usize) -> String {
    let scale = num_traits::pow(BigInt::from(10), digits);
    let scaled = (value * Rational::from_integer(scale.clone())).round().to_integer();
    render_scaled(&scaled, &scale, digits)
}

fn render_scaled(scaled: &BigInt, scale: &BigInt, digits: usize) -> String {
    let sign = if scaled.is_negative() { "-" } else { "" };
    let (whole, frac) = scaled.abs().div_rem(scale);
    if digits == 0 {
        format!("{sign}{whole}")
    } else {
        format!("{sign}{whole}.{:0>width$}", frac.to_string(), width = digits)
    }
}

/// Serde adapter writing rationals as `"num/den"` strings.
pub mod serde_fraction {
    use super::{fraction_string, parse_rational, Rational};
    use serde::{de::Error, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(value: &Rational, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&fraction_string(value))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(deserializer: D) -> Result<Rational, D::Error> {
        let text = String::deserialize(deserializer)?;
        parse_rational(&text).ok_or_else(|| D::Error::custom(format!("invalid rational `{text}`")))
    }

    pub mod option {
        use super::super::{fraction_string, parse_rational, Rational};
        use serde::{de::Error, Deserialize, Deserializer, Serializer};

        pub fn serialize<S: Serializer>(
            value: &Option<Rational>,
            serializer: S,
        ) -> Result<S::Ok, S::Error> {
            match value {
                Some(v) => serializer.serialize_some(&fraction_string(v)),
                None => serializer.serialize_none(),
            }
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(
            deserializer: D,
        ) -> Result<Option<Rational>, D::Error> {
            let text = Option::<String>::deserialize(deserializer)?;
            text.map(|t| parse_rational(&t).ok_or_else(|| D::Error::custom(format!("invalid rational `{t}`"))))
                .transpose()
        }
    }
}
