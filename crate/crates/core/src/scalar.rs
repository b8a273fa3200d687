//! Coefficient types.
//!
//! Every computation in the crate is written against [`Scalar`], a field-like
//! numeric type. The exact default is [`Rational`]; `f64` and `f32` are
//! supported for quick exploratory sweeps where exactness is not needed.

use std::fmt::{Debug, Display};
use std::str::FromStr;

use num_integer::Roots;
use num_rational::Ratio;
use num_traits::{Num, Signed, ToPrimitive};

/// Exact rational numbers used throughout the public API.
pub type Rational = Ratio<i128>;

pub trait Scalar:
    Clone + Debug + Display + FromStr + PartialOrd + Num + Signed + Send + Sync + 'static
{
    fn from_i64(v: i64) -> Self;

    /// `num / den`; `den` must be non-zero.
    fn from_frac(num: i64, den: i64) -> Self {
        Self::from_i64(num) / Self::from_i64(den)
    }

    /// The value as an integer when it is one.
    fn to_i64_exact(&self) -> Option<i64>;

    fn to_f64(&self) -> f64;

    fn is_integer(&self) -> bool {
        self.to_i64_exact().is_some()
    }

    fn is_odd_integer(&self) -> bool {
        matches!(self.to_i64_exact(), Some(v) if v.rem_euclid(2) == 1)
    }
}

macro_rules! impl_ratio_scalar {
    ($int:ty) => {
        impl Scalar for Ratio<$int> {
            fn from_i64(v: i64) -> Self {
                Ratio::from_integer(v as $int)
            }

            fn from_frac(num: i64, den: i64) -> Self {
                Ratio::new(num as $int, den as $int)
            }

            fn to_i64_exact(&self) -> Option<i64> {
                if self.is_integer() {
                    self.numer().to_i64()
                } else {
                    None
                }
            }

            fn to_f64(&self) -> f64 {
                self.numer().to_f64().unwrap_or(f64::NAN) / self.denom().to_f64().unwrap_or(f64::NAN)
            }

            fn is_integer(&self) -> bool {
                Ratio::is_integer(self)
            }
        }
    };
}

impl_ratio_scalar!(i64);
impl_ratio_scalar!(i128);

macro_rules! impl_float_scalar {
    ($f:ty) => {
        impl Scalar for $f {
            fn from_i64(v: i64) -> Self {
                v as $f
            }

            fn to_i64_exact(&self) -> Option<i64> {
                if self.is_finite() && self.fract() == 0.0 && self.abs() < 9.0e15 {
                    Some(*self as i64)
                } else {
                    None
                }
            }

            fn to_f64(&self) -> f64 {
                *self as f64
            }
        }
    };
}

impl_float_scalar!(f64);
impl_float_scalar!(f32);

/// Parse `"p"`, `"p/q"` or a decimal such as `"1.5"` into a scalar.
pub fn parse_scalar<T: Scalar>(s: &str) -> Option<T> {
    let s = s.trim();
    if let Ok(v) = s.parse::<T>() {
        return Some(v);
    }
    if let Some((a, b)) = s.split_once('/') {
        let a: i64 = a.trim().parse().ok()?;
        let b: i64 = b.trim().parse().ok()?;
        if b == 0 {
            return None;
        }
        return Some(T::from_frac(a, b));
    }
    let (int, frac) = s.split_once('.')?;
    let digits = frac.len() as u32;
    if digits > 15 {
        return None;
    }
    let den = 10i64.pow(digits);
    let neg = int.trim_start().starts_with('-');
    let whole: i64 = int.parse().ok()?;
    let part: i64 = frac.parse().ok()?;
    let num = whole.checked_mul(den)?.checked_add(if neg { -part } else { part })?;
    Some(T::from_frac(num, den))
}

/// Exact integer square root test for non-negative rationals.
pub fn rational_sqrt(q: &Rational) -> Option<Rational> {
    if q.is_negative() {
        return None;
    }
    let n = q.numer().sqrt();
    let d = q.denom().sqrt();
    if n * n == *q.numer() && d * d == *q.denom() {
        Some(Ratio::new(n, d))
    } else {
        None
    }
}

/// Serde helpers: integral values may be written as JSON numbers, every other
/// value as an exact `"p/q"` string.
pub mod serde_exact {
    use super::{parse_scalar, Scalar};
    use serde::de::{self, Deserializer, Visitor};
    use serde::Serializer;
    use std::fmt;
    use std::marker::PhantomData;

    /// Always a string, e.g. `"3/2"` or `"0"`.
    pub fn serialize<T: Scalar, S: Serializer>(v: &T, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(v)
    }

    pub fn deserialize<'de, T: Scalar, D: Deserializer<'de>>(d: D) -> Result<T, D::Error> {
        d.deserialize_any(ScalarVisitor(PhantomData))
    }

    /// Integers as numbers, everything else as strings.
    pub fn serialize_compact<T: Scalar, S: Serializer>(v: &T, s: S) -> Result<S::Ok, S::Error> {
        match v.to_i64_exact() {
            Some(i) => s.serialize_i64(i),
            None => s.collect_str(v),
        }
    }

    pub(crate) struct ScalarVisitor<T>(pub(crate) PhantomData<T>);

    impl<'de, T: Scalar> Visitor<'de> for ScalarVisitor<T> {
        type Value = T;

        fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
            f.write_str("an integer or an exact rational string such as \"3/2\"")
        }

        fn visit_i64<E: de::Error>(self, v: i64) -> Result<T, E> {
            Ok(T::from_i64(v))
        }

        fn visit_u64<E: de::Error>(self, v: u64) -> Result<T, E> {
            i64::try_from(v)
                .map(T::from_i64)
                .map_err(|_| E::custom("integer out of range"))
        }

        fn visit_f64<E: de::Error>(self, v: f64) -> Result<T, E> {
            parse_scalar(&v.to_string()).ok_or_else(|| E::custom(format!("cannot represent {v} exactly")))
        }

        fn visit_str<E: de::Error>(self, v: &str) -> Result<T, E> {
            parse_scalar(v).ok_or_else(|| E::custom(format!("invalid number {v:?}")))
        }
    }

    pub mod option {
        use super::*;
        use serde::Deserialize;

        pub fn serialize<T: Scalar, S: Serializer>(v: &Option<T>, s: S) -> Result<S::Ok, S::Error> {
            match v {
                Some(v) => s.collect_str(v),
                None => s.serialize_none(),
            }
        }

        pub fn deserialize<'de, T: Scalar, D: Deserializer<'de>>(d: D) -> Result<Option<T>, D::Error> {
            #[derive(Deserialize)]
            #[serde(untagged)]
            enum Raw {
                Int(i64),
                Str(String),
            }
            match Option::<Raw>::deserialize(d)? {
                None => Ok(None),
                Some(Raw::Int(i)) => Ok(Some(T::from_i64(i))),
                Some(Raw::Str(s)) => parse_scalar(&s)
                    .map(Some)
                    .ok_or_else(|| de::Error::custom(format!("invalid number {s:?}"))),
            }
        }
    }
}
