//! Rational scalars, vectors and their text encoding (`"num/den"`).

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub type Rational = BigRational;
pub type RatVec = Vec<Rational>;

pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn int_vec(v: &[i64]) -> RatVec {
    v.iter().map(|&x| int(x)).collect()
}

pub fn unit_vec(n: usize, i: usize) -> RatVec {
    let mut v = vec![Rational::zero(); n];
    v[i] = Rational::one();
    v
}

/// Formats as `"n"` or `"n/d"` in lowest terms.
pub fn format_rational(r: &Rational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    let bad = || Error::Parse(format!("not a rational: `{s}`"));
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().map_err(|_| bad())?;
            let d: BigInt = d.trim().parse().map_err(|_| bad())?;
            if d.is_zero() {
                return Err(bad());
            }
            Ok(Rational::new(n, d))
        }
        None => Ok(Rational::from_integer(s.parse().map_err(|_| bad())?)),
    }
}

/// Parses a comma separated list such as `1/3,2/3,-2/3`.
pub fn parse_rational_list(s: &str) -> Result<RatVec> {
    s.split(',')
        .filter(|t| !t.trim().is_empty())
        .map(parse_rational)
        .collect()
}

pub fn dot(a: &[Rational], b: &[Rational]) -> Rational {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn is_zero_vec(v: &[Rational]) -> bool {
    v.iter().all(Zero::is_zero)
}

pub fn scale_vec(v: &[Rational], c: &Rational) -> RatVec {
    v.iter().map(|x| x * c).collect()
}

pub fn add_vec(a: &[Rational], b: &[Rational]) -> RatVec {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

pub fn sub_vec(a: &[Rational], b: &[Rational]) -> RatVec {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

/// Rescales `v` to the primitive integer vector on the same line whose first
/// nonzero coordinate is positive. The zero vector is returned unchanged.
pub fn primitive_direction(v: &[Rational]) -> RatVec {
    use num_integer::Integer;
    if is_zero_vec(v) {
        return v.to_vec();
    }
    let lcm = v
        .iter()
        .fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
    let ints: Vec<BigInt> = v.iter().map(|x| (x * &lcm).to_integer()).collect();
    let g = ints.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
    let lead_negative = ints.iter().find(|x| !x.is_zero()).is_some_and(|x| x.is_negative());
    ints.into_iter()
        .map(|x| {
            let q = x / &g;
            Rational::from_integer(if lead_negative { -q } else { q })
        })
        .collect()
}

/// Converts an integral rational vector to `i64`, if every entry fits.
pub fn to_i64_vec(v: &[Rational]) -> Option<Vec<i64>> {
    v.iter()
        .map(|x| if x.is_integer() { x.to_integer().to_i64() } else { None })
        .collect()
}

/// Sign of a rational as -1, 0 or 1.
pub fn sign(r: &Rational) -> i32 {
    if r.is_positive() {
        1
    } else if r.is_negative() {
        -1
    } else {
        0
    }
}

/// Serde adapters used by the JSON wire formats. Rationals travel as
/// strings; integers are accepted as shorthand on input.
pub mod serde_rat {
    use super::*;
    use serde::de::{self, Deserializer};
    use serde::ser::Serializer;
    use serde::Deserialize;

    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Raw {
        Int(i64),
        Str(String),
    }

    fn from_raw<E: de::Error>(raw: Raw) -> std::result::Result<Rational, E> {
        match raw {
            Raw::Int(i) => Ok(int(i)),
            Raw::Str(s) => parse_rational(&s).map_err(E::custom),
        }
    }

    pub fn serialize<S: Serializer>(r: &Rational, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&format_rational(r))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Rational, D::Error> {
        from_raw(Raw::deserialize(d)?)
    }

    pub mod vec {
        use super::*;
        use serde::ser::SerializeSeq;

        pub fn serialize<S: Serializer>(v: &[Rational], s: S) -> std::result::Result<S::Ok, S::Error> {
            let mut seq = s.serialize_seq(Some(v.len()))?;
            for x in v {
                seq.serialize_element(&format_rational(x))?;
            }
            seq.end()
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<RatVec, D::Error> {
            Vec::<Raw>::deserialize(d)?.into_iter().map(from_raw).collect()
        }
    }

    pub mod rows {
        use super::*;
        use serde::ser::SerializeSeq;

        pub fn serialize<S: Serializer>(
            rows: &[RatVec],
            s: S,
        ) -> std::result::Result<S::Ok, S::Error> {
            let mut seq = s.serialize_seq(Some(rows.len()))?;
            for row in rows {
                let strs: Vec<String> = row.iter().map(format_rational).collect();
                seq.serialize_element(&strs)?;
            }
            seq.end()
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(
            d: D,
        ) -> std::result::Result<Vec<RatVec>, D::Error> {
            Vec::<Vec<Raw>>::deserialize(d)?
                .into_iter()
                .map(|row| row.into_iter().map(from_raw).collect())
                .collect()
        }
    }
}

/// Compact JSON rendering: integers as numbers, everything else as `"n/d"`.
pub fn compact_json(r: &Rational) -> serde_json::Value {
    match r.is_integer().then(|| r.to_integer().to_i64()).flatten() {
        Some(i) => serde_json::Value::from(i),
        None => serde_json::Value::from(format_rational(r)),
    }
}
