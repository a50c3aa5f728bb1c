use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::matrix::ComplexMatrix;
use super::svd::singular_values;
use crate::error::{Error, Result};

/// Schatten exponent in [1, ∞], with ∞ as its own variant.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Exponent {
    Finite(f64),
    Infinity,
}

impl Exponent {
    pub fn new(p: f64) -> Result<Self> {
        if p == f64::INFINITY {
            Ok(Exponent::Infinity)
        } else if p.is_finite() && p >= 1.0 {
            Ok(Exponent::Finite(p))
        } else {
            Err(Error::InvalidP(p))
        }
    }

    pub fn value(self) -> f64 {
        match self {
            Exponent::Finite(p) => p,
            Exponent::Infinity => f64::INFINITY,
        }
    }

    /// Hölder conjugate p*.
    pub fn conjugate(self) -> Exponent {
        match self {
            Exponent::Infinity => Exponent::Finite(1.0),
            Exponent::Finite(p) if p == 1.0 => Exponent::Infinity,
            Exponent::Finite(p) => Exponent::Finite(p / (p - 1.0)),
        }
    }

    pub fn is_infinite(self) -> bool {
        matches!(self, Exponent::Infinity)
    }
}

impl fmt::Display for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Exponent::Finite(p) => write!(f, "{p}"),
            Exponent::Infinity => write!(f, "inf"),
        }
    }
}

impl FromStr for Exponent {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "inf" | "infinity" | "Inf" | "oo" => Ok(Exponent::Infinity),
            t => {
                let p: f64 = t.parse().map_err(|_| Error::Invalid(format!("bad exponent '{s}'")))?;
                Exponent::new(p)
            }
        }
    }
}

impl Serialize for Exponent {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Exponent::Finite(p) => s.serialize_f64(*p),
            Exponent::Infinity => s.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for Exponent {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(f64),
            Str(String),
        }
        match Raw::deserialize(d)? {
            Raw::Num(p) => Exponent::new(p).map_err(serde::de::Error::custom),
            Raw::Str(s) => s.parse().map_err(serde::de::Error::custom),
        }
    }
}

/// ‖s‖_p of a nonnegative vector, scaled to avoid overflow.
pub fn vector_p_norm(s: &[f64], p: Exponent) -> f64 {
    let smax = s.iter().map(|x| x.abs()).fold(0.0, f64::max);
    match p {
        Exponent::Infinity => smax,
        _ if smax == 0.0 => 0.0,
        Exponent::Finite(p) if p == 1.0 => s.iter().map(|x| x.abs()).sum(),
        Exponent::Finite(p) if p == 2.0 => s.iter().map(|x| x * x).sum::<f64>().sqrt(),
        Exponent::Finite(p) => smax * s.iter().map(|x| (x.abs() / smax).powf(p)).sum::<f64>().powf(1.0 / p),
    }
}

pub fn schatten_norm(x: &ComplexMatrix, p: Exponent) -> Result<f64> {
    if let Exponent::Finite(q) = p {
        if q == 2.0 {
            return Ok(x.frobenius_norm());
        }
    }
    Ok(vector_p_norm(&singular_values(x)?, p))
}

/// schatten_norm with a raw float exponent; p = f64::INFINITY selects ∞.
pub fn schatten_norm_f64(x: &ComplexMatrix, p: f64) -> Result<f64> {
    schatten_norm(x, Exponent::new(p)?)
}
