use std::fmt;
use std::str::FromStr;

use serde::{de, Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Strength of the 2-cycle penalty `α·N₂`; `+∞` is exact (`e^{−α} = 0`).
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct Alpha(f64);

impl Alpha {
    pub const ZERO: Alpha = Alpha(0.0);
    pub const INFINITY: Alpha = Alpha(f64::INFINITY);

    pub fn new(value: f64) -> Result<Self> {
        if value.is_nan() || value < 0.0 {
            return Err(Error::Domain(format!(
                "alpha must be nonnegative, got {value}"
            )));
        }
        Ok(Self(value))
    }

    pub fn value(self) -> f64 {
        self.0
    }

    pub fn is_zero(self) -> bool {
        self.0 == 0.0
    }

    pub fn is_infinite(self) -> bool {
        self.0.is_infinite()
    }

    /// `e^{−α}`.
    pub fn exp_neg(self) -> f64 {
        (-self.0).exp()
    }

    /// `1 − e^{−α}`.
    pub fn one_minus_exp_neg(self) -> f64 {
        -(-self.0).exp_m1()
    }

    /// `δ = (1 − e^{−α})/2`.
    pub fn delta(self) -> f64 {
        0.5 * self.one_minus_exp_neg()
    }

    /// `α·n₂` with `0·∞ = 0`.
    pub fn penalty(self, n2: usize) -> f64 {
        if n2 == 0 {
            0.0
        } else {
            self.0 * n2 as f64
        }
    }
}

impl Default for Alpha {
    fn default() -> Self {
        Self::ZERO
    }
}

impl fmt::Display for Alpha {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_infinite() {
            f.write_str("inf")
        } else {
            write!(f, "{}", self.0)
        }
    }
}

impl FromStr for Alpha {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "inf" | "+inf" | "infinity" | "+infinity" => Ok(Self::INFINITY),
            t => t
                .parse::<f64>()
                .map_err(|_| Error::InvalidInput(format!("cannot parse alpha from {s:?}")))
                .and_then(Self::new),
        }
    }
}

impl Serialize for Alpha {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        if self.is_infinite() {
            s.serialize_str("inf")
        } else {
            s.serialize_f64(self.0)
        }
    }
}

impl<'de> Deserialize<'de> for Alpha {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(f64),
            Text(String),
        }
        match Raw::deserialize(d)? {
            Raw::Num(v) => Alpha::new(v).map_err(de::Error::custom),
            Raw::Text(t) => t.parse().map_err(de::Error::custom),
        }
    }
}

/// Linear-order map from scattering length `a` to the 2-cycle penalty: `α = √(8/(πβ))·a`.
pub fn alpha_from_scattering_length(a: f64, beta: f64) -> Result<f64> {
    if !(a >= 0.0 && a.is_finite()) {
        return Err(Error::Domain(format!(
            "scattering length must be nonnegative, got {a}"
        )));
    }
    if !(beta > 0.0 && beta.is_finite()) {
        return Err(Error::Domain(format!("beta must be positive, got {beta}")));
    }
    Ok((8.0 / (std::f64::consts::PI * beta)).sqrt() * a)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_serde() {
        assert!("inf".parse::<Alpha>().unwrap().is_infinite());
        assert_eq!("0.5".parse::<Alpha>().unwrap().value(), 0.5);
        assert!("-1".parse::<Alpha>().is_err());
        let a: Alpha = serde_json::from_str("\"inf\"").unwrap();
        assert!(a.is_infinite());
        let b: Alpha = serde_json::from_str("1.5").unwrap();
        assert_eq!(serde_json::to_string(&b).unwrap(), "1.5");
        assert_eq!(serde_json::to_string(&Alpha::INFINITY).unwrap(), "\"inf\"");
    }

    #[test]
    fn delta_and_penalty() {
        assert_eq!(Alpha::INFINITY.delta(), 0.5);
        assert_eq!(Alpha::ZERO.delta(), 0.0);
        assert_eq!(Alpha::INFINITY.penalty(0), 0.0);
        assert!(Alpha::INFINITY.penalty(1).is_infinite());
    }

    #[test]
    fn scattering_map() {
        assert_eq!(alpha_from_scattering_length(0.0, 1.0).unwrap(), 0.0);
        let a = alpha_from_scattering_length(0.01, 1.0).unwrap();
        assert!((a - 0.015_957_691_216_057_31).abs() < 1e-15);
        assert!((alpha_from_scattering_length(0.02, 1.0).unwrap() - 2.0 * a).abs() < 1e-16);
    }
}
