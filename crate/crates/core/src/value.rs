use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{domain, Error, Result};

/// How the error bar of a [`CertifiedValue`] was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    Exact,
    SeriesTruncation,
    Quadrature,
}

/// A number together with a bound on its absolute error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CertifiedValue {
    pub value: f64,
    pub abs_err: f64,
    pub provenance: Provenance,
}

impl CertifiedValue {
    pub fn exact(value: f64) -> Self {
        Self {
            value,
            abs_err: 0.0,
            provenance: Provenance::Exact,
        }
    }

    /// Panics in debug builds if `abs_err` is negative or not finite.
    pub fn new(value: f64, abs_err: f64, provenance: Provenance) -> Self {
        debug_assert!(abs_err >= 0.0 && abs_err.is_finite(), "bad abs_err {abs_err}");
        if provenance == Provenance::Exact {
            debug_assert_eq!(abs_err, 0.0);
        }
        Self {
            value,
            abs_err,
            provenance,
        }
    }

    pub fn lower(&self) -> f64 {
        self.value - self.abs_err
    }

    pub fn upper(&self) -> f64 {
        self.value + self.abs_err
    }

    /// True when `x` lies in `[value - abs_err - slack, value + abs_err + slack]`.
    pub fn contains(&self, x: f64, slack: f64) -> bool {
        (x - self.value).abs() <= self.abs_err + slack
    }

    /// Multiplies value and error by `c`.
    pub fn scale(self, c: f64) -> Self {
        Self {
            value: self.value * c,
            abs_err: self.abs_err * c.abs(),
            provenance: self.provenance,
        }
    }
}

impl fmt::Display for CertifiedValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} ± {:e}", self.value, self.abs_err)
    }
}

/// An exponent `p` in `[1, ∞]`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize)]
#[serde(into = "String")]
pub struct LpExponent(f64);

impl LpExponent {
    pub const ONE: Self = Self(1.0);
    pub const TWO: Self = Self(2.0);
    pub const INFINITY: Self = Self(f64::INFINITY);

    pub fn new(p: f64) -> Result<Self> {
        if p >= 1.0 && !p.is_nan() {
            Ok(Self(p))
        } else {
            Err(domain("p", p, "p in [1, inf]"))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }

    pub fn is_infinite(self) -> bool {
        self.0.is_infinite()
    }

    pub fn is_one(self) -> bool {
        self.0 == 1.0
    }

    /// `p' = p/(p-1)`, with `1 ↔ ∞`.
    pub fn conjugate(self) -> Self {
        if self.0 == 1.0 {
            Self::INFINITY
        } else if self.0.is_infinite() {
            Self::ONE
        } else {
            Self(self.0 / (self.0 - 1.0))
        }
    }
}

impl fmt::Display for LpExponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_infinite() {
            f.write_str("inf")
        } else {
            write!(f, "{}", self.0)
        }
    }
}

impl From<LpExponent> for String {
    fn from(p: LpExponent) -> String {
        p.to_string()
    }
}

impl FromStr for LpExponent {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        match s.to_ascii_lowercase().as_str() {
            "inf" | "infinity" | "∞" => Ok(Self::INFINITY),
            other => {
                let p: f64 = other
                    .parse()
                    .map_err(|_| Error::Argument(format!("cannot parse exponent {s:?}")))?;
                Self::new(p)
            }
        }
    }
}
