//! Extended real values with a total order.
//!
//! Scores and conventions in this crate take values on the extended real
//! line. The `Finite` payload is guaranteed to be an ordinary finite `f64`
//! (never NaN, never an IEEE infinity), which keeps comparisons total and
//! avoids `0 * inf` traps inside the generalized-mean arithmetic.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

/// A point of the extended real line `[-inf, +inf]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ExtReal {
    NegInf,
    Finite(f64),
    PosInf,
}

impl ExtReal {
    /// Wraps a finite value. Panics on NaN or IEEE infinities.
    pub fn finite(value: f64) -> Self {
        assert!(value.is_finite(), "ExtReal::finite requires a finite value, got {value}");
        ExtReal::Finite(value)
    }

    /// Maps an arbitrary `f64` onto the extended line; NaN is rejected.
    pub fn from_f64(value: f64) -> Self {
        assert!(!value.is_nan(), "ExtReal cannot represent NaN");
        if value == f64::INFINITY {
            ExtReal::PosInf
        } else if value == f64::NEG_INFINITY {
            ExtReal::NegInf
        } else {
            ExtReal::Finite(value)
        }
    }

    pub fn as_finite(&self) -> Option<f64> {
        match self {
            ExtReal::Finite(v) => Some(*v),
            _ => None,
        }
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, ExtReal::Finite(_))
    }

    pub fn is_pos_inf(&self) -> bool {
        matches!(self, ExtReal::PosInf)
    }

    pub fn is_neg_inf(&self) -> bool {
        matches!(self, ExtReal::NegInf)
    }

    /// Lossy view as `f64`, using IEEE infinities for the endpoints.
    pub fn to_f64(&self) -> f64 {
        match self {
            ExtReal::NegInf => f64::NEG_INFINITY,
            ExtReal::Finite(v) => *v,
            ExtReal::PosInf => f64::INFINITY,
        }
    }

    /// Absolute difference, treating equal infinities as distance zero.
    pub fn abs_diff(&self, other: &ExtReal) -> f64 {
        match (self, other) {
            (ExtReal::Finite(a), ExtReal::Finite(b)) => (a - b).abs(),
            (ExtReal::PosInf, ExtReal::PosInf) | (ExtReal::NegInf, ExtReal::NegInf) => 0.0,
            _ => f64::INFINITY,
        }
    }
}

impl Eq for ExtReal {}

impl PartialOrd for ExtReal {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for ExtReal {
    fn cmp(&self, other: &Self) -> Ordering {
        use ExtReal::*;
        match (self, other) {
            (NegInf, NegInf) | (PosInf, PosInf) => Ordering::Equal,
            (NegInf, _) => Ordering::Less,
            (_, NegInf) => Ordering::Greater,
            (PosInf, _) => Ordering::Greater,
            (_, PosInf) => Ordering::Less,
            // Finite payloads are non-NaN by construction.
            (Finite(a), Finite(b)) => a.partial_cmp(b).expect("finite payloads are ordered"),
        }
    }
}

impl fmt::Display for ExtReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtReal::NegInf => write!(f, "-inf"),
            ExtReal::Finite(v) => write!(f, "{v}"),
            ExtReal::PosInf => write!(f, "inf"),
        }
    }
}

impl FromStr for ExtReal {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "inf" | "+inf" => Ok(ExtReal::PosInf),
            "-inf" => Ok(ExtReal::NegInf),
            other => {
                let v: f64 = other.parse().map_err(|_| format!("invalid extended real: {s:?}"))?;
                if v.is_finite() {
                    Ok(ExtReal::Finite(v))
                } else {
                    Err(format!("invalid extended real: {s:?}"))
                }
            }
        }
    }
}
