//! Gaussian uncertain reals and probabilistic booleans.
//!
//! An [`UncertainReal`] is a value `mean ± std` interpreted as a Normal random
//! variable. Arithmetic uses first-order (GUM) propagation with every operand
//! treated as independent. Comparisons return an [`UncertainBool`] carrying the
//! probability that the proposition holds; [`decide`] turns that into a crisp
//! decision at a confidence level.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use libm::erfc;

use crate::error::{Error, Result};

/// A real value with quantified standard uncertainty.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UncertainReal {
    mean: f64,
    std: f64,
}

impl UncertainReal {
    /// Panics if `std` is negative or NaN.
    pub fn new(mean: f64, std: f64) -> Self {
        assert!(std >= 0.0, "standard uncertainty must be non-negative, got {std}");
        UncertainReal { mean, std }
    }

    pub fn try_new(mean: f64, std: f64) -> Result<Self> {
        if std >= 0.0 && std.is_finite() && mean.is_finite() {
            Ok(UncertainReal { mean, std })
        } else {
            Err(Error::InvalidValue(format!("{mean} ± {std}")))
        }
    }

    /// A value without uncertainty.
    pub fn crisp(mean: f64) -> Self {
        UncertainReal { mean, std: 0.0 }
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    pub fn std(&self) -> f64 {
        self.std
    }

    pub fn variance(&self) -> f64 {
        self.std * self.std
    }

    pub fn is_crisp(&self) -> bool {
        self.std == 0.0
    }

    pub fn is_finite(&self) -> bool {
        self.mean.is_finite() && self.std.is_finite()
    }

    /// `k · self` with `std = |k| · self.std`.
    pub fn scale(self, k: f64) -> Self {
        UncertainReal {
            mean: k * self.mean,
            std: k.abs() * self.std,
        }
    }

    /// First-order quotient. Fails when the divisor mean is zero.
    pub fn checked_div(self, rhs: UncertainReal) -> Result<Self> {
        if rhs.mean == 0.0 {
            return Err(Error::DivisionByZero);
        }
        let mean = self.mean / rhs.mean;
        // d(a/b) = da/b - a·db/b²; written this way it stays defined for a = 0.
        let std = ((self.std / rhs.mean).powi(2) + (self.mean * rhs.std / (rhs.mean * rhs.mean)).powi(2))
            .sqrt();
        Ok(UncertainReal { mean, std })
    }

    /// Probability that `self < other`.
    pub fn lt(&self, other: &UncertainReal) -> UncertainBool {
        lt_prob(*self, *other)
    }

    /// Probability that `self > other`.
    pub fn gt(&self, other: &UncertainReal) -> UncertainBool {
        lt_prob(*other, *self)
    }

    /// Symmetric coverage interval `[mean - k·std, mean + k·std]`.
    pub fn interval(&self, k: f64) -> (f64, f64) {
        (self.mean - k * self.std, self.mean + k * self.std)
    }
}

impl Default for UncertainReal {
    fn default() -> Self {
        UncertainReal::crisp(0.0)
    }
}

impl From<f64> for UncertainReal {
    fn from(v: f64) -> Self {
        UncertainReal::crisp(v)
    }
}

impl fmt::Display for UncertainReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match f.precision() {
            Some(p) => write!(f, "{:.*} ± {:.*}", p, self.mean, p, self.std),
            None => write!(f, "{} ± {}", self.mean, self.std),
        }
    }
}

impl Add for UncertainReal {
    type Output = UncertainReal;

    fn add(self, rhs: UncertainReal) -> UncertainReal {
        UncertainReal {
            mean: self.mean + rhs.mean,
            std: self.std.hypot(rhs.std),
        }
    }
}

impl Sub for UncertainReal {
    type Output = UncertainReal;

    fn sub(self, rhs: UncertainReal) -> UncertainReal {
        self + (-rhs)
    }
}

impl Neg for UncertainReal {
    type Output = UncertainReal;

    fn neg(self) -> UncertainReal {
        UncertainReal {
            mean: -self.mean,
            std: self.std,
        }
    }
}

impl Mul for UncertainReal {
    type Output = UncertainReal;

    fn mul(self, rhs: UncertainReal) -> UncertainReal {
        UncertainReal {
            mean: self.mean * rhs.mean,
            std: (rhs.mean * self.std).hypot(self.mean * rhs.std),
        }
    }
}

impl Mul<f64> for UncertainReal {
    type Output = UncertainReal;

    fn mul(self, k: f64) -> UncertainReal {
        self.scale(k)
    }
}

impl Mul<UncertainReal> for f64 {
    type Output = UncertainReal;

    fn mul(self, a: UncertainReal) -> UncertainReal {
        a.scale(self)
    }
}

/// Panics on a zero divisor mean; use [`UncertainReal::checked_div`] to handle it.
impl Div for UncertainReal {
    type Output = UncertainReal;

    fn div(self, rhs: UncertainReal) -> UncertainReal {
        self.checked_div(rhs).expect("division by an uncertain value with zero mean")
    }
}

/// A proposition that holds with a given probability.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UncertainBool {
    confidence: f64,
}

impl UncertainBool {
    /// Panics if `confidence` is outside `[0, 1]`.
    pub fn new(confidence: f64) -> Self {
        assert!(
            (0.0..=1.0).contains(&confidence),
            "confidence must lie in [0, 1], got {confidence}"
        );
        UncertainBool { confidence }
    }

    pub fn certain(value: bool) -> Self {
        UncertainBool {
            confidence: if value { 1.0 } else { 0.0 },
        }
    }

    pub fn confidence(&self) -> f64 {
        self.confidence
    }

    pub fn decide(&self, confidence_level: f64) -> bool {
        decide(*self, confidence_level)
    }
}

impl std::ops::Not for UncertainBool {
    type Output = UncertainBool;

    fn not(self) -> UncertainBool {
        UncertainBool {
            confidence: 1.0 - self.confidence,
        }
    }
}

/// Standard Normal CDF, `Φ(x) = erfc(-x/√2) / 2`.
pub fn std_normal_cdf(x: f64) -> f64 {
    0.5 * erfc(-x / std::f64::consts::SQRT_2)
}

pub fn add(a: UncertainReal, b: UncertainReal) -> UncertainReal {
    a + b
}

pub fn scale(k: f64, a: UncertainReal) -> UncertainReal {
    a.scale(k)
}

pub fn mul(a: UncertainReal, b: UncertainReal) -> UncertainReal {
    a * b
}

/// Probability that `a < b` for independent Normal `a` and `b`.
///
/// When both operands are crisp the comparison is the strict real one, so
/// equal crisp values yield confidence 0.
pub fn lt_prob(a: UncertainReal, b: UncertainReal) -> UncertainBool {
    let spread = a.std.hypot(b.std);
    if spread == 0.0 {
        return UncertainBool::certain(a.mean < b.mean);
    }
    UncertainBool::new(std_normal_cdf((b.mean - a.mean) / spread))
}

/// `true` iff the proposition holds with at least `confidence_level` probability.
pub fn decide(p: UncertainBool, confidence_level: f64) -> bool {
    p.confidence >= confidence_level
}

/// Equality in distribution: both moments agree within `tol`.
pub fn eq_in_distribution(a: UncertainReal, b: UncertainReal, tol: f64) -> bool {
    (a.mean - b.mean).abs() <= tol && (a.std - b.std).abs() <= tol
}
