#![allow(dead_code)]
//! Exact toy space: numbers `a + b√2` with rational `a`, `b`, where two points
//! are a finite distance apart only if they differ by a rational.

use hyers_ulam::fixpoint::GeneralizedMetric;
use hyers_ulam::ExtReal;
use num_rational::Ratio;

pub type Q = Ratio<i128>;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Surd {
    pub a: Q,
    pub b: Q,
}

impl Surd {
    pub fn new(a: Q, b: Q) -> Self {
        Surd { a, b }
    }

    pub fn zero() -> Self {
        Surd::new(Q::from(0), Q::from(0))
    }

    pub fn rational(q: Q) -> Self {
        Surd::new(q, Q::from(0))
    }
}

pub struct RationalOffset;

impl GeneralizedMetric for RationalOffset {
    type Point = Surd;

    fn distance(&self, x: &Surd, y: &Surd) -> ExtReal {
        if x.b != y.b {
            return ExtReal::INF;
        }
        let d = x.a - y.a;
        let d = if d < Q::from(0) { -d } else { d };
        ExtReal::new(*d.numer() as f64 / *d.denom() as f64).expect("nonnegative")
    }
}

/// `x ↦ x/2 + √2`.
pub fn halve_plus_root2(x: &Surd) -> Result<Surd, std::convert::Infallible> {
    let half = Q::new(1, 2);
    Ok(Surd::new(x.a * half, x.b * half + Q::from(1)))
}
