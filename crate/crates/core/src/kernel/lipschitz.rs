//! Sampled check of `|V(x,τ,y) − V(x,τ,z)| ≤ φ(|y−z|)·|y−z|`.
//!
//! `(x, τ)` run over a jittered stratified grid on `[a, b]²`; `y`, `z` are
//! drawn uniformly from the disk of radius `R` (or the segment `[−R, R]` for
//! real-valued problems). Verification is only ever as strong as the sample.

use std::f64::consts::TAU;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use super::ast::KernelExpr;
use super::eval::{eval_kernel, EvalError};
use crate::metric::ulp;
use crate::mtfunc::MtFunc;

pub const DEFAULT_DISK_RADIUS: f64 = 10.0;
pub const DEFAULT_LIPSCHITZ_SAMPLES: usize = 4096;
const SLACK_ULPS: u32 = 4;

/// Where the `y` arguments of the kernel are assumed to live.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SampleDomain {
    #[default]
    Complex,
    Real,
}

impl SampleDomain {
    pub fn name(self) -> &'static str {
        match self {
            SampleDomain::Complex => "complex",
            SampleDomain::Real => "real",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        match s {
            "complex" => Some(SampleDomain::Complex),
            "real" => Some(SampleDomain::Real),
            _ => None,
        }
    }

    pub fn draw(self, rng: &mut impl Rng, radius: f64) -> Complex64 {
        match self {
            SampleDomain::Complex => {
                let r = radius * rng.random::<f64>().sqrt();
                Complex64::from_polar(r, TAU * rng.random::<f64>())
            }
            SampleDomain::Real => Complex64::new(radius * (2.0 * rng.random::<f64>() - 1.0), 0.0),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SampleSpec {
    pub count: usize,
    pub radius: f64,
    pub seed: u64,
    pub domain: SampleDomain,
}

impl Default for SampleSpec {
    fn default() -> Self {
        SampleSpec {
            count: DEFAULT_LIPSCHITZ_SAMPLES,
            radius: DEFAULT_DISK_RADIUS,
            seed: 0,
            domain: SampleDomain::Complex,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CounterSample {
    pub x: f64,
    pub tau: f64,
    pub y: Complex64,
    pub z: Complex64,
    pub lhs: f64,
    pub rhs: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LipschitzOutcome {
    Verified { samples: usize },
    CounterSample(CounterSample),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LipschitzError {
    #[error("invalid sample spec: {0}")]
    InvalidSpec(String),
    #[error("kernel evaluation failed at x = {x}, tau = {tau}, y = {y}: {source}")]
    Eval {
        x: f64,
        tau: f64,
        y: Complex64,
        #[source]
        source: EvalError,
    },
}

/// Evaluates both sides of the modulus inequality at one sample point.
pub fn modulus_sides(
    k: &KernelExpr,
    phi: &MtFunc,
    x: f64,
    tau: f64,
    y: Complex64,
    z: Complex64,
) -> Result<Sides, LipschitzError> {
    let at = |w: Complex64| {
        eval_kernel(k, x, tau, w).map_err(|source| LipschitzError::Eval {
            x,
            tau,
            y: w,
            source,
        })
    };
    let (vy, vz) = (at(y)?, at(z)?);
    let lhs = (vy - vz).norm();
    let gap = (y - z).norm();
    let factor = phi
        .eval(gap)
        .map_err(|e| LipschitzError::InvalidSpec(e.to_string()))?;
    Ok(Sides {
        lhs,
        rhs: factor * gap,
        scale: vy.norm().max(vz.norm()),
    })
}

/// Both sides of the modulus inequality at one sample, plus the magnitude of
/// the kernel values whose difference forms `lhs`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sides {
    pub lhs: f64,
    pub rhs: f64,
    pub scale: f64,
}

impl Sides {
    /// `lhs ≤ rhs` up to a few ulps at the larger of `rhs` and the kernel
    /// values, since `lhs` inherits the rounding of `V(y)` and `V(z)`.
    pub fn holds(&self) -> bool {
        self.lhs <= self.rhs + f64::from(SLACK_ULPS) * ulp(self.rhs.max(self.scale))
    }
}

pub fn verify_lipschitz_condition(
    k: &KernelExpr,
    phi: &MtFunc,
    domain: (f64, f64),
    spec: &SampleSpec,
) -> Result<LipschitzOutcome, LipschitzError> {
    let (a, b) = domain;
    if !(a < b) || !a.is_finite() || !b.is_finite() {
        return Err(LipschitzError::InvalidSpec(format!(
            "bad interval [{a}, {b}]"
        )));
    }
    if spec.count == 0 {
        return Err(LipschitzError::InvalidSpec(
            "sample count must be at least 1".into(),
        ));
    }
    if !(spec.radius > 0.0) || !spec.radius.is_finite() {
        return Err(LipschitzError::InvalidSpec(format!(
            "radius must be positive and finite, got {}",
            spec.radius
        )));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let strata = (spec.count as f64).sqrt().ceil() as usize;
    let width = b - a;
    let place = |cell: usize, jitter: f64| a + width * (cell as f64 + jitter) / strata as f64;

    for s in 0..spec.count {
        let x = place(s % strata, rng.random());
        let tau = place((s / strata) % strata, rng.random());
        let y = spec.domain.draw(&mut rng, spec.radius);
        let z = spec.domain.draw(&mut rng, spec.radius);
        let sides = modulus_sides(k, phi, x, tau, y, z)?;
        if !sides.holds() {
            let Sides { lhs, rhs, .. } = sides;
            return Ok(LipschitzOutcome::CounterSample(CounterSample {
                x,
                tau,
                y,
                z,
                lhs,
                rhs,
            }));
        }
    }
    Ok(LipschitzOutcome::Verified {
        samples: spec.count,
    })
}
