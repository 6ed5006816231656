//! Contraction-factor functions `φ: [0, ∞) → [0, 1)`.
//!
//! An MT-function satisfies `limsup_{s→t+} φ(s) < 1` at every `t ≥ 0`. The
//! solver only accepts constants and nondecreasing step tables, both carrying
//! an explicit supremum cap so the contraction constant is known exactly.
//! Closed-form registry entries exist so the sampled characterization checks
//! have something to reject.

use thiserror::Error;

/// Values at or above `1 − REACHES_ONE_TOL` are treated as reaching 1.
pub const REACHES_ONE_TOL: f64 = 1e-12;

const INTERIOR_SAMPLES: usize = 64;
const GEOMETRIC_SAMPLES: i32 = 12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MtError {
    #[error("argument {0} is outside [0, inf)")]
    Domain(f64),
    #[error("invalid contraction factor: {0}")]
    InvalidSpec(String),
    #[error("sequence is empty")]
    EmptySequence,
    #[error("sequence is not nonincreasing at index {index}")]
    NotNonincreasing { index: usize },
    #[error("sequence is not strictly decreasing at index {index}")]
    NotStrictlyDecreasing { index: usize },
    #[error("scaling by {scale} gives sup {product} >= 1 (contraction constant must be < 1)")]
    ContractionViolation {
        scale: f64,
        sup_cap: f64,
        product: f64,
    },
}

/// Closed-form functions known by name. None of them is accepted by the solver.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RegistryEntry {
    /// `f(0) = 0`, `f(s) = 1 − s` on `(0, 1)`, `f(s) = 0` for `s ≥ 1`.
    /// Not an MT-function: `limsup_{s→0+} f(s) = 1`.
    OneMinusS,
}

impl RegistryEntry {
    pub fn from_name(name: &str) -> Option<Self> {
        match name {
            "one-minus-s" => Some(RegistryEntry::OneMinusS),
            _ => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            RegistryEntry::OneMinusS => "one-minus-s",
        }
    }

    fn eval(self, t: f64) -> f64 {
        match self {
            RegistryEntry::OneMinusS => {
                if t > 0.0 && t < 1.0 {
                    1.0 - t
                } else {
                    0.0
                }
            }
        }
    }

    /// True supremum over `[0, ∞)`, attained or not.
    fn supremum(self) -> f64 {
        match self {
            RegistryEntry::OneMinusS => 1.0,
        }
    }

    fn nondecreasing(self) -> bool {
        match self {
            RegistryEntry::OneMinusS => false,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum MtKind {
    Constant(f64),
    /// Right-continuous steps: `values[i]` on `[breakpoints[i], breakpoints[i+1])`,
    /// the last value on `[breakpoints[last], ∞)`. `breakpoints[0] = 0`.
    Table {
        breakpoints: Vec<f64>,
        values: Vec<f64>,
    },
    Registry {
        entry: RegistryEntry,
        scale: f64,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct MtFunc {
    kind: MtKind,
    sup_cap: f64,
    nondecreasing: bool,
}

fn in_unit(v: f64) -> bool {
    (0.0..1.0).contains(&v)
}

impl MtFunc {
    pub fn constant(level: f64) -> Result<Self, MtError> {
        if !in_unit(level) {
            return Err(MtError::InvalidSpec(format!(
                "constant value {level} is outside [0, 1)"
            )));
        }
        Ok(MtFunc {
            kind: MtKind::Constant(level),
            sup_cap: level,
            nondecreasing: true,
        })
    }

    pub fn table(breakpoints: Vec<f64>, values: Vec<f64>, sup_cap: f64) -> Result<Self, MtError> {
        if breakpoints.is_empty() {
            return Err(MtError::InvalidSpec("table has no breakpoints".into()));
        }
        if breakpoints.len() != values.len() {
            return Err(MtError::InvalidSpec(format!(
                "table has {} breakpoints but {} values",
                breakpoints.len(),
                values.len()
            )));
        }
        if breakpoints[0] != 0.0 {
            return Err(MtError::InvalidSpec(format!(
                "first breakpoint must be 0, got {}",
                breakpoints[0]
            )));
        }
        if let Some(w) = breakpoints
            .windows(2)
            .position(|w| !(w[0] < w[1]) || !w[1].is_finite())
        {
            return Err(MtError::InvalidSpec(format!(
                "breakpoints must be finite and strictly increasing (index {})",
                w + 1
            )));
        }
        if let Some(i) = values.iter().position(|v| !in_unit(*v)) {
            return Err(MtError::InvalidSpec(format!(
                "table value {} at index {i} is outside [0, 1)",
                values[i]
            )));
        }
        if !in_unit(sup_cap) {
            return Err(MtError::InvalidSpec(format!(
                "sup_cap {sup_cap} is outside [0, 1)"
            )));
        }
        let max = values.iter().copied().fold(0.0, f64::max);
        if max > sup_cap {
            return Err(MtError::InvalidSpec(format!(
                "sup_cap {sup_cap} is below the table maximum {max}"
            )));
        }
        let nondecreasing = values.windows(2).all(|w| w[0] <= w[1]);
        Ok(MtFunc {
            kind: MtKind::Table {
                breakpoints,
                values,
            },
            sup_cap,
            nondecreasing,
        })
    }

    pub fn registry(entry: RegistryEntry) -> Self {
        MtFunc {
            kind: MtKind::Registry { entry, scale: 1.0 },
            sup_cap: entry.supremum(),
            nondecreasing: entry.nondecreasing(),
        }
    }

    pub fn kind(&self) -> &MtKind {
        &self.kind
    }

    /// Declared supremum of the function over `[0, ∞)`.
    pub fn sup_cap(&self) -> f64 {
        self.sup_cap
    }

    pub fn is_nondecreasing(&self) -> bool {
        self.nondecreasing
    }

    pub fn is_registry(&self) -> bool {
        matches!(self.kind, MtKind::Registry { .. })
    }

    pub fn eval(&self, t: f64) -> Result<f64, MtError> {
        if !t.is_finite() || t < 0.0 {
            return Err(MtError::Domain(t));
        }
        Ok(self.eval_unchecked(t))
    }

    fn eval_unchecked(&self, t: f64) -> f64 {
        match &self.kind {
            MtKind::Constant(level) => *level,
            MtKind::Table {
                breakpoints,
                values,
            } => {
                let idx = breakpoints.partition_point(|b| *b <= t);
                values[idx - 1]
            }
            MtKind::Registry { entry, scale } => scale * entry.eval(t),
        }
    }
}

/// `α(t) = K·φ(t)`. Fails when `K·sup φ ≥ 1`.
pub fn scale_to_alpha(phi: &MtFunc, k: f64) -> Result<MtFunc, MtError> {
    if !(k > 0.0) || !k.is_finite() {
        return Err(MtError::InvalidSpec(format!(
            "scale must be positive and finite, got {k}"
        )));
    }
    let product = k * phi.sup_cap;
    if product >= 1.0 {
        return Err(MtError::ContractionViolation {
            scale: k,
            sup_cap: phi.sup_cap,
            product,
        });
    }
    let kind = match &phi.kind {
        MtKind::Constant(level) => MtKind::Constant(k * level),
        MtKind::Table {
            breakpoints,
            values,
        } => MtKind::Table {
            breakpoints: breakpoints.clone(),
            values: values.iter().map(|v| k * v).collect(),
        },
        MtKind::Registry { entry, scale } => MtKind::Registry {
            entry: *entry,
            scale: k * scale,
        },
    };
    Ok(MtFunc {
        kind,
        sup_cap: product,
        nondecreasing: phi.nondecreasing,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SequenceCheck {
    pub passes: bool,
    pub sup_observed: f64,
    /// Element of the sequence where the supremum was observed.
    pub witness: f64,
}

fn validate_points(xs: &[f64]) -> Result<(), MtError> {
    if xs.is_empty() {
        return Err(MtError::EmptySequence);
    }
    if let Some(x) = xs.iter().find(|x| !x.is_finite() || **x < 0.0) {
        return Err(MtError::Domain(*x));
    }
    Ok(())
}

/// Sampled form of: for every nonincreasing sequence `x_n`, `sup φ(x_n) < 1`.
///
/// Passes iff the observed supremum stays within the declared cap and the cap
/// itself is below one.
pub fn check_nonincreasing_sequence(phi: &MtFunc, xs: &[f64]) -> Result<SequenceCheck, MtError> {
    validate_points(xs)?;
    if let Some(w) = xs.windows(2).position(|w| w[1] > w[0]) {
        return Err(MtError::NotNonincreasing { index: w + 1 });
    }
    let mut sup_observed = f64::NEG_INFINITY;
    let mut witness = xs[0];
    for &x in xs {
        let v = phi.eval_unchecked(x);
        if v > sup_observed {
            sup_observed = v;
            witness = x;
        }
    }
    let passes =
        sup_observed <= phi.sup_cap && phi.sup_cap < 1.0 && sup_observed < 1.0 - REACHES_ONE_TOL;
    Ok(SequenceCheck {
        passes,
        sup_observed,
        witness,
    })
}

/// Same battery restricted to strictly decreasing sequences (contractive-factor form).
pub fn check_strictly_decreasing_sequence(
    phi: &MtFunc,
    xs: &[f64],
) -> Result<SequenceCheck, MtError> {
    validate_points(xs)?;
    if let Some(w) = xs.windows(2).position(|w| !(w[1] < w[0])) {
        return Err(MtError::NotStrictlyDecreasing { index: w + 1 });
    }
    check_nonincreasing_sequence(phi, xs)
}

/// Which ends of the neighbourhood `t .. t+ε` are sampled.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Endpoints {
    /// `(t, t+ε)`
    Open,
    /// `[t, t+ε]`
    Closed,
    /// `(t, t+ε]`
    RightClosed,
    /// `[t, t+ε)`
    LeftClosed,
}

impl Endpoints {
    pub const ALL: [Endpoints; 4] = [
        Endpoints::Open,
        Endpoints::Closed,
        Endpoints::RightClosed,
        Endpoints::LeftClosed,
    ];

    fn includes_left(self) -> bool {
        matches!(self, Endpoints::Closed | Endpoints::LeftClosed)
    }

    fn includes_right(self) -> bool {
        matches!(self, Endpoints::Closed | Endpoints::RightClosed)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LocalCap {
    /// `φ(s) ≤ r < 1` at every sampled `s` in the neighbourhood of width `eps`.
    Capped { r: f64, eps: f64 },
    /// No width in the grid kept the samples away from 1; `value = φ(s)`.
    CounterSample { s: f64, value: f64 },
}

/// Sample points of the neighbourhood of `t` of width `eps`: a uniform interior
/// sweep plus points `t + eps·10⁻ᵏ` accumulating at `t`.
fn neighbourhood(t: f64, eps: f64, ends: Endpoints) -> Vec<f64> {
    let right = t + eps;
    let mut pts: Vec<f64> = (1..=INTERIOR_SAMPLES)
        .map(|j| t + eps * j as f64 / (INTERIOR_SAMPLES + 1) as f64)
        .chain((1..=GEOMETRIC_SAMPLES).map(|k| t + eps * 10f64.powi(-k)))
        .filter(|s| *s > t && *s < right)
        .collect();
    if ends.includes_left() {
        pts.push(t);
    }
    if ends.includes_right() {
        pts.push(right);
    }
    pts
}

/// Sampled search for a right neighbourhood of `t` on which `φ` is capped below 1.
pub fn check_local_cap(phi: &MtFunc, t: f64, eps_grid: &[f64]) -> Result<LocalCap, MtError> {
    check_local_cap_with(phi, t, eps_grid, Endpoints::Open)
}

pub fn check_local_cap_with(
    phi: &MtFunc,
    t: f64,
    eps_grid: &[f64],
    ends: Endpoints,
) -> Result<LocalCap, MtError> {
    if !t.is_finite() || t < 0.0 {
        return Err(MtError::Domain(t));
    }
    if eps_grid.is_empty() {
        return Err(MtError::InvalidSpec("empty epsilon grid".into()));
    }
    if let Some(e) = eps_grid.iter().find(|e| !(**e > 0.0) || !e.is_finite()) {
        return Err(MtError::InvalidSpec(format!(
            "epsilon {e} must be positive and finite"
        )));
    }
    let mut worst = (t, f64::NEG_INFINITY);
    for &eps in eps_grid {
        let mut r = f64::NEG_INFINITY;
        for s in neighbourhood(t, eps, ends) {
            let v = phi.eval_unchecked(s);
            r = r.max(v);
            if v > worst.1 {
                worst = (s, v);
            }
        }
        if r < 1.0 - REACHES_ONE_TOL {
            return Ok(LocalCap::Capped { r, eps });
        }
    }
    Ok(LocalCap::CounterSample {
        s: worst.0,
        value: worst.1,
    })
}
