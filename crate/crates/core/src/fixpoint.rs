//! Successive approximation on a generalized metric space.
//!
//! For a self-map `T` and a start `u`, the orbit `Tⁿu` falls into exactly one
//! of two cases: every increment `p(Tⁿu, Tⁿ⁺¹u)` is infinite, or increments are
//! finite from some index `ℓ` on and (under an MT-contraction) the orbit
//! converges to a fixed point. The engine can only look at finitely many
//! increments, so "all infinite" means "all infinite within the budget".

use thiserror::Error;

use crate::metric::ExtReal;

pub const DEFAULT_STOP_TOL: f64 = 1e-10;
pub const DEFAULT_MAX_ITER: usize = 10_000;

/// A set with a `[0, ∞]`-valued metric.
///
/// Implementations must be pure: `distance` may not observe or cause mutation.
pub trait GeneralizedMetric {
    type Point;

    fn distance(&self, x: &Self::Point, y: &Self::Point) -> ExtReal;
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IterationOptions {
    pub stop_tol: f64,
    pub max_iter: usize,
}

impl Default for IterationOptions {
    fn default() -> Self {
        IterationOptions {
            stop_tol: DEFAULT_STOP_TOL,
            max_iter: DEFAULT_MAX_ITER,
        }
    }
}

#[derive(Debug, Error)]
pub enum IterateError<E: std::error::Error + 'static> {
    #[error("invalid iteration options: {0}")]
    InvalidOptions(String),
    #[error("iteration aborted at step {index}: {source}")]
    Aborted {
        index: usize,
        #[source]
        source: E,
    },
}

#[derive(Debug, Clone, PartialEq, Error)]
#[error("contraction constant {0} is outside [0, 1)")]
pub struct DeltaOutOfRange(pub f64);

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    /// Every increment within the budget was infinite.
    CaseA,
    Converged,
    BudgetExhausted,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Alternative {
    CaseA,
    /// Increments are finite from index `ell` on.
    CaseB {
        ell: usize,
    },
}

#[derive(Debug, Clone)]
pub struct IterationTrace<P> {
    /// `increments[n] = p(Tⁿu, Tⁿ⁺¹u)`.
    pub increments: Vec<ExtReal>,
    pub ell: Option<usize>,
    pub outcome: Outcome,
    /// `Tⁿu` for the first `n` whose increment is within the stop tolerance.
    pub fixed_point: Option<P>,
    /// The `n` above on convergence, otherwise the number of map applications.
    pub iterations_used: usize,
    /// Most recent iterate the engine holds; equals `fixed_point` on convergence.
    pub last: P,
}

impl<P> IterationTrace<P> {
    pub fn alternative(&self) -> Alternative {
        classify_increments(&self.increments)
    }

    /// Last recorded increment.
    pub fn final_increment(&self) -> ExtReal {
        *self
            .increments
            .last()
            .expect("trace has at least one increment")
    }
}

/// Iterates `map` from `start` until an increment drops to `stop_tol` or the
/// budget runs out.
pub fn iterate<S, F, E>(
    space: &S,
    map: F,
    start: S::Point,
    opts: IterationOptions,
) -> Result<IterationTrace<S::Point>, IterateError<E>>
where
    S: GeneralizedMetric,
    F: Fn(&S::Point) -> Result<S::Point, E>,
    E: std::error::Error + 'static,
{
    if !(opts.stop_tol > 0.0) || !opts.stop_tol.is_finite() {
        return Err(IterateError::InvalidOptions(format!(
            "stop_tol must be positive and finite, got {}",
            opts.stop_tol
        )));
    }
    if opts.max_iter == 0 {
        return Err(IterateError::InvalidOptions(
            "max_iter must be at least 1".into(),
        ));
    }

    let mut increments = Vec::new();
    let mut ell = None;
    let mut current = start;
    for index in 0..opts.max_iter {
        let next = map(&current).map_err(|source| IterateError::Aborted { index, source })?;
        let step = space.distance(&current, &next);
        increments.push(step);
        if step.is_finite() && ell.is_none() {
            ell = Some(index);
        }
        if step.finite().is_some_and(|d| d <= opts.stop_tol) {
            return Ok(IterationTrace {
                increments,
                ell,
                outcome: Outcome::Converged,
                fixed_point: Some(current),
                iterations_used: index,
                last: next,
            });
        }
        current = next;
    }

    let outcome = if ell.is_none() {
        Outcome::CaseA
    } else {
        Outcome::BudgetExhausted
    };
    Ok(IterationTrace {
        increments,
        ell,
        outcome,
        fixed_point: None,
        iterations_used: opts.max_iter,
        last: current,
    })
}

/// `dist_to_image / (1 − δ)`: the distance bound from any point to the fixed
/// point, given `p(x, Tx)` and a global contraction cap `δ`.
pub fn a_priori_bound(dist_to_image: ExtReal, delta: f64) -> Result<ExtReal, DeltaOutOfRange> {
    if !(0.0..1.0).contains(&delta) {
        return Err(DeltaOutOfRange(delta));
    }
    Ok(match dist_to_image.finite() {
        Some(d) => ExtReal::new(d / (1.0 - delta)).expect("nonnegative quotient"),
        None => ExtReal::INF,
    })
}

/// Remaining distance to the limit implied by the last increment: `inc·δ/(1−δ)`.
pub fn tail_estimate(increment: ExtReal, delta: f64) -> Result<ExtReal, DeltaOutOfRange> {
    if !(0.0..1.0).contains(&delta) {
        return Err(DeltaOutOfRange(delta));
    }
    Ok(match increment.finite() {
        Some(d) => ExtReal::new(d * delta / (1.0 - delta)).expect("nonnegative"),
        None => ExtReal::INF,
    })
}

pub fn classify_alternative<P>(trace: &IterationTrace<P>) -> Alternative {
    trace.alternative()
}

/// Case A iff every increment is infinite (vacuously so for an empty slice);
/// otherwise case B at the first finite index.
pub fn classify_increments(increments: &[ExtReal]) -> Alternative {
    match increments.iter().position(|d| d.is_finite()) {
        None => Alternative::CaseA,
        Some(ell) => Alternative::CaseB { ell },
    }
}
