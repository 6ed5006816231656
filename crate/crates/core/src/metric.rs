//! Extended nonnegative reals and the sup metric on tabulated functions.
//!
//! A generalized metric takes values in `[0, ∞]`. [`ExtReal`] is that
//! codomain; [`sup_distance`] is the metric on [`GridFunction`]s, the
//! discrete stand-in for continuous complex-valued functions on `[a, b]`.

use std::cmp::Ordering;
use std::fmt;
use std::ops::Add;

use num_complex::Complex64;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MetricError {
    #[error("grids are not conformable: {left} vs {right}")]
    NonConformable { left: Grid, right: Grid },
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("expected {expected} values for the grid, found {found}")]
    LengthMismatch { expected: usize, found: usize },
    #[error("non-finite value at node {index}")]
    NonFiniteValue { index: usize },
}

/// A value in `[0, ∞]`.
///
/// Never NaN and never negative; `-0.0` is normalized to `0.0` so that the
/// derived total order agrees with the numeric one.
#[derive(Clone, Copy, PartialEq)]
pub struct ExtReal(f64);

impl ExtReal {
    pub const ZERO: ExtReal = ExtReal(0.0);
    pub const INF: ExtReal = ExtReal(f64::INFINITY);

    /// Wraps `v`, rejecting NaN and negative values. `+∞` maps to [`ExtReal::INF`].
    pub fn new(v: f64) -> Option<Self> {
        if v.is_nan() || v < 0.0 {
            None
        } else {
            Some(ExtReal(v + 0.0))
        }
    }

    pub fn is_finite(self) -> bool {
        self.0.is_finite()
    }

    pub fn is_inf(self) -> bool {
        !self.is_finite()
    }

    /// The finite value, or `None` for `INF`.
    pub fn finite(self) -> Option<f64> {
        self.is_finite().then_some(self.0)
    }

    /// The value as an `f64`, with `INF` as `f64::INFINITY`.
    pub fn to_f64(self) -> f64 {
        self.0
    }
}

pub fn ext_add(lhs: ExtReal, rhs: ExtReal) -> ExtReal {
    // f64 addition already absorbs +inf; finite overflow also lands on INF.
    ExtReal(lhs.0 + rhs.0)
}

impl Add for ExtReal {
    type Output = ExtReal;

    fn add(self, rhs: ExtReal) -> ExtReal {
        ext_add(self, rhs)
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
        self.0.total_cmp(&other.0)
    }
}

impl fmt::Debug for ExtReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for ExtReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_inf() {
            f.write_str("INF")
        } else {
            write!(f, "{}", self.0)
        }
    }
}

/// Unit in the last place of `x` (distance to the next larger double).
pub fn ulp(x: f64) -> f64 {
    let x = x.abs();
    x.next_up() - x
}

/// `lhs <= rhs` with `ulps` units of slack at the magnitude of `rhs`.
pub fn le_within_ulps(lhs: f64, rhs: f64, ulps: u32) -> bool {
    lhs <= rhs + f64::from(ulps) * ulp(rhs)
}

/// A uniform grid of `n` nodes `x_k = a + k·h`, `h = (b − a)/(n − 1)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    a: f64,
    b: f64,
    n: usize,
}

impl Grid {
    pub fn new(a: f64, b: f64, n: usize) -> Result<Self, MetricError> {
        if !a.is_finite() || !b.is_finite() {
            return Err(MetricError::InvalidGrid(format!(
                "interval ends must be finite, got [{a}, {b}]"
            )));
        }
        if !(a < b) {
            return Err(MetricError::InvalidGrid(format!(
                "need a < b, got a = {a}, b = {b}"
            )));
        }
        if n < 2 {
            return Err(MetricError::InvalidGrid(format!(
                "need at least 2 nodes, got {n}"
            )));
        }
        Ok(Grid { a, b, n })
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Interval length `b − a`.
    pub fn length(&self) -> f64 {
        self.b - self.a
    }

    pub fn spacing(&self) -> f64 {
        (self.b - self.a) / (self.n - 1) as f64
    }

    pub fn node(&self, k: usize) -> f64 {
        self.a + k as f64 * self.spacing()
    }

    pub fn nodes(&self) -> impl Iterator<Item = f64> + '_ {
        let h = self.spacing();
        (0..self.n).map(move |k| self.a + k as f64 * h)
    }
}

impl fmt::Display for Grid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}] with {} nodes", self.a, self.b, self.n)
    }
}

/// A complex-valued function tabulated on a uniform [`Grid`].
#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction {
    grid: Grid,
    values: Vec<Complex64>,
}

impl GridFunction {
    pub fn new(grid: Grid, values: Vec<Complex64>) -> Result<Self, MetricError> {
        if values.len() != grid.n {
            return Err(MetricError::LengthMismatch {
                expected: grid.n,
                found: values.len(),
            });
        }
        if let Some(index) = values
            .iter()
            .position(|v| !v.re.is_finite() || !v.im.is_finite())
        {
            return Err(MetricError::NonFiniteValue { index });
        }
        Ok(GridFunction { grid, values })
    }

    pub fn zeros(grid: Grid) -> Self {
        Self::constant(grid, Complex64::new(0.0, 0.0))
    }

    /// Panics if `c` is not finite.
    pub fn constant(grid: Grid, c: Complex64) -> Self {
        assert!(c.re.is_finite() && c.im.is_finite(), "non-finite constant");
        GridFunction {
            grid,
            values: vec![c; grid.n],
        }
    }

    /// Tabulates `f` at the grid nodes.
    pub fn from_fn(grid: Grid, f: impl FnMut(f64) -> Complex64) -> Result<Self, MetricError> {
        let values = grid.nodes().map(f).collect();
        Self::new(grid, values)
    }

    pub fn grid(&self) -> Grid {
        self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    pub fn is_conformable(&self, other: &GridFunction) -> bool {
        self.grid == other.grid
    }

    fn check_conformable(&self, other: &GridFunction) -> Result<(), MetricError> {
        if self.is_conformable(other) {
            Ok(())
        } else {
            Err(MetricError::NonConformable {
                left: self.grid,
                right: other.grid,
            })
        }
    }

    /// Largest modulus over the nodes.
    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }
}

/// `p(f, g) = inf{M ≥ 0 : |f(x) − g(x)| ≤ M}`, which on a finite grid is the
/// maximum nodal modulus of `f − g`.
pub fn sup_distance(f: &GridFunction, g: &GridFunction) -> Result<ExtReal, MetricError> {
    f.check_conformable(g)?;
    let d = f
        .values
        .iter()
        .zip(&g.values)
        .map(|(u, v)| (u - v).norm())
        .fold(0.0, f64::max);
    // hypot of finite inputs may overflow to +inf; that is still a valid ExtReal.
    Ok(ExtReal::new(d).expect("norm is nonnegative and not NaN"))
}

/// Nodewise `f + c·g`.
pub fn grid_axpy(
    f: &GridFunction,
    c: Complex64,
    g: &GridFunction,
) -> Result<GridFunction, MetricError> {
    f.check_conformable(g)?;
    let values = f
        .values
        .iter()
        .zip(&g.values)
        .map(|(u, v)| u + c * v)
        .collect();
    GridFunction::new(f.grid, values)
}
