//! Successive approximation for homogeneous nonlinear Volterra integral
//! equations
//!
//! ```text
//! y(x) = ∫_a^x V(x, τ, y(τ)) dτ,   x ∈ [a, b],
//! ```
//!
//! with Hyers–Ulam stability certificates: if the kernel satisfies
//! `|V(x,τ,y) − V(x,τ,z)| ≤ φ(|y−z|)·|y−z|` for a nondecreasing `φ` bounded by
//! `δ/(b − a)` with `δ < 1`, then any `y` with residual `θ` lies within
//! `θ/(1 − δ)` of the exact solution.
//!
//! Modules, bottom up:
//! - [`metric`]: `[0, ∞]`-valued distances and tabulated functions.
//! - [`mtfunc`]: contraction-factor functions and sampled MT checks.
//! - [`fixpoint`]: the generic iteration engine and its alternative.
//! - [`kernel`]: the kernel expression language.
//! - [`volterra`]: operator, solver, residuals and certificates.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod fixpoint;
pub mod kernel;
pub mod metric;
pub mod mtfunc;
pub mod problems;
pub mod volterra;

pub use fixpoint::{IterationOptions, IterationTrace, Outcome};
pub use metric::{ExtReal, Grid, GridFunction};
pub use mtfunc::MtFunc;
pub use volterra::{KernelProblem, Solution, StabilityCertificate};
