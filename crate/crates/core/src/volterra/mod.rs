//! The discretized Volterra operator `(Tf)(x) = ∫_a^x V(x, τ, f(τ)) dτ`, its
//! fixed-point solver, residual measurement and stability certificates.
//!
//! The integral is a composite trapezoid rule whose running upper limit lands
//! on grid nodes, so the weights for node `i` sum to `x_i − a ≤ K`. With a
//! nondecreasing `φ` that makes `p(Tf, Tg) ≤ K·φ(p(f,g))·p(f,g)` hold in the
//! discrete model itself, and the certificate `θ/(1 − δ)` is exact for the
//! grid problem.

mod candidate;

use num_complex::Complex64;
use thiserror::Error;

pub use candidate::{read_candidate, write_table, CandidateError, GRID_MATCH_TOL};

use crate::fixpoint::{self, GeneralizedMetric, IterateError, IterationOptions, IterationTrace};
use crate::kernel::{
    eval_kernel, verify_lipschitz_condition, EvalError, KernelExpr, LipschitzError,
    LipschitzOutcome, SampleDomain, SampleSpec, Var,
};
use crate::metric::{sup_distance, ExtReal, Grid, GridFunction, MetricError};
use crate::mtfunc::{scale_to_alpha, MtError, MtFunc};

pub const QUADRATURE: &str = "composite-trapezoid";

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ProblemError {
    #[error("closed-form registry function '{0}' cannot drive the solver")]
    RegistryPhi(&'static str),
    #[error("phi must be nondecreasing on [0, inf)")]
    NotNondecreasing,
    #[error("delta = K * sup(phi) must be < 1: {0}")]
    Contraction(#[source] MtError),
    #[error("disk radius must be positive and finite, got {0}")]
    InvalidRadius(f64),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum VolterraError {
    #[error(transparent)]
    Metric(#[from] MetricError),
    #[error("iterate left the disk of radius {radius} at node {node} (|f| = {modulus})")]
    IterateEscapedDisk {
        node: usize,
        modulus: f64,
        radius: f64,
    },
    #[error("iterate left the real axis at node {node} (im = {im})")]
    IterateLeftRealAxis { node: usize, im: f64 },
    #[error("kernel evaluation failed at x = {x}, tau = {tau}: {source}")]
    Eval {
        x: f64,
        tau: f64,
        #[source]
        source: EvalError,
    },
    #[error("iteration aborted at step {index}: {source}")]
    IterationAborted {
        index: usize,
        #[source]
        source: Box<VolterraError>,
    },
    #[error("invalid solver options: {0}")]
    InvalidOptions(String),
    #[error("residual must be finite and nonnegative, got {0}")]
    InvalidTheta(f64),
    #[error("cannot restrict a function on {from} to {to}")]
    Restriction { from: Grid, to: Grid },
    #[error(transparent)]
    Lipschitz(#[from] LipschitzError),
}

/// A homogeneous Volterra problem `y(x) = ∫_a^x V(x, τ, y(τ)) dτ` on a grid.
#[derive(Debug, Clone)]
pub struct KernelProblem {
    kernel: KernelExpr,
    phi: MtFunc,
    alpha: MtFunc,
    grid: Grid,
    disk_radius: f64,
    domain: SampleDomain,
}

impl KernelProblem {
    pub fn new(
        kernel: KernelExpr,
        phi: MtFunc,
        grid: Grid,
        disk_radius: f64,
        domain: SampleDomain,
    ) -> Result<Self, ProblemError> {
        if let crate::mtfunc::MtKind::Registry { entry, .. } = phi.kind() {
            return Err(ProblemError::RegistryPhi(entry.name()));
        }
        if !phi.is_nondecreasing() {
            return Err(ProblemError::NotNondecreasing);
        }
        if !(disk_radius > 0.0) || !disk_radius.is_finite() {
            return Err(ProblemError::InvalidRadius(disk_radius));
        }
        let alpha = scale_to_alpha(&phi, grid.length()).map_err(ProblemError::Contraction)?;
        Ok(KernelProblem {
            kernel,
            phi,
            alpha,
            grid,
            disk_radius,
            domain,
        })
    }

    /// Same problem on a grid with `n` nodes.
    pub fn with_nodes(&self, n: usize) -> Result<Self, MetricError> {
        Ok(KernelProblem {
            grid: Grid::new(self.grid.a(), self.grid.b(), n)?,
            ..self.clone()
        })
    }

    pub fn kernel(&self) -> &KernelExpr {
        &self.kernel
    }

    pub fn phi(&self) -> &MtFunc {
        &self.phi
    }

    /// `α(t) = K·φ(t)`.
    pub fn alpha(&self) -> &MtFunc {
        &self.alpha
    }

    pub fn grid(&self) -> Grid {
        self.grid
    }

    /// `K = b − a`.
    pub fn k(&self) -> f64 {
        self.grid.length()
    }

    /// `δ = K·sup φ`.
    pub fn delta(&self) -> f64 {
        self.alpha.sup_cap()
    }

    pub fn disk_radius(&self) -> f64 {
        self.disk_radius
    }

    pub fn domain(&self) -> SampleDomain {
        self.domain
    }

    pub fn sample_spec(&self, count: usize, seed: u64) -> SampleSpec {
        SampleSpec {
            count,
            radius: self.disk_radius,
            seed,
            domain: self.domain,
        }
    }

    pub fn verify_lipschitz(
        &self,
        count: usize,
        seed: u64,
    ) -> Result<LipschitzOutcome, VolterraError> {
        Ok(verify_lipschitz_condition(
            &self.kernel,
            &self.phi,
            (self.grid.a(), self.grid.b()),
            &self.sample_spec(count, seed),
        )?)
    }

    fn check_argument(&self, f: &GridFunction) -> Result<(), VolterraError> {
        if f.grid() != self.grid {
            return Err(MetricError::NonConformable {
                left: self.grid,
                right: f.grid(),
            }
            .into());
        }
        for (node, v) in f.values().iter().enumerate() {
            let modulus = v.norm();
            if modulus > self.disk_radius {
                return Err(VolterraError::IterateEscapedDisk {
                    node,
                    modulus,
                    radius: self.disk_radius,
                });
            }
            if self.domain == SampleDomain::Real && v.im != 0.0 {
                return Err(VolterraError::IterateLeftRealAxis { node, im: v.im });
            }
        }
        Ok(())
    }
}

/// `(Tf)(x_i) = Σ_{j≤i} w_j V(x_i, τ_j, f(τ_j))` with trapezoid weights
/// `h/2, h, …, h, h/2`; `(Tf)(x_0) = 0`.
///
/// Each node's sum is accumulated left to right in a fixed order with
/// compensated addition. Kernels that do not read `x` reuse one running
/// prefix, which performs exactly the same floating-point operations as the
/// per-node sums.
pub fn apply_operator(
    prob: &KernelProblem,
    f: &GridFunction,
) -> Result<GridFunction, VolterraError> {
    prob.check_argument(f)?;
    let grid = prob.grid;
    let n = grid.n();
    let h = grid.spacing();
    let half = 0.5 * h;
    let ys = f.values();
    let eval = |x: f64, j: usize| {
        let tau = grid.node(j);
        eval_kernel(&prob.kernel, x, tau, ys[j]).map_err(|source| VolterraError::Eval {
            x,
            tau,
            source,
        })
    };

    let mut out = vec![Complex64::new(0.0, 0.0); n];
    if prob.kernel.uses(Var::X) {
        for (i, slot) in out.iter_mut().enumerate().skip(1) {
            let x = grid.node(i);
            let mut acc = CompensatedSum::default();
            acc.add(eval(x, 0)? * half);
            for j in 1..i {
                acc.add(eval(x, j)? * h);
            }
            acc.add(eval(x, i)? * half);
            *slot = acc.value();
        }
    } else {
        let x = grid.a();
        let mut prefix = CompensatedSum::default();
        prefix.add(eval(x, 0)? * half);
        for (i, slot) in out.iter_mut().enumerate().skip(1) {
            let v = eval(x, i)?;
            let mut acc = prefix;
            acc.add(v * half);
            *slot = acc.value();
            prefix.add(v * h);
        }
    }
    Ok(GridFunction::new(grid, out)?)
}

/// Reference implementation with an explicit per-node double loop, kept for
/// checking the prefix path bit for bit.
pub fn apply_operator_direct(
    prob: &KernelProblem,
    f: &GridFunction,
) -> Result<GridFunction, VolterraError> {
    prob.check_argument(f)?;
    let grid = prob.grid;
    let h = grid.spacing();
    let mut out = vec![Complex64::new(0.0, 0.0); grid.n()];
    for (i, slot) in out.iter_mut().enumerate().skip(1) {
        let x = grid.node(i);
        let mut acc = CompensatedSum::default();
        for j in 0..=i {
            let tau = grid.node(j);
            let w = if j == 0 || j == i { 0.5 * h } else { h };
            let v = eval_kernel(&prob.kernel, x, tau, f.values()[j])
                .map_err(|source| VolterraError::Eval { x, tau, source })?;
            acc.add(v * w);
        }
        *slot = acc.value();
    }
    Ok(GridFunction::new(grid, out)?)
}

/// Neumaier summation, componentwise.
#[derive(Debug, Clone, Copy, Default)]
struct CompensatedSum {
    sum: Complex64,
    comp: Complex64,
}

impl CompensatedSum {
    fn add(&mut self, v: Complex64) {
        neumaier(&mut self.sum.re, &mut self.comp.re, v.re);
        neumaier(&mut self.sum.im, &mut self.comp.im, v.im);
    }

    fn value(self) -> Complex64 {
        self.sum + self.comp
    }
}

fn neumaier(sum: &mut f64, comp: &mut f64, v: f64) {
    let t = *sum + v;
    if sum.abs() >= v.abs() {
        *comp += (*sum - t) + v;
    } else {
        *comp += (v - t) + *sum;
    }
    *sum = t;
}

/// The sup metric on functions sharing one grid.
#[derive(Debug, Clone, Copy, Default)]
pub struct SupMetric;

impl GeneralizedMetric for SupMetric {
    type Point = GridFunction;

    fn distance(&self, x: &GridFunction, y: &GridFunction) -> ExtReal {
        sup_distance(x, y).expect("iterates share the problem grid")
    }
}

#[derive(Debug, Clone)]
pub struct Solution {
    /// The converged fixed point, or the last iterate when the budget ran out.
    pub y0: GridFunction,
    pub trace: IterationTrace<GridFunction>,
}

impl Solution {
    pub fn converged(&self) -> bool {
        self.trace.outcome == fixpoint::Outcome::Converged
    }

    /// Estimated remaining distance to the exact grid fixed point.
    pub fn tail_estimate(&self, delta: f64) -> ExtReal {
        fixpoint::tail_estimate(self.trace.final_increment(), delta)
            .expect("problem delta is in [0, 1)")
    }
}

/// Successive approximation from `initial` (zero when `None`).
///
/// An exhausted budget is reported through the trace outcome, not as an error.
pub fn solve(
    prob: &KernelProblem,
    initial: Option<GridFunction>,
    opts: IterationOptions,
) -> Result<Solution, VolterraError> {
    let start = initial.unwrap_or_else(|| GridFunction::zeros(prob.grid));
    prob.check_argument(&start)?;
    let trace = fixpoint::iterate(&SupMetric, |f| apply_operator(prob, f), start, opts).map_err(
        |e| match e {
            IterateError::InvalidOptions(msg) => VolterraError::InvalidOptions(msg),
            IterateError::Aborted { index, source } => VolterraError::IterationAborted {
                index,
                source: Box::new(source),
            },
        },
    )?;
    let y0 = trace
        .fixed_point
        .clone()
        .unwrap_or_else(|| trace.last.clone());
    Ok(Solution { y0, trace })
}

/// Measured residual `θ̂ = p(y, Ty)` on the grid.
pub fn residual_theta(prob: &KernelProblem, y: &GridFunction) -> Result<f64, VolterraError> {
    let ty = apply_operator(prob, y)?;
    Ok(sup_distance(y, &ty)?.to_f64())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LipschitzStatus {
    Verified { samples: usize, seed: u64 },
    Skipped,
}

/// Uniform bound `|y − y₀| ≤ θ/(1 − δ)` for a candidate with residual `θ`,
/// valid on the grid and conditional on iterates staying in the disk.
#[derive(Debug, Clone, PartialEq)]
pub struct StabilityCertificate {
    pub theta: f64,
    pub delta: f64,
    pub bound: f64,
    pub grid: Grid,
    pub quadrature: &'static str,
    pub disk_radius: f64,
    pub domain: SampleDomain,
    pub lipschitz_verification: LipschitzStatus,
}

impl StabilityCertificate {
    pub fn with_verification(mut self, status: LipschitzStatus) -> Self {
        self.lipschitz_verification = status;
        self
    }
}

pub fn certify(prob: &KernelProblem, theta: f64) -> Result<StabilityCertificate, VolterraError> {
    let residual = ExtReal::new(theta)
        .filter(|t| t.is_finite())
        .ok_or(VolterraError::InvalidTheta(theta))?;
    let delta = prob.delta();
    let bound = fixpoint::a_priori_bound(residual, delta)
        .expect("problem construction enforces delta < 1")
        .to_f64();
    Ok(StabilityCertificate {
        theta,
        delta,
        bound,
        grid: prob.grid,
        quadrature: QUADRATURE,
        disk_radius: prob.disk_radius,
        domain: prob.domain,
        lipschitz_verification: LipschitzStatus::Skipped,
    })
}

/// Values of `f` at the nodes of a coarser grid whose nodes are a subset of
/// `f`'s (same interval, `(n_f − 1)` a multiple of `(n_c − 1)`).
pub fn restrict_to(f: &GridFunction, coarse: Grid) -> Result<GridFunction, VolterraError> {
    let fine = f.grid();
    let err = || VolterraError::Restriction {
        from: fine,
        to: coarse,
    };
    if fine.a() != coarse.a()
        || fine.b() != coarse.b()
        || !(fine.n() - 1).is_multiple_of(coarse.n() - 1)
    {
        return Err(err());
    }
    let stride = (fine.n() - 1) / (coarse.n() - 1);
    let values = f.values().iter().step_by(stride).copied().collect();
    Ok(GridFunction::new(coarse, values)?)
}

#[derive(Debug, Clone)]
pub struct Refinement {
    pub coarse: Solution,
    pub fine: Solution,
    /// Max difference of the two solutions over the coarse nodes.
    pub max_diff: f64,
    /// `max_diff / (h_c² − h_f²)`: the second-order error constant implied by the pair.
    pub error_constant: f64,
}

/// Solves at `n` and `2n − 1` nodes and compares at the shared nodes.
pub fn grid_refinement(
    prob: &KernelProblem,
    opts: IterationOptions,
) -> Result<Refinement, VolterraError> {
    let coarse_prob = prob;
    let fine_prob = prob.with_nodes(2 * prob.grid.n() - 1)?;
    let coarse = solve(coarse_prob, None, opts)?;
    let fine = solve(&fine_prob, None, opts)?;
    let shared = restrict_to(&fine.y0, coarse_prob.grid)?;
    let max_diff = sup_distance(&coarse.y0, &shared)?.to_f64();
    let hc = coarse_prob.grid.spacing();
    let hf = fine_prob.grid.spacing();
    Ok(Refinement {
        coarse,
        fine,
        max_diff,
        error_constant: max_diff / (hc * hc - hf * hf),
    })
}
