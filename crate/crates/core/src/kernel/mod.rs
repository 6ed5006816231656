//! Kernel expressions `V(x, tau, y)`: parsing, printing, evaluation and a
//! sampled check of the kernel's modulus of continuity in `y`.

mod ast;
mod eval;
mod lipschitz;
mod parse;

pub use ast::{BinOp, Func, KernelExpr, Var};
pub use eval::{eval_kernel, EvalError};
pub use lipschitz::{
    modulus_sides, verify_lipschitz_condition, CounterSample, LipschitzError, LipschitzOutcome,
    SampleDomain, SampleSpec, Sides, DEFAULT_DISK_RADIUS, DEFAULT_LIPSCHITZ_SAMPLES,
};
pub use parse::{parse, ParseError};
