use num_complex::Complex64;
use thiserror::Error;

use super::ast::{BinOp, Func, KernelExpr, Var};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EvalError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("non-finite result from {0}")]
    NonFinite(&'static str),
    #[error("non-finite input {0}")]
    NonFiniteInput(&'static str),
}

fn finite(z: Complex64, what: &'static str) -> Result<Complex64, EvalError> {
    if z.re.is_finite() && z.im.is_finite() {
        Ok(z)
    } else {
        Err(EvalError::NonFinite(what))
    }
}

fn real(v: f64) -> Complex64 {
    Complex64::new(v, 0.0)
}

struct Point {
    x: Complex64,
    tau: Complex64,
    y: Complex64,
}

fn eval_at(k: &KernelExpr, at: &Point) -> Result<Complex64, EvalError> {
    match k {
        KernelExpr::Real(v) => Ok(real(*v)),
        KernelExpr::Imag(v) => Ok(Complex64::new(0.0, *v)),
        KernelExpr::Var(Var::X) => Ok(at.x),
        KernelExpr::Var(Var::Tau) => Ok(at.tau),
        KernelExpr::Var(Var::Y) => Ok(at.y),
        KernelExpr::Neg(e) => Ok(-eval_at(e, at)?),
        KernelExpr::Binary(op, l, r) => {
            let l = eval_at(l, at)?;
            let r = eval_at(r, at)?;
            match op {
                BinOp::Add => finite(l + r, "'+'"),
                BinOp::Sub => finite(l - r, "'-'"),
                BinOp::Mul => finite(l * r, "'*'"),
                BinOp::Div => {
                    if r.re == 0.0 && r.im == 0.0 {
                        Err(EvalError::DivisionByZero)
                    } else {
                        finite(l / r, "'/'")
                    }
                }
            }
        }
        KernelExpr::Call(func, arg) => {
            let z = eval_at(arg, at)?;
            match func {
                Func::Sin => finite(z.sin(), "sin"),
                Func::Cos => finite(z.cos(), "cos"),
                Func::Exp => finite(z.exp(), "exp"),
                Func::Abs => finite(real(z.norm()), "abs"),
                Func::Re => Ok(real(z.re)),
                Func::Im => Ok(real(z.im)),
                Func::Conj => Ok(z.conj()),
            }
        }
    }
}

/// Evaluates `V(x, tau, y)`.
pub fn eval_kernel(k: &KernelExpr, x: f64, tau: f64, y: Complex64) -> Result<Complex64, EvalError> {
    if !x.is_finite() {
        return Err(EvalError::NonFiniteInput("x"));
    }
    if !tau.is_finite() {
        return Err(EvalError::NonFiniteInput("tau"));
    }
    if !y.re.is_finite() || !y.im.is_finite() {
        return Err(EvalError::NonFiniteInput("y"));
    }
    eval_at(
        k,
        &Point {
            x: real(x),
            tau: real(tau),
            y,
        },
    )
}
