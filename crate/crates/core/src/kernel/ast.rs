use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Var {
    X,
    Tau,
    Y,
}

impl Var {
    pub const ALL: [Var; 3] = [Var::X, Var::Tau, Var::Y];

    pub fn name(self) -> &'static str {
        match self {
            Var::X => "x",
            Var::Tau => "tau",
            Var::Y => "y",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Var::ALL.into_iter().find(|v| v.name() == name)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Func {
    Sin,
    Cos,
    Exp,
    Abs,
    Re,
    Im,
    Conj,
}

impl Func {
    pub const ALL: [Func; 7] = [
        Func::Sin,
        Func::Cos,
        Func::Exp,
        Func::Abs,
        Func::Re,
        Func::Im,
        Func::Conj,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Exp => "exp",
            Func::Abs => "abs",
            Func::Re => "re",
            Func::Im => "im",
            Func::Conj => "conj",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Func::ALL.into_iter().find(|f| f.name() == name)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
}

impl BinOp {
    fn precedence(self) -> u8 {
        match self {
            BinOp::Add | BinOp::Sub => 1,
            BinOp::Mul | BinOp::Div => 2,
        }
    }

    fn symbol(self) -> &'static str {
        match self {
            BinOp::Add => " + ",
            BinOp::Sub => " - ",
            BinOp::Mul => "*",
            BinOp::Div => "/",
        }
    }
}

/// Kernel expression `V(x, tau, y)`.
///
/// Literals are nonnegative; a leading minus parses as [`KernelExpr::Neg`].
#[derive(Debug, Clone, PartialEq)]
pub enum KernelExpr {
    Real(f64),
    /// Purely imaginary literal, written with an `i` suffix.
    Imag(f64),
    Var(Var),
    Neg(Box<KernelExpr>),
    Binary(BinOp, Box<KernelExpr>, Box<KernelExpr>),
    Call(Func, Box<KernelExpr>),
}

const PREC_UNARY: u8 = 3;
const PREC_ATOM: u8 = 4;

impl KernelExpr {
    pub fn binary(op: BinOp, lhs: KernelExpr, rhs: KernelExpr) -> Self {
        KernelExpr::Binary(op, Box::new(lhs), Box::new(rhs))
    }

    pub fn call(func: Func, arg: KernelExpr) -> Self {
        KernelExpr::Call(func, Box::new(arg))
    }

    #[allow(clippy::should_implement_trait)]
    pub fn neg(inner: KernelExpr) -> Self {
        KernelExpr::Neg(Box::new(inner))
    }

    /// Whether `var` occurs anywhere in the expression.
    pub fn uses(&self, var: Var) -> bool {
        match self {
            KernelExpr::Real(_) | KernelExpr::Imag(_) => false,
            KernelExpr::Var(v) => *v == var,
            KernelExpr::Neg(e) | KernelExpr::Call(_, e) => e.uses(var),
            KernelExpr::Binary(_, l, r) => l.uses(var) || r.uses(var),
        }
    }

    pub fn depth(&self) -> usize {
        match self {
            KernelExpr::Real(_) | KernelExpr::Imag(_) | KernelExpr::Var(_) => 1,
            KernelExpr::Neg(e) | KernelExpr::Call(_, e) => 1 + e.depth(),
            KernelExpr::Binary(_, l, r) => 1 + l.depth().max(r.depth()),
        }
    }

    fn precedence(&self) -> u8 {
        match self {
            KernelExpr::Binary(op, ..) => op.precedence(),
            KernelExpr::Neg(_) => PREC_UNARY,
            _ => PREC_ATOM,
        }
    }

    fn fmt_child(&self, f: &mut fmt::Formatter<'_>, parens: bool) -> fmt::Result {
        if parens {
            write!(f, "({self})")
        } else {
            write!(f, "{self}")
        }
    }
}

/// Pretty-prints with the fewest parentheses that re-parse to the same tree.
impl fmt::Display for KernelExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            // `{}` on f64 is the shortest representation that round-trips and
            // never uses exponent notation.
            KernelExpr::Real(v) => write!(f, "{v}"),
            KernelExpr::Imag(v) => write!(f, "{v}i"),
            KernelExpr::Var(v) => f.write_str(v.name()),
            KernelExpr::Neg(e) => {
                f.write_str("-")?;
                e.fmt_child(f, e.precedence() < PREC_UNARY)
            }
            KernelExpr::Binary(op, l, r) => {
                let p = op.precedence();
                l.fmt_child(f, l.precedence() < p)?;
                f.write_str(op.symbol())?;
                r.fmt_child(f, r.precedence() <= p)
            }
            KernelExpr::Call(func, arg) => write!(f, "{}({arg})", func.name()),
        }
    }
}
