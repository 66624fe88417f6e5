//! Potential expressions `q(t)`: a small arithmetic language over the
//! variable `t`, evaluated in radians.
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := factor (('*' | '/') factor)*
//! factor := '-' factor | power
//! power  := atom ('^' factor)?
//! atom   := number | 't' | 'pi' | 'e' | func '(' expr ')' | '(' expr ')'
//! func   := sin | cos | tan | exp | ln | sqrt | abs
//! ```
//!
//! There is no implicit multiplication: `2t` is a syntax error.

mod parser;

use std::fmt;

use thiserror::Error;

pub use parser::{parse_potential, ParseError};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinaryOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

impl BinaryOp {
    fn symbol(self) -> char {
        match self {
            BinaryOp::Add => '+',
            BinaryOp::Sub => '-',
            BinaryOp::Mul => '*',
            BinaryOp::Div => '/',
            BinaryOp::Pow => '^',
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Function {
    Sin,
    Cos,
    Tan,
    Exp,
    Ln,
    Sqrt,
    Abs,
}

impl Function {
    pub const ALL: [Function; 7] = [
        Function::Sin,
        Function::Cos,
        Function::Tan,
        Function::Exp,
        Function::Ln,
        Function::Sqrt,
        Function::Abs,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Function::Sin => "sin",
            Function::Cos => "cos",
            Function::Tan => "tan",
            Function::Exp => "exp",
            Function::Ln => "ln",
            Function::Sqrt => "sqrt",
            Function::Abs => "abs",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|f| f.name() == name)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Constant {
    Pi,
    E,
}

impl Constant {
    fn value(self) -> f64 {
        match self {
            Constant::Pi => std::f64::consts::PI,
            Constant::E => std::f64::consts::E,
        }
    }
}

/// Expression tree node.
#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Number(f64),
    Var,
    Const(Constant),
    Neg(Box<Expr>),
    Binary { op: BinaryOp, lhs: Box<Expr>, rhs: Box<Expr> },
    Call { func: Function, arg: Box<Expr> },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EvalErrorKind {
    DivisionByZero,
    LogOfNonPositive,
    SqrtOfNegative,
    /// Overflow or an undefined power such as a negative base with a
    /// fractional exponent.
    NonFinite,
}

impl fmt::Display for EvalErrorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            EvalErrorKind::DivisionByZero => "division by zero",
            EvalErrorKind::LogOfNonPositive => "logarithm of a non-positive value",
            EvalErrorKind::SqrtOfNegative => "square root of a negative value",
            EvalErrorKind::NonFinite => "non-finite result",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
#[error("{kind} in `{node}` at t = {t}")]
pub struct EvalError {
    pub kind: EvalErrorKind,
    pub t: f64,
    /// Canonical text of the failing subexpression.
    pub node: String,
}

impl Expr {
    pub fn eval(&self, t: f64) -> Result<f64, EvalError> {
        let fail = |kind| EvalError { kind, t, node: self.to_string() };
        let value = match self {
            Expr::Number(x) => *x,
            Expr::Var => t,
            Expr::Const(c) => c.value(),
            Expr::Neg(inner) => -inner.eval(t)?,
            Expr::Binary { op, lhs, rhs } => {
                let a = lhs.eval(t)?;
                let b = rhs.eval(t)?;
                match op {
                    BinaryOp::Add => a + b,
                    BinaryOp::Sub => a - b,
                    BinaryOp::Mul => a * b,
                    BinaryOp::Div => {
                        if b == 0.0 {
                            return Err(fail(EvalErrorKind::DivisionByZero));
                        }
                        a / b
                    }
                    BinaryOp::Pow => {
                        if a == 0.0 && b < 0.0 {
                            return Err(fail(EvalErrorKind::DivisionByZero));
                        }
                        a.powf(b)
                    }
                }
            }
            Expr::Call { func, arg } => {
                let x = arg.eval(t)?;
                match func {
                    Function::Sin => x.sin(),
                    Function::Cos => x.cos(),
                    Function::Tan => x.tan(),
                    Function::Exp => x.exp(),
                    Function::Ln => {
                        if x <= 0.0 {
                            return Err(fail(EvalErrorKind::LogOfNonPositive));
                        }
                        x.ln()
                    }
                    Function::Sqrt => {
                        if x < 0.0 {
                            return Err(fail(EvalErrorKind::SqrtOfNegative));
                        }
                        x.sqrt()
                    }
                    Function::Abs => x.abs(),
                }
            }
        };
        if value.is_finite() {
            Ok(value)
        } else {
            Err(fail(EvalErrorKind::NonFinite))
        }
    }
}

/// Canonical form: every compound subexpression parenthesized, numbers in
/// shortest round-trip notation.
impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Number(x) => write!(f, "{x:?}"),
            Expr::Var => f.write_str("t"),
            Expr::Const(Constant::Pi) => f.write_str("pi"),
            Expr::Const(Constant::E) => f.write_str("e"),
            Expr::Neg(inner) => write!(f, "(-{inner})"),
            Expr::Binary { op, lhs, rhs } => write!(f, "({lhs} {} {rhs})", op.symbol()),
            Expr::Call { func, arg } => write!(f, "{}({arg})", func.name()),
        }
    }
}

/// A parsed potential `q(t)`.
#[derive(Debug, Clone, PartialEq)]
pub struct PotentialExpr {
    root: Expr,
}

impl PotentialExpr {
    pub fn new(root: Expr) -> Self {
        Self { root }
    }

    /// The constant-zero potential.
    pub fn zero() -> Self {
        Self { root: Expr::Number(0.0) }
    }

    pub fn root(&self) -> &Expr {
        &self.root
    }

    pub fn eval(&self, t: f64) -> Result<f64, EvalError> {
        self.root.eval(t)
    }

    /// True when the tree is a literal zero.
    pub fn is_literal_zero(&self) -> bool {
        matches!(self.root, Expr::Number(x) if x == 0.0)
    }
}

impl fmt::Display for PotentialExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.root.fmt(f)
    }
}

impl std::str::FromStr for PotentialExpr {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_potential(s)
    }
}

/// Evaluates `q(t)`.
pub fn eval_potential(expr: &PotentialExpr, t: f64) -> Result<f64, EvalError> {
    expr.eval(t)
}
