//! Scalar expressions in one variable `s` for the nonlinearity `h(s)`.
//!
//! An [`Expression`] is an immutable tree over numeric literals, named
//! parameters, the variable `s`, the constant `pi`, the four arithmetic
//! operators, powers with a literal exponent, and the unary functions
//! `exp`, `ln`, `sin`, `cos` and `arctan`. Parameters are constants under
//! differentiation and are bound to values only at evaluation time, so one
//! parsed `h` can be reused across a parameter sweep.
//!
//! ```
//! use gradest::hexpr::{Expression, Params};
//!
//! let h: Expression = "l1*s + l2*exp(b*s)".parse().unwrap();
//! let params = Params::from([
//!     ("l1".to_string(), 1.0),
//!     ("l2".to_string(), 2.0),
//!     ("b".to_string(), -1.0),
//! ]);
//! let dh = h.differentiate();
//! assert_eq!(dh.evaluate(0.0, &params).unwrap(), 1.0 - 2.0);
//! ```
//!
//! Absolute values are not part of the language: `|s|^a` is not
//! differentiable at the origin.

mod diff;
mod parse;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

pub use parse::parse;

/// Values bound to the named parameters of an expression.
pub type Params = BTreeMap<String, f64>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
}

impl BinOp {
    fn symbol(self) -> &'static str {
        match self {
            BinOp::Add => "+",
            BinOp::Sub => "-",
            BinOp::Mul => "*",
            BinOp::Div => "/",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Func {
    Exp,
    Ln,
    Sin,
    Cos,
    Arctan,
}

impl Func {
    pub const ALL: [Func; 5] = [Func::Exp, Func::Ln, Func::Sin, Func::Cos, Func::Arctan];

    pub fn name(self) -> &'static str {
        match self {
            Func::Exp => "exp",
            Func::Ln => "ln",
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Arctan => "arctan",
        }
    }

    pub fn from_name(name: &str) -> Option<Func> {
        Func::ALL.into_iter().find(|f| f.name() == name)
    }
}

/// A node of the expression tree.
///
/// Literals are finite and non-negative; a negative constant is a
/// [`Node::Neg`] of a literal. `Pow` exponents are finite non-negative
/// literals.
#[derive(Debug, Clone, PartialEq)]
pub enum Node {
    Num(f64),
    Param(String),
    Var,
    Pi,
    Neg(Box<Node>),
    Binary(BinOp, Box<Node>, Box<Node>),
    Pow(Box<Node>, f64),
    Call(Func, Box<Node>),
}

impl Node {
    /// Literal for any finite `x`, wrapping negative values in a negation.
    pub fn num(x: f64) -> Node {
        debug_assert!(x.is_finite());
        if x.is_sign_negative() && x != 0.0 {
            Node::Neg(Box::new(Node::Num(-x)))
        } else {
            Node::Num(x.abs())
        }
    }

    /// Numeric value of a literal or a negated literal.
    pub(crate) fn as_const(&self) -> Option<f64> {
        match self {
            Node::Num(x) => Some(*x),
            Node::Neg(inner) => match inner.as_ref() {
                Node::Num(x) => Some(-x),
                _ => None,
            },
            _ => None,
        }
    }

    fn collect_params(&self, out: &mut BTreeSet<String>) {
        match self {
            Node::Param(name) => {
                out.insert(name.clone());
            }
            Node::Num(_) | Node::Var | Node::Pi => {}
            Node::Neg(a) | Node::Pow(a, _) | Node::Call(_, a) => a.collect_params(out),
            Node::Binary(_, a, b) => {
                a.collect_params(out);
                b.collect_params(out);
            }
        }
    }

    fn eval(&self, s: f64, params: &Params) -> Result<f64, EvalError> {
        Ok(match self {
            Node::Num(x) => *x,
            Node::Param(name) => *params
                .get(name)
                .ok_or_else(|| EvalError::UnboundParameter(name.clone()))?,
            Node::Var => s,
            Node::Pi => std::f64::consts::PI,
            Node::Neg(a) => -a.eval(s, params)?,
            Node::Binary(op, a, b) => {
                let x = a.eval(s, params)?;
                let y = b.eval(s, params)?;
                match op {
                    BinOp::Add => x + y,
                    BinOp::Sub => x - y,
                    BinOp::Mul => x * y,
                    BinOp::Div => {
                        if y == 0.0 {
                            return Err(EvalError::Domain {
                                op: "division",
                                argument: y,
                            });
                        }
                        x / y
                    }
                }
            }
            Node::Pow(a, e) => {
                let x = a.eval(s, params)?;
                let v = pow_literal(x, *e);
                if v.is_nan() && !x.is_nan() {
                    return Err(EvalError::Domain {
                        op: "power",
                        argument: x,
                    });
                }
                if x == 0.0 && *e < 0.0 {
                    return Err(EvalError::Domain {
                        op: "power",
                        argument: x,
                    });
                }
                v
            }
            Node::Call(f, a) => {
                let x = a.eval(s, params)?;
                match f {
                    Func::Exp => x.exp(),
                    Func::Ln => {
                        if !(x > 0.0) {
                            return Err(EvalError::Domain {
                                op: "ln",
                                argument: x,
                            });
                        }
                        x.ln()
                    }
                    Func::Sin => x.sin(),
                    Func::Cos => x.cos(),
                    Func::Arctan => x.atan(),
                }
            }
        })
    }

    fn write(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Node::Num(x) => write!(f, "{x:?}"),
            Node::Param(name) => f.write_str(name),
            Node::Var => f.write_str("s"),
            Node::Pi => f.write_str("pi"),
            Node::Neg(a) => {
                f.write_str("(-")?;
                a.write(f)?;
                f.write_str(")")
            }
            Node::Binary(op, a, b) => {
                f.write_str("(")?;
                a.write(f)?;
                write!(f, " {} ", op.symbol())?;
                b.write(f)?;
                f.write_str(")")
            }
            Node::Pow(a, e) => {
                f.write_str("(")?;
                a.write(f)?;
                write!(f, "^{e:?})")
            }
            Node::Call(func, a) => {
                write!(f, "{}(", func.name())?;
                a.write(f)?;
                f.write_str(")")
            }
        }
    }
}

fn pow_literal(x: f64, e: f64) -> f64 {
    if e.fract() == 0.0 && e.abs() <= i32::MAX as f64 {
        x.powi(e as i32)
    } else {
        x.powf(e)
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EvalError {
    #[error("{op} undefined at argument {argument}")]
    Domain { op: &'static str, argument: f64 },
    #[error("parameter `{0}` has no bound value")]
    UnboundParameter(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("empty expression")]
    Empty,
    #[error("syntax error at byte {offset}: {message}")]
    Syntax { offset: usize, message: String },
    #[error("unknown function `{name}` at byte {offset}")]
    UnknownFunction { offset: usize, name: String },
    #[error("exponent at byte {offset} must be a numeric literal")]
    NonLiteralExponent { offset: usize },
}

/// A parsed expression together with the set of parameter names it uses.
#[derive(Debug, Clone, PartialEq)]
pub struct Expression {
    root: Node,
    params: BTreeSet<String>,
}

impl Expression {
    pub fn new(root: Node) -> Self {
        let mut params = BTreeSet::new();
        root.collect_params(&mut params);
        Expression { root, params }
    }

    pub fn root(&self) -> &Node {
        &self.root
    }

    pub fn parameters(&self) -> &BTreeSet<String> {
        &self.params
    }

    /// Symbolic derivative with respect to `s`.
    pub fn differentiate(&self) -> Expression {
        Expression::new(diff::derivative(&self.root))
    }

    pub fn evaluate(&self, s: f64, params: &Params) -> Result<f64, EvalError> {
        self.root.eval(s, params)
    }

    /// First parameter name with no entry in `params`, if any.
    pub fn missing_parameter(&self, params: &Params) -> Option<&str> {
        self.params
            .iter()
            .find(|name| !params.contains_key(*name))
            .map(String::as_str)
    }
}

/// Fully parenthesized canonical form; parses back to the same tree.
impl fmt::Display for Expression {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.root.write(f)
    }
}

impl FromStr for Expression {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse(s)
    }
}

impl Serialize for Expression {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Expression {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let text = String::deserialize(deserializer)?;
        text.parse().map_err(serde::de::Error::custom)
    }
}

/// `h` with its parameters bound, plus the cached symbolic `h'` and `h''`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Nonlinearity {
    expr: Expression,
    params: Params,
    #[serde(skip)]
    first: Expression,
    #[serde(skip)]
    second: Expression,
}

impl Nonlinearity {
    pub fn new(expr: Expression, params: Params) -> Result<Self, EvalError> {
        if let Some(name) = expr.missing_parameter(&params) {
            return Err(EvalError::UnboundParameter(name.to_string()));
        }
        let first = expr.differentiate();
        let second = first.differentiate();
        Ok(Nonlinearity {
            expr,
            params,
            first,
            second,
        })
    }

    /// Convenience for tests and examples: parse `text` and bind `params`.
    pub fn parse(text: &str, params: &[(&str, f64)]) -> Result<Self, NonlinearityError> {
        let expr = parse(text)?;
        let params = params.iter().map(|(k, v)| (k.to_string(), *v)).collect();
        Ok(Nonlinearity::new(expr, params)?)
    }

    pub fn expression(&self) -> &Expression {
        &self.expr
    }

    pub fn params(&self) -> &Params {
        &self.params
    }

    pub fn value(&self, s: f64) -> Result<f64, EvalError> {
        self.expr.evaluate(s, &self.params)
    }

    pub fn derivative(&self, s: f64) -> Result<f64, EvalError> {
        self.first.evaluate(s, &self.params)
    }

    pub fn second_derivative(&self, s: f64) -> Result<f64, EvalError> {
        self.second.evaluate(s, &self.params)
    }

    /// `(h, h', h'')` at `s`.
    pub fn jet(&self, s: f64) -> Result<[f64; 3], EvalError> {
        Ok([
            self.value(s)?,
            self.derivative(s)?,
            self.second_derivative(s)?,
        ])
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum NonlinearityError {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Eval(#[from] EvalError),
}
