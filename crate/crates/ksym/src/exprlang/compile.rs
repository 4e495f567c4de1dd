//! Slot-indexed evaluation of parsed expressions.

use std::collections::HashMap;
use std::sync::Arc;

use super::ast::{Expr, Func};
use super::EvalError;
use crate::scalar::{HyperDual, Scalar};

#[derive(Clone, Debug)]
enum Node {
    Const(f64),
    Slot(usize),
    Neg(Box<Node>),
    Add(Box<Node>, Box<Node>),
    Sub(Box<Node>, Box<Node>),
    Mul(Box<Node>, Box<Node>),
    Div(Box<Node>, Box<Node>, Arc<str>),
    Powi(Box<Node>, i32),
    Pow(Box<Node>, Box<Node>, Arc<str>),
    Call(Func, Box<Node>, Arc<str>),
}

/// An expression bound to a fixed ordering of variables ("slots").
///
/// Named parameters are substituted as constants and constant subtrees are
/// folded. Integer-literal exponents evaluate through `powi`, so `x^2` is
/// defined for negative `x`.
#[derive(Clone, Debug)]
pub struct CExpr {
    root: Node,
    source: Expr,
}

fn domain(label: &Arc<str>, reason: &'static str) -> EvalError {
    EvalError::Domain { expr: label.to_string(), reason }
}

fn apply<S: Scalar>(f: Func, x: S, label: &Arc<str>) -> Result<S, EvalError> {
    Ok(match f {
        Func::Sin => x.sin(),
        Func::Cos => x.cos(),
        Func::Tan => x.tan(),
        Func::Exp => x.exp(),
        Func::Log => {
            if x.re() <= 0.0 {
                return Err(domain(label, "logarithm of a non-positive value"));
            }
            x.ln()
        }
        Func::Sqrt => {
            if x.re() < 0.0 {
                return Err(domain(label, "square root of a negative value"));
            }
            x.sqrt()
        }
    })
}

fn div<S: Scalar>(a: S, b: S, label: &Arc<str>) -> Result<S, EvalError> {
    if b.re() == 0.0 {
        return Err(domain(label, "division by zero"));
    }
    Ok(a / b)
}

fn powf<S: Scalar>(a: S, b: S, label: &Arc<str>) -> Result<S, EvalError> {
    if a.re() <= 0.0 {
        return Err(domain(label, "non-positive base with a non-integer exponent"));
    }
    Ok(a.powf(b))
}

fn as_small_int(v: f64) -> Option<i32> {
    (v.fract() == 0.0 && v.abs() <= 1024.0).then_some(v as i32)
}

impl Node {
    fn eval<S: Scalar>(&self, x: &[S]) -> Result<S, EvalError> {
        Ok(match self {
            Node::Const(c) => S::cst(*c),
            Node::Slot(i) => x[*i],
            Node::Neg(a) => -a.eval(x)?,
            Node::Add(a, b) => a.eval(x)? + b.eval(x)?,
            Node::Sub(a, b) => a.eval(x)? - b.eval(x)?,
            Node::Mul(a, b) => a.eval(x)? * b.eval(x)?,
            Node::Div(a, b, l) => div(a.eval(x)?, b.eval(x)?, l)?,
            Node::Powi(a, n) => a.eval(x)?.powi(*n),
            Node::Pow(a, b, l) => powf(a.eval(x)?, b.eval(x)?, l)?,
            Node::Call(f, a, l) => apply(*f, a.eval(x)?, l)?,
        })
    }

    fn konst(&self) -> Option<f64> {
        match self {
            Node::Const(c) => Some(*c),
            _ => None,
        }
    }

    fn build(e: &Expr, slots: &HashMap<&str, usize>, params: &HashMap<String, f64>) -> Result<Node, EvalError> {
        let label = || -> Arc<str> { Arc::from(e.to_string()) };
        let node = match e {
            Expr::Num(v) => Node::Const(*v),
            Expr::Var(name) => {
                if let Some(&i) = slots.get(name.as_str()) {
                    Node::Slot(i)
                } else if let Some(&v) = params.get(name) {
                    Node::Const(v)
                } else {
                    return Err(EvalError::UnboundVariable(name.clone()));
                }
            }
            Expr::Neg(a) => Node::Neg(Box::new(Node::build(a, slots, params)?)),
            Expr::Add(a, b) => Node::Add(Box::new(Node::build(a, slots, params)?), Box::new(Node::build(b, slots, params)?)),
            Expr::Sub(a, b) => Node::Sub(Box::new(Node::build(a, slots, params)?), Box::new(Node::build(b, slots, params)?)),
            Expr::Mul(a, b) => Node::Mul(Box::new(Node::build(a, slots, params)?), Box::new(Node::build(b, slots, params)?)),
            Expr::Div(a, b) => Node::Div(Box::new(Node::build(a, slots, params)?), Box::new(Node::build(b, slots, params)?), label()),
            Expr::Pow(a, b) => {
                let base = Node::build(a, slots, params)?;
                let exp = Node::build(b, slots, params)?;
                match exp.konst().and_then(as_small_int) {
                    Some(n) => Node::Powi(Box::new(base), n),
                    None => Node::Pow(Box::new(base), Box::new(exp), label()),
                }
            }
            Expr::Call(f, a) => Node::Call(*f, Box::new(Node::build(a, slots, params)?), label()),
        };
        node.fold()
    }

    /// Collapses a node whose children are all constants.
    fn fold(self) -> Result<Node, EvalError> {
        let all_const = match &self {
            Node::Const(_) | Node::Slot(_) => return Ok(self),
            Node::Neg(a) | Node::Powi(a, _) | Node::Call(_, a, _) => a.konst().is_some(),
            Node::Add(a, b) | Node::Sub(a, b) | Node::Mul(a, b) | Node::Div(a, b, _) | Node::Pow(a, b, _) => {
                a.konst().is_some() && b.konst().is_some()
            }
        };
        if all_const {
            Ok(Node::Const(self.eval::<f64>(&[])?))
        } else {
            Ok(self)
        }
    }
}

impl CExpr {
    /// Binds `expr` to `slots` (variable `slots[i]` reads `x[i]`), substituting `params`.
    pub fn compile(expr: &Expr, slots: &[&str], params: &HashMap<String, f64>) -> Result<CExpr, EvalError> {
        let map: HashMap<&str, usize> = slots.iter().enumerate().map(|(i, s)| (*s, i)).collect();
        Ok(CExpr { root: Node::build(expr, &map, params)?, source: expr.clone() })
    }

    pub fn constant(v: f64) -> CExpr {
        CExpr { root: Node::Const(v), source: Expr::Num(v) }
    }

    pub fn eval<S: Scalar>(&self, x: &[S]) -> Result<S, EvalError> {
        self.root.eval(x)
    }

    /// The constant value, if the expression folded to one.
    pub fn as_constant(&self) -> Option<f64> {
        self.root.konst()
    }

    pub fn source(&self) -> &Expr {
        &self.source
    }
}

impl Expr {
    /// Evaluates with a name-to-value binding; every free variable must be bound.
    pub fn eval_with<S: Scalar>(&self, bindings: &HashMap<String, S>) -> Result<S, EvalError> {
        let names: Vec<&str> = bindings.keys().map(String::as_str).collect();
        let values: Vec<S> = names.iter().map(|n| bindings[*n]).collect();
        CExpr::compile(self, &names, &HashMap::new())?.eval(&values)
    }

    /// Hyper-dual evaluation: derivatives along the seeds carried by the bindings.
    pub fn eval_hd(&self, bindings: &HashMap<String, HyperDual<f64>>) -> Result<HyperDual<f64>, EvalError> {
        self.eval_with(bindings)
    }
}
