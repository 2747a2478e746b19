//! Integer/boolean expression evaluation.

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use super::ast::{BinOp, Expr, UnOp};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Value {
    Int(i64),
    Bool(bool),
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Int(n) => write!(f, "{n}"),
            Value::Bool(b) => write!(f, "{b}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error("unbound variable `{0}`")]
    UnboundVariable(String),
    #[error("division by zero")]
    DivisionByZero,
    #[error("type mismatch: expected {expected}, found {found}")]
    TypeMismatch { expected: &'static str, found: Value },
    #[error("integer overflow")]
    Overflow,
}

pub type Env = BTreeMap<String, i64>;

/// Evaluates `expr`; variables are looked up in `env` first, then `consts`.
/// `&&` and `||` short-circuit.
pub fn eval_expr(expr: &Expr, env: &Env, consts: &Env) -> Result<Value, EvalError> {
    match expr {
        Expr::Int(n) => Ok(Value::Int(*n)),
        Expr::Var(v) => env
            .get(v)
            .or_else(|| consts.get(v))
            .map(|n| Value::Int(*n))
            .ok_or_else(|| EvalError::UnboundVariable(v.clone())),
        Expr::Unary(UnOp::Neg, e) => {
            let n = int(eval_expr(e, env, consts)?)?;
            n.checked_neg().map(Value::Int).ok_or(EvalError::Overflow)
        }
        Expr::Unary(UnOp::Not, e) => Ok(Value::Bool(!boolean(eval_expr(e, env, consts)?)?)),
        Expr::Binary(BinOp::And, l, r) => {
            if !boolean(eval_expr(l, env, consts)?)? {
                return Ok(Value::Bool(false));
            }
            Ok(Value::Bool(boolean(eval_expr(r, env, consts)?)?))
        }
        Expr::Binary(BinOp::Or, l, r) => {
            if boolean(eval_expr(l, env, consts)?)? {
                return Ok(Value::Bool(true));
            }
            Ok(Value::Bool(boolean(eval_expr(r, env, consts)?)?))
        }
        Expr::Binary(op, l, r) => {
            let a = int(eval_expr(l, env, consts)?)?;
            let b = int(eval_expr(r, env, consts)?)?;
            let v = match op {
                BinOp::Add => Value::Int(a.checked_add(b).ok_or(EvalError::Overflow)?),
                BinOp::Sub => Value::Int(a.checked_sub(b).ok_or(EvalError::Overflow)?),
                BinOp::Mul => Value::Int(a.checked_mul(b).ok_or(EvalError::Overflow)?),
                BinOp::Div | BinOp::Mod if b == 0 => return Err(EvalError::DivisionByZero),
                BinOp::Div => Value::Int(a.checked_div(b).ok_or(EvalError::Overflow)?),
                BinOp::Mod => Value::Int(a.checked_rem(b).ok_or(EvalError::Overflow)?),
                BinOp::Eq => Value::Bool(a == b),
                BinOp::Ne => Value::Bool(a != b),
                BinOp::Lt => Value::Bool(a < b),
                BinOp::Le => Value::Bool(a <= b),
                BinOp::Gt => Value::Bool(a > b),
                BinOp::Ge => Value::Bool(a >= b),
                BinOp::And | BinOp::Or => unreachable!(),
            };
            Ok(v)
        }
    }
}

pub fn eval_int(expr: &Expr, env: &Env, consts: &Env) -> Result<i64, EvalError> {
    int(eval_expr(expr, env, consts)?)
}

pub fn eval_bool(expr: &Expr, env: &Env, consts: &Env) -> Result<bool, EvalError> {
    boolean(eval_expr(expr, env, consts)?)
}

fn int(v: Value) -> Result<i64, EvalError> {
    match v {
        Value::Int(n) => Ok(n),
        found => Err(EvalError::TypeMismatch { expected: "integer", found }),
    }
}

fn boolean(v: Value) -> Result<bool, EvalError> {
    match v {
        Value::Bool(b) => Ok(b),
        found => Err(EvalError::TypeMismatch { expected: "boolean", found }),
    }
}
