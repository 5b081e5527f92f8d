use std::cmp::Ordering;
use std::collections::BTreeMap;

use super::{RuntimeError, Value};
use crate::syntax::{BinaryOp, Expr, ExprKind, UnaryOp};

/// Parameter values of one active net or action, tagged with its path.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Frame {
    pub owner: String,
    pub vars: BTreeMap<String, Value>,
}

impl Frame {
    pub fn new(owner: impl Into<String>, vars: BTreeMap<String, Value>) -> Frame {
        Frame {
            owner: owner.into(),
            vars,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Environment {
    frames: Vec<Frame>,
}

impl Environment {
    pub fn new() -> Environment {
        Environment::default()
    }

    pub fn push(&mut self, frame: Frame) {
        self.frames.push(frame);
    }

    pub fn pop(&mut self) -> Option<Frame> {
        self.frames.pop()
    }

    pub fn top(&self) -> Option<&Frame> {
        self.frames.last()
    }

    pub fn depth(&self) -> usize {
        self.frames.len()
    }

    /// Innermost binding of `name`.
    pub fn lookup(&self, name: &str) -> Option<&Value> {
        self.frames.iter().rev().find_map(|f| f.vars.get(name))
    }
}

fn type_error(message: String) -> RuntimeError {
    RuntimeError::TypeError { message }
}

fn finite(v: f64) -> Result<Value, RuntimeError> {
    if v.is_finite() {
        Ok(Value::Double(v))
    } else {
        Err(RuntimeError::ArithmeticOverflow)
    }
}

fn as_f64(v: &Value) -> Option<f64> {
    match v {
        Value::Int(i) => Some(*i as f64),
        Value::Double(d) => Some(*d),
        _ => None,
    }
}

/// Evaluates `e` strictly, left to right. `result` is the record returned by
/// the current action's call, when one is in scope.
pub fn eval_expr(
    e: &Expr,
    env: &Environment,
    result: Option<&Value>,
) -> Result<Value, RuntimeError> {
    match &e.kind {
        ExprKind::Bool(b) => Ok(Value::Bool(*b)),
        ExprKind::Int(i) => Ok(Value::Int(*i)),
        ExprKind::Double(d) => Ok(Value::Double(*d)),
        ExprKind::Str(s) => Ok(Value::Str(s.clone())),
        ExprKind::Param(name) => env
            .lookup(name)
            .cloned()
            .ok_or_else(|| type_error(format!("unknown parameter `{name}`"))),
        ExprKind::ResultField(field) => match result {
            Some(Value::Record(fields)) => {
                fields
                    .get(field)
                    .cloned()
                    .ok_or_else(|| RuntimeError::MissingField {
                        field: field.clone(),
                    })
            }
            Some(other) => Err(type_error(format!(
                "`result.{field}` on a {} value",
                other.type_name()
            ))),
            None => Err(RuntimeError::MissingField {
                field: field.clone(),
            }),
        },
        ExprKind::Unary(op, inner) => {
            let v = eval_expr(inner, env, result)?;
            match (op, v) {
                (UnaryOp::Not, Value::Bool(b)) => Ok(Value::Bool(!b)),
                (UnaryOp::Neg, Value::Int(i)) => i
                    .checked_neg()
                    .map(Value::Int)
                    .ok_or(RuntimeError::ArithmeticOverflow),
                (UnaryOp::Neg, Value::Double(d)) => Ok(Value::Double(-d)),
                (op, v) => Err(type_error(format!(
                    "`{}` on a {} value",
                    op.symbol(),
                    v.type_name()
                ))),
            }
        }
        ExprKind::Binary(op, l, r) => {
            let lv = eval_expr(l, env, result)?;
            match op {
                BinaryOp::And | BinaryOp::Or => {
                    let Value::Bool(lb) = lv else {
                        return Err(type_error(format!("`{}` on non-Bool", op.symbol())));
                    };
                    if (*op == BinaryOp::And && !lb) || (*op == BinaryOp::Or && lb) {
                        return Ok(Value::Bool(lb));
                    }
                    match eval_expr(r, env, result)? {
                        Value::Bool(rb) => Ok(Value::Bool(rb)),
                        _ => Err(type_error(format!("`{}` on non-Bool", op.symbol()))),
                    }
                }
                _ => {
                    let rv = eval_expr(r, env, result)?;
                    binary(*op, &lv, &rv)
                }
            }
        }
    }
}

fn binary(op: BinaryOp, l: &Value, r: &Value) -> Result<Value, RuntimeError> {
    use BinaryOp::*;
    match op {
        Add | Sub | Mul | Div => arith(op, l, r),
        Eq => equal(l, r).map(Value::Bool),
        Ne => equal(l, r).map(|b| Value::Bool(!b)),
        Lt | Le | Gt | Ge => {
            let ord = match (l, r) {
                (Value::Int(a), Value::Int(b)) => a.cmp(b),
                _ => match (as_f64(l), as_f64(r)) {
                    (Some(a), Some(b)) => a.partial_cmp(&b).unwrap_or(Ordering::Equal),
                    _ => {
                        return Err(type_error(format!(
                            "`{}` on {} and {}",
                            op.symbol(),
                            l.type_name(),
                            r.type_name()
                        )))
                    }
                },
            };
            Ok(Value::Bool(match op {
                Lt => ord == Ordering::Less,
                Le => ord != Ordering::Greater,
                Gt => ord == Ordering::Greater,
                _ => ord != Ordering::Less,
            }))
        }
        And | Or => unreachable!("short-circuit operators are handled by the caller"),
    }
}

fn arith(op: BinaryOp, l: &Value, r: &Value) -> Result<Value, RuntimeError> {
    if let (Value::Int(a), Value::Int(b)) = (l, r) {
        let (a, b) = (*a, *b);
        let v = match op {
            BinaryOp::Add => a.checked_add(b),
            BinaryOp::Sub => a.checked_sub(b),
            BinaryOp::Mul => a.checked_mul(b),
            _ => {
                if b == 0 {
                    return Err(RuntimeError::DivisionByZero);
                }
                a.checked_div(b)
            }
        };
        return v.map(Value::Int).ok_or(RuntimeError::ArithmeticOverflow);
    }
    let (Some(a), Some(b)) = (as_f64(l), as_f64(r)) else {
        return Err(type_error(format!(
            "`{}` on {} and {}",
            op.symbol(),
            l.type_name(),
            r.type_name()
        )));
    };
    match op {
        BinaryOp::Add => finite(a + b),
        BinaryOp::Sub => finite(a - b),
        BinaryOp::Mul => finite(a * b),
        _ if b == 0.0 => Err(RuntimeError::DivisionByZero),
        _ => finite(a / b),
    }
}

fn equal(l: &Value, r: &Value) -> Result<bool, RuntimeError> {
    match (l, r) {
        (Value::Int(a), Value::Int(b)) => Ok(a == b),
        (Value::Bool(a), Value::Bool(b)) => Ok(a == b),
        (Value::Str(a), Value::Str(b)) => Ok(a == b),
        (Value::Opaque(a), Value::Opaque(b)) => Ok(a == b),
        (Value::ApiObject { handle: a, .. }, Value::ApiObject { handle: b, .. }) => Ok(a == b),
        _ => match (as_f64(l), as_f64(r)) {
            (Some(a), Some(b)) => Ok(a == b),
            _ => Err(type_error(format!(
                "cannot compare {} with {}",
                l.type_name(),
                r.type_name()
            ))),
        },
    }
}
