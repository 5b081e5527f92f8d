//! Static typing of condition, guard, binding and argument expressions.

use crate::diagnostic::SourcePos;
use crate::symbols::LinkedWorkspace;
use crate::syntax::{BinaryOp, Expr, ExprKind, Param, PrimType, RecordDecl, TypeRef, UnaryOp};

/// What `result` means in the expression being typed.
#[derive(Debug, Clone, Copy)]
pub enum ResultScope<'a> {
    /// Exit rules: `result` is the execution call's return record. `None`
    /// when the call itself does not resolve (reported elsewhere).
    Available(Option<&'a RecordDecl>),
    /// Entry rules and execution arguments: using `result` is a type error.
    Forbidden,
    /// Net guards and bindings: `result` is a layering violation reported by
    /// its own rule, so the typer stays silent.
    Ignored,
}

pub struct TypeError {
    pub pos: SourcePos,
    pub message: String,
}

pub struct Typer<'a> {
    pub ws: &'a LinkedWorkspace,
    pub scope: &'a [Param],
    pub result: ResultScope<'a>,
    pub errors: Vec<TypeError>,
}

const DOUBLE: TypeRef = TypeRef::Prim(PrimType::Double);
const INT: TypeRef = TypeRef::Prim(PrimType::Int);
const BOOL: TypeRef = TypeRef::Prim(PrimType::Bool);

fn is_numeric(t: &TypeRef) -> bool {
    matches!(t, TypeRef::Prim(PrimType::Int | PrimType::Double))
}

/// `from` can be stored where `to` is expected (identity, or Int widening to Double).
pub fn assignable(from: &TypeRef, to: &TypeRef) -> bool {
    from == to || (*from == INT && *to == DOUBLE)
}

impl<'a> Typer<'a> {
    pub fn new(ws: &'a LinkedWorkspace, scope: &'a [Param], result: ResultScope<'a>) -> Self {
        Typer {
            ws,
            scope,
            result,
            errors: Vec::new(),
        }
    }

    fn err(&mut self, pos: &SourcePos, message: String) {
        self.errors.push(TypeError {
            pos: pos.clone(),
            message,
        });
    }

    /// Types `e`; `None` means the type is unknown because of an error
    /// already recorded (or deliberately ignored), so callers should not
    /// report follow-on mismatches.
    pub fn type_of(&mut self, e: &Expr) -> Option<TypeRef> {
        match &e.kind {
            ExprKind::Bool(_) => Some(BOOL),
            ExprKind::Int(_) => Some(INT),
            ExprKind::Double(_) => Some(DOUBLE),
            ExprKind::Str(_) => Some(TypeRef::Prim(PrimType::String)),
            ExprKind::Param(name) => match self.scope.iter().find(|p| &p.name == name) {
                Some(p) => Some(p.ty.clone()),
                None => {
                    self.err(&e.pos, format!("unknown parameter `{name}`"));
                    None
                }
            },
            ExprKind::ResultField(field) => match self.result {
                ResultScope::Ignored => None,
                ResultScope::Forbidden => {
                    self.err(
                        &e.pos,
                        format!("`result.{field}` is only available in exit rules"),
                    );
                    None
                }
                ResultScope::Available(None) => None,
                ResultScope::Available(Some(rec)) => {
                    match rec.fields.iter().find(|f| &f.name == field) {
                        Some(f) => Some(f.ty.clone()),
                        None => {
                            self.err(
                                &e.pos,
                                format!("record `{}` has no field `{field}`", rec.name.name),
                            );
                            None
                        }
                    }
                }
            },
            ExprKind::Unary(op, inner) => {
                let t = self.type_of(inner)?;
                match op {
                    UnaryOp::Not if t == BOOL => Some(BOOL),
                    UnaryOp::Neg if is_numeric(&t) => Some(t),
                    _ => {
                        self.err(
                            &e.pos,
                            format!("operator `{}` cannot be applied to `{t}`", op.symbol()),
                        );
                        None
                    }
                }
            }
            ExprKind::Binary(op, l, r) => {
                let lt = self.type_of(l);
                let rt = self.type_of(r);
                let (lt, rt) = (lt?, rt?);
                let ok = match op {
                    BinaryOp::Mul | BinaryOp::Div | BinaryOp::Add | BinaryOp::Sub => {
                        if is_numeric(&lt) && is_numeric(&rt) {
                            Some(if lt == INT && rt == INT { INT } else { DOUBLE })
                        } else {
                            None
                        }
                    }
                    BinaryOp::Lt | BinaryOp::Le | BinaryOp::Gt | BinaryOp::Ge => {
                        (is_numeric(&lt) && is_numeric(&rt)).then_some(BOOL)
                    }
                    BinaryOp::Eq | BinaryOp::Ne => {
                        let comparable = (is_numeric(&lt) && is_numeric(&rt))
                            || (lt == rt && !self.is_record(&lt));
                        comparable.then_some(BOOL)
                    }
                    BinaryOp::And | BinaryOp::Or => (lt == BOOL && rt == BOOL).then_some(BOOL),
                };
                if ok.is_none() {
                    self.err(
                        &e.pos,
                        format!(
                            "operator `{}` cannot be applied to `{lt}` and `{rt}`",
                            op.symbol()
                        ),
                    );
                }
                ok
            }
        }
    }

    fn is_record(&self, t: &TypeRef) -> bool {
        matches!(t, TypeRef::Named(n) if self.ws.record(n).is_some())
    }

    /// Types a condition and requires it to be Bool.
    pub fn expect_bool(&mut self, e: &Expr, what: &str) {
        if let Some(t) = self.type_of(e) {
            if t != BOOL {
                self.err(&e.pos, format!("{what} must be Bool, found `{t}`"));
            }
        }
    }
}
