//! Recursive-descent parser for domain models, actions and nets.
//!
//! Parsing stops at the first syntax error; there is no recovery. A
//! successful parse may still yield diagnostics for the few structural
//! constraints that are checked right after parsing (record field types,
//! duplicate binding names, file-extension/kind agreement).

use std::path::Path;
use std::sync::Arc;

use super::ast::*;
use super::lexer::{tokenize, Keyword, Tok, Token};
use crate::diagnostic::{Diagnostic, SourcePos};

type PResult<T> = Result<T, Diagnostic>;

/// Parses one model file.
pub fn parse_model(text: &str, file: &str) -> Result<ModelAst, Vec<Diagnostic>> {
    let file: Arc<str> = Arc::from(file);
    let tokens = tokenize(text, &file).map_err(|d| vec![d])?;
    let mut p = Parser { tokens, idx: 0 };
    let model = p.model().map_err(|d| vec![d])?;
    let mut diags = post_parse_checks(&model);
    if let Some(ext) = Path::new(&*file).extension().and_then(|e| e.to_str()) {
        if let Some(expected) = ModelKind::from_extension(ext) {
            if expected != model.kind() {
                diags.insert(
                    0,
                    Diagnostic::error(
                        "PARSE",
                        model.pos.clone(),
                        format!(
                            "file extension `.{ext}` expects a {expected} model but found a {}",
                            model.kind()
                        ),
                    ),
                );
            }
        }
    }
    if diags.is_empty() {
        Ok(model)
    } else {
        Err(diags)
    }
}

/// Like [`parse_model`] but accepts raw bytes; invalid UTF-8 is a diagnostic.
pub fn parse_model_bytes(bytes: &[u8], file: &str) -> Result<ModelAst, Vec<Diagnostic>> {
    match std::str::from_utf8(bytes) {
        Ok(text) => parse_model(text, file),
        Err(e) => {
            let valid = std::str::from_utf8(&bytes[..e.valid_up_to()]).unwrap_or_default();
            let line = valid.matches('\n').count() as u32 + 1;
            let col = valid.rsplit('\n').next().unwrap_or("").chars().count() as u32 + 1;
            Err(vec![Diagnostic::error(
                "PARSE",
                SourcePos::new(file, line, col),
                "input is not valid UTF-8",
            )])
        }
    }
}

/// Parses a standalone expression (used for serialized programs and tests).
pub fn parse_expression(text: &str) -> Result<Expr, Diagnostic> {
    let file: Arc<str> = Arc::from("<expr>");
    let tokens = tokenize(text, &file)?;
    let mut p = Parser { tokens, idx: 0 };
    let e = p.expr()?;
    p.expect(Tok::Eof)?;
    Ok(e)
}

fn post_parse_checks(model: &ModelAst) -> Vec<Diagnostic> {
    let mut diags = Vec::new();
    let mut check_bindings = |bindings: &[Binding]| {
        for (i, b) in bindings.iter().enumerate() {
            if bindings[..i].iter().any(|o| o.param.name == b.param.name) {
                diags.push(Diagnostic::error(
                    "PARSE",
                    b.param.pos.clone(),
                    format!("parameter `{}` is bound twice", b.param.name),
                ));
            }
        }
    };
    match &model.body {
        ModelBody::Domain(d) => {
            for r in &d.records {
                for f in &r.fields {
                    if !matches!(f.ty, TypeRef::Prim(_)) {
                        diags.push(Diagnostic::error(
                            "PARSE",
                            f.pos.clone(),
                            format!(
                                "record field `{}` must have a primitive type, found `{}`",
                                f.name, f.ty
                            ),
                        ));
                    }
                }
            }
        }
        ModelBody::Action(_) => {}
        ModelBody::Skill(n) | ModelBody::Task(n) | ModelBody::Process(n) => {
            check_bindings(&n.initial.bindings);
            for t in &n.transitions {
                if let Target::Node { bindings, .. } = &t.target {
                    check_bindings(bindings);
                }
            }
        }
    }
    diags
}

struct Parser {
    tokens: Vec<Token>,
    idx: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.tokens[self.idx].tok
    }

    fn pos(&self) -> SourcePos {
        self.tokens[self.idx].pos.clone()
    }

    fn advance(&mut self) -> Token {
        let t = self.tokens[self.idx].clone();
        if self.idx + 1 < self.tokens.len() {
            self.idx += 1;
        }
        t
    }

    fn at(&self, t: &Tok) -> bool {
        self.peek() == t
    }

    fn at_kw(&self, k: Keyword) -> bool {
        matches!(self.peek(), Tok::Keyword(x) if *x == k)
    }

    fn eat(&mut self, t: &Tok) -> bool {
        if self.at(t) {
            self.advance();
            true
        } else {
            false
        }
    }

    fn unexpected(&self, expected: &str) -> Diagnostic {
        Diagnostic::error(
            "PARSE",
            self.pos(),
            format!("expected {expected}, found {}", self.peek().describe()),
        )
    }

    fn expect(&mut self, t: Tok) -> PResult<SourcePos> {
        if self.at(&t) {
            Ok(self.advance().pos)
        } else {
            Err(self.unexpected(&t.describe()))
        }
    }

    fn expect_kw(&mut self, k: Keyword) -> PResult<SourcePos> {
        self.expect(Tok::Keyword(k))
    }

    fn ident(&mut self) -> PResult<Ident> {
        match self.peek().clone() {
            Tok::Ident(name) => {
                let pos = self.advance().pos;
                Ok(Ident { name, pos })
            }
            _ => Err(self.unexpected("identifier")),
        }
    }

    fn model(&mut self) -> PResult<ModelAst> {
        let pos = self.pos();
        let model = match self.peek() {
            Tok::Keyword(Keyword::DomainModel) => self.domain_model(pos)?,
            Tok::Keyword(Keyword::Action) => self.action(pos)?,
            Tok::Keyword(k @ (Keyword::Skill | Keyword::Task | Keyword::Process)) => {
                let k = *k;
                self.net(pos, k)?
            }
            _ => {
                return Err(self.unexpected("`domainmodel`, `action`, `skill`, `task` or `process`"))
            }
        };
        self.expect(Tok::Eof)?;
        Ok(model)
    }

    fn type_ref(&mut self) -> PResult<TypeRef> {
        let prim = match self.peek() {
            Tok::Keyword(Keyword::Double) => Some(PrimType::Double),
            Tok::Keyword(Keyword::Int) => Some(PrimType::Int),
            Tok::Keyword(Keyword::Bool) => Some(PrimType::Bool),
            Tok::Keyword(Keyword::String) => Some(PrimType::String),
            Tok::Ident(_) => None,
            _ => return Err(self.unexpected("type")),
        };
        match prim {
            Some(p) => {
                self.advance();
                Ok(TypeRef::Prim(p))
            }
            None => Ok(TypeRef::Named(self.ident()?.name)),
        }
    }

    fn typed_name(&mut self) -> PResult<Param> {
        let pos = self.pos();
        let ty = self.type_ref()?;
        let name = self.ident()?.name;
        Ok(Param { ty, name, pos })
    }

    fn domain_model(&mut self, pos: SourcePos) -> PResult<ModelAst> {
        self.expect_kw(Keyword::DomainModel)?;
        let name = self.ident()?;
        let mut dom = DomainModelAst::default();
        if let Tok::Ident(role) = self.peek() {
            dom.role = match role.as_str() {
                "types" => DomainRole::DomainTypes,
                "robotapi" => DomainRole::RobotInterface,
                _ => return Err(self.unexpected("`types`, `robotapi` or `{`")),
            };
            self.advance();
        }
        self.expect(Tok::LBrace)?;
        loop {
            let decl_pos = self.pos();
            match self.peek() {
                Tok::Keyword(Keyword::Interface) => {
                    self.advance();
                    let iname = self.ident()?;
                    self.expect(Tok::LBrace)?;
                    let mut methods = Vec::new();
                    while !self.at(&Tok::RBrace) {
                        methods.push(self.method()?);
                    }
                    self.expect(Tok::RBrace)?;
                    dom.interfaces.push(InterfaceDecl {
                        name: iname,
                        methods,
                        pos: decl_pos,
                    });
                }
                Tok::Keyword(Keyword::Type) => {
                    self.advance();
                    let tname = self.ident()?;
                    self.expect(Tok::Semi)?;
                    dom.opaque_types.push(tname);
                }
                Tok::Keyword(Keyword::Record) => {
                    self.advance();
                    let rname = self.ident()?;
                    self.expect(Tok::LBrace)?;
                    let mut fields = Vec::new();
                    while !self.at(&Tok::RBrace) {
                        fields.push(self.typed_name()?);
                        self.expect(Tok::Semi)?;
                    }
                    self.expect(Tok::RBrace)?;
                    dom.records.push(RecordDecl {
                        name: rname,
                        fields,
                        pos: decl_pos,
                    });
                }
                Tok::RBrace => break,
                _ => return Err(self.unexpected("`interface`, `type`, `record` or `}`")),
            }
        }
        self.expect(Tok::RBrace)?;
        Ok(ModelAst {
            name,
            body: ModelBody::Domain(dom),
            pos,
        })
    }

    fn method(&mut self) -> PResult<MethodDecl> {
        let pos = self.pos();
        let ret = if self.at_kw(Keyword::Void) {
            self.advance();
            None
        } else {
            Some(self.type_ref()?)
        };
        let name = self.ident()?;
        self.expect(Tok::LParen)?;
        let mut params = Vec::new();
        if !self.at(&Tok::RParen) {
            loop {
                params.push(self.typed_name()?);
                if !self.eat(&Tok::Comma) {
                    break;
                }
            }
        }
        self.expect(Tok::RParen)?;
        self.expect(Tok::Semi)?;
        Ok(MethodDecl {
            ret,
            name,
            params,
            pos,
        })
    }

    fn params_block(&mut self) -> PResult<Vec<Param>> {
        self.expect_kw(Keyword::Parameters)?;
        self.expect(Tok::LBrace)?;
        let mut params = Vec::new();
        while !self.at(&Tok::RBrace) {
            params.push(self.typed_name()?);
            self.expect(Tok::Semi)?;
        }
        self.expect(Tok::RBrace)?;
        Ok(params)
    }

    fn action(&mut self, pos: SourcePos) -> PResult<ModelAst> {
        self.expect_kw(Keyword::Action)?;
        let name = self.ident()?;
        self.expect(Tok::LBrace)?;
        let params = self.params_block()?;

        self.expect_kw(Keyword::Execution)?;
        self.expect(Tok::LBrace)?;
        let call_pos = self.pos();
        let receiver = self.ident()?;
        self.expect(Tok::Dot)?;
        let method = self.ident()?;
        self.expect(Tok::LParen)?;
        let mut args = Vec::new();
        if !self.at(&Tok::RParen) {
            loop {
                args.push(self.expr()?);
                if !self.eat(&Tok::Comma) {
                    break;
                }
            }
        }
        self.expect(Tok::RParen)?;
        self.expect(Tok::RBrace)?;

        let mut entry_rules = Vec::new();
        if self.at_kw(Keyword::Entry) {
            self.advance();
            self.expect(Tok::LBrace)?;
            while !self.at(&Tok::RBrace) {
                entry_rules.push(self.expr()?);
                self.expect(Tok::Semi)?;
            }
            self.expect(Tok::RBrace)?;
        }

        self.expect_kw(Keyword::Exit)?;
        self.expect(Tok::LBrace)?;
        let mut exit_rules = Vec::new();
        loop {
            let rule_pos = self.pos();
            let condition = self.expr()?;
            self.expect(Tok::Arrow)?;
            let outcome = self.ident()?;
            self.expect(Tok::Semi)?;
            exit_rules.push(ExitRule {
                condition,
                outcome,
                pos: rule_pos,
            });
            if self.at(&Tok::RBrace) {
                break;
            }
        }
        self.expect(Tok::RBrace)?;
        self.expect(Tok::RBrace)?;
        Ok(ModelAst {
            name,
            body: ModelBody::Action(ActionAst {
                params,
                execution: ApiCall {
                    receiver,
                    method,
                    args,
                    pos: call_pos,
                },
                entry_rules,
                exit_rules,
            }),
            pos,
        })
    }

    fn bindings(&mut self) -> PResult<Vec<Binding>> {
        if !self.at_kw(Keyword::With) {
            return Ok(Vec::new());
        }
        self.advance();
        self.expect(Tok::LParen)?;
        let mut out = Vec::new();
        loop {
            let param = self.ident()?;
            self.expect(Tok::Assign)?;
            let value = self.expr()?;
            out.push(Binding { param, value });
            if !self.eat(&Tok::Comma) {
                break;
            }
        }
        self.expect(Tok::RParen)?;
        Ok(out)
    }

    fn net(&mut self, pos: SourcePos, kw: Keyword) -> PResult<ModelAst> {
        self.expect_kw(kw)?;
        let name = self.ident()?;
        self.expect(Tok::LBrace)?;
        let params = self.params_block()?;

        self.expect_kw(Keyword::Nodes)?;
        self.expect(Tok::LBrace)?;
        let mut nodes = Vec::new();
        while !self.at(&Tok::RBrace) {
            let npos = self.pos();
            let nname = self.ident()?;
            self.expect(Tok::Colon)?;
            let model = self.ident()?;
            self.expect(Tok::Semi)?;
            nodes.push(NodeDecl {
                name: nname,
                model,
                pos: npos,
            });
        }
        self.expect(Tok::RBrace)?;

        let ipos = self.expect_kw(Keyword::Initial)?;
        let inode = self.ident()?;
        let ibindings = self.bindings()?;
        self.expect(Tok::Semi)?;

        self.expect_kw(Keyword::Transitions)?;
        self.expect(Tok::LBrace)?;
        let mut transitions = Vec::new();
        while !self.at(&Tok::RBrace) {
            let tpos = self.pos();
            let source = self.ident()?;
            self.expect(Tok::Dot)?;
            let outcome = self.ident()?;
            let guard = if self.at_kw(Keyword::When) {
                self.advance();
                Some(self.expr()?)
            } else {
                None
            };
            self.expect(Tok::Arrow)?;
            let target = if self.at_kw(Keyword::End) {
                self.advance();
                Target::End(self.ident()?)
            } else {
                let node = self.ident()?;
                let bindings = self.bindings()?;
                Target::Node { node, bindings }
            };
            self.expect(Tok::Semi)?;
            transitions.push(TransitionAst {
                source,
                outcome,
                guard,
                target,
                pos: tpos,
            });
        }
        self.expect(Tok::RBrace)?;
        self.expect(Tok::RBrace)?;

        let net = NetAst {
            params,
            nodes,
            initial: Initial {
                node: inode,
                bindings: ibindings,
                pos: ipos,
            },
            transitions,
        };
        let body = match kw {
            Keyword::Skill => ModelBody::Skill(net),
            Keyword::Task => ModelBody::Task(net),
            _ => ModelBody::Process(net),
        };
        Ok(ModelAst { name, body, pos })
    }

    // Expressions, loosest to tightest.

    fn expr(&mut self) -> PResult<Expr> {
        self.binary(1)
    }

    fn binary_op(&self) -> Option<BinaryOp> {
        Some(match self.peek() {
            Tok::Star => BinaryOp::Mul,
            Tok::Slash => BinaryOp::Div,
            Tok::Plus => BinaryOp::Add,
            Tok::Minus => BinaryOp::Sub,
            Tok::Lt => BinaryOp::Lt,
            Tok::Le => BinaryOp::Le,
            Tok::Gt => BinaryOp::Gt,
            Tok::Ge => BinaryOp::Ge,
            Tok::EqEq => BinaryOp::Eq,
            Tok::NotEq => BinaryOp::Ne,
            Tok::AndAnd => BinaryOp::And,
            Tok::OrOr => BinaryOp::Or,
            _ => return None,
        })
    }

    fn binary(&mut self, min_prec: u8) -> PResult<Expr> {
        let mut lhs = self.unary()?;
        while let Some(op) = self.binary_op() {
            let prec = op.precedence();
            if prec < min_prec {
                break;
            }
            let pos = self.advance().pos;
            let rhs = self.binary(prec + 1)?;
            lhs = Expr::new(ExprKind::Binary(op, Box::new(lhs), Box::new(rhs)), pos);
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> PResult<Expr> {
        let op = match self.peek() {
            Tok::Bang => UnaryOp::Not,
            Tok::Minus => UnaryOp::Neg,
            _ => return self.primary(),
        };
        let pos = self.advance().pos;
        let inner = self.unary()?;
        Ok(Expr::new(ExprKind::Unary(op, Box::new(inner)), pos))
    }

    fn primary(&mut self) -> PResult<Expr> {
        let pos = self.pos();
        let kind = match self.peek().clone() {
            Tok::Int(i) => ExprKind::Int(i),
            Tok::Double(d) => ExprKind::Double(d),
            Tok::Str(s) => ExprKind::Str(s),
            Tok::Keyword(Keyword::True) => ExprKind::Bool(true),
            Tok::Keyword(Keyword::False) => ExprKind::Bool(false),
            Tok::Ident(name) => ExprKind::Param(name),
            Tok::Keyword(Keyword::Result) => {
                self.advance();
                self.expect(Tok::Dot)?;
                let field = self.ident()?;
                return Ok(Expr::new(ExprKind::ResultField(field.name), pos));
            }
            Tok::LParen => {
                self.advance();
                let e = self.expr()?;
                self.expect(Tok::RParen)?;
                return Ok(e);
            }
            _ => return Err(self.unexpected("expression")),
        };
        self.advance();
        Ok(Expr::new(kind, pos))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bin(e: &Expr) -> (BinaryOp, &Expr, &Expr) {
        match &e.kind {
            ExprKind::Binary(op, l, r) => (*op, l, r),
            other => panic!("not binary: {other:?}"),
        }
    }

    #[test]
    fn result_comparison_parses_as_binary() {
        let e = parse_expression("result.torque >= maxTorque").unwrap();
        let (op, l, r) = bin(&e);
        assert_eq!(op, BinaryOp::Ge);
        assert_eq!(l.kind, ExprKind::ResultField("torque".into()));
        assert_eq!(r.kind, ExprKind::Param("maxTorque".into()));
    }

    #[test]
    fn true_literal() {
        assert_eq!(parse_expression("true").unwrap().kind, ExprKind::Bool(true));
    }

    #[test]
    fn precedence_and_left_associativity() {
        // (1 + (2*3)) == 7
        let e = parse_expression("1 + 2 * 3 == 7").unwrap();
        let (op, l, r) = bin(&e);
        assert_eq!(op, BinaryOp::Eq);
        assert_eq!(r.kind, ExprKind::Int(7));
        let (op, one, mul) = bin(l);
        assert_eq!(op, BinaryOp::Add);
        assert_eq!(one.kind, ExprKind::Int(1));
        assert_eq!(bin(mul).0, BinaryOp::Mul);

        // a - b - c == (a - b) - c
        let e = parse_expression("a - b - c").unwrap();
        let (op, l, r) = bin(&e);
        assert_eq!(op, BinaryOp::Sub);
        assert_eq!(r.kind, ExprKind::Param("c".into()));
        assert_eq!(bin(l).0, BinaryOp::Sub);

        // && binds tighter than ||
        let e = parse_expression("a || b && c").unwrap();
        assert_eq!(bin(&e).0, BinaryOp::Or);
        assert_eq!(bin(bin(&e).2).0, BinaryOp::And);

        // unary binds tightest
        let e = parse_expression("-a * b").unwrap();
        let (op, l, _) = bin(&e);
        assert_eq!(op, BinaryOp::Mul);
        assert!(matches!(l.kind, ExprKind::Unary(UnaryOp::Neg, _)));
    }

    #[test]
    fn expression_errors() {
        assert!(parse_expression("1 +").is_err());
        assert!(parse_expression("(a").is_err());
        assert!(parse_expression("a b").is_err());
        assert!(parse_expression("result").is_err());
    }

    #[test]
    fn minimal_action() {
        let m = parse_model(
            "action A { parameters { } execution { t.close() } exit { true -> done; } }",
            "<input>",
        )
        .unwrap();
        assert_eq!(m.kind(), ModelKind::Action);
        let a = m.as_action().unwrap();
        assert!(a.params.is_empty());
        assert_eq!(a.execution.receiver.name, "t");
        assert_eq!(a.execution.method.name, "close");
        assert!(a.execution.args.is_empty());
        assert_eq!(a.exit_rules.len(), 1);
        assert_eq!(a.exit_rules[0].outcome.name, "done");
    }

    #[test]
    fn unclosed_net_reports_one_error_at_eof() {
        let text = "skill S { parameters { } nodes { }";
        let diags = parse_model(text, "S.skill").unwrap_err();
        assert_eq!(diags.len(), 1);
        assert_eq!(diags[0].rule_id, "PARSE");
        assert_eq!(
            (diags[0].pos.line, diags[0].pos.col),
            (1, text.len() as u32 + 1)
        );
        assert!(
            diags[0].message.contains("end of file"),
            "{}",
            diags[0].message
        );
    }

    #[test]
    fn exit_block_must_not_be_empty() {
        let e = parse_model(
            "action A { parameters { } execution { t.close() } exit { } }",
            "A.action",
        )
        .unwrap_err();
        assert_eq!(e.len(), 1);
    }

    #[test]
    fn extension_mismatch_is_a_parse_diagnostic() {
        let d = parse_model(
            "action A { parameters { } execution { t.close() } exit { true -> done; } }",
            "dir/A.skill",
        )
        .unwrap_err();
        assert_eq!(d.len(), 1);
        assert!(d[0].message.contains(".skill"));
    }

    #[test]
    fn record_fields_must_be_primitive() {
        let d = parse_model(
            "domainmodel D { type Frame; record R { Frame f; Double x; } }",
            "D.dom",
        )
        .unwrap_err();
        assert_eq!(d.len(), 1);
        assert_eq!((d[0].pos.line, d[0].pos.col), (1, 40));
    }

    #[test]
    fn duplicate_binding_names_rejected() {
        let d = parse_model(
            "skill S { parameters { } nodes { a: A; } initial a with (x = 1, x = 2); \
             transitions { a.done -> end done; } }",
            "S.skill",
        )
        .unwrap_err();
        assert_eq!(d.len(), 1);
        assert!(d[0].message.contains("bound twice"));
    }

    #[test]
    fn domain_role_defaults_to_types() {
        let m = parse_model("domainmodel D { }", "D.dom").unwrap();
        assert_eq!(m.as_domain().unwrap().role, DomainRole::DomainTypes);
        let m = parse_model(
            "domainmodel R robotapi { interface Tool { void close(); } }",
            "R.dom",
        )
        .unwrap();
        let d = m.as_domain().unwrap();
        assert_eq!(d.role, DomainRole::RobotInterface);
        assert_eq!(d.interfaces[0].methods[0].ret, None);
    }

    #[test]
    fn invalid_utf8_is_diagnosed() {
        let d = parse_model_bytes(b"action \xff", "A.action").unwrap_err();
        assert_eq!((d[0].pos.line, d[0].pos.col), (1, 8));
    }
}
