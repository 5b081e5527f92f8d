//! Abstract syntax for the five model languages.
//!
//! Every node carries a [`SourcePos`]. Structural comparison that ignores
//! positions goes through [`ModelAst::erase_positions`].

use std::fmt;

use crate::diagnostic::SourcePos;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ModelKind {
    DomainModel,
    Action,
    Skill,
    Task,
    Process,
}

impl ModelKind {
    pub const ALL: [ModelKind; 5] = [
        ModelKind::DomainModel,
        ModelKind::Action,
        ModelKind::Skill,
        ModelKind::Task,
        ModelKind::Process,
    ];

    /// File extension (without the dot) that holds models of this kind.
    pub fn extension(self) -> &'static str {
        match self {
            ModelKind::DomainModel => "dom",
            ModelKind::Action => "action",
            ModelKind::Skill => "skill",
            ModelKind::Task => "task",
            ModelKind::Process => "process",
        }
    }

    pub fn from_extension(ext: &str) -> Option<ModelKind> {
        ModelKind::ALL.into_iter().find(|k| k.extension() == ext)
    }

    pub fn keyword(self) -> &'static str {
        match self {
            ModelKind::DomainModel => "domainmodel",
            ModelKind::Action => "action",
            ModelKind::Skill => "skill",
            ModelKind::Task => "task",
            ModelKind::Process => "process",
        }
    }

    pub fn is_net(self) -> bool {
        matches!(
            self,
            ModelKind::Skill | ModelKind::Task | ModelKind::Process
        )
    }

    /// The kind of model a node inside a net of this kind must reference.
    pub fn child_kind(self) -> Option<ModelKind> {
        match self {
            ModelKind::Process => Some(ModelKind::Task),
            ModelKind::Task => Some(ModelKind::Skill),
            ModelKind::Skill => Some(ModelKind::Action),
            _ => None,
        }
    }
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.keyword())
    }
}

/// An identifier together with where it was written.
#[derive(Debug, Clone, PartialEq)]
pub struct Ident {
    pub name: String,
    pub pos: SourcePos,
}

impl Ident {
    pub fn new(name: impl Into<String>, pos: SourcePos) -> Self {
        Ident {
            name: name.into(),
            pos,
        }
    }

    pub fn as_str(&self) -> &str {
        &self.name
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PrimType {
    Double,
    Int,
    Bool,
    String,
}

impl PrimType {
    pub fn name(self) -> &'static str {
        match self {
            PrimType::Double => "Double",
            PrimType::Int => "Int",
            PrimType::Bool => "Bool",
            PrimType::String => "String",
        }
    }

    pub fn from_name(s: &str) -> Option<PrimType> {
        match s {
            "Double" => Some(PrimType::Double),
            "Int" => Some(PrimType::Int),
            "Bool" => Some(PrimType::Bool),
            "String" => Some(PrimType::String),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum TypeRef {
    Prim(PrimType),
    Named(String),
}

impl TypeRef {
    pub fn parse(s: &str) -> TypeRef {
        match PrimType::from_name(s) {
            Some(p) => TypeRef::Prim(p),
            None => TypeRef::Named(s.to_string()),
        }
    }

    pub fn name(&self) -> &str {
        match self {
            TypeRef::Prim(p) => p.name(),
            TypeRef::Named(n) => n,
        }
    }
}

impl fmt::Display for TypeRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// `Type name` pair used for parameters, method parameters and record fields.
#[derive(Debug, Clone, PartialEq)]
pub struct Param {
    pub ty: TypeRef,
    pub name: String,
    pub pos: SourcePos,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ModelAst {
    pub name: Ident,
    pub body: ModelBody,
    pub pos: SourcePos,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ModelBody {
    Domain(DomainModelAst),
    Action(ActionAst),
    Skill(NetAst),
    Task(NetAst),
    Process(NetAst),
}

impl ModelAst {
    pub fn kind(&self) -> ModelKind {
        match self.body {
            ModelBody::Domain(_) => ModelKind::DomainModel,
            ModelBody::Action(_) => ModelKind::Action,
            ModelBody::Skill(_) => ModelKind::Skill,
            ModelBody::Task(_) => ModelKind::Task,
            ModelBody::Process(_) => ModelKind::Process,
        }
    }

    pub fn name(&self) -> &str {
        &self.name.name
    }

    pub fn as_net(&self) -> Option<&NetAst> {
        match &self.body {
            ModelBody::Skill(n) | ModelBody::Task(n) | ModelBody::Process(n) => Some(n),
            _ => None,
        }
    }

    pub fn as_action(&self) -> Option<&ActionAst> {
        match &self.body {
            ModelBody::Action(a) => Some(a),
            _ => None,
        }
    }

    pub fn as_domain(&self) -> Option<&DomainModelAst> {
        match &self.body {
            ModelBody::Domain(d) => Some(d),
            _ => None,
        }
    }

    /// Parameters declared by an action or net; empty for domain models.
    pub fn params(&self) -> &[Param] {
        match &self.body {
            ModelBody::Domain(_) => &[],
            ModelBody::Action(a) => &a.params,
            ModelBody::Skill(n) | ModelBody::Task(n) | ModelBody::Process(n) => &n.params,
        }
    }

    /// Outcomes this model can signal to its parent: exit-rule outcomes for
    /// actions, `end` targets for nets. First-occurrence order, deduplicated.
    pub fn outcomes(&self) -> Vec<&str> {
        fn push<'a>(s: &'a str, out: &mut Vec<&'a str>) {
            if !out.contains(&s) {
                out.push(s)
            }
        }
        let mut out: Vec<&str> = Vec::new();
        match &self.body {
            ModelBody::Domain(_) => {}
            ModelBody::Action(a) => {
                for r in &a.exit_rules {
                    push(&r.outcome.name, &mut out);
                }
            }
            ModelBody::Skill(n) | ModelBody::Task(n) | ModelBody::Process(n) => {
                for t in &n.transitions {
                    if let Target::End(o) = &t.target {
                        push(&o.name, &mut out);
                    }
                }
            }
        }
        out
    }

    /// Resets every position in the tree so two ASTs can be compared structurally.
    pub fn erase_positions(&mut self) {
        let z = SourcePos::unknown;
        self.pos = z();
        self.name.pos = z();
        match &mut self.body {
            ModelBody::Domain(d) => {
                for i in &mut d.interfaces {
                    i.pos = z();
                    i.name.pos = z();
                    for m in &mut i.methods {
                        m.pos = z();
                        m.name.pos = z();
                        m.params.iter_mut().for_each(|p| p.pos = z());
                    }
                }
                d.opaque_types.iter_mut().for_each(|t| t.pos = z());
                for r in &mut d.records {
                    r.pos = z();
                    r.name.pos = z();
                    r.fields.iter_mut().for_each(|p| p.pos = z());
                }
            }
            ModelBody::Action(a) => {
                a.params.iter_mut().for_each(|p| p.pos = z());
                let c = &mut a.execution;
                c.pos = z();
                c.receiver.pos = z();
                c.method.pos = z();
                c.args.iter_mut().for_each(Expr::erase_positions);
                a.entry_rules.iter_mut().for_each(Expr::erase_positions);
                for r in &mut a.exit_rules {
                    r.pos = z();
                    r.outcome.pos = z();
                    r.condition.erase_positions();
                }
            }
            ModelBody::Skill(n) | ModelBody::Task(n) | ModelBody::Process(n) => {
                n.params.iter_mut().for_each(|p| p.pos = z());
                for node in &mut n.nodes {
                    node.pos = z();
                    node.name.pos = z();
                    node.model.pos = z();
                }
                n.initial.pos = z();
                n.initial.node.pos = z();
                n.initial
                    .bindings
                    .iter_mut()
                    .for_each(Binding::erase_positions);
                for t in &mut n.transitions {
                    t.pos = z();
                    t.source.pos = z();
                    t.outcome.pos = z();
                    if let Some(g) = &mut t.guard {
                        g.erase_positions();
                    }
                    match &mut t.target {
                        Target::Node { node, bindings } => {
                            node.pos = z();
                            bindings.iter_mut().for_each(Binding::erase_positions);
                        }
                        Target::End(o) => o.pos = z(),
                    }
                }
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum DomainRole {
    #[default]
    DomainTypes,
    RobotInterface,
}

impl DomainRole {
    pub fn keyword(self) -> &'static str {
        match self {
            DomainRole::DomainTypes => "types",
            DomainRole::RobotInterface => "robotapi",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct DomainModelAst {
    pub role: DomainRole,
    pub interfaces: Vec<InterfaceDecl>,
    pub opaque_types: Vec<Ident>,
    pub records: Vec<RecordDecl>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct InterfaceDecl {
    pub name: Ident,
    pub methods: Vec<MethodDecl>,
    pub pos: SourcePos,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MethodDecl {
    /// `None` is `void`.
    pub ret: Option<TypeRef>,
    pub name: Ident,
    pub params: Vec<Param>,
    pub pos: SourcePos,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RecordDecl {
    pub name: Ident,
    pub fields: Vec<Param>,
    pub pos: SourcePos,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ActionAst {
    pub params: Vec<Param>,
    pub execution: ApiCall,
    pub entry_rules: Vec<Expr>,
    pub exit_rules: Vec<ExitRule>,
}

/// `receiver.method(args)`: the single robot-API call of an action.
#[derive(Debug, Clone, PartialEq)]
pub struct ApiCall {
    pub receiver: Ident,
    pub method: Ident,
    pub args: Vec<Expr>,
    pub pos: SourcePos,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExitRule {
    pub condition: Expr,
    pub outcome: Ident,
    pub pos: SourcePos,
}

/// Payload shared by skills, tasks and processes.
#[derive(Debug, Clone, PartialEq)]
pub struct NetAst {
    pub params: Vec<Param>,
    pub nodes: Vec<NodeDecl>,
    pub initial: Initial,
    pub transitions: Vec<TransitionAst>,
}

impl NetAst {
    pub fn node(&self, name: &str) -> Option<&NodeDecl> {
        self.nodes.iter().find(|n| n.name.name == name)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NodeDecl {
    pub name: Ident,
    pub model: Ident,
    pub pos: SourcePos,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Initial {
    pub node: Ident,
    pub bindings: Vec<Binding>,
    pub pos: SourcePos,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Binding {
    pub param: Ident,
    pub value: Expr,
}

impl Binding {
    fn erase_positions(&mut self) {
        self.param.pos = SourcePos::unknown();
        self.value.erase_positions();
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TransitionAst {
    pub source: Ident,
    pub outcome: Ident,
    pub guard: Option<Expr>,
    pub target: Target,
    pub pos: SourcePos,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Target {
    Node { node: Ident, bindings: Vec<Binding> },
    End(Ident),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum UnaryOp {
    Not,
    Neg,
}

impl UnaryOp {
    pub fn symbol(self) -> &'static str {
        match self {
            UnaryOp::Not => "!",
            UnaryOp::Neg => "-",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BinaryOp {
    Mul,
    Div,
    Add,
    Sub,
    Lt,
    Le,
    Gt,
    Ge,
    Eq,
    Ne,
    And,
    Or,
}

impl BinaryOp {
    pub fn symbol(self) -> &'static str {
        match self {
            BinaryOp::Mul => "*",
            BinaryOp::Div => "/",
            BinaryOp::Add => "+",
            BinaryOp::Sub => "-",
            BinaryOp::Lt => "<",
            BinaryOp::Le => "<=",
            BinaryOp::Gt => ">",
            BinaryOp::Ge => ">=",
            BinaryOp::Eq => "==",
            BinaryOp::Ne => "!=",
            BinaryOp::And => "&&",
            BinaryOp::Or => "||",
        }
    }

    /// Binding strength; higher binds tighter. Unary operators sit above all of these.
    pub fn precedence(self) -> u8 {
        match self {
            BinaryOp::Mul | BinaryOp::Div => 5,
            BinaryOp::Add | BinaryOp::Sub => 4,
            BinaryOp::Lt
            | BinaryOp::Le
            | BinaryOp::Gt
            | BinaryOp::Ge
            | BinaryOp::Eq
            | BinaryOp::Ne => 3,
            BinaryOp::And => 2,
            BinaryOp::Or => 1,
        }
    }

    pub fn is_comparison(self) -> bool {
        self.precedence() == 3
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Expr {
    pub kind: ExprKind,
    pub pos: SourcePos,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ExprKind {
    Bool(bool),
    Int(i64),
    Double(f64),
    Str(String),
    /// A parameter of the enclosing model.
    Param(String),
    /// `result.<field>`: a field of the execution call's return record.
    ResultField(String),
    Unary(UnaryOp, Box<Expr>),
    Binary(BinaryOp, Box<Expr>, Box<Expr>),
}

impl Expr {
    pub fn new(kind: ExprKind, pos: SourcePos) -> Self {
        Expr { kind, pos }
    }

    pub fn erase_positions(&mut self) {
        self.pos = SourcePos::unknown();
        match &mut self.kind {
            ExprKind::Unary(_, e) => e.erase_positions(),
            ExprKind::Binary(_, l, r) => {
                l.erase_positions();
                r.erase_positions();
            }
            _ => {}
        }
    }

    /// Pre-order walk over every sub-expression, including `self`.
    pub fn walk<'a>(&'a self, f: &mut impl FnMut(&'a Expr)) {
        f(self);
        match &self.kind {
            ExprKind::Unary(_, e) => e.walk(f),
            ExprKind::Binary(_, l, r) => {
                l.walk(f);
                r.walk(f);
            }
            _ => {}
        }
    }
}
