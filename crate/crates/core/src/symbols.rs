//! Name resolution over a set of parsed models.
//!
//! There are no import statements: every model handed to [`link_workspace`]
//! is visible to every other one. Actions, skills, tasks and processes each
//! have their own namespace; all domain-model declarations share one global
//! type namespace.

use std::collections::{BTreeMap, BTreeSet};

use crate::diagnostic::{sort_diagnostics, Diagnostic, SourcePos};
use crate::syntax::{
    DomainRole, InterfaceDecl, MethodDecl, ModelAst, ModelKind, PrimType, RecordDecl, TypeRef,
};

#[derive(Debug, Clone, PartialEq)]
pub enum TypeDescriptor {
    Primitive(PrimType),
    Opaque {
        domain: String,
    },
    Record {
        domain: String,
        decl: RecordDecl,
    },
    Interface {
        domain: String,
        role: DomainRole,
        decl: InterfaceDecl,
    },
}

impl TypeDescriptor {
    pub fn is_interface(&self) -> bool {
        matches!(self, TypeDescriptor::Interface { .. })
    }

    pub fn as_record(&self) -> Option<&RecordDecl> {
        match self {
            TypeDescriptor::Record { decl, .. } => Some(decl),
            _ => None,
        }
    }

    pub fn as_interface(&self) -> Option<&InterfaceDecl> {
        match self {
            TypeDescriptor::Interface { decl, .. } => Some(decl),
            _ => None,
        }
    }
}

/// One net node and the model it instantiates.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct RefEdge {
    pub from_kind: ModelKind,
    pub from_model: String,
    pub node: String,
    pub to_kind: ModelKind,
    pub to_model: String,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct LinkedWorkspace {
    models: BTreeMap<ModelKind, BTreeMap<String, ModelAst>>,
    type_env: BTreeMap<String, TypeDescriptor>,
    ref_graph: Vec<RefEdge>,
    role_tags: BTreeMap<String, DomainRole>,
}

impl LinkedWorkspace {
    pub fn model(&self, kind: ModelKind, name: &str) -> Option<&ModelAst> {
        self.models.get(&kind)?.get(name)
    }

    /// Models of one kind in name order.
    pub fn models_of(&self, kind: ModelKind) -> impl Iterator<Item = &ModelAst> {
        self.models.get(&kind).into_iter().flat_map(|m| m.values())
    }

    /// All models, ordered by kind then name.
    pub fn all_models(&self) -> impl Iterator<Item = &ModelAst> {
        self.models.values().flat_map(|m| m.values())
    }

    pub fn type_env(&self) -> &BTreeMap<String, TypeDescriptor> {
        &self.type_env
    }

    pub fn lookup_type(&self, name: &str) -> Option<&TypeDescriptor> {
        self.type_env.get(name)
    }

    pub fn ref_graph(&self) -> &[RefEdge] {
        &self.ref_graph
    }

    pub fn role_tags(&self) -> &BTreeMap<String, DomainRole> {
        &self.role_tags
    }

    /// Resolves a node of net `net` (of kind `kind`) to the model it references.
    pub fn node_target(&self, kind: ModelKind, net: &str, node: &str) -> Option<&ModelAst> {
        let e = self
            .ref_graph
            .iter()
            .find(|e| e.from_kind == kind && e.from_model == net && e.node == node)?;
        self.model(e.to_kind, &e.to_model)
    }

    pub fn interface(&self, name: &str) -> Option<&InterfaceDecl> {
        self.type_env.get(name)?.as_interface()
    }

    pub fn record(&self, name: &str) -> Option<&RecordDecl> {
        self.type_env.get(name)?.as_record()
    }

    pub fn method(&self, interface: &str, method: &str) -> Option<&MethodDecl> {
        self.interface(interface)?
            .methods
            .iter()
            .find(|m| m.name.name == method)
    }

    pub fn is_empty(&self) -> bool {
        self.models.values().all(|m| m.is_empty())
    }
}

fn model_sort_key(m: &ModelAst) -> (ModelKind, &str, &SourcePos) {
    (m.kind(), m.name(), &m.pos)
}

/// Builds the symbol table. Unresolved names and duplicates are reported
/// as `LINK-UNRES` / `LINK-DUP`; any such error fails the link.
pub fn link_workspace(models: Vec<ModelAst>) -> Result<LinkedWorkspace, Vec<Diagnostic>> {
    let mut models = models;
    models.sort_by(|a, b| model_sort_key(a).cmp(&model_sort_key(b)));

    let mut diags = Vec::new();
    let mut ws = LinkedWorkspace::default();

    for p in [
        PrimType::Double,
        PrimType::Int,
        PrimType::Bool,
        PrimType::String,
    ] {
        ws.type_env
            .insert(p.name().to_string(), TypeDescriptor::Primitive(p));
    }

    let dup = |what: &str, name: &str, first: &SourcePos, second: &SourcePos| {
        Diagnostic::error(
            "LINK-DUP",
            second.clone(),
            format!("duplicate {what} `{name}`: declared at {first} and at {second}"),
        )
    };

    // Model namespaces.
    for m in models {
        let ns = ws.models.entry(m.kind()).or_default();
        if let Some(prev) = ns.get(m.name()) {
            let (first, second) = if prev.pos <= m.pos {
                (&prev.pos, &m.pos)
            } else {
                (&m.pos, &prev.pos)
            };
            diags.push(dup(&m.kind().to_string(), m.name(), first, second));
            continue;
        }
        ns.insert(m.name().to_string(), m);
    }

    // Type namespace; declaration positions are kept for duplicate reports.
    let mut type_pos: BTreeMap<String, SourcePos> = BTreeMap::new();
    let domains = ws
        .models
        .get(&ModelKind::DomainModel)
        .into_iter()
        .flat_map(|m| m.values());
    for dm in domains {
        let dom = dm.as_domain().expect("domain model");
        ws.role_tags.insert(dm.name().to_string(), dom.role);
        let mut decls: Vec<(String, SourcePos, TypeDescriptor)> = Vec::new();
        for t in &dom.opaque_types {
            decls.push((
                t.name.clone(),
                t.pos.clone(),
                TypeDescriptor::Opaque {
                    domain: dm.name().to_string(),
                },
            ));
        }
        for r in &dom.records {
            let mut seen: BTreeMap<&str, &SourcePos> = BTreeMap::new();
            for f in &r.fields {
                if let Some(prev) = seen.insert(&f.name, &f.pos) {
                    diags.push(dup("record field", &f.name, prev, &f.pos));
                }
            }
            decls.push((
                r.name.name.clone(),
                r.name.pos.clone(),
                TypeDescriptor::Record {
                    domain: dm.name().to_string(),
                    decl: r.clone(),
                },
            ));
        }
        for i in &dom.interfaces {
            let mut seen: BTreeMap<&str, &SourcePos> = BTreeMap::new();
            for m in &i.methods {
                if let Some(prev) = seen.insert(&m.name.name, &m.name.pos) {
                    diags.push(dup("method", &m.name.name, prev, &m.name.pos));
                }
            }
            decls.push((
                i.name.name.clone(),
                i.name.pos.clone(),
                TypeDescriptor::Interface {
                    domain: dm.name().to_string(),
                    role: dom.role,
                    decl: i.clone(),
                },
            ));
        }
        decls.sort_by(|a, b| a.1.cmp(&b.1));
        for (name, pos, desc) in decls {
            if PrimType::from_name(&name).is_some() {
                // lexer reserves these, unreachable from parsed input
                continue;
            }
            match type_pos.get(&name) {
                Some(prev) => diags.push(dup("type", &name, prev, &pos)),
                None => {
                    type_pos.insert(name.clone(), pos);
                    ws.type_env.insert(name, desc);
                }
            }
        }
    }

    // Type references.
    let check_type = |ty: &TypeRef, pos: &SourcePos, diags: &mut Vec<Diagnostic>| {
        if let TypeRef::Named(n) = ty {
            if !ws.type_env.contains_key(n) {
                diags.push(Diagnostic::error(
                    "LINK-UNRES",
                    pos.clone(),
                    format!("unknown type `{n}`"),
                ));
            }
        }
    };
    for m in ws.all_models() {
        for p in m.params() {
            check_type(&p.ty, &p.pos, &mut diags);
        }
        if let Some(dom) = m.as_domain() {
            for i in &dom.interfaces {
                for meth in &i.methods {
                    if let Some(ret) = &meth.ret {
                        check_type(ret, &meth.pos, &mut diags);
                    }
                    for p in &meth.params {
                        check_type(&p.ty, &p.pos, &mut diags);
                    }
                }
            }
        }
    }

    // Net nodes: expected namespace first, then any other so that level
    // violations stay visible to the well-formedness rules.
    let search_order = [
        ModelKind::Action,
        ModelKind::Skill,
        ModelKind::Task,
        ModelKind::Process,
    ];
    let mut edges = Vec::new();
    for m in ws.all_models() {
        let Some(net) = m.as_net() else { continue };
        let expected = m.kind().child_kind().expect("net kind");
        for node in &net.nodes {
            let target = std::iter::once(expected)
                .chain(search_order.into_iter().filter(|k| *k != expected))
                .find(|k| ws.model(*k, &node.model.name).is_some());
            match target {
                Some(k) => edges.push(RefEdge {
                    from_kind: m.kind(),
                    from_model: m.name().to_string(),
                    node: node.name.name.clone(),
                    to_kind: k,
                    to_model: node.model.name.clone(),
                }),
                None => diags.push(Diagnostic::error(
                    "LINK-UNRES",
                    node.model.pos.clone(),
                    format!(
                        "node `{}` references unknown model `{}`",
                        node.name.name, node.model.name
                    ),
                )),
            }
        }
    }
    edges.sort();
    // duplicate node names (WF01) would create ambiguous edges; keep the first
    edges.dedup_by(|a, b| {
        a.from_kind == b.from_kind && a.from_model == b.from_model && a.node == b.node
    });
    ws.ref_graph = edges;

    if diags.is_empty() {
        Ok(ws)
    } else {
        sort_diagnostics(&mut diags);
        Err(diags)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CorpusStats {
    pub processes: usize,
    pub tasks: usize,
    pub skills: usize,
    pub actions: usize,
    pub interfaces: usize,
    /// Distinct actions referenced by each skill.
    pub actions_per_skill: BTreeMap<String, usize>,
}

impl std::fmt::Display for CorpusStats {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "processes={} tasks={} skills={} actions={} interfaces={}",
            self.processes, self.tasks, self.skills, self.actions, self.interfaces
        )
    }
}

pub fn collect_stats(ws: &LinkedWorkspace) -> CorpusStats {
    let count = |k| ws.models_of(k).count();
    let mut actions_per_skill = BTreeMap::new();
    for skill in ws.models_of(ModelKind::Skill) {
        let distinct: BTreeSet<&str> = ws
            .ref_graph
            .iter()
            .filter(|e| {
                e.from_kind == ModelKind::Skill
                    && e.from_model == skill.name()
                    && e.to_kind == ModelKind::Action
            })
            .map(|e| e.to_model.as_str())
            .collect();
        actions_per_skill.insert(skill.name().to_string(), distinct.len());
    }
    CorpusStats {
        processes: count(ModelKind::Process),
        tasks: count(ModelKind::Task),
        skills: count(ModelKind::Skill),
        actions: count(ModelKind::Action),
        interfaces: ws.type_env.values().filter(|t| t.is_interface()).count(),
        actions_per_skill,
    }
}
