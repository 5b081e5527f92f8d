//! Context conditions beyond the grammar, one function per rule.
//!
//! | rule | checks |
//! |------|--------|
//! | WF01 | node names unique per net |
//! | WF02 | transition sources, source outcomes and target nodes exist |
//! | WF03 | action execution: receiver is an interface parameter, method exists, arguments fit |
//! | WF04 | nets never reference the robot API (`result`) |
//! | WF05 | every parameter of every instantiated node is bound on each incoming edge |
//! | WF06 | expression typing |
//! | WF07 | the initial node exists |
//! | WF08 | every net has at least one `end` |
//! | WF09 | unreachable nodes (warning) |
//! | WF10 | level discipline: process > task > skill > action |
//! | WF11 | `robotapi` domain models contain only interfaces |
//! | WF12 | exit outcomes unique per action, exit block nonempty |
//! | WF13 | interface-typed parameters are bound only to same-typed parameters |

mod typing;

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use thiserror::Error;

use crate::diagnostic::{sort_diagnostics, Diagnostic, SourcePos};
use crate::symbols::LinkedWorkspace;
use crate::syntax::{
    Binding, DomainRole, Expr, ExprKind, ModelAst, ModelKind, NetAst, Param, Target,
};
pub use typing::{assignable, ResultScope, Typer};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RuleReport {
    pub rule_id: String,
    pub diagnostics: Vec<Diagnostic>,
}

impl RuleReport {
    pub fn errors(&self) -> impl Iterator<Item = &Diagnostic> {
        self.diagnostics.iter().filter(|d| d.is_error())
    }

    pub fn error_count(&self) -> usize {
        self.errors().count()
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
#[error("unknown rule `{0}`")]
pub struct UnknownRule(pub String);

type RuleFn = fn(&LinkedWorkspace) -> Vec<Diagnostic>;

const RULES: [(&str, RuleFn); 13] = [
    ("WF01", wf01_unique_nodes),
    ("WF02", wf02_transition_endpoints),
    ("WF03", wf03_execution_call),
    ("WF04", wf04_no_api_in_nets),
    ("WF05", wf05_binding_completeness),
    ("WF06", wf06_expression_types),
    ("WF07", wf07_initial_node),
    ("WF08", wf08_has_end),
    ("WF09", wf09_reachability),
    ("WF10", wf10_level_discipline),
    ("WF11", wf11_robotapi_interfaces_only),
    ("WF12", wf12_exit_outcomes),
    ("WF13", wf13_interface_bindings),
];

pub fn rule_ids() -> impl Iterator<Item = &'static str> {
    RULES.iter().map(|(id, _)| *id)
}

fn run(id: &str, f: RuleFn, ws: &LinkedWorkspace) -> RuleReport {
    let mut diagnostics = f(ws);
    debug_assert!(diagnostics.iter().all(|d| d.rule_id == id));
    sort_diagnostics(&mut diagnostics);
    RuleReport {
        rule_id: id.to_string(),
        diagnostics,
    }
}

/// Runs every rule; reports come back in rule-id order.
pub fn check_all(ws: &LinkedWorkspace) -> Vec<RuleReport> {
    RULES.iter().map(|(id, f)| run(id, *f, ws)).collect()
}

pub fn check_rule(ws: &LinkedWorkspace, rule_id: &str) -> Result<RuleReport, UnknownRule> {
    RULES
        .iter()
        .find(|(id, _)| *id == rule_id)
        .map(|(id, f)| run(id, *f, ws))
        .ok_or_else(|| UnknownRule(rule_id.to_string()))
}

/// Flattens reports into one sorted diagnostic list.
pub fn all_diagnostics(reports: &[RuleReport]) -> Vec<Diagnostic> {
    let mut v: Vec<Diagnostic> = reports
        .iter()
        .flat_map(|r| r.diagnostics.iter().cloned())
        .collect();
    sort_diagnostics(&mut v);
    v
}

fn nets(ws: &LinkedWorkspace) -> impl Iterator<Item = (&ModelAst, &NetAst)> {
    [ModelKind::Skill, ModelKind::Task, ModelKind::Process]
        .into_iter()
        .flat_map(|k| ws.models_of(k))
        .filter_map(|m| m.as_net().map(|n| (m, n)))
}

fn actions(ws: &LinkedWorkspace) -> impl Iterator<Item = &ModelAst> {
    ws.models_of(ModelKind::Action)
}

/// Every binding list of a net with the node it feeds: the initial edge first, then transitions.
fn incoming_edges(net: &NetAst) -> Vec<(&str, &[Binding], &SourcePos)> {
    let mut out = vec![(
        net.initial.node.name.as_str(),
        net.initial.bindings.as_slice(),
        &net.initial.pos,
    )];
    for t in &net.transitions {
        if let Target::Node { node, bindings } = &t.target {
            out.push((node.name.as_str(), bindings.as_slice(), &t.pos));
        }
    }
    out
}

fn wf01_unique_nodes(ws: &LinkedWorkspace) -> Vec<Diagnostic> {
    let mut out = Vec::new();
    for (m, net) in nets(ws) {
        let mut seen: BTreeMap<&str, &SourcePos> = BTreeMap::new();
        for n in &net.nodes {
            if let Some(prev) = seen.insert(&n.name.name, &n.pos) {
                out.push(Diagnostic::error(
                    "WF01",
                    n.pos.clone(),
                    format!(
                        "node `{}` of {} `{}` is already declared at {prev}",
                        n.name.name,
                        m.kind(),
                        m.name()
                    ),
                ));
            }
        }
    }
    out
}

fn wf02_transition_endpoints(ws: &LinkedWorkspace) -> Vec<Diagnostic> {
    let mut out = Vec::new();
    for (m, net) in nets(ws) {
        for t in &net.transitions {
            match net.node(&t.source.name) {
                None => out.push(Diagnostic::error(
                    "WF02",
                    t.source.pos.clone(),
                    format!(
                        "transition source `{}` is not a node of `{}`",
                        t.source.name,
                        m.name()
                    ),
                )),
                Some(_) => {
                    if let Some(target) = ws.node_target(m.kind(), m.name(), &t.source.name) {
                        if !target.outcomes().contains(&t.outcome.name.as_str()) {
                            out.push(Diagnostic::error(
                                "WF02",
                                t.outcome.pos.clone(),
                                format!(
                                    "{} `{}` has no outcome `{}`",
                                    target.kind(),
                                    target.name(),
                                    t.outcome.name
                                ),
                            ));
                        }
                    }
                }
            }
            if let Target::Node { node, .. } = &t.target {
                if net.node(&node.name).is_none() {
                    out.push(Diagnostic::error(
                        "WF02",
                        node.pos.clone(),
                        format!(
                            "transition target `{}` is not a node of `{}`",
                            node.name,
                            m.name()
                        ),
                    ));
                }
            }
        }
    }
    out
}

fn wf03_execution_call(ws: &LinkedWorkspace) -> Vec<Diagnostic> {
    let mut out = Vec::new();
    for m in actions(ws) {
        let a = m.as_action().expect("action");
        let call = &a.execution;
        let err = |pos: &SourcePos, msg: String| Diagnostic::error("WF03", pos.clone(), msg);
        let Some(receiver) = a.params.iter().find(|p| p.name == call.receiver.name) else {
            out.push(err(
                &call.receiver.pos,
                format!(
                    "receiver `{}` is not a parameter of `{}`",
                    call.receiver.name,
                    m.name()
                ),
            ));
            continue;
        };
        let Some(iface) = ws.interface(receiver.ty.name()) else {
            out.push(err(
                &call.receiver.pos,
                format!(
                    "receiver `{}` has type `{}`, which is not an interface",
                    receiver.name, receiver.ty
                ),
            ));
            continue;
        };
        let Some(method) = iface
            .methods
            .iter()
            .find(|x| x.name.name == call.method.name)
        else {
            out.push(err(
                &call.method.pos,
                format!(
                    "interface `{}` declares no method `{}`",
                    iface.name.name, call.method.name
                ),
            ));
            continue;
        };
        if method.params.len() != call.args.len() {
            out.push(err(
                &call.pos,
                format!(
                    "`{}.{}` takes {} argument(s) but {} were given",
                    iface.name.name,
                    method.name.name,
                    method.params.len(),
                    call.args.len()
                ),
            ));
            continue;
        }
        let mut typer = Typer::new(ws, &a.params, ResultScope::Ignored);
        for (arg, p) in call.args.iter().zip(&method.params) {
            if let Some(t) = typer.type_of(arg) {
                if !assignable(&t, &p.ty) {
                    out.push(err(
                        &arg.pos,
                        format!(
                            "argument `{}` of `{}.{}` expects `{}`, found `{t}`",
                            p.name, iface.name.name, method.name.name, p.ty
                        ),
                    ));
                }
            }
        }
    }
    out
}

fn net_expressions(net: &NetAst) -> Vec<&Expr> {
    let mut v: Vec<&Expr> = net.initial.bindings.iter().map(|b| &b.value).collect();
    for t in &net.transitions {
        v.extend(t.guard.iter());
        if let Target::Node { bindings, .. } = &t.target {
            v.extend(bindings.iter().map(|b| &b.value));
        }
    }
    v
}

fn wf04_no_api_in_nets(ws: &LinkedWorkspace) -> Vec<Diagnostic> {
    let mut out = Vec::new();
    for (m, net) in nets(ws) {
        for e in net_expressions(net) {
            e.walk(&mut |sub| {
                if let ExprKind::ResultField(f) = &sub.kind {
                    out.push(Diagnostic::error(
                        "WF04",
                        sub.pos.clone(),
                        format!(
                            "{} `{}` references the robot API through `result.{f}`; only actions may",
                            m.kind(),
                            m.name()
                        ),
                    ));
                }
            });
        }
    }
    out
}

fn duplicate_params(m: &ModelAst, out: &mut Vec<Diagnostic>) {
    let params = m.params();
    for (i, p) in params.iter().enumerate() {
        if params[..i].iter().any(|q| q.name == p.name) {
            out.push(Diagnostic::error(
                "WF05",
                p.pos.clone(),
                format!("parameter `{}` of `{}` is declared twice", p.name, m.name()),
            ));
        }
    }
}

fn wf05_binding_completeness(ws: &LinkedWorkspace) -> Vec<Diagnostic> {
    let mut out = Vec::new();
    for m in ws.all_models() {
        duplicate_params(m, &mut out);
    }
    for (m, net) in nets(ws) {
        for (node_name, bindings, edge_pos) in incoming_edges(net) {
            if net.node(node_name).is_none() {
                continue;
            }
            let Some(target) = ws.node_target(m.kind(), m.name(), node_name) else {
                continue;
            };
            for b in bindings {
                if !target.params().iter().any(|p| p.name == b.param.name) {
                    out.push(Diagnostic::error(
                        "WF05",
                        b.param.pos.clone(),
                        format!(
                            "{} `{}` has no parameter `{}`",
                            target.kind(),
                            target.name(),
                            b.param.name
                        ),
                    ));
                }
            }
            for p in target.params() {
                let explicit = bindings.iter().any(|b| b.param.name == p.name);
                let propagated = net.params.iter().any(|q| q.name == p.name && q.ty == p.ty);
                if !explicit && !propagated {
                    out.push(Diagnostic::error(
                        "WF05",
                        edge_pos.clone(),
                        format!(
                            "parameter `{} {}` of node `{node_name}` ({} `{}`) is neither bound here nor propagated from `{}`",
                            p.ty,
                            p.name,
                            target.kind(),
                            target.name(),
                            m.name()
                        ),
                    ));
                }
            }
        }
    }
    out
}

/// What `result` means in an action's exit rules: its call's return record,
/// forbidden when the call resolves to a non-record, unknown when it does not resolve.
fn result_record<'a>(ws: &'a LinkedWorkspace, m: &'a ModelAst) -> ResultScope<'a> {
    let a = m.as_action().expect("action");
    let call = &a.execution;
    let method = a
        .params
        .iter()
        .find(|p| p.name == call.receiver.name)
        .and_then(|p| ws.method(p.ty.name(), &call.method.name));
    let Some(method) = method else {
        return ResultScope::Available(None);
    };
    match method.ret.as_ref().and_then(|t| ws.record(t.name())) {
        Some(r) => ResultScope::Available(Some(r)),
        None => ResultScope::Forbidden,
    }
}

fn wf06_expression_types(ws: &LinkedWorkspace) -> Vec<Diagnostic> {
    let mut errors = Vec::new();
    for m in actions(ws) {
        let a = m.as_action().expect("action");
        let mut entry = Typer::new(ws, &a.params, ResultScope::Forbidden);
        for e in &a.entry_rules {
            entry.expect_bool(e, "entry rule");
        }
        errors.extend(entry.errors);
        let mut args = Typer::new(ws, &a.params, ResultScope::Forbidden);
        for e in &a.execution.args {
            args.type_of(e);
        }
        errors.extend(args.errors);
        let scope = result_record(ws, m);
        let mut exit = Typer::new(ws, &a.params, scope);
        for r in &a.exit_rules {
            exit.expect_bool(&r.condition, "exit rule");
        }
        errors.extend(exit.errors);
    }
    for (m, net) in nets(ws) {
        let mut typer = Typer::new(ws, &net.params, ResultScope::Ignored);
        for t in &net.transitions {
            if let Some(g) = &t.guard {
                typer.expect_bool(g, "guard");
            }
        }
        for (node_name, bindings, _) in incoming_edges(net) {
            let target = net
                .node(node_name)
                .and_then(|_| ws.node_target(m.kind(), m.name(), node_name));
            for b in bindings {
                let ty = typer.type_of(&b.value);
                let declared =
                    target.and_then(|tm| tm.params().iter().find(|p| p.name == b.param.name));
                if let (Some(ty), Some(p)) = (ty, declared) {
                    let is_interface = ws
                        .lookup_type(p.ty.name())
                        .is_some_and(|d| d.is_interface());
                    if !is_interface && !assignable(&ty, &p.ty) {
                        typer.errors.push(typing::TypeError {
                            pos: b.value.pos.clone(),
                            message: format!(
                                "binding `{}` expects `{}`, found `{ty}`",
                                b.param.name, p.ty
                            ),
                        });
                    }
                }
            }
        }
        errors.extend(typer.errors);
    }
    errors
        .into_iter()
        .map(|e| Diagnostic::error("WF06", e.pos, e.message))
        .collect()
}

fn wf07_initial_node(ws: &LinkedWorkspace) -> Vec<Diagnostic> {
    nets(ws)
        .filter(|(_, net)| net.node(&net.initial.node.name).is_none())
        .map(|(m, net)| {
            Diagnostic::error(
                "WF07",
                net.initial.node.pos.clone(),
                format!(
                    "initial node `{}` is not a node of `{}`",
                    net.initial.node.name,
                    m.name()
                ),
            )
        })
        .collect()
}

fn wf08_has_end(ws: &LinkedWorkspace) -> Vec<Diagnostic> {
    nets(ws)
        .filter(|(_, net)| {
            !net.transitions
                .iter()
                .any(|t| matches!(t.target, Target::End(_)))
        })
        .map(|(m, _)| {
            Diagnostic::error(
                "WF08",
                m.name.pos.clone(),
                format!("{} `{}` has no `end` transition", m.kind(), m.name()),
            )
        })
        .collect()
}

/// Nodes reachable from the initial node, following transitions regardless of guards.
pub fn reachable_nodes(net: &NetAst) -> BTreeSet<&str> {
    let mut seen = BTreeSet::new();
    if net.node(&net.initial.node.name).is_none() {
        return seen;
    }
    let mut queue = VecDeque::from([net.initial.node.name.as_str()]);
    while let Some(n) = queue.pop_front() {
        if !seen.insert(n) {
            continue;
        }
        for t in &net.transitions {
            if t.source.name == n {
                if let Target::Node { node, .. } = &t.target {
                    queue.push_back(&node.name);
                }
            }
        }
    }
    seen
}

fn wf09_reachability(ws: &LinkedWorkspace) -> Vec<Diagnostic> {
    let mut out = Vec::new();
    for (m, net) in nets(ws) {
        if net.node(&net.initial.node.name).is_none() {
            continue;
        }
        let reach = reachable_nodes(net);
        for n in &net.nodes {
            if !reach.contains(n.name.name.as_str()) {
                out.push(Diagnostic::warning(
                    "WF09",
                    n.pos.clone(),
                    format!("node `{}` of `{}` is unreachable", n.name.name, m.name()),
                ));
            }
        }
    }
    out
}

fn wf10_level_discipline(ws: &LinkedWorkspace) -> Vec<Diagnostic> {
    let mut out = Vec::new();
    for (m, net) in nets(ws) {
        let expected = m.kind().child_kind().expect("net");
        for n in &net.nodes {
            let Some(target) = ws.node_target(m.kind(), m.name(), &n.name.name) else {
                continue;
            };
            if target.kind() != expected {
                out.push(Diagnostic::error(
                    "WF10",
                    n.model.pos.clone(),
                    format!(
                        "{} `{}` may only contain {} nodes, but `{}` is a {}",
                        m.kind(),
                        m.name(),
                        expected,
                        target.name(),
                        target.kind()
                    ),
                ));
            }
        }
    }
    out
}

fn wf11_robotapi_interfaces_only(ws: &LinkedWorkspace) -> Vec<Diagnostic> {
    let mut out = Vec::new();
    for m in ws.models_of(ModelKind::DomainModel) {
        let d = m.as_domain().expect("domain");
        if d.role != DomainRole::RobotInterface {
            continue;
        }
        for t in &d.opaque_types {
            out.push(Diagnostic::error(
                "WF11",
                t.pos.clone(),
                format!(
                    "robot API model `{}` may only declare interfaces, found type `{}`",
                    m.name(),
                    t.name
                ),
            ));
        }
        for r in &d.records {
            out.push(Diagnostic::error(
                "WF11",
                r.pos.clone(),
                format!(
                    "robot API model `{}` may only declare interfaces, found record `{}`",
                    m.name(),
                    r.name.name
                ),
            ));
        }
    }
    out
}

fn wf12_exit_outcomes(ws: &LinkedWorkspace) -> Vec<Diagnostic> {
    let mut out = Vec::new();
    for m in actions(ws) {
        let a = m.as_action().expect("action");
        if a.exit_rules.is_empty() {
            out.push(Diagnostic::error(
                "WF12",
                m.name.pos.clone(),
                format!("action `{}` has no exit rules", m.name()),
            ));
        }
        for (i, r) in a.exit_rules.iter().enumerate() {
            if a.exit_rules[..i]
                .iter()
                .any(|p| p.outcome.name == r.outcome.name)
            {
                out.push(Diagnostic::error(
                    "WF12",
                    r.outcome.pos.clone(),
                    format!(
                        "outcome `{}` of action `{}` is used by more than one exit rule",
                        r.outcome.name,
                        m.name()
                    ),
                ));
            }
        }
    }
    out
}

fn wf13_interface_bindings(ws: &LinkedWorkspace) -> Vec<Diagnostic> {
    let mut out = Vec::new();
    for (m, net) in nets(ws) {
        for (node_name, bindings, _) in incoming_edges(net) {
            if net.node(node_name).is_none() {
                continue;
            }
            let Some(target) = ws.node_target(m.kind(), m.name(), node_name) else {
                continue;
            };
            for b in bindings {
                let Some(p) = target.params().iter().find(|p| p.name == b.param.name) else {
                    continue;
                };
                if !ws
                    .lookup_type(p.ty.name())
                    .is_some_and(|d| d.is_interface())
                {
                    continue;
                }
                let ok = match &b.value.kind {
                    ExprKind::Param(name) => {
                        match net.params.iter().find(|q: &&Param| &q.name == name) {
                            Some(q) => q.ty == p.ty,
                            // unknown names are a typing error
                            None => true,
                        }
                    }
                    _ => false,
                };
                if !ok {
                    out.push(Diagnostic::error(
                        "WF13",
                        b.value.pos.clone(),
                        format!(
                            "interface parameter `{} {}` must be bound to a parameter of type `{}`",
                            p.ty, p.name, p.ty
                        ),
                    ));
                }
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symbols::link_workspace;
    use crate::syntax::parse_model;

    const API: &str = "domainmodel Api robotapi { \
        interface Tool { void close(); void open(); } \
        interface Arm { Motion rotate(Frame f, Double maxTorque); Frame here(); } }";
    const TYPES: &str =
        "domainmodel Types types { type Frame; record Motion { Double torque; Bool displaced; } }";

    fn ws(extra: &[(&str, &str)]) -> LinkedWorkspace {
        let mut models = vec![
            parse_model(API, "Api.dom").unwrap(),
            parse_model(TYPES, "Types.dom").unwrap(),
        ];
        for (f, t) in extra {
            models.push(parse_model(t, f).unwrap_or_else(|d| panic!("{d:?}")));
        }
        link_workspace(models).unwrap_or_else(|d| panic!("{d:?}"))
    }

    fn errors_by_rule(ws: &LinkedWorkspace) -> BTreeMap<String, usize> {
        check_all(ws)
            .into_iter()
            .map(|r| (r.rule_id.clone(), r.error_count()))
            .filter(|(_, n)| *n > 0)
            .collect()
    }

    const CLOSE: (&str, &str) = (
        "Close.action",
        "action Close { parameters { Tool t; } execution { t.close() } exit { true -> closed; } }",
    );
    const SPIN: (&str, &str) = (
        "Spin.action",
        "action Spin { parameters { Arm a; Frame f; Double maxTorque; } \
         execution { a.rotate(f, maxTorque) } entry { maxTorque > 0.0; } \
         exit { result.displaced -> displaced; result.torque >= maxTorque -> tightened; true -> turned; } }",
    );

    #[test]
    fn clean_models_have_no_findings() {
        let w = ws(&[
            CLOSE,
            SPIN,
            (
                "S.skill",
                "skill S { parameters { Tool t; Arm a; Frame f; Double maxTorque; } \
                 nodes { c: Close; s: Spin; } initial c; \
                 transitions { c.closed -> s; s.turned when maxTorque > 1.0 -> c; \
                 s.turned -> end failed; s.tightened -> end done; s.displaced -> end failed; } }",
            ),
        ]);
        let reports = check_all(&w);
        assert_eq!(reports.len(), 13);
        assert!(
            reports.iter().all(|r| r.diagnostics.is_empty()),
            "{reports:?}"
        );
    }

    #[test]
    fn arity_mismatch_is_one_wf03() {
        let w = ws(&[(
            "Close.action",
            "action Close { parameters { Tool t; } execution { t.close(1.0) } exit { true -> closed; } }",
        )]);
        assert_eq!(
            errors_by_rule(&w),
            BTreeMap::from([("WF03".to_string(), 1)])
        );
        assert_eq!(check_rule(&w, "WF03").unwrap().error_count(), 1);
    }

    #[test]
    fn result_in_a_net_is_wf04_only() {
        let w = ws(&[
            CLOSE,
            (
                "S.skill",
                "skill S { parameters { Tool t; } nodes { c: Close; } initial c; \
                 transitions { c.closed when result.torque > 1.0 -> end done; c.closed -> end done; } }",
            ),
        ]);
        assert_eq!(
            errors_by_rule(&w),
            BTreeMap::from([("WF04".to_string(), 1)])
        );
    }

    #[test]
    fn skill_in_skill_is_wf10() {
        let w = ws(&[
            CLOSE,
            (
                "Inner.skill",
                "skill Inner { parameters { Tool t; } nodes { c: Close; } initial c; \
                 transitions { c.closed -> end done; } }",
            ),
            (
                "Outer.skill",
                "skill Outer { parameters { Tool t; } nodes { i: Inner; } initial i; \
                 transitions { i.done -> end done; } }",
            ),
        ]);
        assert_eq!(
            errors_by_rule(&w),
            BTreeMap::from([("WF10".to_string(), 1)])
        );
    }

    #[test]
    fn unknown_rule() {
        let w = ws(&[]);
        assert_eq!(check_rule(&w, "WF99"), Err(UnknownRule("WF99".into())));
        assert!(check_rule(&w, "WF04").unwrap().diagnostics.is_empty());
    }

    #[test]
    fn missing_binding_is_wf05_and_explicit_binding_satisfies_it() {
        let skill = |init: &str| {
            format!(
                "skill S {{ parameters {{ Arm a; Frame f; }} nodes {{ s: Spin; }} initial s{init}; \
                 transitions {{ s.turned -> end x; s.tightened -> end y; s.displaced -> end z; }} }}"
            )
        };
        let bad = skill("");
        let w = ws(&[SPIN, ("S.skill", &bad)]);
        assert_eq!(
            errors_by_rule(&w),
            BTreeMap::from([("WF05".to_string(), 1)])
        );
        let good = skill(" with (maxTorque = 2)");
        let w = ws(&[SPIN, ("S.skill", &good)]);
        assert!(errors_by_rule(&w).is_empty());
    }

    #[test]
    fn propagation_requires_matching_type() {
        let s = "skill S { parameters { Arm a; Frame f; Int maxTorque; } nodes { s: Spin; } initial s; \
                 transitions { s.turned -> end x; s.tightened -> end y; s.displaced -> end z; } }";
        let w = ws(&[SPIN, ("S.skill", s)]);
        assert_eq!(
            errors_by_rule(&w),
            BTreeMap::from([("WF05".to_string(), 1)])
        );
    }

    #[test]
    fn typing_errors_are_wf06() {
        let w = ws(&[(
            "Bad.action",
            "action Bad { parameters { Arm a; Frame f; Double m; } execution { a.rotate(f, m) } \
             entry { result.torque > 0.0; m; } exit { result.nope -> x; result.torque + 1.0 -> y; q -> z; } }",
        )]);
        let r = check_rule(&w, "WF06").unwrap();
        // result in entry, non-Bool entry, unknown field, non-Bool exit, unknown name
        assert_eq!(r.error_count(), 5, "{r:?}");
        assert_eq!(errors_by_rule(&w).len(), 1);
    }

    #[test]
    fn void_method_has_no_result() {
        let w = ws(&[(
            "C.action",
            "action C { parameters { Tool t; } execution { t.close() } exit { result.torque > 1.0 -> x; } }",
        )]);
        assert_eq!(
            errors_by_rule(&w),
            BTreeMap::from([("WF06".to_string(), 1)])
        );
    }

    #[test]
    fn interface_binding_must_be_same_typed_param() {
        let s = |v: &str| {
            format!(
                "skill S {{ parameters {{ Tool t; Arm a; }} nodes {{ c: Close; }} initial c with (t = {v}); \
                 transitions {{ c.closed -> end done; }} }}"
            )
        };
        for bad in ["1.0", "a"] {
            let text = s(bad);
            let w = ws(&[CLOSE, ("S.skill", &text)]);
            assert_eq!(
                errors_by_rule(&w),
                BTreeMap::from([("WF13".to_string(), 1)]),
                "{bad}"
            );
        }
        let text = s("t");
        assert!(errors_by_rule(&ws(&[CLOSE, ("S.skill", &text)])).is_empty());
    }

    #[test]
    fn unreachable_node_is_only_a_warning() {
        let w = ws(&[
            CLOSE,
            (
                "S.skill",
                "skill S { parameters { Tool t; } nodes { c: Close; d: Close; } initial c; \
                 transitions { c.closed -> end done; d.closed -> end done; } }",
            ),
        ]);
        assert!(errors_by_rule(&w).is_empty());
        let r = check_rule(&w, "WF09").unwrap();
        assert_eq!(r.diagnostics.len(), 1);
        assert_eq!(r.diagnostics[0].severity, crate::Severity::Warning);
    }

    #[test]
    fn robotapi_with_a_record_is_wf11() {
        let mut models = vec![parse_model(
            "domainmodel Api robotapi { type Frame; interface Tool { void close(); } }",
            "Api.dom",
        )
        .unwrap()];
        models.push(parse_model(CLOSE.1, CLOSE.0).unwrap());
        let w = link_workspace(models).unwrap();
        assert_eq!(
            errors_by_rule(&w),
            BTreeMap::from([("WF11".to_string(), 1)])
        );
    }

    #[test]
    fn idempotent() {
        let w = ws(&[CLOSE, SPIN]);
        assert_eq!(check_all(&w), check_all(&w));
    }
}
