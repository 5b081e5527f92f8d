//! Canonical pretty-printer. Output re-parses to an AST equal to the input
//! (positions aside); four-space indentation, one declaration per line.

use std::fmt::Write;

use super::ast::*;

const INDENT: &str = "    ";

pub fn pretty_print(model: &ModelAst) -> String {
    let mut out = String::new();
    match &model.body {
        ModelBody::Domain(d) => print_domain(&mut out, model.name(), d),
        ModelBody::Action(a) => print_action(&mut out, model.name(), a),
        ModelBody::Skill(n) | ModelBody::Task(n) | ModelBody::Process(n) => {
            print_net(&mut out, model.kind().keyword(), model.name(), n)
        }
    }
    out
}

fn line(out: &mut String, depth: usize, text: &str) {
    for _ in 0..depth {
        out.push_str(INDENT);
    }
    out.push_str(text);
    out.push('\n');
}

fn block<T>(out: &mut String, depth: usize, head: &str, items: &[T], item: impl Fn(&T) -> String) {
    if items.is_empty() {
        line(out, depth, &format!("{head} {{ }}"));
        return;
    }
    line(out, depth, &format!("{head} {{"));
    for it in items {
        line(out, depth + 1, &item(it));
    }
    line(out, depth, "}");
}

fn typed(p: &Param) -> String {
    format!("{} {}", p.ty, p.name)
}

fn print_domain(out: &mut String, name: &str, d: &DomainModelAst) {
    line(
        out,
        0,
        &format!("domainmodel {name} {} {{", d.role.keyword()),
    );
    for t in &d.opaque_types {
        line(out, 1, &format!("type {};", t.name));
    }
    for r in &d.records {
        block(out, 1, &format!("record {}", r.name.name), &r.fields, |f| {
            format!("{};", typed(f))
        });
    }
    for i in &d.interfaces {
        block(
            out,
            1,
            &format!("interface {}", i.name.name),
            &i.methods,
            |m| {
                let ret = m.ret.as_ref().map_or("void".to_string(), |t| t.to_string());
                let params: Vec<String> = m.params.iter().map(typed).collect();
                format!("{ret} {}({});", m.name.name, params.join(", "))
            },
        );
    }
    line(out, 0, "}");
}

fn print_action(out: &mut String, name: &str, a: &ActionAst) {
    line(out, 0, &format!("action {name} {{"));
    block(out, 1, "parameters", &a.params, |p| {
        format!("{};", typed(p))
    });
    line(out, 1, "execution {");
    let c = &a.execution;
    let args: Vec<String> = c.args.iter().map(print_expr).collect();
    line(
        out,
        2,
        &format!("{}.{}({})", c.receiver.name, c.method.name, args.join(", ")),
    );
    line(out, 1, "}");
    if !a.entry_rules.is_empty() {
        block(out, 1, "entry", &a.entry_rules, |e| {
            format!("{};", print_expr(e))
        });
    }
    block(out, 1, "exit", &a.exit_rules, |r| {
        format!("{} -> {};", print_expr(&r.condition), r.outcome.name)
    });
    line(out, 0, "}");
}

fn bindings(bs: &[Binding]) -> String {
    if bs.is_empty() {
        return String::new();
    }
    let parts: Vec<String> = bs
        .iter()
        .map(|b| format!("{} = {}", b.param.name, print_expr(&b.value)))
        .collect();
    format!(" with ({})", parts.join(", "))
}

fn print_net(out: &mut String, keyword: &str, name: &str, n: &NetAst) {
    line(out, 0, &format!("{keyword} {name} {{"));
    block(out, 1, "parameters", &n.params, |p| {
        format!("{};", typed(p))
    });
    block(out, 1, "nodes", &n.nodes, |nd| {
        format!("{}: {};", nd.name.name, nd.model.name)
    });
    line(
        out,
        1,
        &format!(
            "initial {}{};",
            n.initial.node.name,
            bindings(&n.initial.bindings)
        ),
    );
    block(out, 1, "transitions", &n.transitions, |t| {
        let mut s = format!("{}.{}", t.source.name, t.outcome.name);
        if let Some(g) = &t.guard {
            let _ = write!(s, " when {}", print_expr(g));
        }
        match &t.target {
            Target::Node { node, bindings: bs } => {
                let _ = write!(s, " -> {}{};", node.name, bindings(bs));
            }
            Target::End(o) => {
                let _ = write!(s, " -> end {};", o.name);
            }
        }
        s
    });
    line(out, 0, "}");
}

/// Renders a double so that it lexes back as a Double literal: always a dot, never an exponent.
pub fn format_double(v: f64) -> String {
    let s = format!("{v}");
    if s.contains('.') || !v.is_finite() {
        s
    } else {
        format!("{s}.0")
    }
}

fn escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\t' => out.push_str("\\t"),
            c => out.push(c),
        }
    }
    out.push('"');
    out
}

/// Prints an expression with the minimum parentheses needed to re-parse to the same tree.
pub fn print_expr(e: &Expr) -> String {
    match &e.kind {
        ExprKind::Bool(b) => b.to_string(),
        ExprKind::Int(i) => i.to_string(),
        ExprKind::Double(d) => format_double(*d),
        ExprKind::Str(s) => escape(s),
        ExprKind::Param(p) => p.clone(),
        ExprKind::ResultField(f) => format!("result.{f}"),
        ExprKind::Unary(op, inner) => {
            let s = print_expr(inner);
            if matches!(inner.kind, ExprKind::Binary(..)) {
                format!("{}({s})", op.symbol())
            } else {
                format!("{}{s}", op.symbol())
            }
        }
        ExprKind::Binary(op, l, r) => {
            let prec = op.precedence();
            let side = |x: &Expr, strict: bool| {
                let s = print_expr(x);
                match &x.kind {
                    ExprKind::Binary(inner, ..)
                        if inner.precedence() < prec || (strict && inner.precedence() == prec) =>
                    {
                        format!("({s})")
                    }
                    _ => s,
                }
            };
            format!("{} {} {}", side(l, false), op.symbol(), side(r, true))
        }
    }
}
