//! Brute-force outcome reachability computed from the AST, and a generator
//! of random well-formed workspaces.

use std::collections::{BTreeMap, BTreeSet};

use lrkit::statechart::{reachable_outcomes, StateKind, StatechartIr};
use lrkit::symbols::{link_workspace, LinkedWorkspace};
use lrkit::syntax::{parse_model, ModelAst, ModelKind, Target};
use lrkit::wellformed::check_all;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Outcomes a model can produce, from the AST alone: depth-first search over
/// nodes, every guard and exit rule assumed satisfiable.
struct Oracle<'a> {
    ws: &'a LinkedWorkspace,
    memo: BTreeMap<(ModelKind, String), BTreeSet<String>>,
}

impl<'a> Oracle<'a> {
    fn outcomes(&mut self, m: &'a ModelAst) -> BTreeSet<String> {
        let key = (m.kind(), m.name().to_string());
        if let Some(s) = self.memo.get(&key) {
            return s.clone();
        }
        let result = if let Some(a) = m.as_action() {
            a.exit_rules
                .iter()
                .map(|r| r.outcome.name.clone())
                .collect()
        } else {
            let net = m.as_net().unwrap();
            let mut seen = BTreeSet::new();
            let mut stack = vec![net.initial.node.name.as_str()];
            let mut ends = BTreeSet::new();
            while let Some(n) = stack.pop() {
                if !seen.insert(n) {
                    continue;
                }
                let child = self.ws.node_target(m.kind(), m.name(), n).unwrap();
                let outs = self.outcomes(child);
                for t in &net.transitions {
                    if t.source.name != n || !outs.contains(&t.outcome.name) {
                        continue;
                    }
                    match &t.target {
                        Target::Node { node, .. } => stack.push(&node.name),
                        Target::End(o) => {
                            ends.insert(o.name.clone());
                        }
                    }
                }
            }
            ends
        };
        self.memo.insert(key, result.clone());
        result
    }
}

/// The model instantiated by the composite at `path`.
pub fn model_at<'a>(ws: &'a LinkedWorkspace, path: &str) -> &'a ModelAst {
    let mut segs = path.split('/');
    let mut m = ws.model(ModelKind::Process, segs.next().unwrap()).unwrap();
    for s in segs {
        m = ws.node_target(m.kind(), m.name(), s).unwrap();
    }
    m
}

/// Number of composites compared, and how many of them have a declared
/// `end` outcome that cannot be reached.
pub fn compare(ws: &LinkedWorkspace, sc: &StatechartIr) -> (usize, usize) {
    let got = reachable_outcomes(sc);
    let mut oracle = Oracle {
        ws,
        memo: BTreeMap::new(),
    };
    let (mut n, mut partial) = (0, 0);
    for s in sc.states.iter().filter(|s| s.kind == StateKind::Composite) {
        let m = model_at(ws, &s.path);
        let want = oracle.outcomes(m);
        assert_eq!(
            got.get(&s.id).cloned().unwrap_or_default(),
            want,
            "{}",
            s.path
        );
        n += 1;
        if want.len() < m.outcomes().len() {
            partial += 1;
        }
    }
    (n, partial)
}

const DOMAIN: &str = "domainmodel Api robotapi { interface Tool { void close(); } }";

/// Transitions for one net: every (node, outcome) pair gets a transition
/// with probability 3/4; at least one goes to an `end`.
fn net_text(
    rng: &mut ChaCha8Rng,
    kind: &str,
    name: &str,
    children: &[(String, Vec<String>)],
) -> (String, Vec<String>) {
    let n = rng.gen_range(1..=6);
    let nodes: Vec<usize> = (0..n).map(|_| rng.gen_range(0..children.len())).collect();
    let mut trans = Vec::new();
    let mut ends = Vec::new();
    for (i, &c) in nodes.iter().enumerate() {
        for o in &children[c].1 {
            if rng.gen_ratio(1, 4) {
                continue;
            }
            let guard = if rng.gen_ratio(1, 5) {
                " when false"
            } else {
                ""
            };
            if rng.gen_ratio(1, 3) {
                let e = format!("e{}", rng.gen_range(0..3));
                trans.push(format!("n{i}.{o}{guard} -> end {e};"));
                ends.push(e);
            } else {
                trans.push(format!("n{i}.{o}{guard} -> n{};", rng.gen_range(0..n)));
            }
        }
    }
    if ends.is_empty() {
        trans.push(format!("n0.{} -> end e0;", children[nodes[0]].1[0]));
        ends.push("e0".into());
    }
    ends.sort();
    ends.dedup();
    let node_decls: String = nodes
        .iter()
        .enumerate()
        .map(|(i, &c)| format!("n{i}: {}; ", children[c].0))
        .collect();
    let text = format!(
        "{kind} {name} {{ parameters {{ Tool t; }} nodes {{ {node_decls}}} initial n0; transitions {{ {} }} }}",
        trans.join(" ")
    );
    (text, ends)
}

pub fn random_workspace(seed: u64) -> LinkedWorkspace {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut files = vec![("Api.dom".to_string(), DOMAIN.to_string())];
    let mut actions = Vec::new();
    for i in 0..3 {
        let k = rng.gen_range(1..=3);
        let outs: Vec<String> = (0..k).map(|j| format!("o{j}")).collect();
        let rules: String = outs.iter().map(|o| format!("true -> {o}; ")).collect();
        files.push((
            format!("A{i}.action"),
            format!("action A{i} {{ parameters {{ Tool t; }} execution {{ t.close() }} exit {{ {rules}}} }}"),
        ));
        actions.push((format!("A{i}"), outs));
    }
    let mut level = actions;
    for (kind, prefix, count) in [("skill", "S", 3), ("task", "T", 2), ("process", "P", 1)] {
        let mut next = Vec::new();
        for i in 0..count {
            let name = format!("{prefix}{i}");
            let (text, ends) = net_text(&mut rng, kind, &name, &level);
            files.push((format!("{name}.{kind}"), text));
            next.push((name, ends));
        }
        level = next;
    }
    let models = files
        .iter()
        .map(|(f, t)| parse_model(t, f).unwrap_or_else(|d| panic!("seed {seed}: {d:?}\n{t}")))
        .collect();
    let ws = link_workspace(models).unwrap();
    let errors: Vec<_> = check_all(&ws)
        .iter()
        .flat_map(|r| r.errors().cloned().collect::<Vec<_>>())
        .collect();
    assert!(errors.is_empty(), "seed {seed}: {errors:?}");
    ws
}
