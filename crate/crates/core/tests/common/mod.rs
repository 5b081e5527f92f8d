#![allow(dead_code)]

pub mod reach;

use std::path::PathBuf;

use lrkit::corpora::{corpus_names, load_corpus, Corpus, ScenarioEntry};
use lrkit::pipeline::{execute_scenario, interpret_scenario};
use lrkit::runtime::{serialize_trace, RunResult};
use lrkit::simworld::Scenario;
use lrkit::statechart::{flatten, to_statechart, FlatProgram};
use lrkit::symbols::LinkedWorkspace;

pub const CASE_STUDIES: [&str; 5] = [
    "single_chain",
    "screwing",
    "stacking",
    "plugging",
    "cleanup",
];

pub fn corpus(name: &str) -> Corpus {
    load_corpus(name).unwrap_or_else(|e| panic!("{name}: {e}"))
}

pub fn workspace(name: &str) -> LinkedWorkspace {
    corpus(name)
        .link()
        .unwrap_or_else(|d| panic!("{name}: {d:?}"))
}

/// Every bundled corpus that is not a well-formedness fixture.
pub fn clean_corpora() -> Vec<String> {
    corpus_names()
        .unwrap()
        .into_iter()
        .filter(|n| !n.starts_with("fixtures/"))
        .collect()
}

pub fn fixture_names() -> Vec<String> {
    corpus_names()
        .unwrap()
        .into_iter()
        .filter(|n| n.starts_with("fixtures/"))
        .collect()
}

pub fn corpora_dir() -> PathBuf {
    lrkit::corpora::corpora_root()
}

/// One (corpus, scenario) pair of the execution matrix.
pub struct Case {
    pub corpus: String,
    pub process: String,
    pub entry: ScenarioEntry,
    pub scenario: Scenario,
    pub ws: LinkedWorkspace,
}

impl Case {
    pub fn label(&self) -> String {
        format!("{}/{}", self.corpus, self.entry.file)
    }

    pub fn interpret(&self) -> RunResult {
        interpret_scenario(&self.ws, &self.process, &self.scenario, None)
            .unwrap()
            .result
    }

    pub fn program(&self) -> FlatProgram {
        flatten(&to_statechart(&self.ws, &self.process).unwrap())
    }

    /// Emits the program as `.lrf` text, reads it back and runs it.
    pub fn execute(&self) -> RunResult {
        let text = self.program().to_json();
        let prog = FlatProgram::from_json(&text).unwrap();
        execute_scenario(&prog, &self.scenario, None)
            .unwrap()
            .result
    }
}

pub fn trace_text(r: &RunResult) -> String {
    match r {
        Ok(t) => serialize_trace(t),
        Err(f) => serialize_trace(&f.trace),
    }
}

pub fn matrix() -> Vec<Case> {
    let mut out = Vec::new();
    for name in CASE_STUDIES {
        let c = corpus(name);
        let ws = c.link().unwrap();
        let process = c.manifest.process.clone().unwrap();
        for (entry, scenario) in &c.scenarios {
            out.push(Case {
                corpus: name.to_string(),
                process: process.clone(),
                entry: entry.clone(),
                scenario: scenario.clone(),
                ws: ws.clone(),
            });
        }
    }
    out
}
