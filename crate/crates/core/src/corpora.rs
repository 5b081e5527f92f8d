//! Loading model directories and the bundled corpora.
//!
//! A model path is a list of directories, each scanned non-recursively for
//! `.dom`, `.action`, `.skill`, `.task` and `.process` files in
//! lexicographic order. A corpus is a directory under `corpora/` with a
//! `manifest.json` describing its files, expected statistics and scenarios.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::diagnostic::{sort_diagnostics, Diagnostic, SourcePos};
use crate::simworld::{load_scenario, Scenario, ScenarioError};
use crate::symbols::{link_workspace, CorpusStats, LinkedWorkspace};
use crate::syntax::{parse_model_bytes, ModelAst, ModelKind};

fn io_diag(path: &Path, e: impl std::fmt::Display) -> Diagnostic {
    Diagnostic::error(
        "IO",
        SourcePos::new(path.display().to_string(), 1, 1),
        e.to_string(),
    )
}

/// Model files directly inside `dir`, sorted by file name.
pub fn model_files(dir: &Path) -> Result<Vec<PathBuf>, Diagnostic> {
    let entries = fs::read_dir(dir).map_err(|e| io_diag(dir, e))?;
    let mut files = Vec::new();
    for entry in entries {
        let path = entry.map_err(|e| io_diag(dir, e))?.path();
        let ext = path.extension().and_then(|e| e.to_str()).unwrap_or("");
        if path.is_file() && ModelKind::from_extension(ext).is_some() {
            files.push(path);
        }
    }
    files.sort();
    Ok(files)
}

/// Parses every model file on the model path. All parse diagnostics are
/// collected before giving up.
pub fn load_model_path<P: AsRef<Path>>(dirs: &[P]) -> Result<Vec<ModelAst>, Vec<Diagnostic>> {
    let mut models = Vec::new();
    let mut diags = Vec::new();
    for dir in dirs {
        let files = match model_files(dir.as_ref()) {
            Ok(f) => f,
            Err(d) => {
                diags.push(d);
                continue;
            }
        };
        for path in files {
            let name = path.display().to_string();
            match fs::read(&path) {
                Ok(bytes) => match parse_model_bytes(&bytes, &name) {
                    Ok(m) => models.push(m),
                    Err(ds) => diags.extend(ds),
                },
                Err(e) => diags.push(io_diag(&path, e)),
            }
        }
    }
    if diags.is_empty() {
        Ok(models)
    } else {
        sort_diagnostics(&mut diags);
        Err(diags)
    }
}

/// Loads and links the model path.
pub fn load_workspace<P: AsRef<Path>>(dirs: &[P]) -> Result<LinkedWorkspace, Vec<Diagnostic>> {
    link_workspace(load_model_path(dirs)?)
}

/// Lowercase hex SHA-256 of a serialized trace.
pub fn trace_digest(trace_text: &str) -> String {
    hex::encode(Sha256::digest(trace_text.as_bytes()))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExpectedStats {
    pub processes: usize,
    pub tasks: usize,
    pub skills: usize,
    pub actions: usize,
    pub interfaces: usize,
}

impl ExpectedStats {
    pub fn matches(&self, s: &CorpusStats) -> bool {
        (
            self.processes,
            self.tasks,
            self.skills,
            self.actions,
            self.interfaces,
        ) == (s.processes, s.tasks, s.skills, s.actions, s.interfaces)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "camelCase")]
pub struct ScenarioEntry {
    pub file: String,
    /// Final outcome of a successful run.
    #[serde(default)]
    pub outcome: Option<String>,
    /// Name of the runtime error variant a failing run must end with.
    #[serde(default)]
    pub error: Option<String>,
    /// Hand-written expected trace, relative to the corpus directory.
    #[serde(default)]
    pub golden: Option<String>,
    /// SHA-256 of the serialized trace, pinned to catch regressions.
    #[serde(default)]
    pub trace_digest: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "camelCase")]
pub struct CorpusManifest {
    pub name: String,
    #[serde(default)]
    pub description: String,
    pub files: Vec<String>,
    #[serde(default)]
    pub stats: Option<ExpectedStats>,
    #[serde(default)]
    pub process: Option<String>,
    #[serde(default)]
    pub scenarios: Vec<ScenarioEntry>,
    /// For well-formedness fixtures: the only rule that may report errors.
    #[serde(default)]
    pub expected_rule: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Deserialize)]
#[serde(deny_unknown_fields)]
struct Index {
    corpora: Vec<String>,
}

#[derive(Debug)]
pub struct Corpus {
    pub dir: PathBuf,
    pub manifest: CorpusManifest,
    pub models: Vec<ModelAst>,
    pub scenarios: Vec<(ScenarioEntry, Scenario)>,
}

impl Corpus {
    pub fn link(&self) -> Result<LinkedWorkspace, Vec<Diagnostic>> {
        link_workspace(self.models.clone())
    }

    pub fn scenario(&self, file: &str) -> Option<&Scenario> {
        self.scenarios
            .iter()
            .find(|(e, _)| e.file == file)
            .map(|(_, s)| s)
    }
}

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("unknown corpus `{0}`")]
    UnknownCorpus(String),
    #[error("{path}: {message}")]
    Io { path: String, message: String },
    #[error("{path}: bad manifest: {message}")]
    Manifest { path: String, message: String },
    #[error("corpus `{corpus}` has {} parse diagnostics", diagnostics.len())]
    Parse {
        corpus: String,
        diagnostics: Vec<Diagnostic>,
    },
    #[error("{file}: {error}")]
    Scenario { file: String, error: ScenarioError },
}

/// The `corpora/` directory shipped with the crate's workspace.
pub fn corpora_root() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../corpora")
}

fn read(path: &Path) -> Result<String, CorpusError> {
    fs::read_to_string(path).map_err(|e| CorpusError::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })
}

/// Names listed in `corpora/manifest.json`.
pub fn corpus_names_in(root: &Path) -> Result<Vec<String>, CorpusError> {
    let path = root.join("manifest.json");
    let idx: Index = serde_json::from_str(&read(&path)?).map_err(|e| CorpusError::Manifest {
        path: path.display().to_string(),
        message: e.to_string(),
    })?;
    Ok(idx.corpora)
}

pub fn corpus_names() -> Result<Vec<String>, CorpusError> {
    corpus_names_in(&corpora_root())
}

pub fn load_corpus(name: &str) -> Result<Corpus, CorpusError> {
    load_corpus_from(&corpora_root(), name)
}

/// Loads corpus `name` below `root`. Every listed file must parse and be
/// exactly the model files of the directory.
pub fn load_corpus_from(root: &Path, name: &str) -> Result<Corpus, CorpusError> {
    if !corpus_names_in(root)?.iter().any(|n| n == name) {
        return Err(CorpusError::UnknownCorpus(name.to_string()));
    }
    let dir = root.join(name);
    let mpath = dir.join("manifest.json");
    let bad = |message: String| CorpusError::Manifest {
        path: mpath.display().to_string(),
        message,
    };
    let manifest: CorpusManifest =
        serde_json::from_str(&read(&mpath)?).map_err(|e| bad(e.to_string()))?;
    if manifest.name != name {
        return Err(bad(format!("name `{}` does not match", manifest.name)));
    }
    let on_disk: Vec<String> = model_files(&dir)
        .map_err(|d| CorpusError::Io {
            path: dir.display().to_string(),
            message: d.message,
        })?
        .iter()
        .filter_map(|p| p.file_name().and_then(|f| f.to_str()).map(String::from))
        .collect();
    let mut listed = manifest.files.clone();
    listed.sort();
    if listed != on_disk {
        return Err(bad(format!(
            "file list {listed:?} differs from directory contents {on_disk:?}"
        )));
    }
    let models = load_model_path(&[&dir]).map_err(|diagnostics| CorpusError::Parse {
        corpus: name.to_string(),
        diagnostics,
    })?;
    let mut scenarios = Vec::new();
    for entry in &manifest.scenarios {
        let text = read(&dir.join(&entry.file))?;
        let s = load_scenario(&text).map_err(|error| CorpusError::Scenario {
            file: entry.file.clone(),
            error,
        })?;
        scenarios.push((entry.clone(), s));
    }
    Ok(Corpus {
        dir,
        manifest,
        models,
        scenarios,
    })
}

/// Per-kind model counts of a parsed (not necessarily linked) corpus.
pub fn count_kinds(models: &[ModelAst]) -> BTreeMap<ModelKind, usize> {
    let mut out = BTreeMap::new();
    for m in models {
        *out.entry(m.kind()).or_default() += 1;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_corpus() {
        assert!(matches!(
            load_corpus("nope"),
            Err(CorpusError::UnknownCorpus(n)) if n == "nope"
        ));
    }

    #[test]
    fn digest_is_hex_sha256() {
        assert_eq!(
            trace_digest(""),
            "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855"
        );
    }

    #[test]
    fn missing_dir_is_a_diagnostic() {
        let err = load_model_path(&[Path::new("/nonexistent/lr-models")]).unwrap_err();
        assert_eq!(err.len(), 1);
        assert_eq!(err[0].rule_id, "IO");
    }
}
