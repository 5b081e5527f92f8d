//! Diagnostics shared by the parser, the linker and the well-formedness rules.

use std::cmp::Ordering;
use std::fmt;
use std::sync::Arc;

/// A 1-based position in a model file.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SourcePos {
    pub file: Arc<str>,
    pub line: u32,
    pub col: u32,
}

impl SourcePos {
    pub fn new(file: impl Into<Arc<str>>, line: u32, col: u32) -> Self {
        debug_assert!(line >= 1 && col >= 1);
        SourcePos {
            file: file.into(),
            line,
            col,
        }
    }

    /// Placeholder used for synthesized nodes and for position-insensitive comparison.
    pub fn unknown() -> Self {
        SourcePos {
            file: Arc::from(""),
            line: 1,
            col: 1,
        }
    }
}

impl Default for SourcePos {
    fn default() -> Self {
        SourcePos::unknown()
    }
}

impl PartialOrd for SourcePos {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for SourcePos {
    fn cmp(&self, other: &Self) -> Ordering {
        (&*self.file, self.line, self.col).cmp(&(&*other.file, other.line, other.col))
    }
}

impl fmt::Display for SourcePos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}", self.file, self.line, self.col)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Severity {
    Error,
    Warning,
}

impl fmt::Display for Severity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Severity::Error => "error",
            Severity::Warning => "warning",
        })
    }
}

/// One finding. `rule_id` is `PARSE`, a `LINK-*` id, or a well-formedness rule `WF01`..`WF13`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Diagnostic {
    pub severity: Severity,
    pub rule_id: String,
    pub message: String,
    pub pos: SourcePos,
}

impl Diagnostic {
    pub fn error(rule_id: impl Into<String>, pos: SourcePos, message: impl Into<String>) -> Self {
        Diagnostic {
            severity: Severity::Error,
            rule_id: rule_id.into(),
            message: message.into(),
            pos,
        }
    }

    pub fn warning(rule_id: impl Into<String>, pos: SourcePos, message: impl Into<String>) -> Self {
        Diagnostic {
            severity: Severity::Warning,
            rule_id: rule_id.into(),
            message: message.into(),
            pos,
        }
    }

    pub fn is_error(&self) -> bool {
        self.severity == Severity::Error
    }

    /// Ordering used for printed output: file, line, column, then rule id.
    pub fn sort_key(&self) -> (&str, u32, u32, &str, &str) {
        (
            &self.pos.file,
            self.pos.line,
            self.pos.col,
            &self.rule_id,
            &self.message,
        )
    }
}

/// `<file>:<line>:<col>: <error|warning> <RULEID>: <message>`
impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}: {} {}: {}",
            self.pos, self.severity, self.rule_id, self.message
        )
    }
}

/// Sorts diagnostics into their canonical print order.
pub fn sort_diagnostics(diags: &mut [Diagnostic]) {
    diags.sort_by(|a, b| a.sort_key().cmp(&b.sort_key()));
}
