//! Tools for robot assembly models: parsing, checking, translation to
//! statecharts, deterministic execution against simulated worlds, and code
//! generation. The `lr` binary exposes the same pipeline on the command line.
//!
//! ```
//! use lrkit::corpora::load_corpus;
//! use lrkit::wellformed::check_all;
//!
//! let ws = load_corpus("stacking").unwrap().link().unwrap();
//! assert!(check_all(&ws).iter().all(|r| r.error_count() == 0));
//! ```

pub mod cli;
pub mod codegen;
pub mod corpora;
pub mod diagnostic;
pub mod pipeline;
pub mod runtime;
pub mod simworld;
pub mod statechart;
pub mod symbols;
pub mod syntax;
pub mod wellformed;

pub use diagnostic::{Diagnostic, Severity, SourcePos};

// The book chapters are compiled as doctests so their snippets stay current.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/models.md")]
    mod models {}
    #[doc = include_str!("../../../book/src/checking.md")]
    mod checking {}
    #[doc = include_str!("../../../book/src/statecharts.md")]
    mod statecharts {}
    #[doc = include_str!("../../../book/src/running.md")]
    mod running {}
    #[doc = include_str!("../../../book/src/corpora.md")]
    mod corpora {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
