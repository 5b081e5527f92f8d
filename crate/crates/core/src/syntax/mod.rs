//! Lexing, parsing and pretty-printing of the model languages.

pub mod ast;
pub mod lexer;
mod parser;
mod printer;

pub use ast::*;
pub use parser::{parse_expression, parse_model, parse_model_bytes};
pub use printer::{format_double, pretty_print, print_expr};
