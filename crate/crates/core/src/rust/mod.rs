//! The emitted Rust subset: AST and pretty-printer.

pub mod ast;
pub mod print;

pub use ast::*;
pub use print::{pretty_print, render_type};
