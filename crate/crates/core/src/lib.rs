//! Translation of a data-oriented C subset into memory-safe Rust.
//!
//! The pipeline: lex/parse/resolve C sources, classify struct ownership,
//! translate functions type-directedly (compiling pointer arithmetic to slice
//! splits via per-base split trees), then infer mutability, derive traits,
//! run cleanup rewrites, and validate with an internal checker before
//! printing. A differential-testing harness drives external C and Rust
//! toolchains over a corpus to compare observable behavior.

#![forbid(unsafe_code)]

pub mod c;
pub mod diag;
pub mod loc;

pub use diag::{Code, Diagnostic, Severity};
pub use loc::SourceLoc;
