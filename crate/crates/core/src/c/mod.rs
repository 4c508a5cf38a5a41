//! Frontend for the C subset: lexing, parsing, printing, and resolution.

pub mod ast;
pub mod lex;
pub mod parse;
pub mod print;
pub mod resolve;

use crate::diag::Result;

/// Full frontend: source text to a resolved, fully typed program.
pub fn load_program(file: &str, source: &str) -> Result<ast::CProgram> {
    let toks = lex::tokenize(file, source)?;
    let program = parse::parse_program(toks)?;
    resolve::resolve(program)
}
