//! Tokenizer for the C subset.
//!
//! Comments and whitespace are discarded. Preprocessor lines are limited to an
//! allowlisted set of `#include`s, which are skipped without interpretation.

use crate::diag::{Code, Diagnostic, Result};
use crate::loc::SourceLoc;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Tok {
    Ident(String),
    Int(u64),
    // punctuation
    LParen,
    RParen,
    LBrace,
    RBrace,
    LBracket,
    RBracket,
    Semi,
    Comma,
    Dot,
    Arrow,
    Star,
    Amp,
    Plus,
    Minus,
    Slash,
    Percent,
    Caret,
    Pipe,
    Tilde,
    Bang,
    Assign,
    PlusAssign,
    MinusAssign,
    StarAssign,
    PlusPlus,
    MinusMinus,
    AmpAmp,
    PipePipe,
    EqEq,
    NotEq,
    Lt,
    Le,
    Gt,
    Ge,
    Shl,
    Shr,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Token {
    pub tok: Tok,
    pub loc: SourceLoc,
}

const INCLUDE_ALLOWLIST: &[&str] = &[
    "<stdint.h>",
    "<stdbool.h>",
    "<stdlib.h>",
    "<string.h>",
    "<stddef.h>",
    "<inttypes.h>",
];

struct Lexer<'a> {
    src: &'a [u8],
    pos: usize,
    line: u32,
    col: u32,
    file: String,
}

impl<'a> Lexer<'a> {
    fn loc(&self) -> SourceLoc {
        SourceLoc::new(self.file.clone(), self.line, self.col)
    }

    fn peek(&self) -> Option<u8> {
        self.src.get(self.pos).copied()
    }

    fn peek2(&self) -> Option<u8> {
        self.src.get(self.pos + 1).copied()
    }

    fn bump(&mut self) -> Option<u8> {
        let c = self.peek()?;
        self.pos += 1;
        if c == b'\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        Some(c)
    }

    fn skip_trivia(&mut self) -> Result<()> {
        loop {
            match self.peek() {
                Some(c) if (c as char).is_whitespace() => {
                    self.bump();
                }
                Some(b'/') if self.peek2() == Some(b'/') => {
                    while let Some(c) = self.peek() {
                        if c == b'\n' {
                            break;
                        }
                        self.bump();
                    }
                }
                Some(b'/') if self.peek2() == Some(b'*') => {
                    let start = self.loc();
                    self.bump();
                    self.bump();
                    loop {
                        match self.peek() {
                            Some(b'*') if self.peek2() == Some(b'/') => {
                                self.bump();
                                self.bump();
                                break;
                            }
                            Some(_) => {
                                self.bump();
                            }
                            None => {
                                return Err(Diagnostic::error(
                                    Code::Lex,
                                    start,
                                    "unterminated block comment",
                                ))
                            }
                        }
                    }
                }
                Some(b'#') => self.preprocessor_line()?,
                _ => return Ok(()),
            }
        }
    }

    fn preprocessor_line(&mut self) -> Result<()> {
        let start = self.loc();
        let mut text = String::new();
        while let Some(c) = self.peek() {
            if c == b'\n' {
                break;
            }
            text.push(c as char);
            self.bump();
        }
        let trimmed = text.trim();
        if let Some(rest) = trimmed.strip_prefix("#include") {
            let target = rest.trim();
            if INCLUDE_ALLOWLIST.contains(&target) {
                return Ok(());
            }
            return Err(Diagnostic::error(
                Code::Subset,
                start,
                format!("include of {} is outside the allowlisted preamble", target),
            ));
        }
        Err(Diagnostic::error(
            Code::Subset,
            start,
            format!("preprocessor directive is not supported: {}", trimmed),
        ))
    }

    fn ident(&mut self) -> Token {
        let loc = self.loc();
        let mut s = String::new();
        while let Some(c) = self.peek() {
            if (c as char).is_ascii_alphanumeric() || c == b'_' {
                s.push(c as char);
                self.bump();
            } else {
                break;
            }
        }
        Token {
            tok: Tok::Ident(s),
            loc,
        }
    }

    fn number(&mut self) -> Result<Token> {
        let loc = self.loc();
        let mut digits = String::new();
        let hex = self.peek() == Some(b'0') && matches!(self.peek2(), Some(b'x') | Some(b'X'));
        if hex {
            self.bump();
            self.bump();
        }
        while let Some(c) = self.peek() {
            let ch = c as char;
            if ch.is_ascii_hexdigit() && (hex || ch.is_ascii_digit()) {
                digits.push(ch);
                self.bump();
            } else {
                break;
            }
        }
        // swallow C integer suffixes (u, l, ll and combinations)
        while let Some(c) = self.peek() {
            if matches!(c, b'u' | b'U' | b'l' | b'L') {
                self.bump();
            } else {
                break;
            }
        }
        let value = if hex {
            u64::from_str_radix(&digits, 16)
        } else {
            digits.parse::<u64>()
        };
        match value {
            Ok(v) => Ok(Token {
                tok: Tok::Int(v),
                loc,
            }),
            Err(_) => Err(Diagnostic::error(
                Code::Lex,
                loc,
                format!("integer literal out of range: {}", digits),
            )),
        }
    }
}

/// Tokenize a source file into a flat token stream.
pub fn tokenize(file: &str, source: &str) -> Result<Vec<Token>> {
    let mut lx = Lexer {
        src: source.as_bytes(),
        pos: 0,
        line: 1,
        col: 1,
        file: file.to_string(),
    };
    let mut out = Vec::new();
    loop {
        lx.skip_trivia()?;
        let loc = lx.loc();
        let Some(c) = lx.peek() else { break };
        let tok = match c {
            b'a'..=b'z' | b'A'..=b'Z' | b'_' => {
                out.push(lx.ident());
                continue;
            }
            b'0'..=b'9' => {
                out.push(lx.number()?);
                continue;
            }
            b'(' => {
                lx.bump();
                Tok::LParen
            }
            b')' => {
                lx.bump();
                Tok::RParen
            }
            b'{' => {
                lx.bump();
                Tok::LBrace
            }
            b'}' => {
                lx.bump();
                Tok::RBrace
            }
            b'[' => {
                lx.bump();
                Tok::LBracket
            }
            b']' => {
                lx.bump();
                Tok::RBracket
            }
            b';' => {
                lx.bump();
                Tok::Semi
            }
            b',' => {
                lx.bump();
                Tok::Comma
            }
            b'.' => {
                lx.bump();
                Tok::Dot
            }
            b'~' => {
                lx.bump();
                Tok::Tilde
            }
            b'^' => {
                lx.bump();
                Tok::Caret
            }
            b'%' => {
                lx.bump();
                Tok::Percent
            }
            b'/' => {
                lx.bump();
                Tok::Slash
            }
            b'*' => {
                lx.bump();
                if lx.peek() == Some(b'=') {
                    lx.bump();
                    Tok::StarAssign
                } else {
                    Tok::Star
                }
            }
            b'+' => {
                lx.bump();
                match lx.peek() {
                    Some(b'+') => {
                        lx.bump();
                        Tok::PlusPlus
                    }
                    Some(b'=') => {
                        lx.bump();
                        Tok::PlusAssign
                    }
                    _ => Tok::Plus,
                }
            }
            b'-' => {
                lx.bump();
                match lx.peek() {
                    Some(b'-') => {
                        lx.bump();
                        Tok::MinusMinus
                    }
                    Some(b'=') => {
                        lx.bump();
                        Tok::MinusAssign
                    }
                    Some(b'>') => {
                        lx.bump();
                        Tok::Arrow
                    }
                    _ => Tok::Minus,
                }
            }
            b'&' => {
                lx.bump();
                if lx.peek() == Some(b'&') {
                    lx.bump();
                    Tok::AmpAmp
                } else {
                    Tok::Amp
                }
            }
            b'|' => {
                lx.bump();
                if lx.peek() == Some(b'|') {
                    lx.bump();
                    Tok::PipePipe
                } else {
                    Tok::Pipe
                }
            }
            b'=' => {
                lx.bump();
                if lx.peek() == Some(b'=') {
                    lx.bump();
                    Tok::EqEq
                } else {
                    Tok::Assign
                }
            }
            b'!' => {
                lx.bump();
                if lx.peek() == Some(b'=') {
                    lx.bump();
                    Tok::NotEq
                } else {
                    Tok::Bang
                }
            }
            b'<' => {
                lx.bump();
                match lx.peek() {
                    Some(b'=') => {
                        lx.bump();
                        Tok::Le
                    }
                    Some(b'<') => {
                        lx.bump();
                        Tok::Shl
                    }
                    _ => Tok::Lt,
                }
            }
            b'>' => {
                lx.bump();
                match lx.peek() {
                    Some(b'=') => {
                        lx.bump();
                        Tok::Ge
                    }
                    Some(b'>') => {
                        lx.bump();
                        Tok::Shr
                    }
                    _ => Tok::Gt,
                }
            }
            other => {
                return Err(Diagnostic::error(
                    Code::Lex,
                    loc,
                    format!("unrecognized character: {:?}", other as char),
                ))
            }
        };
        out.push(Token { tok, loc });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toks(src: &str) -> Vec<Tok> {
        tokenize("t.c", src).unwrap().into_iter().map(|t| t.tok).collect()
    }

    #[test]
    fn declarations_tokenize() {
        assert_eq!(
            toks("uint8_t x;"),
            vec![
                Tok::Ident("uint8_t".into()),
                Tok::Ident("x".into()),
                Tok::Semi
            ]
        );
    }

    #[test]
    fn pointer_arithmetic_tokenizes() {
        assert_eq!(
            toks("abcd + 16"),
            vec![Tok::Ident("abcd".into()), Tok::Plus, Tok::Int(16)]
        );
    }

    #[test]
    fn arrow_is_one_token() {
        assert_eq!(
            toks("x->f"),
            vec![
                Tok::Ident("x".into()),
                Tok::Arrow,
                Tok::Ident("f".into())
            ]
        );
    }

    #[test]
    fn void_cast_is_a_token_sequence() {
        assert_eq!(
            toks("(void)x;"),
            vec![
                Tok::LParen,
                Tok::Ident("void".into()),
                Tok::RParen,
                Tok::Ident("x".into()),
                Tok::Semi
            ]
        );
    }

    #[test]
    fn comments_and_allowlisted_includes_are_skipped() {
        let src = "#include <stdint.h>\n// line\n/* block */ x";
        assert_eq!(toks(src), vec![Tok::Ident("x".into())]);
    }

    #[test]
    fn other_preprocessor_directives_are_rejected() {
        let err = tokenize("t.c", "#define N 4\n").unwrap_err();
        assert_eq!(err.code, Code::Subset);
    }

    #[test]
    fn unknown_characters_are_lex_errors() {
        let err = tokenize("t.c", "int x @").unwrap_err();
        assert_eq!(err.code, Code::Lex);
        assert_eq!(err.loc.column, 7);
    }

    #[test]
    fn locations_track_lines() {
        let ts = tokenize("t.c", "x\n  y").unwrap();
        assert_eq!(ts[1].loc.line, 2);
        assert_eq!(ts[1].loc.column, 3);
    }

    #[test]
    fn hex_and_suffixed_literals() {
        assert_eq!(toks("0x10 16ul"), vec![Tok::Int(16), Tok::Int(16)]);
    }
}
