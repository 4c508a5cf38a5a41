//! Diagnostics shared by every pipeline stage.
//!
//! Rendered as `severity[code] file:line:col: message`, which is the stable,
//! machine-parsable format the CLI prints on stderr.

use std::fmt;

use crate::loc::SourceLoc;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Severity {
    Warning,
    Error,
}

impl fmt::Display for Severity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Severity::Warning => write!(f, "warning"),
            Severity::Error => write!(f, "error"),
        }
    }
}

/// Stable diagnostic codes. The string form is part of the CLI contract.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Code {
    Lex,
    Parse,
    Name,
    Type,
    Subset,
    UseAfterMove,
    Coercion,
    NonLinear,
    Overlap,
    Lookup,
    SplitFallback,
    MissingReturn,
    ConflictingOverride,
    TupleLowering,
    FieldMutability,
    Config,
    Internal,
}

impl Code {
    pub fn as_str(self) -> &'static str {
        match self {
            Code::Lex => "lex",
            Code::Parse => "parse",
            Code::Name => "name",
            Code::Type => "type",
            Code::Subset => "subset",
            Code::UseAfterMove => "use-after-move",
            Code::Coercion => "coercion",
            Code::NonLinear => "non-linear",
            Code::Overlap => "overlap",
            Code::Lookup => "lookup",
            Code::SplitFallback => "split-fallback",
            Code::MissingReturn => "missing-return",
            Code::ConflictingOverride => "conflicting-override",
            Code::TupleLowering => "tuple-lowering",
            Code::FieldMutability => "field-mutability",
            Code::Config => "config",
            Code::Internal => "internal",
        }
    }
}

impl fmt::Display for Code {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.as_str())
    }
}

/// One diagnostic with its source position.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diagnostic {
    pub severity: Severity,
    pub code: Code,
    pub loc: SourceLoc,
    pub message: String,
}

impl Diagnostic {
    pub fn error(code: Code, loc: SourceLoc, message: impl Into<String>) -> Self {
        Diagnostic {
            severity: Severity::Error,
            code,
            loc,
            message: message.into(),
        }
    }

    pub fn warning(code: Code, loc: SourceLoc, message: impl Into<String>) -> Self {
        Diagnostic {
            severity: Severity::Warning,
            code,
            loc,
            message: message.into(),
        }
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}[{}] {}: {}",
            self.severity, self.code, self.loc, self.message
        )
    }
}

impl std::error::Error for Diagnostic {}

pub type Result<T> = std::result::Result<T, Diagnostic>;

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rendered_format_is_stable() {
        let d = Diagnostic::warning(
            Code::SplitFallback,
            SourceLoc::new("f.c", 3, 10),
            "offsets are not comparable",
        );
        assert_eq!(
            d.to_string(),
            "warning[split-fallback] f.c:3:10: offsets are not comparable"
        );
    }
}
