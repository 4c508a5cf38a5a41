//! Source locations attached to every token, expression, and diagnostic.

use std::fmt;

use serde::{Deserialize, Serialize};

/// A position in an input file. Lines and columns are 1-based.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SourceLoc {
    pub file: String,
    pub line: u32,
    pub column: u32,
}

impl SourceLoc {
    pub fn new(file: impl Into<String>, line: u32, column: u32) -> Self {
        debug_assert!(line >= 1 && column >= 1);
        SourceLoc {
            file: file.into(),
            line,
            column,
        }
    }

    /// Placeholder location for synthesized nodes (defaults, desugarings).
    pub fn synthetic() -> Self {
        SourceLoc {
            file: "<synthetic>".to_string(),
            line: 1,
            column: 1,
        }
    }
}

impl fmt::Display for SourceLoc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}", self.file, self.line, self.column)
    }
}
