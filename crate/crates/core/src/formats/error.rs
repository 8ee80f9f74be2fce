use std::fmt;

use serde::Serialize;
use thiserror::Error;

/// Supported text formats.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum FormatTag {
    /// UAI `MARKOV` file.
    Mrf,
    /// UAI file with a `MAX-POTENTIALS` section.
    BottleneckMrf,
    /// UAI file with a `PROJECTIONS` section.
    Tomography,
    Multicut,
    Amwc,
    /// dd graph matching format (`p`, `a`, `e` lines).
    Gm,
    /// Concatenated `gm p k` blocks.
    Mgm,
    CellTracking,
    /// LP file whose variables follow the triangle-product naming scheme.
    ShapeMatching,
    Lp,
}

impl FormatTag {
    pub const ALL: [FormatTag; 10] = [
        FormatTag::Mrf,
        FormatTag::BottleneckMrf,
        FormatTag::Tomography,
        FormatTag::Multicut,
        FormatTag::Amwc,
        FormatTag::Gm,
        FormatTag::Mgm,
        FormatTag::CellTracking,
        FormatTag::ShapeMatching,
        FormatTag::Lp,
    ];

    pub fn name(self) -> &'static str {
        match self {
            FormatTag::Mrf => "mrf",
            FormatTag::BottleneckMrf => "bottleneck-mrf",
            FormatTag::Tomography => "tomography",
            FormatTag::Multicut => "multicut",
            FormatTag::Amwc => "amwc",
            FormatTag::Gm => "gm",
            FormatTag::Mgm => "mgm",
            FormatTag::CellTracking => "cell-tracking",
            FormatTag::ShapeMatching => "shape-matching",
            FormatTag::Lp => "lp",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|t| t.name() == name)
    }
}

impl fmt::Display for FormatTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A location in the input. Line and column are 1-based, the byte offset is
/// 0-based.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct Position {
    pub line: usize,
    pub column: usize,
    pub offset: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Error, Serialize)]
#[error("{format}: line {line}, column {column}: {message}")]
pub struct ParseError {
    pub format: FormatTag,
    pub line: usize,
    pub column: usize,
    pub offset: usize,
    pub message: String,
}

impl ParseError {
    pub fn new(format: FormatTag, at: Position, message: impl Into<String>) -> Self {
        Self { format, line: at.line, column: at.column, offset: at.offset, message: message.into() }
    }

    pub fn position(&self) -> Position {
        Position { line: self.line, column: self.column, offset: self.offset }
    }
}

/// Malformed shape-matching variable name or file name.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("`{name}` does not match the {pattern} pattern")]
pub struct NameError {
    pub name: String,
    pub pattern: &'static str,
}
