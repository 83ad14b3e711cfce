//! The architecture description language.
//!
//! One line/block structured format declares viewpoints, skills,
//! correspondences, requirements and scenario parameters:
//!
//! ```text
//! viewpoint capability cap {
//!   skill Approach requires Brake thresholds 0.8 0.3;
//!   skill Brake metric brake_ecu.alive heartbeat
//!       nominal [1.0, 1.0] unavailable [0.0, 0.0] timeout 0.5;
//! }
//! requirement SG1 safety_goal on cap.Approach text "...";
//! scenario crosswalk { v_init = 11.176; d_crossing = 30.0; }
//! ```
//!
//! Parsing is purely syntactic. References are not resolved here; run
//! [`crate::model::validate`] on the result.

mod lexer;
mod parser;
mod writer;

use std::fmt;

use thiserror::Error;

use crate::model::ArchitectureModel;

pub use writer::{serialize, HEADER};

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct SourceSpan {
    pub file: String,
    /// 1-based.
    pub line: usize,
    /// 1-based, counted in characters.
    pub column: usize,
}

impl SourceSpan {
    pub fn new(file: impl Into<String>, line: usize, column: usize) -> Self {
        Self {
            file: file.into(),
            line,
            column,
        }
    }
}

impl fmt::Display for SourceSpan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}", self.file, self.line, self.column)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{span}: {message}{}", expected.as_ref().map(|e| format!(" (expected {e})")).unwrap_or_default())]
pub struct ParseError {
    pub span: SourceSpan,
    pub message: String,
    pub expected: Option<String>,
}

impl ParseError {
    pub(crate) fn new(span: SourceSpan, message: impl Into<String>) -> Self {
        Self {
            span,
            message: message.into(),
            expected: None,
        }
    }

    pub(crate) fn expecting(mut self, what: &str) -> Self {
        self.expected = Some(what.to_string());
        self
    }
}

/// Parses ADL source; spans name the file as `<input>`.
pub fn parse(text: &str) -> Result<ArchitectureModel, ParseError> {
    parse_named(text, "<input>")
}

/// Parses ADL source, reporting spans against `file`. Stops at the first
/// error; no partial model is returned.
pub fn parse_named(text: &str, file: &str) -> Result<ArchitectureModel, ParseError> {
    parser::Parser::new(text, file)?.model()
}
