//! Program input and output: the `.2cm` syntax, the JSON list-of-maps
//! document, trace tables and random program generation.

mod document;
mod dsl;
mod random;
mod trace;

use std::path::Path;

use thiserror::Error;

pub use document::{
    from_instruction_maps, parse_document, render_document, to_instruction_maps, DocumentError, InstructionMap,
    ProgramDocument,
};
pub use dsl::{parse_dsl, render_dsl, DslError};
pub use random::random_program;
pub use trace::{format_trace, table_cells, TraceStyle};

use crate::machine::Program;

#[derive(Debug, Error)]
pub enum LoadError {
    #[error("cannot read {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("{path}:{source}")]
    Dsl { path: String, source: DslError },
    #[error("{path}: {source}")]
    Document { path: String, source: DocumentError },
}

/// Loads a program from a `.json` document or, for any other extension,
/// from `.2cm` source.
pub fn load_program(path: &Path) -> Result<Program, LoadError> {
    let shown = path.display().to_string();
    let text = std::fs::read_to_string(path).map_err(|source| LoadError::Io { path: shown.clone(), source })?;
    if path.extension().is_some_and(|e| e == "json") {
        parse_document(&text).map_err(|source| LoadError::Document { path: shown, source })
    } else {
        parse_dsl(&text).map_err(|source| LoadError::Dsl { path: shown, source })
    }
}
