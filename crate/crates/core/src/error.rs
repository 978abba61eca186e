use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum LoadError {
    #[error("line {line}: {msg}")]
    Format { line: usize, msg: String },
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: {inner}")]
    InFile { path: String, inner: Box<LoadError> },
    #[error("{0}")]
    Invalid(String),
}

impl LoadError {
    pub fn in_file(self, path: impl Into<String>) -> LoadError {
        LoadError::InFile { path: path.into(), inner: Box::new(self) }
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SampleError {
    #[error("unsatisfiable constraint after {attempts} attempts: {constraint}")]
    Unsatisfiable { constraint: String, attempts: usize },
    #[error("start symbol {0} has no productions")]
    NoStart(String),
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TransduceError {
    #[error("no transduction rule for production {0}")]
    UncoveredProduction(String),
    #[error("no dictionary entry for {lemma} ({pos}, frame {frame})")]
    UncoveredLexeme { lemma: String, pos: String, frame: String },
    #[error("no morphology row for class {class}, {bundle}")]
    UncoveredMorph { class: String, bundle: String },
    #[error("rule {rule}: {msg}")]
    BadReference { rule: String, msg: String },
}

#[derive(Debug, Error, Clone, PartialEq)]
#[error("production {0} is not part of this grammar")]
pub struct ForeignProduction(pub String);
