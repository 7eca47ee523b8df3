use thiserror::Error;
use toda_core::GradedMap;

fn at_loc(loc: &Option<(usize, usize)>) -> String {
    match loc {
        Some((l, c)) => format!(" (line {l}, column {c})"),
        None => String::new(),
    }
}

/// Problems with the input; all exit with code 2.
#[derive(Debug, Error)]
pub enum InputError {
    #[error("syntax error at line {line}, column {column}: {msg}")]
    Syntax { line: usize, column: usize, msg: String },
    #[error("unsupported schema version {0}")]
    Schema(u32),
    #[error("bad field: {0}")]
    Field(String),
    #[error("no system block")]
    NoSystem,
    #[error("unresolved reference {name:?} in {at}{}", at_loc(loc))]
    Unresolved { name: String, at: String, loc: Option<(usize, usize)> },
    #[error("dimension mismatch in {at}: {msg}")]
    Dimension { at: String, msg: String },
    #[error("d^2 != 0 in complex {name:?} at degree {degree}{}", at_loc(loc))]
    NotDifferential { name: String, degree: i32, loc: Option<(usize, usize)> },
    #[error("map {name:?} is not a chain map{}", at_loc(loc))]
    NotChainMap { name: String, loc: Option<(usize, usize)> },
    #[error("nullhomotopy condition fails for {at}: {msg}")]
    Nullhomotopy { at: String, msg: String, differences: Vec<(String, GradedMap)> },
    #[error("{0}")]
    Usage(String),
    #[error("cannot read {path}: {msg}")]
    Io { path: String, msg: String },
}

impl InputError {
    /// A stable name for each kind of error, reported in JSON output.
    pub fn kind(&self) -> &'static str {
        match self {
            InputError::Syntax { .. } => "syntax",
            InputError::Schema(_) => "schema",
            InputError::Field(_) => "field",
            InputError::NoSystem => "no-system",
            InputError::Unresolved { .. } => "unresolved-reference",
            InputError::Dimension { .. } => "dimension-mismatch",
            InputError::NotDifferential { .. } => "d-squared-nonzero",
            InputError::NotChainMap { .. } => "not-a-chain-map",
            InputError::Nullhomotopy { .. } => "nullhomotopy-condition",
            InputError::Usage(_) => "usage",
            InputError::Io { .. } => "io",
        }
    }
}
