use thiserror::Error;

/// Errors produced while parsing inputs or evaluating the models.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// A text input (topology, catalog, measurements) could not be parsed.
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    /// The header line of a CSV input does not match the expected schema.
    #[error("bad header: {0}")]
    Header(String),

    /// Arguments outside an operation's domain (zero batch, empty model, ...).
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// A record lacks a field required by the requested analysis.
    #[error("record {record}: missing field `{field}`")]
    MissingField { record: String, field: String },

    #[error("unknown report format `{0}` (expected text, csv or json)")]
    UnknownFormat(String),

    /// An error located in a named input file.
    #[error("{file}: {source}")]
    InFile { file: String, source: Box<Error> },

    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    pub(crate) fn parse(line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            line,
            message: message.into(),
        }
    }

    /// Attaches the name of the file the error came from.
    pub fn in_file(self, file: impl Into<String>) -> Self {
        Error::InFile {
            file: file.into(),
            source: Box::new(self),
        }
    }

    pub(crate) fn invalid(message: impl Into<String>) -> Self {
        Error::InvalidInput(message.into())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
