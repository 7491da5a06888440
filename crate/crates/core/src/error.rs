use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),

    #[error("line {line}: malformed record: {reason}")]
    Malformed { line: usize, reason: String },

    #[error("duplicate person id {0:?}")]
    DuplicatePerson(String),

    #[error("unknown person id {0:?}")]
    UnknownPerson(String),

    #[error("age {0} outside the supported range 0..=130")]
    AgeOutOfRange(i64),

    #[error("catalog is empty")]
    EmptyCatalog,

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("non-finite descriptor value for person {0:?}")]
    NonFiniteDescriptor(String),

    #[error("person {0:?} has no visual descriptor; ingest descriptors for this person first")]
    MissingDescriptor(String),

    #[error("invalid descriptor file: {0}")]
    DescriptorFormat(String),

    #[error("duplicate entry {0:?} within a single ranked list")]
    DuplicateInList(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("session error: {0}")]
    Session(String),

    #[error("event log error at index {index}: {reason}")]
    EventLog { index: usize, reason: String },

    #[error("study log error: {0}")]
    StudyLog(String),

    #[error("statistics error: {0}")]
    Statistics(String),
}

impl Error {
    pub(crate) fn malformed(line: usize, reason: impl ToString) -> Self {
        Error::Malformed {
            line,
            reason: reason.to_string(),
        }
    }
}
