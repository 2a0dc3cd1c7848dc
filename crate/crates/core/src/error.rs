use alloc::string::String;
use core::fmt;

pub type Result<T, E = Error> = core::result::Result<T, E>;

/// Broad grouping used by front ends to pick an exit status.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorClass {
    /// Bad configuration or usage: unknown names, out-of-range parameters.
    Config,
    /// Malformed input data.
    Parse,
    /// The inputs are well formed but the computation has no answer for them.
    Domain,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A ratio with zero smoothing and a zero denominator.
    UndefinedRatio { word: String },
    InvalidParameter { name: &'static str, reason: String },
    UnknownSegmenter(String),
    UnknownVariant(String),
    UnknownMethod(String),
    /// None of the tokens has a vector in the embedding table.
    NoRepresentation,
    /// A zero-norm vector was passed where a direction is needed.
    DegenerateVector,
    DimensionMismatch { expected: usize, found: usize },
    NonFiniteComponent { word: String },
    Parse { line: usize, message: String },
    Empty(&'static str),
    OverlappingSeeds(String),
    DuplicateId(String),
    UnknownReview(String),
    PolarityOutOfRange(f64),
    VocabularyTooSmall(usize),
    EmptyCooccurrence,
    MissingStore(&'static str),
    OutOfRange { name: &'static str, value: usize, max: usize },
    SetMismatch,
    TooFewItems(usize),
    DuplicateAnnotation { attribute: String, annotator: String, review_id: String },
}

impl Error {
    pub fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter { name, reason: reason.into() }
    }

    pub fn class(&self) -> ErrorClass {
        match self {
            Error::InvalidParameter { .. }
            | Error::UnknownSegmenter(_)
            | Error::UnknownVariant(_)
            | Error::UnknownMethod(_)
            | Error::OverlappingSeeds(_)
            | Error::MissingStore(_)
            | Error::OutOfRange { .. } => ErrorClass::Config,
            Error::Parse { .. }
            | Error::NonFiniteComponent { .. }
            | Error::DuplicateId(_)
            | Error::DuplicateAnnotation { .. } => ErrorClass::Parse,
            _ => ErrorClass::Domain,
        }
    }
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::UndefinedRatio { word } => {
                write!(f, "ratio for `{word}` is undefined: zero denominator and no smoothing")
            }
            Error::InvalidParameter { name, reason } => write!(f, "invalid {name}: {reason}"),
            Error::UnknownSegmenter(name) => write!(f, "unknown tokenizer `{name}`"),
            Error::UnknownVariant(name) => write!(f, "unknown reward variant `{name}`"),
            Error::UnknownMethod(name) => write!(f, "unknown ranking method `{name}`"),
            Error::NoRepresentation => f.write_str("no token has an embedding vector"),
            Error::DegenerateVector => f.write_str("zero-norm vector has no direction"),
            Error::DimensionMismatch { expected, found } => {
                write!(f, "dimension mismatch: expected {expected}, found {found}")
            }
            Error::NonFiniteComponent { word } => {
                write!(f, "vector for `{word}` has a non-finite component")
            }
            Error::Parse { line, message } => write!(f, "line {line}: {message}"),
            Error::Empty(what) => write!(f, "{what} is empty"),
            Error::OverlappingSeeds(word) => {
                write!(f, "seed `{word}` is listed as both positive and negative")
            }
            Error::DuplicateId(id) => write!(f, "duplicate review id `{id}`"),
            Error::UnknownReview(id) => write!(f, "unknown review id `{id}`"),
            Error::PolarityOutOfRange(v) => write!(f, "emotion polarity {v} is outside [-1, 1]"),
            Error::VocabularyTooSmall(n) => {
                write!(f, "vocabulary has {n} word(s); at least 2 are needed")
            }
            Error::EmptyCooccurrence => f.write_str("co-occurrence matrix has no entries"),
            Error::MissingStore(what) => write!(f, "{what} is required for this method"),
            Error::OutOfRange { name, value, max } => {
                write!(f, "{name} = {value} is out of range 1..={max}")
            }
            Error::SetMismatch => f.write_str("lists do not cover the same set of reviews"),
            Error::TooFewItems(n) => write!(f, "need at least 2 items, got {n}"),
            Error::DuplicateAnnotation { attribute, annotator, review_id } => write!(
                f,
                "duplicate annotation for ({attribute}, {annotator}, {review_id})"
            ),
        }
    }
}

impl core::error::Error for Error {}
