use alloc::boxed::Box;
use alloc::string::String;
use core::fmt;

pub type Result<T> = core::result::Result<T, Error>;

/// Everything that can go wrong inside the numerical core.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A grid point or argument lies outside its admissible domain.
    Domain(String),
    /// Shapes or lengths of two inputs disagree.
    Dimension {
        what: &'static str,
        expected: usize,
        found: usize,
    },
    /// `T` cannot be split into `M` blocks of even length.
    Plan {
        t: usize,
        m: usize,
        reason: &'static str,
        suggestion: Option<usize>,
    },
    /// Least-squares fit of a gridded row failed.
    Fit { row: usize, reason: String },
    /// A quantity that must be strictly positive vanished (e.g. all-zero series).
    Degenerate(&'static str),
    /// Invalid tuning parameter.
    Parameter(String),
    /// Graph with a vertex of zero degree.
    Graph(String),
    /// NaN or infinite values where finite numbers are required.
    Numeric(&'static str),
    /// Failure while processing a specific pair of series.
    Pair {
        first: String,
        second: String,
        source: Box<Error>,
    },
}

impl Error {
    /// The innermost error, looking through [`Error::Pair`] wrappers.
    pub fn root(&self) -> &Error {
        match self {
            Error::Pair { source, .. } => source.root(),
            other => other,
        }
    }
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Domain(msg) => write!(f, "domain error: {msg}"),
            Error::Dimension {
                what,
                expected,
                found,
            } => write!(f, "dimension mismatch in {what}: expected {expected}, found {found}"),
            Error::Plan {
                t,
                m,
                reason,
                suggestion,
            } => {
                write!(f, "cannot split T={t} into M={m} blocks: {reason}")?;
                if let Some(s) = suggestion {
                    write!(f, " (nearest valid M is {s})")?;
                }
                Ok(())
            }
            Error::Fit { row, reason } => write!(f, "fit failed for row {row}: {reason}"),
            Error::Degenerate(msg) => write!(f, "degenerate input: {msg}"),
            Error::Parameter(msg) => write!(f, "invalid parameter: {msg}"),
            Error::Graph(msg) => write!(f, "graph error: {msg}"),
            Error::Numeric(msg) => write!(f, "numeric error: {msg}"),
            Error::Pair {
                first,
                second,
                source,
            } => write!(f, "pair ({first}, {second}): {source}"),
        }
    }
}

impl core::error::Error for Error {}
