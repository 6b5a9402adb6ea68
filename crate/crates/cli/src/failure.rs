use std::fmt;
use std::path::Path;

/// A failed command, classified by exit code.
#[derive(Debug)]
pub enum Failure {
    Validation(String),
    Optimization(String),
    Io(String),
}

impl Failure {
    pub fn code(&self) -> u8 {
        match self {
            Failure::Validation(_) => 2,
            Failure::Optimization(_) => 3,
            Failure::Io(_) => 4,
        }
    }

    pub fn io(path: &Path, err: impl fmt::Display) -> Self {
        Failure::Io(format!("{}: {err}", path.display()))
    }

    pub fn validation(msg: impl Into<String>) -> Self {
        Failure::Validation(msg.into())
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Validation(m) => write!(f, "{m}"),
            Failure::Optimization(m) => write!(f, "optimization failed: {m}"),
            Failure::Io(m) => write!(f, "i/o error: {m}"),
        }
    }
}

impl From<ssvqe::Error> for Failure {
    fn from(err: ssvqe::Error) -> Self {
        use ssvqe::Error;
        match err {
            Error::Validation(problems) => {
                let mut msg = String::from("invalid configuration:");
                for p in problems {
                    msg.push_str("\n  - ");
                    msg.push_str(&p);
                }
                Failure::Validation(msg)
            }
            e @ (Error::NonFinite { .. } | Error::AllStartsFailed { .. }) => Failure::Optimization(e.to_string()),
            e => Failure::Validation(e.to_string()),
        }
    }
}

pub type Outcome<T> = Result<T, Failure>;
