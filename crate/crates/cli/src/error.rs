use std::fmt;

use apirec_core::code::WhitelistError;
use apirec_core::convert::ConvertError;
use apirec_core::eval::EvalError;
use apirec_core::index::StoreError;
use apirec_core::stats::StatsError;
use apirec_core::text::StopWordError;
use apirec_core::RankError;

/// A failed command, classified by exit code.
#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Io(String),
    Format(String),
    EmptyQuery,
    Other(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Other(_) => 1,
            CliError::Usage(_) => 2,
            CliError::Io(_) => 3,
            CliError::Format(_) => 4,
            CliError::EmptyQuery => 5,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "usage error: {m}"),
            CliError::Io(m) => write!(f, "I/O error: {m}"),
            CliError::Format(m) => write!(f, "format error: {m}"),
            CliError::EmptyQuery => f.write_str("query has no keywords after preprocessing"),
            CliError::Other(m) => f.write_str(m),
        }
    }
}

impl From<StoreError> for CliError {
    fn from(e: StoreError) -> Self {
        match e {
            StoreError::Io { .. } => CliError::Io(e.to_string()),
            _ => CliError::Format(e.to_string()),
        }
    }
}

impl From<RankError> for CliError {
    fn from(e: RankError) -> Self {
        match e {
            RankError::EmptyQuery => CliError::EmptyQuery,
            RankError::InvalidConfig(_) => CliError::Usage(e.to_string()),
        }
    }
}

impl From<EvalError> for CliError {
    fn from(e: EvalError) -> Self {
        match e {
            EvalError::Io { .. } => CliError::Io(e.to_string()),
            EvalError::ZeroK => CliError::Usage(e.to_string()),
            _ => CliError::Format(e.to_string()),
        }
    }
}

impl From<StopWordError> for CliError {
    fn from(e: StopWordError) -> Self {
        match e {
            StopWordError::Io { .. } => CliError::Io(e.to_string()),
            StopWordError::Empty(_) => CliError::Format(e.to_string()),
        }
    }
}

impl From<WhitelistError> for CliError {
    fn from(e: WhitelistError) -> Self {
        match e {
            WhitelistError::Io { .. } => CliError::Io(e.to_string()),
            WhitelistError::BadName { .. } => CliError::Format(e.to_string()),
        }
    }
}

impl From<ConvertError> for CliError {
    fn from(e: ConvertError) -> Self {
        CliError::Io(e.to_string())
    }
}

impl From<StatsError> for CliError {
    fn from(e: StatsError) -> Self {
        match e {
            StatsError::Io { .. } => CliError::Io(e.to_string()),
            _ => CliError::Format(e.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}
