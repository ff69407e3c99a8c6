use alloc::string::String;
use core::fmt;

use crate::model::VarId;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Error {
    /// A signature has no entry for a variable of the schema it is used with.
    MissingVariable(VarId),
    /// A tuple (or support element) does not match the length of its schema.
    ArityMismatch { expected: usize, found: usize },
    /// A column index beyond the end of a schema.
    IndexOutOfRange { index: usize, len: usize },
    /// An exhaustive enumeration would exceed its configured bound.
    EnumerationLimit { limit: u128, required: u128 },
    /// Two properties (or a property and a signature) disagree on their schema.
    ScopeMismatch,
    /// A constraint whose variables violate a structural requirement.
    InvalidConstraint(String),
    /// A trigger was placed on a literal that is no longer in its domain.
    RemovedLiteral { var: VarId, val: i64 },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::MissingVariable(v) => write!(f, "signature has no domain for variable `{v}`"),
            Error::ArityMismatch { expected, found } => {
                write!(f, "arity mismatch: expected {expected} columns, found {found}")
            }
            Error::IndexOutOfRange { index, len } => {
                write!(f, "column index {index} out of range for schema of length {len}")
            }
            Error::EnumerationLimit { limit, required } => {
                write!(f, "enumeration of {required} items exceeds the limit of {limit}")
            }
            Error::ScopeMismatch => f.write_str("properties do not share a scope"),
            Error::InvalidConstraint(msg) => write!(f, "invalid constraint: {msg}"),
            Error::RemovedLiteral { var, val } => {
                write!(f, "cannot place a trigger on removed literal ({var}, {val})")
            }
        }
    }
}

impl core::error::Error for Error {}
