use thiserror::Error;

use crate::rational::{format_rational, Rational};

#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),

    #[error("malformed game: {0}")]
    MalformedGame(String),

    #[error("prior sums to {} (deficit {})", format_rational(.sum), format_rational(.deficit))]
    PriorSum { sum: Rational, deficit: Rational },

    #[error("invalid signal: {0}")]
    InvalidSignal(String),

    #[error("invalid profile: {0}")]
    InvalidProfile(String),

    #[error("unreachable message: action {action} has zero probability")]
    UnreachableMessage { action: String },

    #[error("Assumption 1 violated: {0}")]
    NotUniqueOptimum(String),

    #[error("Assumption 2 violated on reachable event: {0}")]
    NoAlignedWitness(String),

    #[error("nothing to improve: the signal is fully informative")]
    NothingToImprove,

    #[error("epsilon {} exceeds the feasible cap {}", format_rational(.epsilon), format_rational(.cap))]
    EpsilonAboveCap { epsilon: Rational, cap: Rational },

    #[error("epsilon {} outside the admissible range {range}", format_rational(.epsilon))]
    EpsilonOutOfRange { epsilon: Rational, range: &'static str },

    #[error("enumeration of {count} candidates exceeds the bound {bound}")]
    TooLarge { count: String, bound: u64 },

    #[error("io error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
