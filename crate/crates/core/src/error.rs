use thiserror::Error;

use crate::invariants::Violation;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("division by zero")]
    DivisionByZero,

    #[error("conductor mismatch: {left} vs {right}")]
    ConductorMismatch { left: u32, right: u32 },

    #[error("conductor must be positive")]
    ZeroConductor,

    #[error("not rational: non-constant coefficients {coeffs:?}")]
    NotRational { coeffs: Vec<String> },

    #[error("integer overflow in {0}")]
    Overflow(&'static str),

    #[error("defect modulus must be odd and nonzero, got {0}")]
    InvalidDefectModulus(i64),

    #[error("degenerate defect argument: gcd({q}, {p}) != 1")]
    DegenerateDefect { q: i64, p: i64 },

    #[error("defect argument p1 + p2 + p3 = {0} is odd; the sum is irrational")]
    OddDefectWeight(i64),

    #[error("invalid parameters: {}", join_violations(.0))]
    InvalidPair(Vec<Violation>),

    #[error("degenerate Euler number: n = 0 (infinite H^4)")]
    InfiniteH4,

    #[error("p1 unavailable: {0}")]
    P1Unavailable(String),

    #[error("Bezout pair does not exist: gcd({0}, {1}) != 1")]
    NoBezout(i128, i128),

    #[error("degenerate stratum: sin(theta/2) vanishes for weight {0}")]
    DegenerateStratum(usize),

    #[error("internal invariant violated: {0}")]
    Internal(String),

    #[error("census contradiction at index {index}: {detail}")]
    CensusContradiction { index: i64, detail: String },

    #[error("precondition not met: {0}")]
    Precondition(String),

    #[error("modulus too large for unit search: {0}")]
    ModulusTooLarge(String),

    #[error("i/o error after {cursor}: {detail}")]
    Io { cursor: String, detail: String },
}

impl Error {
    /// Process exit code: 2 for rejected input, 1 for everything else.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::InvalidPair(_)
            | Error::InfiniteH4
            | Error::Precondition(_)
            | Error::InvalidDefectModulus(_)
            | Error::DegenerateDefect { .. }
            | Error::OddDefectWeight(_)
            | Error::NoBezout(..)
            | Error::ModulusTooLarge(_)
            | Error::Overflow(_)
            | Error::ZeroConductor => 2,
            _ => 1,
        }
    }
}

fn join_violations(v: &[Violation]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join("; ")
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
