//! Random-self-reducibility (RSR) countermeasure toolkit.
//!
//! A function is random self-reducible when its value at a chosen point can
//! be recovered from its values at random, input-independent points. This
//! crate applies that property as a software countermeasure against physical
//! attacks: secret operands are split or blinded before an operation ever
//! sees them (hiding them from power side channels), the operation runs as a
//! black box on the randomized queries, and repeated evaluations with
//! majority voting correct the occasional faulted answer.
//!
//! The crate has three layers:
//!
//! * [`arith`] — exact, unprotected number theory: modular arithmetic, two
//!   modular-exponentiation and two modular-inverse routines, negacyclic
//!   polynomial multiplication, a butterfly NTT, and small matrix algebra
//!   over a prime field. These are the "programs" the countermeasure wraps.
//! * [`protect`] — the countermeasure itself: random splitting, the generic
//!   share-and-recombine executor, majority voting with loop-integrity
//!   checking, one protected wrapper per self-reducible operation, and the
//!   repetition-count bounds.
//! * Desk-scale attack simulators: [`fault`] injects probabilistic faults
//!   into black boxes and runs grid campaigns; [`leakage`] synthesizes
//!   Hamming-weight power traces and scores them with Welch's t-test (TVLA)
//!   and SOST point-of-interest detection. [`schemes`] wires everything into
//!   end-to-end RSA-CRT, ElGamal, and Kyber-style key generation demos.
//!
//! All randomness flows through the seeded, splittable [`rng::Prng`]; every
//! simulation is reproducible from a single master seed.

pub mod arith;
pub mod fault;
pub mod leakage;
pub mod protect;
pub mod rng;
pub mod schemes;
pub mod stats;

use std::fmt;

/// Crate-wide error type.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Error {
    /// A parameter violated a documented precondition.
    InvalidParams(&'static str),
    /// The element has no inverse in the requested ring.
    NonInvertible,
    /// The matrix has zero determinant mod q.
    Singular,
    /// An operation that requires a non-empty input got an empty one.
    Empty,
    /// A vote loop exited without completing all its iterations.
    LoopIntegrityFailure,
    /// Repeated evaluations produced no strict majority answer.
    NoMajority,
    /// An intermediate value left the exactly-representable range.
    Overflow,
    DivisionByZero,
    /// A simulated fault crashed the device for this run.
    Reset,
    /// The named campaign or assessment target is not registered.
    UnknownTarget(String),
    /// An instrumented operation emitted an input-dependent event count.
    VariableLength { expected: usize, got: usize },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidParams(msg) => write!(f, "invalid parameters: {msg}"),
            Error::NonInvertible => write!(f, "element is not invertible"),
            Error::Singular => write!(f, "matrix is singular mod q"),
            Error::Empty => write!(f, "empty input"),
            Error::LoopIntegrityFailure => write!(f, "vote loop did not run to completion"),
            Error::NoMajority => write!(f, "no strict majority among repeated answers"),
            Error::Overflow => write!(f, "intermediate value out of exact range"),
            Error::DivisionByZero => write!(f, "division by zero"),
            Error::Reset => write!(f, "simulated device reset"),
            Error::UnknownTarget(name) => write!(f, "unknown target: {name}"),
            Error::VariableLength { expected, got } => {
                write!(f, "trace length changed with input: expected {expected}, got {got}")
            }
        }
    }
}

impl std::error::Error for Error {}

pub type Result<T> = std::result::Result<T, Error>;
