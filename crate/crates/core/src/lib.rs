//! Combinatorial free-probability calculus over noncrossing-partition lattices.
//!
//! The crate provides, in rough dependency order:
//!
//! * [`ncpart`] — the lattice `NC(n)` of noncrossing partitions: enumeration,
//!   refinement order, zeta/Möbius/delta incidence functions, Kreweras
//!   complements, alternating unions, nesting forests and the even/pair
//!   sub-posets.
//! * [`coeffalg`] — coefficient algebras: exact rational (or float) matrix
//!   algebras, the group algebra of the free group `F_2` on reduced words,
//!   and two concrete probability-space models `(A, B, E, phi)` built on
//!   them.
//! * [`series`] — truncated formal series in noncommuting indeterminants;
//!   containers for moment series and R-transforms, composition and the
//!   one-variable moment/R functional equation solver.
//! * [`cumulant`] — moment/cumulant tables, partition-indexed evaluation
//!   (scalar products and operator-valued nested evaluation), Möbius
//!   inversion in both directions, and the cumulant-via-`E` formulas that
//!   hold under compatibility.
//! * [`freeness`] — freeness as vanishing mixed cumulants: free joint
//!   distributions, R-transform addition/concatenation and boxed
//!   convolution.
//! * [`compat`] — compatibility of a scalar functional `phi` with a
//!   conditional expectation `E`: checks, induced functionals, compatible
//!   subalgebras and the B-central construction.
//! * [`distributions`] — semicircular and even elements, scalar and
//!   amalgamated, with their moment laws.
//! * [`cli`] — the batch command-line front end.
//!
//! All core arithmetic is exact (big rationals); matrix models optionally
//! run in `f64` mode with an absolute tolerance of `1e-10`.

pub mod cli;
pub mod coeffalg;
pub mod compat;
pub mod cumulant;
pub mod distributions;
pub mod freeness;
pub mod json;
pub mod ncpart;
pub mod scalar;
pub mod series;

use thiserror::Error;

/// Crate-wide error type.
///
/// `Domain` marks inputs outside an operation's contract, `Capacity` marks
/// inputs that exceed a configured representation bound (enumeration caps,
/// reduced-word length caps), and the remaining variants are CLI plumbing.
#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("capacity error: {0}")]
    Capacity(String),
    #[error("out of range: {0}")]
    OutOfRange(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Stable machine-readable error kind, used by the CLI error envelope.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Domain(_) => "domain",
            Error::Capacity(_) => "capacity",
            Error::OutOfRange(_) => "out_of_range",
            Error::Parse(_) => "parse",
            Error::Io(_) => "io",
            Error::Json(_) => "json",
        }
    }
}

pub(crate) fn domain_err<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}

pub(crate) fn capacity_err<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Capacity(msg.into()))
}
