//! Ultradiscrete Painlevé II with parity variables.
//!
//! The engine works over exact amplitudes in `Q + Q·ε` (see [`tropical`]).
//! [`equations`] holds the max-plus equations and an exhaustive solver used as
//! an oracle, [`evolution`] the closed-form steppers and the trajectory runner.
//! The remaining modules build special solutions ([`families`], [`detsol`],
//! [`perturbed`]), segment trajectories ([`classify`]) and compare against the
//! q-difference system it is the limit of ([`qlimit`]).

pub mod classify;
pub mod detsol;
pub mod equations;
pub mod evolution;
pub mod families;
pub mod perturbed;
pub mod qlimit;
pub mod trajectory;
pub mod tropical;

pub use equations::{Params, SolutionSet, State};
pub use evolution::{StepOutcome, Variable};
pub use trajectory::{Row, Termination, Trajectory};
pub use tropical::{Amplitude, MaxPlus, ParityValue, Rational, Sign};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    #[error("max over an empty list of terms")]
    EmptyMax,
    #[error("parse error: {0}")]
    Parse(String),
    #[error("Q must be negative, got {0}")]
    NonNegativeQ(Amplitude),
    #[error("parameters out of range: {0}")]
    Params(String),
    #[error("window conditions violated: {}", .0.join(", "))]
    Window(Vec<String>),
    #[error("no solution at m = {0}")]
    NoSolution(i64),
    #[error("indefinite evolution at {var} index {index}")]
    Indefinite { var: Variable, index: i64 },
    #[error("q-side iteration failed: {0}")]
    Numeric(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
