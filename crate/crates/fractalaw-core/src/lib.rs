//! Computational kernels for self-similar random fractal measures.
//!
//! The crate builds finitely supported measures on `R^d` (`d <= 3`), applies
//! scaling laws `S µ = Σ p_i S_i µ` with affine branch maps, and measures the
//! result with the minimal transport metric
//!
//! ```text
//! l_q(µ, ν) = inf { (∫ d^q(x, y) dγ)^(1/q ∧ 1) | γ has marginals µ, ν }
//! ```
//!
//! solved exactly on discrete supports. Random scaling laws are drawn from
//! per-node streams of a construction tree so that consecutive iterates share
//! every shallower law, which is what makes pathwise contraction observable.
//! The `prob` module carries the probabilistic-metric side: distribution
//! functions, the t-norm `max(a+b-1, 0)`, Menger/Sehgal checks, E-space
//! distances, and invariant-set iteration on finite sample spaces.
//!
//! Everything here is `no_std` (with `alloc`): pure, deterministic
//! computation. IO, configuration, and the experiment CLI live in the
//! companion `fractalaw` crate.

#![no_std]
#![deny(unsafe_code)]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod iteration;
pub mod math;
pub mod measure;
pub mod prob;
pub mod rng;
pub mod scaling;
pub mod transport;

use thiserror::Error;

/// Errors shared by all kernel modules.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("dimension {0} outside supported range 1..=3")]
    DimensionOutOfRange(usize),
    #[error("coordinate, weight, or parameter is not finite")]
    NonFinite,
    #[error("weight {0} must be positive")]
    NonpositiveWeight(f64),
    #[error("negative mixture weight {0}")]
    NegativeWeight(f64),
    #[error("measure has no atoms")]
    EmptyMeasure,
    #[error("measure mass {0} is not 1 within 1e-12")]
    NotUnitMass(f64),
    #[error("total masses differ: {0} vs {1}")]
    MassMismatch(f64, f64),
    #[error("support size {size} exceeds cap {cap}")]
    SupportCapExceeded { size: usize, cap: usize },
    #[error("monotone coupling requires q >= 1, got q = {0}")]
    ConcaveCost(f64),
    #[error("length mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),
    #[error("weights sum to {0}, expected 1 within 1e-12")]
    WeightSumNotOne(f64),
    #[error("ensembles are not same-sample paired")]
    UnpairedEnsemble,
    #[error("parameter {name} = {value} outside {range}")]
    ParameterOutOfRange {
        name: &'static str,
        value: f64,
        range: &'static str,
    },
    #[error("tree letter {0} outside 1..={1}")]
    BadTreeLetter(usize, usize),
    #[error("atom budget exceeded: {atoms} atoms over limit {limit}")]
    AtomBudgetExceeded { atoms: usize, limit: usize },
    #[error("set capacity exceeded: {size} elements over cap {cap}")]
    CapacityExceeded { size: usize, cap: usize },
    #[error("sample spaces differ")]
    SampleSpaceMismatch,
    #[error("negative sample value {0}")]
    NegativeSample(f64),
    #[error("value {0} outside [0, 1]")]
    OutOfUnitInterval(f64),
    #[error("contraction ratio {0} not in (0, 1)")]
    RatioNotContractive(f64),
    #[error("numerical failure: {0}")]
    Numerical(&'static str),
}

/// Crate-wide result alias.
pub type Result<T> = core::result::Result<T, Error>;

/// A Monte Carlo estimate with its standard error.
///
/// `std_err` is 0 when the quantity is exact or only one sample was taken.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub std_err: f64,
}

impl Estimate {
    pub fn exact(value: f64) -> Self {
        Estimate {
            value,
            std_err: 0.0,
        }
    }
}
