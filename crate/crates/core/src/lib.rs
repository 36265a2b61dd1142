//! Exact and Monte Carlo models of noise sensitivity and of random flows
//! driven by shared signs.
//!
//! The Walsh layer and the semigroups are generic over [`scalar::Scalar`];
//! the aliases below fix the common concrete choices.

pub mod error;
pub mod experiments;
pub mod flow;
pub mod limits;
pub mod mc;
pub mod report;
pub mod scalar;
pub mod semigroup;
pub mod stats;
pub mod walsh;
pub mod web;

pub use error::{Error, Result};
pub use limits::Limits;
pub use report::{Check, ExperimentReport, Quantity, Report};
pub use scalar::{Rational, Scalar};

/// Observable with floating values.
pub type ObservableF64 = walsh::Observable<f64>;
/// Observable with exact rational values.
pub type ExactObservable = walsh::Observable<Rational>;
pub type ExactSpectrum = walsh::WalshSpectrum<Rational>;
/// Integer-parameter semigroup elements produced by lattice walks.
pub type G1Int = semigroup::G1Element<i64>;
pub type G2Int = semigroup::G2Element<i64>;
pub type G3Int = semigroup::G3Element<i64>;
/// Real-parameter elements, as in scaling limits.
pub type G2Real = semigroup::G2Element<f64>;
pub type G3Real = semigroup::G3Element<f64>;
