//! Numerical laboratory for discrete subgroups of SL(d, R): Cartan and
//! Jordan projections, flag varieties, limit sets and limit cones, and
//! Hölder exponent estimates for boundary maps.

pub mod dynamics;
pub mod error;
pub mod extended;
pub mod flag;
pub mod holder;
pub mod matlin;
pub mod presets;
pub mod scalar;
pub mod tits;
pub mod weyl;
pub mod words;

pub use error::{Error, Result};

/// `f64` instances of the generic types.
pub type Matrix = nalgebra::DMatrix<f64>;
pub type Vector = nalgebra::DVector<f64>;
pub type WeylVector = weyl::WeylVector<f64>;
pub type FlagPoint = flag::FlagPoint<f64>;
pub type Generators = matlin::Generators<f64>;
pub type LogScaledMatrix = matlin::LogScaledMatrix<f64>;
