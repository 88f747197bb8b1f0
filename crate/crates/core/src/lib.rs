//! Verification workbench for positive Dehn twist factorizations.

pub mod atlas;
pub mod braid;
pub mod catalog;
pub mod dsl;
pub mod error;
pub mod expected;
pub mod hurwitz;
pub mod invariants;
pub mod linalg;
pub mod normalize;
pub mod relator;
pub mod scalar;
pub mod script;
pub mod spin;
pub mod surface;
pub mod template;
pub mod word;

pub use error::{Error, Result};
pub use linalg::Matrix;
pub use scalar::Scalar;
pub use surface::{Class, Surface};

pub type Rational = num_rational::BigRational;
pub type RationalMatrix = Matrix<Rational>;
pub type IntMatrix = Matrix<i64>;
pub type FloatMatrix = Matrix<f64>;
