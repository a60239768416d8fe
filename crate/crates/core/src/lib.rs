//! Exact computations on complex projective superspaces `P^{n|m}`.

pub mod cech;
pub mod characteristic;
pub mod criteria;
pub mod error;
pub mod expr;
pub mod golden;
pub mod linalg;
pub mod picard;
pub mod properties;
pub mod scalar;
pub mod sheaf;
pub mod superalgebra;
pub mod superlie;
pub mod tangent;

pub use error::{Error, Result};
pub use scalar::{Rational, Scalar};
pub use superalgebra::{
    projective_chart_change, super_exp, super_log, supercommutator, ChartSubstitution, Parity, SuperDerivation, SuperMonomial,
    SuperPolynomial, Var, VarContext,
};
