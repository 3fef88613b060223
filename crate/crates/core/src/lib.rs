pub mod alphabet;
pub mod bch;
pub mod commands;
pub mod corpus;
pub mod diffeo;
pub mod error;
pub mod io;
pub mod mould;
pub mod operator;
pub mod poly;
pub mod prenormal;
pub mod scalar;

pub use alphabet::{Letter, TruncationContext, Word};
pub use diffeo::PreparedDiffeo;
pub use error::{Error, Result};
pub use mould::Mould;
pub use operator::{mould_expand, OperatorSeries};
pub use poly::{Exponent, PolySpace, TruncatedPoly};
pub use scalar::{MultiplierVector, Scalar};
