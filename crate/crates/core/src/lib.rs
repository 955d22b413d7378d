pub mod arith;
pub mod bigfloat;
pub mod error;
pub mod mellin;
pub mod real;
pub mod tauber;
pub mod volterra;
pub mod weights;

pub use bigfloat::BigFloat;
pub use error::{Error, Result};
pub use real::{CompensatedSum, Field, Precision, Real};
