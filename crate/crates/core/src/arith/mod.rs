//! Sieves, classical arithmetic functions, the Dirichlet ring and the
//! coefficient sequences used by the weights.

pub mod dirichlet;
pub mod sequence;
pub mod sieve;
pub mod tau;

pub use dirichlet::{convolve, dirichlet_convolve, dirichlet_inverse, inverse};
pub use sequence::{
    character_value, davenport_heilbronn_xi, eval_coefficient, real_character_count, Builtin,
    CoefficientSequence, DirichletSeriesMeta, Scalar, SequenceKind, Tail, SEQUENCE_IDS,
};
pub use sieve::{build_sieve, factorize_trial, liouville, moebius, FactorSieve};
pub use tau::{ramanujan_tau, tau};
