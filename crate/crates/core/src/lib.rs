//! Exact-arithmetic toolkit for Siegel modular forms of small degree.
//!
//! Forms are handled through truncated Fourier expansions indexed by
//! half-integral positive semidefinite matrices. On top of the expansion
//! ring the crate provides:
//!
//! * [`halfint`]: the index set, its enumeration under a trace bound and
//!   compound (minor) matrices,
//! * [`qexpansion`]: ring operations, `U(p)`, dilation and classical
//!   degree-one fixtures,
//! * [`theta`]: theta series of even lattices by exact enumeration,
//! * [`diffops`]: the compound theta operators and an explicit
//!   Rankin–Cohen bracket,
//! * [`padic`]: valuations, congruence reports and the congruence pipelines
//!   built from the pieces above,
//! * [`symplectic`]: `Sp_n(F_p)`, its Bruhat cells and a coset system for
//!   the Siegel parabolic.
//!
//! All arithmetic is exact; there is no floating point in any result.

#![allow(clippy::needless_range_loop)]

pub mod diffops;
pub mod error;
pub mod halfint;
pub mod json;
pub mod matrix;
pub mod padic;
pub mod qexpansion;
pub mod symplectic;
pub mod theta;

pub use diffops::{c_poly, lambda_compound_coeffs, p0_part, rc_bracket, theta_r, BracketParams};
pub use error::{Error, Result};
pub use halfint::{compound, enumerate_lambda, HalfIntegralMatrix, SubsetOrder};
pub use matrix::QMatrix;
pub use padic::{
    congruent, frobenius_descent, limit_profile, script_e, theorem41_check, vp, vp_expansion, CongruenceReport,
    Valuation,
};
pub use qexpansion::{delta1, eisenstein1, FourierExpansion, Meta, Shape};
pub use symplectic::{coset_reps, gl_parabolic_reps, omega, same_coset, CosetRep, SymplecticModP};
pub use theta::{rep_numbers, GramLattice};

/// Exact rational scalar used throughout.
pub type Rational = num_rational::BigRational;
