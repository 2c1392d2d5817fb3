//! Unsharp joint spin measurements and Bell inequalities for few-qubit systems.
//!
//! A projective measurement of a spin component fixes one direction on the
//! Bloch sphere; two non-commuting components cannot be measured sharply in
//! the same run. They *can* be measured together once each is unsharpened by
//! a factor in (0, 1], and the Busch criterion says exactly how much
//! unsharpening a given pair of directions needs. This crate builds those
//! joint observables as four- and eight-outcome POVMs, evaluates correlation
//! functions by summing over their outcomes, and assembles the standard Bell
//! expressions (CHSH, the three-particle Mermin combination, Gisin's
//! three-setting inequality) in both the sharp and the jointly-measured
//! regimes.
//!
//! The interesting phenomenology lives at the feasibility boundary: a joint
//! measurement of two orthogonal components tops out at sharpness 1/sqrt(2),
//! which is precisely the factor that drags every Bell violation back to its
//! classical bound. The [`inequalities`] module reproduces those boundary
//! values; [`search`] recovers them by derivative-free maximization instead
//! of closed form, as a cross-check.
//!
//! Dimensions never exceed three qubits, so all linear algebra is dense and
//! direct ([`linalg`]).

pub mod correlations;
pub mod error;
pub mod inequalities;
pub mod linalg;
pub mod pauli;
pub mod povm;
pub mod search;

pub use error::{Error, Result};

/// Tolerance for structural identities that hold to rounding error
/// (hermiticity, unit norms, trace normalization).
pub const TOL_STRUCTURAL: f64 = 1e-12;

/// Tolerance for quantities assembled from several arithmetic steps
/// (correlation values, probabilities, eigenvalue floors).
pub const TOL_DERIVED: f64 = 1e-10;

/// Slack allowed below zero when testing positive semidefiniteness.
pub const TOL_PSD: f64 = 1e-10;
