//! Secrecy degrees of freedom (s.d.o.f.) analysis for the two-receiver MIMO
//! broadcast wiretap channel with a rank-limited eavesdropper.
//!
//! The crate is organised around the pipeline a desk analysis follows:
//!
//! - [`matrix`] — dense complex linear algebra: QR, SVD, numerical rank, the
//!   CS decomposition and the generalized singular value decomposition (GSVD)
//!   that exposes the private/common row-subspace structure of a channel pair.
//! - [`channel`] — channel model types, the reduction to parallel independent
//!   channels, and worst-case eavesdropper constructions for converse cuts.
//! - [`region`] — exact s.d.o.f. region polytopes (with and without the
//!   mutual-privacy constraint), case classification, vertex enumeration.
//! - [`scheme`] — dimension-allocation transmission schemes: codebook dims,
//!   rate budgets, artificial-noise power split, decodability margins.
//! - [`analysis`] — analytic log-det rate/leakage evaluation, SNR sweeps,
//!   pre-log slope fitting and end-to-end certification.

pub mod analysis;
pub mod channel;
pub mod matrix;
pub mod region;
pub mod scheme;

/// Frobenius-norm tolerance for "unitary to working precision" checks.
pub const TOL_UNITARY: f64 = 1e-10;

/// Relative Frobenius-norm tolerance for factorization reconstruction checks.
pub const TOL_RECONSTRUCTION: f64 = 1e-8;

/// Elementwise tolerance for the CS identity `c_i^2 + s_i^2 = 1`.
pub const TOL_CS_IDENTITY: f64 = 1e-10;

/// Default absolute tolerance when matching fitted pre-log slopes.
pub const TOL_PRELOG: f64 = 0.05;

/// Tighter pre-log tolerance used for leakage and fictitious-message slopes.
pub const TOL_PRELOG_LEAKAGE: f64 = 0.02;
