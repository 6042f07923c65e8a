//! Exact truncated power-series realizations of the orthogonal, Lorentz and
//! Poincaré Lie algebras (and their quantum-angle extensions) inside
//! generalized Heisenberg algebras, together with machinery that verifies
//! every defining bracket order by order with exact Gaussian-rational
//! arithmetic.
//!
//! The crate is layered bottom-up:
//!
//! * [`exactnum`] — arbitrary-precision rationals, Gaussian rationals,
//!   Bernoulli numbers and the Taylor coefficients of `t/(1 - e^{-t})`.
//! * [`ncalgebra`] — the noncommutative polynomial engine: generators,
//!   normal-ordered monomials, products, commutators and the action on
//!   coordinate polynomials.
//! * [`opmatrix`] — matrices over commuting derivative polynomials indexed by
//!   vector or antisymmetric-pair index spaces, with metric-weighted
//!   contraction, matrix power series and block matrices.
//! * [`realize`] — construction of the truncated realizations themselves.
//! * [`verify`] — Lie-algebra presentations, bracket residual checks, closed
//!   form oracles and mutation sensitivity tooling.
//!
//! Everything is exact: no floating point appears anywhere, and a residual is
//! accepted only when it is identically zero.

#![forbid(unsafe_code)]

pub mod exactnum;
pub mod ncalgebra;
pub mod opmatrix;
pub mod realize;
pub mod verify;

mod error;

pub use error::Error;
pub use exactnum::{GaussianRational, Rational};
pub use ncalgebra::{Algebra, Generator, Metric, Monomial, NCPoly, PairIndex, PolyState};
pub use opmatrix::{BlockMatrix, DPoly, OpMatrix};
pub use realize::{GammaCoeffs, GeneratorLabel, Realization, StructureConstants};
pub use verify::{check_bracket, BracketReport, MutationOutcome, OracleReport, Presentation};
