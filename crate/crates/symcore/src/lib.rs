//! Expression kernel for the symmetry solver.
//!
//! Expressions are immutable hash-consed trees kept in a light canonical
//! form. Exact work happens in [`ratfun`], which maps an expression to a
//! quotient of polynomials over the rationals in algebraically independent
//! kernels. [`oracle::Oracle`] combines that with seeded numeric probing.

pub mod diff;
pub mod error;
pub mod eval;
pub mod expr;
pub mod integrate;
pub mod oracle;
pub mod parse;
pub mod poly;
pub mod ratfun;
pub mod render;
pub mod upoly;

/// Exact coefficients.
pub type Rational = num_rational::BigRational;
/// Probe arithmetic.
pub type Scalar = f64;

pub use diff::{diff, diff_n};
pub use error::{Result, SymError};
pub use eval::{eval_f64, Assignment, Evaluator, FuncInstance, Singular};
pub use expr::{fresh_dummy, Elem, Expr, Node};
pub use integrate::integrate;
pub use oracle::{Oracle, ProbeConfig, Verdict, ZeroTest};
pub use parse::{parse, parse_in, Scope};
pub use ratfun::{normalize, normalize_full, try_normalize, Normal};
