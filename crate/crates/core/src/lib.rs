//! Quadratic Dirichlet L-functions `L(s, χ_P)` for monic irreducible `P` of
//! odd degree over `F_q[T]`, `q ≡ 1 (mod 4)`: exact L-polynomials, central
//! values in `Q(√q)`, moments over `P_n` and the sums behind their lower
//! bounds.

pub mod characters;
pub mod commands;

pub mod error;
pub mod field_poly;
pub mod lfunction;
pub mod moments;
pub mod qsqrt;
pub mod scan;
pub mod strategy;

pub use error::{Error, Result};
pub mod verify;
