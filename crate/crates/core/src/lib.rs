//! Gegenbauer polynomials and their L²-norms on `[0, 1]`.
//!
//! The crate builds `C_n^{(λ)}` exactly over the rationals, integrates them in
//! closed form, lifts norm tables from index `λ` to `λ + 1` with an exact
//! recursion, checks the surrounding identities as exact equalities and
//! compares the large-degree behaviour against asymptotic formulas.

pub mod asymptotics;
pub mod cli;
pub mod exactpoly;
pub mod gegenbauer;
pub mod normtheory;
