//! Norm tables and the identities linking index `λ` to `λ + 1`.
//!
//! [`lift_norms`] computes `‖C_k^{(λ+1)}‖₂²` from the table at `λ` with
//! `O(N)` scalar operations; [`norm_table_oracle`] integrates every polynomial
//! and is the reference the lift is checked against.

mod bootstrap;
mod closed_form;
mod identities;
mod scalar;
mod table;

use thiserror::Error;

pub use bootstrap::{float_base_table, gauss_legendre, quadrature_norms, BaseTable};
pub use closed_form::{
    closed_form_lambda1, closed_form_lambda1_in, closed_form_lambda2, closed_form_lambda2_in,
    odd_harmonic,
};
pub use identities::{
    combined_identity_check, dette_check, dette_endpoint_check, dette_pointwise, dette_sides,
    lemma21_integral_check, lemma21_sides, lemma22_check, lemma22_sides, lemma23_check,
    lemma23_sides, product_completion_check,
};
pub use scalar::{Accumulator, CompensatedSum, Mode, NormScalar};
pub use table::{
    lift_norms, lifted_norm, norm_table_oracle, norm_table_oracle_to, remark_identity_value,
    weighted_norm_closed, EndpointProvider, ExactEndpoints, ExactTable, FloatEndpoints, FloatTable,
    NormTable, WeightedNorm,
};

/// Default cap on polynomial degree for exact-mode tables.
pub const DEFAULT_DEGREE_BUDGET: usize = 128;

pub const DEGREE_BUDGET_ENV: &str = "GEGENORM_DEGREE_BUDGET";

/// Exact-mode degree cap, overridable through `GEGENORM_DEGREE_BUDGET`.
pub fn degree_budget() -> usize {
    std::env::var(DEGREE_BUDGET_ENV)
        .ok()
        .and_then(|v| v.trim().parse().ok())
        .unwrap_or(DEFAULT_DEGREE_BUDGET)
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum NormError {
    #[error("degree {got} is below the minimum {minimum}")]
    DegreeTooSmall { minimum: usize, got: usize },
    #[error("table covers degrees up to {available}, degree {needed} required")]
    TableTooShort { needed: usize, available: usize },
    #[error("lifted degree {degree}: recursion gives {recursion}, seed is {seed}")]
    SeedMismatch {
        degree: usize,
        seed: f64,
        recursion: f64,
    },
    #[error("degree {requested} exceeds the exact-mode budget {budget}")]
    OverBudget { requested: usize, budget: usize },
}

/// Provenance of a norm value.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum NormSource {
    Oracle,
    Recursion,
    ClosedForm,
    Quadrature,
}

impl NormSource {
    pub fn as_str(self) -> &'static str {
        match self {
            NormSource::Oracle => "oracle",
            NormSource::Recursion => "recursion",
            NormSource::ClosedForm => "closed_form",
            NormSource::Quadrature => "quadrature",
        }
    }

    pub fn parse(text: &str) -> Option<Self> {
        [
            NormSource::Oracle,
            NormSource::Recursion,
            NormSource::ClosedForm,
            NormSource::Quadrature,
        ]
        .into_iter()
        .find(|s| s.as_str() == text)
    }
}
