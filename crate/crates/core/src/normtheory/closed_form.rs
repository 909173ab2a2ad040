//! Digamma-free closed forms for `λ = 1` and `λ = 2`.
//!
//! At half-integer arguments `ψ(m + ½) + γ + log 4 = 2 Σ_{k=1}^{m} 1/(2k-1)`, so
//! both closed forms reduce to odd harmonic sums and stay rational.

use crate::exactpoly::Rational;

use super::scalar::NormScalar;
use super::NormError;

/// `Σ_{k=1}^{m} 1/(2k-1)`.
pub fn odd_harmonic<S: NormScalar>(m: usize) -> S {
    S::sum((1..=m).map(|k| S::from_int(1) / S::from_int(2 * k as i64 - 1)))
}

/// `‖C_n^{(1)}‖₂² = ½ (ψ(n + 3/2) + γ + log 4) = Σ_{k=0}^{n} 1/(2k+1)`.
pub fn closed_form_lambda1_in<S: NormScalar>(n: usize) -> S {
    odd_harmonic(n + 1)
}

/// `(‖√(1-x²) C_{n-2}^{(2)}‖₂², ‖C_{n-2}^{(2)}‖₂²)` for `n ≥ 2`.
pub fn closed_form_lambda2_in<S: NormScalar>(n: usize) -> Result<(S, S), NormError> {
    if n < 2 {
        return Err(NormError::DegreeTooSmall { minimum: 2, got: n });
    }
    let h = S::from_int(2) * odd_harmonic::<S>(n);
    let nn = S::from_int(n as i64);
    let n2 = nn.clone() * nn;
    let weighted = (S::from_int(2) * n2.clone() - S::from_int(1)) * h.clone() / S::from_int(16)
        - n2.clone() / S::from_int(8);
    let plain = S::sum([
        n2.clone() * n2.clone() / S::from_int(16),
        (S::from_int(4) * n2.clone() - S::from_int(1)) * h / S::from_int(64),
        -(S::from_int(5) * n2 / S::from_int(32)),
    ]);
    Ok((weighted, plain))
}

pub fn closed_form_lambda1(n: usize) -> Rational {
    closed_form_lambda1_in(n)
}

pub fn closed_form_lambda2(n: usize) -> Result<(Rational, Rational), NormError> {
    closed_form_lambda2_in(n)
}
