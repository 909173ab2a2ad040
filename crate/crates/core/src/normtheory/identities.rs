//! Exact checks of the pointwise and integral identities behind the lifting
//! recursion. Every check compares two independently computed exact values.

use crate::exactpoly::{
    exact_l2_norm, exact_weighted_l2_norm, int, poly_eval, poly_scale_shift, DensePoly, Rational,
};
use crate::gegenbauer::{endpoint_value, family, Lambda};

use super::table::{remark_identity_value, ExactEndpoints, ExactTable};
use super::NormError;

fn require(n: usize, minimum: usize) -> Result<(), NormError> {
    if n < minimum {
        Err(NormError::DegreeTooSmall { minimum, got: n })
    } else {
        Ok(())
    }
}

/// Both sides of the sum-of-squares identity
/// `(n/2λ)² C_n^{(λ)}² + (1-x²) C_{n-1}^{(λ+1)}² = Σ_{k<n} (λ+k)/λ · C_k^{(λ)}²`
/// as polynomials in `x`.
pub fn dette_sides(lambda: &Lambda, n: usize) -> (DensePoly, DensePoly) {
    let lam = lambda.value();
    let base = family(lambda, n.max(1));
    let lifted = family(&lambda.raised(), n.max(1));
    let cn = base.poly(n);
    let scale = int(n as i64) / (int(2) * lam);
    let upper = lifted.poly_or_zero(n as i64 - 1);
    let one_minus_x2 = DensePoly::from_ints(&[1, 0, -1]);
    let lhs = &(&(cn * cn) * &(&scale * &scale)) + &(&one_minus_x2 * &(&upper * &upper));
    let rhs = (0..n).fold(DensePoly::zero(), |acc, k| {
        let ck = base.poly(k);
        let weight = (lam + int(k as i64)) / lam;
        &acc + &(&(ck * ck) * &weight)
    });
    (lhs, rhs)
}

pub fn dette_check(lambda: &Lambda, n: usize) -> bool {
    let (lhs, rhs) = dette_sides(lambda, n);
    lhs == rhs
}

/// The sum-of-squares identity at `x = 1`: `(n/2λ)² C_n(1)² = Σ_{k<n} (λ+k)/λ · C_k(1)²`.
pub fn dette_endpoint_check(lambda: &Lambda, n: usize) -> bool {
    let lam = lambda.value();
    let scale = int(n as i64) / (int(2) * lam);
    let e = endpoint_value(lambda, n);
    let lhs = &scale * &scale * &e * &e;
    let rhs: Rational = (0..n)
        .map(|k| {
            let ek = endpoint_value(lambda, k);
            (lam + int(k as i64)) / lam * &ek * &ek
        })
        .sum();
    lhs == rhs
}

/// The sum-of-squares identity evaluated at a single rational point.
pub fn dette_pointwise(lambda: &Lambda, n: usize, x: &Rational) -> bool {
    let (lhs, rhs) = dette_sides(lambda, n);
    poly_eval(&lhs, x) == poly_eval(&rhs, x)
}

/// The four-term expression for `‖C_{n-2}^{(λ+1)}‖₂²` against its oracle value.
pub fn combined_identity_check(base: &ExactTable, n: usize) -> Result<bool, NormError> {
    require(n, 2)?;
    let lambda = base.lambda();
    let value = remark_identity_value(base, &ExactEndpoints(lambda.clone()), n)?;
    let oracle = exact_l2_norm(family(&lambda.raised(), n - 2).poly(n - 2));
    Ok(value == oracle)
}

/// `∫₀¹ x² p(x)² dx`.
fn second_moment(p: &DensePoly) -> Rational {
    exact_l2_norm(p) - exact_weighted_l2_norm(p)
}

/// `∫₀¹ [C_n^{(λ+1)}]² - [C_{n-2}^{(λ+1)}]² dx
///   = (n+λ)/(2λ²) · (C_n^{(λ)}(1)² + (2λ-1)‖C_n^{(λ)}‖²)`
pub fn lemma21_sides(lambda: &Lambda, n: usize) -> Result<(Rational, Rational), NormError> {
    require(n, 2)?;
    let lam = lambda.value();
    let lifted = family(&lambda.raised(), n);
    let base = family(lambda, n);
    let lhs = exact_l2_norm(lifted.poly(n)) - exact_l2_norm(lifted.poly(n - 2));
    let e = endpoint_value(lambda, n);
    let rhs = (int(n as i64) + lam) / (int(2) * lam * lam)
        * (&e * &e + (int(2) * lam - int(1)) * exact_l2_norm(base.poly(n)));
    Ok((lhs, rhs))
}

pub fn lemma21_integral_check(lambda: &Lambda, n: usize) -> Result<bool, NormError> {
    lemma21_sides(lambda, n).map(|(l, r)| l == r)
}

/// The sum-of-squares identity:
/// `∫ x²[C_{n+1}^{(λ+1)}]² + [C_n^{(λ+1)}]² + (1/2λ)∫(1-x²)[C_{n+1}^{(λ+1)}]²
///   = (n+2)²/(8λ³) C_{n+2}(1)² + (2λ-1)/(2λ) · (n+2)²/(4λ²) ‖C_{n+2}‖²`
pub fn lemma22_sides(lambda: &Lambda, n: usize) -> (Rational, Rational) {
    let lam = lambda.value();
    let lifted = family(&lambda.raised(), n + 1);
    let base = family(lambda, n + 2);
    let next = lifted.poly(n + 1);
    let lhs = second_moment(next)
        + exact_l2_norm(lifted.poly(n))
        + exact_weighted_l2_norm(next) / (int(2) * lam);
    let m = int(n as i64 + 2);
    let e = endpoint_value(lambda, n + 2);
    let m2 = &m * &m;
    let rhs = &m2 / (int(8) * lam * lam * lam) * &e * &e
        + (int(2) * lam - int(1)) / (int(2) * lam) * &m2 / (int(4) * lam * lam)
            * exact_l2_norm(base.poly(n + 2));
    (lhs, rhs)
}

pub fn lemma22_check(lambda: &Lambda, n: usize) -> bool {
    let (l, r) = lemma22_sides(lambda, n);
    l == r
}

/// The quadratic-completion identity:
/// `∫ x²[C_{n+1}^{(λ+1)}]² - [C_n^{(λ+1)}]² = (n+2)/(4λ²) (C_{n+2}(1)² - (n+3)‖C_{n+2}‖²)`
pub fn lemma23_sides(lambda: &Lambda, n: usize) -> (Rational, Rational) {
    let lam = lambda.value();
    let lifted = family(&lambda.raised(), n + 1);
    let base = family(lambda, n + 2);
    let lhs = second_moment(lifted.poly(n + 1)) - exact_l2_norm(lifted.poly(n));
    let e = endpoint_value(lambda, n + 2);
    let rhs = int(n as i64 + 2) / (int(4) * lam * lam)
        * (&e * &e - int(n as i64 + 3) * exact_l2_norm(base.poly(n + 2)));
    (lhs, rhs)
}

pub fn lemma23_check(lambda: &Lambda, n: usize) -> bool {
    let (l, r) = lemma23_sides(lambda, n);
    l == r
}

/// Pointwise form of the quadratic completion used for the last identity:
/// `(n+2)/λ · C_{n+2}^{(λ)} C_n^{(λ+1)}
///   = x²[C_{n+1}^{(λ+1)}]² - [C_n^{(λ+1)}]² - (x C_{n+1}^{(λ+1)} - C_n^{(λ+1)})²`
pub fn product_completion_check(lambda: &Lambda, n: usize) -> bool {
    let lam = lambda.value();
    let base = family(lambda, n + 2);
    let lifted = family(&lambda.raised(), n + 1);
    let cn = lifted.poly(n);
    let x_next = poly_scale_shift(lifted.poly(n + 1), &int(1), true);
    let lhs = &(base.poly(n + 2) * cn) * &(int(n as i64 + 2) / lam);
    let diff = &x_next - cn;
    let rhs = &(&(&x_next * &x_next) - &(cn * cn)) - &(&diff * &diff);
    (&lhs - &rhs).is_zero()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactpoly::ratio;
    use crate::normtheory::table::norm_table_oracle_to;

    fn lam(n: i64, d: i64) -> Lambda {
        Lambda::from_ratio(n, d).unwrap()
    }

    #[test]
    fn sum_of_squares_examples() {
        for l in [lam(1, 1), lam(5, 3), lam(-1, 4)] {
            assert!(dette_pointwise(&l, 1, &int(1)));
        }
        assert!(dette_check(&lam(1, 1), 3));
        assert!(dette_check(&lam(-1, 4), 4));
        assert!(dette_check(&lam(2, 7), 0));
    }

    #[test]
    fn sum_of_squares_at_endpoint() {
        for l in [lam(1, 4), lam(3, 2), lam(-1, 4)] {
            for n in 0..20 {
                assert!(dette_endpoint_check(&l, n));
            }
        }
    }

    #[test]
    fn combined_examples() {
        for (l, n) in [(lam(1, 1), 2), (lam(2, 1), 5), (lam(-1, 4), 3)] {
            let base = norm_table_oracle_to(&family(&l, n + 1), n + 1);
            assert!(combined_identity_check(&base, n).unwrap());
        }
        let base = norm_table_oracle_to(&family(&lam(1, 1), 3), 3);
        assert!(combined_identity_check(&base, 1).is_err());
    }

    #[test]
    fn norm_difference_examples() {
        let (lhs, rhs) = lemma21_sides(&lam(1, 1), 2).unwrap();
        // ‖12x² - 2‖² - ‖1‖² = 84/5 - 1
        assert_eq!(lhs, ratio(79, 5));
        assert_eq!(rhs, ratio(79, 5));
        assert!(lemma21_integral_check(&lam(1, 2), 3).unwrap());
        assert!(lemma21_integral_check(&lam(2, 1), 6).unwrap());
        assert!(lemma21_integral_check(&lam(1, 1), 1).is_err());
    }

    #[test]
    fn second_moment_examples() {
        let (lhs, rhs) = lemma23_sides(&lam(1, 1), 0);
        assert_eq!(lhs, ratio(11, 5));
        assert_eq!(rhs, ratio(11, 5));
        let (lhs, rhs) = lemma22_sides(&lam(1, 1), 0);
        assert_eq!(lhs, ratio(79, 15));
        assert_eq!(rhs, ratio(79, 15));
        assert!(lemma22_check(&lam(3, 2), 4));
        assert!(lemma23_check(&lam(3, 2), 4));
        assert!(lemma22_check(&lam(-1, 4), 3));
        assert!(lemma23_check(&lam(-1, 4), 3));
    }

    #[test]
    fn quadratic_completion_pointwise() {
        for l in [lam(1, 1), lam(1, 4), lam(-1, 4)] {
            for n in 0..8 {
                assert!(product_completion_check(&l, n));
            }
        }
    }

    #[test]
    fn perturbed_sides_are_detected() {
        let (lhs, rhs) = lemma21_sides(&lam(3, 2), 4).unwrap();
        assert_eq!(lhs, rhs);
        assert_ne!(lhs + ratio(1, 1_000_000_007), rhs);
    }
}
