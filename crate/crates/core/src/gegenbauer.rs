//! Exact Gegenbauer families `C_n^{(λ)}` for rational `λ` and their structural
//! identities (derivative, index-shift recursions).

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;
use std::sync::{Arc, LazyLock, Mutex};

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

use crate::exactpoly::{int, poly_scale_shift, ratio, DensePoly, Rational};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LambdaError {
    #[error("the case λ = 0 is not considered")]
    Zero,
    #[error("λ = {0} lies outside (-1/2, 0) ∪ (0, ∞)")]
    OutOfRange(Rational),
    #[error("cannot parse {0:?} as an exact rational")]
    Parse(String),
}

/// Validated Gegenbauer index `λ ∈ (-1/2, 0) ∪ (0, ∞)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Lambda(Rational);

impl Lambda {
    pub fn new(value: Rational) -> Result<Self, LambdaError> {
        if value.is_zero() {
            Err(LambdaError::Zero)
        } else if value <= ratio(-1, 2) {
            Err(LambdaError::OutOfRange(value))
        } else {
            Ok(Lambda(value))
        }
    }

    pub fn from_ratio(num: i64, den: i64) -> Result<Self, LambdaError> {
        Self::new(ratio(num, den))
    }

    pub fn value(&self) -> &Rational {
        &self.0
    }

    pub fn to_f64(&self) -> f64 {
        self.0.to_f64().unwrap_or(f64::NAN)
    }

    /// `λ + 1`, which always stays in the index set.
    pub fn raised(&self) -> Lambda {
        Lambda(&self.0 + Rational::one())
    }

    /// `λ - 1` when that is still a valid index.
    pub fn lowered(&self) -> Option<Lambda> {
        Lambda::new(&self.0 - Rational::one()).ok()
    }

    pub fn is_positive(&self) -> bool {
        self.0.is_positive()
    }
}

impl fmt::Display for Lambda {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Parses `p/q`, integers and plain decimals (`0.25` is exactly `1/4`).
pub fn parse_rational(text: &str) -> Result<Rational, LambdaError> {
    let err = || LambdaError::Parse(text.to_string());
    let s = text.trim();
    if s.is_empty() {
        return Err(err());
    }
    if let Some((num, den)) = s.split_once('/') {
        let num = BigInt::from_str(num.trim()).map_err(|_| err())?;
        let den = BigInt::from_str(den.trim()).map_err(|_| err())?;
        if den.is_zero() {
            return Err(err());
        }
        return Ok(Rational::new(num, den));
    }
    let (negative, body) = match s.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, s.strip_prefix('+').unwrap_or(s)),
    };
    let (whole, frac) = body.split_once('.').unwrap_or((body, ""));
    if whole.is_empty() && frac.is_empty() {
        return Err(err());
    }
    if !whole
        .chars()
        .chain(frac.chars())
        .all(|c| c.is_ascii_digit())
    {
        return Err(err());
    }
    let digits = format!("{whole}{frac}");
    let num = BigInt::from_str(&digits).map_err(|_| err())?;
    let den = num_traits::pow(BigInt::from(10), frac.len());
    let value = Rational::new(num, den);
    Ok(if negative { -value } else { value })
}

impl FromStr for Lambda {
    type Err = LambdaError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Lambda::new(parse_rational(s)?)
    }
}

/// `C_0^{(λ)}, …, C_N^{(λ)}` as exact polynomials.
#[derive(Clone, Debug)]
pub struct GegenbauerFamily {
    lambda: Lambda,
    polys: Vec<DensePoly>,
}

impl GegenbauerFamily {
    /// Always contains degrees 0 and 1, so `max_degree` below 1 is raised to 1.
    pub fn build(lambda: Lambda, max_degree: usize) -> Self {
        let two_lambda = int(2) * lambda.value();
        let seed = vec![
            DensePoly::one(),
            poly_scale_shift(&DensePoly::one(), &two_lambda, true),
        ];
        let mut family = GegenbauerFamily {
            lambda,
            polys: seed,
        };
        family.grow(max_degree);
        family
    }

    /// Copy-on-extend: returns a new snapshot covering at least `max_degree`.
    pub fn extended(&self, max_degree: usize) -> Self {
        let mut family = self.clone();
        family.grow(max_degree);
        family
    }

    // (n+1) C_{n+1} = 2(n+λ) x C_n - (n+2λ-1) C_{n-1}
    fn grow(&mut self, max_degree: usize) {
        let lambda = self.lambda.value().clone();
        while self.polys.len() <= max_degree {
            let n = self.polys.len() - 1;
            let nf = int(n as i64);
            let denom = &nf + Rational::one();
            let a = (int(2) * (&nf + &lambda)) / &denom;
            let b = (&nf + int(2) * &lambda - Rational::one()) / &denom;
            let next = &poly_scale_shift(&self.polys[n], &a, true)
                - &poly_scale_shift(&self.polys[n - 1], &b, false);
            self.polys.push(next);
        }
    }

    pub fn lambda(&self) -> &Lambda {
        &self.lambda
    }

    pub fn max_degree(&self) -> usize {
        self.polys.len() - 1
    }

    pub fn polys(&self) -> &[DensePoly] {
        &self.polys
    }

    /// `C_n`, panicking past `max_degree`.
    pub fn poly(&self, n: usize) -> &DensePoly {
        &self.polys[n]
    }

    /// `C_n` with the convention `C_n = 0` for negative `n`.
    pub fn poly_or_zero(&self, n: i64) -> DensePoly {
        if n < 0 {
            DensePoly::zero()
        } else {
            self.polys[n as usize].clone()
        }
    }
}

pub fn build_family(lambda: Lambda, max_degree: usize) -> GegenbauerFamily {
    GegenbauerFamily::build(lambda, max_degree)
}

/// Per-index cache of families; lookups extend the cached snapshot on demand
/// and replace it, never mutating a family already handed out.
#[derive(Default)]
pub struct FamilyCache {
    families: Mutex<HashMap<Lambda, Arc<GegenbauerFamily>>>,
}

impl FamilyCache {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get(&self, lambda: &Lambda, max_degree: usize) -> Arc<GegenbauerFamily> {
        let mut map = self.families.lock().unwrap_or_else(|e| e.into_inner());
        if let Some(found) = map.get(lambda) {
            if found.max_degree() >= max_degree {
                return Arc::clone(found);
            }
        }
        let fresh = match map.get(lambda) {
            Some(old) => old.extended(max_degree.max(old.max_degree() + old.max_degree() / 2)),
            None => GegenbauerFamily::build(lambda.clone(), max_degree),
        };
        let fresh = Arc::new(fresh);
        map.insert(lambda.clone(), Arc::clone(&fresh));
        fresh
    }
}

static SHARED_CACHE: LazyLock<FamilyCache> = LazyLock::new(FamilyCache::new);

/// Process-wide cached family covering at least `max_degree`.
pub fn family(lambda: &Lambda, max_degree: usize) -> Arc<GegenbauerFamily> {
    SHARED_CACHE.get(lambda, max_degree)
}

/// Exact `C_n^{(λ)}(1) = ∏_{j=1}^{n} (2λ + n - j) / n!`.
pub fn endpoint_value(lambda: &Lambda, n: usize) -> Rational {
    // with λ = p/q: ∏ (2p + (n-j) q) / (q^n n!), in integers until the end
    let p = lambda.value().numer();
    let q = lambda.value().denom();
    let two_p = p * 2;
    let mut num = BigInt::one();
    let mut den = BigInt::one();
    for j in 1..=n {
        num *= &two_p + q * BigInt::from(n - j);
        den *= q * BigInt::from(j);
    }
    Rational::new(num, den)
}

/// `C_n^{(λ)}(1)` in double precision via `C_n(1) = C_{n-1}(1) (n + 2λ - 1) / n`.
pub fn endpoint_value_f64(lambda: f64, n: usize) -> f64 {
    (1..=n).fold(1.0, |acc, k| {
        acc * (k as f64 + 2.0 * lambda - 1.0) / k as f64
    })
}

/// The exact polynomial identities relating neighbouring degrees and indices.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum StructuralIdentity {
    /// `d/dx C_{n+1}^{(λ)} = 2λ C_n^{(λ+1)}`
    Derivative,
    /// `(n+2) C_{n+2}^{(λ)} = 2λ (x C_{n+1}^{(λ+1)} - C_n^{(λ+1)})`
    DegreeShift,
    /// `(n+λ) C_n^{(λ)} = λ (C_n^{(λ+1)} - C_{n-2}^{(λ+1)})`
    IndexDifference,
    /// `C_n^{(λ+1)} + C_{n-2}^{(λ+1)} = 2x C_{n-1}^{(λ+1)} + C_n^{(λ)}`
    SumDifference,
}

impl StructuralIdentity {
    pub const ALL: [StructuralIdentity; 4] = [
        StructuralIdentity::Derivative,
        StructuralIdentity::DegreeShift,
        StructuralIdentity::IndexDifference,
        StructuralIdentity::SumDifference,
    ];

    pub fn name(self) -> &'static str {
        match self {
            StructuralIdentity::Derivative => "derivative",
            StructuralIdentity::DegreeShift => "degree-shift recursion",
            StructuralIdentity::IndexDifference => "index-difference recursion",
            StructuralIdentity::SumDifference => "sum-difference identity",
        }
    }

    /// Left minus right side, as an exact polynomial. Zero iff the identity holds.
    pub fn residual(self, lambda: &Lambda, n: usize) -> DensePoly {
        let lam = lambda.value();
        let up = lambda.raised();
        let base = family(lambda, n + 2);
        let lifted = family(&up, n + 2);
        let n_i = n as i64;
        let two = int(2);
        match self {
            StructuralIdentity::Derivative => {
                let lhs = base.poly(n + 1).derivative();
                let rhs = lifted.poly(n) * &(&two * lam);
                &lhs - &rhs
            }
            StructuralIdentity::DegreeShift => {
                let lhs = base.poly(n + 2) * &int(n_i + 2);
                let inner =
                    &poly_scale_shift(lifted.poly(n + 1), &Rational::one(), true) - lifted.poly(n);
                let rhs = &inner * &(&two * lam);
                &lhs - &rhs
            }
            StructuralIdentity::IndexDifference => {
                let lhs = base.poly(n) * &(int(n_i) + lam);
                let rhs = &(lifted.poly(n) - &lifted.poly_or_zero(n_i - 2)) * lam;
                &lhs - &rhs
            }
            StructuralIdentity::SumDifference => {
                let lhs = lifted.poly(n) + &lifted.poly_or_zero(n_i - 2);
                let rhs =
                    &poly_scale_shift(&lifted.poly_or_zero(n_i - 1), &two, true) + base.poly(n);
                &lhs - &rhs
            }
        }
    }

    pub fn holds(self, lambda: &Lambda, n: usize) -> bool {
        self.residual(lambda, n).is_zero()
    }
}

pub fn check_derivative_identity(lambda: &Lambda, n: usize) -> bool {
    StructuralIdentity::Derivative.holds(lambda, n)
}

/// Degree-shift, index-difference and sum-difference identities at `(λ, n)`,
/// with `C_k = 0` for negative `k`.
pub fn check_recursion_identities(lambda: &Lambda, n: usize) -> bool {
    [
        StructuralIdentity::DegreeShift,
        StructuralIdentity::IndexDifference,
        StructuralIdentity::SumDifference,
    ]
    .into_iter()
    .all(|id| id.holds(lambda, n))
}

/// Whether every coefficient of `p` has the sign pattern of an `n`-parity
/// polynomial, i.e. `p(-x) = (-1)^n p(x)`.
pub fn has_parity(p: &DensePoly, n: usize) -> bool {
    let reflected = p.reflect();
    if n.is_multiple_of(2) {
        reflected == *p
    } else {
        reflected == -p
    }
}

/// `|C_n(x)| ≤ C_n(1)` at a given point (meaningful for λ > 0).
pub fn endpoint_dominates(family: &GegenbauerFamily, n: usize, x: &Rational) -> bool {
    let value = crate::exactpoly::poly_eval(family.poly(n), x);
    value.abs() <= endpoint_value(family.lambda(), n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactpoly::poly_eval;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};

    fn lam(n: i64, d: i64) -> Lambda {
        Lambda::from_ratio(n, d).unwrap()
    }

    #[test]
    fn lambda_domain() {
        assert_eq!(Lambda::from_ratio(0, 1), Err(LambdaError::Zero));
        assert!(matches!(
            Lambda::from_ratio(-1, 2),
            Err(LambdaError::OutOfRange(_))
        ));
        assert!(matches!(
            Lambda::from_ratio(-3, 4),
            Err(LambdaError::OutOfRange(_))
        ));
        assert!(Lambda::from_ratio(-1, 4).is_ok());
        assert!(Lambda::from_ratio(7, 3).is_ok());
        assert_eq!(lam(-1, 4).raised(), lam(3, 4));
        assert_eq!(lam(3, 4).lowered(), Some(lam(-1, 4)));
        assert_eq!(lam(1, 4).lowered(), None);
        assert_eq!(lam(1, 1).lowered(), None);
    }

    #[test]
    fn parses_exact_decimals_and_fractions() {
        assert_eq!(parse_rational("0.25").unwrap(), ratio(1, 4));
        assert_eq!(parse_rational("-1/4").unwrap(), ratio(-1, 4));
        assert_eq!(parse_rational("2").unwrap(), int(2));
        assert_eq!(parse_rational("-.5").unwrap(), ratio(-1, 2));
        assert_eq!(parse_rational("1.10").unwrap(), ratio(11, 10));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("abc").is_err());
        assert!(parse_rational("").is_err());
        assert_eq!("0".parse::<Lambda>(), Err(LambdaError::Zero));
        assert_eq!("0.0".parse::<Lambda>(), Err(LambdaError::Zero));
        assert_eq!("3/2".parse::<Lambda>().unwrap(), lam(3, 2));
    }

    #[test]
    fn family_examples() {
        let f1 = build_family(lam(1, 1), 2);
        assert_eq!(f1.poly(2), &DensePoly::from_ints(&[-1, 0, 4]));
        let f_half = build_family(lam(1, 2), 2);
        assert_eq!(
            f_half.poly(2),
            &DensePoly::new(vec![ratio(-1, 2), int(0), ratio(3, 2)])
        );
        for l in [lam(3, 7), lam(-1, 4), lam(5, 2)] {
            let f = build_family(l.clone(), 3);
            assert_eq!(f.poly(0), &DensePoly::one());
            assert_eq!(f.poly(1), &DensePoly::new(vec![int(0), int(2) * l.value()]));
        }
        assert_eq!(build_family(lam(1, 1), 0).max_degree(), 1);
    }

    #[test]
    fn endpoint_examples() {
        assert_eq!(endpoint_value(&lam(2, 3), 0), int(1));
        assert_eq!(endpoint_value(&lam(1, 1), 3), int(4));
        assert_eq!(endpoint_value(&lam(1, 2), 3), int(1));
        let l = lam(-1, 4);
        let f = build_family(l.clone(), 12);
        for n in 0..=12 {
            assert_eq!(endpoint_value(&l, n), poly_eval(f.poly(n), &int(1)));
        }
        let approx = endpoint_value_f64(2.0, 10);
        let exact = endpoint_value(&lam(2, 1), 10).to_f64().unwrap();
        assert!((approx - exact).abs() < 1e-12 * exact);
    }

    #[test]
    fn derivative_examples() {
        assert!(check_derivative_identity(&lam(1, 1), 0));
        assert!(check_derivative_identity(&lam(1, 2), 1));
        assert!(check_derivative_identity(&lam(-1, 4), 2));
    }

    #[test]
    fn recursion_examples() {
        assert!(check_recursion_identities(&lam(1, 1), 2));
        assert!(check_recursion_identities(&lam(3, 2), 5));
        assert!(check_recursion_identities(&lam(-1, 4), 4));
    }

    #[test]
    fn low_degree_zero_convention() {
        for l in [lam(1, 3), lam(-1, 4)] {
            for n in 0..2 {
                for id in StructuralIdentity::ALL {
                    assert!(id.holds(&l, n), "{} at n={n}", id.name());
                }
            }
        }
    }

    #[test]
    fn leading_coefficient_positive_and_degree_exact() {
        let f = build_family(lam(1, 4), 20);
        for n in 0..=20 {
            let p = f.poly(n);
            assert_eq!(p.degree(), Some(n));
            assert!(p.leading_coeff().unwrap().is_positive());
        }
    }

    #[test]
    fn parity_holds() {
        for l in [lam(1, 4), lam(-1, 4), lam(5, 2)] {
            let f = build_family(l, 25);
            for n in 0..=25 {
                assert!(has_parity(f.poly(n), n));
            }
        }
    }

    #[test]
    fn endpoint_dominance_at_random_points() {
        let mut rng = rand::rngs::StdRng::seed_from_u64(7);
        for l in [lam(1, 4), lam(1, 1), lam(5, 2)] {
            let f = build_family(l, 16);
            for _ in 0..1000 {
                let d: i64 = rng.gen_range(1..=200);
                let x = ratio(rng.gen_range(-d..=d), d);
                let n = rng.gen_range(0..=16);
                assert!(endpoint_dominates(&f, n, &x));
            }
        }
    }

    #[test]
    fn index_raising_endpoint_relation() {
        for l in [lam(1, 4), lam(-1, 4), lam(3, 2)] {
            let two_l = int(2) * l.value();
            for n in 0..30 {
                let nn = int(n as i64);
                let lhs = endpoint_value(&l.raised(), n) * &two_l * (&two_l + int(1));
                let rhs = (&two_l + &nn + int(1)) * (&two_l + &nn) * endpoint_value(&l, n);
                assert_eq!(lhs, rhs);
            }
        }
    }

    #[test]
    fn cache_extends_without_mutating_snapshots() {
        let cache = FamilyCache::new();
        let l = lam(2, 5);
        let small = cache.get(&l, 3);
        let big = cache.get(&l, 10);
        assert_eq!(small.max_degree(), 3);
        assert!(big.max_degree() >= 10);
        assert_eq!(small.poly(3), big.poly(3));
        assert!(Arc::ptr_eq(&big, &cache.get(&l, 5)));
    }

    /// Coefficient of α^n in (1 - 2xα + α²)^{-λ}, expanded as
    /// Σ_k (λ)_k / k! · u^k with u = 2xα - α², truncated at α^n.
    fn generating_function_coefficient(lambda: &Rational, n: usize) -> DensePoly {
        // series in α with polynomial-in-x coefficients
        let u: Vec<DensePoly> = vec![
            DensePoly::zero(),
            DensePoly::from_ints(&[0, 2]),
            DensePoly::from_ints(&[-1]),
        ];
        let mul_series = |a: &[DensePoly], b: &[DensePoly]| -> Vec<DensePoly> {
            let mut out = vec![DensePoly::zero(); n + 1];
            for (i, ai) in a.iter().enumerate() {
                for (j, bj) in b.iter().enumerate() {
                    if i + j <= n {
                        out[i + j] = &out[i + j] + &(ai * bj);
                    }
                }
            }
            out
        };
        let mut power: Vec<DensePoly> = vec![DensePoly::zero(); n + 1];
        power[0] = DensePoly::one();
        let mut coeff = Rational::one();
        let mut total = DensePoly::zero();
        for k in 0..=n {
            if k > 0 {
                power = mul_series(&power, &u);
                coeff = coeff * (lambda + int(k as i64 - 1)) / int(k as i64);
            }
            total = &total + &(&power[n] * &coeff);
        }
        total
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]
        #[test]
        fn matches_generating_function(num in -7i64..40, den in 1i64..9, n in 0usize..=8) {
            let value = ratio(num, den);
            prop_assume!(Lambda::new(value.clone()).is_ok());
            let l = Lambda::new(value.clone()).unwrap();
            let f = build_family(l, 8);
            prop_assert_eq!(f.poly(n), &generating_function_coefficient(&value, n));
        }
    }
}
