use crate::exactpoly::{exact_l2_norm, int, Rational};
use crate::gegenbauer::{endpoint_value, endpoint_value_f64, GegenbauerFamily, Lambda};

use super::scalar::{Accumulator, Mode, NormScalar};
use super::NormError;

/// `‖C_k^{(λ)}‖₂²` for `k = 0..len` together with the running sums
/// `prefix[n] = Σ_{k<n} (λ+k)/λ · ‖C_k^{(λ)}‖₂²`.
#[derive(Clone, Debug, PartialEq)]
pub struct NormTable<S> {
    lambda: Lambda,
    norms: Vec<S>,
    prefix: Vec<S>,
}

pub type ExactTable = NormTable<Rational>;
pub type FloatTable = NormTable<f64>;

impl<S: NormScalar> NormTable<S> {
    pub fn from_norms(lambda: Lambda, norms: Vec<S>) -> Self {
        let lam = S::from_rational(lambda.value());
        let mut acc = S::Acc::default();
        let mut prefix = Vec::with_capacity(norms.len() + 1);
        prefix.push(acc.value());
        for (k, norm) in norms.iter().enumerate() {
            let weight = (lam.clone() + S::from_int(k as i64)) / lam.clone();
            acc.push(weight * norm.clone());
            prefix.push(acc.value());
        }
        NormTable {
            lambda,
            norms,
            prefix,
        }
    }

    pub fn lambda(&self) -> &Lambda {
        &self.lambda
    }

    pub fn mode(&self) -> Mode {
        S::MODE
    }

    pub fn norms(&self) -> &[S] {
        &self.norms
    }

    pub fn norm(&self, k: usize) -> &S {
        &self.norms[k]
    }

    /// Highest degree covered.
    pub fn max_degree(&self) -> usize {
        self.norms.len().saturating_sub(1)
    }

    pub fn len(&self) -> usize {
        self.norms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.norms.is_empty()
    }

    /// `Σ_{k=0}^{n-1} (λ+k)/λ · ‖C_k‖₂²`.
    pub fn prefix(&self, n: usize) -> &S {
        &self.prefix[n]
    }

    pub fn truncated(&self, len: usize) -> Self {
        NormTable {
            lambda: self.lambda.clone(),
            norms: self.norms[..len.min(self.norms.len())].to_vec(),
            prefix: self.prefix[..=len.min(self.norms.len())].to_vec(),
        }
    }

    fn require_degree(&self, degree: usize) -> Result<(), NormError> {
        if self.norms.len() <= degree {
            Err(NormError::TableTooShort {
                needed: degree,
                available: self.max_degree(),
            })
        } else {
            Ok(())
        }
    }
}

impl FloatTable {
    pub fn from_exact(table: &ExactTable) -> Self {
        NormTable::from_norms(
            table.lambda.clone(),
            table
                .norms
                .iter()
                .map(<f64 as NormScalar>::from_rational)
                .collect(),
        )
    }
}

/// Supplies `C_n^{(λ)}(1)` in the table's scalar type.
pub trait EndpointProvider<S> {
    fn endpoint(&self, n: usize) -> S;
}

impl<S, F: Fn(usize) -> S> EndpointProvider<S> for F {
    fn endpoint(&self, n: usize) -> S {
        self(n)
    }
}

/// Exact endpoint values from the product formula.
pub struct ExactEndpoints(pub Lambda);

impl EndpointProvider<Rational> for ExactEndpoints {
    fn endpoint(&self, n: usize) -> Rational {
        endpoint_value(&self.0, n)
    }
}

pub struct FloatEndpoints(pub f64);

impl EndpointProvider<f64> for FloatEndpoints {
    fn endpoint(&self, n: usize) -> f64 {
        endpoint_value_f64(self.0, n)
    }
}

/// Table of exact norms by direct integration of every polynomial in the family.
pub fn norm_table_oracle(family: &GegenbauerFamily) -> ExactTable {
    let norms = family.polys().iter().map(exact_l2_norm).collect();
    NormTable::from_norms(family.lambda().clone(), norms)
}

/// Same as [`norm_table_oracle`] but only up to `max_degree`.
pub fn norm_table_oracle_to(family: &GegenbauerFamily, max_degree: usize) -> ExactTable {
    let norms = family.polys()[..=max_degree]
        .iter()
        .map(exact_l2_norm)
        .collect();
    NormTable::from_norms(family.lambda().clone(), norms)
}

/// `‖C_{n-2}^{(λ+1)}‖₂²` from the base table at `λ`:
///
/// `(n² - 2λn)/(16λ³)·C_n(1)² + n(2n+1)/(8λ²)·‖C_n‖² - Σ_{k<n} (λ+k)/(4λ²)·‖C_k‖²`
pub fn lifted_norm<S: NormScalar>(
    base: &NormTable<S>,
    endpoints: &impl EndpointProvider<S>,
    n: usize,
) -> Result<S, NormError> {
    if n < 2 {
        return Err(NormError::DegreeTooSmall { minimum: 2, got: n });
    }
    base.require_degree(n)?;
    let lam = S::from_rational(base.lambda.value());
    let nn = S::from_int(n as i64);
    let two = S::from_int(2);
    let lam2 = lam.clone() * lam.clone();
    let lam3 = lam2.clone() * lam.clone();
    let e = endpoints.endpoint(n);

    let endpoint_term = (nn.clone() * nn.clone() - two.clone() * lam.clone() * nn.clone())
        / (S::from_int(16) * lam3)
        * e.clone()
        * e;
    let norm_term =
        nn.clone() * (two * nn + S::from_int(1)) / (S::from_int(8) * lam2) * base.norms[n].clone();
    let sum_term = base.prefix[n].clone() / (S::from_int(4) * lam);

    let mut acc = S::Acc::default();
    acc.push(endpoint_term);
    acc.push(norm_term);
    acc.push(-sum_term);
    Ok(acc.value())
}

/// Lifts the table at `λ` to a table at `λ + 1` covering degrees `0..=n_max-2`.
///
/// Degrees 0 and 1 are seeded from `C_0 = 1`, `C_1 = 2(λ+1)x`; the recursion's
/// own values for those degrees must agree with the seeds.
pub fn lift_norms<S: NormScalar>(
    base: &NormTable<S>,
    endpoints: &impl EndpointProvider<S>,
    n_max: usize,
) -> Result<NormTable<S>, NormError> {
    if n_max < 2 {
        return Err(NormError::DegreeTooSmall {
            minimum: 2,
            got: n_max,
        });
    }
    base.require_degree(n_max)?;
    let raised = base.lambda.raised();
    let mu = raised.value();
    let seeds = [
        S::from_int(1),
        S::from_rational(&(int(4) * mu * mu / int(3))),
    ];

    let mut norms = Vec::with_capacity(n_max - 1);
    for n in 2..=n_max {
        let value = lifted_norm(base, endpoints, n)?;
        let degree = n - 2;
        if let Some(seed) = seeds.get(degree) {
            if !value.agrees_with(seed) {
                return Err(NormError::SeedMismatch {
                    degree,
                    seed: seed.to_f64(),
                    recursion: value.to_f64(),
                });
            }
            norms.push(seed.clone());
        } else {
            norms.push(value);
        }
    }
    Ok(NormTable::from_norms(raised, norms))
}

/// `‖√(1-x²) C_{n-1}^{(λ+1)}‖₂²` together with its index bookkeeping.
#[derive(Clone, Debug, PartialEq)]
pub struct WeightedNorm<S> {
    /// Base index; the polynomial has index `λ + 1`.
    pub lambda: Lambda,
    pub n: usize,
    /// Degree of the weighted polynomial, `n - 1`.
    pub degree: usize,
    pub value: S,
}

/// Closed form for the weighted norm from the base table:
///
/// `C_n(1)²·(n+2λ)/(n+1)·(1-2λ)/(8λ²) + (n+1)(2n+3)/(8λ²)·‖C_{n+1}‖² - (n+2λ)/(8λ²)·‖C_n‖²`
pub fn weighted_norm_closed<S: NormScalar>(
    base: &NormTable<S>,
    endpoints: &impl EndpointProvider<S>,
    n: usize,
) -> Result<WeightedNorm<S>, NormError> {
    if n < 1 {
        return Err(NormError::DegreeTooSmall { minimum: 1, got: n });
    }
    base.require_degree(n + 1)?;
    let lam = S::from_rational(base.lambda.value());
    let one = S::from_int(1);
    let two = S::from_int(2);
    let nn = S::from_int(n as i64);
    let eight_lam2 = S::from_int(8) * lam.clone() * lam.clone();
    let e = endpoints.endpoint(n);
    let n_plus_2lam = nn.clone() + two.clone() * lam.clone();

    let endpoint_term = e.clone()
        * e
        * (n_plus_2lam.clone() / (nn.clone() + one.clone()))
        * ((one.clone() - two.clone() * lam) / eight_lam2.clone());
    let next_term = (nn.clone() + one) * (two * nn + S::from_int(3)) / eight_lam2.clone()
        * base.norms[n + 1].clone();
    let this_term = base.norms[n].clone() * n_plus_2lam / eight_lam2;

    let mut acc = S::Acc::default();
    acc.push(endpoint_term);
    acc.push(next_term);
    acc.push(-this_term);
    Ok(WeightedNorm {
        lambda: base.lambda.clone(),
        n,
        degree: n - 1,
        value: acc.value(),
    })
}

/// The four-term expression for `‖C_{n-2}^{(λ+1)}‖₂²` that eliminates the
/// prefix sum in favour of `‖C_{n+1}^{(λ)}‖₂²`.
pub fn remark_identity_value<S: NormScalar>(
    base: &NormTable<S>,
    endpoints: &impl EndpointProvider<S>,
    n: usize,
) -> Result<S, NormError> {
    if n < 2 {
        return Err(NormError::DegreeTooSmall { minimum: 2, got: n });
    }
    base.require_degree(n + 1)?;
    let lam = S::from_rational(base.lambda.value());
    let one = S::from_int(1);
    let two = S::from_int(2);
    let nn = S::from_int(n as i64);
    let lam3 = lam.clone() * lam.clone() * lam.clone();
    let d16 = S::from_int(16) * lam3.clone();
    let d32 = S::from_int(32) * lam3;
    let e = endpoints.endpoint(n);
    let e2 = e.clone() * e;
    let four_lam = S::from_int(4) * lam.clone();

    let t1 = (nn.clone() * nn.clone() - two.clone() * lam.clone() * nn.clone()) / d16 * e2.clone();
    let t2 = (two.clone() * nn.clone() * nn.clone() * (four_lam.clone() - one.clone())
        + nn.clone() * (four_lam + one.clone())
        + two.clone() * lam.clone())
        / d32.clone()
        * base.norms[n].clone();
    let t3 = e2 * (nn.clone() + two.clone() * lam.clone()) / (nn.clone() + one.clone())
        * (one.clone() - two.clone() * lam)
        / d32.clone();
    let t4 = (nn.clone() + one) * (two * nn + S::from_int(3)) / d32 * base.norms[n + 1].clone();

    let mut acc = S::Acc::default();
    acc.push(t1);
    acc.push(t2);
    acc.push(-t3);
    acc.push(-t4);
    Ok(acc.value())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactpoly::{exact_weighted_l2_norm, ratio};
    use crate::gegenbauer::family;

    fn lam(n: i64, d: i64) -> Lambda {
        Lambda::from_ratio(n, d).unwrap()
    }

    fn oracle(l: &Lambda, max_degree: usize) -> ExactTable {
        norm_table_oracle_to(&family(l, max_degree), max_degree)
    }

    #[test]
    fn oracle_examples() {
        let t = oracle(&lam(1, 1), 3);
        assert_eq!(
            t.norms(),
            &[int(1), ratio(4, 3), ratio(23, 15), ratio(176, 105)]
        );
        for l in [lam(-1, 4), lam(7, 3)] {
            assert_eq!(oracle(&l, 2).norm(0), &int(1));
        }
        let legendre = oracle(&lam(1, 2), 20);
        for k in 0..=20 {
            assert_eq!(legendre.norm(k), &ratio(1, 2 * k as i64 + 1));
        }
    }

    #[test]
    fn table_invariants() {
        let l = lam(3, 5);
        let t = oracle(&l, 12);
        assert_eq!(t.norm(1), &(int(4) * l.value() * l.value() / int(3)));
        assert_eq!(t.prefix(0), &int(0));
        for n in 1..=12 {
            let step = (l.value() + int(n as i64 - 1)) / l.value() * t.norm(n - 1);
            assert_eq!(t.prefix(n) - t.prefix(n - 1), step);
            assert!(t.norm(n) > &int(0));
        }
    }

    #[test]
    fn lift_examples() {
        let l = lam(1, 1);
        let base = oracle(&l, 3);
        let ends = ExactEndpoints(l.clone());
        assert_eq!(lifted_norm(&base, &ends, 2).unwrap(), int(1));
        assert_eq!(lifted_norm(&base, &ends, 3).unwrap(), ratio(16, 3));

        let base = oracle(&l, 42);
        let lifted = lift_norms(&base, &ends, 42).unwrap();
        assert_eq!(lifted.lambda(), &lam(2, 1));
        assert_eq!(lifted.max_degree(), 40);
        assert_eq!(lifted, oracle(&lam(2, 1), 40));
    }

    #[test]
    fn lift_degenerate_and_errors() {
        let l = lam(1, 3);
        let base = oracle(&l, 5);
        let ends = ExactEndpoints(l.clone());
        let t = lift_norms(&base, &ends, 2).unwrap();
        assert_eq!(t.norms(), &[int(1)]);
        assert!(matches!(
            lift_norms(&base, &ends, 1),
            Err(NormError::DegreeTooSmall { .. })
        ));
        assert!(matches!(
            lift_norms(&base, &ends, 6),
            Err(NormError::TableTooShort {
                needed: 6,
                available: 5
            })
        ));
    }

    #[test]
    fn lift_detects_corrupted_seed_overlap() {
        let l = lam(1, 1);
        let good = oracle(&l, 4);
        let mut norms = good.norms().to_vec();
        norms[2] += ratio(1, 1000);
        let bad = NormTable::from_norms(l.clone(), norms);
        assert!(matches!(
            lift_norms(&bad, &ExactEndpoints(l), 4),
            Err(NormError::SeedMismatch { degree: 0, .. })
        ));
    }

    #[test]
    fn weighted_examples() {
        let l = lam(1, 1);
        let base = oracle(&l, 3);
        let ends = ExactEndpoints(l);
        let w = weighted_norm_closed(&base, &ends, 1).unwrap();
        assert_eq!(w.value, ratio(2, 3));
        assert_eq!(w.degree, 0);
        // ∫₀¹ (1 - x²)(4x)² dx = 16/3 - 16/5
        assert_eq!(
            weighted_norm_closed(&base, &ends, 2).unwrap().value,
            ratio(32, 15)
        );
        assert!(matches!(
            weighted_norm_closed(&base, &ends, 3),
            Err(NormError::TableTooShort { .. })
        ));

        let l = lam(1, 2);
        let base = oracle(&l, 4);
        let w = weighted_norm_closed(&base, &ExactEndpoints(l.clone()), 3).unwrap();
        assert_eq!(
            w.value,
            exact_weighted_l2_norm(family(&l.raised(), 2).poly(2))
        );
    }

    #[test]
    fn remark_identity_examples() {
        for (l, n) in [(lam(1, 1), 2), (lam(2, 1), 5), (lam(-1, 4), 3)] {
            let base = oracle(&l, n + 1);
            let value = remark_identity_value(&base, &ExactEndpoints(l.clone()), n).unwrap();
            assert_eq!(value, exact_l2_norm(family(&l.raised(), n).poly(n - 2)));
        }
    }

    #[test]
    fn float_lift_tracks_exact() {
        let l = lam(1, 4);
        let exact = oracle(&l, 60);
        let float = FloatTable::from_exact(&exact);
        let lifted_exact = lift_norms(&exact, &ExactEndpoints(l.clone()), 60).unwrap();
        let lifted_float = lift_norms(&float, &FloatEndpoints(0.25), 60).unwrap();
        for (a, b) in lifted_exact.norms().iter().zip(lifted_float.norms()) {
            let a = NormScalar::to_f64(a);
            assert!((a - b).abs() <= 1e-12 * a, "{a} vs {b}");
        }
    }
}
