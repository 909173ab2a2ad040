use gegenorm::exactpoly::{exact_l2_norm, exact_weighted_l2_norm, ratio, Rational};
use gegenorm::gegenbauer::{endpoint_value, family, GegenbauerFamily, Lambda};
use gegenorm::normtheory::{
    closed_form_lambda1, closed_form_lambda1_in, closed_form_lambda2, lemma21_sides, lift_norms,
    norm_table_oracle, norm_table_oracle_to, weighted_norm_closed, ExactEndpoints, ExactTable,
    FloatEndpoints, FloatTable, NormScalar, NormTable,
};
use proptest::prelude::*;

fn lam(p: i64, q: i64) -> Lambda {
    Lambda::from_ratio(p, q).unwrap()
}

fn oracle(lambda: &Lambda, max_degree: usize) -> ExactTable {
    norm_table_oracle_to(&family(lambda, max_degree), max_degree)
}

fn lambda_strategy() -> impl Strategy<Value = Lambda> {
    (1i64..=12, -5i64..=40).prop_filter_map("index outside the admissible range", |(q, p)| {
        Lambda::from_ratio(p, q).ok()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn lift_matches_oracle_for_random_index(lambda in lambda_strategy(), n_max in 2usize..24) {
        let lifted = lift_norms(&oracle(&lambda, n_max), &ExactEndpoints(lambda.clone()), n_max).unwrap();
        let expected = oracle(&lambda.raised(), n_max - 2);
        prop_assert_eq!(lifted.norms(), expected.norms());
    }

    #[test]
    fn weighted_closed_form_matches_oracle(lambda in lambda_strategy(), n in 1usize..20) {
        let base = oracle(&lambda, n + 1);
        let w = weighted_norm_closed(&base, &ExactEndpoints(lambda.clone()), n).unwrap();
        prop_assert_eq!(w.degree, n - 1);
        prop_assert_eq!(w.value, exact_weighted_l2_norm(family(&lambda.raised(), n).poly(n - 1)));
    }

    #[test]
    fn lifted_norms_step_by_difference_identity(lambda in lambda_strategy(), n in 2usize..16) {
        let lifted = lift_norms(&oracle(&lambda, n + 2), &ExactEndpoints(lambda.clone()), n + 2).unwrap();
        let (lhs, rhs) = lemma21_sides(&lambda, n).unwrap();
        prop_assert_eq!(lhs.clone(), rhs);
        prop_assert_eq!(lifted.norm(n).clone() - lifted.norm(n - 2).clone(), lhs);
    }
}

#[test]
fn lift_equals_oracle_on_reference_indices() {
    for (p, q) in [(-1, 4), (1, 4), (1, 2), (1, 1), (3, 2), (2, 1), (5, 2)] {
        let lambda = lam(p, q);
        let lifted = lift_norms(&oracle(&lambda, 40), &ExactEndpoints(lambda.clone()), 40).unwrap();
        assert_eq!(
            lifted.norms(),
            oracle(&lambda.raised(), 38).norms(),
            "lambda {lambda}"
        );
    }
}

#[test]
fn chained_lift_from_one_half_to_five_halves() {
    let half = lam(1, 2);
    let three_halves = lift_norms(&oracle(&half, 30), &ExactEndpoints(half.clone()), 30).unwrap();
    let five_halves = lift_norms(&three_halves, &ExactEndpoints(lam(3, 2)), 28).unwrap();
    assert_eq!(five_halves.lambda(), &lam(5, 2));
    assert_eq!(five_halves.norms(), oracle(&lam(5, 2), 26).norms());
}

#[test]
fn sum_of_differences_telescopes() {
    // ‖C_n‖² = ‖C_{n mod 2}‖² + Σ differences, every difference from base-index data alone
    let lambda = lam(3, 4);
    let upper = oracle(&lambda.raised(), 30);
    for n in 2..=30usize {
        let mut total = upper.norm(n % 2).clone();
        for m in ((n % 2) + 2..=n).step_by(2) {
            total += lemma21_sides(&lambda, m).unwrap().1;
        }
        assert_eq!(&total, upper.norm(n), "n = {n}");
    }
}

#[test]
fn closed_forms_match_oracle_and_lift() {
    let one = lam(1, 1);
    let base = norm_table_oracle(&GegenbauerFamily::build(one.clone(), 52));
    for n in 0..=50 {
        assert_eq!(&closed_form_lambda1(n), base.norm(n), "index 1, n = {n}");
    }
    // the closed-form table at index 1 lifts to the closed forms at index 2
    let closed = NormTable::from_norms(one.clone(), (0..=52).map(closed_form_lambda1).collect());
    let lifted = lift_norms(&closed, &ExactEndpoints(one), 52).unwrap();
    let two = family(&lam(2, 1), 50);
    for n in 2..=52 {
        let (weighted, plain) = closed_form_lambda2(n).unwrap();
        assert_eq!(&plain, lifted.norm(n - 2), "n = {n}");
        assert_eq!(weighted, exact_weighted_l2_norm(two.poly(n - 2)), "n = {n}");
    }
}

#[test]
fn float_lift_from_closed_forms_tracks_exact() {
    let base = FloatTable::from_norms(
        lam(1, 1),
        (0..=80).map(closed_form_lambda1_in::<f64>).collect(),
    );
    let lifted = lift_norms(&base, &FloatEndpoints(1.0), 80).unwrap();
    for n in 2..=80 {
        let (_, plain) = closed_form_lambda2(n).unwrap();
        let exact = NormScalar::to_f64(&plain);
        let got = *lifted.norm(n - 2);
        assert!(
            ((got - exact) / exact).abs() < 1e-12,
            "n = {n}: {got} vs {exact}"
        );
    }
}

#[test]
fn weighted_norm_is_below_plain_norm() {
    for lambda in [lam(-1, 4), lam(1, 3), lam(7, 5)] {
        let fam = family(&lambda, 25);
        for p in fam.polys().iter().take(26) {
            assert!(exact_weighted_l2_norm(p) < exact_l2_norm(p));
        }
    }
}

#[test]
fn endpoint_values_are_rising_factorials() {
    // C_n^{(λ)}(1) = (2λ)_n / n!
    let lambda = lam(-1, 4);
    let mut expected = Rational::from_integer(1.into());
    for n in 0..30usize {
        assert_eq!(endpoint_value(&lambda, n), expected);
        expected = expected * (ratio(-1, 2) + ratio(n as i64, 1)) / ratio(n as i64 + 1, 1);
    }
}
