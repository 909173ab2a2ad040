//! Float-mode base tables.
//!
//! `λ = 1` and `λ = 2` come from the closed forms. Any other index uses the
//! exact oracle rounded to double up to the exact-mode degree budget, and
//! Gauss–Legendre quadrature of the three-term recurrence beyond it. With
//! `max_degree + 2` nodes the rule is exact (up to rounding) for every
//! integrand involved.

use std::f64::consts::PI;

use crate::exactpoly::{exact_weighted_l2_norm, int};
use crate::gegenbauer::{family, Lambda};

use super::closed_form::{closed_form_lambda1_in, closed_form_lambda2_in};
use super::scalar::{Accumulator, CompensatedSum, NormScalar};
use super::table::{norm_table_oracle_to, FloatTable, NormTable};
use super::NormSource;

/// Float norms at one index with the weighted norms of the same polynomials
/// and where each plain value came from.
#[derive(Clone, Debug)]
pub struct BaseTable {
    pub table: FloatTable,
    /// `‖√(1-x²) C_k^{(λ)}‖₂²`.
    pub weighted: Vec<f64>,
    pub sources: Vec<NormSource>,
}

/// Nodes and weights of the `m`-point Gauss–Legendre rule on `[-1, 1]`.
pub fn gauss_legendre(m: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; m];
    let mut weights = vec![0.0; m];
    for i in 0..m.div_ceil(2) {
        let mut x = (PI * (i as f64 + 0.75) / (m as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(m, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(m, x);
        dp = if d != 0.0 { d } else { dp };
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[m - 1 - i] = x;
        weights[i] = w;
        weights[m - 1 - i] = w;
    }
    (nodes, weights)
}

fn legendre_with_derivative(m: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    for k in 2..=m {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    let m = m as f64;
    (p1, m * (x * p1 - p0) / (x * x - 1.0))
}

/// `(‖C_k‖₂², ‖√(1-x²) C_k‖₂²)` for `k = 0..=max_degree` by quadrature on `[0, 1]`.
pub fn quadrature_norms(lambda: f64, max_degree: usize) -> (Vec<f64>, Vec<f64>) {
    let (nodes, weights) = gauss_legendre(max_degree + 2);
    let mut plain = vec![CompensatedSum::default(); max_degree + 1];
    let mut weighted = vec![CompensatedSum::default(); max_degree + 1];
    for (t, w) in nodes.iter().zip(&weights) {
        let x = 0.5 * (t + 1.0);
        let w = 0.5 * w;
        let (mut prev, mut cur) = (0.0, 1.0);
        for k in 0..=max_degree {
            plain[k].push(w * cur * cur);
            weighted[k].push(w * (1.0 - x * x) * cur * cur);
            let kf = k as f64;
            let next = if k == 0 {
                2.0 * lambda * x
            } else {
                (2.0 * (kf + lambda) * x * cur - (kf + 2.0 * lambda - 1.0) * prev) / (kf + 1.0)
            };
            prev = cur;
            cur = next;
        }
    }
    (
        plain.iter().map(Accumulator::value).collect(),
        weighted.iter().map(Accumulator::value).collect(),
    )
}

pub fn float_base_table(lambda: &Lambda, max_degree: usize, budget: usize) -> BaseTable {
    let exact_upto = max_degree.min(budget);
    let (mut weighted, mut weighted_sources) = (Vec::new(), Vec::new());
    let quad = (max_degree > exact_upto).then(|| quadrature_norms(lambda.to_f64(), max_degree));

    let fam = family(lambda, exact_upto.max(1));
    for k in 0..=max_degree {
        if k <= exact_upto {
            weighted.push(<f64 as NormScalar>::from_rational(&exact_weighted_l2_norm(
                fam.poly(k),
            )));
            weighted_sources.push(NormSource::Oracle);
        } else if let Some((_, qw)) = &quad {
            weighted.push(qw[k]);
            weighted_sources.push(NormSource::Quadrature);
        }
    }

    let (norms, sources): (Vec<f64>, Vec<NormSource>) = if *lambda.value() == int(1) {
        (0..=max_degree)
            .map(|k| (closed_form_lambda1_in::<f64>(k), NormSource::ClosedForm))
            .unzip()
    } else if *lambda.value() == int(2) {
        for (k, slot) in weighted.iter_mut().enumerate() {
            if let Ok((w, _)) = closed_form_lambda2_in::<f64>(k + 2) {
                *slot = w;
            }
        }
        (0..=max_degree)
            .map(|k| {
                let (_, p) = closed_form_lambda2_in::<f64>(k + 2).expect("k + 2 >= 2");
                (p, NormSource::ClosedForm)
            })
            .unzip()
    } else {
        let exact = norm_table_oracle_to(&fam, exact_upto);
        let mut norms: Vec<f64> = exact
            .norms()
            .iter()
            .map(<f64 as NormScalar>::from_rational)
            .collect();
        let mut sources = vec![NormSource::Oracle; norms.len()];
        if let Some((qp, _)) = &quad {
            norms.extend_from_slice(&qp[exact_upto + 1..]);
            sources.resize(norms.len(), NormSource::Quadrature);
        }
        (norms, sources)
    };

    BaseTable {
        table: NormTable::from_norms(lambda.clone(), norms),
        weighted,
        sources,
    }
}
