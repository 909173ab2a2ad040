//! Double-precision asymptotics: gamma and beta functions, the two-term
//! gamma-ratio expansion, large-degree norm estimates and the bounds for
//! `λ ∈ (0, 1)`, plus the measurement pipeline that compares them with lifted
//! float norm tables.
//!
//! Index conventions matter here. For `λ ∈ (0, 1)` the plain estimate describes
//! `‖C_n^{(λ+1)}‖₂²`; for `λ ≥ 1` it describes `‖C_{n-2}^{(λ+1)}‖₂²`; the weighted
//! estimate always describes `‖√(1-x²) C_{n-1}^{(λ+1)}‖₂²`. Every estimate
//! carries both `n` and the polynomial degree.

use std::f64::consts::PI;

use thiserror::Error;

use crate::gegenbauer::{endpoint_value_f64, Lambda};
use crate::normtheory::{
    closed_form_lambda2_in, float_base_table, lift_norms, weighted_norm_closed, FloatEndpoints,
    FloatTable, NormError,
};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AsymptoticError {
    #[error("gamma has a pole at {0}")]
    Pole(f64),
    #[error("{what} requires {requirement}, got λ = {lambda}")]
    Domain {
        what: &'static str,
        requirement: &'static str,
        lambda: f64,
    },
    #[error("degree n = {got} is below the minimum {minimum}")]
    DegreeTooSmall { minimum: usize, got: usize },
    #[error("slope fit needs strictly increasing n, positive errors and at least 4 points")]
    BadFitInput,
    #[error(transparent)]
    Norm(#[from] NormError),
}

const LANCZOS_G: f64 = 7.0;
const LANCZOS_COEFFS: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

/// Γ(x) by the Lanczos approximation (g = 7, 9 terms) with reflection below ½.
pub fn gamma_real(x: f64) -> Result<f64, AsymptoticError> {
    if x <= 0.0 && x.fract() == 0.0 {
        return Err(AsymptoticError::Pole(x));
    }
    if x < 0.5 {
        return Ok(PI / ((PI * x).sin() * gamma_real(1.0 - x)?));
    }
    // integers: exact product is cheaper and exact up to 2^53
    if x.fract() == 0.0 && x <= 23.0 {
        return Ok((2..x as u64).fold(1.0, |acc, k| acc * k as f64));
    }
    let z = x - 1.0;
    let t = z + LANCZOS_G + 0.5;
    let series = LANCZOS_COEFFS[1..]
        .iter()
        .enumerate()
        .fold(LANCZOS_COEFFS[0], |acc, (i, c)| {
            acc + c / (z + i as f64 + 1.0)
        });
    Ok((2.0 * PI).sqrt() * t.powf(z + 0.5) * (-t).exp() * series)
}

/// B(x, y) = Γ(x)Γ(y)/Γ(x+y).
pub fn beta_real(x: f64, y: f64) -> Result<f64, AsymptoticError> {
    Ok(gamma_real(x)? * gamma_real(y)? / gamma_real(x + y)?)
}

/// Two-term expansion `z^{α-β} (1 + (α-β)(α+β-1)/(2z))` of `Γ(z+α)/Γ(z+β)`.
pub fn tricomi_ratio(z: f64, alpha: f64, beta: f64) -> f64 {
    z.powf(alpha - beta) * (1.0 + (alpha - beta) * (alpha + beta - 1.0) / (2.0 * z))
}

/// Two-term estimate of `C_n^{(λ)}(1)²`:
/// `(n^{4λ-2} + 2λ(2λ-1) n^{4λ-3}) / Γ(2λ)²`.
pub fn endpoint_sq_asymptotic(lambda: f64, n: usize) -> Result<f64, AsymptoticError> {
    if lambda <= 0.0 {
        return Err(AsymptoticError::Domain {
            what: "endpoint asymptotic",
            requirement: "λ > 0",
            lambda,
        });
    }
    let nf = n as f64;
    let g = gamma_real(2.0 * lambda)?;
    let main = nf.powf(4.0 * lambda - 2.0);
    let correction = 2.0 * lambda * (2.0 * lambda - 1.0) * nf.powf(4.0 * lambda - 3.0);
    Ok((main + correction) / (g * g))
}

/// `max{4λ - 1, 2λ}`.
pub fn delta(lambda: f64) -> f64 {
    (4.0 * lambda - 1.0).max(2.0 * lambda)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum NormKind {
    /// `‖C^{(λ+1)}‖₂²`
    Plain,
    /// `‖√(1-x²) C^{(λ+1)}‖₂²`
    Weighted,
}

/// Shape `leading_coeff · n^{leading_exp} [+ correction_coeff · n^{correction_exp}] + O(n^{error_exp})`.
#[derive(Clone, Debug, PartialEq)]
pub struct AsymptoticModel {
    pub lambda: f64,
    pub kind: NormKind,
    pub leading_coeff: f64,
    pub leading_exp: f64,
    pub correction_coeff: Option<f64>,
    pub correction_exp: Option<f64>,
    pub error_exp: f64,
    /// The leading term is an upper bound rather than an asymptote.
    pub upper_bound: bool,
    /// Served by the exact `λ = 1` closed forms; the error carries an extra `log n`.
    pub closed_form: bool,
    /// `degree = n - degree_offset`.
    pub degree_offset: usize,
}

impl AsymptoticModel {
    pub fn degree(&self, n: usize) -> usize {
        n - self.degree_offset
    }

    pub fn leading(&self, n: usize) -> f64 {
        self.leading_coeff * (n as f64).powf(self.leading_exp)
    }

    /// Leading plus correction term when the model has one, otherwise the leading term.
    pub fn two_term(&self, n: usize) -> f64 {
        let extra = match (self.correction_coeff, self.correction_exp) {
            (Some(c), Some(e)) => c * (n as f64).powf(e),
            _ => 0.0,
        };
        self.leading(n) + extra
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct NormEstimate {
    pub model: AsymptoticModel,
    pub n: usize,
    pub degree: usize,
    pub leading: f64,
    pub two_term: f64,
}

/// Asymptotic model of the plain or weighted norm at index `λ + 1`.
pub fn asymptotic_model(lambda: f64, kind: NormKind) -> Result<AsymptoticModel, AsymptoticError> {
    if lambda <= 0.0 {
        return Err(AsymptoticError::Domain {
            what: "norm asymptote",
            requirement: "λ > 0",
            lambda,
        });
    }
    let g = gamma_real(2.0 * lambda + 1.0)?;
    let g2 = g * g;
    let small = lambda < 1.0;
    let one = lambda == 1.0;
    let model = match kind {
        NormKind::Plain => AsymptoticModel {
            lambda,
            kind,
            leading_coeff: 1.0 / (4.0 * lambda * g2),
            leading_exp: 4.0 * lambda,
            correction_coeff: (lambda > 1.0).then(|| (lambda - 1.0) / g2),
            correction_exp: (lambda > 1.0).then_some(4.0 * lambda - 1.0),
            error_exp: if small {
                delta(lambda)
            } else if one {
                2.0
            } else {
                4.0 * lambda - 2.0
            },
            upper_bound: false,
            closed_form: one,
            degree_offset: if small { 0 } else { 2 },
        },
        NormKind::Weighted if small => {
            let gl = gamma_real(lambda + 1.0)?;
            AsymptoticModel {
                lambda,
                kind,
                leading_coeff: beta_real(1.0 - lambda, 0.5)?
                    / (gl * gl)
                    / 2f64.powf(1.0 + 2.0 * lambda),
                leading_exp: 2.0 * lambda,
                correction_coeff: None,
                correction_exp: None,
                error_exp: delta(lambda) - 1.0,
                upper_bound: true,
                closed_form: false,
                degree_offset: 1,
            }
        }
        NormKind::Weighted if one => {
            return Err(AsymptoticError::Domain {
                what: "weighted asymptote",
                requirement: "λ ≠ 1 (the coefficient has a pole there)",
                lambda,
            })
        }
        NormKind::Weighted => AsymptoticModel {
            lambda,
            kind,
            leading_coeff: (2.0 * lambda - 1.0) / (4.0 * (lambda - 1.0) * g2),
            leading_exp: 4.0 * lambda - 2.0,
            correction_coeff: None,
            correction_exp: None,
            error_exp: delta(lambda - 1.0) + 2.0,
            upper_bound: false,
            closed_form: false,
            degree_offset: 1,
        },
    };
    Ok(model)
}

/// Evaluates [`asymptotic_model`] at `n ≥ 3`.
pub fn norm_asymptote(
    lambda: f64,
    n: usize,
    kind: NormKind,
) -> Result<NormEstimate, AsymptoticError> {
    if n < 3 {
        return Err(AsymptoticError::DegreeTooSmall { minimum: 3, got: n });
    }
    let model = asymptotic_model(lambda, kind)?;
    Ok(NormEstimate {
        n,
        degree: model.degree(n),
        leading: model.leading(n),
        two_term: model.two_term(n),
        model,
    })
}

/// Strict upper bound `B(1-λ, ½) 2^{1-2λ} / Γ(λ)² · n^{2λ-2}` on `‖C_n^{(λ)}‖₂²`
/// for `λ ∈ (0, 1)`.
pub fn szego_bound(lambda: f64, n: usize) -> Result<f64, AsymptoticError> {
    if !(lambda > 0.0 && lambda < 1.0) {
        return Err(AsymptoticError::Domain {
            what: "norm bound",
            requirement: "0 < λ < 1",
            lambda,
        });
    }
    if n < 1 {
        return Err(AsymptoticError::DegreeTooSmall { minimum: 1, got: n });
    }
    let g = gamma_real(lambda)?;
    Ok(
        beta_real(1.0 - lambda, 0.5)? * 2f64.powf(1.0 - 2.0 * lambda) / (g * g)
            * (n as f64).powf(2.0 * lambda - 2.0),
    )
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SlopeFit {
    pub exponent: f64,
    pub intercept: f64,
    /// Root-mean-square residual of the log-log fit.
    pub residual: f64,
}

/// Least-squares fit of `log |error| = intercept + exponent · log n`.
pub fn fit_error_exponent(ns: &[usize], errors: &[f64]) -> Result<SlopeFit, AsymptoticError> {
    if ns.len() != errors.len()
        || ns.len() < 4
        || ns.windows(2).any(|w| w[0] >= w[1])
        || ns[0] == 0
        || errors.iter().any(|e| !e.is_finite() || *e <= 0.0)
    {
        return Err(AsymptoticError::BadFitInput);
    }
    let xs: Vec<f64> = ns.iter().map(|&n| (n as f64).ln()).collect();
    let ys: Vec<f64> = errors.iter().map(|e| e.ln()).collect();
    let m = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / m;
    let my = ys.iter().sum::<f64>() / m;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let exponent = sxy / sxx;
    let intercept = my - exponent * mx;
    let sse: f64 = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (y - intercept - exponent * x).powi(2))
        .sum();
    Ok(SlopeFit {
        exponent,
        intercept,
        residual: (sse / m).sqrt(),
    })
}

/// Float tables at `λ` (base) and `λ + 1` (lifted) large enough for every
/// measurement up to `n_max`.
#[derive(Clone, Debug)]
pub struct FloatPipeline {
    pub lambda: Lambda,
    pub base: FloatTable,
    pub lifted: FloatTable,
}

impl FloatPipeline {
    pub fn build(lambda: &Lambda, n_max: usize, budget: usize) -> Result<Self, AsymptoticError> {
        let base = float_base_table(lambda, n_max + 3, budget).table;
        let lifted = lift_norms(&base, &FloatEndpoints(lambda.to_f64()), n_max + 2)?;
        Ok(FloatPipeline {
            lambda: lambda.clone(),
            base,
            lifted,
        })
    }

    /// `‖√(1-x²) C_{n-1}^{(λ+1)}‖₂²`.
    pub fn weighted(&self, n: usize) -> Result<f64, AsymptoticError> {
        Ok(weighted_norm_closed(&self.base, &FloatEndpoints(self.lambda.to_f64()), n)?.value)
    }
}

/// One row of an asymptotic sweep.
#[derive(Clone, Debug, PartialEq)]
pub struct Measurement {
    pub n: usize,
    pub degree: usize,
    pub measured: f64,
    pub estimate: NormEstimate,
    pub ratio_leading: f64,
    pub ratio_two_term: f64,
    /// `(‖C_n^{(λ)}‖₂², bound)` for `λ ∈ (0, 1)`.
    pub norm_bound: Option<(f64, f64)>,
    /// Weighted norm with its model estimate, when a model exists.
    pub weighted: Option<(f64, NormEstimate)>,
}

/// Measures plain (and, where modelled, weighted) norms over `ns` and pairs
/// them with their estimates. `λ = 1` is served by the closed forms.
pub fn measure(
    lambda: &Lambda,
    ns: &[usize],
    budget: usize,
) -> Result<Vec<Measurement>, AsymptoticError> {
    let lam = lambda.to_f64();
    let n_max = ns.iter().copied().max().unwrap_or(0);
    let pipeline = FloatPipeline::build(lambda, n_max, budget)?;
    ns.iter()
        .map(|&n| {
            let estimate = norm_asymptote(lam, n, NormKind::Plain)?;
            let measured = if estimate.model.closed_form {
                closed_form_lambda2_in::<f64>(n)?.1
            } else {
                *pipeline.lifted.norm(estimate.degree)
            };
            let norm_bound = if lam > 0.0 && lam < 1.0 {
                Some((*pipeline.base.norm(n), szego_bound(lam, n)?))
            } else {
                None
            };
            let weighted = match norm_asymptote(lam, n, NormKind::Weighted) {
                Ok(w) => Some((pipeline.weighted(n)?, w)),
                Err(AsymptoticError::Domain { .. }) => None,
                Err(e) => return Err(e),
            };
            Ok(Measurement {
                n,
                degree: estimate.degree,
                measured,
                ratio_leading: measured / estimate.leading,
                ratio_two_term: measured / estimate.two_term,
                estimate,
                norm_bound,
                weighted,
            })
        })
        .collect()
}

/// `|measured - estimate|` for a sweep, using the two-term estimate when the
/// model has a correction term.
pub fn residuals(measurements: &[Measurement]) -> Vec<f64> {
    measurements
        .iter()
        .map(|m| (m.measured - m.estimate.two_term).abs())
        .collect()
}

/// Fitted exponent of [`residuals`] over the sweep.
pub fn residual_slope(measurements: &[Measurement]) -> Result<SlopeFit, AsymptoticError> {
    let ns: Vec<usize> = measurements.iter().map(|m| m.n).collect();
    fit_error_exponent(&ns, &residuals(measurements))
}

/// Endpoint value squared, measured exactly in double precision.
pub fn endpoint_sq(lambda: f64, n: usize) -> f64 {
    let e = endpoint_value_f64(lambda, n);
    e * e
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    #[test]
    fn gamma_examples() {
        assert_eq!(gamma_real(5.0).unwrap(), 24.0);
        assert!(rel(gamma_real(0.5).unwrap(), PI.sqrt()) < 1e-14);
        assert!(rel(beta_real(0.5, 0.5).unwrap(), PI) < 1e-14);
        assert!(matches!(gamma_real(0.0), Err(AsymptoticError::Pole(_))));
        assert!(matches!(gamma_real(-3.0), Err(AsymptoticError::Pole(_))));
    }

    #[test]
    fn gamma_accuracy_on_working_range() {
        // Γ(n + 1/2) = (2n)! √π / (4^n n!), built by exact-ish recurrence
        let mut half = PI.sqrt();
        for n in 0..49 {
            let x = n as f64 + 0.5;
            assert!(rel(gamma_real(x).unwrap(), half) < 1e-13, "x = {x}");
            half *= x;
        }
        let mut fact = 1.0f64;
        for n in 1..50 {
            assert!(rel(gamma_real(n as f64).unwrap(), fact) < 1e-13, "n = {n}");
            fact *= n as f64;
        }
        // Γ(x) Γ(1-x) = π / sin(πx) near zero
        for x in [1e-3, 0.01, 0.1, 0.3] {
            let lhs = gamma_real(x).unwrap() * gamma_real(1.0 - x).unwrap();
            assert!(rel(lhs, PI / (PI * x).sin()) < 1e-13);
        }
        // Γ(x+1) = x Γ(x) on non-integers
        for x in [0.123, 1.7, 7.25, 33.3, 49.9] {
            assert!(rel(gamma_real(x + 1.0).unwrap(), x * gamma_real(x).unwrap()) < 1e-13);
        }
    }

    #[test]
    fn tricomi_examples() {
        for z in [0.5, 3.0, 100.0] {
            assert_eq!(tricomi_ratio(z, 2.5, 2.5), 1.0);
            assert!(rel(tricomi_ratio(z, 1.0, 0.0), z) < 1e-15);
            let direct = gamma_real(z + 1.0).unwrap() / gamma_real(z).unwrap();
            assert!(rel(tricomi_ratio(z, 1.0, 0.0), direct) < 1e-13);
        }
        let direct = gamma_real(54.0).unwrap() / gamma_real(50.0).unwrap();
        assert!(rel(tricomi_ratio(50.0, 4.0, 0.0), direct) < 1e-2);
    }

    #[test]
    fn endpoint_asymptotic_examples() {
        for n in [5usize, 50, 500] {
            let est = endpoint_sq_asymptotic(1.0, n).unwrap();
            let exact = endpoint_sq(1.0, n);
            assert!((exact - est - 1.0).abs() < 1e-6 * exact);
            assert!((endpoint_sq_asymptotic(0.5, n).unwrap() - 1.0).abs() < 1e-15);
        }
        // 36·C_n^{(2)}(1)² = ((n+1)(n+2)(n+3))² = n⁶ + 12n⁵ + 58n⁴ + O(n³),
        // so the relative error of the two-term estimate is 58/n² + O(n⁻³)
        let n = 100;
        let exact = endpoint_sq(2.0, n);
        assert!(rel(endpoint_sq_asymptotic(2.0, n).unwrap(), exact) <= 58.0 / (n * n) as f64);
        let n = 4000;
        let exact = endpoint_sq(2.0, n);
        let scaled = rel(endpoint_sq_asymptotic(2.0, n).unwrap(), exact) * (n * n) as f64;
        assert!((scaled - 58.0).abs() < 0.5, "{scaled}");
        assert!(endpoint_sq_asymptotic(-0.25, 4).is_err());
    }

    #[test]
    fn model_examples() {
        let one = norm_asymptote(1.0, 40, NormKind::Plain).unwrap();
        assert!(rel(one.leading, 40f64.powi(4) / 16.0) < 1e-14);
        assert!(one.model.closed_form);
        assert_eq!(one.degree, 38);

        let half = norm_asymptote(0.5, 40, NormKind::Plain).unwrap();
        assert!(rel(half.leading, 40.0 * 40.0 / 2.0) < 1e-14);
        assert_eq!(half.degree, 40);
        assert_eq!(half.model.error_exp, 1.0);

        let two = norm_asymptote(2.0, 10, NormKind::Plain).unwrap();
        assert_eq!(two.model.error_exp, 6.0);
        assert!(rel(two.model.correction_coeff.unwrap(), 1.0 / 576.0) < 1e-14);

        let w = norm_asymptote(1.5, 10, NormKind::Weighted).unwrap();
        assert_eq!(w.degree, 9);
        assert!(rel(w.model.leading_coeff, 2.0 / (2.0 * 36.0)) < 1e-14);

        assert!(norm_asymptote(1.0, 10, NormKind::Weighted).is_err());
        assert!(norm_asymptote(0.0, 10, NormKind::Plain).is_err());
        assert!(norm_asymptote(2.0, 2, NormKind::Plain).is_err());
        let wb = norm_asymptote(0.5, 10, NormKind::Weighted).unwrap();
        assert!(wb.model.upper_bound);
        // B(1/2,1/2)/Γ(3/2)² · n / 4 = n
        assert!(rel(wb.leading, 10.0) < 1e-14);
    }

    #[test]
    fn norm_bound_examples() {
        for n in 1..50usize {
            let b = szego_bound(0.5, n).unwrap();
            assert!(rel(b, 1.0 / n as f64) < 1e-14);
            assert!(1.0 / (2.0 * n as f64 + 1.0) < b);
        }
        assert!(szego_bound(0.75, 1).unwrap() > 0.75);
        assert!(szego_bound(1.0, 3).is_err());
        assert!(szego_bound(0.0, 3).is_err());
    }

    #[test]
    fn slope_examples() {
        let ns = [64usize, 128, 256, 512];
        let cubes: Vec<f64> = ns.iter().map(|&n| (n as f64).powi(3)).collect();
        let fit = fit_error_exponent(&ns, &cubes).unwrap();
        assert!((fit.exponent - 3.0).abs() < 1e-12);
        assert!(fit.residual < 1e-12);
        let scaled: Vec<f64> = ns.iter().map(|&n| 2.0 * (n as f64).powf(1.5)).collect();
        let fit = fit_error_exponent(&ns, &scaled).unwrap();
        assert!((fit.exponent - 1.5).abs() < 1e-12);
        assert!((fit.intercept - 2f64.ln()).abs() < 1e-10);

        assert!(fit_error_exponent(&ns[..3], &cubes[..3]).is_err());
        assert!(fit_error_exponent(&[1, 2, 2, 3], &[1.0; 4]).is_err());
        assert!(fit_error_exponent(&ns, &[1.0, 0.0, 1.0, 1.0]).is_err());
    }
}
