use std::collections::BTreeMap;
use std::time::{Duration, Instant};

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use serde_json::{json, Value};

use super::report::{Cell, Column, ColumnKind, Report};
use super::{CliError, RunConfig};
use crate::asymptotics::{
    asymptotic_model, measure, residual_slope, AsymptoticError, Measurement, NormKind,
};
use crate::exactpoly::{exact_l2_norm, exact_weighted_l2_norm, int, ratio, Rational};
use crate::gegenbauer::{
    endpoint_dominates, endpoint_value, endpoint_value_f64, family, has_parity, GegenbauerFamily,
    Lambda, StructuralIdentity,
};
use crate::normtheory::{
    closed_form_lambda1, closed_form_lambda1_in, closed_form_lambda2, closed_form_lambda2_in,
    combined_identity_check, dette_check, dette_endpoint_check, dette_pointwise, float_base_table,
    lemma21_integral_check, lemma22_check, lemma23_check, lift_norms, norm_table_oracle,
    norm_table_oracle_to, product_completion_check, weighted_norm_closed, ExactEndpoints,
    ExactTable, FloatEndpoints, Mode, NormError, NormSource,
};

impl From<NormError> for CliError {
    fn from(e: NormError) -> Self {
        match e {
            NormError::SeedMismatch { .. } => CliError::Mismatch(e.to_string()),
            _ => CliError::Usage(e.to_string()),
        }
    }
}

impl From<AsymptoticError> for CliError {
    fn from(e: AsymptoticError) -> Self {
        match e {
            AsymptoticError::Norm(inner) => inner.into(),
            other => CliError::Usage(other.to_string()),
        }
    }
}

fn check_budget(config: &RunConfig, degree: usize) -> Result<(), CliError> {
    if config.mode == Mode::Exact && degree > config.budget {
        return Err(NormError::OverBudget {
            requested: degree,
            budget: config.budget,
        }
        .into());
    }
    Ok(())
}

fn is_integer(lambda: &Lambda, value: i64) -> bool {
    *lambda.value() == int(value)
}

// ---------------------------------------------------------------- table

pub fn table_columns(mode: Mode) -> Vec<Column> {
    let value = match mode {
        Mode::Exact => ColumnKind::Exact,
        Mode::Float => ColumnKind::Float,
    };
    vec![
        Column::new("lambda", ColumnKind::Text),
        Column::new("n", ColumnKind::Int),
        Column::new("norm", value),
        Column::new("weighted_norm", value),
        Column::new("endpoint_value", value),
        Column::new("source", ColumnKind::Text),
    ]
}

struct TableRows<S> {
    norms: Vec<S>,
    weighted: Vec<S>,
    sources: Vec<NormSource>,
}

fn exact_rows(lambda: &Lambda, max_n: usize) -> Result<TableRows<Rational>, CliError> {
    if let Some(base_lambda) = lambda.lowered() {
        let base = norm_table_oracle(&family(&base_lambda, max_n + 2));
        let endpoints = ExactEndpoints(base_lambda);
        let lifted = lift_norms(&base, &endpoints, max_n + 2)?;
        let weighted = (1..=max_n + 1)
            .map(|n| weighted_norm_closed(&base, &endpoints, n).map(|w| w.value))
            .collect::<Result<_, _>>()?;
        return Ok(TableRows {
            norms: lifted.norms().to_vec(),
            weighted,
            sources: vec![NormSource::Recursion; max_n + 1],
        });
    }
    let fam = family(lambda, max_n);
    let polys = &fam.polys()[..=max_n];
    Ok(TableRows {
        norms: polys.iter().map(exact_l2_norm).collect(),
        weighted: polys.iter().map(exact_weighted_l2_norm).collect(),
        sources: vec![NormSource::Oracle; max_n + 1],
    })
}

fn float_rows(lambda: &Lambda, max_n: usize, budget: usize) -> Result<TableRows<f64>, CliError> {
    if is_integer(lambda, 1) {
        let base = float_base_table(lambda, max_n, budget);
        return Ok(TableRows {
            norms: (0..=max_n).map(closed_form_lambda1_in::<f64>).collect(),
            weighted: base.weighted,
            sources: vec![NormSource::ClosedForm; max_n + 1],
        });
    }
    if is_integer(lambda, 2) {
        let (weighted, norms) = (0..=max_n)
            .map(|k| closed_form_lambda2_in::<f64>(k + 2))
            .collect::<Result<Vec<_>, _>>()?
            .into_iter()
            .unzip();
        return Ok(TableRows {
            norms,
            weighted,
            sources: vec![NormSource::ClosedForm; max_n + 1],
        });
    }
    if let Some(base_lambda) = lambda.lowered() {
        let base = float_base_table(&base_lambda, max_n + 2, budget).table;
        let endpoints = FloatEndpoints(base_lambda.to_f64());
        let lifted = lift_norms(&base, &endpoints, max_n + 2)?;
        let weighted = (1..=max_n + 1)
            .map(|n| weighted_norm_closed(&base, &endpoints, n).map(|w| w.value))
            .collect::<Result<_, _>>()?;
        return Ok(TableRows {
            norms: lifted.norms().to_vec(),
            weighted,
            sources: vec![NormSource::Recursion; max_n + 1],
        });
    }
    let base = float_base_table(lambda, max_n, budget);
    Ok(TableRows {
        norms: base.table.norms().to_vec(),
        weighted: base.weighted,
        sources: base.sources,
    })
}

pub fn cmd_table(config: &RunConfig) -> Result<Report, CliError> {
    let max_n = config.max_n;
    let mut report = Report::new(table_columns(config.mode));
    for lambda in &config.lambdas {
        let label = Cell::Text(lambda.to_string());
        match config.mode {
            Mode::Exact => {
                let extra = if lambda.lowered().is_some() { 2 } else { 0 };
                check_budget(config, max_n + extra)?;
                let rows = exact_rows(lambda, max_n)?;
                for n in 0..=max_n {
                    report.push(vec![
                        label.clone(),
                        Cell::Int(n as i64),
                        Cell::Exact(rows.norms[n].clone()),
                        Cell::Exact(rows.weighted[n].clone()),
                        Cell::Exact(endpoint_value(lambda, n)),
                        Cell::Text(rows.sources[n].as_str().into()),
                    ]);
                }
            }
            Mode::Float => {
                let rows = float_rows(lambda, max_n, config.budget)?;
                for n in 0..=max_n {
                    report.push(vec![
                        label.clone(),
                        Cell::Int(n as i64),
                        Cell::Float(rows.norms[n]),
                        Cell::Float(rows.weighted[n]),
                        Cell::Float(endpoint_value_f64(lambda.to_f64(), n)),
                        Cell::Text(rows.sources[n].as_str().into()),
                    ]);
                }
            }
        }
    }
    Ok(report)
}

// ---------------------------------------------------------------- verify

/// First failing check.
#[derive(Clone, Debug, PartialEq)]
pub struct Counterexample {
    pub lambda: Lambda,
    pub n: usize,
    pub identity: String,
    pub detail: String,
}

impl std::fmt::Display for Counterexample {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "{} fails at lambda = {}, n = {}",
            self.identity, self.lambda, self.n
        )?;
        if !self.detail.is_empty() {
            write!(f, " ({})", self.detail)?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct IdentityTally {
    pub pass: usize,
    pub fail: usize,
    pub elapsed: Duration,
}

impl IdentityTally {
    pub fn total(&self) -> usize {
        self.pass + self.fail
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct VerificationReport {
    /// Tallies keyed by identity name, in first-seen order.
    pub tallies: Vec<(String, IdentityTally)>,
    pub first_failure: Option<Counterexample>,
    pub elapsed: Duration,
}

impl VerificationReport {
    fn tally(&mut self, identity: &str) -> &mut IdentityTally {
        let pos = match self.tallies.iter().position(|(name, _)| name == identity) {
            Some(pos) => pos,
            None => {
                self.tallies
                    .push((identity.to_string(), IdentityTally::default()));
                self.tallies.len() - 1
            }
        };
        &mut self.tallies[pos].1
    }

    fn record(
        &mut self,
        identity: &str,
        lambda: &Lambda,
        n: usize,
        started: Instant,
        outcome: Result<(), String>,
    ) {
        let tally = self.tally(identity);
        tally.elapsed += started.elapsed();
        match outcome {
            Ok(()) => tally.pass += 1,
            Err(detail) => {
                tally.fail += 1;
                let candidate = Counterexample {
                    lambda: lambda.clone(),
                    n,
                    identity: identity.to_string(),
                    detail,
                };
                // smallest degree wins; ties go to the earliest reported
                if self.first_failure.as_ref().is_none_or(|c| n < c.n) {
                    self.first_failure = Some(candidate);
                }
            }
        }
    }

    fn check(&mut self, identity: &str, lambda: &Lambda, n: usize, check: impl FnOnce() -> bool) {
        let started = Instant::now();
        let outcome = if check() { Ok(()) } else { Err(String::new()) };
        self.record(identity, lambda, n, started, outcome);
    }

    fn compare(
        &mut self,
        identity: &str,
        lambda: &Lambda,
        n: usize,
        value: impl FnOnce() -> (Rational, Rational),
    ) {
        let started = Instant::now();
        let (got, want) = value();
        let outcome = if got == want {
            Ok(())
        } else {
            Err(format!("got {got}, expected {want}"))
        };
        self.record(identity, lambda, n, started, outcome);
    }

    pub fn passed(&self) -> usize {
        self.tallies.iter().map(|(_, t)| t.pass).sum()
    }

    pub fn failed(&self) -> usize {
        self.tallies.iter().map(|(_, t)| t.fail).sum()
    }

    pub fn into_report(self) -> Report {
        let mut report = Report::new(vec![
            Column::new("identity", ColumnKind::Text),
            Column::new("pass", ColumnKind::Int),
            Column::new("fail", ColumnKind::Int),
            Column::new("total", ColumnKind::Int),
            Column::new("seconds", ColumnKind::Float),
        ]);
        for (name, tally) in &self.tallies {
            report.push(vec![
                Cell::Text(name.clone()),
                Cell::Int(tally.pass as i64),
                Cell::Int(tally.fail as i64),
                Cell::Int(tally.total() as i64),
                Cell::Float(tally.elapsed.as_secs_f64()),
            ]);
        }
        report.summary = json!({
            "checks": self.passed() + self.failed(),
            "pass": self.passed(),
            "fail": self.failed(),
            "seconds": self.elapsed.as_secs_f64(),
            "first_failure": self.first_failure.as_ref().map(|c| json!({
                "lambda": c.lambda.to_string(),
                "n": c.n,
                "identity": c.identity,
                "detail": c.detail,
            })),
        });
        report
    }
}

fn random_point(rng: &mut StdRng, symmetric: bool) -> Rational {
    let q: i64 = rng.gen_range(1..=997);
    let lo = if symmetric { -q } else { 0 };
    ratio(rng.gen_range(lo..=q), q)
}

fn verify_lambda(
    report: &mut VerificationReport,
    lambda: &Lambda,
    max_n: usize,
    rng: &mut StdRng,
    inject_fault: bool,
) -> Result<(), CliError> {
    let fam = family(lambda, max_n + 2);
    let upper = family(&lambda.raised(), max_n + 2);

    for n in 0..=max_n {
        report.check("parity", lambda, n, || has_parity(fam.poly(n), n));
        for id in StructuralIdentity::ALL {
            report.check(id.name(), lambda, n, || id.holds(lambda, n));
        }
        report.check("sum-of-squares identity", lambda, n, || {
            dette_check(lambda, n)
        });
        report.check("sum-of-squares identity at x = 1", lambda, n, || {
            dette_endpoint_check(lambda, n)
        });
        let x = random_point(rng, true);
        report.check("sum-of-squares identity at random x", lambda, n, || {
            dette_pointwise(lambda, n, &x)
        });
        if lambda.is_positive() {
            let x = random_point(rng, true);
            report.check("endpoint dominance at random x", lambda, n, || {
                endpoint_dominates(&fam, n, &x)
            });
        }
    }

    let base = norm_table_oracle_to(&fam, max_n + 1);
    let endpoints = ExactEndpoints(lambda.clone());
    let mut lifted = lift_norms(&base, &endpoints, max_n)?;
    if inject_fault {
        let degree = lifted.max_degree().min(2);
        let mut norms = lifted.norms().to_vec();
        norms[degree] += ratio(1, 1_000_000_007);
        lifted = ExactTable::from_norms(lifted.lambda().clone(), norms);
    }
    for n in 2..=max_n {
        report.compare("lifted norm", lambda, n, || {
            (lifted.norm(n - 2).clone(), exact_l2_norm(upper.poly(n - 2)))
        });
    }
    for n in 1..=max_n {
        report.compare("weighted norm closed form", lambda, n, || {
            let w = weighted_norm_closed(&base, &endpoints, n).expect("base covers n + 1");
            (w.value, exact_weighted_l2_norm(upper.poly(n - 1)))
        });
    }
    for n in 2..=max_n {
        report.check("four-term norm expression", lambda, n, || {
            combined_identity_check(&base, n).expect("base covers n + 1")
        });
        report.check("norm difference identity", lambda, n, || {
            lemma21_integral_check(lambda, n).expect("n >= 2")
        });
    }
    for n in 0..=max_n - 2 {
        report.check("second-moment sum identity", lambda, n, || {
            lemma22_check(lambda, n)
        });
        report.check("second-moment difference identity", lambda, n, || {
            lemma23_check(lambda, n)
        });
        report.check("product completion", lambda, n, || {
            product_completion_check(lambda, n)
        });
    }
    if is_integer(lambda, 1) {
        for n in 0..=max_n {
            report.compare("closed form at index 1", lambda, n, || {
                (closed_form_lambda1(n), base.norm(n).clone())
            });
        }
    }
    if is_integer(lambda, 2) {
        for n in 2..=max_n + 2 {
            report.compare("closed form at index 2", lambda, n, || {
                let (_, plain) = closed_form_lambda2(n).expect("n >= 2");
                (plain, exact_l2_norm(fam.poly(n - 2)))
            });
            report.compare("weighted closed form at index 2", lambda, n, || {
                let (weighted, _) = closed_form_lambda2(n).expect("n >= 2");
                (weighted, exact_weighted_l2_norm(fam.poly(n - 2)))
            });
        }
    }
    Ok(())
}

pub fn cmd_verify(config: &RunConfig) -> Result<VerificationReport, CliError> {
    if config.mode != Mode::Exact {
        return Err(CliError::Usage("verify runs in exact mode only".into()));
    }
    if config.max_n < 2 {
        return Err(NormError::DegreeTooSmall {
            minimum: 2,
            got: config.max_n,
        }
        .into());
    }
    check_budget(config, config.max_n + 2)?;
    let started = Instant::now();
    let mut rng = StdRng::seed_from_u64(config.seed.unwrap_or(0));
    let mut report = VerificationReport::default();
    for lambda in &config.lambdas {
        verify_lambda(
            &mut report,
            lambda,
            config.max_n,
            &mut rng,
            config.inject_fault,
        )?;
    }
    report.elapsed = started.elapsed();
    Ok(report)
}

// ---------------------------------------------------------------- asymptote

pub const CLOSED_FORM_NOTE: &str = "closed form (digamma at half-integers) used for lambda = 1";

fn default_grid(max_n: usize) -> Vec<usize> {
    let mut ns = Vec::new();
    let mut n = 8;
    while n <= max_n {
        ns.push(n);
        n *= 2;
    }
    if ns.last() != Some(&max_n) && max_n >= 3 {
        ns.push(max_n);
    }
    ns
}

fn asymptote_columns() -> Vec<Column> {
    vec![
        Column::new("lambda", ColumnKind::Text),
        Column::new("n", ColumnKind::Int),
        Column::new("degree", ColumnKind::Int),
        Column::new("measured", ColumnKind::Float),
        Column::new("leading", ColumnKind::Float),
        Column::new("two_term", ColumnKind::Float),
        Column::new("ratio", ColumnKind::Float),
        Column::new("base_norm", ColumnKind::Float),
        Column::new("bound", ColumnKind::Float),
        Column::new("weighted_measured", ColumnKind::Float),
        Column::new("weighted_leading", ColumnKind::Float),
        Column::new("weighted_ratio", ColumnKind::Float),
    ]
}

fn measurement_row(lambda: &Lambda, m: &Measurement) -> Vec<Cell> {
    let (base_norm, bound) = match m.norm_bound {
        Some((b, s)) => (Cell::Float(b), Cell::Float(s)),
        None => (Cell::Empty, Cell::Empty),
    };
    let (wm, wl, wr) = match &m.weighted {
        Some((value, est)) => (
            Cell::Float(*value),
            Cell::Float(est.leading),
            Cell::Float(value / est.leading),
        ),
        None => (Cell::Empty, Cell::Empty, Cell::Empty),
    };
    vec![
        Cell::Text(lambda.to_string()),
        Cell::Int(m.n as i64),
        Cell::Int(m.degree as i64),
        Cell::Float(m.measured),
        Cell::Float(m.estimate.leading),
        Cell::Float(m.estimate.two_term),
        Cell::Float(m.ratio_two_term),
        base_norm,
        bound,
        wm,
        wl,
        wr,
    ]
}

pub fn cmd_asymptote(config: &RunConfig) -> Result<Report, CliError> {
    if let Some(bad) = config.lambdas.iter().find(|l| !l.is_positive()) {
        return Err(CliError::Usage(format!(
            "asymptotics need lambda > 0, got {bad}"
        )));
    }
    let ns = match &config.ns {
        Some(ns) => ns.clone(),
        None => default_grid(config.max_n),
    };
    if let Some(&n) = ns.iter().find(|&&n| n < 3) {
        return Err(CliError::Usage(format!(
            "asymptotic degrees must be >= 3, got {n}"
        )));
    }
    let mut report = Report::new(asymptote_columns());
    let mut summary = BTreeMap::new();
    for lambda in &config.lambdas {
        let lam = lambda.to_f64();
        let measurements = measure(lambda, &ns, config.budget)?;
        for m in &measurements {
            report.push(measurement_row(lambda, m));
        }
        let model = asymptotic_model(lam, NormKind::Plain)?;
        let fit = residual_slope(&measurements).ok();
        let mut entry = json!({
            "error_exponent": model.error_exp,
            "fitted_exponent": fit.map(|f| f.exponent),
            "fit_rms_residual": fit.map(|f| f.residual),
        });
        if model.closed_form {
            eprintln!("note: {CLOSED_FORM_NOTE}");
            entry["note"] = Value::String(CLOSED_FORM_NOTE.into());
        }
        summary.insert(lambda.to_string(), entry);
    }
    report.summary = json!(summary);
    Ok(report)
}

// ---------------------------------------------------------------- bench

const TOLERANCE: f64 = 1e-9;

fn bench_columns() -> Vec<Column> {
    vec![
        Column::new("lambda", ColumnKind::Text),
        Column::new("max_n", ColumnKind::Int),
        Column::new("path", ColumnKind::Text),
        Column::new("seconds", ColumnKind::Float),
        Column::new("entries", ColumnKind::Int),
        Column::new("equal", ColumnKind::Bool),
        Column::new("max_rel_dev", ColumnKind::Float),
    ]
}

/// Minimum wall-clock time over `reps` runs, plus the last result.
fn time_min<T>(reps: usize, mut f: impl FnMut() -> T) -> (Duration, T) {
    let mut best = Duration::MAX;
    let mut last = None;
    for _ in 0..reps.max(1) {
        let started = Instant::now();
        let value = f();
        best = best.min(started.elapsed());
        last = Some(value);
    }
    (best, last.expect("at least one repetition"))
}

fn oracle_path(lambda: &Lambda, max_n: usize) -> ExactTable {
    norm_table_oracle_to(
        &GegenbauerFamily::build(lambda.raised(), max_n - 2),
        max_n - 2,
    )
}

/// Lifted table from a prebuilt base, and an oracle table at `λ + 1` built
/// from scratch, both covering degrees `0..=max_n - 2`.
pub fn bench_exact(lambda: &Lambda, max_n: usize, reps: usize) -> Result<BenchTiming, CliError> {
    let base = norm_table_oracle(&GegenbauerFamily::build(lambda.clone(), max_n));
    let endpoints = ExactEndpoints(lambda.clone());
    let lifted = lift_norms(&base, &endpoints, max_n)?;
    let oracle = oracle_path(lambda, max_n);
    if lifted.norms() != oracle.norms() {
        let degree = lifted
            .norms()
            .iter()
            .zip(oracle.norms())
            .position(|(a, b)| a != b)
            .unwrap_or(0);
        return Err(CliError::Mismatch(format!(
            "lambda = {lambda}: lifted and oracle tables differ at degree {degree}"
        )));
    }
    let (recursion, _) = time_min(reps, || lift_norms(&base, &endpoints, max_n));
    let (oracle_time, _) = time_min(reps, || oracle_path(lambda, max_n));
    Ok(BenchTiming {
        recursion,
        oracle: oracle_time,
        entries: lifted.len(),
    })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BenchTiming {
    pub recursion: Duration,
    pub oracle: Duration,
    pub entries: usize,
}

fn max_rel_dev(float: &[f64], exact: &[Rational]) -> f64 {
    float
        .iter()
        .zip(exact)
        .map(|(f, e)| {
            let e = crate::normtheory::NormScalar::to_f64(e);
            ((f - e) / e).abs()
        })
        .fold(0.0, f64::max)
}

pub fn cmd_bench(config: &RunConfig) -> Result<Report, CliError> {
    let max_n = config.max_n;
    if max_n < 2 {
        return Err(NormError::DegreeTooSmall {
            minimum: 2,
            got: max_n,
        }
        .into());
    }
    let mut report = Report::new(bench_columns());
    let mut summary = BTreeMap::new();
    for lambda in &config.lambdas {
        let label = Cell::Text(lambda.to_string());
        match config.mode {
            Mode::Exact => {
                check_budget(config, max_n)?;
                let t = bench_exact(lambda, max_n, 3)?;
                for (path, time) in [("recursion", t.recursion), ("oracle", t.oracle)] {
                    report.push(vec![
                        label.clone(),
                        Cell::Int(max_n as i64),
                        Cell::Text(path.into()),
                        Cell::Float(time.as_secs_f64()),
                        Cell::Int(t.entries as i64),
                        Cell::Bool(true),
                        Cell::Float(0.0),
                    ]);
                }
                summary.insert(
                    lambda.to_string(),
                    json!({"speedup": t.oracle.as_secs_f64() / t.recursion.as_secs_f64().max(1e-12)}),
                );
            }
            Mode::Float => {
                let lam = lambda.to_f64();
                let (float_time, float_lifted) = time_min(3, || {
                    let base = float_base_table(lambda, max_n, config.budget).table;
                    lift_norms(&base, &FloatEndpoints(lam), max_n)
                });
                let float_lifted = float_lifted?;
                let exact_n = max_n.min(config.budget);
                let (dev, exact_time, exact_entries) = if exact_n >= 2 {
                    let started = Instant::now();
                    let base = norm_table_oracle_to(&family(lambda, exact_n), exact_n);
                    let exact = lift_norms(&base, &ExactEndpoints(lambda.clone()), exact_n)?;
                    let elapsed = started.elapsed();
                    (
                        max_rel_dev(float_lifted.norms(), exact.norms()),
                        Some(elapsed),
                        exact.len(),
                    )
                } else {
                    (0.0, None, 0)
                };
                let ok = dev <= TOLERANCE;
                report.push(vec![
                    label.clone(),
                    Cell::Int(max_n as i64),
                    Cell::Text("float_recursion".into()),
                    Cell::Float(float_time.as_secs_f64()),
                    Cell::Int(float_lifted.len() as i64),
                    Cell::Bool(ok),
                    Cell::Float(dev),
                ]);
                if let Some(t) = exact_time {
                    report.push(vec![
                        label.clone(),
                        Cell::Int(exact_n as i64),
                        Cell::Text("exact_recursion".into()),
                        Cell::Float(t.as_secs_f64()),
                        Cell::Int(exact_entries as i64),
                        Cell::Bool(ok),
                        Cell::Float(0.0),
                    ]);
                }
                summary.insert(
                    lambda.to_string(),
                    json!({"max_rel_dev": dev, "compared_entries": exact_entries}),
                );
                if !ok {
                    return Err(CliError::Mismatch(format!(
                        "lambda = {lambda}: float table deviates from exact by {dev:e}"
                    )));
                }
            }
        }
    }
    report.summary = json!(summary);
    Ok(report)
}
