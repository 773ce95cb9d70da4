//! Batch runs over parameter grids.

use hardy_core::gap::{GapVerdict, HValue};
use hardy_core::rayleigh::{hardy_study, HardyProblem};
use hardy_core::{classify, BoundaryClass, DomainSpec, NumericH, Params};
use rayon::prelude::*;
use serde::Serialize;

use crate::config::RunConfig;
use crate::error::{exit, CliError};
use crate::plots::{Axis, Line, Plot};
use crate::report::round_sig;

pub const COLUMNS: [&str; 12] = [
    "alpha",
    "p",
    "N",
    "domain",
    "H_bound",
    "lambda_inf",
    "gap",
    "nu",
    "nu_tilde",
    "iterations",
    "error_estimate",
    "regime",
];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridPoint {
    pub alpha: f64,
    pub p: f64,
    pub dim: u32,
    pub domain: DomainSpec,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub alpha: f64,
    pub p: f64,
    pub dim: u32,
    pub domain: String,
    pub h_bound: Option<f64>,
    pub lambda_inf: Option<f64>,
    /// `positive`, `zero`, `unknown`, `unresolved` when the numeric bound
    /// exceeds `λ^∞` beyond the margin, or `error: …` for a failed cell.
    pub gap: String,
    pub nu: Option<f64>,
    pub nu_tilde: Option<f64>,
    /// Iterations of the finest solve; absent when `H` is exact.
    pub iterations: Option<usize>,
    pub error_estimate: Option<f64>,
    pub regime: Option<BoundaryClass>,
    pub converged: bool,
}

/// Grid in fixed order: domain, dimension, `α`, `p`.
pub fn grid(cfg: &RunConfig) -> Vec<GridPoint> {
    let dims = if cfg.sweep.dim.is_empty() { vec![cfg.dim] } else { cfg.sweep.dim.clone() };
    let domains = if cfg.sweep.domains.is_empty() { vec![cfg.domain] } else { cfg.sweep.domains.clone() };
    let mut out = Vec::new();
    for &domain in &domains {
        for &dim in &dims {
            for &alpha in &cfg.sweep.alpha {
                for &p in &cfg.sweep.p {
                    out.push(GridPoint { alpha, p, dim, domain });
                }
            }
        }
    }
    out
}

fn failed(pt: &GridPoint, regime: Option<BoundaryClass>, msg: String) -> SweepRow {
    SweepRow {
        alpha: pt.alpha,
        p: pt.p,
        dim: pt.dim,
        domain: pt.domain.label(),
        h_bound: None,
        lambda_inf: None,
        gap: format!("error: {msg}"),
        nu: None,
        nu_tilde: None,
        iterations: None,
        error_estimate: None,
        regime,
        converged: false,
    }
}

pub fn run_point(cfg: &RunConfig, pt: &GridPoint) -> SweepRow {
    let q = match Params::new(pt.alpha, pt.p, pt.dim) {
        Ok(q) => q,
        Err(e) => return failed(pt, None, e.to_string()),
    };
    let regime = Some(hardy_core::classify_regime(&q).boundary_class);
    let mut report = match classify(&q, &pt.domain, None, cfg.classify) {
        Ok(r) => r,
        Err(e) => return failed(pt, regime, e.to_string()),
    };
    let (mut iterations, mut error_estimate, mut converged) = (None, None, true);
    if report.h == HValue::PositiveUnknown {
        let settings = cfg.study_settings_for(&pt.domain);
        let study = match hardy_study(&HardyProblem { params: q, spec: pt.domain }, &settings) {
            Ok(s) => s,
            Err(e) => return failed(pt, regime, e.to_string()),
        };
        iterations = Some(study.finest.iterations);
        error_estimate = Some(study.error_estimate);
        converged = study.converged;
        let numeric = NumericH { value: study.extrapolated, error_estimate: study.error_estimate };
        report = match classify(&q, &pt.domain, Some(numeric), cfg.classify) {
            Ok(r) => r,
            Err(hardy_core::Error::InconsistentInput { .. }) => {
                // the extrapolation overshoots λ^∞: keep the numbers, no verdict
                let mut row = failed(pt, regime, String::new());
                row.gap = "unresolved".into();
                row.h_bound = Some(study.extrapolated);
                row.lambda_inf = Some(report.lambda_inf.value);
                row.iterations = iterations;
                row.error_estimate = error_estimate;
                return row;
            }
            Err(e) => return failed(pt, regime, e.to_string()),
        };
    }
    let gap = match report.gap {
        GapVerdict::Positive => "positive",
        GapVerdict::Zero => "zero",
        GapVerdict::Unknown { .. } => "unknown",
    };
    SweepRow {
        alpha: pt.alpha,
        p: pt.p,
        dim: pt.dim,
        domain: pt.domain.label(),
        h_bound: report.h.value(),
        lambda_inf: Some(report.lambda_inf.value),
        gap: gap.into(),
        nu: report.nu_boundary,
        nu_tilde: report.nu_infinity,
        iterations,
        error_estimate,
        regime,
        converged,
    }
}

/// Rows in grid order, computed on at most `jobs` threads.
pub fn run_sweep(cfg: &RunConfig, jobs: usize) -> Result<Vec<SweepRow>, CliError> {
    let points = grid(cfg);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .map_err(|e| CliError::Config(format!("worker pool: {e}")))?;
    Ok(pool.install(|| points.par_iter().map(|pt| run_point(cfg, pt)).collect()))
}

pub fn sweep_exit_code(rows: &[SweepRow]) -> i32 {
    if rows.iter().all(|r| r.converged) {
        exit::SUCCESS
    } else {
        exit::NON_CONVERGENCE
    }
}

fn num(x: Option<f64>) -> String {
    x.map(|v| format!("{}", round_sig(v))).unwrap_or_default()
}

pub fn to_csv(rows: &[SweepRow]) -> Result<String, CliError> {
    let err = |e: csv::Error| CliError::Output(e.to_string());
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(COLUMNS).map_err(err)?;
    for r in rows {
        let regime = r.regime.map(|g| format!("{g:?}")).unwrap_or_default();
        w.write_record([
            num(Some(r.alpha)),
            num(Some(r.p)),
            r.dim.to_string(),
            r.domain.clone(),
            num(r.h_bound),
            num(r.lambda_inf),
            r.gap.clone(),
            num(r.nu),
            num(r.nu_tilde),
            r.iterations.map(|i| i.to_string()).unwrap_or_default(),
            num(r.error_estimate),
            regime,
        ])
        .map_err(err)?;
    }
    let bytes = w.into_inner().map_err(|e| CliError::Output(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| CliError::Output(e.to_string()))
}

/// `H` bound and `λ^∞` against `α`, one pair of curves per `p`, for the first
/// domain and dimension of the grid.
pub fn sweep_plot(rows: &[SweepRow]) -> Option<Plot> {
    let first = rows.first()?;
    let sel: Vec<&SweepRow> = rows.iter().filter(|r| r.domain == first.domain && r.dim == first.dim).collect();
    let mut ps: Vec<f64> = sel.iter().map(|r| r.p).collect();
    ps.sort_by(f64::total_cmp);
    ps.dedup();
    let mut lines = Vec::new();
    for p in ps {
        let pick = |f: fn(&SweepRow) -> Option<f64>| -> (Vec<f64>, Vec<f64>) {
            sel.iter().filter(|r| r.p == p).filter_map(|r| f(r).map(|y| (r.alpha, y))).unzip()
        };
        let (x, y) = pick(|r| r.h_bound);
        lines.push(Line { label: format!("H, p={p}"), x, y, points: true });
        let (x, y) = pick(|r| r.lambda_inf);
        lines.push(Line { label: format!("lambda_inf, p={p}"), x, y, points: false });
    }
    Some(Plot {
        title: format!("{} N={}", first.domain, first.dim),
        x_label: "alpha".into(),
        y_label: "constant".into(),
        x_axis: Axis::Linear,
        y_axis: Axis::Linear,
        lines,
    })
}
