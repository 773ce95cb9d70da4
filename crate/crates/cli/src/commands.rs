//! The subcommands, each producing a report document and an exit code.

use hardy_core::gap::HValue;
use hardy_core::indicial::{c_at, indicial_root, lambda_at, root_interval, IndicialProblem, Location};
use hardy_core::radial::DistanceProfile;
use hardy_core::rayleigh::{
    collar_study, decay_fit, default_widths, hardy_study, mesh::boundary_pieces, CollarStudy, DecayWindow,
    HardyProblem, RefinementStudy,
};
use hardy_core::{
    c_boundary, c_infinity, c_min, classify, classify_regime, convexity_shortcut, DomainSpec, NumericH, Params,
};
use serde::Serialize;
use serde_json::{json, Value};

use crate::config::{RunConfig, Suite};
use crate::error::{exit, CliError};
use crate::plots::{Axis, Line, Plot};
use crate::report::{computed, extrapolated, formula, json as to_json, ReportDocument, Series, Source, Tagged};
use crate::verify::{run_verify, VerifyOptions};

/// A finished command: report, exit code and optional figures.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub report: ReportDocument,
    pub exit_code: i32,
    /// `(file stem, plot)` pairs.
    pub plots: Vec<(String, Plot)>,
}

impl Outcome {
    fn ok(report: ReportDocument) -> Self {
        Self { report, exit_code: exit::SUCCESS, plots: Vec::new() }
    }
}

/// Largest number of minimizer samples placed in a report.
pub const PROFILE_POINTS: usize = 400;

#[derive(Serialize)]
struct ConstantsResults {
    c_boundary: Tagged,
    c_infinity: Tagged,
    c_min: Tagged,
    regime: hardy_core::BoundaryClass,
    domain_class: hardy_core::DomainClass,
    /// Exact Hardy constant of the configured domain when a convexity
    /// argument applies.
    convexity_shortcut: Option<Tagged>,
}

pub fn cmd_constants(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let q = cfg.params()?;
    let results = ConstantsResults {
        c_boundary: formula(c_boundary(&q)),
        c_infinity: formula(c_infinity(&q)),
        c_min: formula(c_min(&q)),
        regime: classify_regime(&q).boundary_class,
        domain_class: cfg.domain.class(),
        convexity_shortcut: convexity_shortcut(&q, &cfg.domain).map(formula),
    };
    Ok(Outcome::ok(ReportDocument::new("constants", cfg, results, ())?))
}

#[derive(Serialize)]
struct IndicialRow {
    mu: f64,
    nu: Tagged,
    /// `λ(ν) − μ`.
    residual: Tagged,
}

#[derive(Serialize)]
struct IndicialTable {
    location: Location,
    c: Tagged,
    interval: [Tagged; 2],
    rows: Vec<IndicialRow>,
}

/// Default number of `μ` values on `[0, c]`.
pub const DEFAULT_MU_POINTS: usize = 11;

pub fn cmd_indicial(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let q = cfg.params()?;
    let mut tables = Vec::new();
    for &location in &cfg.indicial.locations {
        let c = c_at(&q, location);
        let mus: Vec<f64> = if !cfg.indicial.mu.is_empty() {
            cfg.indicial.mu.clone()
        } else if c > 0.0 {
            (0..DEFAULT_MU_POINTS).map(|i| c * i as f64 / (DEFAULT_MU_POINTS - 1) as f64).collect()
        } else {
            vec![0.0]
        };
        let iv = root_interval(&q, location);
        let mut rows = Vec::with_capacity(mus.len());
        for mu in mus {
            let nu = indicial_root(&IndicialProblem { params: q, location, mu })?;
            rows.push(IndicialRow { mu, nu: computed(nu), residual: computed(lambda_at(&q, location, nu) - mu) });
        }
        tables.push(IndicialTable { location, c: formula(c), interval: [formula(iv.lo), formula(iv.hi)], rows });
    }
    Ok(Outcome::ok(ReportDocument::new("indicial", cfg, json!({ "tables": tables }), ())?))
}

#[derive(Serialize)]
struct LevelRow {
    t_min: f64,
    r_max: Option<f64>,
    per_decade: usize,
    cutoff_length: f64,
    value: Tagged,
    iterations: usize,
    converged: bool,
    elements: usize,
}

#[derive(Serialize)]
struct DecayRow {
    window: DecayWindow,
    slope: Option<Tagged>,
    r_squared: Option<f64>,
    points: Option<usize>,
    /// Exponent predicted from the extrapolated `H`.
    predicted: Option<Tagged>,
    error: Option<String>,
}

#[derive(Serialize)]
struct HardyResults {
    h: Tagged,
    error_estimate: Tagged,
    observed_order: Option<Tagged>,
    c_boundary: Tagged,
    c_infinity: Tagged,
    levels: Vec<LevelRow>,
    mesh_levels: Vec<LevelRow>,
    minimizer: Series,
    decay: Vec<DecayRow>,
    radial_caveat: &'static str,
}

#[derive(Serialize)]
struct StudyDiagnostics {
    converged: bool,
    iterations: usize,
    final_decrement: f64,
    el_residual: Option<f64>,
    fit: hardy_core::rayleigh::CutoffFit,
    mesh: hardy_core::rayleigh::MeshSummary,
}

fn level_rows(levels: &[hardy_core::rayleigh::LevelRecord]) -> Vec<LevelRow> {
    levels
        .iter()
        .map(|l| LevelRow {
            t_min: l.t_min,
            r_max: l.r_max,
            per_decade: l.per_decade,
            cutoff_length: l.cutoff_length,
            value: computed(l.value),
            iterations: l.iterations,
            converged: l.converged,
            elements: l.elements,
        })
        .collect()
}

fn subsample(x: &[f64], y: &[f64], max: usize) -> (Vec<f64>, Vec<f64>) {
    let n = x.len().min(y.len());
    if n <= max {
        return (x[..n].to_vec(), y[..n].to_vec());
    }
    let mut idx: Vec<usize> = (0..max).map(|k| k * (n - 1) / (max - 1)).collect();
    idx.dedup();
    (idx.iter().map(|&i| x[i]).collect(), idx.iter().map(|&i| y[i]).collect())
}

/// Fit windows used when the configuration gives none: one per boundary piece
/// from a hundred cutoffs out to `10^-2`, plus a tail window on exterior
/// domains.
pub fn default_windows(spec: &DomainSpec, study: &RefinementStudy) -> Vec<DecayWindow> {
    let finest = study.levels.last().expect("a study has levels");
    let mut out: Vec<DecayWindow> = boundary_pieces(spec)
        .iter()
        .enumerate()
        .map(|(piece, &(_, _, extent))| DecayWindow::Boundary {
            piece,
            d_lo: 100.0 * finest.t_min,
            d_hi: (1e-2f64).min(0.1 * extent),
        })
        .collect();
    if let (DomainSpec::ExteriorBall { radius }, Some(r_max)) = (*spec, finest.r_max) {
        out.push(DecayWindow::Infinity { r_lo: 100.0 * radius, r_hi: (r_max * radius).sqrt() });
    }
    out
}

/// Root at `μ = H` clamped to the admissible range of the location.
fn predicted_root(q: &Params, location: Location, h: f64) -> Option<f64> {
    let mu = h.clamp(0.0, c_at(q, location));
    indicial_root(&IndicialProblem { params: *q, location, mu }).ok()
}

fn study_plots(spec: &DomainSpec, study: &RefinementStudy, fits: &[DecayRow]) -> Vec<(String, Plot)> {
    let u = &study.finest.minimizer;
    let exterior = !spec.is_bounded();
    let profile_plot = Plot {
        title: format!("minimizer on {}", spec.label()),
        x_label: "r".into(),
        y_label: "u".into(),
        x_axis: if exterior { Axis::Log } else { Axis::Linear },
        y_axis: Axis::Linear,
        lines: vec![Line { label: "u".into(), x: u.nodes.clone(), y: u.values.clone(), points: false }],
    };

    let dist = DistanceProfile::new(*spec).ok();
    let mut decay_lines = Vec::new();
    if let Some(dist) = dist {
        let pieces = boundary_pieces(spec);
        for (k, fit) in fits.iter().enumerate() {
            let DecayWindow::Boundary { piece, d_lo, d_hi } = fit.window else { continue };
            let &(foot, dir, _) = &pieces[piece];
            let (mut xs, mut ys) = (Vec::new(), Vec::new());
            for (&r, &v) in u.nodes.iter().zip(&u.values) {
                let d = dir * (r - foot);
                if d > 0.0 && d <= 10.0 * d_hi && (dist.delta(r) - d).abs() <= 1e-12 * d.max(1.0) {
                    xs.push(d);
                    ys.push(v);
                }
            }
            decay_lines.push(Line { label: format!("piece {piece}"), x: xs, y: ys, points: false });
            if let (Some(slope), Some((x0, y0))) = (fit.slope, nearest(&decay_lines[decay_lines.len() - 1], d_lo)) {
                let x1 = d_hi;
                let y1 = y0 * (x1 / x0).powf(slope.value);
                decay_lines.push(Line {
                    label: format!("fit {k}: slope {:.4}", slope.value),
                    x: vec![x0, x1],
                    y: vec![y0, y1],
                    points: false,
                });
            }
        }
    }
    let decay_plot = Plot {
        title: "boundary decay".into(),
        x_label: "delta".into(),
        y_label: "u".into(),
        x_axis: Axis::Log,
        y_axis: Axis::Log,
        lines: decay_lines,
    };

    let ls: Vec<f64> = study.levels.iter().map(|l| l.cutoff_length).collect();
    let vs: Vec<f64> = study.levels.iter().map(|l| l.value).collect();
    let l_max = ls.iter().copied().fold(0.0, f64::max);
    let model: Vec<f64> = (0..=60).map(|i| ls[0] + (2.0 * l_max - ls[0]) * i as f64 / 60.0).collect();
    let fit = study.fit;
    let convergence_plot = Plot {
        title: "refinement convergence".into(),
        x_label: "cutoff length L".into(),
        y_label: "discrete minimum".into(),
        x_axis: Axis::Linear,
        y_axis: Axis::Linear,
        lines: vec![
            Line { label: "levels".into(), x: ls, y: vs, points: true },
            Line {
                label: "c + K/(L+s)^2".into(),
                x: model.clone(),
                y: model.iter().map(|l| fit.c + fit.k / (l + fit.s).powi(2)).collect(),
                points: false,
            },
            Line {
                label: format!("limit {:.6}", study.extrapolated),
                x: vec![model[0], *model.last().unwrap()],
                y: vec![study.extrapolated; 2],
                points: false,
            },
        ],
    };
    vec![
        ("profile".into(), profile_plot),
        ("decay".into(), decay_plot),
        ("convergence".into(), convergence_plot),
    ]
}

fn nearest(line: &Line, x: f64) -> Option<(f64, f64)> {
    line.x
        .iter()
        .zip(&line.y)
        .min_by(|a, b| (a.0.ln() - x.ln()).abs().total_cmp(&(b.0.ln() - x.ln()).abs()))
        .map(|(&a, &b)| (a, b))
}

/// Study and its report fragments, shared by `hardy` and `gap`.
struct StudyRun {
    study: RefinementStudy,
    results: HardyResults,
    diagnostics: StudyDiagnostics,
    plots: Vec<(String, Plot)>,
}

fn run_study(cfg: &RunConfig, q: &Params) -> Result<StudyRun, CliError> {
    let spec = cfg.domain;
    let study = hardy_study(&HardyProblem { params: *q, spec }, &cfg.study_settings())?;
    let profile = DistanceProfile::new(spec)?;
    let windows = if cfg.decay.windows.is_empty() { default_windows(&spec, &study) } else { cfg.decay.windows.clone() };
    let decay: Vec<DecayRow> = windows
        .into_iter()
        .map(|window| {
            let location = match window {
                DecayWindow::Boundary { .. } => Location::Boundary,
                DecayWindow::Infinity { .. } => Location::Infinity,
            };
            let predicted = predicted_root(q, location, study.extrapolated).map(formula);
            match decay_fit(&study.finest.minimizer, &profile, window) {
                Ok(fit) => DecayRow {
                    window,
                    slope: Some(computed(fit.slope)),
                    r_squared: Some(fit.r_squared),
                    points: Some(fit.points),
                    predicted,
                    error: None,
                },
                Err(e) => DecayRow { window, slope: None, r_squared: None, points: None, predicted, error: Some(e.to_string()) },
            }
        })
        .collect();
    let (x, y) = subsample(&study.finest.minimizer.nodes, &study.finest.minimizer.values, PROFILE_POINTS);
    let plots = study_plots(&spec, &study, &decay);
    let results = HardyResults {
        h: extrapolated(study.extrapolated),
        error_estimate: extrapolated(study.error_estimate),
        observed_order: study.observed_order.map(computed),
        c_boundary: formula(c_boundary(q)),
        c_infinity: formula(c_infinity(q)),
        levels: level_rows(&study.levels),
        mesh_levels: level_rows(&study.mesh_levels),
        minimizer: Series { x, y, source: Source::Computed },
        decay,
        radial_caveat: hardy_core::gap::RADIAL_CAVEAT,
    };
    let diagnostics = StudyDiagnostics {
        converged: study.converged,
        iterations: study.finest.iterations,
        final_decrement: study.finest.final_decrement,
        el_residual: study.finest.el_residual,
        fit: study.fit,
        mesh: study.finest.mesh_summary.clone(),
    };
    Ok(StudyRun { study, results, diagnostics, plots })
}

pub fn cmd_hardy(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let q = cfg.params()?;
    let run = run_study(cfg, &q)?;
    let exit_code = if run.study.converged { exit::SUCCESS } else { exit::NON_CONVERGENCE };
    let report = ReportDocument::new("hardy", cfg, &run.results, &run.diagnostics)?;
    Ok(Outcome { report, exit_code, plots: run.plots })
}

#[derive(Serialize)]
struct CollarSummary {
    lambda_inf: Tagged,
    error_estimate: Tagged,
    ends: Vec<Value>,
    /// `|numeric − closed form| / closed form`, absent when the closed form is 0.
    relative_deviation: Option<f64>,
}

fn collar_summary(study: &CollarStudy, exact: f64) -> CollarSummary {
    let ends = study
        .ends
        .iter()
        .map(|e| {
            json!({
                "end": e.end,
                "limit": extrapolated(e.limit),
                "error_estimate": extrapolated(e.error_estimate),
                "monotone": e.monotone,
                "levels": e.levels.iter().map(|l| json!({
                    "width": l.width,
                    "value": extrapolated(l.value),
                    "raw": l.raw.iter().map(|&v| computed(v)).collect::<Vec<_>>(),
                    "converged": l.converged,
                })).collect::<Vec<_>>(),
            })
        })
        .collect();
    CollarSummary {
        lambda_inf: extrapolated(study.lambda_inf),
        error_estimate: extrapolated(study.error_estimate),
        ends,
        relative_deviation: (exact > 0.0).then(|| (study.lambda_inf - exact).abs() / exact),
    }
}

pub fn cmd_gap(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let q = cfg.params()?;
    let spec = cfg.domain;
    let first = classify(&q, &spec, None, cfg.classify)?;
    let mut study_run = None;
    // set when the extrapolated H lands above λ^∞ beyond the margin
    let mut unresolved = None;
    let report = if first.h == HValue::PositiveUnknown {
        let run = run_study(cfg, &q)?;
        let numeric = NumericH { value: run.study.extrapolated, error_estimate: run.study.error_estimate };
        let r = match classify(&q, &spec, Some(numeric), cfg.classify) {
            Ok(r) => r,
            Err(e @ hardy_core::Error::InconsistentInput { .. }) => {
                unresolved = Some(e.to_string());
                first
            }
            Err(e) => return Err(e.into()),
        };
        study_run = Some(run);
        r
    } else {
        first
    };
    let widths = if cfg.collars.widths.is_empty() { default_widths(&spec) } else { cfg.collars.widths.clone() };
    let collars = collar_study(&HardyProblem { params: q, spec }, &widths, &cfg.collar_settings())?;

    let h = match &report.h {
        HValue::ExactZero { .. } | HValue::ExactValue { .. } => report.h.value().map(formula),
        HValue::NumericBound { value, .. } => Some(extrapolated(*value)),
        HValue::PositiveUnknown => None,
    };
    let converged = unresolved.is_none() && study_run.as_ref().map_or(true, |r| r.study.converged);
    let results = json!({
        "classification": to_json(&report),
        "h": h,
        "lambda_inf": formula(report.lambda_inf.value),
        "lambda_inf_numeric": collar_summary(&collars, report.lambda_inf.value),
        "nu_boundary": report.nu_boundary.map(computed),
        "nu_infinity": report.nu_infinity.map(computed),
        "study": study_run.as_ref().map(|r| to_json(&r.results)),
        "unresolved": unresolved,
    });
    let diagnostics = json!({ "study": study_run.as_ref().map(|r| to_json(&r.diagnostics)) });
    let plots = study_run.map(|r| r.plots).unwrap_or_default();
    Ok(Outcome {
        report: ReportDocument::new("gap", cfg, results, diagnostics)?,
        exit_code: if converged { exit::SUCCESS } else { exit::NON_CONVERGENCE },
        plots,
    })
}

pub fn cmd_verify(cfg: &RunConfig, corrupt_exponent: bool) -> Result<Outcome, CliError> {
    let q = cfg.params()?;
    let opts = VerifyOptions { samples: cfg.verify.samples, seed: cfg.verify.seed, corrupt_exponent };
    let suites: &[Suite] = &cfg.verify.suites;
    let outcome = run_verify(&q, suites, opts)?;
    let failed: Vec<&str> = outcome.checks.iter().filter(|c| !c.passed).map(|c| c.name.as_str()).collect();
    let summary = json!({"checks": outcome.checks.len(), "failed": failed});
    let exit_code = if outcome.passed { exit::SUCCESS } else { exit::VERIFICATION };
    let report = ReportDocument::new("verify", cfg, &outcome, summary)?;
    Ok(Outcome { report, exit_code, plots: Vec::new() })
}
