//! Refinement studies over nested cutoff sequences and their extrapolation.
//!
//! Minima on `{δ > t_min}` (and `r < R_max`) behave like
//! `λ(L) ≈ c + K/(L + s)²` in the logarithmic cutoff length
//! `L = ln(extent/t_min)` or `ln((R_max − R)/t_min)`; `c` is the reported limit.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::params::{DomainSpec, Params};
use crate::radial::DistanceProfile;

use super::mesh::{boundary_pieces, domain_mesh};
use super::solver::{minimize_quotient_from, RayleighResult, SolverOptions};

/// Default lattice density; divisible by 4 so that the two coarser mesh
/// levels of the study are nested in the finest one.
pub const DEFAULT_PER_DECADE: usize = 684;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct StudySettings {
    /// Lattice nodes per decade of `δ`.
    pub per_decade: usize,
    /// Inner cutoffs, coarsest first. Exterior domains with a single entry
    /// keep it fixed while `r_max` grows.
    pub t_min: Vec<f64>,
    /// Outer cutoffs for exterior domains, smallest first.
    pub r_max: Vec<f64>,
    /// Also solve at `per_decade/4` and `per_decade/2` on the finest cutoff.
    pub mesh_richardson: bool,
    pub solver: SolverOptions,
}

impl Default for StudySettings {
    fn default() -> Self {
        Self {
            per_decade: DEFAULT_PER_DECADE,
            t_min: vec![1e-2, 1e-3, 1e-4, 1e-5, 1e-6],
            r_max: vec![1e4, 1e9, 1e14, 1e19, 1e24],
            mesh_richardson: true,
            solver: SolverOptions::default(),
        }
    }
}

impl StudySettings {
    /// Defaults sized for the exterior of a ball: the tail spans ~30 decades.
    pub fn exterior_default() -> Self {
        Self { per_decade: 136, t_min: vec![1e-6], ..Self::default() }
    }

    pub fn for_domain(spec: &DomainSpec) -> Self {
        if spec.is_bounded() {
            Self::default()
        } else {
            Self::exterior_default()
        }
    }

    /// Number of cutoff levels described by the settings.
    pub fn level_count(&self, spec: &DomainSpec) -> usize {
        if spec.is_bounded() {
            self.t_min.len()
        } else {
            self.t_min.len().max(self.r_max.len())
        }
    }

    fn cutoff(&self, spec: &DomainSpec, i: usize) -> (f64, Option<f64>) {
        let pick = |v: &[f64]| v[i.min(v.len() - 1)];
        if spec.is_bounded() {
            (self.t_min[i], None)
        } else {
            (pick(&self.t_min), Some(pick(&self.r_max)))
        }
    }
}

/// Logarithmic cutoff length of a level.
pub fn cutoff_length(spec: &DomainSpec, t_min: f64, r_max: Option<f64>) -> f64 {
    match (*spec, r_max) {
        (DomainSpec::ExteriorBall { radius }, Some(r)) => ((r - radius) / t_min).ln(),
        _ => {
            let extent = boundary_pieces(spec).iter().map(|p| p.2).fold(0.0, f64::max);
            (extent / t_min).ln()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CutoffFit {
    pub c: f64,
    pub k: f64,
    pub s: f64,
    pub rms: f64,
}

fn fit_fixed_shift(ls: &[f64], vs: &[f64], s: f64) -> CutoffFit {
    let n = ls.len() as f64;
    let xs: Vec<f64> = ls.iter().map(|l| 1.0 / ((l + s) * (l + s))).collect();
    let (sx, sy) = (xs.iter().sum::<f64>(), vs.iter().sum::<f64>());
    let sxx: f64 = xs.iter().map(|x| x * x).sum();
    let sxy: f64 = xs.iter().zip(vs).map(|(x, y)| x * y).sum();
    let det = n * sxx - sx * sx;
    let (c, k) = if det.abs() > 1e-300 {
        let k = (n * sxy - sx * sy) / det;
        ((sy - k * sx) / n, k)
    } else {
        (sy / n, 0.0)
    };
    let rms = (xs.iter().zip(vs).map(|(x, y)| (c + k * x - y).powi(2)).sum::<f64>() / n).sqrt();
    CutoffFit { c, k, s, rms }
}

/// Least-squares fit of `c + K/(L + s)²`; `s` by a logarithmic scan followed
/// by golden-section refinement. With two points the shift is fixed at 0.
pub fn fit_cutoff_model(ls: &[f64], vs: &[f64]) -> Result<CutoffFit> {
    if ls.len() != vs.len() || ls.len() < 2 {
        return Err(Error::TooFewLevels { required: 2, got: ls.len().min(vs.len()) });
    }
    if ls.len() == 2 {
        return Ok(fit_fixed_shift(ls, vs, 0.0));
    }
    let lmin = ls.iter().copied().fold(f64::INFINITY, f64::min);
    let lmax = ls.iter().copied().fold(0.0, f64::max);
    // u = L_min + s ranges over (0, ∞) on a log grid
    let u_of = |j: usize, n: usize| {
        let (a, b) = ((1e-3 * lmin.max(1e-3)).ln(), (100.0 * lmax.max(1.0)).ln());
        (a + (b - a) * j as f64 / (n - 1) as f64).exp()
    };
    let n = 400;
    let eval = |u: f64| fit_fixed_shift(ls, vs, u - lmin);
    let mut best = (0, f64::INFINITY);
    for j in 0..n {
        let r = eval(u_of(j, n)).rms;
        if r < best.1 {
            best = (j, r);
        }
    }
    let (mut a, mut b) = (u_of(best.0.saturating_sub(1), n).ln(), u_of((best.0 + 1).min(n - 1), n).ln());
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let f = |x: f64| eval(x.exp()).rms;
    let (mut x1, mut x2) = (b - g * (b - a), a + g * (b - a));
    let (mut f1, mut f2) = (f(x1), f(x2));
    for _ in 0..100 {
        if f1 <= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - g * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + g * (b - a);
            f2 = f(x2);
        }
    }
    let refined = eval((0.5 * (a + b)).exp());
    let grid = eval(u_of(best.0, n));
    Ok(if refined.rms <= grid.rms { refined } else { grid })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CutoffExtrapolation {
    /// Fitted limit clamped to `[0, min raw value]`.
    pub limit: f64,
    pub error_estimate: f64,
    pub fit: CutoffFit,
}

/// Extrapolates a nonincreasing cutoff sequence. The error estimate is the
/// larger change of the limit when either the coarsest or the finest level is
/// dropped.
pub fn extrapolate_cutoffs(ls: &[f64], vs: &[f64]) -> Result<CutoffExtrapolation> {
    let fit = fit_cutoff_model(ls, vs)?;
    let min_raw = vs.iter().copied().fold(f64::INFINITY, f64::min);
    let clamp = |c: f64| c.clamp(0.0, min_raw.max(0.0));
    let limit = clamp(fit.c);
    let n = ls.len();
    let error_estimate = if n >= 4 {
        let first = fit_cutoff_model(&ls[1..], &vs[1..])?;
        let last = fit_cutoff_model(&ls[..n - 1], &vs[..n - 1])?;
        (clamp(first.c) - limit).abs().max((clamp(last.c) - limit).abs())
    } else if n == 3 {
        let first = fit_fixed_shift(&ls[1..], &vs[1..], fit.s);
        let last = fit_fixed_shift(&ls[..2], &vs[..2], fit.s);
        (clamp(first.c) - limit).abs().max((clamp(last.c) - limit).abs())
    } else {
        (vs[n - 1] - limit).abs()
    };
    Ok(CutoffExtrapolation { limit, error_estimate, fit })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LevelRecord {
    pub t_min: f64,
    pub r_max: Option<f64>,
    pub per_decade: usize,
    pub cutoff_length: f64,
    pub value: f64,
    pub iterations: usize,
    pub converged: bool,
    pub elements: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RefinementStudy {
    pub levels: Vec<LevelRecord>,
    pub extrapolated: f64,
    pub error_estimate: f64,
    pub fit: CutoffFit,
    /// Exponent `q` in `c + K/L^q` suggested by the last three levels.
    pub observed_order: Option<f64>,
    /// Values at reduced lattice density on the finest cutoff.
    pub mesh_levels: Vec<LevelRecord>,
    /// Minimizer on the finest level.
    pub finest: RayleighResult,
    pub converged: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HardyProblem {
    pub params: Params,
    pub spec: DomainSpec,
}

fn observed_order(ls: &[f64], vs: &[f64]) -> Option<f64> {
    let n = vs.len();
    if n < 3 {
        return None;
    }
    let d1 = vs[n - 3] - vs[n - 2];
    let d2 = vs[n - 2] - vs[n - 1];
    if !(d1 > 0.0 && d2 > 0.0) {
        return None;
    }
    let m1 = 0.5 * (ls[n - 3] + ls[n - 2]);
    let m2 = 0.5 * (ls[n - 2] + ls[n - 1]);
    let w1 = ls[n - 2] - ls[n - 3];
    let w2 = ls[n - 1] - ls[n - 2];
    // d ≈ qK L^{−q−1} ΔL
    let q = ((d1 / w1) / (d2 / w2)).ln() / (m2 / m1).ln() - 1.0;
    q.is_finite().then_some(q)
}

/// Solves on the first `levels` nested cutoffs of `settings` and extrapolates.
pub fn refinement_study(problem: &HardyProblem, settings: &StudySettings, levels: usize) -> Result<RefinementStudy> {
    let HardyProblem { params, spec } = *problem;
    params.validate()?;
    let profile = DistanceProfile::new(spec)?;
    let available = settings.level_count(&spec);
    if levels < 2 || available < levels {
        return Err(Error::TooFewLevels { required: levels.max(2), got: available.min(levels) });
    }
    let mut records = Vec::with_capacity(levels);
    let mut last = None;
    for i in 0..levels {
        let (t_min, r_max) = settings.cutoff(&spec, i);
        let mesh = domain_mesh(&spec, settings.per_decade, t_min, r_max, &[])?;
        // a prolongated minimizer vanishes on the newly added elements, which
        // stalls the p < 2 iteration; every level starts from the hat instead
        let res = minimize_quotient_from(&mesh, &profile, &params, &settings.solver, None)?;
        records.push(LevelRecord {
            t_min,
            r_max,
            per_decade: settings.per_decade,
            cutoff_length: cutoff_length(&spec, t_min, r_max),
            value: res.value,
            iterations: res.iterations,
            converged: res.converged,
            elements: mesh.elements(),
        });
        last = Some(res);
    }
    let finest = last.expect("at least two levels");
    let ls: Vec<f64> = records.iter().map(|r| r.cutoff_length).collect();
    let vs: Vec<f64> = records.iter().map(|r| r.value).collect();
    let ext = extrapolate_cutoffs(&ls, &vs)?;

    let mut mesh_levels = Vec::new();
    let mut mesh_error = 0.0;
    if settings.mesh_richardson && settings.per_decade >= 8 {
        let (t_min, r_max) = settings.cutoff(&spec, levels - 1);
        for div in [4, 2] {
            let k = settings.per_decade / div;
            let mesh = domain_mesh(&spec, k, t_min, r_max, &[])?;
            let res = minimize_quotient_from(&mesh, &profile, &params, &settings.solver, Some(&finest.minimizer))?;
            mesh_levels.push(LevelRecord {
                t_min,
                r_max,
                per_decade: k,
                cutoff_length: cutoff_length(&spec, t_min, r_max),
                value: res.value,
                iterations: res.iterations,
                converged: res.converged,
                elements: mesh.elements(),
            });
        }
        let (v1, v2, v3) = (mesh_levels[0].value, mesh_levels[1].value, finest.value);
        let (a, b) = (v1 - v2, v2 - v3);
        mesh_error = if a > 0.0 && b > 0.0 && a > b {
            let q = (a / b).log2();
            b / (2f64.powf(q) - 1.0)
        } else {
            b.abs()
        };
    }

    let converged = records.iter().all(|r| r.converged);
    Ok(RefinementStudy {
        observed_order: observed_order(&ls, &vs),
        extrapolated: ext.limit,
        error_estimate: ext.error_estimate + mesh_error,
        fit: ext.fit,
        levels: records,
        mesh_levels,
        finest,
        converged,
    })
}

/// Refinement study over every cutoff level of the settings.
pub fn hardy_study(problem: &HardyProblem, settings: &StudySettings) -> Result<RefinementStudy> {
    refinement_study(problem, settings, settings.level_count(&problem.spec))
}
