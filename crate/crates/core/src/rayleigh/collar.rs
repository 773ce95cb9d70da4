//! Collar constants: minima of the quotient over functions supported near one
//! end of the domain. Their limit as the collar shrinks is the constant at
//! infinity `λ^∞`, the minimum over the ends.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::params::{DomainSpec, Params};
use crate::radial::DistanceProfile;

use super::mesh::{boundary_pieces, GradedMesh, Segment};
use super::solver::{minimize_quotient, SolverOptions};
use super::study::{extrapolate_cutoffs, CutoffFit, HardyProblem, DEFAULT_PER_DECADE};

/// Minimum number of interior nodes in a collar mesh.
pub const MIN_COLLAR_NODES: usize = 8;

/// Absolute slack allowed, on top of the two error estimates, when checking
/// that collar limits do not decrease as the collar shrinks; the limits are
/// extrapolations, not exact minima.
pub const MONOTONE_SLACK: f64 = 1e-4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CollarEnd {
    /// `{δ < t}` next to boundary piece `piece` (ordered as in the mesh builder).
    Boundary { piece: usize },
    /// `{r > K}` for the exterior of a ball, with `K = radius / t`.
    Tail,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CollarSettings {
    pub per_decade: usize,
    /// Lattice density on exterior tails.
    pub tail_per_decade: usize,
    /// Inner cutoffs of a boundary collar, coarsest first.
    pub t_min: Vec<f64>,
    /// Outer cutoffs of a tail, smallest first.
    pub r_max: Vec<f64>,
    pub solver: SolverOptions,
}

impl Default for CollarSettings {
    fn default() -> Self {
        Self {
            per_decade: DEFAULT_PER_DECADE,
            tail_per_decade: 136,
            t_min: vec![1e-4, 1e-5, 1e-6, 1e-7, 1e-8],
            r_max: vec![1e4, 1e9, 1e14, 1e19, 1e24],
            solver: SolverOptions::default(),
        }
    }
}

/// Extrapolated constant of one collar.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CollarLevel {
    /// Collar width `t`; for a tail the core radius is `radius / t`.
    pub width: f64,
    pub value: f64,
    pub error_estimate: f64,
    /// Minima along the cutoff sequence.
    pub raw: Vec<f64>,
    pub cutoff_lengths: Vec<f64>,
    pub fit: CutoffFit,
    pub elements: usize,
    pub converged: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CollarSequence {
    pub end: CollarEnd,
    /// Widths, largest first.
    pub levels: Vec<CollarLevel>,
    /// Value at the narrowest collar.
    pub limit: f64,
    pub error_estimate: f64,
    /// Values nondecreasing as the collar shrinks, up to [`MONOTONE_SLACK`]
    /// and the error estimates.
    pub monotone: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CollarStudy {
    pub ends: Vec<CollarSequence>,
    /// Minimum of the per-end limits.
    pub lambda_inf: f64,
    pub error_estimate: f64,
}

/// Ends of a domain that carry a collar constant.
pub fn collar_ends(spec: &DomainSpec) -> Vec<CollarEnd> {
    let mut ends: Vec<CollarEnd> =
        (0..boundary_pieces(spec).len()).map(|piece| CollarEnd::Boundary { piece }).collect();
    if !spec.is_bounded() {
        ends.push(CollarEnd::Tail);
    }
    ends
}

fn collar_mesh(
    spec: &DomainSpec,
    end: CollarEnd,
    width: f64,
    cutoff: f64,
    settings: &CollarSettings,
    family: &[f64],
) -> Result<(GradedMesh, f64)> {
    let pieces = boundary_pieces(spec);
    let (segment, per_decade, extra, length) = match end {
        CollarEnd::Boundary { piece } => {
            let &(foot, dir, extent) = pieces
                .get(piece)
                .ok_or_else(|| Error::InvalidDomain(format!("no boundary piece {piece}")))?;
            if !(width > 0.0 && width <= extent) {
                return Err(Error::InvalidMesh(format!("collar width {width} outside (0, {extent}]")));
            }
            if !(cutoff < width) {
                return Err(Error::EmptyAdmissibleSpace(format!("cutoff {cutoff} not below collar width {width}")));
            }
            let seg = Segment { foot, dir, d_lo: cutoff, d_hi: width };
            (seg, settings.per_decade, family.to_vec(), (width / cutoff).ln())
        }
        CollarEnd::Tail => {
            let DomainSpec::ExteriorBall { radius } = *spec else {
                return Err(Error::InvalidDomain(format!("{} has no tail", spec.label())));
            };
            if !(width > 0.0) {
                return Err(Error::InvalidMesh(format!("collar width must be positive, got {width}")));
            }
            let k = radius / width;
            let d_lo = k - radius;
            let d_hi = cutoff - radius;
            if !(d_lo > 0.0 && d_hi > d_lo) {
                return Err(Error::EmptyAdmissibleSpace(format!("tail r in ({k}, {cutoff}) is empty")));
            }
            let extra: Vec<f64> = family.iter().map(|t| radius / t - radius).collect();
            let seg = Segment { foot: radius, dir: 1.0, d_lo, d_hi };
            (seg, settings.tail_per_decade, extra, (d_hi / d_lo).ln())
        }
    };
    let mesh = GradedMesh::from_segments(&[segment], per_decade, &extra, (true, true))?;
    Ok((mesh, length))
}

/// Constant of the collar of width `width` at `end`, extrapolated over the
/// cutoff sequence. `family` lists every width of the surrounding sequence so
/// that meshes of different widths are nested.
pub fn collar_constant(
    problem: &HardyProblem,
    end: CollarEnd,
    width: f64,
    settings: &CollarSettings,
    family: &[f64],
) -> Result<CollarLevel> {
    let HardyProblem { params, spec } = *problem;
    params.validate()?;
    let profile = DistanceProfile::new(spec)?;
    let cutoffs: &[f64] = match end {
        CollarEnd::Boundary { .. } => &settings.t_min,
        CollarEnd::Tail => &settings.r_max,
    };
    if cutoffs.len() < 2 {
        return Err(Error::TooFewLevels { required: 2, got: cutoffs.len() });
    }
    let mut raw = Vec::with_capacity(cutoffs.len());
    let mut lengths = Vec::with_capacity(cutoffs.len());
    let mut elements = 0;
    let mut converged = true;
    for (i, &cutoff) in cutoffs.iter().enumerate() {
        let (mesh, length) = collar_mesh(&spec, end, width, cutoff, settings, family)?;
        if i == 0 && mesh.free_count() < MIN_COLLAR_NODES {
            return Err(Error::CollarTooThin { interior: mesh.free_count(), required: MIN_COLLAR_NODES });
        }
        let res = minimize_quotient(&mesh, &profile, &params, &settings.solver)?;
        raw.push(res.value);
        lengths.push(length);
        elements = mesh.elements();
        converged &= res.converged;
    }
    let ext = extrapolate_cutoffs(&lengths, &raw)?;
    Ok(CollarLevel {
        width,
        value: ext.limit,
        error_estimate: ext.error_estimate,
        raw,
        cutoff_lengths: lengths,
        fit: ext.fit,
        elements,
        converged,
    })
}

/// Collar constants at every end for the given widths. Widths are sorted
/// largest first.
pub fn collar_study(problem: &HardyProblem, widths: &[f64], settings: &CollarSettings) -> Result<CollarStudy> {
    if widths.is_empty() {
        return Err(Error::TooFewLevels { required: 1, got: 0 });
    }
    let mut family = widths.to_vec();
    family.sort_by(|a, b| b.total_cmp(a));
    family.dedup();
    let mut ends = Vec::new();
    for end in collar_ends(&problem.spec) {
        let levels = family
            .iter()
            .map(|&w| collar_constant(problem, end, w, settings, &family))
            .collect::<Result<Vec<_>>>()?;
        let monotone = levels.windows(2).all(|w| {
            w[1].value >= w[0].value - MONOTONE_SLACK - w[0].error_estimate - w[1].error_estimate
        });
        let last = levels.last().expect("nonempty");
        ends.push(CollarSequence {
            end,
            limit: last.value,
            error_estimate: last.error_estimate,
            monotone,
            levels,
        });
    }
    let best = ends
        .iter()
        .min_by(|a, b| a.limit.total_cmp(&b.limit))
        .expect("every domain has a boundary piece");
    Ok(CollarStudy { lambda_inf: best.limit, error_estimate: best.error_estimate, ends })
}

/// Default collar widths on a domain of unit size.
pub const DEFAULT_WIDTHS: [f64; 4] = [0.4, 0.2, 0.1, 0.05];

/// [`DEFAULT_WIDTHS`] scaled so that the widest collar covers at most 80% of
/// the shortest boundary piece.
pub fn default_widths(spec: &DomainSpec) -> Vec<f64> {
    let extent = boundary_pieces(spec).iter().map(|p| p.2).fold(f64::INFINITY, f64::min);
    let scale = (2.0 * extent).min(1.0);
    DEFAULT_WIDTHS.iter().map(|w| w * scale).collect()
}

pub fn default_collar_study(params: Params, spec: DomainSpec) -> Result<CollarStudy> {
    collar_study(&HardyProblem { params, spec }, &default_widths(&spec), &CollarSettings::default())
}
