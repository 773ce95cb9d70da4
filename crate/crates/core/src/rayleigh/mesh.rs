//! Graded meshes built on a logarithmic lattice in `δ`.
//!
//! Interior nodes sit at `δ = 10^{j/k}` for integer `j`, where `k` is the number
//! of nodes per decade. Doubling `k`, lowering the inner cutoff, or raising the
//! outer cutoff therefore produces nested meshes, so discrete minima decrease
//! monotonically along any such sequence.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::params::DomainSpec;
use crate::radial::DistanceProfile;

const DEDUP_REL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Grading {
    /// Logarithmic lattice in `δ`, `per_decade` nodes per factor of ten.
    LogLattice { per_decade: usize },
    Uniform,
}

/// Part of the support seen from one boundary piece: `δ ∈ [d_lo, d_hi]`,
/// `r = foot + dir·δ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Segment {
    pub foot: f64,
    pub dir: f64,
    pub d_lo: f64,
    pub d_hi: f64,
}

impl Segment {
    fn r(&self, d: f64) -> f64 {
        self.foot + self.dir * d
    }
}

/// Nodes `r_0 < … < r_M`; `fixed` marks Dirichlet ends.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GradedMesh {
    pub nodes: Vec<f64>,
    pub grading: Grading,
    /// Radii of the first and last node.
    pub truncation: (f64, f64),
    pub fixed: (bool, bool),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeshSummary {
    pub elements: usize,
    pub free_nodes: usize,
    pub r_first: f64,
    pub r_last: f64,
    pub min_delta: f64,
    pub max_delta: f64,
}

impl GradedMesh {
    pub fn new(nodes: Vec<f64>, grading: Grading, fixed: (bool, bool)) -> Result<Self> {
        if nodes.len() < 2 {
            return Err(Error::InvalidMesh(format!("need at least 2 nodes, got {}", nodes.len())));
        }
        if nodes.iter().any(|x| !x.is_finite()) || nodes.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::InvalidMesh("nodes must be finite and strictly increasing".into()));
        }
        let truncation = (nodes[0], *nodes.last().unwrap());
        Ok(Self { nodes, grading, truncation, fixed })
    }

    /// Uniform mesh on `[a, b]` with `n` elements.
    pub fn uniform(a: f64, b: f64, n: usize, fixed: (bool, bool)) -> Result<Self> {
        let n = n.max(1);
        let nodes = (0..=n).map(|i| a + (b - a) * i as f64 / n as f64).collect();
        Self::new(nodes, Grading::Uniform, fixed)
    }

    /// Lattice mesh over the union of consecutive segments, with extra nodes at
    /// the given `δ` values of every segment.
    pub fn from_segments(
        segments: &[Segment],
        per_decade: usize,
        extra_deltas: &[f64],
        fixed: (bool, bool),
    ) -> Result<Self> {
        let mut nodes = Vec::new();
        for seg in segments {
            for d in lattice_deltas(seg.d_lo, seg.d_hi, per_decade, extra_deltas) {
                nodes.push(seg.r(d));
            }
        }
        nodes.sort_by(f64::total_cmp);
        nodes.dedup_by(|a, b| (*a - *b).abs() <= 1e-14 * a.abs().max(1.0));
        Self::new(nodes, Grading::LogLattice { per_decade }, fixed)
    }

    pub fn elements(&self) -> usize {
        self.nodes.len() - 1
    }

    /// Index range of nodes carrying unknowns.
    pub fn free_range(&self) -> std::ops::Range<usize> {
        let lo = usize::from(self.fixed.0);
        let hi = self.nodes.len() - usize::from(self.fixed.1);
        lo..hi.max(lo)
    }

    pub fn free_count(&self) -> usize {
        self.free_range().len()
    }

    /// Same mesh with every radius multiplied by `s`.
    pub fn dilate(&self, s: f64) -> GradedMesh {
        let nodes: Vec<f64> = self.nodes.iter().map(|x| x * s).collect();
        GradedMesh {
            truncation: (nodes[0], *nodes.last().unwrap()),
            nodes,
            grading: self.grading,
            fixed: self.fixed,
        }
    }

    pub fn summary(&self, profile: &DistanceProfile) -> MeshSummary {
        let deltas = self.nodes.iter().map(|&r| profile.delta(r));
        let (min_delta, max_delta) =
            deltas.fold((f64::INFINITY, 0.0f64), |(lo, hi), d| (lo.min(d), hi.max(d)));
        MeshSummary {
            elements: self.elements(),
            free_nodes: self.free_count(),
            r_first: self.truncation.0,
            r_last: self.truncation.1,
            min_delta,
            max_delta,
        }
    }
}

/// `d_lo`, `d_hi`, the extra values inside, and the lattice points strictly
/// between them.
pub fn lattice_deltas(d_lo: f64, d_hi: f64, per_decade: usize, extra: &[f64]) -> Vec<f64> {
    let k = per_decade.max(1) as i64;
    let mut out = vec![d_lo, d_hi];
    for &x in extra {
        if x > d_lo * (1.0 + DEDUP_REL) && x < d_hi * (1.0 - DEDUP_REL) {
            out.push(x);
        }
    }
    let fixed = out.clone();
    let near_fixed = |x: f64| fixed.iter().any(|&y| (x - y).abs() <= DEDUP_REL * y);
    let j0 = (d_lo.log10() * k as f64).floor() as i64;
    let j1 = (d_hi.log10() * k as f64).ceil() as i64;
    for j in j0..=j1 {
        let x = 10f64.powf(j as f64 / k as f64);
        if x > d_lo && x < d_hi && !near_fixed(x) {
            out.push(x);
        }
    }
    out.sort_by(f64::total_cmp);
    out
}

/// Boundary pieces of a domain, see [`DomainSpec::boundary_pieces`].
pub fn boundary_pieces(spec: &DomainSpec) -> Vec<(f64, f64, f64)> {
    spec.boundary_pieces()
}

/// Mesh of the truncated domain `{δ > t_min}` (and `r < r_max` for exterior
/// domains). The centre of a ball is a free node; all cut points are Dirichlet.
pub fn domain_mesh(
    spec: &DomainSpec,
    per_decade: usize,
    t_min: f64,
    r_max: Option<f64>,
    extra_deltas: &[f64],
) -> Result<GradedMesh> {
    spec.validate()?;
    if !(t_min > 0.0) {
        return Err(Error::InvalidMesh(format!("t_min must be positive, got {t_min}")));
    }
    let (segments, fixed) = match *spec {
        DomainSpec::ExteriorBall { radius } => {
            let r_max = r_max.ok_or_else(|| Error::InvalidMesh("exterior domain needs r_max".into()))?;
            if !(r_max - radius > t_min) {
                return Err(Error::EmptyAdmissibleSpace(format!("r_max={r_max} too close to the sphere")));
            }
            (vec![Segment { foot: radius, dir: 1.0, d_lo: t_min, d_hi: r_max - radius }], (true, true))
        }
        DomainSpec::Ball { radius } => {
            (vec![Segment { foot: radius, dir: -1.0, d_lo: t_min, d_hi: radius }], (false, true))
        }
        _ => {
            let segs = boundary_pieces(spec)
                .into_iter()
                .map(|(foot, dir, len)| Segment { foot, dir, d_lo: t_min, d_hi: len })
                .collect();
            (segs, (true, true))
        }
    };
    for s in &segments {
        if !(s.d_hi > s.d_lo) {
            return Err(Error::EmptyAdmissibleSpace(format!("t_min={t_min} exceeds the domain extent")));
        }
    }
    GradedMesh::from_segments(&segments, per_decade, extra_deltas, fixed)
}

/// Piecewise-linear function on a mesh, zero at Dirichlet nodes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridFn {
    pub nodes: Vec<f64>,
    pub values: Vec<f64>,
}

impl GridFn {
    pub fn new(mesh: &GradedMesh, values: Vec<f64>) -> Result<Self> {
        if values.len() != mesh.nodes.len() {
            return Err(Error::InvalidMesh(format!(
                "{} values for {} nodes",
                values.len(),
                mesh.nodes.len()
            )));
        }
        let mut values = values;
        if mesh.fixed.0 {
            values[0] = 0.0;
        }
        if mesh.fixed.1 {
            *values.last_mut().unwrap() = 0.0;
        }
        Ok(Self { nodes: mesh.nodes.clone(), values })
    }

    /// Linear interpolation, zero outside the node range.
    pub fn eval(&self, r: f64) -> f64 {
        let n = self.nodes.len();
        if n == 0 || r < self.nodes[0] || r > self.nodes[n - 1] {
            return 0.0;
        }
        let i = match self.nodes.binary_search_by(|x| x.total_cmp(&r)) {
            Ok(i) => return self.values[i],
            Err(i) => i,
        };
        let (a, b) = (self.nodes[i - 1], self.nodes[i]);
        let t = (r - a) / (b - a);
        self.values[i - 1] * (1.0 - t) + self.values[i] * t
    }

    /// Interpolant on another mesh.
    pub fn prolongate(&self, mesh: &GradedMesh) -> GridFn {
        let values = mesh.nodes.iter().map(|&r| self.eval(r)).collect();
        GridFn::new(mesh, values).expect("lengths match")
    }

    pub fn scale(&mut self, c: f64) {
        self.values.iter_mut().for_each(|v| *v *= c);
    }
}
