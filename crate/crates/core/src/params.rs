//! Parameter triple, radial model domains, regime detection and the closed-form
//! constants `c_{α,p,m} = |(α+p−m)/p|^p`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default threshold for detecting `α+p ∈ {1, N}`.
pub const EQ_TOLERANCE: f64 = 1e-12;

/// The triple `(α, p, N)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Params {
    pub alpha: f64,
    pub p: f64,
    pub dim: u32,
}

impl Params {
    pub fn new(alpha: f64, p: f64, dim: u32) -> Result<Self> {
        let params = Self { alpha, p, dim };
        params.validate()?;
        Ok(params)
    }

    pub fn validate(&self) -> Result<()> {
        if !self.alpha.is_finite() {
            return Err(Error::InvalidParams(format!("alpha must be finite, got {}", self.alpha)));
        }
        if !(self.p.is_finite() && self.p > 1.0) {
            return Err(Error::InvalidParams(format!("p must lie in (1, inf), got {}", self.p)));
        }
        if self.dim < 2 {
            return Err(Error::InvalidParams(format!("dim must be >= 2, got {}", self.dim)));
        }
        Ok(())
    }

    /// `α + p`, the quantity every case split depends on.
    pub fn alpha_plus_p(&self) -> f64 {
        self.alpha + self.p
    }

    pub fn n(&self) -> f64 {
        f64::from(self.dim)
    }
}

/// Radial model domain.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum DomainSpec {
    /// One-dimensional model `(0, b)`. In half-line mode the distance is `t`
    /// (the half-space reduction); otherwise `min(t, b − t)`. No `r^{N−1}` weight.
    Interval { b: f64, half_line: bool },
    Ball { radius: f64 },
    Annulus { r0: f64, r1: f64 },
    ExteriorBall { radius: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DomainClass {
    Bounded,
    Exterior,
    /// Half-line interval, the 1D model of the half-space.
    HalfSpace,
}

impl DomainSpec {
    pub fn validate(&self) -> Result<()> {
        let positive = |name: &str, v: f64| -> Result<()> {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(Error::InvalidDomain(format!("{name} must be positive and finite, got {v}")))
            }
        };
        match *self {
            DomainSpec::Interval { b, .. } => positive("b", b),
            DomainSpec::Ball { radius } | DomainSpec::ExteriorBall { radius } => {
                positive("radius", radius)
            }
            DomainSpec::Annulus { r0, r1 } => {
                positive("r0", r0)?;
                positive("r1", r1)?;
                if r0 < r1 {
                    Ok(())
                } else {
                    Err(Error::InvalidDomain(format!("annulus needs r0 < r1, got {r0} >= {r1}")))
                }
            }
        }
    }

    pub fn class(&self) -> DomainClass {
        match self {
            DomainSpec::Interval { half_line: true, .. } => DomainClass::HalfSpace,
            DomainSpec::Interval { .. } | DomainSpec::Ball { .. } | DomainSpec::Annulus { .. } => {
                DomainClass::Bounded
            }
            DomainSpec::ExteriorBall { .. } => DomainClass::Exterior,
        }
    }

    pub fn is_bounded(&self) -> bool {
        !matches!(self, DomainSpec::ExteriorBall { .. })
    }

    /// Whether the radial measure `r^{N−1} dr` applies.
    pub fn uses_radial_weight(&self) -> bool {
        !matches!(self, DomainSpec::Interval { .. })
    }

    /// Boundary pieces as `(foot, dir, extent)`: near the piece `r = foot + dir·δ`
    /// for `δ ∈ (0, extent]`, where `extent` is the distance to the far side of
    /// the piece's region (unbounded for the exterior of a ball).
    pub fn boundary_pieces(&self) -> Vec<(f64, f64, f64)> {
        match *self {
            DomainSpec::Interval { b, half_line: true } => vec![(0.0, 1.0, b)],
            DomainSpec::Interval { b, half_line: false } => vec![(0.0, 1.0, b / 2.0), (b, -1.0, b / 2.0)],
            DomainSpec::Ball { radius } => vec![(radius, -1.0, radius)],
            DomainSpec::Annulus { r0, r1 } => {
                let h = (r1 - r0) / 2.0;
                vec![(r0, 1.0, h), (r1, -1.0, h)]
            }
            DomainSpec::ExteriorBall { radius } => vec![(radius, 1.0, f64::INFINITY)],
        }
    }

    /// Same kind with every length multiplied by `s`.
    pub fn dilate(&self, s: f64) -> DomainSpec {
        match *self {
            DomainSpec::Interval { b, half_line } => DomainSpec::Interval { b: b * s, half_line },
            DomainSpec::Ball { radius } => DomainSpec::Ball { radius: radius * s },
            DomainSpec::Annulus { r0, r1 } => DomainSpec::Annulus { r0: r0 * s, r1: r1 * s },
            DomainSpec::ExteriorBall { radius } => DomainSpec::ExteriorBall { radius: radius * s },
        }
    }

    pub fn label(&self) -> String {
        match *self {
            DomainSpec::Interval { b, half_line: true } => format!("interval(0,{b};half-line)"),
            DomainSpec::Interval { b, half_line: false } => format!("interval(0,{b})"),
            DomainSpec::Ball { radius } => format!("ball({radius})"),
            DomainSpec::Annulus { r0, r1 } => format!("annulus({r0},{r1})"),
            DomainSpec::ExteriorBall { radius } => format!("exterior_ball({radius})"),
        }
    }
}

/// Position of `α+p` relative to `1` and `N`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundaryClass {
    /// α+p < 1
    Sub1,
    /// α+p = 1
    Eq1,
    /// 1 < α+p < N
    Between,
    /// α+p = N
    EqN,
    /// α+p > N
    SupN,
}

impl BoundaryClass {
    pub const ALL: [BoundaryClass; 5] = [
        BoundaryClass::Sub1,
        BoundaryClass::Eq1,
        BoundaryClass::Between,
        BoundaryClass::EqN,
        BoundaryClass::SupN,
    ];
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Regime {
    pub boundary_class: BoundaryClass,
    pub eq_tolerance: f64,
}

/// `c_{α,p,m}`; `m` must be `1` or `N`.
pub fn c_const(params: &Params, m: u32) -> Result<f64> {
    if m != 1 && m != params.dim {
        return Err(Error::InvalidConstantIndex { m, dim: params.dim });
    }
    Ok(c_value(params, f64::from(m)))
}

fn c_value(params: &Params, m: f64) -> f64 {
    ((params.alpha_plus_p() - m) / params.p).abs().powf(params.p)
}

/// `c_{α,p,1}`.
pub fn c_boundary(params: &Params) -> f64 {
    c_value(params, 1.0)
}

/// `c_{α,p,N}`.
pub fn c_infinity(params: &Params) -> f64 {
    c_value(params, params.n())
}

/// `c_{α,p} = min{c_{α,p,1}, c_{α,p,N}}`.
pub fn c_min(params: &Params) -> f64 {
    c_boundary(params).min(c_infinity(params))
}

pub fn classify_regime(params: &Params) -> Regime {
    classify_regime_with(params, EQ_TOLERANCE)
}

pub fn classify_regime_with(params: &Params, eq_tolerance: f64) -> Regime {
    let s = params.alpha_plus_p();
    let n = params.n();
    let boundary_class = if (s - 1.0).abs() <= eq_tolerance {
        BoundaryClass::Eq1
    } else if (s - n).abs() <= eq_tolerance {
        BoundaryClass::EqN
    } else if s < 1.0 {
        BoundaryClass::Sub1
    } else if s < n {
        BoundaryClass::Between
    } else {
        BoundaryClass::SupN
    };
    Regime { boundary_class, eq_tolerance }
}
