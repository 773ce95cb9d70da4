//! The gap verdict: Hardy constant, constant at infinity, spectral gap,
//! existence of minimizers, criticality and predicted decay exponents, decided
//! by the position of `α+p` relative to `1` and `N` and by the domain class.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::indicial::{c_at, indicial_root, IndicialProblem, Location};
use crate::params::{c_boundary, c_infinity, c_min, classify_regime, BoundaryClass, DomainClass, DomainSpec, Params};

/// Multiple of the extrapolation error required to certify a positive gap.
pub const GAP_ERROR_FACTOR: f64 = 3.0;

/// Relative floor on the gap margin. Error estimates obtained by resampling
/// the cutoff sequence do not see the form error of the extrapolation model.
pub const GAP_RELATIVE_FLOOR: f64 = 1e-2;

/// Numeric estimate of `H` with its error estimate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NumericH {
    pub value: f64,
    pub error_estimate: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum HValue {
    ExactZero { basis: String },
    ExactValue { value: f64, basis: String },
    /// Discrete minimum over radial functions: an upper bound for `H`.
    NumericBound { value: f64, error_estimate: f64 },
    PositiveUnknown,
}

impl HValue {
    /// Best available number for `H`.
    pub fn value(&self) -> Option<f64> {
        match self {
            HValue::ExactZero { .. } => Some(0.0),
            HValue::ExactValue { value, .. } | HValue::NumericBound { value, .. } => Some(*value),
            HValue::PositiveUnknown => None,
        }
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, HValue::ExactZero { .. } | HValue::ExactValue { .. })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LambdaInf {
    pub value: f64,
    pub formula: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GapVerdict {
    Positive,
    Zero,
    /// `estimate = λ^∞ − H` when a numeric `H` is available.
    Unknown { estimate: Option<f64> },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Existence {
    Yes,
    No,
    IffGapPositive,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Criticality {
    /// Ground state in `L^p` with respect to `weight`.
    PositiveCritical { weight: String },
    NullCritical { weight: String },
    /// Not produced by the current case split; kept for perturbed problems.
    Subcritical,
    NotDetermined,
}

/// Reason attached to one field of the report.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FieldBasis {
    pub field: String,
    pub basis: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GapReport {
    pub params: Params,
    pub domain: DomainSpec,
    pub domain_class: DomainClass,
    pub regime: BoundaryClass,
    pub h: HValue,
    pub lambda_inf: LambdaInf,
    pub gap: GapVerdict,
    /// Margin used to decide the gap from a numeric `H`.
    pub gap_margin: Option<f64>,
    pub minimizer_exists: Existence,
    pub criticality: Criticality,
    pub nu_boundary: Option<f64>,
    pub nu_infinity: Option<f64>,
    pub basis: Vec<FieldBasis>,
    /// Open questions touching this case.
    pub notes: Vec<String>,
    pub radial_caveat: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ClassifyOptions {
    /// Apply the no-gap results for convex and mean concave model domains.
    pub use_shortcuts: bool,
}

impl Default for ClassifyOptions {
    fn default() -> Self {
        Self { use_shortcuts: true }
    }
}

pub const RADIAL_CAVEAT: &str =
    "numeric H is a minimum over radial functions on truncated domains: an upper bound for H";

const W_POTENTIAL: &str = "delta^-(alpha+p)";
const W_ONE: &str = "delta^-1";

/// Exact `H` for model domains whose boundary curvature rules out a gap:
/// balls and intervals with `α+p ≥ 1` give `c_{α,p,1}`, the exterior of a
/// ball with `α+p ≤ N` gives `c_{α,p}`.
pub fn convexity_shortcut(params: &Params, spec: &DomainSpec) -> Option<f64> {
    let s = params.alpha_plus_p();
    let tol = classify_regime(params).eq_tolerance;
    match spec {
        DomainSpec::Ball { .. } | DomainSpec::Interval { half_line: false, .. } if s >= 1.0 - tol => {
            Some(c_boundary(params))
        }
        DomainSpec::ExteriorBall { .. } if s <= params.n() + tol => Some(c_min(params)),
        _ => None,
    }
}

/// Decay exponents predicted from `H`: the boundary root at `μ = H` and, for
/// exterior domains, the root at infinity.
pub fn predict_decay(params: &Params, spec: &DomainSpec, h: f64) -> Result<(f64, Option<f64>)> {
    let nu = indicial_root(&IndicialProblem { params: *params, location: Location::Boundary, mu: h })?;
    let nu_inf = if spec.is_bounded() {
        None
    } else {
        Some(indicial_root(&IndicialProblem { params: *params, location: Location::Infinity, mu: h })?)
    };
    Ok((nu, nu_inf))
}

/// Cell of the verdict table before numeric input is taken into account.
struct Cell {
    h: HValue,
    lambda_inf: LambdaInf,
    gap: GapVerdict,
    existence: Existence,
    criticality: Criticality,
    basis: Vec<FieldBasis>,
    notes: Vec<String>,
}

fn basis(field: &str, text: &str) -> FieldBasis {
    FieldBasis { field: field.into(), basis: text.into() }
}

fn zero_cell(lambda_inf: LambdaInf, h_basis: &str, criticality: Criticality) -> Cell {
    Cell {
        h: HValue::ExactZero { basis: h_basis.into() },
        lambda_inf,
        gap: GapVerdict::Zero,
        existence: Existence::No,
        criticality,
        basis: Vec::new(),
        notes: Vec::new(),
    }
}

fn table_cell(params: &Params, class: DomainClass, regime: BoundaryClass) -> Cell {
    let c1 = LambdaInf { value: c_boundary(params), formula: "c_{alpha,p,1}".into() };
    let cn = LambdaInf { value: c_infinity(params), formula: "c_{alpha,p,N}".into() };
    let cmin = LambdaInf { value: c_min(params), formula: "c_{alpha,p} = min(c_{alpha,p,1}, c_{alpha,p,N})".into() };
    let open_gap = |basis_text: &str, lambda_inf: LambdaInf| Cell {
        h: HValue::PositiveUnknown,
        lambda_inf,
        gap: GapVerdict::Unknown { estimate: None },
        existence: Existence::IffGapPositive,
        criticality: Criticality::NotDetermined,
        basis: vec![basis("h", basis_text)],
        notes: Vec::new(),
    };
    match (class, regime) {
        (DomainClass::HalfSpace, _) => Cell {
            h: HValue::ExactValue { value: c1.value, basis: "half-line: sharp one-dimensional constant".into() },
            lambda_inf: c1,
            gap: GapVerdict::Zero,
            existence: Existence::No,
            criticality: Criticality::NotDetermined,
            basis: vec![basis("lambda_inf", "dilation invariance of the half-line quotient")],
            notes: Vec::new(),
        },
        (DomainClass::Bounded, BoundaryClass::Sub1) => Cell {
            h: HValue::ExactZero { basis: "alpha+p < 1: test functions delta^(eps/p) give quotient (eps/p)^p".into() },
            lambda_inf: c1,
            gap: GapVerdict::Positive,
            existence: Existence::Yes,
            criticality: Criticality::PositiveCritical { weight: W_POTENTIAL.into() },
            basis: vec![
                basis("minimizer_exists", "the constant 1 is a minimizer with finite weighted norm"),
                basis("lambda_inf", "bounded domain: constant at infinity is c_{alpha,p,1}"),
            ],
            notes: Vec::new(),
        },
        (DomainClass::Bounded, BoundaryClass::Eq1) => {
            let mut cell = zero_cell(c1, "alpha+p = 1: c_{alpha,p,1} = 0", Criticality::NullCritical {
                weight: W_ONE.into(),
            });
            cell.basis.push(basis("criticality", "ground state 1 is not in the weighted space"));
            cell
        }
        (DomainClass::Bounded, _) => {
            let mut cell = open_gap("alpha+p > 1 on a bounded domain: H > 0", c1);
            cell.basis.push(basis("lambda_inf", "bounded domain: constant at infinity is c_{alpha,p,1}"));
            cell
        }
        (DomainClass::Exterior, BoundaryClass::Sub1) => {
            let mut cell = open_gap("exterior domain with alpha+p < 1: H > 0", c1);
            cell.basis.push(basis("lambda_inf", "exterior domain: c_{alpha,p} = c_{alpha,p,1} when alpha+p < 1"));
            cell
        }
        (DomainClass::Exterior, BoundaryClass::Eq1 | BoundaryClass::EqN) => {
            let mut cell = zero_cell(cmin, "alpha+p in {1, N}: c_{alpha,p} = 0", Criticality::NotDetermined);
            cell.basis.push(basis("minimizer_exists", "a minimizer would be constant, which is not in the weighted space"));
            cell.notes.push("open question: whether the (alpha,p)-Laplacian is critical here".into());
            cell
        }
        (DomainClass::Exterior, BoundaryClass::Between) => {
            let mut cell = open_gap("exterior domain with 1 != alpha+p < N: H > 0", cmin);
            cell.notes.push(
                "open question: exterior domains with a positive gap are only known for N >= 7; \
                 the range 1 < alpha+p < 7 is unresolved in general"
                    .into(),
            );
            cell
        }
        (DomainClass::Exterior, BoundaryClass::SupN) => Cell {
            h: HValue::ExactValue {
                value: cn.value,
                basis: "alpha+p > N: c_{alpha,p,N} <= H <= lambda_inf = c_{alpha,p,N}".into(),
            },
            lambda_inf: cn,
            gap: GapVerdict::Zero,
            existence: Existence::No,
            criticality: Criticality::NotDetermined,
            basis: vec![basis("minimizer_exists", "a minimizer would decay no faster than |x|^((alpha+p-N)/p)")],
            notes: Vec::new(),
        },
    }
}

/// Verdict for `(params, spec)`, optionally informed by a numeric `H`.
pub fn classify(params: &Params, spec: &DomainSpec, h_input: Option<NumericH>, options: ClassifyOptions) -> Result<GapReport> {
    params.validate()?;
    spec.validate()?;
    let regime = classify_regime(params).boundary_class;
    let class = spec.class();
    let mut cell = table_cell(params, class, regime);
    let lambda = cell.lambda_inf.value;
    let margin = h_input.map(|h| (GAP_ERROR_FACTOR * h.error_estimate).max(GAP_RELATIVE_FLOOR * lambda));
    if let (Some(h), Some(m)) = (h_input, margin) {
        if !(h.value.is_finite() && h.value >= -m) || h.value > lambda + m {
            return Err(Error::InconsistentInput { h: h.value, lambda_inf: lambda, margin: m });
        }
    }

    let mut radial_caveat = None;
    if cell.h == HValue::PositiveUnknown {
        let shortcut = if options.use_shortcuts { convexity_shortcut(params, spec) } else { None };
        if let Some(v) = shortcut {
            cell.h = HValue::ExactValue {
                value: v,
                basis: "no gap: convex or mean concave model domain, H = lambda_inf".into(),
            };
            cell.gap = GapVerdict::Zero;
            cell.existence = Existence::No;
        } else if let (Some(h), Some(m)) = (h_input, margin) {
            cell.h = HValue::NumericBound { value: h.value, error_estimate: h.error_estimate };
            radial_caveat = Some(RADIAL_CAVEAT.to_string());
            let estimate = lambda - h.value;
            if estimate > m {
                cell.gap = GapVerdict::Positive;
                cell.existence = Existence::Yes;
                cell.criticality = Criticality::PositiveCritical { weight: W_POTENTIAL.into() };
                cell.basis.push(basis("gap", "lambda_inf - H exceeds the margin"));
            } else {
                cell.gap = GapVerdict::Unknown { estimate: Some(estimate) };
            }
        }
    }

    // decay exponents from H, capped at the admissible range
    let (nu_boundary, nu_infinity) = match cell.h.value() {
        Some(h) => {
            let cap_b = c_at(params, Location::Boundary);
            let nu = indicial_root(&IndicialProblem {
                params: *params,
                location: Location::Boundary,
                mu: h.clamp(0.0, cap_b),
            })?;
            let nu_inf = if spec.is_bounded() {
                None
            } else {
                let cap_i = c_at(params, Location::Infinity);
                Some(indicial_root(&IndicialProblem {
                    params: *params,
                    location: Location::Infinity,
                    mu: h.clamp(0.0, cap_i),
                })?)
            };
            (Some(nu), nu_inf)
        }
        None => (None, None),
    };
    if nu_boundary.is_some() {
        cell.basis.push(basis("nu_boundary", "boundary indicial root at mu = H"));
    }
    if nu_infinity.is_some() {
        cell.basis.push(basis("nu_infinity", "indicial root at infinity at mu = H"));
    }

    Ok(GapReport {
        params: *params,
        domain: *spec,
        domain_class: class,
        regime,
        h: cell.h,
        lambda_inf: cell.lambda_inf,
        gap: cell.gap,
        gap_margin: margin,
        minimizer_exists: cell.existence,
        criticality: cell.criticality,
        nu_boundary,
        nu_infinity,
        basis: cell.basis,
        notes: cell.notes,
        radial_caveat,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(alpha: f64, p: f64) -> Params {
        Params::new(alpha, p, 3).unwrap()
    }

    const ANNULUS: DomainSpec = DomainSpec::Annulus { r0: 1.0, r1: 2.0 };
    const EXTERIOR: DomainSpec = DomainSpec::ExteriorBall { radius: 1.0 };
    const PLAIN: ClassifyOptions = ClassifyOptions { use_shortcuts: false };

    #[test]
    fn bounded_eq1() {
        let r = classify(&p(-1.0, 2.0), &ANNULUS, None, PLAIN).unwrap();
        assert!(matches!(r.h, HValue::ExactZero { .. }));
        assert_eq!(r.lambda_inf.value, 0.0);
        assert_eq!(r.gap, GapVerdict::Zero);
        assert_eq!(r.minimizer_exists, Existence::No);
        assert_eq!(r.criticality, Criticality::NullCritical { weight: W_ONE.into() });
    }

    #[test]
    fn bounded_sub1() {
        let params = p(-1.5, 2.0);
        let r = classify(&params, &ANNULUS, None, PLAIN).unwrap();
        assert!(matches!(r.h, HValue::ExactZero { .. }));
        assert_eq!(r.lambda_inf.value, c_boundary(&params));
        assert_eq!(r.gap, GapVerdict::Positive);
        assert_eq!(r.minimizer_exists, Existence::Yes);
        assert!(matches!(r.criticality, Criticality::PositiveCritical { .. }));
        assert_eq!(r.nu_boundary, Some(0.0));
    }

    #[test]
    fn exterior_supn() {
        let params = p(0.0, 4.0);
        let r = classify(&params, &EXTERIOR, None, PLAIN).unwrap();
        assert_eq!(r.h.value(), Some(c_infinity(&params)));
        assert_eq!(r.lambda_inf.value, c_infinity(&params));
        assert_eq!(r.gap, GapVerdict::Zero);
        assert_eq!(r.minimizer_exists, Existence::No);
        // at μ = c_{α,p,N} the root at infinity is the peak exponent
        assert!((r.nu_infinity.unwrap() - 0.25).abs() < 1e-12);
    }

    #[test]
    fn shortcuts() {
        assert_eq!(convexity_shortcut(&p(0.0, 2.0), &DomainSpec::Ball { radius: 1.0 }), Some(0.25));
        assert_eq!(convexity_shortcut(&p(0.0, 2.0), &EXTERIOR), Some(0.25));
        assert_eq!(convexity_shortcut(&p(0.0, 2.0), &ANNULUS), None);
        assert_eq!(convexity_shortcut(&p(-1.5, 2.0), &DomainSpec::Ball { radius: 1.0 }), None);
    }

    #[test]
    fn predict_decay_examples() {
        let (nu, none) = predict_decay(&p(-1.5, 2.0), &ANNULUS, 0.0).unwrap();
        assert_eq!((nu, none), (0.0, None));
        let (nu, nt) = predict_decay(&p(0.0, 2.0), &EXTERIOR, 3.0 / 16.0).unwrap();
        assert!((nu - 0.75).abs() < 1e-12);
        assert!((nt.unwrap() + 0.75).abs() < 1e-12);
        assert!(predict_decay(&p(0.0, 2.0), &ANNULUS, 0.3).is_err());
    }

    #[test]
    fn numeric_gap_decision() {
        let params = p(0.0, 2.0);
        let far = NumericH { value: 0.2, error_estimate: 1e-4 };
        let r = classify(&params, &ANNULUS, Some(far), PLAIN).unwrap();
        assert_eq!(r.gap, GapVerdict::Positive);
        assert_eq!(r.minimizer_exists, Existence::Yes);
        assert!(r.radial_caveat.is_some());
        let near = NumericH { value: 0.2499, error_estimate: 1e-4 };
        let r = classify(&params, &ANNULUS, Some(near), PLAIN).unwrap();
        assert!(matches!(r.gap, GapVerdict::Unknown { estimate: Some(_) }));
        assert_eq!(r.minimizer_exists, Existence::IffGapPositive);
        let over = NumericH { value: 0.3, error_estimate: 1e-4 };
        assert!(matches!(
            classify(&params, &ANNULUS, Some(over), PLAIN),
            Err(Error::InconsistentInput { .. })
        ));
    }
}
