//! Radial distance profiles and the radial `(α,p)`-Laplacian
//! `r^{1−N}(r^{N−1} δ^{−α} |f′|^{p−2} f′)′`, with residual, sign, quotient and
//! integrability checks built on top of it.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::indicial::{lambda_at, root_interval, Location};
use crate::params::{DomainSpec, Params};
use crate::quadrature::{jacobi_unit, legendre_unit};

/// Relative finite-difference step used when no analytic derivatives exist.
pub const DEFAULT_H_REL: f64 = 1e-4;

const KINK_TOL: f64 = 1e-12;

/// `δ_Ω` as a function of the radius for a radial model domain.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DistanceProfile {
    pub spec: DomainSpec,
}

impl DistanceProfile {
    pub fn new(spec: DomainSpec) -> Result<Self> {
        spec.validate()?;
        Ok(Self { spec })
    }

    /// Open interval of admissible radii.
    pub fn domain(&self) -> (f64, f64) {
        match self.spec {
            DomainSpec::Interval { b, .. } => (0.0, b),
            DomainSpec::Ball { radius } => (0.0, radius),
            DomainSpec::Annulus { r0, r1 } => (r0, r1),
            DomainSpec::ExteriorBall { radius } => (radius, f64::INFINITY),
        }
    }

    pub fn kink_radii(&self) -> Vec<f64> {
        match self.spec {
            DomainSpec::Interval { b, half_line: false } => vec![b / 2.0],
            DomainSpec::Annulus { r0, r1 } => vec![(r0 + r1) / 2.0],
            _ => Vec::new(),
        }
    }

    pub fn contains(&self, r: f64) -> bool {
        let (lo, hi) = self.domain();
        r > lo && r < hi
    }

    pub fn is_kink(&self, r: f64) -> bool {
        self.kink_radii().iter().any(|&k| (r - k).abs() <= KINK_TOL * k.abs().max(1.0))
    }

    /// `δ(r)`, without domain checks.
    pub fn delta(&self, r: f64) -> f64 {
        match self.spec {
            DomainSpec::Interval { half_line: true, .. } => r,
            DomainSpec::Interval { b, half_line: false } => r.min(b - r),
            DomainSpec::Ball { radius } => radius - r,
            DomainSpec::Annulus { r0, r1 } => (r - r0).min(r1 - r),
            DomainSpec::ExteriorBall { radius } => r - radius,
        }
    }

    /// `δ′(r) ∈ {−1, 1}` away from kinks.
    pub fn delta_slope(&self, r: f64) -> f64 {
        match self.spec {
            DomainSpec::Interval { half_line: true, .. } | DomainSpec::ExteriorBall { .. } => 1.0,
            DomainSpec::Ball { .. } => -1.0,
            DomainSpec::Interval { b, half_line: false } => {
                if r < b / 2.0 {
                    1.0
                } else {
                    -1.0
                }
            }
            DomainSpec::Annulus { r0, r1 } => {
                if r < (r0 + r1) / 2.0 {
                    1.0
                } else {
                    -1.0
                }
            }
        }
    }

    /// Volume weight `r^{N−1}` (or `1` for the one-dimensional model).
    pub fn weight(&self, dim: u32, r: f64) -> f64 {
        if self.spec.uses_radial_weight() {
            r.powi(dim as i32 - 1)
        } else {
            1.0
        }
    }

    fn check_point(&self, r: f64) -> Result<()> {
        if !(r.is_finite() && self.contains(r)) {
            return Err(Error::OutsideDomain { r });
        }
        if self.is_kink(r) {
            return Err(Error::KinkPoint { r });
        }
        Ok(())
    }

    /// Length scale available around `r` for a symmetric stencil.
    fn stencil_scale(&self, r: f64) -> f64 {
        let mut s = self.delta(r);
        for k in self.kink_radii() {
            s = s.min((r - k).abs());
        }
        if self.spec.uses_radial_weight() {
            s = s.min(r);
        }
        s
    }
}

/// A radial profile `r ↦ f(r)`; analytic profiles also supply `(f′, f″)`.
pub trait RadialFn {
    fn value(&self, r: f64) -> f64;

    fn derivatives(&self, _r: f64) -> Option<(f64, f64)> {
        None
    }
}

/// Variable a [`PowerSum`] is expressed in.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PowerBase {
    Delta(DistanceProfile),
    Radius,
}

/// `Σ c_k x^{e_k}` with `x = δ(r)` or `x = r`.
#[derive(Debug, Clone, PartialEq)]
pub struct PowerSum {
    pub base: PowerBase,
    pub terms: Vec<(f64, f64)>,
}

impl PowerSum {
    pub fn delta_power(profile: DistanceProfile, nu: f64) -> Self {
        Self { base: PowerBase::Delta(profile), terms: vec![(1.0, nu)] }
    }

    pub fn radius_power(nu: f64) -> Self {
        Self { base: PowerBase::Radius, terms: vec![(1.0, nu)] }
    }

    pub fn constant(c: f64) -> Self {
        Self { base: PowerBase::Radius, terms: vec![(c, 0.0)] }
    }

    fn base_value(&self, r: f64) -> (f64, f64) {
        match self.base {
            PowerBase::Delta(profile) => (profile.delta(r), profile.delta_slope(r)),
            PowerBase::Radius => (r, 1.0),
        }
    }
}

impl RadialFn for PowerSum {
    fn value(&self, r: f64) -> f64 {
        let (x, _) = self.base_value(r);
        self.terms.iter().map(|&(c, e)| c * x.powf(e)).sum()
    }

    fn derivatives(&self, r: f64) -> Option<(f64, f64)> {
        let (x, slope) = self.base_value(r);
        let mut d1 = 0.0;
        let mut d2 = 0.0;
        for &(c, e) in &self.terms {
            if e != 0.0 {
                d1 += c * e * x.powf(e - 1.0);
                d2 += c * e * (e - 1.0) * x.powf(e - 2.0);
            }
        }
        // |δ′| = 1 and δ″ = 0 away from kinks
        Some((d1 * slope, d2))
    }
}

/// A profile known only through point values; derivatives come from
/// finite differences.
pub struct Sampled<F: Fn(f64) -> f64>(pub F);

impl<F: Fn(f64) -> f64> RadialFn for Sampled<F> {
    fn value(&self, r: f64) -> f64 {
        (self.0)(r)
    }
}

/// `I_p(x) = |x|^{p−2} x`, continuous at 0.
pub fn ip(x: f64, p: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else {
        x.signum() * x.abs().powf(p - 1.0)
    }
}

/// `|x|^{p−2}` with the convention `|0|^0 = 1`; `None` when undefined.
fn abs_pow_pm2(x: f64, p: f64) -> Option<f64> {
    if p == 2.0 {
        Some(1.0)
    } else if x == 0.0 {
        if p > 2.0 {
            Some(0.0)
        } else {
            None
        }
    } else {
        Some(x.abs().powf(p - 2.0))
    }
}

/// `Δ_{α,p} f(r)`, analytic when `f` supplies derivatives.
pub fn radial_alpha_p_laplacian(
    profile: &DistanceProfile,
    f: &dyn RadialFn,
    params: &Params,
    r: f64,
) -> Result<f64> {
    profile.check_point(r)?;
    match f.derivatives(r) {
        Some((d1, d2)) => analytic_laplacian(profile, params, r, d1, d2),
        None => fd_laplacian(profile, f, params, r, DEFAULT_H_REL),
    }
}

/// `Δ_{α,p} f(r)` by the flux-form central difference
/// `r^{1−N}[G(r+h/2) − G(r−h/2)]/h` with `G = s^{N−1} δ^{−α} I_p(f′)`, and
/// `h = h_rel · min(δ(r), distance to a kink, r)`.
pub fn radial_alpha_p_laplacian_fd(
    profile: &DistanceProfile,
    f: &dyn RadialFn,
    params: &Params,
    r: f64,
    h_rel: f64,
) -> Result<f64> {
    profile.check_point(r)?;
    fd_laplacian(profile, f, params, r, h_rel)
}

fn analytic_laplacian(
    profile: &DistanceProfile,
    params: &Params,
    r: f64,
    d1: f64,
    d2: f64,
) -> Result<f64> {
    let Params { alpha, p, dim } = *params;
    let delta = profile.delta(r);
    let slope = profile.delta_slope(r);
    let flux = ip(d1, p);
    let mut bracket = -alpha * slope / delta * flux;
    if profile.spec.uses_radial_weight() {
        bracket += f64::from(dim - 1) / r * flux;
    }
    let curv = abs_pow_pm2(d1, p).ok_or(Error::UndefinedPoint { r })?;
    bracket += (p - 1.0) * curv * d2;
    Ok(delta.powf(-alpha) * bracket)
}

fn fd_step(profile: &DistanceProfile, r: f64, h_rel: f64) -> f64 {
    h_rel * profile.stencil_scale(r)
}

fn fd_derivative(f: &dyn RadialFn, r: f64, h: f64) -> f64 {
    (f.value(r + 0.5 * h) - f.value(r - 0.5 * h)) / h
}

fn fd_laplacian(
    profile: &DistanceProfile,
    f: &dyn RadialFn,
    params: &Params,
    r: f64,
    h_rel: f64,
) -> Result<f64> {
    let Params { alpha, p, dim } = *params;
    let h = fd_step(profile, r, h_rel);
    if p < 2.0 && fd_derivative(f, r, h) == 0.0 {
        return Err(Error::UndefinedPoint { r });
    }
    let flux = |s: f64| {
        profile.weight(dim, s) * profile.delta(s).powf(-alpha) * ip(fd_derivative(f, s, h), p)
    };
    Ok((flux(r + 0.5 * h) - flux(r - 0.5 * h)) / (h * profile.weight(dim, r)))
}

/// `−Δ_{α,p} f − λ δ^{−(α+p)} I_p(f)` at `r`.
pub fn residual(
    profile: &DistanceProfile,
    f: &dyn RadialFn,
    params: &Params,
    lambda: f64,
    r: f64,
) -> Result<f64> {
    let lap = radial_alpha_p_laplacian(profile, f, params, r)?;
    let delta = profile.delta(r);
    Ok(-lap - lambda * delta.powf(-params.alpha_plus_p()) * ip(f.value(r), params.p))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CandidateSign {
    /// `U₊`, expected subsolution (residual ≤ 0).
    Plus,
    /// `U₋`, expected supersolution (residual ≥ 0).
    Minus,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SignCheckSpec {
    pub nu: f64,
    pub beta: f64,
    pub location: Location,
    pub sign: CandidateSign,
    /// Radius window `[r_lo, r_hi]`, on one side of every kink.
    pub window: (f64, f64),
    pub samples: usize,
    /// When false the exponent hypotheses are not enforced (negative controls).
    pub enforce_hypotheses: bool,
}

impl SignCheckSpec {
    pub fn new(nu: f64, beta: f64, location: Location, sign: CandidateSign, window: (f64, f64)) -> Self {
        Self { nu, beta, location, sign, window, samples: 400, enforce_hypotheses: true }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SignCheckReport {
    pub lambda: f64,
    pub min_residual: f64,
    pub max_residual: f64,
    /// Sign matches on every sample of the window.
    pub sign_holds: bool,
    /// Boundary: largest collar width `t` with the sign holding for all
    /// sampled `δ ≤ t`. Infinity: smallest radius `R` with the sign holding for
    /// all sampled `r ≥ R`. `None` if the sign fails at the extreme sample.
    pub threshold: Option<f64>,
    pub radii: Vec<f64>,
    pub residuals: Vec<f64>,
}

fn sign_hypothesis(params: &Params, spec: &SignCheckSpec) -> Result<()> {
    let SignCheckSpec { nu, beta, location, .. } = *spec;
    let iv = root_interval(params, location);
    let fail = |clause: &'static str, detail: String| Err(Error::Hypothesis { clause, detail });
    if !iv.contains(nu, 1e-12) {
        return fail("nu in root interval", format!("nu={nu} not in [{}, {}]", iv.lo, iv.hi));
    }
    match location {
        Location::Boundary => {
            // radial geometry: the Green function is replaced by δ, Hölder exponent 1
            if !(nu < beta && beta < nu + 1.0) {
                return fail("nu < beta < nu + 1", format!("nu={nu}, beta={beta}"));
            }
            if !iv.contains(beta, 1e-12) {
                return fail("beta in root interval", format!("beta={beta} not in [{}, {}]", iv.lo, iv.hi));
            }
        }
        Location::Infinity => {
            if !(beta < nu && nu < beta + 1.0) {
                return fail("beta < nu < beta + 1", format!("nu={nu}, beta={beta}"));
            }
        }
    }
    Ok(())
}

/// Residual signs of `δ^ν ± δ^β` (boundary) or `r^ν ± r^β` (infinity) with
/// `λ = λ_ν` resp. `λ̂_ν`, sampled log-uniformly in `δ` (boundary) or `r`
/// (infinity) across the window.
pub fn subsupersolution_sign_check(
    profile: &DistanceProfile,
    params: &Params,
    spec: &SignCheckSpec,
) -> Result<SignCheckReport> {
    params.validate()?;
    if spec.enforce_hypotheses {
        sign_hypothesis(params, spec)?;
    }
    let (a, b) = spec.window;
    if !(a < b) {
        return Err(Error::InvalidDomain(format!("empty window [{a}, {b}]")));
    }
    profile.check_point(a)?;
    profile.check_point(b)?;
    if profile.kink_radii().iter().any(|&k| a < k && k < b) {
        return Err(Error::KinkPoint { r: profile.kink_radii()[0] });
    }
    if spec.location == Location::Infinity && !matches!(profile.spec, DomainSpec::ExteriorBall { .. }) {
        return Err(Error::InvalidDomain("infinity candidates need an exterior domain".into()));
    }

    let s = match spec.sign {
        CandidateSign::Plus => 1.0,
        CandidateSign::Minus => -1.0,
    };
    let candidate = match spec.location {
        Location::Boundary => PowerSum {
            base: PowerBase::Delta(*profile),
            terms: vec![(1.0, spec.nu), (s, spec.beta)],
        },
        Location::Infinity => PowerSum { base: PowerBase::Radius, terms: vec![(1.0, spec.nu), (s, spec.beta)] },
    };
    let lambda = lambda_at(params, spec.location, spec.nu);

    // samples ordered from the singular end outward
    let n = spec.samples.max(2);
    let radii: Vec<f64> = match spec.location {
        Location::Boundary => {
            let (da, db) = (profile.delta(a), profile.delta(b));
            let (lo, hi) = (da.min(db), da.max(db));
            let slope = profile.delta_slope(0.5 * (a + b));
            let foot = if slope > 0.0 { a - da } else { a + da };
            (0..n)
                .map(|i| {
                    let d = lo * (hi / lo).powf(i as f64 / (n - 1) as f64);
                    foot + slope * d
                })
                .map(|r| r.clamp(a, b))
                .collect()
        }
        Location::Infinity => {
            (0..n).map(|i| b * (a / b).powf(i as f64 / (n - 1) as f64)).map(|r| r.clamp(a, b)).collect()
        }
    };

    let mut residuals = Vec::with_capacity(n);
    for &r in &radii {
        if spec.sign == CandidateSign::Minus && candidate.value(r) <= 0.0 {
            return Err(Error::NonPositiveCandidate { r });
        }
        residuals.push(residual(profile, &candidate, params, lambda, r)?);
    }
    let ok = |res: f64| match spec.sign {
        CandidateSign::Plus => res <= 0.0,
        CandidateSign::Minus => res >= 0.0,
    };
    let prefix = residuals.iter().take_while(|&&v| ok(v)).count();
    let threshold = match (prefix, spec.location) {
        (0, _) => None,
        (k, Location::Boundary) => Some(profile.delta(radii[k - 1])),
        (k, Location::Infinity) => Some(radii[k - 1]),
    };
    Ok(SignCheckReport {
        lambda,
        min_residual: residuals.iter().copied().fold(f64::INFINITY, f64::min),
        max_residual: residuals.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        sign_holds: prefix == n,
        threshold,
        radii,
        residuals,
    })
}

/// Boundary pieces with the exterior of a ball cut at `δ = radius`.
fn boundary_halves(spec: &DomainSpec) -> Vec<(f64, f64, f64)> {
    let cap = match *spec {
        DomainSpec::ExteriorBall { radius } => radius,
        _ => f64::INFINITY,
    };
    spec.boundary_pieces().into_iter().map(|(f, d, e)| (f, d, e.min(cap))).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AgmonQuotient {
    pub numerator: f64,
    pub denominator: f64,
    pub quotient: f64,
}

/// Energies of `u_ε = δ^{ε/p}`: `∫ |u′|^p δ^{−α}` and `∫ u^p δ^{−(α+p)}` over
/// the radial domain. Both integrands carry the factor `δ^{ε−α−p}`, which is
/// integrated exactly by Gauss-Jacobi on each half.
pub fn agmon_quotient(profile: &DistanceProfile, params: &Params, epsilon: f64) -> Result<AgmonQuotient> {
    params.validate()?;
    if !profile.spec.is_bounded() {
        return Err(Error::InvalidDomain("the quotient test needs a bounded domain".into()));
    }
    if !(epsilon.is_finite() && epsilon > 0.0) {
        return Err(Error::InvalidParams(format!("epsilon must be positive, got {epsilon}")));
    }
    let Params { alpha, p, dim } = *params;
    let exponent = alpha + p - epsilon;
    if exponent >= 1.0 {
        return Err(Error::Divergent { exponent });
    }
    let b = -exponent;
    let rule = jacobi_unit(2 * (dim as usize) + 2, b)?;
    let q = epsilon / p;
    let mut num = 0.0;
    let mut den = 0.0;
    for (foot, dir, len) in boundary_halves(&profile.spec) {
        let scale = len.powf(b + 1.0);
        // integrand / δ^b at δ = len·s
        num += scale
            * rule.integrate(|s| {
                let d = len * s;
                let r = foot + dir * d;
                let du = q * d.powf(q - 1.0);
                du.powf(p) * d.powf(-alpha) / d.powf(b) * profile.weight(dim, r)
            });
        den += scale
            * rule.integrate(|s| {
                let d = len * s;
                let r = foot + dir * d;
                d.powf(q * p) * d.powf(-(alpha + p)) / d.powf(b) * profile.weight(dim, r)
            });
    }
    if !(num.is_finite() && den.is_finite()) {
        return Err(Error::Divergent { exponent });
    }
    Ok(AgmonQuotient { numerator: num, denominator: den, quotient: num / den })
}

/// Same energies restricted to `{δ > t}`, finite for every `ε > 0`; the
/// ratio is still `(ε/p)^p` because the integrands agree pointwise up to that
/// factor. Integrated in `ln δ` over octave panels.
pub fn agmon_quotient_truncated(
    profile: &DistanceProfile,
    params: &Params,
    epsilon: f64,
    t: f64,
) -> Result<AgmonQuotient> {
    params.validate()?;
    if !profile.spec.is_bounded() {
        return Err(Error::InvalidDomain("the quotient test needs a bounded domain".into()));
    }
    if !(epsilon.is_finite() && epsilon > 0.0) {
        return Err(Error::InvalidParams(format!("epsilon must be positive, got {epsilon}")));
    }
    let Params { alpha, p, dim } = *params;
    let gl = legendre_unit(8);
    let q = epsilon / p;
    let mut num = 0.0;
    let mut den = 0.0;
    for (foot, dir, len) in boundary_halves(&profile.spec) {
        if !(t > 0.0 && t < len) {
            return Err(Error::InvalidDomain(format!("cut t={t} must lie in (0, {len})")));
        }
        let octaves = (len / t).log2().ceil().max(1.0) as usize;
        let (s_lo, s_hi) = (t.ln(), len.ln());
        let ds = (s_hi - s_lo) / octaves as f64;
        for j in 0..octaves {
            let (a, b) = (s_lo + ds * j as f64, s_lo + ds * (j + 1) as f64);
            num += gl.integrate_on(a, b, |s| {
                let d = s.exp();
                let du = q * d.powf(q - 1.0);
                du.powf(p) * d.powf(-alpha) * profile.weight(dim, foot + dir * d) * d
            });
            den += gl.integrate_on(a, b, |s| {
                let d = s.exp();
                d.powf(q * p - alpha - p) * profile.weight(dim, foot + dir * d) * d
            });
        }
    }
    if !(num.is_finite() && den.is_finite() && den > 0.0) {
        return Err(Error::QuadratureOverflow { a: t, b: f64::NAN });
    }
    Ok(AgmonQuotient { numerator: num, denominator: den, quotient: num / den })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum Integrability {
    Convergent { value: f64 },
    Divergent,
}

impl Integrability {
    pub fn is_convergent(&self) -> bool {
        matches!(self, Integrability::Convergent { .. })
    }
}

/// Octaves per refinement layer of [`integrability_probe`].
pub const PROBE_LAYER_OCTAVES: u32 = 200;
/// Number of layers, giving four successive contribution ratios.
pub const PROBE_LAYERS: u32 = 5;
/// Contribution ratio at or above which a layer counts as non-summable.
pub const PROBE_RATIO: f64 = 0.5;

/// Classifies `∫ δ^{−a} r^{N−1} dr` near the boundary.
///
/// The collar of each boundary piece is split into layers
/// `δ ∈ [δ₀ 2^{−200(k+1)}, δ₀ 2^{−200k}]`, integrated in `s = ln δ`. The
/// integral is declared divergent when the contribution ratio between
/// successive layers stays `≥ 0.5` over four consecutive levels. Otherwise the
/// value is the sum over the whole domain with a geometric tail correction.
/// For exterior domains only the window `δ ≤ R` next to the sphere is probed.
pub fn integrability_probe(profile: &DistanceProfile, dim: u32, a: f64) -> Integrability {
    let gl = legendre_unit(8);
    let mut total = 0.0;
    for (foot, dir, len) in boundary_halves(&profile.spec) {
        let f = |s: f64| {
            let d = s.exp();
            let r = foot + dir * d;
            d.powf(1.0 - a) * profile.weight(dim, r)
        };
        // integrate over octave panels in s between ln(lo) and ln(hi)
        let panels = |lo_oct: f64, hi_oct: f64| -> f64 {
            let ln2 = std::f64::consts::LN_2;
            let ln_len = len.ln();
            let n = (hi_oct - lo_oct).round() as i64;
            (0..n)
                .map(|j| {
                    let s0 = ln_len - (lo_oct + (j + 1) as f64) * ln2;
                    let s1 = ln_len - (lo_oct + j as f64) * ln2;
                    gl.integrate_on(s0, s1, f)
                })
                .sum()
        };
        // the first 10 octaves form the bulk, the layers start below them
        let bulk = panels(0.0, 10.0);
        let octs = f64::from(PROBE_LAYER_OCTAVES);
        let layers: Vec<f64> =
            (0..PROBE_LAYERS).map(|k| panels(10.0 + octs * f64::from(k), 10.0 + octs * f64::from(k + 1))).collect();
        let ratios: Vec<f64> = layers.windows(2).map(|w| w[1] / w[0]).collect();
        let divergent = ratios.iter().any(|r| !r.is_finite())
            || ratios.windows(4).any(|w| w.iter().all(|&r| r >= PROBE_RATIO));
        if divergent {
            return Integrability::Divergent;
        }
        let rho = *ratios.last().unwrap_or(&0.0);
        let tail = layers.last().copied().unwrap_or(0.0) * rho / (1.0 - rho);
        total += bulk + layers.iter().sum::<f64>() + tail;
    }
    Integrability::Convergent { value: total }
}

/// Largest `|−Δ_{α,p}(F(δ)) − RHS|` over the grid for `F(t) = t^ν`, where the
/// right side is `−|F′(δ)|^{p−2}[(p−1) F″(δ) δ^{−α} |∇δ|^p + F′(δ) Δ_{α,p} δ]`.
/// Both sides use finite differences with step `h_rel · min(δ, kink distance, r)`.
pub fn chain_rule_check(
    profile: &DistanceProfile,
    params: &Params,
    nu: f64,
    grid: &[f64],
    h_rel: f64,
) -> Result<f64> {
    params.validate()?;
    let Params { alpha, p, .. } = *params;
    let composed = Sampled(|r: f64| profile.delta(r).powf(nu));
    let u = Sampled(|r: f64| profile.delta(r));
    let mut worst: f64 = 0.0;
    for &r in grid {
        profile.check_point(r)?;
        let lhs = -fd_laplacian(profile, &composed, params, r, h_rel)?;
        let h = fd_step(profile, r, h_rel);
        let d = profile.delta(r);
        let grad = fd_derivative(&u, r, h);
        let lap_u = fd_laplacian(profile, &u, params, r, h_rel)?;
        let f1 = nu * d.powf(nu - 1.0);
        let f2 = nu * (nu - 1.0) * d.powf(nu - 2.0);
        let outer = abs_pow_pm2(f1, p).ok_or(Error::UndefinedPoint { r })?;
        let rhs = -outer * ((p - 1.0) * f2 * d.powf(-alpha) * grad.abs().powf(p) + f1 * lap_u);
        worst = worst.max((lhs - rhs).abs());
    }
    Ok(worst)
}

/// `(∇δ · x)/δ = r/(r − R)` on the exterior of a ball.
pub fn asymp_distance_check(profile: &DistanceProfile, r: f64) -> Result<f64> {
    match profile.spec {
        DomainSpec::ExteriorBall { radius } => {
            if !(r > radius) {
                return Err(Error::OutsideDomain { r });
            }
            Ok(r / (r - radius))
        }
        _ => Err(Error::InvalidDomain("exterior domain required".into())),
    }
}
