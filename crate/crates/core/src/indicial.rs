//! Indicial functions for power-type solutions near the boundary and at
//! infinity, their monotone branches, a bracketing root solver and the
//! cross-term inequality used by the Agmon-type constructions.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::params::{c_boundary, c_infinity, Params};

/// Default bound on `|λ(ν) − μ|` accepted from the root solver.
pub const ROOT_TOL: f64 = 1e-12;

/// Amount by which `μ` may overshoot `[0, c]` before it is rejected.
pub const MU_CLAMP: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Location {
    Boundary,
    Infinity,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Monotone {
    Decreasing,
    Increasing,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RootInterval {
    pub lo: f64,
    pub hi: f64,
    pub monotone_direction: Monotone,
}

impl RootInterval {
    pub fn contains(&self, nu: f64, slack: f64) -> bool {
        nu >= self.lo - slack && nu <= self.hi + slack
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IndicialProblem {
    pub params: Params,
    pub location: Location,
    pub mu: f64,
}

/// `|ν|^{p−1} sign(ν)`, the continuous extension of `|ν|^{p−2}ν`.
fn signed_pow(nu: f64, p: f64) -> f64 {
    if nu == 0.0 {
        0.0
    } else {
        nu.signum() * nu.abs().powf(p - 1.0)
    }
}

/// `λ_ν = |ν|^{p−2}ν[α + (1−ν)(p−1)]`.
pub fn lambda_boundary(params: &Params, nu: f64) -> f64 {
    signed_pow(nu, params.p) * (params.alpha + (1.0 - nu) * (params.p - 1.0))
}

/// `λ̂_ν = |ν|^{p−2}ν[(α−N+1) + (1−ν)(p−1)]`.
pub fn lambda_infinity(params: &Params, nu: f64) -> f64 {
    signed_pow(nu, params.p) * ((params.alpha - params.n() + 1.0) + (1.0 - nu) * (params.p - 1.0))
}

pub fn lambda_at(params: &Params, location: Location, nu: f64) -> f64 {
    match location {
        Location::Boundary => lambda_boundary(params, nu),
        Location::Infinity => lambda_infinity(params, nu),
    }
}

/// The maximal value of the indicial function on its monotone branch.
pub fn c_at(params: &Params, location: Location) -> f64 {
    match location {
        Location::Boundary => c_boundary(params),
        Location::Infinity => c_infinity(params),
    }
}

fn shift(params: &Params, location: Location) -> f64 {
    match location {
        Location::Boundary => 1.0,
        Location::Infinity => params.n(),
    }
}

/// Endpoint where the indicial function reaches `c`.
pub fn peak_exponent(params: &Params, location: Location) -> f64 {
    (params.alpha_plus_p() - shift(params, location)) / params.p
}

/// Endpoint where the indicial function vanishes.
pub fn zero_exponent(params: &Params, location: Location) -> f64 {
    let d = params.alpha_plus_p() - shift(params, location);
    let nontrivial = match location {
        Location::Boundary => d > 0.0,
        Location::Infinity => d < 0.0,
    };
    if nontrivial {
        d / (params.p - 1.0)
    } else {
        0.0
    }
}

/// The branch on which the indicial equation has exactly one root for each
/// `μ ∈ [0, c]`.
pub fn root_interval(params: &Params, location: Location) -> RootInterval {
    let a = peak_exponent(params, location);
    let b = zero_exponent(params, location);
    RootInterval {
        lo: a.min(b),
        hi: a.max(b),
        monotone_direction: match location {
            Location::Boundary => Monotone::Decreasing,
            Location::Infinity => Monotone::Increasing,
        },
    }
}

pub fn indicial_root(problem: &IndicialProblem) -> Result<f64> {
    indicial_root_with_tol(problem, ROOT_TOL)
}

/// Solves `λ(ν) = μ` on the monotone branch by bisection carried to the
/// resolution of `f64`; `root_tol` bounds the accepted residual.
pub fn indicial_root_with_tol(problem: &IndicialProblem, root_tol: f64) -> Result<f64> {
    let IndicialProblem { params, location, mu } = *problem;
    params.validate()?;
    let c = c_at(&params, location);
    let peak = peak_exponent(&params, location);
    let zero = zero_exponent(&params, location);

    if !mu.is_finite() {
        return Err(Error::MuOutOfRange { mu, max: c });
    }
    if c == 0.0 {
        return if mu.abs() <= MU_CLAMP { Ok(peak) } else { Err(Error::DegenerateIndicial { mu }) };
    }
    if mu < -MU_CLAMP || mu > c + MU_CLAMP {
        return Err(Error::MuOutOfRange { mu, max: c });
    }
    let mu = mu.clamp(0.0, c);
    if mu == c {
        return Ok(peak);
    }
    if mu == 0.0 {
        return Ok(zero);
    }

    // g(peak) > 0 > g(zero) along the branch
    let g = |nu: f64| lambda_at(&params, location, nu) - mu;
    let (mut a, mut b) = (peak, zero);
    for _ in 0..2000 {
        let m = 0.5 * (a + b);
        if m == a || m == b {
            break;
        }
        if g(m) >= 0.0 {
            a = m;
        } else {
            b = m;
        }
    }
    let nu = if g(a).abs() <= g(b).abs() { a } else { b };
    let res = g(nu).abs();
    if res > root_tol.max(64.0 * f64::EPSILON * c) {
        return Err(Error::Hypothesis {
            clause: "root_residual",
            detail: format!("bisection residual {res:e} exceeds tolerance {root_tol:e}"),
        });
    }
    Ok(nu)
}

/// Hypothesis of the cross-term inequality that was not satisfied.
pub mod clause {
    pub const NU_NONZERO: &str = "nu != 0";
    pub const BETA_NONZERO: &str = "beta != 0";
    pub const NU_IN_INTERVAL: &str = "nu in root interval";
    pub const BETA_IN_INTERVAL: &str = "beta in root interval";
    pub const ORDER_BOUNDARY: &str = "nu < beta";
    pub const ORDER_INFINITY: &str = "beta < nu";
}

const INTERVAL_SLACK: f64 = 1e-12;

/// Checks the hypotheses of the cross-term inequality without evaluating it.
pub fn appendix_b_hypothesis(params: &Params, nu: f64, beta: f64, location: Location) -> Result<()> {
    params.validate()?;
    let fail = |clause: &'static str, detail: String| Err(Error::Hypothesis { clause, detail });
    if !(nu.is_finite() && beta.is_finite()) {
        return fail(clause::NU_NONZERO, format!("non-finite exponents nu={nu}, beta={beta}"));
    }
    if nu == 0.0 {
        return fail(clause::NU_NONZERO, "nu = 0".into());
    }
    if beta == 0.0 {
        return fail(clause::BETA_NONZERO, "beta = 0".into());
    }
    let iv = root_interval(params, location);
    if !iv.contains(nu, INTERVAL_SLACK) {
        return fail(clause::NU_IN_INTERVAL, format!("nu={nu} not in [{}, {}]", iv.lo, iv.hi));
    }
    match location {
        Location::Boundary => {
            if !(nu < beta) {
                return fail(clause::ORDER_BOUNDARY, format!("nu={nu}, beta={beta}"));
            }
            if !iv.contains(beta, INTERVAL_SLACK) {
                return fail(
                    clause::BETA_IN_INTERVAL,
                    format!("beta={beta} not in [{}, {}]", iv.lo, iv.hi),
                );
            }
        }
        Location::Infinity => {
            if !(beta < nu) {
                return fail(clause::ORDER_INFINITY, format!("nu={nu}, beta={beta}"));
            }
        }
    }
    Ok(())
}

/// Left and right sides of
/// `(p−2) λ_ν β/ν + λ_β |ν|^{p−2}/|β|^{p−2} < λ_ν (p−1)`.
pub fn appendix_b_sides(params: &Params, nu: f64, beta: f64, location: Location) -> (f64, f64) {
    let p = params.p;
    let l_nu = lambda_at(params, location, nu);
    let l_beta = lambda_at(params, location, beta);
    let lhs = (p - 2.0) * l_nu * beta / nu + l_beta * (nu.abs() / beta.abs()).powf(p - 2.0);
    (lhs, l_nu * (p - 1.0))
}

/// Returns whether the strict cross-term inequality holds; errors name the
/// violated hypothesis.
pub fn check_appendix_b(params: &Params, nu: f64, beta: f64, location: Location) -> Result<bool> {
    appendix_b_hypothesis(params, nu, beta, location)?;
    let (lhs, rhs) = appendix_b_sides(params, nu, beta, location);
    Ok(lhs < rhs)
}
