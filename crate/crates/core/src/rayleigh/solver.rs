//! Minimization of `E(φ)/D(φ)` over P1 functions on a graded mesh.
//!
//! For `p = 2` the problem is a symmetric tridiagonal generalized eigenproblem:
//! the lowest eigenvalue is bracketed by Sturm counts and the eigenvector
//! obtained by shifted inverse iteration. For `p ≠ 2` a nonlinear inverse power
//! iteration is used: given `u_k` with `D(u_k) = 1`, minimize the strictly
//! convex functional `E(φ)/p − ⟨∇D(u_k)/p, φ⟩` by damped Newton and
//! renormalize. Convexity of `D^{1/p}` makes the quotient nonincreasing.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::params::Params;
use crate::radial::DistanceProfile;

use super::energy::{assemble_energies, EnergyForms};
use super::mesh::{GradedMesh, GridFn, MeshSummary};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SolverOptions {
    /// Relative decrement of the quotient below which iteration stops.
    pub tol: f64,
    pub max_iter: usize,
    /// Relative bracket width for the `p = 2` eigenvalue.
    pub eig_tol: f64,
    pub newton_max_iter: usize,
    pub newton_tol: f64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self { tol: 1e-10, max_iter: 2000, eig_tol: 1e-12, newton_max_iter: 200, newton_tol: 1e-13 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RayleighResult {
    pub value: f64,
    /// Nonnegative, normalized so that `D = 1`.
    pub minimizer: GridFn,
    pub iterations: usize,
    pub final_decrement: f64,
    pub converged: bool,
    /// `p = 2` only: Euler-Lagrange residual in the dual energy norm,
    /// relative to the energy norm of the minimizer.
    pub el_residual: Option<f64>,
    pub mesh_summary: MeshSummary,
}

pub fn minimize_quotient(
    mesh: &GradedMesh,
    profile: &DistanceProfile,
    params: &Params,
    options: &SolverOptions,
) -> Result<RayleighResult> {
    minimize_quotient_from(mesh, profile, params, options, None)
}

/// As [`minimize_quotient`], starting the `p ≠ 2` iteration from `initial`
/// interpolated onto `mesh` (ignored for `p = 2`).
pub fn minimize_quotient_from(
    mesh: &GradedMesh,
    profile: &DistanceProfile,
    params: &Params,
    options: &SolverOptions,
    initial: Option<&GridFn>,
) -> Result<RayleighResult> {
    if mesh.free_count() == 0 {
        return Err(Error::EmptyAdmissibleSpace("mesh has no free nodes".into()));
    }
    let forms = assemble_energies(mesh, profile, params)?;
    let summary = mesh.summary(profile);
    let (value, mut u, iterations, final_decrement, converged, el_residual) = if params.p == 2.0 {
        let (value, u, iterations, el) = solve_quadratic(&forms, mesh, options)?;
        (value, u, iterations, 0.0, true, Some(el))
    } else {
        let start = match initial {
            Some(f) => {
                let mut v = f.prolongate(mesh).values;
                forms.zero_fixed(&mut v);
                if forms.potential_form(&v) > 0.0 {
                    v
                } else {
                    hat(mesh)
                }
            }
            None => hat(mesh),
        };
        let (value, u, it, dec, conv) = inverse_power(&forms, start, options)?;
        (value, u, it, dec, conv, None)
    };
    // sign normalization
    let s: f64 = u.iter().sum();
    if s < 0.0 {
        u.iter_mut().for_each(|x| *x = -*x);
    }
    let minimizer = GridFn::new(mesh, u)?;
    Ok(RayleighResult { value, minimizer, iterations, final_decrement, converged, el_residual, mesh_summary: summary })
}

/// Piecewise-linear bump peaked at the middle node. Towards a free end it
/// decreases to one half instead of zero, so no element is flat.
pub fn hat(mesh: &GradedMesh) -> Vec<f64> {
    let n = mesh.nodes.len();
    let m = n - 1;
    let mid = (m / 2).max(1);
    (0..n)
        .map(|i| {
            let x = i as f64;
            let v = if i <= mid {
                let t = x / mid as f64;
                if mesh.fixed.0 { t } else { 0.5 + 0.5 * t }
            } else {
                let t = (m - i) as f64 / (m - mid) as f64;
                if mesh.fixed.1 { t } else { 0.5 + 0.5 * t }
            };
            v.clamp(0.0, 1.0)
        })
        .collect()
}

/// Solves `(d, o)` symmetric tridiagonal systems in place (Thomas algorithm).
fn thomas(diag: &[f64], off: &[f64], rhs: &[f64]) -> Vec<f64> {
    let n = diag.len();
    let mut c = vec![0.0; n];
    let mut x = rhs.to_vec();
    let mut beta = diag[0];
    x[0] /= beta;
    for i in 1..n {
        c[i] = off[i - 1] / beta;
        beta = diag[i] - off[i - 1] * c[i];
        if beta == 0.0 {
            beta = f64::MIN_POSITIVE;
        }
        x[i] = (x[i] - off[i - 1] * x[i - 1]) / beta;
    }
    for i in (0..n - 1).rev() {
        let ci = c[i + 1];
        x[i] -= ci * x[i + 1];
    }
    x
}

/// Number of eigenvalues of `(K, M)` below `sigma` (negative LDLᵀ pivots of
/// `K − σM`).
fn sturm_count(kd: &[f64], ko: &[f64], md: &[f64], mo: &[f64], sigma: f64) -> usize {
    let mut count = 0;
    let mut d = kd[0] - sigma * md[0];
    if d < 0.0 {
        count += 1;
    }
    for i in 1..kd.len() {
        let b = ko[i - 1] - sigma * mo[i - 1];
        if d == 0.0 {
            d = f64::MIN_POSITIVE * kd[i - 1].abs().max(1.0);
        }
        d = kd[i] - sigma * md[i] - b * b / d;
        if d < 0.0 {
            count += 1;
        }
    }
    count
}

fn tri_mul(d: &[f64], o: &[f64], x: &[f64]) -> Vec<f64> {
    let n = d.len();
    (0..n)
        .map(|i| {
            let mut y = d[i] * x[i];
            if i > 0 {
                y += o[i - 1] * x[i - 1];
            }
            if i + 1 < n {
                y += o[i] * x[i + 1];
            }
            y
        })
        .collect()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn solve_quadratic(
    forms: &EnergyForms,
    mesh: &GradedMesh,
    options: &SolverOptions,
) -> Result<(f64, Vec<f64>, usize, f64)> {
    let ((kd, ko), (md, mo)) = forms.quadratic_matrices();
    let range = mesh.free_range();
    let (a, b) = (range.start, range.end);
    let kd = &kd[a..b];
    let md = &md[a..b];
    let ko = &ko[a..b - 1];
    let mo = &mo[a..b - 1];
    let n = b - a;

    let mut full = hat(mesh);
    forms.zero_fixed(&mut full);
    let mut hi = forms.quotient(&full);
    if !hi.is_finite() {
        return Err(Error::EmptyAdmissibleSpace("initial quotient is not finite".into()));
    }
    hi *= 1.0 + 1e-12;
    let mut lo = 0.0;
    let mut iterations = 0;
    while hi - lo > options.eig_tol * hi * 1e-3 && iterations < 400 {
        let mid = 0.5 * (lo + hi);
        if mid == lo || mid == hi {
            break;
        }
        if sturm_count(kd, ko, md, mo, mid) >= 1 {
            hi = mid;
        } else {
            lo = mid;
        }
        iterations += 1;
    }

    // shifted inverse iteration just below the bracketed eigenvalue
    let sigma = lo - options.eig_tol * hi;
    let sd: Vec<f64> = kd.iter().zip(md).map(|(k, m)| k - sigma * m).collect();
    let so: Vec<f64> = ko.iter().zip(mo).map(|(k, m)| k - sigma * m).collect();
    let mut x: Vec<f64> = full[a..b].to_vec();
    let mut rq = f64::INFINITY;
    for _ in 0..50 {
        let rhs = tri_mul(md, mo, &x);
        let mut y = thomas(&sd, &so, &rhs);
        let norm = dot(&y, &tri_mul(md, mo, &y)).sqrt();
        y.iter_mut().for_each(|v| *v /= norm);
        let new_rq = dot(&y, &tri_mul(kd, ko, &y));
        iterations += 1;
        x = y;
        let done = (rq - new_rq).abs() <= 1e-15 * new_rq.abs();
        rq = new_rq;
        if done {
            break;
        }
    }

    let mut u = vec![0.0; forms.nodes.len()];
    u[a..b].copy_from_slice(&x);
    let d = forms.potential_form(&u);
    u.iter_mut().for_each(|v| *v /= d.sqrt());
    let value = forms.gradient_form(&u);

    let x = &u[a..b];
    let kx = tri_mul(kd, ko, x);
    let mx = tri_mul(md, mo, x);
    let res: Vec<f64> = kx.iter().zip(&mx).map(|(k, m)| k - value * m).collect();
    let kinv_res = thomas(kd, ko, &res);
    let el = dot(&res, &kinv_res).max(0.0).sqrt() / dot(x, &kx).sqrt();
    let _ = n;
    Ok((value, u, iterations, el))
}

fn normalize(forms: &EnergyForms, u: &mut [f64]) -> f64 {
    let d = forms.potential_form(u);
    let s = d.powf(-1.0 / forms.p);
    u.iter_mut().for_each(|v| *v *= s);
    forms.gradient_form(u)
}

fn inverse_power(
    forms: &EnergyForms,
    start: Vec<f64>,
    options: &SolverOptions,
) -> Result<(f64, Vec<f64>, usize, f64, bool)> {
    let p = forms.p;
    let mut u = start;
    forms.zero_fixed(&mut u);
    let mut lambda = normalize(forms, &mut u);
    if !lambda.is_finite() {
        return Err(Error::EmptyAdmissibleSpace("initial quotient is not finite".into()));
    }
    let mut best = (lambda, u.clone());
    let mut decrement = f64::INFINITY;
    let mut converged = false;
    let mut iterations = 0;
    for k in 0..options.max_iter {
        iterations = k + 1;
        let b = forms.potential_grad(&u);
        let warm: Vec<f64> = u.iter().map(|v| v * lambda.powf(-1.0 / (p - 1.0))).collect();
        let mut v = newton_minimize(forms, &b, warm, options);
        let new_lambda = normalize(forms, &mut v);
        if !new_lambda.is_finite() {
            break;
        }
        decrement = lambda - new_lambda;
        if new_lambda < best.0 {
            best = (new_lambda, v.clone());
        }
        u = v;
        lambda = new_lambda;
        if decrement < options.tol * new_lambda.abs() {
            converged = true;
            break;
        }
    }
    Ok((best.0, best.1, iterations, decrement, converged))
}

/// Minimizes `E(φ)/p − b·φ` by Newton steps with an element-wise regularized
/// Hessian and Armijo backtracking.
fn newton_minimize(forms: &EnergyForms, b: &[f64], mut u: Vec<f64>, options: &SolverOptions) -> Vec<f64> {
    let p = forms.p;
    let m = forms.elements();
    let n = u.len();
    let lo = usize::from(forms.fixed.0);
    let hi = n - usize::from(forms.fixed.1);
    let functional = |u: &[f64]| forms.gradient_form(u) / p - dot(b, u);
    // floor on each element's curvature: relative to the warm start slope and,
    // for p < 2, to the slope scale max|u|/δ so that flat elements stay well
    // conditioned (for p > 2 the extra floor only slows the iteration)
    let umax = u.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    let rel = if p < 2.0 { 1e-6 } else { 0.0 };
    let eps2: Vec<f64> = forms
        .slopes(&u)
        .iter()
        .zip(&forms.delta_mid)
        .map(|(s, d)| (1e-3 * s).powi(2) + (rel * umax / d).powi(2) + 1e-300)
        .collect();
    let mut f = functional(&u);
    for _ in 0..options.newton_max_iter {
        let s = forms.slopes(&u);
        let mut g = forms.gradient_grad(&u);
        for i in 0..n {
            g[i] -= b[i];
        }
        forms.zero_fixed(&mut g);
        let mut hd = vec![0.0; n];
        let mut ho = vec![0.0; n.saturating_sub(1)];
        for e in 0..m {
            let k = (p - 1.0) * (s[e] * s[e] + eps2[e]).powf((p - 2.0) / 2.0) * forms.w_grad[e]
                / (forms.h[e] * forms.h[e]);
            hd[e] += k;
            hd[e + 1] += k;
            ho[e] -= k;
        }
        let rhs: Vec<f64> = g[lo..hi].iter().map(|x| -x).collect();
        let step = thomas(&hd[lo..hi], &ho[lo..hi.saturating_sub(1).max(lo)], &rhs);
        let mut d = vec![0.0; n];
        d[lo..hi].copy_from_slice(&step);
        let slope = dot(&g, &d);
        if !(slope < 0.0) {
            break;
        }
        let mut t = 1.0;
        let (mut un, mut fnew);
        loop {
            un = u.iter().zip(&d).map(|(x, y)| x + t * y).collect::<Vec<f64>>();
            fnew = functional(&un);
            if fnew <= f + 1e-4 * t * slope || t < 1e-12 {
                break;
            }
            t *= 0.5;
        }
        if !(fnew <= f) {
            break;
        }
        let done = (f - fnew).abs() <= options.newton_tol * fnew.abs();
        u = un;
        f = fnew;
        if done {
            break;
        }
    }
    u
}
