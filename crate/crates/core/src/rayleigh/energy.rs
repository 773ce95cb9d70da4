//! The two energies of the weighted p-Rayleigh quotient on a P1 mesh:
//! `E(φ) = ∫ δ^{−α} |φ′|^p w dr` and `D(φ) = ∫ δ^{−(α+p)} |φ|^p w dr` with
//! `w = r^{N−1}` (or `1` on intervals).

use crate::error::{Error, Result};
use crate::params::Params;
use crate::quadrature::{jacobi_unit, legendre_unit, UnitRule};
use crate::radial::{ip, DistanceProfile};

use super::mesh::{GradedMesh, GridFn};

/// Maximal `δ` ratio across a quadrature panel.
const PANEL_RATIO: f64 = 2.0;
const GAUSS_POINTS: usize = 8;

/// Per-element data of both energies.
#[derive(Debug, Clone)]
pub struct EnergyForms {
    pub p: f64,
    pub nodes: Vec<f64>,
    pub fixed: (bool, bool),
    /// Element lengths.
    pub h: Vec<f64>,
    /// Distance to the boundary at element midpoints.
    pub delta_mid: Vec<f64>,
    /// `W_e = ∫_e δ^{−α} w dr`; the gradient energy is `Σ W_e |s_e|^p`.
    pub w_grad: Vec<f64>,
    /// Quadrature for `D` on elements with two free nodes: local coordinate
    /// `λ ∈ [0,1]` and weight, stored in `q_start[e]..q_start[e+1]`.
    pub q_start: Vec<usize>,
    pub q_lam: Vec<f64>,
    pub q_w: Vec<f64>,
    /// Elements touching a Dirichlet node: `D_e = m_e |φ_free|^p`.
    pub end_mass: Vec<Option<(usize, f64)>>,
}

/// Sub-panel boundaries of `[a, b]` so that `δ` varies by at most a factor
/// [`PANEL_RATIO`] on each; `δ` is monotone on every element.
fn panels(profile: &DistanceProfile, a: f64, b: f64) -> Vec<(f64, f64)> {
    let (da, db) = (profile.delta(a), profile.delta(b));
    let ratio = (da.max(db) / da.min(db)).max(1.0);
    if !(ratio > PANEL_RATIO) || !ratio.is_finite() {
        return vec![(a, b)];
    }
    let n = (ratio.ln() / PANEL_RATIO.ln()).ceil() as usize;
    // geometric in δ, mapped back to r through the local slope
    let pts: Vec<f64> = (0..=n)
        .map(|i| {
            let d = da * (db / da).powf(i as f64 / n as f64);
            let t = (d - da) / (db - da);
            if i == 0 {
                a
            } else if i == n {
                b
            } else {
                a + t * (b - a)
            }
        })
        .collect();
    pts.windows(2).map(|w| (w[0], w[1])).collect()
}

impl EnergyForms {
    pub fn assemble(mesh: &GradedMesh, profile: &DistanceProfile, params: &Params) -> Result<Self> {
        params.validate()?;
        let Params { alpha, p, dim } = *params;
        let nodes = mesh.nodes.clone();
        if let Some(&r) = nodes.iter().find(|&&r| !(profile.delta(r) > 0.0)) {
            return Err(Error::InvalidMesh(format!("node r={r} has no positive distance to the boundary")));
        }
        let gl = legendre_unit(GAUSS_POINTS);
        let jac = jacobi_unit(GAUSS_POINTS, p)?;
        let m = mesh.elements();
        let last = m - 1;
        let mut h = Vec::with_capacity(m);
        let mut delta_mid = Vec::with_capacity(m);
        let mut w_grad = Vec::with_capacity(m);
        let mut q_start = Vec::with_capacity(m + 1);
        let mut q_lam = Vec::new();
        let mut q_w = Vec::new();
        let mut end_mass = Vec::with_capacity(m);
        let pot = |r: f64| profile.delta(r).powf(-(alpha + p)) * profile.weight(dim, r);

        for e in 0..m {
            let (a, b) = (nodes[e], nodes[e + 1]);
            let he = b - a;
            h.push(he);
            delta_mid.push(profile.delta(0.5 * (a + b)));
            let mut we = 0.0;
            for (x, y) in panels(profile, a, b) {
                we += gl.integrate_on(x, y, |r| profile.delta(r).powf(-alpha) * profile.weight(dim, r));
            }
            if !we.is_finite() {
                return Err(Error::QuadratureOverflow { a, b });
            }
            w_grad.push(we);
            q_start.push(q_lam.len());

            let left_fixed = e == 0 && mesh.fixed.0;
            let right_fixed = e == last && mesh.fixed.1;
            match (left_fixed, right_fixed) {
                (true, true) => end_mass.push(None),
                (true, false) => {
                    let me = end_element_mass(profile, &gl, &jac, p, a, b, a, &pot);
                    check_finite(me, a, b)?;
                    end_mass.push(Some((e + 1, me)));
                }
                (false, true) => {
                    let me = end_element_mass(profile, &gl, &jac, p, a, b, b, &pot);
                    check_finite(me, a, b)?;
                    end_mass.push(Some((e, me)));
                }
                (false, false) => {
                    end_mass.push(None);
                    for (x, y) in panels(profile, a, b) {
                        let hp = y - x;
                        for (&s, &wq) in gl.nodes.iter().zip(&gl.weights) {
                            let r = x + s * hp;
                            let wt = wq * hp * pot(r);
                            check_finite(wt, a, b)?;
                            q_lam.push((r - a) / he);
                            q_w.push(wt);
                        }
                    }
                }
            }
        }
        q_start.push(q_lam.len());
        Ok(Self { p, nodes, fixed: mesh.fixed, h, delta_mid, w_grad, q_start, q_lam, q_w, end_mass })
    }

    pub fn elements(&self) -> usize {
        self.h.len()
    }

    pub fn slopes(&self, u: &[f64]) -> Vec<f64> {
        (0..self.elements()).map(|e| (u[e + 1] - u[e]) / self.h[e]).collect()
    }

    /// `E(u) = Σ W_e |s_e|^p`.
    pub fn gradient_form(&self, u: &[f64]) -> f64 {
        let p = self.p;
        (0..self.elements()).map(|e| self.w_grad[e] * ((u[e + 1] - u[e]) / self.h[e]).abs().powf(p)).sum()
    }

    pub fn potential_form(&self, u: &[f64]) -> f64 {
        let p = self.p;
        let mut total = 0.0;
        for e in 0..self.elements() {
            if let Some((i, me)) = self.end_mass[e] {
                total += me * u[i].abs().powf(p);
                continue;
            }
            for q in self.q_start[e]..self.q_start[e + 1] {
                let l = self.q_lam[q];
                let v = u[e] * (1.0 - l) + u[e + 1] * l;
                total += self.q_w[q] * v.abs().powf(p);
            }
        }
        total
    }

    /// `(1/p) ∇D(u)`, zero on Dirichlet nodes.
    pub fn potential_grad(&self, u: &[f64]) -> Vec<f64> {
        let p = self.p;
        let mut g = vec![0.0; u.len()];
        for e in 0..self.elements() {
            if let Some((i, me)) = self.end_mass[e] {
                g[i] += me * ip(u[i], p);
                continue;
            }
            for q in self.q_start[e]..self.q_start[e + 1] {
                let l = self.q_lam[q];
                let v = ip(u[e] * (1.0 - l) + u[e + 1] * l, p) * self.q_w[q];
                g[e] += v * (1.0 - l);
                g[e + 1] += v * l;
            }
        }
        self.zero_fixed(&mut g);
        g
    }

    /// `(1/p) ∇E(u)`, zero on Dirichlet nodes.
    pub fn gradient_grad(&self, u: &[f64]) -> Vec<f64> {
        let p = self.p;
        let mut g = vec![0.0; u.len()];
        for e in 0..self.elements() {
            let s = (u[e + 1] - u[e]) / self.h[e];
            let f = self.w_grad[e] * ip(s, p) / self.h[e];
            g[e] -= f;
            g[e + 1] += f;
        }
        self.zero_fixed(&mut g);
        g
    }

    pub fn zero_fixed(&self, v: &mut [f64]) {
        if self.fixed.0 {
            v[0] = 0.0;
        }
        if self.fixed.1 {
            *v.last_mut().unwrap() = 0.0;
        }
    }

    pub fn quotient(&self, u: &[f64]) -> f64 {
        self.gradient_form(u) / self.potential_form(u)
    }

    pub fn quotient_of(&self, f: &GridFn) -> f64 {
        self.quotient(&f.values)
    }

    /// Tridiagonal stiffness and mass for `p = 2` on all nodes:
    /// `(diag, off)` with `off[i]` coupling nodes `i` and `i+1`.
    pub fn quadratic_matrices(&self) -> ((Vec<f64>, Vec<f64>), (Vec<f64>, Vec<f64>)) {
        let n = self.nodes.len();
        let (mut kd, mut ko) = (vec![0.0; n], vec![0.0; n - 1]);
        let (mut md, mut mo) = (vec![0.0; n], vec![0.0; n - 1]);
        for e in 0..self.elements() {
            let k = self.w_grad[e] / (self.h[e] * self.h[e]);
            kd[e] += k;
            kd[e + 1] += k;
            ko[e] -= k;
            if let Some((i, me)) = self.end_mass[e] {
                md[i] += me;
                continue;
            }
            for q in self.q_start[e]..self.q_start[e + 1] {
                let (l, w) = (self.q_lam[q], self.q_w[q]);
                md[e] += w * (1.0 - l) * (1.0 - l);
                md[e + 1] += w * l * l;
                mo[e] += w * (1.0 - l) * l;
            }
        }
        ((kd, ko), (md, mo))
    }
}

/// `∫_e λ^p pot dr` with `λ` the distance fraction from the Dirichlet node
/// `z ∈ {a, b}`. The panel touching `z` uses Gauss-Jacobi for `λ^p`.
#[allow(clippy::too_many_arguments)]
fn end_element_mass(
    profile: &DistanceProfile,
    gl: &UnitRule,
    jac: &UnitRule,
    p: f64,
    a: f64,
    b: f64,
    z: f64,
    pot: &dyn Fn(f64) -> f64,
) -> f64 {
    let he = b - a;
    let lam = |r: f64| (r - z).abs() / he;
    let mut total = 0.0;
    for (x, y) in panels(profile, a, b) {
        let hp = y - x;
        if x == z || y == z {
            let dir = if x == z { 1.0 } else { -1.0 };
            total += hp * (hp / he).powf(p) * jac.integrate(|s| pot(z + dir * s * hp));
        } else {
            total += gl.integrate_on(x, y, |r| lam(r).powf(p) * pot(r));
        }
    }
    total
}

fn check_finite(x: f64, a: f64, b: f64) -> Result<()> {
    if x.is_finite() {
        Ok(())
    } else {
        Err(Error::QuadratureOverflow { a, b })
    }
}

/// Assembles both forms; see [`EnergyForms`].
pub fn assemble_energies(mesh: &GradedMesh, profile: &DistanceProfile, params: &Params) -> Result<EnergyForms> {
    EnergyForms::assemble(mesh, profile, params)
}
