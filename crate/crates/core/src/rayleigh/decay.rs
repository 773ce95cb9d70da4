//! Power-law fits of discrete minimizers near the boundary and at infinity.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::mesh::{boundary_pieces, GridFn};
use super::solver::RayleighResult;
use crate::radial::DistanceProfile;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DecayWindow {
    /// Nodes with `δ ∈ [d_lo, d_hi]` measured from boundary piece `piece`;
    /// fits `log u` against `log δ`.
    Boundary { piece: usize, d_lo: f64, d_hi: f64 },
    /// Nodes with `r ∈ [r_lo, r_hi]`; fits `log u` against `log r`.
    Infinity { r_lo: f64, r_hi: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PowerFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    pub points: usize,
}

/// Least-squares line through `(x_i, y_i)`.
pub fn fit_line(xs: &[f64], ys: &[f64]) -> Result<PowerFit> {
    let n = xs.len().min(ys.len());
    if n < 2 {
        return Err(Error::InvalidMesh(format!("a line fit needs 2 points, got {n}")));
    }
    let nf = n as f64;
    let mx = xs[..n].iter().sum::<f64>() / nf;
    let my = ys[..n].iter().sum::<f64>() / nf;
    let (mut sxx, mut sxy, mut syy) = (0.0, 0.0, 0.0);
    for (x, y) in xs.iter().zip(ys) {
        sxx += (x - mx) * (x - mx);
        sxy += (x - mx) * (y - my);
        syy += (y - my) * (y - my);
    }
    if !(sxx > 0.0) {
        return Err(Error::InvalidMesh("fit abscissae coincide".into()));
    }
    let slope = sxy / sxx;
    let r_squared = if syy > 0.0 { (sxy * sxy / (sxx * syy)).min(1.0) } else { 1.0 };
    Ok(PowerFit { slope, intercept: my - slope * mx, r_squared, points: n })
}

/// Fits `y = C x^s` on positive data.
pub fn fit_power_law(xs: &[f64], ys: &[f64]) -> Result<PowerFit> {
    for (i, (&x, &y)) in xs.iter().zip(ys).enumerate() {
        if !(x > 0.0 && y > 0.0) {
            return Err(Error::NonPositiveMinimizer { index: i, r: x });
        }
    }
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    fit_line(&lx, &ly)
}

/// Slope of `log u` against `log δ` or `log r` over the window.
pub fn decay_fit(u: &GridFn, profile: &DistanceProfile, window: DecayWindow) -> Result<PowerFit> {
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    let mut idx = Vec::new();
    match window {
        DecayWindow::Boundary { piece, d_lo, d_hi } => {
            let pieces = boundary_pieces(&profile.spec);
            let &(foot, dir, _) = pieces
                .get(piece)
                .ok_or_else(|| Error::InvalidDomain(format!("no boundary piece {piece}")))?;
            for (i, &r) in u.nodes.iter().enumerate() {
                let d = dir * (r - foot);
                // the node must also be closest to this piece
                if d >= d_lo && d <= d_hi && (profile.delta(r) - d).abs() <= 1e-12 * d.max(1.0) {
                    xs.push(d);
                    ys.push(u.values[i]);
                    idx.push(i);
                }
            }
        }
        DecayWindow::Infinity { r_lo, r_hi } => {
            for (i, &r) in u.nodes.iter().enumerate() {
                if r >= r_lo && r <= r_hi {
                    xs.push(r);
                    ys.push(u.values[i]);
                    idx.push(i);
                }
            }
        }
    }
    if let Some(k) = ys.iter().position(|&y| !(y > 0.0)) {
        return Err(Error::NonPositiveMinimizer { index: idx[k], r: u.nodes[idx[k]] });
    }
    fit_power_law(&xs, &ys)
}

/// `(slope, r²)` of the minimizer over the window.
pub fn decay_exponent(result: &RayleighResult, profile: &DistanceProfile, window: DecayWindow) -> Result<(f64, f64)> {
    let fit = decay_fit(&result.minimizer, profile, window)?;
    Ok((fit.slope, fit.r_squared))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::DomainSpec;

    fn grid(nodes: Vec<f64>, f: impl Fn(f64) -> f64) -> GridFn {
        let values = nodes.iter().map(|&r| f(r)).collect();
        GridFn { nodes, values }
    }

    #[test]
    fn exact_power() {
        let xs: Vec<f64> = (1..20).map(|i| i as f64 * 0.1).collect();
        let ys: Vec<f64> = xs.iter().map(|x| 2.0 * x.powf(0.75)).collect();
        let fit = fit_power_law(&xs, &ys).unwrap();
        assert!((fit.slope - 0.75).abs() < 1e-12);
        assert!((fit.intercept - 2f64.ln()).abs() < 1e-12);
        assert!((fit.r_squared - 1.0).abs() < 1e-12);
    }

    #[test]
    fn boundary_window_on_ball() {
        let spec = DomainSpec::Ball { radius: 1.0 };
        let profile = DistanceProfile::new(spec).unwrap();
        let nodes: Vec<f64> = (0..=400).map(|i| i as f64 / 400.0).collect();
        let u = grid(nodes, |r| {
            let d = 1.0 - r;
            3.0 * d.sqrt() * (1.0 + d)
        });
        let w = DecayWindow::Boundary { piece: 0, d_lo: 1e-3, d_hi: 1e-2 };
        let fit = decay_fit(&u, &profile, w).unwrap();
        assert!((fit.slope - 0.5).abs() < 0.01, "{}", fit.slope);
        assert!(fit.r_squared > 0.999);
    }

    #[test]
    fn infinity_window() {
        let profile = DistanceProfile::new(DomainSpec::ExteriorBall { radius: 1.0 }).unwrap();
        let nodes: Vec<f64> = (0..200).map(|i| 1.0 + 1.05f64.powi(i)).collect();
        let u = grid(nodes, |r| r.powf(-1.5));
        let fit = decay_fit(&u, &profile, DecayWindow::Infinity { r_lo: 10.0, r_hi: 1e3 }).unwrap();
        assert!((fit.slope + 1.5).abs() < 1e-12);
    }

    #[test]
    fn errors() {
        assert!(matches!(fit_line(&[1.0], &[1.0]), Err(Error::InvalidMesh(_))));
        assert!(matches!(fit_line(&[1.0, 1.0], &[1.0, 2.0]), Err(Error::InvalidMesh(_))));
        assert!(matches!(
            fit_power_law(&[1.0, 2.0], &[1.0, -1.0]),
            Err(Error::NonPositiveMinimizer { index: 1, .. })
        ));
        let profile = DistanceProfile::new(DomainSpec::Ball { radius: 1.0 }).unwrap();
        let u = grid(vec![0.0, 0.5, 0.99, 0.995, 1.0], |r| if r > 0.992 { 0.0 } else { 1.0 });
        let w = DecayWindow::Boundary { piece: 0, d_lo: 1e-3, d_hi: 0.5 };
        assert!(matches!(decay_fit(&u, &profile, w), Err(Error::NonPositiveMinimizer { index: 3, .. })));
        let w = DecayWindow::Boundary { piece: 3, d_lo: 1e-3, d_hi: 0.5 };
        assert!(matches!(decay_fit(&u, &profile, w), Err(Error::InvalidDomain(_))));
    }
}
