//! Frozen reference values, each computed independently of the library.

use hardy_core::indicial::{
    check_appendix_b, indicial_root, lambda_boundary, lambda_infinity, root_interval, IndicialProblem, Location,
    Monotone,
};
use hardy_core::radial::{
    agmon_quotient, agmon_quotient_truncated, asymp_distance_check, integrability_probe, radial_alpha_p_laplacian,
    residual, DistanceProfile, Integrability, PowerSum,
};
use hardy_core::rayleigh::{assemble_energies, GradedMesh};
use hardy_core::{c_boundary, c_const, c_infinity, c_min, classify_regime, BoundaryClass, DomainSpec, Params};

fn params(alpha: f64, p: f64, dim: u32) -> Params {
    Params::new(alpha, p, dim).unwrap()
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * b.abs().max(1.0)
}

/// Smaller root of `ν(1 − ν) = μ` shifted for the `p = 2` boundary branch:
/// `λ_ν = ν(α + 1 − ν)`, root on `[(α+1)/2, α+1]`.
fn quadratic_boundary_root(alpha: f64, mu: f64) -> f64 {
    let b = alpha + 1.0;
    0.5 * (b + (b * b - 4.0 * mu).sqrt())
}

/// `λ̂_ν = ν(α − N + 2 − ν)` for `p = 2`, root on `[(α+2−N), (α+2−N)/2]`.
fn quadratic_infinity_root(alpha: f64, n: f64, mu: f64) -> f64 {
    let b = alpha - n + 2.0;
    0.5 * (b - (b * b - 4.0 * mu).sqrt())
}

#[test]
fn constants() {
    assert_eq!(c_const(&params(0.0, 2.0, 3), 1).unwrap(), 0.25);
    assert_eq!(c_const(&params(-1.0, 2.0, 3), 1).unwrap(), 0.0);
    assert_eq!(c_const(&params(-2.0, 3.0, 4), 1).unwrap(), 0.0);
    assert_eq!(c_const(&params(0.0, 4.0, 3), 3).unwrap(), 0.00390625);
    assert!(c_const(&params(0.0, 2.0, 3), 2).is_err());

    assert_eq!(c_min(&params(0.0, 2.0, 3)), 0.25);
    assert_eq!(c_min(&params(0.0, 3.0, 3)), 0.0);
    let third = (1.0f64 / 3.0).powf(1.5);
    assert!(close(c_min(&params(0.0, 1.5, 2)), third, 1e-15));

    let q = params(2.0, 2.0, 3);
    assert_eq!(c_boundary(&q), 2.25);
    assert_eq!(c_infinity(&q), 0.25);
}

#[test]
fn regimes() {
    assert_eq!(classify_regime(&params(0.0, 2.0, 3)).boundary_class, BoundaryClass::Between);
    assert_eq!(classify_regime(&params(-1.0, 2.0, 3)).boundary_class, BoundaryClass::Eq1);
    assert_eq!(classify_regime(&params(2.0, 2.0, 3)).boundary_class, BoundaryClass::SupN);
    assert_eq!(classify_regime(&params(1.0, 2.0, 3)).boundary_class, BoundaryClass::EqN);
    assert_eq!(classify_regime(&params(-1.5, 2.0, 3)).boundary_class, BoundaryClass::Sub1);
}

#[test]
fn indicial_values() {
    let q = params(0.0, 2.0, 3);
    assert_eq!(lambda_boundary(&q, 0.5), 0.25);
    assert_eq!(lambda_boundary(&q, 0.0), 0.0);
    assert_eq!(lambda_boundary(&params(1.3, 1.4, 3), 0.0), 0.0);
    assert_eq!(lambda_boundary(&q, 0.75), 3.0 / 16.0);
    assert_eq!(lambda_infinity(&q, -0.5), 0.25);
    assert_eq!(lambda_infinity(&q, 0.0), 0.0);
    assert_eq!(lambda_infinity(&q, -1.0), 0.0);
}

#[test]
fn root_intervals() {
    let q = params(0.5, 3.0, 3);
    let b = root_interval(&q, Location::Boundary);
    assert!(close(b.lo, 2.5 / 3.0, 1e-15) && close(b.hi, 1.25, 1e-15));
    assert_eq!(b.monotone_direction, Monotone::Decreasing);
    let i = root_interval(&q, Location::Infinity);
    assert!(close(i.lo, 0.0, 1e-15) && close(i.hi, 0.5 / 3.0, 1e-15));
    assert_eq!(i.monotone_direction, Monotone::Increasing);

    let s = params(-1.5, 2.0, 3);
    let b = root_interval(&s, Location::Boundary);
    assert_eq!((b.lo, b.hi), (-0.25, 0.0));
    let i = root_interval(&s, Location::Infinity);
    assert_eq!((i.lo, i.hi), (-2.5, -1.25));
}

#[test]
fn roots_against_quadratic() {
    let q = params(0.0, 2.0, 3);
    let root = |location, mu| indicial_root(&IndicialProblem { params: q, location, mu }).unwrap();
    assert!(close(root(Location::Boundary, 0.25), 0.5, 1e-12));
    assert!(close(root(Location::Boundary, 0.0), 1.0, 1e-12));
    assert!(close(root(Location::Boundary, 3.0 / 16.0), 0.75, 1e-12));
    assert!(close(root(Location::Infinity, 3.0 / 16.0), -0.75, 1e-12));

    for &alpha in &[-0.7, 0.0, 0.4, 1.9] {
        let q = params(alpha, 2.0, 4);
        for k in 0..=20 {
            let mu_b = c_boundary(&q) * k as f64 / 20.0;
            let nu = indicial_root(&IndicialProblem { params: q, location: Location::Boundary, mu: mu_b }).unwrap();
            assert!((nu - quadratic_boundary_root(alpha, mu_b)).abs() <= 1e-12, "{alpha} {mu_b}");
            let mu_i = c_infinity(&q) * k as f64 / 20.0;
            let nu = indicial_root(&IndicialProblem { params: q, location: Location::Infinity, mu: mu_i }).unwrap();
            assert!((nu - quadratic_infinity_root(alpha, 4.0, mu_i)).abs() <= 1e-12, "{alpha} {mu_i}");
        }
    }
}

#[test]
fn root_errors() {
    let q = params(0.0, 2.0, 3);
    assert!(indicial_root(&IndicialProblem { params: q, location: Location::Boundary, mu: 0.3 }).is_err());
    assert!(indicial_root(&IndicialProblem { params: q, location: Location::Boundary, mu: -0.1 }).is_err());
    // within the clamp
    assert!(indicial_root(&IndicialProblem { params: q, location: Location::Boundary, mu: 0.25 + 5e-11 }).is_ok());
    let degenerate = params(-1.0, 2.0, 3);
    assert!(indicial_root(&IndicialProblem { params: degenerate, location: Location::Boundary, mu: 0.1 }).is_err());
}

#[test]
fn appendix_b_examples() {
    let q = params(0.0, 2.0, 3);
    assert!(check_appendix_b(&q, 0.6, 0.8, Location::Boundary).unwrap());
    assert!(check_appendix_b(&q, 0.5, 0.9, Location::Boundary).unwrap());
    assert!(check_appendix_b(&q, -0.6, -1.1, Location::Infinity).unwrap());
    // p = 2: both sides reduce to λ_β < λ_ν; hand values λ_{0.6} = 0.24, λ_{0.8} = 0.16
    assert!(check_appendix_b(&q, 0.4, 0.8, Location::Boundary).is_err());
    assert!(check_appendix_b(&q, 0.8, 0.6, Location::Boundary).is_err());
    assert!(check_appendix_b(&q, -0.6, -0.5, Location::Infinity).is_err());
}

#[test]
fn laplacian_examples() {
    let ext = DistanceProfile::new(DomainSpec::ExteriorBall { radius: 1.0 }).unwrap();
    let half = DistanceProfile::new(DomainSpec::Interval { b: 1.0, half_line: true }).unwrap();
    let q = params(0.0, 2.0, 3);
    for &r in &[1.5, 3.0, 40.0] {
        let c = radial_alpha_p_laplacian(&ext, &PowerSum::constant(2.0), &q, r).unwrap();
        assert_eq!(c, 0.0);
        let v = radial_alpha_p_laplacian(&ext, &PowerSum::radius_power(-1.0), &q, r).unwrap();
        assert!(v.abs() < 1e-12, "{v}");
    }
    for &t in &[0.1, 0.3, 0.7] {
        let v = radial_alpha_p_laplacian(&half, &PowerSum::radius_power(1.0), &q, t).unwrap();
        assert!(v.abs() < 1e-14);
    }
}

#[test]
fn half_line_power_solves_at_peak() {
    let half = DistanceProfile::new(DomainSpec::Interval { b: 1.0, half_line: true }).unwrap();
    for &(alpha, p) in &[(0.0, 2.0), (1.0, 2.0), (0.0, 1.5), (2.0, 3.0), (-0.3, 4.0)] {
        let q = params(alpha, p, 3);
        let nu = (alpha + p - 1.0) / p;
        let f = PowerSum::delta_power(half, nu);
        for &t in &[1e-3, 0.05, 0.4] {
            let res = residual(&half, &f, &q, c_boundary(&q), t).unwrap();
            let scale = c_boundary(&q) * t.powf(nu * (p - 1.0) - alpha - p);
            assert!(res.abs() <= 1e-12 * scale.max(1.0), "{alpha} {p} {t}: {res}");
        }
    }
}

#[test]
fn exterior_residual_decays() {
    // U = r^{-1/2}, λ = 1/4, δ = r − 1: residual ~ r^{-1/2}/4·(r^{-2} − (r−1)^{-2}) = O(r^{-7/2})
    let ext = DistanceProfile::new(DomainSpec::ExteriorBall { radius: 1.0 }).unwrap();
    let q = params(0.0, 2.0, 3);
    let f = PowerSum::radius_power(-0.5);
    let mut prev = f64::INFINITY;
    for &r in &[10.0, 100.0, 1000.0] {
        let res: f64 = residual(&ext, &f, &q, 0.25, r).unwrap();
        let oracle = 0.25 * r.powf(-0.5) * (r.powi(-2) - (r - 1.0).powi(-2));
        assert!((res - oracle).abs() <= 1e-10 * oracle.abs(), "{r}: {res} vs {oracle}");
        assert!(res.abs() < prev);
        prev = res.abs();
    }
}

#[test]
fn agmon_examples() {
    let ann = DistanceProfile::new(DomainSpec::Annulus { r0: 1.0, r1: 2.0 }).unwrap();
    let ball = DistanceProfile::new(DomainSpec::Ball { radius: 1.0 }).unwrap();
    // the untruncated energies are finite only when α + p − ε < 1
    assert!(agmon_quotient(&ann, &params(0.0, 2.0, 3), 1.0).is_err());
    let cases = [
        (ann, params(0.0, 2.0, 3), 1.0, 0.25),
        (ann, params(-1.0, 2.0, 3), 0.5, 0.0625),
        (ball, params(0.0, 2.0, 3), 0.1, 0.0025),
    ];
    for (profile, q, eps, expected) in cases {
        let a = agmon_quotient_truncated(&profile, &q, eps, 1e-6).unwrap();
        assert!((a.quotient - expected).abs() <= 1e-8 * expected, "{eps}: {}", a.quotient);
    }
    let q = params(-1.5, 2.0, 3);
    let a = agmon_quotient(&ann, &q, 0.5).unwrap();
    assert!((a.quotient - 0.0625).abs() <= 1e-8 * 0.0625);
}

#[test]
fn integrability_examples() {
    let ann = DistanceProfile::new(DomainSpec::Annulus { r0: 1.0, r1: 2.0 }).unwrap();
    assert!(integrability_probe(&ann, 3, 0.5).is_convergent());
    assert_eq!(integrability_probe(&ann, 3, 1.0), Integrability::Divergent);
    let Integrability::Convergent { value } = integrability_probe(&ann, 3, 0.0) else { panic!() };
    // ∫_1^2 r^2 dr
    assert!((value - 7.0 / 3.0).abs() < 1e-10, "{value}");
}

#[test]
fn distance_ratio() {
    let one = DistanceProfile::new(DomainSpec::ExteriorBall { radius: 1.0 }).unwrap();
    let two = DistanceProfile::new(DomainSpec::ExteriorBall { radius: 2.0 }).unwrap();
    assert!((asymp_distance_check(&one, 11.0).unwrap() - 1.1).abs() < 1e-15);
    assert_eq!(asymp_distance_check(&two, 4.0).unwrap(), 2.0);
    assert!((asymp_distance_check(&one, 1e12).unwrap() - 1.0).abs() < 1e-11);
}

#[test]
fn hat_energies_by_hand() {
    // half-line, α = 0, p = 2, φ = 0, 1, 1, 0 on nodes 1/4, 1/2, 3/4, 1
    let half = DistanceProfile::new(DomainSpec::Interval { b: 1.0, half_line: true }).unwrap();
    let mesh = GradedMesh::uniform(0.25, 1.0, 3, (true, true)).unwrap();
    let forms = assemble_energies(&mesh, &half, &params(0.0, 2.0, 3)).unwrap();
    let u = [0.0, 1.0, 1.0, 0.0];
    assert!((forms.gradient_form(&u) - 8.0).abs() < 1e-12);
    // ∫ (t−a)²/t² = t − 2a ln t − a²/t
    let prim = |a: f64, t: f64| t - 2.0 * a * t.ln() - a * a / t;
    let rise = 16.0 * (prim(0.25, 0.5) - prim(0.25, 0.25));
    let flat = 2.0 - 4.0 / 3.0;
    let fall = 16.0 * (prim(1.0, 1.0) - prim(1.0, 0.75));
    let d = forms.potential_form(&u);
    // Gauss rule on a rational integrand: not exact, unlike the gradient form
    assert!((d - (rise + flat + fall)).abs() < 1e-11 * d, "{d} vs {}", rise + flat + fall);
    assert_eq!(forms.gradient_form(&[0.0; 4]), 0.0);
    assert_eq!(forms.potential_form(&[0.0; 4]), 0.0);
}
