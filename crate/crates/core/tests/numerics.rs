//! Discrete minimization against closed forms and cross-module checks.

use hardy_core::gap::{Existence, GapVerdict, HValue};
use hardy_core::radial::DistanceProfile;
use hardy_core::rayleigh::{
    assemble_energies, collar_study, decay_exponent, domain_mesh, fit_power_law, hardy_study, minimize_quotient,
    refinement_study, CollarSettings, DecayWindow, HardyProblem, SolverOptions, StudySettings,
};
use hardy_core::{
    c_boundary, c_infinity, c_min, classify, convexity_shortcut, predict_decay, ClassifyOptions, DomainSpec, NumericH,
    Params,
};

fn params(alpha: f64, p: f64, dim: u32) -> Params {
    Params::new(alpha, p, dim).unwrap()
}

const HALF: DomainSpec = DomainSpec::Interval { b: 1.0, half_line: true };
const ANNULUS: DomainSpec = DomainSpec::Annulus { r0: 1.0, r1: 2.0 };
const EXTERIOR: DomainSpec = DomainSpec::ExteriorBall { radius: 1.0 };
const BALL: DomainSpec = DomainSpec::Ball { radius: 1.0 };

#[test]
fn log_interval_spectrum() {
    // u = δ^{1/2} v with s = ln δ turns the quotient into 1/4 + ∫v′²/∫v², whose
    // Dirichlet minimum on an s-interval of length L is 1/4 + π²/L²
    let q = params(0.0, 2.0, 3);
    let profile = DistanceProfile::new(HALF).unwrap();
    for &t_min in &[1e-2, 1e-4, 1e-6] {
        let mesh = domain_mesh(&HALF, 684, t_min, None, &[]).unwrap();
        let res = minimize_quotient(&mesh, &profile, &q, &SolverOptions::default()).unwrap();
        let l = (1.0 / t_min).ln();
        let exact = 0.25 + std::f64::consts::PI.powi(2) / (l * l);
        assert!((res.value - exact).abs() <= 2e-6 * exact, "{t_min}: {} vs {exact}", res.value);
        assert!(res.value >= exact * (1.0 - 1e-12));
    }
}

#[test]
fn minimizer_is_normalized_and_stationary() {
    let q = params(0.0, 2.0, 3);
    let profile = DistanceProfile::new(ANNULUS).unwrap();
    let mesh = domain_mesh(&ANNULUS, 60, 1e-4, None, &[]).unwrap();
    let res = minimize_quotient(&mesh, &profile, &q, &SolverOptions::default()).unwrap();
    let forms = assemble_energies(&mesh, &profile, &q).unwrap();
    assert!((forms.potential_form(&res.minimizer.values) - 1.0).abs() < 1e-12);
    assert!((forms.quotient_of(&res.minimizer) - res.value).abs() <= 1e-12 * res.value);
    assert!(res.minimizer.values.iter().all(|&v| v >= 0.0));
    assert!(res.el_residual.unwrap() <= 1e-8);
    assert!(res.converged);

    let q = params(0.5, 3.0, 3);
    let res = minimize_quotient(&mesh, &profile, &q, &SolverOptions::default()).unwrap();
    let forms = assemble_energies(&mesh, &profile, &q).unwrap();
    assert!((forms.quotient_of(&res.minimizer) - res.value).abs() <= 1e-12 * res.value);
    assert!(res.minimizer.values.iter().all(|&v| v >= 0.0));
}

#[test]
fn nested_meshes_do_not_increase_the_minimum() {
    for q in [params(0.0, 2.0, 3), params(0.5, 1.5, 3), params(1.0, 3.0, 3)] {
        let profile = DistanceProfile::new(ANNULUS).unwrap();
        let mut prev = f64::INFINITY;
        for &(pd, t) in &[(20, 1e-2), (40, 1e-2), (40, 1e-3), (80, 1e-4)] {
            let mesh = domain_mesh(&ANNULUS, pd, t, None, &[]).unwrap();
            let v = minimize_quotient(&mesh, &profile, &q, &SolverOptions::default()).unwrap().value;
            assert!(v <= prev * (1.0 + 1e-9), "{q:?} {pd} {t}: {v} > {prev}");
            prev = v;
        }
    }
}

#[test]
fn half_line_study() {
    let q = params(0.0, 2.0, 3);
    let st = hardy_study(&HardyProblem { params: q, spec: HALF }, &StudySettings::default()).unwrap();
    assert_eq!(st.levels.len(), 5);
    assert!(st.levels.windows(2).all(|w| w[1].value < w[0].value));
    assert!((st.extrapolated - 0.25).abs() <= 0.01 * 0.25, "{}", st.extrapolated);
}

#[test]
fn vanishing_constant_on_annulus() {
    let q = params(-2.0, 2.0, 3);
    let st = hardy_study(&HardyProblem { params: q, spec: ANNULUS }, &StudySettings::default()).unwrap();
    assert!(st.extrapolated <= 0.005, "{}", st.extrapolated);
    assert!(st.levels.windows(2).all(|w| w[1].value <= w[0].value));
}

#[test]
fn too_few_levels() {
    let q = params(0.0, 2.0, 3);
    let problem = HardyProblem { params: q, spec: HALF };
    assert!(refinement_study(&problem, &StudySettings::default(), 1).is_err());
    assert!(refinement_study(&problem, &StudySettings::default(), 9).is_err());
}

#[test]
fn sandwich_against_collars() {
    let q = params(0.0, 2.0, 3);
    let problem = HardyProblem { params: q, spec: ANNULUS };
    let st = hardy_study(&problem, &StudySettings::default()).unwrap();
    let collars = collar_study(&problem, &[0.4, 0.2, 0.1], &CollarSettings::default()).unwrap();
    let settings = CollarSettings::default();
    for end in &collars.ends {
        assert!(end.monotone);
        for level in &end.levels {
            // same inner cutoff: the collar minimizes over fewer functions
            for (k, rec) in st.levels.iter().enumerate() {
                if let Some(j) = settings.t_min.iter().position(|&t| t == rec.t_min) {
                    assert!(rec.value <= level.raw[j], "{k}: {} > {}", rec.value, level.raw[j]);
                }
            }
        }
    }
    assert!((collars.lambda_inf - 0.25).abs() < 0.0125);
    let r = classify(
        &q,
        &ANNULUS,
        Some(NumericH { value: st.extrapolated, error_estimate: st.error_estimate }),
        ClassifyOptions::default(),
    )
    .unwrap();
    assert!(r.h.value().unwrap() <= collars.lambda_inf + r.gap_margin.unwrap());
}

#[test]
fn exterior_decay_matches_indicial_root() {
    let q = params(0.0, 4.0, 3);
    let st = hardy_study(&HardyProblem { params: q, spec: EXTERIOR }, &StudySettings::for_domain(&EXTERIOR)).unwrap();
    assert!((st.extrapolated - c_infinity(&q)).abs() <= 0.03 * c_infinity(&q));
    let h = st.extrapolated.min(c_min(&q));
    let (nu, _) = predict_decay(&q, &EXTERIOR, h).unwrap();
    let profile = DistanceProfile::new(EXTERIOR).unwrap();
    let window = DecayWindow::Boundary { piece: 0, d_lo: 1e-4, d_hi: 1e-2 };
    let (slope, r2) = decay_exponent(&st.finest, &profile, window).unwrap();
    assert!((slope - nu).abs() <= 0.05, "{slope} vs {nu}");
    assert!(r2 > 0.99);
}

#[test]
fn synthetic_powers() {
    let xs: Vec<f64> = (0..50).map(|i| 1e-4 * 1.2f64.powi(i)).filter(|&x| x < 0.01).collect();
    let ys: Vec<f64> = xs.iter().map(|&x| 3.0 * x.sqrt() * (1.0 + x)).collect();
    let fit = fit_power_law(&xs, &ys).unwrap();
    assert!((fit.slope - 0.5).abs() <= 0.01);
    let ys: Vec<f64> = xs.iter().map(|&x| x.powf(0.75)).collect();
    let fit = fit_power_law(&xs, &ys).unwrap();
    assert!((fit.slope - 0.75).abs() < 1e-12 && (fit.r_squared - 1.0).abs() < 1e-12);
}

/// One representative `α` per regime for `p = 2`, `N = 3`.
const REGIME_ALPHAS: [f64; 5] = [-1.5, -1.0, 0.0, 1.0, 2.0];

#[test]
fn verdict_table() {
    let plain = ClassifyOptions { use_shortcuts: false };
    let bounded: [(Option<f64>, fn(&Params) -> f64, GapVerdict, Existence); 5] = [
        (Some(0.0), c_boundary, GapVerdict::Positive, Existence::Yes),
        (Some(0.0), |_| 0.0, GapVerdict::Zero, Existence::No),
        (None, c_boundary, GapVerdict::Unknown { estimate: None }, Existence::IffGapPositive),
        (None, c_boundary, GapVerdict::Unknown { estimate: None }, Existence::IffGapPositive),
        (None, c_boundary, GapVerdict::Unknown { estimate: None }, Existence::IffGapPositive),
    ];
    let exterior: [(Option<fn(&Params) -> f64>, fn(&Params) -> f64, GapVerdict, Existence); 5] = [
        (None, c_boundary, GapVerdict::Unknown { estimate: None }, Existence::IffGapPositive),
        (Some(|_| 0.0), |_| 0.0, GapVerdict::Zero, Existence::No),
        (None, c_min, GapVerdict::Unknown { estimate: None }, Existence::IffGapPositive),
        (Some(|_| 0.0), |_| 0.0, GapVerdict::Zero, Existence::No),
        (Some(c_infinity), c_infinity, GapVerdict::Zero, Existence::No),
    ];
    for (i, &alpha) in REGIME_ALPHAS.iter().enumerate() {
        let q = params(alpha, 2.0, 3);
        let (h, lam, gap, ex) = bounded[i];
        let r = classify(&q, &ANNULUS, None, plain).unwrap();
        assert_eq!(r.h.value(), h, "bounded {alpha}");
        assert_eq!(h.is_none(), r.h == HValue::PositiveUnknown);
        assert_eq!(r.lambda_inf.value, lam(&q));
        assert_eq!((r.gap, r.minimizer_exists), (gap, ex), "bounded {alpha}");

        let (h, lam, gap, ex) = exterior[i];
        let r = classify(&q, &EXTERIOR, None, plain).unwrap();
        assert_eq!(r.h.value(), h.map(|f| f(&q)), "exterior {alpha}");
        assert_eq!(r.lambda_inf.value, lam(&q));
        assert_eq!((r.gap, r.minimizer_exists), (gap, ex), "exterior {alpha}");
    }
}

#[test]
fn ball_shortcut_matches_study() {
    for q in [params(0.0, 2.0, 3), params(1.0, 2.0, 3)] {
        let exact = convexity_shortcut(&q, &BALL).unwrap();
        let st = hardy_study(&HardyProblem { params: q, spec: BALL }, &StudySettings::default()).unwrap();
        assert!((st.extrapolated - exact).abs() <= 0.02 * exact, "{q:?}: {}", st.extrapolated);
    }
}
