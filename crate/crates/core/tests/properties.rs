use hardy_core::gap::{Existence, GapVerdict, HValue};
use hardy_core::indicial::{
    c_at, check_appendix_b, indicial_root, lambda_at, root_interval, IndicialProblem, Location,
};
use hardy_core::radial::{
    agmon_quotient_truncated, chain_rule_check, residual, subsupersolution_sign_check, CandidateSign,
    DistanceProfile, PowerSum, SignCheckSpec,
};
use hardy_core::rayleigh::{assemble_energies, domain_mesh, GradedMesh};
use hardy_core::{
    c_boundary, c_const, c_infinity, c_min, classify, classify_regime, BoundaryClass, ClassifyOptions, DomainSpec,
    NumericH, Params, EQ_TOLERANCE,
};
use proptest::prelude::*;

fn params(alpha: f64, p: f64, dim: u32) -> Params {
    Params::new(alpha, p, dim).unwrap()
}

fn arb_params() -> impl Strategy<Value = Params> {
    (-5.0..5.0f64, 1.05..5.0f64, 2u32..8).prop_map(|(a, p, n)| params(a, p, n))
}

/// Params with `α+p` kept away from `1` and `N`.
fn arb_generic() -> impl Strategy<Value = Params> {
    arb_params().prop_filter("alpha+p near 1 or N", |q| {
        let s = q.alpha_plus_p();
        (s - 1.0).abs() > 1e-3 && (s - q.n()).abs() > 1e-3
    })
}

fn arb_spec() -> impl Strategy<Value = DomainSpec> {
    prop_oneof![
        (0.5..3.0f64).prop_map(|radius| DomainSpec::Ball { radius }),
        (0.5..2.0f64, 0.2..2.0f64).prop_map(|(r0, w)| DomainSpec::Annulus { r0, r1: r0 + w }),
        (0.5..3.0f64).prop_map(|radius| DomainSpec::ExteriorBall { radius }),
        (0.5..3.0f64).prop_map(|b| DomainSpec::Interval { b, half_line: false }),
    ]
}

fn location() -> impl Strategy<Value = Location> {
    prop_oneof![Just(Location::Boundary), Just(Location::Infinity)]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(512))]

    #[test]
    fn regime_is_a_partition(q in arb_params()) {
        let s = q.alpha_plus_p();
        let class = classify_regime(&q).boundary_class;
        let expected = [
            (BoundaryClass::Eq1, (s - 1.0).abs() <= EQ_TOLERANCE),
            (BoundaryClass::EqN, (s - q.n()).abs() <= EQ_TOLERANCE),
            (BoundaryClass::Sub1, s < 1.0 - EQ_TOLERANCE),
            (BoundaryClass::Between, s > 1.0 + EQ_TOLERANCE && s < q.n() - EQ_TOLERANCE),
            (BoundaryClass::SupN, s > q.n() + EQ_TOLERANCE),
        ];
        prop_assert_eq!(expected.iter().filter(|e| e.1).count(), 1);
        prop_assert!(expected.iter().any(|&(c, hit)| hit && c == class));
    }

    #[test]
    fn regime_on_the_zero_sets(p in 1.05..5.0f64, n in 2u32..8, eps in -1e-13..1e-13f64) {
        prop_assert_eq!(classify_regime(&params(1.0 - p + eps, p, n)).boundary_class, BoundaryClass::Eq1);
        prop_assert_eq!(classify_regime(&params(f64::from(n) - p + eps, p, n)).boundary_class, BoundaryClass::EqN);
    }

    #[test]
    fn c_min_is_a_lower_bound(q in arb_params()) {
        let cm = c_min(&q);
        prop_assert!(cm <= c_const(&q, 1).unwrap() && cm <= c_const(&q, q.dim).unwrap());
        prop_assert!(cm >= 0.0);
    }

    #[test]
    fn c_vanishes_only_on_the_zero_set(p in 1.05..5.0f64, n in 2u32..8, d in 1e-6..1.0f64) {
        // α is rounded, so α + p − m is only zero to within an ulp
        prop_assert!(c_boundary(&params(1.0 - p, p, n)) < 1e-30);
        prop_assert!(c_infinity(&params(f64::from(n) - p, p, n)) < 1e-30);
        prop_assert!(c_boundary(&params(1.0 - p + d, p, n)) > 0.0);
        prop_assert!(c_boundary(&params(1.0 - p - d, p, n)) > 0.0);
        // continuity: |c| ≤ (d/p)^p next to the zero set
        prop_assert!(c_boundary(&params(1.0 - p + d, p, n)) <= (d / p).powf(p) * (1.0 + 1e-9));
    }

    #[test]
    fn indicial_peak_equals_c(q in arb_generic(), loc in location()) {
        let iv = root_interval(&q, loc);
        let peak = match loc {
            Location::Boundary => iv.lo,
            Location::Infinity => iv.hi,
        };
        let c = c_at(&q, loc);
        prop_assert!((lambda_at(&q, loc, peak) - c).abs() <= 1e-12 * c.max(1.0));
    }

    #[test]
    fn indicial_monotone_on_branch(q in arb_generic(), loc in location(), a in 0.0..1.0f64, b in 0.0..1.0f64) {
        prop_assume!((a - b).abs() > 1e-9);
        let iv = root_interval(&q, loc);
        let (x, y) = (iv.lo + a.min(b) * (iv.hi - iv.lo), iv.lo + a.max(b) * (iv.hi - iv.lo));
        let (lx, ly) = (lambda_at(&q, loc, x), lambda_at(&q, loc, y));
        match loc {
            Location::Boundary => prop_assert!(lx > ly, "{} {} {} {}", x, y, lx, ly),
            Location::Infinity => prop_assert!(lx < ly, "{} {} {} {}", x, y, lx, ly),
        }
        prop_assert!(lx >= -1e-15 && ly >= -1e-15);
    }

    #[test]
    fn root_residual_and_location(q in arb_generic(), loc in location(), s in 0.0..=1.0f64) {
        let c = c_at(&q, loc);
        let mu = s * c;
        let nu = indicial_root(&IndicialProblem { params: q, location: loc, mu }).unwrap();
        prop_assert!((lambda_at(&q, loc, nu) - mu).abs() <= 1e-10 * c.max(1.0));
        prop_assert!(root_interval(&q, loc).contains(nu, 1e-12));
    }

    #[test]
    fn appendix_b_boundary(q in arb_generic(), a in 0.0..1.0f64, b in 0.0..1.0f64) {
        let iv = root_interval(&q, Location::Boundary);
        let nu = iv.lo + a.min(b) * (iv.hi - iv.lo);
        let beta = iv.lo + a.max(b) * (iv.hi - iv.lo);
        prop_assume!(nu < beta && nu != 0.0 && beta != 0.0);
        prop_assert!(check_appendix_b(&q, nu, beta, Location::Boundary).unwrap());
    }

    #[test]
    fn appendix_b_infinity(q in arb_generic(), a in 0.0..1.0f64, gap in 1e-6..3.0f64) {
        let iv = root_interval(&q, Location::Infinity);
        let nu = iv.lo + a * (iv.hi - iv.lo);
        let beta = nu - gap;
        prop_assume!(nu != 0.0 && beta != 0.0);
        prop_assert!(check_appendix_b(&q, nu, beta, Location::Infinity).unwrap());
    }

    #[test]
    fn indicial_powers_solve_on_half_line(q in arb_generic(), s in 0.0..=1.0f64, t in 1e-4..0.9f64) {
        let half = DistanceProfile::new(DomainSpec::Interval { b: 1.0, half_line: true }).unwrap();
        let mu = s * c_boundary(&q);
        let nu = indicial_root(&IndicialProblem { params: q, location: Location::Boundary, mu }).unwrap();
        prop_assume!(nu != 0.0);
        let f = PowerSum::delta_power(half, nu);
        let res = residual(&half, &f, &q, mu, t).unwrap();
        // compare with the size of either term
        let scale = (q.p - 1.0) * nu.abs().powf(q.p) * t.powf(nu * (q.p - 1.0) - q.alpha_plus_p()) + mu * t.powf(nu * (q.p - 1.0) - q.alpha_plus_p());
        prop_assert!(res.abs() <= 1e-10 * scale.max(1e-300), "{} vs {}", res, scale);
    }

    #[test]
    fn agmon_identity(spec_kind in 0usize..3, alpha in -3.0..3.0f64, p in 1.2..4.0f64, eps in 0.05..2.0f64) {
        let spec = [
            DomainSpec::Annulus { r0: 1.0, r1: 2.0 },
            DomainSpec::Ball { radius: 1.0 },
            DomainSpec::Interval { b: 1.0, half_line: false },
        ][spec_kind];
        let profile = DistanceProfile::new(spec).unwrap();
        let q = params(alpha, p, 3);
        let a = agmon_quotient_truncated(&profile, &q, eps, 1e-6).unwrap();
        let expected = (eps / p).powf(p);
        prop_assert!((a.quotient - expected).abs() <= 1e-8 * expected);
    }

    #[test]
    fn energies_homogeneous_and_nonnegative(
        q in arb_params(),
        spec in arb_spec(),
        values in proptest::collection::vec(-1.0..1.0f64, 40),
        c in prop_oneof![-10.0..-0.1f64, 0.1..10.0f64],
    ) {
        let profile = DistanceProfile::new(spec).unwrap();
        let mesh = domain_mesh(&spec, 2, 1e-3, Some(spec_outer(&spec)), &[]).unwrap();
        let u: Vec<f64> = (0..mesh.nodes.len()).map(|i| values[i % values.len()]).collect();
        let forms = assemble_energies(&mesh, &profile, &q).unwrap();
        let (e, d) = (forms.gradient_form(&u), forms.potential_form(&u));
        prop_assert!(e >= 0.0 && d >= 0.0);
        let cu: Vec<f64> = u.iter().map(|v| c * v).collect();
        let q1 = forms.quotient(&u);
        let q2 = forms.quotient(&cu);
        prop_assert!((q1 - q2).abs() <= 1e-12 * q1.abs(), "{} {}", q1, q2);
    }

    #[test]
    fn quotient_invariant_under_dilation(
        alpha in -2.0..3.0f64,
        p in 1.2..4.0f64,
        s in 0.05..20.0f64,
        exterior in any::<bool>(),
        values in proptest::collection::vec(0.0..1.0f64, 30),
    ) {
        let q = params(alpha, p, 3);
        let spec = if exterior { DomainSpec::ExteriorBall { radius: 1.0 } } else { DomainSpec::Interval { b: 1.0, half_line: true } };
        let mesh = domain_mesh(&spec, 3, 1e-3, Some(50.0), &[]).unwrap();
        let u: Vec<f64> = (0..mesh.nodes.len()).map(|i| values[i % values.len()]).collect();
        let base = assemble_energies(&mesh, &DistanceProfile::new(spec).unwrap(), &q).unwrap().quotient(&u);
        let big = spec.dilate(s);
        let scaled = assemble_energies(&mesh.dilate(s), &DistanceProfile::new(big).unwrap(), &q).unwrap().quotient(&u);
        prop_assert!((base - scaled).abs() <= 1e-10 * base, "{} {}", base, scaled);
    }

    #[test]
    fn classifier_invariants(q in arb_params(), spec in arb_spec(), shortcuts in any::<bool>()) {
        let opts = ClassifyOptions { use_shortcuts: shortcuts };
        let r = classify(&q, &spec, None, opts).unwrap();
        prop_assert_eq!(&r, &classify(&q, &spec, None, opts).unwrap());
        if let Some(h) = r.h.value() {
            prop_assert!(h <= r.lambda_inf.value + 1e-12);
        }
        if r.minimizer_exists == Existence::Yes {
            prop_assert_eq!(r.gap, GapVerdict::Positive);
        }
        if r.gap == GapVerdict::Zero {
            prop_assert_eq!(r.minimizer_exists, Existence::No);
        }
        if let Some(nu) = r.nu_boundary {
            prop_assert!(root_interval(&q, Location::Boundary).contains(nu, 1e-12));
        }
        if let Some(nu) = r.nu_infinity {
            prop_assert!(root_interval(&q, Location::Infinity).contains(nu, 1e-12));
        }
        let expected_inf = if spec.is_bounded() { c_boundary(&q) } else { c_min(&q) };
        let supn_exterior = !spec.is_bounded() && classify_regime(&q).boundary_class == BoundaryClass::SupN;
        prop_assert_eq!(r.lambda_inf.value, if supn_exterior { c_infinity(&q) } else { expected_inf });
        if supn_exterior {
            // here c_{α,p,N} ≤ c_{α,p,1}, so both formulas agree
            prop_assert_eq!(c_infinity(&q), c_min(&q));
        }
    }

    #[test]
    fn numeric_h_above_lambda_rejected(q in arb_generic(), spec in arb_spec(), excess in 0.02..1.0f64) {
        let plain = ClassifyOptions { use_shortcuts: false };
        let r = classify(&q, &spec, None, plain).unwrap();
        prop_assume!(r.h == HValue::PositiveUnknown);
        let lam = r.lambda_inf.value;
        let h = NumericH { value: lam * (1.0 + excess) + excess, error_estimate: 0.0 };
        prop_assert!(classify(&q, &spec, Some(h), plain).is_err());
        let ok = NumericH { value: 0.5 * lam, error_estimate: 0.0 };
        let r = classify(&q, &spec, Some(ok), plain).unwrap();
        prop_assert_eq!(r.gap, GapVerdict::Positive);
        prop_assert!(r.radial_caveat.is_some());
    }
}

fn spec_outer(spec: &DomainSpec) -> f64 {
    match *spec {
        DomainSpec::ExteriorBall { radius } => radius * 10.0,
        _ => 0.0,
    }
}

#[test]
fn nested_lattices() {
    let spec = DomainSpec::Annulus { r0: 1.0, r1: 2.0 };
    let coarse = domain_mesh(&spec, 10, 1e-4, None, &[]).unwrap();
    let fine = domain_mesh(&spec, 20, 1e-4, None, &[]).unwrap();
    let deeper = domain_mesh(&spec, 20, 1e-5, None, &[]).unwrap();
    for r in &coarse.nodes {
        assert!(fine.nodes.iter().any(|x| (x - r).abs() <= 1e-14 * r), "{r}");
    }
    for r in &fine.nodes {
        assert!(deeper.nodes.iter().any(|x| (x - r).abs() <= 1e-14 * r), "{r}");
    }
    assert!(GradedMesh::uniform(1.0, 1.0, 3, (true, true)).is_err());
}

#[test]
fn sign_checks_and_negative_control() {
    let ext = DistanceProfile::new(DomainSpec::ExteriorBall { radius: 1.0 }).unwrap();
    let q = params(0.0, 2.0, 3);
    for (sign, holds) in [(CandidateSign::Minus, true), (CandidateSign::Plus, true)] {
        let spec = SignCheckSpec::new(-0.5, -1.2, Location::Infinity, sign, (2.0, 1e4));
        let rep = subsupersolution_sign_check(&ext, &q, &spec).unwrap();
        assert_eq!(rep.threshold.is_some(), holds);
        assert!(rep.threshold.unwrap() <= 100.0);
        assert!((rep.lambda - 0.25).abs() < 1e-15);
    }
    // ν outside [−1, −1/2], where λ̂ decreases: λ̂_{−0.2} = 0.16 < λ̂_{−0.5} = 0.25
    let mut bad = SignCheckSpec::new(-0.2, -0.5, Location::Infinity, CandidateSign::Minus, (2.0, 1e4));
    assert!(subsupersolution_sign_check(&ext, &q, &bad).is_err());
    bad.enforce_hypotheses = false;
    let rep = subsupersolution_sign_check(&ext, &q, &bad).unwrap();
    assert!(!rep.sign_holds && rep.threshold.is_none());

    let ann = DistanceProfile::new(DomainSpec::Annulus { r0: 1.0, r1: 2.0 }).unwrap();
    let spec = SignCheckSpec::new(0.5, 0.9, Location::Boundary, CandidateSign::Plus, (1.0 + 1e-6, 1.3));
    let rep = subsupersolution_sign_check(&ann, &q, &spec).unwrap();
    assert!(rep.threshold.is_some_and(|t| t > 0.0), "{:?}", (rep.threshold, rep.min_residual, rep.max_residual));
    // ν below (α+p−1)/p: λ_{0.3} = 0.21 < λ_{0.6} = 0.24
    let mut low = SignCheckSpec::new(0.3, 0.6, Location::Boundary, CandidateSign::Plus, (1.0 + 1e-6, 1.3));
    low.enforce_hypotheses = false;
    let rep = subsupersolution_sign_check(&ann, &q, &low).unwrap();
    assert!(!rep.sign_holds);
}

/// Log-log slope of the chain-rule defect against the step size.
fn defect_order(spec: DomainSpec, q: Params, nu: f64, grid: &[f64]) -> f64 {
    let profile = DistanceProfile::new(spec).unwrap();
    let hs = [4e-3, 2e-3, 1e-3];
    let d: Vec<f64> = hs.iter().map(|&h| chain_rule_check(&profile, &q, nu, grid, h).unwrap()).collect();
    ((d[0] / d[2]).ln() / (hs[0] / hs[2]).ln()).min((d[0] / d[1]).ln() / 2f64.ln())
}

#[test]
fn chain_rule_defect_order() {
    let ext = DomainSpec::ExteriorBall { radius: 1.0 };
    let ann = DomainSpec::Annulus { r0: 1.0, r1: 2.0 };
    let cases = [
        (ext, params(0.0, 2.0, 3), 2.0, vec![1.2, 1.7, 3.0]),
        (ext, params(1.0, 3.0, 3), 1.5, vec![1.2, 1.7, 3.0]),
        (ann, params(-0.5, 1.5, 3), 0.8, vec![1.05, 1.2, 1.4]),
    ];
    for (spec, q, nu, grid) in cases {
        let order = defect_order(spec, q, nu, &grid);
        assert!(order >= 1.9, "{spec:?} {q:?}: order {order}");
    }
}
