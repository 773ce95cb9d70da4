//! Property suites behind `hardy verify`.

use hardy_core::indicial::{
    appendix_b_hypothesis, appendix_b_sides, c_at, indicial_root, lambda_at, root_interval, IndicialProblem,
    Location,
};
use hardy_core::radial::{
    agmon_quotient_truncated, chain_rule_check, integrability_probe, subsupersolution_sign_check, CandidateSign,
    DistanceProfile, Integrability, SignCheckSpec,
};
use hardy_core::rayleigh::{assemble_energies, domain_mesh};
use hardy_core::{DomainSpec, Params};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};

use crate::config::Suite;
use crate::error::CliError;

pub const INDICIAL_RESIDUAL_TOL: f64 = 1e-10;
pub const QUADRATIC_ROOT_TOL: f64 = 1e-12;
pub const AGMON_TOL: f64 = 1e-8;
/// Observed order of the chain-rule defect under step halving.
pub const CHAIN_RULE_MIN_ORDER: f64 = 1.9;
pub const SCALE_TOL: f64 = 1e-10;
/// Largest acceptable onset radius of the sign at infinity.
pub const SIGN_MAX_ONSET: f64 = 100.0;

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub suite: Suite,
    pub name: String,
    pub passed: bool,
    /// The statement the check exercises.
    pub basis: String,
    pub detail: Value,
}

#[derive(Debug, Clone, Serialize)]
pub struct VerifyOutcome {
    pub passed: bool,
    pub checks: Vec<Check>,
}

#[derive(Debug, Clone, Copy)]
pub struct VerifyOptions {
    pub samples: usize,
    pub seed: u64,
    /// Adds a sign check whose exponent lies below its admissible interval and
    /// is still expected to pass; it must fail.
    pub corrupt_exponent: bool,
}

fn check(suite: Suite, name: impl Into<String>, passed: bool, basis: &str, detail: Value) -> Check {
    Check { suite, name: name.into(), passed, basis: basis.into(), detail }
}

fn p(alpha: f64, p: f64, dim: u32) -> Params {
    Params::new(alpha, p, dim).expect("fixed parameters are valid")
}

pub fn run_verify(params: &Params, suites: &[Suite], opts: VerifyOptions) -> Result<VerifyOutcome, CliError> {
    let mut suites = suites.to_vec();
    if opts.corrupt_exponent && !suites.contains(&Suite::Signs) {
        suites.push(Suite::Signs);
    }
    suites.sort();
    suites.dedup();
    let mut checks = Vec::new();
    for suite in suites {
        match suite {
            Suite::Indicial => indicial(params, &mut checks),
            Suite::AppendixB => appendix_b(opts.samples, opts.seed, &mut checks),
            Suite::ChainRule => chain_rule(&mut checks)?,
            Suite::Agmon => agmon(params, &mut checks)?,
            Suite::Integrability => integrability(params.dim, &mut checks)?,
            Suite::Signs => signs(opts.corrupt_exponent, &mut checks)?,
            Suite::Scale => scale(opts.seed, &mut checks)?,
        }
    }
    Ok(VerifyOutcome { passed: checks.iter().all(|c| c.passed), checks })
}

/// Configurations of the indicial suite besides the configured one.
fn indicial_params() -> Vec<Params> {
    vec![p(0.0, 2.0, 3), p(1.0, 2.0, 3), p(-0.5, 1.5, 3), p(2.0, 3.0, 3), p(0.0, 4.0, 3), p(1.0, 3.0, 5)]
}

fn quadratic_root(q: &Params, location: Location, mu: f64) -> f64 {
    match location {
        Location::Boundary => {
            let b = q.alpha + 1.0;
            0.5 * (b + (b * b - 4.0 * mu).max(0.0).sqrt())
        }
        Location::Infinity => {
            let b = q.alpha - q.n() + 2.0;
            0.5 * (b - (b * b - 4.0 * mu).max(0.0).sqrt())
        }
    }
}

fn indicial(params: &Params, checks: &mut Vec<Check>) {
    const SAMPLES: usize = 100;
    let mut configs = vec![*params];
    configs.extend(indicial_params().into_iter().filter(|q| q != params));
    for q in configs {
        for location in [Location::Boundary, Location::Infinity] {
            let c = c_at(&q, location);
            let name = format!("indicial.{location:?}.alpha={}.p={}.N={}", q.alpha, q.p, q.dim).to_lowercase();
            if !(c > 0.0) {
                let ok = indicial_root(&IndicialProblem { params: q, location, mu: 0.0 }).is_ok();
                checks.push(check(Suite::Indicial, name, ok, "degenerate equation admits only mu = 0", json!({"c": c})));
                continue;
            }
            let iv = root_interval(&q, location);
            let (mut worst, mut worst_quad, mut outside) = (0.0f64, 0.0f64, 0usize);
            let mut error = None;
            for i in 0..SAMPLES {
                let mu = c * i as f64 / (SAMPLES - 1) as f64;
                match indicial_root(&IndicialProblem { params: q, location, mu }) {
                    Ok(nu) => {
                        worst = worst.max((lambda_at(&q, location, nu) - mu).abs());
                        if !iv.contains(nu, 1e-12) {
                            outside += 1;
                        }
                        if q.p == 2.0 {
                            worst_quad = worst_quad.max((nu - quadratic_root(&q, location, mu)).abs());
                        }
                    }
                    Err(e) => {
                        error = Some(e.to_string());
                        break;
                    }
                }
            }
            let passed = error.is_none() && worst <= INDICIAL_RESIDUAL_TOL && worst_quad <= QUADRATIC_ROOT_TOL && outside == 0;
            checks.push(check(
                Suite::Indicial,
                name,
                passed,
                "the root of the indicial equation reproduces mu on the monotone branch",
                json!({"samples": SAMPLES, "max_residual": worst, "max_quadratic_deviation": worst_quad,
                       "outside_interval": outside, "error": error}),
            ));
        }
    }
}

fn appendix_b(samples: usize, seed: u64, checks: &mut Vec<Check>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut drawn, mut rejected, mut violations) = (0usize, 0usize, 0usize);
    let mut first_violation = Value::Null;
    let mut worst_margin = f64::INFINITY;
    while drawn < samples {
        let alpha = rng.gen_range(-5.0..=5.0);
        let pp = 5.0 - 4.0 * rng.gen::<f64>();
        let dim = rng.gen_range(2..=7u32);
        let location = if rng.gen::<bool>() { Location::Boundary } else { Location::Infinity };
        let Ok(q) = Params::new(alpha, pp, dim) else {
            rejected += 1;
            continue;
        };
        // keep away from the degenerate points where the interval collapses
        let s = q.alpha_plus_p();
        if (s - 1.0).abs() <= 1e-3 || (s - q.n()).abs() <= 1e-3 {
            rejected += 1;
            continue;
        }
        let iv = root_interval(&q, location);
        let (a, b): (f64, f64) = (rng.gen(), rng.gen());
        let (nu, beta) = match location {
            Location::Boundary => (iv.lo + a.min(b) * (iv.hi - iv.lo), iv.lo + a.max(b) * (iv.hi - iv.lo)),
            Location::Infinity => {
                let nu = iv.lo + a * (iv.hi - iv.lo);
                (nu, nu - (1e-6 + 3.0 * b))
            }
        };
        if appendix_b_hypothesis(&q, nu, beta, location).is_err() {
            rejected += 1;
            continue;
        }
        drawn += 1;
        let (lhs, rhs) = appendix_b_sides(&q, nu, beta, location);
        worst_margin = worst_margin.min(rhs - lhs);
        if !(lhs < rhs) {
            violations += 1;
            if first_violation.is_null() {
                first_violation = json!({"alpha": alpha, "p": pp, "N": dim, "location": location,
                                         "nu": nu, "beta": beta, "lhs": lhs, "rhs": rhs});
            }
        }
    }
    checks.push(check(
        Suite::AppendixB,
        "appendix_b.random_tuples",
        violations == 0,
        "strict cross-term inequality for exponents in the root interval",
        json!({"samples": drawn, "rejected_draws": rejected, "violations": violations, "seed": seed,
               "min_margin": if drawn > 0 { worst_margin } else { 0.0 }, "first_violation": first_violation}),
    ));
}

fn chain_rule(checks: &mut Vec<Check>) -> Result<(), CliError> {
    let ext = DomainSpec::ExteriorBall { radius: 1.0 };
    let ann = DomainSpec::Annulus { r0: 1.0, r1: 2.0 };
    let cases = [
        (ext, p(0.0, 2.0, 3), 2.0, vec![1.2, 1.7, 3.0]),
        (ext, p(1.0, 3.0, 3), 1.5, vec![1.2, 1.7, 3.0]),
        (ann, p(-0.5, 1.5, 3), 0.8, vec![1.05, 1.2, 1.4]),
    ];
    let hs = [4e-3, 2e-3, 1e-3];
    for (spec, q, nu, grid) in cases {
        let profile = DistanceProfile::new(spec)?;
        let d = hs
            .iter()
            .map(|&h| chain_rule_check(&profile, &q, nu, &grid, h))
            .collect::<Result<Vec<_>, _>>()?;
        let order = ((d[0] / d[2]).ln() / (hs[0] / hs[2]).ln()).min((d[0] / d[1]).ln() / 2f64.ln());
        checks.push(check(
            Suite::ChainRule,
            format!("chain_rule.{}.alpha={}.p={}.nu={nu}", spec.label(), q.alpha, q.p),
            order >= CHAIN_RULE_MIN_ORDER,
            "chain rule for the weighted p-Laplacian of a power of the distance",
            json!({"steps": hs, "defects": d, "observed_order": order}),
        ));
    }
    Ok(())
}

/// Domains and exponents of the quotient identity grid.
pub const AGMON_DOMAINS: [DomainSpec; 3] = [
    DomainSpec::Annulus { r0: 1.0, r1: 2.0 },
    DomainSpec::Ball { radius: 1.0 },
    DomainSpec::Interval { b: 1.0, half_line: false },
];
pub const AGMON_EPSILONS: [f64; 3] = [0.1, 0.5, 1.0];
/// Distance cut of the truncated energies.
pub const AGMON_CUT: f64 = 1e-6;

fn agmon(params: &Params, checks: &mut Vec<Check>) -> Result<(), CliError> {
    for spec in AGMON_DOMAINS {
        let profile = DistanceProfile::new(spec)?;
        for eps in AGMON_EPSILONS {
            let a = agmon_quotient_truncated(&profile, params, eps, AGMON_CUT)?;
            let expected = (eps / params.p).powf(params.p);
            let rel = (a.quotient - expected).abs() / expected;
            checks.push(check(
                Suite::Agmon,
                format!("agmon.{}.eps={eps}", spec.label()),
                rel <= AGMON_TOL,
                "quotient of delta^(eps/p) equals (eps/p)^p",
                json!({"quotient": a.quotient, "expected": expected, "relative_error": rel}),
            ));
        }
    }
    Ok(())
}

pub const INTEGRABILITY_GRID: [f64; 7] = [0.0, 0.25, 0.5, 0.9, 0.99, 1.0, 1.1];

fn integrability(dim: u32, checks: &mut Vec<Check>) -> Result<(), CliError> {
    let profile = DistanceProfile::new(DomainSpec::Annulus { r0: 1.0, r1: 2.0 })?;
    for a in INTEGRABILITY_GRID {
        let got = integrability_probe(&profile, dim, a);
        let expected = a < 1.0;
        checks.push(check(
            Suite::Integrability,
            format!("integrability.a={a}"),
            got.is_convergent() == expected,
            "delta^-a is integrable near the boundary iff a < 1",
            json!({"expected_convergent": expected, "result": got,
                   "value": match got { Integrability::Convergent { value } => Some(value), Integrability::Divergent => None }}),
        ));
    }
    Ok(())
}

fn sign_detail(rep: &hardy_core::radial::SignCheckReport) -> Value {
    json!({"lambda": rep.lambda, "min_residual": rep.min_residual, "max_residual": rep.max_residual,
           "sign_holds": rep.sign_holds, "threshold": rep.threshold})
}

fn signs(corrupt: bool, checks: &mut Vec<Check>) -> Result<(), CliError> {
    let q = p(0.0, 2.0, 3);
    let ext = DistanceProfile::new(DomainSpec::ExteriorBall { radius: 1.0 })?;
    let ann = DistanceProfile::new(DomainSpec::Annulus { r0: 1.0, r1: 2.0 })?;
    const WINDOW: (f64, f64) = (2.0, 1e4);
    for (sign, name) in [(CandidateSign::Minus, "supersolution"), (CandidateSign::Plus, "subsolution")] {
        let rep = subsupersolution_sign_check(&ext, &q, &SignCheckSpec::new(-0.5, -1.2, Location::Infinity, sign, WINDOW))?;
        // the onset R must leave [R, 10R] inside the sampled window
        let ok = rep.threshold.is_some_and(|r| r <= SIGN_MAX_ONSET && 10.0 * r <= WINDOW.1);
        checks.push(check(
            Suite::Signs,
            format!("signs.infinity.{name}"),
            ok,
            "r^nu -/+ r^beta is a super/subsolution for large r",
            sign_detail(&rep),
        ));
    }
    let rep = subsupersolution_sign_check(
        &ann,
        &q,
        &SignCheckSpec::new(0.5, 0.9, Location::Boundary, CandidateSign::Plus, (1.0 + 1e-6, 1.3)),
    )?;
    checks.push(check(
        Suite::Signs,
        "signs.boundary.subsolution",
        rep.threshold.is_some_and(|t| t > 0.0),
        "delta^nu + delta^beta is a subsolution near the boundary",
        sign_detail(&rep),
    ));

    // ν outside the interval: the supersolution sign is lost
    let mut control = SignCheckSpec::new(-0.2, -0.5, Location::Infinity, CandidateSign::Minus, WINDOW);
    control.enforce_hypotheses = false;
    let rep = subsupersolution_sign_check(&ext, &q, &control)?;
    checks.push(check(
        Suite::Signs,
        "signs.negative_control",
        !rep.sign_holds,
        "the sign flips when nu leaves the root interval",
        sign_detail(&rep),
    ));

    if corrupt {
        // ν moved below the root interval [1/2, 1]
        let mut bad = SignCheckSpec::new(0.3, 0.6, Location::Boundary, CandidateSign::Plus, (1.0 + 1e-6, 1.3));
        let hypothesis = subsupersolution_sign_check(&ann, &q, &bad).err().map(|e| e.to_string());
        bad.enforce_hypotheses = false;
        let rep = subsupersolution_sign_check(&ann, &q, &bad)?;
        let mut detail = sign_detail(&rep);
        detail["hypothesis_error"] = json!(hypothesis);
        checks.push(check(
            Suite::Signs,
            "signs.corrupted_exponent",
            hypothesis.is_none() && rep.sign_holds,
            "delta^nu + delta^beta is a subsolution near the boundary",
            detail,
        ));
    }
    Ok(())
}

fn scale(seed: u64, checks: &mut Vec<Check>) -> Result<(), CliError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let specs = [
        DomainSpec::Interval { b: 1.0, half_line: true },
        DomainSpec::ExteriorBall { radius: 1.0 },
        DomainSpec::Annulus { r0: 1.0, r1: 2.0 },
    ];
    for spec in specs {
        for q in [p(0.0, 2.0, 3), p(1.0, 3.0, 3), p(-0.5, 1.5, 3)] {
            let outer = if spec.is_bounded() { None } else { Some(50.0) };
            let mesh = domain_mesh(&spec, 6, 1e-3, outer, &[])?;
            let u: Vec<f64> = (0..mesh.nodes.len()).map(|_| rng.gen_range(0.05..1.0)).collect();
            let base = assemble_energies(&mesh, &DistanceProfile::new(spec)?, &q)?.quotient(&u);
            let mut worst = 0.0f64;
            for s in [0.1, 3.0, 17.0] {
                let big = spec.dilate(s);
                let scaled = assemble_energies(&mesh.dilate(s), &DistanceProfile::new(big)?, &q)?.quotient(&u);
                worst = worst.max((scaled - base).abs() / base);
            }
            checks.push(check(
                Suite::Scale,
                format!("scale.{}.alpha={}.p={}", spec.label(), q.alpha, q.p),
                worst <= SCALE_TOL,
                "the quotient is invariant under dilation",
                json!({"quotient": base, "max_relative_change": worst}),
            ));
        }
    }
    Ok(())
}
