use std::sync::Arc;

use renorm_lab::circle_map::{solve_parameter, CircleMapLift, FamilySpec, SolveOptions};
use renorm_lab::commuting_pair::pair::{extract_pair, tau_pair};
use renorm_lab::commuting_pair::CommutingPair;
use renorm_lab::nonlinearity::*;
use renorm_lab::numerics::{Jet3, Scalar, TargetDigits};
use renorm_lab::LabError;

const P: u32 = 212;

fn s(x: &str) -> Scalar {
    Scalar::parse(x, P).unwrap()
}

fn poly(c: &[&str]) -> Polynomial {
    Polynomial::new(c.iter().map(|x| s(x)).collect())
}

fn on_unit(f: impl JetFunction + 'static) -> DiffeoOnInterval {
    DiffeoOnInterval::new(Arc::new(f), s("0"), s("1"))
}

/// `x ↦ x/(x + 1)` with its exact jet.
struct Moebius;

impl JetFunction for Moebius {
    fn jet(&self, x: &Scalar) -> Jet3 {
        let u = (x + 1i64).recip();
        Jet3::new(x * &u, u.square(), -(u.powi(3) * 2), u.powi(4) * 6)
    }
}

fn close(a: &Scalar, b: &Scalar, tol: f64) -> bool {
    (a - b).abs() < tol
}

fn interior(n: i64) -> impl Iterator<Item = Scalar> {
    (1..n).map(move |k| Scalar::from_ratio(k, n, P))
}

#[test]
fn affine_maps_have_zero_nonlinearity() {
    let f = on_unit(poly(&["0.25", "3"]));
    for x in interior(10) {
        assert!(nonlinearity(&f, &x).unwrap().is_zero());
    }
}

#[test]
fn nonlinearity_of_a_quadratic() {
    // f = (x + x²)/2 has N f = 2/(1 + 2x).
    let f = on_unit(poly(&["0", "1/2", "1/2"]));
    for x in interior(10) {
        let want = (&x * 2 + 1i64).recip() * 2;
        assert!(close(&nonlinearity(&f, &x).unwrap(), &want, 1e-60));
    }
}

#[test]
fn nonpositive_derivative_is_a_domain_error() {
    let f = on_unit(poly(&["0", "-1"]));
    assert!(matches!(nonlinearity(&f, &s("0.5")), Err(LabError::Domain(_))));
}

#[test]
fn schwarzian_examples() {
    for x in interior(8) {
        assert!(schwarzian(&Moebius, &x).unwrap().abs() < 1e-55);
    }
    let cube = poly(&["0", "0", "0", "1"]);
    assert!(close(&schwarzian(&cube, &s("0.5")).unwrap(), &s("-16"), 1e-55));
}

#[test]
fn derivative_identity_holds_for_smooth_maps() {
    let f = poly(&["0", "1", "0.3", "-0.1"]);
    for x in interior(8) {
        assert!(nonlinearity_derivative_identity_check(&f, &x).unwrap() < 1e-30);
        assert!(nonlinearity_derivative_identity_check(&Moebius, &x).unwrap() < 1e-30);
    }
}

#[test]
fn chain_rule_for_nonlinearity() {
    // N(g∘f) = (Ng∘f)·Df + Nf
    let f = poly(&["0.1", "0.7", "0.2"]);
    let g = Moebius;
    for x in interior(8) {
        let jf = f.jet(&x);
        let jg = g.jet(&jf.f);
        let lhs = nonlinearity_of_jet(&jg.compose(&jf)).unwrap();
        let rhs = nonlinearity_of_jet(&jg).unwrap() * &jf.d1 + nonlinearity_of_jet(&jf).unwrap();
        assert!(close(&lhs, &rhs, 1e-60));
    }
}

#[test]
fn inverse_of_zero_is_the_identity() {
    let phi = Arc::new(ClosedFormPhi::new(|x: &Scalar| Scalar::zero(x.prec()), |x: &Scalar| Scalar::zero(x.prec())));
    for x in interior(10) {
        let y = nonlinearity_inverse(phi.clone(), &s("-1"), &s("3"), &(&x * 4 - 1i64)).unwrap();
        assert!(close(&y, &(&x * 4 - 1i64), 1e-55));
    }
}

#[test]
fn inverse_of_a_constant_is_exponential() {
    // N f = c on [0, 1] gives f = (e^{cx} − 1)/(e^c − 1).
    let c = s("1.5");
    let cc = c.clone();
    let phi = Arc::new(ClosedFormPhi::new(move |_| cc.clone(), |x: &Scalar| Scalar::zero(x.prec())));
    let inv = NonlinearityInverse::new(phi, s("0"), s("1"), DEFAULT_PANELS).unwrap();
    let denom = c.exp() - 1i64;
    for x in interior(10) {
        let want = ((&c * &x).exp() - 1i64) / &denom;
        assert!(close(&inv.jet(&x).f, &want, 1e-17), "{}", (inv.jet(&x).f - &want).abs());
    }
}

#[test]
fn inverse_recovers_a_quadratic_diffeo() {
    let phi = Arc::new(ClosedFormPhi::new(
        |x: &Scalar| (x * 2 + 1i64).recip() * 2,
        |x: &Scalar| -((x * 2 + 1i64).recip().square() * 4),
    ));
    let inv = NonlinearityInverse::new(phi, s("0"), s("1"), DEFAULT_PANELS).unwrap();
    for x in interior(10) {
        let want = (&x + &x.square()) / 2;
        let j = inv.jet(&x);
        assert!(close(&j.f, &want, 1e-14), "{}", (&j.f - &want).abs());
        assert!(close(&j.d1, &((&x * 2 + 1i64) / 2), 1e-14));
    }
    assert!(roundtrip_residual(&inv, 64) < 1e-9);
}

#[test]
fn piecewise_linear_phi_round_trips() {
    let pl = PiecewiseLinear::sample(&s("0"), &s("1"), 17, |x| x * 3 - 1i64).unwrap();
    assert!(close(&pl.value(&s("0.3")), &s("-0.1"), 1e-60));
    assert!(close(&pl.derivative(&s("0.3")), &s("3"), 1e-60));
    let inv = NonlinearityInverse::new(Arc::new(pl), s("0"), s("1"), DEFAULT_PANELS).unwrap();
    assert!(roundtrip_residual(&inv, 40) < 1e-9);
    assert!(NonlinearityInverse::new(Arc::new(PiecewiseLinear::sample(&s("0"), &s("1"), 3, |x| x.clone()).unwrap()), s("1"), s("0"), 8).is_err());
}

fn level_zero_pair(a: u64) -> CommutingPair {
    let family = FamilySpec::arnold(1).build(P).unwrap();
    let target = TargetDigits::new(vec![1, a], vec![1]);
    let res = solve_parameter(family.clone(), &target, &SolveOptions::new(6, P)).unwrap();
    let map = CircleMapLift::new(family, res.omega);
    extract_pair(&map, &res.cf, 0).unwrap()
}

#[test]
fn large_period_decomposes_into_period_minus_one_factors() {
    let pair = level_zero_pair(60);
    let dec = decompose_branch(&pair).unwrap();
    assert_eq!(dec.len(), 59);
    assert_eq!(dec.frames.len(), 60);
    assert!(dec.frames.iter().all(|f| f.scale > 0i64));
    assert!(recomposition_residual(&dec, 33) <= tau_pair(P));
    for f in &dec.factors {
        let j0 = f.jet(&s("0"));
        let j1 = f.jet(&s("1"));
        assert!(j0.f.abs() < 1e-40 && (j1.f - 1i64).abs() < 1e-40);
    }
}

#[test]
fn nonlinearity_sums_vanish_against_themselves() {
    let pair = level_zero_pair(12);
    let dec = decompose_branch(&pair).unwrap();
    let sums = nonlinearity_sums(&dec, Some(&dec)).unwrap();
    assert_eq!(sums.factors, 11);
    assert!(sums.sum_diff.unwrap().is_zero());
    assert!(sums.sum_n > 0i64);
    let other = decompose_branch(&level_zero_pair(10)).unwrap();
    assert!(matches!(nonlinearity_sums(&dec, Some(&other)), Err(LabError::Domain(_))));
}

#[test]
fn period_one_pairs_have_no_factors() {
    let family = FamilySpec::arnold(1).build(P).unwrap();
    let res = solve_parameter(family.clone(), &TargetDigits::golden(), &SolveOptions::new(8, P)).unwrap();
    let map = CircleMapLift::new(family, res.omega);
    let dec = decompose_branch(&extract_pair(&map, &res.cf, 4).unwrap()).unwrap();
    assert!(dec.is_empty());
    assert!(recomposition_residual(&dec, 9).is_zero());
}
