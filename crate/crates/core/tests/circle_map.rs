use std::sync::Arc;

use renorm_lab::circle_map::family::{arnold, rotation};
use renorm_lab::circle_map::*;
use renorm_lab::numerics::{cf_to_real, ContinuedFractionState, Scalar, TargetDigits};
use renorm_lab::LabError;

const P: u32 = 212;

fn s(x: &str) -> Scalar {
    Scalar::parse(x, P).unwrap()
}

fn arnold_map(omega: &str) -> CircleMapLift {
    CircleMapLift::new(Arc::new(arnold(1, P).unwrap()), s(omega))
}

fn golden() -> Scalar {
    (s("5").sqrt() - 1i64) / 2
}

fn close(a: &Scalar, b: &Scalar, tol: &str) -> bool {
    (a - b).abs() <= s(tol)
}

#[test]
fn arnold_jet_matches_closed_form() {
    let f = arnold_map("0");
    let j = evaluate(&f, &s("0")).unwrap();
    assert!(j.f.is_zero() && j.d1.is_zero() && j.d2.is_zero());
    let four_pi_sq = Scalar::pi(P).square() * 4;
    assert!(close(&j.d3, &four_pi_sq, "1e-60"));

    let f = arnold_map("1/4");
    let j = evaluate(&f, &s("1/2")).unwrap();
    assert!(close(&j.f, &s("3/4"), "1e-60"));
    assert!(close(&j.d1, &s("2"), "1e-60"));
    assert!(close(&j.d2, &s("0"), "1e-60"));
}

#[test]
fn lift_commutes_with_unit_translation_and_is_monotone() {
    for spec in [FamilySpec::arnold(1), FamilySpec::arnold(2), FamilySpec::two_harmonic("1/10")] {
        let map = CircleMapLift::new(spec.build(P).unwrap(), s("0.3"));
        for k in -20i64..=20 {
            let x = Scalar::from_ratio(k, 17, P);
            let shifted = map.value(&(&x + 1i64));
            assert!(close(&shifted, &(map.value(&x) + 1i64), "1e-60"), "{spec:?} at {k}");
            assert!(map.evaluate(&x).d1 >= 0i64, "{spec:?} at {k}");
        }
    }
}

#[test]
fn arnold_d2_has_quintic_critical_point() {
    let map = CircleMapLift::new(FamilySpec::arnold(2).build(P).unwrap(), s("0"));
    assert_eq!(map.criticality_index(), Some(2));
    let j = map.evaluate(&s("0"));
    assert!(j.d1.abs() < 1e-60 && j.d2.abs() < 1e-60 && j.d3.abs() < 1e-60);
    // Near zero the derivative grows like x^4.
    let a = map.evaluate(&s("1e-3")).d1;
    let b = map.evaluate(&s("2e-3")).d1;
    assert!(close(&(b / a), &s("16"), "1e-3"));
}

#[test]
fn two_harmonic_with_zero_beta_is_arnold() {
    let th = CircleMapLift::new(FamilySpec::two_harmonic("0").build(P).unwrap(), s("0.4"));
    let ar = arnold_map("0.4");
    for k in 0..32 {
        let x = Scalar::from_ratio(k, 31, P);
        assert!(close(&th.value(&x), &ar.value(&x), "1e-60"));
    }
}

#[test]
fn two_harmonic_derivative_factorization() {
    // f'(t) = (1 − c)((1 − β) − 2βc) with c = cos 2πt.
    let beta = s("1/10");
    let map = CircleMapLift::new(FamilySpec::two_harmonic("1/10").build(P).unwrap(), s("0"));
    for k in 0..40 {
        let t = Scalar::from_ratio(k, 40, P);
        let (_, c) = (&t * &(Scalar::pi(P) * 2)).sin_cos();
        let want = (Scalar::one(P) - &c) * ((Scalar::one(P) - &beta) - &beta * &c * 2);
        assert!(close(&map.evaluate(&t).d1, &want, "1e-60"));
        assert!(want >= 0i64);
    }
}

#[test]
fn invalid_family_parameters_are_rejected() {
    assert!(matches!(FamilySpec::two_harmonic("1/3").build(P), Err(LabError::Config(_))));
    assert!(matches!(FamilySpec::arnold(0).build(P), Err(LabError::Config(_))));
    let unknown = FamilySpec { id: "tent".into(), params: Default::default() };
    assert!(matches!(unknown.build(P), Err(LabError::Config(_))));
}

#[test]
fn rational_parameter_zero_is_a_periodic_orbit() {
    let err = closest_returns(&arnold_map("0"), 5, DEFAULT_MAX_ITERATIONS).unwrap_err();
    assert!(matches!(err, LabError::PeriodicOrbit { .. }));
}

#[test]
fn rigid_rotation_reproduces_its_digits() {
    // ω = [2, 3, 1, 1, 1, ...]: 1/(2 + 1/(3 + θ)) with θ the golden mean.
    let theta = golden();
    let omega = (Scalar::from_i64(2, P) + (Scalar::from_i64(3, P) + &theta).recip()).recip();
    let map = CircleMapLift::new(Arc::new(rotation(P)), omega);
    let cf = closest_returns(&map, 12, DEFAULT_MAX_ITERATIONS).unwrap();
    assert_eq!(cf.digits, TargetDigits::new(vec![2, 3], vec![1]).take(12));
    assert_eq!(cf.q(1), 2);
    assert_eq!(cf.q(2), 7);
}

#[test]
fn rigid_rotation_closest_returns_are_signed_distances() {
    let theta = golden();
    let map = CircleMapLift::new(Arc::new(rotation(P)), theta.clone());
    let cf = closest_returns(&map, 10, DEFAULT_MAX_ITERATIONS).unwrap();
    for n in 0..=10 {
        let want = &theta * cf.q(n) - cf.p(n);
        assert!(close(&cf.closest_return_points[n], &want, "1e-55"), "level {n}");
    }
}

fn solve(spec: &FamilySpec, depth: usize) -> (CircleMapLift, SolveResult) {
    let family = spec.build(P).unwrap();
    let res = solve_parameter(family.clone(), &TargetDigits::golden(), &SolveOptions::new(depth, P)).unwrap();
    (CircleMapLift::new(family, res.omega.clone()), res)
}

#[test]
fn golden_solve_for_two_families() {
    let (_, a) = solve(&FamilySpec::arnold(1), 12);
    let (_, b) = solve(&FamilySpec::two_harmonic("1/10"), 12);
    for r in [&a, &b] {
        assert!(r.verified);
        assert_eq!(r.cf.digits, vec![1; 12]);
        assert_eq!(r.cf.q(12), 233);
        assert!(r.birkhoff_residual <= r.birkhoff_bound);
    }
    assert!((&a.omega - &b.omega).abs() > 1e-6);
    // Digits 1,1,... push ω toward the golden-mean rotation number.
    let rho = cf_to_real(&a.cf.digits, P).unwrap();
    assert!(close(&rho, &golden(), "1e-4"));
}

#[test]
fn unbracketed_target_is_a_range_error() {
    let mut opts = SolveOptions::new(6, P);
    opts.bracket = (s("0.9"), s("0.95"));
    let err = solve_parameter(FamilySpec::arnold(1).build(P).unwrap(), &TargetDigits::golden(), &opts).unwrap_err();
    assert!(matches!(err, LabError::Range(_)));
}

fn cf_of(map: &CircleMapLift, depth: usize) -> ContinuedFractionState {
    closest_returns(map, depth, DEFAULT_MAX_ITERATIONS).unwrap()
}

#[test]
fn partition_atoms_tile_the_circle_and_refine() {
    let (map, res) = solve(&FamilySpec::arnold(1), 12);
    let cf = &res.cf;
    let p3 = build_partition(&map, cf, 3).unwrap();
    assert_eq!(p3.len(), 8);
    for n in 1..8 {
        let p = build_partition(&map, cf, n).unwrap();
        assert_eq!(p.len() as i64, cf.q(n) + cf.q(n + 1));
        let total = p.atoms.iter().fold(Scalar::zero(P), |acc, a| acc + &a.length);
        assert!(close(&total, &s("1"), "1e-55"));
        assert!(p.atoms.iter().all(|a| a.length > 0i64));
        let longs = p.atoms.iter().filter(|a| a.label.kind == AtomKind::Long).count();
        assert_eq!(longs as i64, cf.q(n + 1));
        let next = build_partition(&map, cf, n + 1).unwrap();
        // Every endpoint of P_n is an endpoint of P_{n+1}.
        assert_eq!(&next.orbit[..p.orbit.len()], &p.orbit[..]);
        assert!(next.len() > p.len());
    }
}

#[test]
fn partition_order_matches_the_rigid_rotation() {
    let (map, res) = solve(&FamilySpec::arnold(1), 12);
    let rot = CircleMapLift::new(Arc::new(rotation(P)), golden());
    let rcf = cf_of(&rot, 12);
    for n in [2, 5, 8] {
        let a = build_partition(&map, &res.cf, n).unwrap();
        let b = build_partition(&rot, &rcf, n).unwrap();
        assert_eq!(a.order, b.order, "level {n}");
        let la: Vec<_> = a.atoms.iter().map(|x| x.label).collect();
        let lb: Vec<_> = b.atoms.iter().map(|x| x.label).collect();
        assert_eq!(la, lb);
    }
}

#[test]
fn partition_needs_enough_digits() {
    let (map, res) = solve(&FamilySpec::arnold(1), 6);
    assert!(matches!(build_partition(&map, &res.cf, 6), Err(LabError::Domain(_))));
}

#[test]
fn rigid_rotation_has_no_distortion() {
    let rot = CircleMapLift::new(Arc::new(rotation(P)), golden());
    let cf = cf_of(&rot, 10);
    for n in [2, 4, 6] {
        let p = build_partition(&rot, &cf, n).unwrap();
        let k = koebe_distortion_probe(&rot, &cf, &p).unwrap();
        assert!(close(&k, &s("1"), "1e-50"));
        let rb = real_bounds_report(&rot, &cf, &p).unwrap();
        assert!(close(&rb.k_dist, &s("1"), "1e-50"));
    }
}

#[test]
fn real_bounds_are_uniform_for_the_critical_map() {
    let (map, res) = solve(&FamilySpec::arnold(1), 14);
    let ks: Vec<Scalar> = (4..12)
        .map(|n| {
            let p = build_partition(&map, &res.cf, n).unwrap();
            real_bounds_report(&map, &res.cf, &p).unwrap().k_adj
        })
        .collect();
    assert!(ks.iter().all(|k| *k >= 1i64 && *k < 10i64), "{ks:?}");
}
