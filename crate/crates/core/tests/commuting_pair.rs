use std::sync::{Arc, OnceLock};

use renorm_lab::circle_map::{solve_parameter, CircleMapLift, FamilySpec, SolveOptions};
use renorm_lab::commuting_pair::pair::{extract_pair, pair_rotation_digits, Case, PairMeta};
use renorm_lab::commuting_pair::*;
use renorm_lab::commuting_pair::pair::CommutingPair;
use renorm_lab::numerics::{ContinuedFractionState, Scalar, TargetDigits};
use renorm_lab::LabError;

const P: u32 = 212;

fn s(x: &str) -> Scalar {
    Scalar::parse(x, P).unwrap()
}

fn solved(target: TargetDigits, depth: usize) -> (CircleMapLift, ContinuedFractionState) {
    let family = FamilySpec::arnold(1).build(P).unwrap();
    let res = solve_parameter(family.clone(), &target, &SolveOptions::new(depth, P).with_refine(true)).unwrap();
    assert!(res.verified);
    (CircleMapLift::new(family, res.omega), res.cf)
}

fn golden() -> &'static (CircleMapLift, ContinuedFractionState) {
    static CELL: OnceLock<(CircleMapLift, ContinuedFractionState)> = OnceLock::new();
    CELL.get_or_init(|| solved(TargetDigits::golden(), 14))
}

fn golden_pair(level: usize) -> CommutingPair {
    let (map, cf) = golden();
    extract_pair(map, cf, level).unwrap()
}

fn affine_chain(alpha: &str, beta: &str) -> CompositionChain {
    let mut c = CompositionChain::identity(Scalar::zero(P), Scalar::one(P));
    c.push(Step::Affine { alpha: s(alpha), beta: s(beta) });
    c
}

fn sample_points(pair: &CommutingPair) -> Vec<Scalar> {
    (0..=16)
        .map(|k| Scalar::from_ratio(k, 16, P))
        .flat_map(|t| [pair.eta0() * &t, pair.xi0() * &t])
        .collect()
}

#[test]
fn golden_pairs_validate_with_period_one() {
    for n in 1..10 {
        let pair = golden_pair(n);
        assert!(pair.validation_report().ok(), "level {n}");
        assert_eq!(pair.period().unwrap(), Period::Finite(1), "level {n}");
        assert!(*pair.eta0() < 0i64 && *pair.xi0() > 0i64);
        assert_eq!(pair.criticality(), Some(1));
    }
}

#[test]
fn extraction_needs_enough_digits() {
    let (map, cf) = golden();
    assert!(matches!(extract_pair(map, cf, 14), Err(LabError::Domain(_))));
}

#[test]
fn pair_periods_are_the_shifted_digits() {
    let target = TargetDigits::new(vec![2, 3, 4], vec![1]);
    let (map, cf) = solved(target.clone(), 10);
    for level in 0..4 {
        let pair = extract_pair(&map, &cf, level).unwrap();
        let (digits, complete) = pair_rotation_digits(&pair, 10 - level - 2).unwrap();
        assert!(complete);
        assert_eq!(digits, target.take(10)[level + 1..10 - 1].to_vec(), "level {level}");
    }
}

#[test]
fn pre_renormalization_is_the_next_extracted_pair() {
    for n in 1..6 {
        let next = golden_pair(n).pre_renormalize().unwrap();
        let want = golden_pair(n + 1);
        assert_eq!(next.eta0(), want.eta0());
        assert_eq!(next.xi0(), want.xi0());
        for x in sample_points(&want) {
            assert_eq!(next.value(&x), want.value(&x));
        }
    }
}

#[test]
fn normalization_sets_eta_at_zero_to_minus_one() {
    let pair = golden_pair(5);
    let n = pair.normalize();
    assert_eq!(*n.eta0(), -1i64);
    let ratio = pair.xi0() / &pair.eta0().abs();
    assert!((n.xi0() - &ratio).abs() < 1e-60);
    // Normalization is idempotent.
    assert_eq!(n.normalize().xi0(), n.xi0());
}

#[test]
fn homothety_conjugates_normalize_to_the_same_pair() {
    let pair = golden_pair(4);
    let base = pair.normalize();
    for alpha in ["0.125", "3", "1/7"] {
        let conj = pair.conjugate_homothety(&s(alpha));
        let expected_eta0 = pair.eta0() * &s(alpha);
        assert!((conj.eta0() - &expected_eta0).abs() < 1e-60);
        let d = distance(&conj.normalize(), &base, MetricVariant::Moebius, 65).unwrap();
        assert!(d.d2 < 1e-50, "alpha {alpha}: {}", d.d2);
    }
}

#[test]
fn mirror_swap_flips_case_and_is_an_involution() {
    let pair = golden_pair(3);
    let case = pair.case().unwrap();
    let swapped = pair.mirror_swap();
    assert_ne!(swapped.case().unwrap(), case);
    assert_eq!(pair.to_case_one().unwrap().case().unwrap(), Case::One);
    let back = swapped.mirror_swap();
    for x in sample_points(&pair) {
        assert_eq!(back.value(&x), pair.value(&x));
    }
}

#[test]
fn translation_pair_period_is_the_floor_ratio() {
    // η(x) = x − 0.3 and ξ(x) = x + 1 commute; ξ(0) = 1 needs three steps of η
    // to stay nonnegative and crosses 0 on the fourth.
    let pair = CommutingPair::from_chains(affine_chain("1", "-0.3"), affine_chain("1", "1"), None, PairMeta::default());
    assert_eq!(pair.period().unwrap(), Period::Finite(3));
    let pre = pair.pre_renormalize().unwrap();
    // The new branches are η³ξ = x + 0.1 and η = x − 0.3, up to the side swap.
    let mut ends = [pre.eta0().abs(), pre.xi0().abs()];
    ends.sort_by(|a, b| a.cmp_total(b));
    assert!((&ends[0] - &s("0.1")).abs() < 1e-60 && (&ends[1] - &s("0.3")).abs() < 1e-60);
}

#[test]
fn repelling_fixed_point_gives_infinite_period() {
    // η(x) = 2x − 0.1 fixes 0.1 and pushes ξ(0) = 0.2 away from 0.
    let pair = CommutingPair::from_chains(affine_chain("2", "-0.1"), affine_chain("1", "0.2"), None, PairMeta::default());
    assert_eq!(pair.period().unwrap(), Period::Infinite);
    assert!(matches!(pair.renormalize(), Err(LabError::NotRenormalizable)));
}

#[test]
fn mobius_frame_sends_three_points_to_minus_one_zero_one() {
    let m = MobiusFrame::through(&s("-2"), &s("1")).unwrap();
    assert!((m.a.clone() - s("0.75")).abs() < 1e-60);
    assert!((m.c.clone() - s("-0.25")).abs() < 1e-60);
    for (x, y) in [("-2", "-1"), ("0", "0"), ("1", "1")] {
        assert!((m.jet(&s(x)).f - s(y)).abs() < 1e-60);
    }
    for k in -10i64..=10 {
        let x = Scalar::from_ratio(k, 10, P);
        let inv = m.inverse_jet(&x);
        let id = m.jet(&inv.f).compose(&inv);
        assert!((id.f - &x).abs() < 1e-60);
        assert!((id.d1 - 1i64).abs() < 1e-60);
        assert!(id.d2.abs() < 1e-55 && id.d3.abs() < 1e-55);
    }
    assert!(matches!(MobiusFrame::through(&s("1"), &s("2")), Err(LabError::Domain(_))));
}

#[test]
fn distance_is_zero_on_the_diagonal_and_monotone_in_r() {
    let a = golden_pair(6).normalize();
    let b = golden_pair(7).normalize();
    let zero = distance(&a, &a, MetricVariant::Moebius, DEFAULT_GRID).unwrap();
    assert!(zero.d2.is_zero());
    for variant in [MetricVariant::Moebius, MetricVariant::Affine] {
        let d = distance(&a, &b, variant, DEFAULT_GRID).unwrap();
        assert!(d.d0 <= d.d1 && d.d1 <= d.d2);
        assert!(d.d0 >= d.ratio_term);
        assert!(d.d0 > 0i64);
        let ba = distance(&b, &a, variant, DEFAULT_GRID).unwrap();
        assert_eq!(d.d2, ba.d2);
    }
}

#[test]
fn distance_is_stable_under_grid_refinement() {
    let a = golden_pair(3).normalize();
    let b = golden_pair(4).normalize();
    let coarse = distance(&a, &b, MetricVariant::Moebius, 257).unwrap();
    let fine = distance(&a, &b, MetricVariant::Moebius, 1025).unwrap();
    for r in 0..3 {
        let rel = ((fine.d(r) - coarse.d(r)) / fine.d(r)).abs();
        assert!(rel < 0.05, "d{r}: {} vs {}", coarse.d(r), fine.d(r));
        assert!(fine.d(r) >= coarse.d(r) || rel < 1e-6);
    }
}

#[test]
fn distance_rejects_mixed_criticality() {
    let a = golden_pair(3);
    let map = CircleMapLift::new(FamilySpec::arnold(2).build(P).unwrap(), s("0.6"));
    let cf = renorm_lab::circle_map::closest_returns(&map, 6, 1 << 20).unwrap();
    let b = extract_pair(&map, &cf, 2).unwrap();
    assert!(distance(&a, &b, MetricVariant::Moebius, 33).is_err());
}

#[test]
fn k_control_holds_for_golden_pairs() {
    for n in [2, 6, 9] {
        let rep = k_control(&golden_pair(n).normalize()).unwrap();
        assert_eq!(rep.period, 1);
        assert!(rep.violated.is_empty(), "{:?}", rep.violated);
        assert!(rep.minimal_k >= 1i64 && rep.minimal_k < 1e3);
        assert!(rep.min_deta > 0i64);
    }
}

#[test]
fn order_relation_is_reflexive_with_zero_gap() {
    let a = golden_pair(5).normalize();
    assert!(order_leq(&a, &a).unwrap().is_zero());
}

#[test]
fn flattest_point_has_unit_derivative() {
    let (map, cf) = solved(TargetDigits::new(vec![1, 6], vec![1]), 8);
    let pair = extract_pair(&map, &cf, 0).unwrap();
    assert_eq!(pair.period().unwrap(), Period::Finite(6));
    let fp = flattest_point(&pair).unwrap();
    let d1 = pair.to_case_one().unwrap().eta().jet(&fp.p).d1;
    assert!((d1 - 1i64).abs() < 1e-40);
    assert!(fp.index <= 6);
    assert!(matches!(flattest_point(&golden_pair(4)), Err(LabError::Domain(_))));
}

#[test]
fn json_round_trip_preserves_values() {
    let pair = golden_pair(4).normalize();
    let text = pair_to_json(&pair).unwrap();
    assert!(text.contains("renorm-pair/1"));
    let back = pair_from_json(&text).unwrap();
    assert_eq!(back.eta0(), pair.eta0());
    assert_eq!(back.xi0(), pair.xi0());
    assert_eq!(back.criticality(), pair.criticality());
    for x in sample_points(&pair) {
        assert_eq!(back.value(&x), pair.value(&x));
    }
    assert!(pair_from_json("{\"format\":\"other\"}").is_err());
}

#[test]
fn chain_iterate_matches_repeated_map_application() {
    let (map, _) = golden();
    let shared = Arc::new(map.clone());
    let chain = CompositionChain::iterate(shared, 5, -3, s("-1"), s("1"));
    let x = s("0.123");
    let mut y = x.clone();
    for _ in 0..5 {
        y = map.value(&y);
    }
    assert!((chain.value(&x) - (y - 3i64)).abs() < 1e-60);
    assert_eq!(chain.base_evaluations(), 5);
}
