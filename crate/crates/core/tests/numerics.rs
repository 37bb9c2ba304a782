use proptest::prelude::*;
use rug::Rational;

use renorm_lab::numerics::*;
use renorm_lab::LabError;

const P: u32 = 212;

fn s(x: &str) -> Scalar {
    Scalar::parse(x, P).unwrap()
}

#[test]
fn gauss_map_of_one_half_is_zero() {
    assert!(gauss_map(&s("1/2")).unwrap().is_zero());
}

#[test]
fn golden_mean_is_fixed_by_gauss_map() {
    let theta = (s("5").sqrt() - 1i64) / 2;
    let g = gauss_map(&theta).unwrap();
    assert!((g - &theta).abs() <= theta.ulp() * 4);
}

#[test]
fn gauss_map_two_sevenths_matches_rational_oracle() {
    let exact = gauss_map_rational(&Rational::from((2, 7))).unwrap();
    assert_eq!(exact, Rational::from((1, 2)));
    let g = gauss_map(&s("2/7")).unwrap();
    assert!((g - s("1/2")).abs() <= s("1").ulp() * 8);
}

#[test]
fn gauss_map_rejects_points_outside_unit_interval() {
    for bad in ["0", "1", "-0.5", "1.5"] {
        assert!(matches!(gauss_map(&s(bad)), Err(LabError::Domain(_))), "{bad}");
    }
}

#[test]
fn cf_to_real_examples() {
    assert_eq!(cf_to_real(&[2], P).unwrap(), s("1/2"));
    assert_eq!(cf_to_rational(&[3, 7]).unwrap(), Rational::from((7, 22)));
    let r = cf_to_rational(&[1; 10]).unwrap();
    assert_eq!(*r.denom(), 89);
    assert_eq!(*r.numer(), 55);
    assert!(matches!(cf_to_real(&[1, 0, 2], P), Err(LabError::Domain(_))));
    assert!(cf_to_real(&[], P).is_err());
}

#[test]
fn convergents_follow_recursion_and_are_reduced() {
    let digits = [2u64, 3, 1, 4, 1, 5, 9];
    let c = convergents(&digits).unwrap();
    assert_eq!(c[0], (0, 1));
    assert_eq!(c[1], (1, 2));
    for n in 1..digits.len() {
        assert_eq!(c[n + 1].1, digits[n] as i64 * c[n].1 + c[n - 1].1);
        assert_eq!(c[n + 1].0, digits[n] as i64 * c[n].0 + c[n - 1].0);
        let g = rug::Integer::from(c[n + 1].0).gcd(&rug::Integer::from(c[n + 1].1));
        assert_eq!(g, 1);
    }
    let last = Rational::from((c[digits.len()].0, c[digits.len()].1));
    assert_eq!(last, cf_to_rational(&digits).unwrap());
}

#[test]
fn rational_digits_invert_cf_to_rational() {
    let digits = vec![3u64, 1, 4, 1, 5, 9, 2, 6];
    let r = cf_to_rational(&digits).unwrap();
    assert_eq!(renorm_lab::numerics::cf::rational_digits(&r, 20), digits);
}

#[test]
fn target_digits_indexing() {
    let t = TargetDigits::new(vec![5, 4], vec![2, 1]);
    assert_eq!(t.take(7), vec![5, 4, 2, 1, 2, 1, 2]);
    assert_eq!(TargetDigits::golden().take(3), vec![1, 1, 1]);
    assert_eq!(TargetDigits::finite(vec![3]).digit(1), None);
}

#[test]
fn identity_jet_is_neutral() {
    let inner = Jet3::new(s("0.3"), s("1.7"), s("-2.5"), s("11"));
    let id = Jet3::identity(inner.f.clone());
    assert_eq!(jet_compose(&id, &inner), inner);
    let outer = Jet3::new(s("2"), s("0.5"), s("3"), s("-4"));
    let id0 = Jet3::identity(s("0.9"));
    assert_eq!(jet_compose(&outer, &id0), outer);
}

#[test]
fn affine_jets_compose_to_affine_jets() {
    let a = Jet3::affine(s("1"), s("3"));
    let b = Jet3::affine(s("0.25"), s("-2"));
    let c = jet_compose(&a, &b);
    assert!(c.d2.is_zero() && c.d3.is_zero());
    assert_eq!(c.d1, s("-6"));
}

/// Coefficients of `p(q(x))` for cubic polynomials, by exact rational expansion.
fn compose_poly(p: &[Rational; 4], q: &[Rational; 4]) -> Vec<Rational> {
    let mut out = vec![Rational::new(); 10];
    let mut power = vec![Rational::from(1)];
    for pk in p.iter() {
        for (i, c) in power.iter().enumerate() {
            out[i] += Rational::from(pk * c);
        }
        let mut next = vec![Rational::new(); power.len() + 3];
        for (i, c) in power.iter().enumerate() {
            for (j, qj) in q.iter().enumerate() {
                next[i + j] += Rational::from(c * qj);
            }
        }
        power = next;
    }
    out
}

fn poly_jet_exact(c: &[Rational], x: &Rational) -> [Rational; 4] {
    let mut out = [Rational::new(), Rational::new(), Rational::new(), Rational::new()];
    for (k, ck) in c.iter().enumerate() {
        for (d, slot) in out.iter_mut().enumerate() {
            if k >= d {
                let falling: i64 = (0..d as i64).map(|i| k as i64 - i).product();
                let xp = (0..k - d).fold(Rational::from(1), |acc, _| acc * x);
                *slot += Rational::from(ck * &xp) * falling;
            }
        }
    }
    out
}

fn to_jet(v: &[Rational; 4]) -> Jet3 {
    Jet3::new(
        Scalar::from_rational(&v[0], P),
        Scalar::from_rational(&v[1], P),
        Scalar::from_rational(&v[2], P),
        Scalar::from_rational(&v[3], P),
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]
    #[test]
    fn jet_composition_matches_symbolic_polynomial_composition(
        pc in proptest::array::uniform4(-20i64..20),
        qc in proptest::array::uniform4(-20i64..20),
        xn in -30i64..30,
    ) {
        let p = pc.map(|c| Rational::from((c, 7)));
        let q = qc.map(|c| Rational::from((c, 5)));
        let x = Rational::from((xn, 11));
        let inner = poly_jet_exact(&q, &x);
        let outer = poly_jet_exact(&p, &inner[0]);
        let got = jet_compose(&to_jet(&outer), &to_jet(&inner));
        let want = poly_jet_exact(&compose_poly(&p, &q), &x);
        for k in 0..4 {
            let w = Scalar::from_rational(&want[k], P);
            let tol = w.abs().max_of(Scalar::one(P)) * Scalar::pow2(-190, P);
            prop_assert!((got.component(k).clone() - &w).abs() <= tol, "component {}", k);
        }
    }

    #[test]
    fn mixed_precision_takes_the_maximum(a in -1000i64..1000, b in 1i64..1000) {
        let x = Scalar::from_ratio(a, b, 64);
        let y = Scalar::from_ratio(b, 3, 300);
        prop_assert_eq!((&x + &y).prec(), 300);
        prop_assert_eq!((&y * &x).prec(), 300);
    }
}

#[test]
fn fit_loglinear_of_identity_has_unit_slope() {
    let xs: Vec<Scalar> = (1..=8).map(|k| Scalar::from_i64(k, P)).collect();
    let f = fit_loglinear(&xs, &xs).unwrap();
    assert!((f.slope.clone() - 1).abs() < 1e-50);
    assert!((f.r_squared.clone() - 1).abs() < 1e-50);
    assert_eq!(f.n_points, 8);
}

#[test]
fn fit_loglinear_recovers_power_law() {
    let xs: Vec<Scalar> = (1..=6).map(|k| Scalar::from_i64(k * 16, P)).collect();
    let ys: Vec<Scalar> = xs.iter().map(|x| x.powi(3) * 5).collect();
    let f = fit_loglinear(&xs, &ys).unwrap();
    assert!((f.slope.clone() - 3).abs() < 1e-50);
    assert!((f.intercept.clone() - s("5").ln()).abs() < 1e-50);
}

#[test]
fn fits_reject_bad_input() {
    let xs = vec![s("1"), s("2")];
    assert!(fit_loglinear(&xs, &[s("1"), s("0")]).is_err());
    assert!(fit_loglinear(&xs[..1], &xs[..1]).is_err());
    assert!(fit_linear(&xs, &[s("1")]).is_err());
}

#[test]
fn semilog_fit_recovers_geometric_rate() {
    let xs: Vec<Scalar> = (0..10).map(|k| Scalar::from_i64(k, P)).collect();
    let ys: Vec<Scalar> = (0..10).map(|k| s("0.6").powi(k)).collect();
    let f = fit_semilog(&xs, &ys).unwrap();
    assert!((f.slope.exp() - s("0.6")).abs() < 1e-50);
}

#[test]
fn simpson_is_exact_on_cubics() {
    let v = renorm_lab::numerics::quad::simpson(|x: &Scalar| x.powi(3) * 4 - x * 2 + 1, &s("0"), &s("2"), 4);
    // ∫_0^2 (4x³ − 2x + 1) dx = 16 − 4 + 2 = 14
    assert!((v - 14).abs() <= s("1").ulp() * 64);
}

#[test]
fn unit_side_grid_has_refinement_points() {
    let g = renorm_lab::numerics::grid::unit_side_grid(8, P);
    assert_eq!(g.len(), 8 + 18);
    assert!(g.windows(2).all(|w| w[0] < w[1]));
    assert_eq!(g.last().unwrap(), &Scalar::one(P));
    assert_eq!(g[0], Scalar::pow2(-18, P));
}
