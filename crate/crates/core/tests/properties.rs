use std::collections::BTreeSet;

use proptest::prelude::*;
use qgauss_core::parse::parse_scalar;
use qgauss_core::series::expand;
use qgauss_core::{
    embed, swap, Coeff, DeltaComb, Direction, Field, LegSpace, Mat, Poly, RatFunc, Rational, TruncSeries,
};

type Q = RatFunc<Rational>;
type Qa = RatFunc<RatFunc<Rational>>;

fn rat() -> impl Strategy<Value = Rational> {
    (-9i64..=9, 1i64..=5).prop_map(|(n, d)| Rational::new(n, d))
}

fn poly() -> impl Strategy<Value = Poly<Rational>> {
    prop::collection::vec(rat(), 1..4).prop_map(Poly::from_coeffs)
}

fn nonzero_poly() -> impl Strategy<Value = Poly<Rational>> {
    poly().prop_filter("nonzero", |p| !p.is_zero())
}

fn ratfunc() -> impl Strategy<Value = Q> {
    (poly(), nonzero_poly()).prop_map(|(n, d)| Q::new(n, d).unwrap())
}

fn nested() -> impl Strategy<Value = Qa> {
    let coeffs = |min| prop::collection::vec(ratfunc(), min..3);
    (coeffs(1), coeffs(1).prop_filter("nonzero", |c| c.iter().any(|x| !x.is_zero())))
        .prop_map(|(n, d)| Qa::new(Poly::from_coeffs(n), Poly::from_coeffs(d)).unwrap())
}

fn matrix(rows: usize, cols: usize) -> impl Strategy<Value = Mat<Rational>> {
    prop::collection::vec(rat(), rows * cols).prop_map(move |v| Mat::from_fn(rows, cols, |i, j| v[i * cols + j].clone()))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn field_axioms(x in ratfunc(), y in ratfunc(), z in ratfunc()) {
        prop_assert_eq!(x.add(&y), y.add(&x));
        prop_assert_eq!(x.mul(&y), y.mul(&x));
        prop_assert_eq!(x.add(&y).add(&z), x.add(&y.add(&z)));
        prop_assert_eq!(x.mul(&y).mul(&z), x.mul(&y.mul(&z)));
        prop_assert_eq!(x.mul(&y.add(&z)), x.mul(&y).add(&x.mul(&z)));
        prop_assert!(x.sub(&x).is_zero());
        if !x.is_zero() {
            prop_assert_eq!(x.mul(&x.inv().unwrap()), Q::one());
        }
    }

    #[test]
    fn normalization_is_canonical(n in poly(), d in nonzero_poly(), c in nonzero_poly()) {
        let x = Q::new(n.clone(), d.clone()).unwrap();
        prop_assert_eq!(Q::new(x.num().clone(), x.den().clone()).unwrap(), x.clone());
        prop_assert_eq!(Q::new(n.mul(&c), d.mul(&c)).unwrap(), x.clone());
        prop_assert!(x.den().lead().is_one());
        prop_assert!(x.num().gcd(x.den()).degree() == Some(0));
    }

    #[test]
    fn gcd_over_function_field(a in prop::collection::vec(ratfunc(), 1..4),
                               b in prop::collection::vec(ratfunc(), 1..4),
                               c in prop::collection::vec(ratfunc(), 2..3)) {
        let (a, b, c) = (Poly::from_coeffs(a), Poly::from_coeffs(b), Poly::from_coeffs(c));
        prop_assume!(!a.is_zero() && !b.is_zero() && c.degree().unwrap_or(0) > 0);
        let (ac, bc) = (a.mul(&c), b.mul(&c));
        let g = ac.gcd(&bc);
        prop_assert!(g.lead().is_one());
        prop_assert!(ac.div_rem(&g).unwrap().1.is_zero());
        prop_assert!(bc.div_rem(&g).unwrap().1.is_zero());
        prop_assert!(g.div_rem(&c).unwrap().1.is_zero());
    }

    #[test]
    fn embeddings_compose_to_kronecker(a in matrix(2, 2), b in matrix(3, 3)) {
        let space = LegSpace::new(vec![2, 3]).unwrap();
        let ea = embed(&a, &space, &[0]).unwrap();
        let eb = embed(&b, &space, &[1]).unwrap();
        let k = a.kron(&b);
        prop_assert_eq!(ea.checked_mul(&eb).unwrap(), k.clone());
        prop_assert_eq!(eb.checked_mul(&ea).unwrap(), k);
    }

    #[test]
    fn swap_squares_to_identity_and_exchanges_factors(a in matrix(2, 2), b in matrix(3, 3)) {
        let p: Mat<Rational> = swap(2, 3);
        let p_back: Mat<Rational> = swap(3, 2);
        prop_assert!(p_back.checked_mul(&p).unwrap().is_identity());
        let lhs = p.checked_mul(&a.kron(&b)).unwrap().checked_mul(&p_back).unwrap();
        prop_assert_eq!(lhs, b.kron(&a));
        let p3: Mat<Rational> = swap(3, 3);
        prop_assert!(p3.checked_mul(&p3).unwrap().is_identity());
    }

    #[test]
    fn truncated_products_report_only_exact_coefficients(f in prop::collection::vec(rat(), 1..7),
                                                         g in prop::collection::vec(rat(), 1..7),
                                                         nf in 0i64..5, ng in 0i64..5) {
        let series = |c: &[Rational], n: i64| {
            TruncSeries::ascending(0, n, c.iter().cloned().enumerate().map(|(k, x)| (k as i64, x)).filter(|(k, _)| *k <= n))
        };
        let exact = Poly::from_coeffs(f.clone()).mul(&Poly::from_coeffs(g.clone()));
        let prod = series(&f, nf).mul(&series(&g, ng)).unwrap();
        let (lo, hi) = prod.window();
        let mut known = 0;
        for k in lo..=hi {
            if let Some(c) = prod.get(k) {
                known += 1;
                let want = if k >= 0 { exact.coeff(k as usize) } else { Rational::zero() };
                prop_assert_eq!(c.cloned().unwrap_or_else(Rational::zero), want, "coefficient {}", k);
            }
        }
        prop_assert!(known as i64 > nf.min(ng));
    }

    #[test]
    fn expansion_times_denominator_is_numerator(n in poly(), d in nonzero_poly().prop_filter("regular at 0", |p| !p.coeff(0).is_zero())) {
        let f = Q::new(n.clone(), d.clone()).unwrap();
        let order = 6;
        let s = expand(&f, Direction::AroundZero, 0, order).unwrap();
        let den = TruncSeries::ascending(0, 12, d.coeffs().iter().cloned().enumerate().map(|(k, x)| (k as i64, x)));
        let back = s.mul(&den).unwrap();
        for k in 0..=order {
            let got = back.get(k).expect("known").cloned().unwrap_or_else(Rational::zero);
            prop_assert_eq!(got, n.coeff(k as usize));
        }
    }

    #[test]
    fn delta_coefficients_scale_along_diagonals(x in prop::collection::vec(rat(), 9), s in rat().prop_filter("nonzero", |s| !s.is_zero())) {
        let profile = TruncSeries::laurent(-4, 4, x.iter().cloned().enumerate().map(|(k, c)| (k as i64 - 4, c)));
        let mut comb: DeltaComb<Rational, Rational> = DeltaComb::new();
        comb.push(s.clone(), profile).unwrap();
        let cells: BTreeSet<(i64, i64)> = (-2..=2).flat_map(|a| (-2..=2).map(move |b| (a, b))).collect();
        let t = comb.pair(&cells).unwrap();
        let at = |a, b| t.get(a, b).unwrap().cloned().unwrap_or_else(Rational::zero);
        for a in -2..2 {
            for b in -1..=2 {
                prop_assert_eq!(at(a + 1, b - 1), s.mul(&at(a, b)));
            }
        }
    }

    #[test]
    fn canonical_text_parses_back(x in nested()) {
        let text = x.to_text(&["a", "q"]);
        prop_assert_eq!(parse_scalar::<Qa>(&text, &["a", "q"]).unwrap(), x);
    }
}
