use qgauss_core::loperator::*;
use qgauss_core::rmatrix::RMatrix;
use qgauss_core::{Convention, Field, RatFunc, Rational};

fn q() -> Rational {
    Rational::new(3, 2)
}

fn summary(reports: &[qgauss_core::VerificationReport]) {
    for r in reports {
        println!("{}", r.summary_line());
    }
}

#[test]
fn numeric_rll_and_inverse() {
    for (n, order) in [(1, 3), (2, 6), (3, 4)] {
        let r = RMatrix::build(n, Convention::Corrected, q()).unwrap();
        let p = EvalParams::new(n, Rational::from_int(2), order).unwrap();
        let lp = build_evaluation_pair(&p, &r).unwrap();
        assert!(!lp.transposed);
        let t = std::time::Instant::now();
        let d = check_defining_relations(&lp, &r, &[]).unwrap();
        summary(&d);
        let i = check_inverse_relations(&lp, &r, &[]).unwrap();
        summary(&i);
        println!("n={n}: {:?}", t.elapsed());
        assert!(d.iter().chain(&i).all(|r| r.passed()));
    }
}

#[test]
fn symbolic_a_rll() {
    type F = RatFunc<Rational>;
    for (n, order) in [(2, 6), (3, 4)] {
        let r = RMatrix::build(n, Convention::Corrected, F::constant(q())).unwrap();
        let p = EvalParams::new(n, F::var(), order).unwrap();
        let lp = build_evaluation_pair(&p, &r).unwrap();
        let t = std::time::Instant::now();
        let d = check_defining_relations(&lp, &r, &["a"]).unwrap();
        summary(&d);
        println!("n={n}: {:?}", t.elapsed());
        assert!(d.iter().all(|r| r.passed()));
    }
}
