use qgauss_core::gauss::*;
use qgauss_core::loperator::*;
use qgauss_core::rmatrix::RMatrix;
use qgauss_core::{Convention, RatFunc, Rational};

type F = RatFunc<Rational>;

fn pair(n: usize, order: i64) -> LPair<F> {
    let q = F::constant(Rational::new(3, 2));
    let r = RMatrix::build(n, Convention::Corrected, q).unwrap();
    build_evaluation_pair(&EvalParams::new(n, F::var(), order).unwrap(), &r).unwrap()
}

#[test]
fn evaluation_decompositions() {
    for (n, order) in [(2, 6), (3, 4)] {
        let lp = pair(n, order);
        let size = n * lp.dim;
        let t = std::time::Instant::now();
        for (s, sign) in [(&lp.lplus, Sign::Plus), (&lp.lminus, Sign::Minus)] {
            let l = series_of(s, size, sign);
            let fac = partial_decompose(&l, n, lp.dim, sign).unwrap();
            let reports = [
                check_recompose(&l, &fac, n, &["a"]).unwrap(),
                verify_uniqueness(&l, &fac, n, lp.dim, &["a"]).unwrap(),
                check_full(&l, n, lp.dim, sign, &["a"]).unwrap(),
                check_inverse_blocks(&l, &fac, n, &["a"]).unwrap(),
            ];
            for r in &reports {
                println!("{}", r.summary_line());
                assert!(r.passed());
            }
        }
        let rat = &lp.rational;
        let fac = partial_decompose(rat, n, lp.dim, Sign::Plus).unwrap();
        let r = check_recompose(rat, &fac, n, &["a"]).unwrap();
        println!("{}", r.summary_line());
        assert!(r.passed());
        for r in check_antipode(&lp, &["a"]).unwrap() {
            println!("{}", r.summary_line());
            assert!(r.passed());
        }
        println!("n={n}: {:?}", t.elapsed());
    }
}
