use qgauss_core::currents::*;
use qgauss_core::gauss::*;
use qgauss_core::loperator::*;
use qgauss_core::rmatrix::RMatrix;
use qgauss_core::{Coeff, Convention, Field, RatFunc, Rational, VerificationReport};

type F = RatFunc<Rational>;

fn q() -> F {
    F::constant(Rational::new(3, 2))
}

fn currents_of(lp: &LPair<F>, order: i64) -> CurrentSet<F> {
    let (n, size) = (lp.n, lp.n * lp.dim);
    let fp = partial_decompose(&series_of(&lp.lplus, size, Sign::Plus), n, lp.dim, Sign::Plus).unwrap();
    let fm = partial_decompose(&series_of(&lp.lminus, size, Sign::Minus), n, lp.dim, Sign::Minus).unwrap();
    extract_currents(&fp, &fm, order).unwrap()
}

fn single(n: usize, order: i64) -> (LPair<F>, RMatrix<F>) {
    let r = RMatrix::build(n, Convention::Corrected, q()).unwrap();
    let lp = build_evaluation_pair(&EvalParams::new(n, F::var(), order).unwrap(), &r).unwrap();
    (lp, r)
}

fn two_site(n: usize, order: i64) -> (LPair<F>, RMatrix<F>) {
    let (l1, r) = single(n, order);
    let a2 = F::var().mul(&F::constant(Rational::new(5, 2)));
    let l2 = build_evaluation_pair(&EvalParams::new(n, a2, order).unwrap(), &r).unwrap();
    (coproduct_pair(&l1, &l2).unwrap(), r)
}

fn assert_all(reports: &[VerificationReport]) {
    for r in reports {
        println!("{} ({:.2}s)", r.summary_line(), r.wall_time);
    }
    let failed: Vec<_> = reports.iter().filter(|r| !r.passed()).map(|r| r.check_id.clone()).collect();
    assert!(failed.is_empty(), "failed: {failed:?}");
}

fn lemma_suite(lp: &LPair<F>, r: &RMatrix<F>, order: i64) -> Vec<VerificationReport> {
    let cs = currents_of(lp, order);
    let rbar = r.restrict_rbar().unwrap();
    let mut all = check_subalgebra(&cs, &rbar, &["a"]).unwrap();
    all.extend(check_lemma(&cs, &rbar, &["a"]).unwrap());
    all
}

#[test]
fn lemma_single_site() {
    for (n, order) in [(2, 6), (3, 4)] {
        let (lp, r) = single(n, order);
        let all = lemma_suite(&lp, &r, order);
        assert_all(&all);
        // one evaluation module: two E's or two F's always annihilate
        let ee = all.iter().find(|x| x.check_id == format!("lemma.EE.n{n}")).unwrap();
        assert!(ee.notes.iter().any(|s| s.contains("both sides vanish")));
    }
}

#[test]
fn lemma_two_sites() {
    for (n, order) in [(2, 6), (3, 4)] {
        let (lp, r) = two_site(n, order);
        let all = lemma_suite(&lp, &r, order);
        assert_all(&all);
        let ee = all.iter().find(|x| x.check_id == format!("lemma.EE.n{n}")).unwrap();
        assert!(!ee.notes.iter().any(|s| s.contains("both sides vanish")));
    }
}

#[test]
fn printed_lemma_forms_are_reported() {
    let (lp, r) = two_site(2, 4);
    let all = lemma_suite(&lp, &r, 4);
    let mixed = all.iter().find(|x| x.check_id == "lemma.kk.mixed.n2").unwrap();
    assert!(mixed.passed());
    assert!(mixed.notes.iter().any(|s| s.contains("printed")));
}

#[test]
fn zf_relations() {
    for (n, order) in [(2, 6), (3, 4)] {
        let (lp, r) = two_site(n, order);
        let cs = currents_of(&lp, order);
        let rbar = r.restrict_rbar().unwrap();
        let zd = build_zf(&lp.rational, n, lp.dim, order).unwrap();
        assert!(zd.bar_e_rat.entries().all(|x| x.2.is_zero()));
        assert!(zd.bar_f_rat.entries().all(|x| x.2.is_zero()));
        let mut all = vec![check_zf_coherence(&cs, &zd, &["a"]).unwrap()];
        all.extend(check_zf(&cs, &zd, &rbar, &["a"]).unwrap());
        assert_all(&all);
        if n == 2 {
            let d1 = all.iter().find(|x| x.check_id == "zf.display1.n2").unwrap();
            assert!(d1.notes.iter().any(|s| s.contains("printed form with E") && s.contains("fail")));
        }
    }
}

#[test]
fn ef_relation_detects_missing_current() {
    let (lp, r) = two_site(2, 4);
    let mut cs = currents_of(&lp, 4);
    cs.e = cs.e.map(|x| x.scale(&F::zero()));
    let rep = check_ef_delta(&cs, &r.restrict_rbar().unwrap(), &["a"]).unwrap();
    assert!(!rep.passed());
}
