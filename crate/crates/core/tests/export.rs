use qgauss_core::export::*;
use qgauss_core::gauss::*;
use qgauss_core::loperator::*;
use qgauss_core::{Convention, RMatrix, RatFunc, Rational};

type F = RatFunc<Rational>;

fn pair(n: usize) -> LPair<F> {
    let r = RMatrix::build(n, Convention::Corrected, F::constant(Rational::new(3, 2))).unwrap();
    build_evaluation_pair(&EvalParams::new(n, F::var(), 4).unwrap(), &r).unwrap()
}

#[test]
fn lpair_round_trip_through_json() {
    for n in 1..=3 {
        let lp = pair(n);
        let text = serde_json::to_string(&export_lpair(&lp, &["a"])).unwrap();
        let back: LPairJson = serde_json::from_str(&text).unwrap();
        assert_eq!(import_lpair::<F>(&back).unwrap(), lp, "n={n}");
    }
}

#[test]
fn gauss_round_trip_through_json() {
    let lp = pair(2);
    let size = 2 * lp.dim;
    let fac = partial_decompose(&series_of(&lp.lminus, size, Sign::Minus), 2, lp.dim, Sign::Minus).unwrap();
    let j = export_gauss(&fac, &["a"]);
    assert_eq!(j.blocks.keys().cloned().collect::<Vec<_>>(), ["K", "e", "f", "k"]);
    let text = serde_json::to_string_pretty(&j).unwrap();
    let back = import_gauss::<F>(&serde_json::from_str(&text).unwrap()).unwrap();
    assert_eq!(back.recompose().unwrap().s, fac.recompose().unwrap().s);
    assert_eq!(back.e.s, fac.e.s);
}

#[test]
fn table_keys_and_text() {
    let lp = pair(2);
    let t = export_lpair(&lp, &["a"]);
    assert_eq!(t.lplus.window, [0, 4]);
    assert!(t.lplus.zero_below);
    // keys are sorted and unique
    let keys: Vec<_> = t.lplus.entries.iter().map(|e| (e.i, e.j, e.exponent)).collect();
    let mut sorted = keys.clone();
    sorted.sort();
    sorted.dedup();
    assert_eq!(keys, sorted);
    assert!(t.lplus.entries.iter().any(|e| e.value.contains('a')));
}

#[test]
fn malformed_tables_are_rejected() {
    let mut t = export_lpair(&pair(2), &["a"]);
    t.lplus.entries[0].value = "a +".into();
    assert!(import_lpair::<F>(&t).is_err());
    let mut t = export_lpair(&pair(2), &["a"]);
    t.lplus.entries[0].i = 99;
    assert!(import_lpair::<F>(&t).is_err());
}
