use criterion::{criterion_group, criterion_main, BatchSize, Criterion};
use qgauss_core::gauss::{partial_decompose, series_of, Sign};
use qgauss_core::loperator::{build_evaluation_pair, EvalParams};
use qgauss_core::rmatrix::check_ybe;
use qgauss_core::series::expand;
use qgauss_core::{Coeff, Convention, Direction, Field, Mat, Poly, RMatrix, RatFunc, Rational, ScalarQ};

type Qa = RatFunc<ScalarQ>;

fn q() -> ScalarQ {
    ScalarQ::var()
}

fn scalar(c: &mut Criterion) {
    let x = q().mul(&q()).sub(&ScalarQ::from_int(3)).div(&q().add(&ScalarQ::from_int(2))).unwrap();
    let y = q().sub(&ScalarQ::one()).div(&q().mul(&q()).add(&ScalarQ::from_int(5))).unwrap();
    c.bench_function("ratfunc_q/add_mul", |b| b.iter(|| x.add(&y).mul(&x.sub(&y))));

    // polynomials in w over Q(q) sharing a factor, the shape that dominates
    // the current computations
    let w = |k: i64| Poly::from_coeffs(vec![q().mul(&ScalarQ::from_int(k)), ScalarQ::one()]);
    let shared = w(1).mul(&w(-2));
    let a = shared.mul(&w(3)).mul(&w(5));
    let bb = shared.mul(&w(-7)).mul(&w(4));
    c.bench_function("poly_over_q/gcd_deg4", |b| b.iter(|| a.gcd(&bb)));

    let big = Qa::var().mul(&Qa::constant(q())).sub(&Qa::one());
    let other = Qa::var().add(&Qa::constant(q().mul(&q())));
    c.bench_function("ratfunc_aq/div", |b| b.iter(|| big.div(&other).unwrap()));
}

fn linear_algebra(c: &mut Criterion) {
    let m = Mat::from_fn(8, 8, |i, j| Rational::new(((i * 7 + j * 3) % 11) as i64 - 5, 1 + (i + j) as i64 % 3));
    let m = m.checked_mul(&m.transpose()).unwrap();
    c.bench_function("mat_q/inverse_8x8", |b| b.iter(|| m.inverse().unwrap()));

    let r = RMatrix::build(2, Convention::Corrected, q()).unwrap();
    c.bench_function("mat_qz/inverse_R_n2", |b| b.iter(|| r.value.inverse().unwrap()));
}

fn series(c: &mut Criterion) {
    let r = RMatrix::build(2, Convention::Corrected, q()).unwrap();
    let f = r.value.get(1, 1).clone();
    c.bench_function("series/expand_order16", |b| b.iter(|| expand(&f, Direction::AroundZero, 0, 16).unwrap()));
}

fn pipeline(c: &mut Criterion) {
    c.bench_function("rmatrix/build_n3", |b| b.iter(|| RMatrix::build(3, Convention::Corrected, q()).unwrap()));
    let r2 = RMatrix::build(2, Convention::Corrected, q()).unwrap();
    c.bench_function("rmatrix/ybe_n2", |b| b.iter(|| check_ybe(&r2, &["q"]).unwrap()));

    let r3 = RMatrix::build(3, Convention::Corrected, Qa::constant(q())).unwrap();
    let lp = build_evaluation_pair(&EvalParams::new(3, Qa::var(), 4).unwrap(), &r3).unwrap();
    let size = lp.n * lp.dim;
    c.bench_function("gauss/partial_n3_order4", |b| {
        b.iter_batched(
            || series_of(&lp.lplus, size, Sign::Plus),
            |l| partial_decompose(&l, lp.n, lp.dim, Sign::Plus).unwrap(),
            BatchSize::SmallInput,
        )
    });
}

criterion_group!(benches, scalar, linear_algebra, series, pipeline);
criterion_main!(benches);
