//! Coefficient-window evaluation of two-variable operator identities.
//!
//! A side of a relation is a sum of terms `c z^α w^β X_1 X_2 ... X_r`, each
//! factor a one-variable matrix series in `z`, in `w`, or in the ratio
//! `u = z/w`. A coefficient of `z^i w^j` is reported only when every
//! exponent tuple that could contribute lies inside the known windows of
//! the factors and the set of such tuples is finite.

use std::collections::{BTreeMap, BTreeSet};
use std::time::Instant;

use crate::error::{EngineError, Result};
use crate::field::{Coeff, Field};
use crate::linalg::{embed_rect, Mat};
use crate::ratfunc::RatFunc;
use crate::report::{Mismatch, VerificationReport, Window};
use crate::series::{expand_matrix, BiSeries, Direction, Iv, TruncSeries};

/// Which monomial a factor's expansion variable stands for.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Var {
    Z,
    W,
    /// The ratio `z/w`.
    Ratio,
}

#[derive(Clone, Debug)]
pub struct Factor<'a, F: Field> {
    pub var: Var,
    pub series: &'a TruncSeries<Mat<F>>,
}

pub fn fz<F: Field>(s: &TruncSeries<Mat<F>>) -> Factor<'_, F> {
    Factor { var: Var::Z, series: s }
}

pub fn fw<F: Field>(s: &TruncSeries<Mat<F>>) -> Factor<'_, F> {
    Factor { var: Var::W, series: s }
}

pub fn fu<F: Field>(s: &TruncSeries<Mat<F>>) -> Factor<'_, F> {
    Factor { var: Var::Ratio, series: s }
}

#[derive(Clone, Debug)]
pub struct Term<'a, F: Field> {
    pub coeff: F,
    pub shift: (i64, i64),
    pub factors: Vec<Factor<'a, F>>,
}

impl<'a, F: Field> Term<'a, F> {
    pub fn new(factors: Vec<Factor<'a, F>>) -> Self {
        Term { coeff: F::one(), shift: (0, 0), factors }
    }

    pub fn scaled(mut self, c: F) -> Self {
        self.coeff = c;
        self
    }

    /// Multiply by the monomial `z^a w^b`.
    pub fn shifted(mut self, a: i64, b: i64) -> Self {
        self.shift = (a, b);
        self
    }
}

fn sum(ivs: impl Iterator<Item = Iv>) -> Iv {
    ivs.fold(Iv::point(0), |acc, x| acc.add(&x))
}

/// Whether the `z^i w^j` coefficient of the product is determined.
fn exact_at<F: Field>(factors: &[Factor<'_, F>], i: i64, j: i64) -> bool {
    let poss: Vec<Iv> = factors.iter().map(|f| f.series.possible()).collect();
    let of = |v: Var, skip: Option<usize>| {
        sum(factors
            .iter()
            .enumerate()
            .filter(|(k, f)| f.var == v && Some(*k) != skip)
            .map(|(k, _)| poss[k]))
    };
    let (sz, sw, su) = (of(Var::Z, None), of(Var::W, None), of(Var::Ratio, None));
    let mut feas = Vec::with_capacity(factors.len());
    for (t, f) in factors.iter().enumerate() {
        let rest = of(f.var, Some(t));
        let range = match f.var {
            Var::Z => {
                let u = su.intersect(&sw.shift(-j));
                Iv::point(i).add(&u.neg()).add(&rest.neg())
            }
            Var::W => {
                let u = su.intersect(&sz.neg().shift(i));
                Iv::point(j).add(&u).add(&rest.neg())
            }
            Var::Ratio => {
                let total = sz.neg().shift(i).intersect(&sw.shift(-j));
                total.add(&rest.neg())
            }
        };
        let fe = poss[t].intersect(&range);
        if fe.is_empty() {
            return true;
        }
        feas.push(fe);
    }
    feas.iter()
        .zip(factors)
        .all(|(fe, f)| fe.is_bounded() && f.series.known().contains(fe))
}

fn contribution(v: Var, k: i64) -> (i64, i64) {
    match v {
        Var::Z => (k, 0),
        Var::W => (0, k),
        Var::Ratio => (k, -k),
    }
}

fn reach(f: &Factor<'_, impl Field>) -> (Iv, Iv) {
    let (lo, hi) = f.series.window();
    match f.var {
        Var::Z => (Iv::new(lo, hi), Iv::point(0)),
        Var::W => (Iv::point(0), Iv::new(lo, hi)),
        Var::Ratio => (Iv::new(lo, hi), Iv::new(-hi, -lo)),
    }
}

/// Evaluate one term on the given cells. Returns the cells that are exact
/// and the coefficients there.
pub fn eval_term<F: Field>(term: &Term<'_, F>, cells: &BTreeSet<(i64, i64)>) -> BiSeries<Mat<F>> {
    let (sa, sb) = term.shift;
    let targets: BTreeSet<(i64, i64)> = cells
        .iter()
        .filter(|&&(a, b)| exact_at(&term.factors, a - sa, b - sb))
        .copied()
        .collect();
    if targets.is_empty() || term.coeff.is_zero() || term.factors.is_empty() {
        return BiSeries::zero_on(targets);
    }
    let zr = Iv::new(
        targets.iter().map(|c| c.0 - sa).min().unwrap(),
        targets.iter().map(|c| c.0 - sa).max().unwrap(),
    );
    let wr = Iv::new(
        targets.iter().map(|c| c.1 - sb).min().unwrap(),
        targets.iter().map(|c| c.1 - sb).max().unwrap(),
    );
    let nf = term.factors.len();
    // suffix reach[t] = what factors t.. can still add
    let mut suffix = vec![(Iv::point(0), Iv::point(0)); nf + 1];
    for t in (0..nf).rev() {
        let (a, b) = reach(&term.factors[t]);
        suffix[t] = (suffix[t + 1].0.add(&a), suffix[t + 1].1.add(&b));
    }
    let alive = |z: i64, w: i64, t: usize| {
        !zr.intersect(&suffix[t].0.shift(z)).is_empty() && !wr.intersect(&suffix[t].1.shift(w)).is_empty()
    };
    let mut states: BTreeMap<(i64, i64), Mat<F>> = BTreeMap::new();
    let f0 = &term.factors[0];
    for (k, c) in f0.series.terms() {
        let (dz, dw) = contribution(f0.var, k);
        if alive(dz, dw, 1) {
            states.insert((dz, dw), c.clone());
        }
    }
    for t in 1..nf {
        let f = &term.factors[t];
        let mut next: BTreeMap<(i64, i64), Mat<F>> = BTreeMap::new();
        for ((z, w), acc) in &states {
            for (k, c) in f.series.terms() {
                let (dz, dw) = contribution(f.var, k);
                let key = (z + dz, w + dw);
                if !alive(key.0, key.1, t + 1) {
                    continue;
                }
                let p = acc.mul(c);
                match next.get_mut(&key) {
                    Some(e) => *e = e.add(&p),
                    None => {
                        next.insert(key, p);
                    }
                }
            }
        }
        states = next;
    }
    let coeffs: Vec<_> = targets
        .iter()
        .filter_map(|&(a, b)| states.get(&(a - sa, b - sb)).map(|m| ((a, b), m.scale(&term.coeff))))
        .collect();
    BiSeries::new(targets, coeffs)
}

/// Sum of terms, known where every term is.
pub fn eval_side<F: Field>(terms: &[Term<'_, F>], cells: &BTreeSet<(i64, i64)>) -> BiSeries<Mat<F>> {
    let mut acc: Option<BiSeries<Mat<F>>> = None;
    for t in terms {
        let v = eval_term(t, cells);
        acc = Some(match acc {
            Some(a) => a.add(&v),
            None => v,
        });
    }
    acc.unwrap_or_else(|| BiSeries::zero_on(cells.clone()))
}

/// Compare two coefficient tables and produce a report.
pub fn compare_tables<F: Field>(
    id: impl Into<String>,
    anchor: impl Into<String>,
    lhs: &BiSeries<Mat<F>>,
    rhs: &BiSeries<Mat<F>>,
    names: &[&str],
    start: Instant,
) -> Result<VerificationReport> {
    let id = id.into();
    let cmp = lhs.compare(rhs);
    if cmp.cells == 0 {
        return Err(EngineError::WindowUnderflow(format!("{id}: no coefficient could be compared")));
    }
    let mismatch = cmp.first_mismatch.map(|((a, b), l, r)| locate(a, b, l.as_ref(), r.as_ref(), names));
    let report = VerificationReport::from_outcome(
        id,
        anchor,
        Some(Window::from_bounding(cmp.cells, cmp.bounding)),
        mismatch,
        start,
    );
    let cells = lhs.known_cells().intersection(rhs.known_cells()).copied().collect();
    if lhs.restrict(&cells).is_zero() && rhs.restrict(&cells).is_zero() {
        return Ok(report.with_note("both sides vanish on the window"));
    }
    Ok(report)
}

fn locate<F: Field>(a: i64, b: i64, got: Option<&Mat<F>>, exp: Option<&Mat<F>>, names: &[&str]) -> Mismatch {
    let shape = got.or(exp).map(|m| m.shape()).unwrap_or((0, 0));
    let zero = Mat::zeros(shape.0, shape.1);
    let g = got.unwrap_or(&zero);
    let e = exp.unwrap_or(&zero);
    let (r, c) = g
        .entries()
        .zip(e.entries())
        .find(|(x, y)| x.2 != y.2)
        .map(|(x, _)| (x.0, x.1))
        .unwrap_or((0, 0));
    Mismatch {
        indices: vec![a, b, r as i64, c as i64],
        expected: e.get(r, c).to_text(names),
        got: g.get(r, c).to_text(names),
    }
}

/// Check `Σ lhs = Σ rhs` coefficientwise on `cells`.
pub fn check_relation<F: Field>(
    id: impl Into<String>,
    anchor: impl Into<String>,
    lhs: &[Term<'_, F>],
    rhs: &[Term<'_, F>],
    cells: &BTreeSet<(i64, i64)>,
    names: &[&str],
) -> Result<VerificationReport> {
    let start = Instant::now();
    let l = eval_side(lhs, cells);
    let r = eval_side(rhs, cells);
    compare_tables(id, anchor, &l, &r, names, start)
}

/// Embed every coefficient of a matrix series.
pub fn embed_series<F: Field>(
    s: &TruncSeries<Mat<F>>,
    in_dims: &[usize],
    out_dims: &[usize],
    legs: &[usize],
) -> Result<TruncSeries<Mat<F>>> {
    s.try_map(|m| embed_rect(m, in_dims, out_dims, legs))
}

/// Expand a rational matrix in `u = z/w` wide enough for windows of size
/// `order`.
pub fn ratio_series<F: Field>(
    m: &Mat<RatFunc<F>>,
    direction: Direction,
    order: i64,
) -> Result<TruncSeries<Mat<F>>> {
    let width = 4 * order + 4;
    expand_matrix(m, direction, -width, width)
}

/// The exponent rectangle `[-order, order]^2`.
pub fn square(order: i64) -> BTreeSet<(i64, i64)> {
    BiSeries::<Mat<crate::field::Rational>>::rectangle(-order, order, -order, order)
}
