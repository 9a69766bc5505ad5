//! Truncated Laurent series with explicit validity windows, two-variable
//! coefficient tables, and finite combinations of formal delta functions.
//!
//! A [`TruncSeries`] stores the coefficients on its window `[lo, hi]`. The
//! flags `zero_below` / `zero_above` assert that every coefficient outside
//! the window on that side is exactly zero; without the flag those
//! coefficients are unknown. Operations only ever report coefficients they
//! can prove from their inputs.

use std::collections::{BTreeMap, BTreeSet};

use crate::error::{EngineError, Result};
use crate::field::{Coeff, Field};
use crate::linalg::Mat;
use crate::ratfunc::RatFunc;

/// Stand-in for an unbounded end of an exponent interval.
pub const INF: i64 = 1 << 50;

/// Closed integer interval, empty when `lo > hi`; ends at `±INF` are
/// unbounded.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Iv {
    pub lo: i64,
    pub hi: i64,
}

impl Iv {
    pub const ALL: Iv = Iv { lo: -INF, hi: INF };

    pub fn new(lo: i64, hi: i64) -> Self {
        Iv { lo, hi }
    }

    pub fn point(k: i64) -> Self {
        Iv { lo: k, hi: k }
    }

    pub fn is_empty(&self) -> bool {
        self.lo > self.hi
    }

    pub fn is_bounded(&self) -> bool {
        self.lo > -INF && self.hi < INF
    }

    fn clamp(x: i64) -> i64 {
        x.clamp(-INF, INF)
    }

    pub fn add(&self, o: &Iv) -> Iv {
        if self.is_empty() || o.is_empty() {
            return Iv::new(1, 0);
        }
        Iv { lo: Self::clamp(self.lo + o.lo), hi: Self::clamp(self.hi + o.hi) }
    }

    pub fn neg(&self) -> Iv {
        Iv { lo: -self.hi, hi: -self.lo }
    }

    pub fn shift(&self, k: i64) -> Iv {
        self.add(&Iv::point(k))
    }

    pub fn intersect(&self, o: &Iv) -> Iv {
        Iv { lo: self.lo.max(o.lo), hi: self.hi.min(o.hi) }
    }

    pub fn contains(&self, o: &Iv) -> bool {
        o.is_empty() || (self.lo <= o.lo && o.hi <= self.hi)
    }
}

/// Direction of a series expansion of a rational function.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    AroundZero,
    AroundInfinity,
}

impl Direction {
    pub fn name(self) -> &'static str {
        match self {
            Direction::AroundZero => "around_zero",
            Direction::AroundInfinity => "around_infinity",
        }
    }
}

/// Ring elements that can be scaled by field elements.
pub trait Module<F: Field>: Coeff {
    fn scale_by(&self, c: &F) -> Self;
}

impl<F: Field> Module<F> for F {
    fn scale_by(&self, c: &F) -> Self {
        self.mul(c)
    }
}

impl<F: Field> Module<F> for Mat<F> {
    fn scale_by(&self, c: &F) -> Self {
        self.scale(c)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct TruncSeries<C> {
    lo: i64,
    hi: i64,
    zero_below: bool,
    zero_above: bool,
    coeffs: BTreeMap<i64, C>,
}

impl<C: Coeff> TruncSeries<C> {
    pub fn new(
        lo: i64,
        hi: i64,
        zero_below: bool,
        zero_above: bool,
        coeffs: impl IntoIterator<Item = (i64, C)>,
    ) -> Self {
        let coeffs = coeffs
            .into_iter()
            .filter(|(k, c)| !c.is_zero() && *k >= lo && *k <= hi)
            .collect();
        TruncSeries { lo, hi, zero_below, zero_above, coeffs }
    }

    /// One-sided series in ascending powers: nothing below `lo`.
    pub fn ascending(lo: i64, hi: i64, coeffs: impl IntoIterator<Item = (i64, C)>) -> Self {
        Self::new(lo, hi, true, false, coeffs)
    }

    /// One-sided series in descending powers: nothing above `hi`.
    pub fn descending(lo: i64, hi: i64, coeffs: impl IntoIterator<Item = (i64, C)>) -> Self {
        Self::new(lo, hi, false, true, coeffs)
    }

    /// Exact Laurent polynomial supported in `[lo, hi]`.
    pub fn laurent(lo: i64, hi: i64, coeffs: impl IntoIterator<Item = (i64, C)>) -> Self {
        Self::new(lo, hi, true, true, coeffs)
    }

    /// Series known only on its window.
    pub fn two_sided(lo: i64, hi: i64, coeffs: impl IntoIterator<Item = (i64, C)>) -> Self {
        Self::new(lo, hi, false, false, coeffs)
    }

    pub fn lo(&self) -> i64 {
        self.lo
    }

    pub fn hi(&self) -> i64 {
        self.hi
    }

    pub fn window(&self) -> (i64, i64) {
        (self.lo, self.hi)
    }

    pub fn zero_below(&self) -> bool {
        self.zero_below
    }

    pub fn zero_above(&self) -> bool {
        self.zero_above
    }

    pub fn is_laurent(&self) -> bool {
        self.zero_below && self.zero_above
    }

    /// Stored nonzero coefficients.
    pub fn terms(&self) -> impl Iterator<Item = (i64, &C)> {
        self.coeffs.iter().map(|(k, c)| (*k, c))
    }

    /// Exponents at which coefficients are known.
    pub fn known(&self) -> Iv {
        Iv {
            lo: if self.zero_below { -INF } else { self.lo },
            hi: if self.zero_above { INF } else { self.hi },
        }
    }

    /// Exponents at which coefficients may be nonzero: the stored support
    /// widened by the unknown regions.
    pub fn possible(&self) -> Iv {
        let first = self.coeffs.keys().next().copied();
        let last = self.coeffs.keys().next_back().copied();
        Iv {
            lo: if self.zero_below { first.unwrap_or(self.hi + 1) } else { -INF },
            hi: if self.zero_above { last.unwrap_or(self.lo - 1) } else { INF },
        }
    }

    /// `None` if unknown, `Some(None)` if exactly zero.
    pub fn get(&self, k: i64) -> Option<Option<&C>> {
        let kn = self.known();
        if k < kn.lo || k > kn.hi {
            return None;
        }
        Some(self.coeffs.get(&k))
    }

    pub fn is_known(&self, k: i64) -> bool {
        self.get(k).is_some()
    }

    pub fn map<D: Coeff>(&self, f: impl Fn(&C) -> D) -> TruncSeries<D> {
        TruncSeries::new(
            self.lo,
            self.hi,
            self.zero_below,
            self.zero_above,
            self.coeffs.iter().map(|(k, c)| (*k, f(c))),
        )
    }

    pub fn try_map<D: Coeff>(&self, f: impl Fn(&C) -> Result<D>) -> Result<TruncSeries<D>> {
        let v = self
            .coeffs
            .iter()
            .map(|(k, c)| Ok((*k, f(c)?)))
            .collect::<Result<Vec<_>>>()?;
        Ok(TruncSeries::new(self.lo, self.hi, self.zero_below, self.zero_above, v))
    }

    /// Restrict the window; flags are dropped on sides that shrink.
    pub fn restrict(&self, lo: i64, hi: i64) -> Self {
        let kn = self.known();
        let (lo, hi) = (lo.max(kn.lo), hi.min(kn.hi));
        TruncSeries::new(
            lo,
            hi,
            self.zero_below && lo <= self.lo,
            self.zero_above && hi >= self.hi,
            self.coeffs.iter().map(|(k, c)| (*k, c.clone())),
        )
    }

    /// Replace a single coefficient (which must lie in the window).
    pub fn with_coeff(&self, k: i64, c: C) -> Self {
        assert!(k >= self.lo && k <= self.hi, "coefficient outside window");
        let mut s = self.clone();
        if c.is_zero() {
            s.coeffs.remove(&k);
        } else {
            s.coeffs.insert(k, c);
        }
        s
    }

    fn combine(&self, o: &Self, f: impl Fn(Option<&C>, Option<&C>) -> Option<C>) -> Self {
        let kn = self.known().intersect(&o.known());
        let zero_below = kn.lo == -INF;
        let zero_above = kn.hi == INF;
        let lo = if zero_below { self.lo.min(o.lo) } else { kn.lo };
        let hi = if zero_above { self.hi.max(o.hi) } else { kn.hi };
        let keys: BTreeSet<i64> = self.coeffs.keys().chain(o.coeffs.keys()).copied().collect();
        let coeffs = keys
            .into_iter()
            .filter(|k| *k >= lo && *k <= hi)
            .filter_map(|k| f(self.coeffs.get(&k), o.coeffs.get(&k)).map(|c| (k, c)))
            .collect::<Vec<_>>();
        TruncSeries::new(lo, hi, zero_below, zero_above, coeffs)
    }

    /// Sum; the result is known where both operands are.
    pub fn add(&self, o: &Self) -> Self {
        self.combine(o, |a, b| match (a, b) {
            (Some(a), Some(b)) => Some(a.add(b)),
            (Some(a), None) => Some(a.clone()),
            (None, Some(b)) => Some(b.clone()),
            (None, None) => None,
        })
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.combine(o, |a, b| match (a, b) {
            (Some(a), Some(b)) => Some(a.sub(b)),
            (Some(a), None) => Some(a.clone()),
            (None, Some(b)) => Some(b.neg()),
            (None, None) => None,
        })
    }

    pub fn neg(&self) -> Self {
        self.map(|c| c.neg())
    }

    /// Whether coefficient `k` of `self * o` is determined by the inputs.
    fn product_exact_at(&self, o: &Self, k: i64) -> bool {
        let feasible = self.possible().intersect(&o.possible().neg().shift(k));
        if feasible.is_empty() {
            return true;
        }
        feasible.is_bounded()
            && self.known().contains(&feasible)
            && o.known().contains(&feasible.neg().shift(k))
    }

    /// Cauchy product. The window is the largest interval on which every
    /// contributing coefficient is guaranteed by the inputs; the order of
    /// the factors is preserved for noncommutative coefficients.
    pub fn mul(&self, o: &Self) -> Result<Self> {
        let scan_lo = self.lo + o.lo;
        let scan_hi = self.hi + o.hi;
        let exact: Vec<i64> = (scan_lo..=scan_hi).filter(|&k| self.product_exact_at(o, k)).collect();
        let zb = self.zero_below && o.zero_below;
        let za = self.zero_above && o.zero_above;
        if exact.is_empty() {
            if scan_lo > scan_hi && zb && za {
                return Ok(TruncSeries::laurent(0, -1, std::iter::empty()));
            }
            return Err(EngineError::WindowUnderflow("empty product window".into()));
        }
        // longest contiguous run of exact exponents
        let (mut best, mut start) = ((exact[0], exact[0]), exact[0]);
        for w in exact.windows(2) {
            if w[1] != w[0] + 1 {
                start = w[1];
            }
            if w[1] - start > best.1 - best.0 {
                best = (start, w[1]);
            }
        }
        let (lo, hi) = best;
        let mut acc: BTreeMap<i64, C> = BTreeMap::new();
        for (i, a) in &self.coeffs {
            for (j, b) in &o.coeffs {
                let k = i + j;
                if k < lo || k > hi {
                    continue;
                }
                let p = a.mul(b);
                match acc.get_mut(&k) {
                    Some(e) => *e = e.add(&p),
                    None => {
                        acc.insert(k, p);
                    }
                }
            }
        }
        Ok(TruncSeries::new(lo, hi, zb && lo == scan_lo, za && hi == scan_hi, acc))
    }
}

impl<F: Field> TruncSeries<Mat<F>> {
    /// Inverse of a one-sided matrix series; ascending unless the series
    /// is only known to vanish above its window.
    pub fn inverse(&self) -> Result<Self> {
        if self.zero_below {
            self.inverse_in(Direction::AroundZero)
        } else {
            self.inverse_in(Direction::AroundInfinity)
        }
    }

    /// Inverse by recursion on the leading coefficient: the lowest nonzero
    /// exponent around zero, the highest around infinity.
    pub fn inverse_in(&self, direction: Direction) -> Result<Self> {
        let ascending = direction == Direction::AroundZero;
        if (ascending && !self.zero_below) || (!ascending && !self.zero_above) {
            return Err(EngineError::WindowUnderflow(format!(
                "series has no leading coefficient {}",
                direction.name()
            )));
        }
        let lead_k = if ascending {
            self.coeffs.keys().next().copied()
        } else {
            self.coeffs.keys().next_back().copied()
        }
        .ok_or_else(|| EngineError::SingularLeadingTerm("series vanishes on its window".into()))?;
        let (lo, hi) = if ascending { (lead_k, self.hi) } else { (self.lo, lead_k) };
        let lead = self
            .coeffs
            .get(&lead_k)
            .ok_or_else(|| EngineError::SingularLeadingTerm(format!("zero coefficient at exponent {lead_k}")))?;
        let lead_inv = lead
            .inverse()
            .map_err(|_| EngineError::SingularLeadingTerm(format!("exponent {lead_k}")))?;
        let n = lead.rows();
        let len = (hi - lo) as usize;
        // index t counts steps away from the leading exponent
        let coeff_at = |t: usize| -> Option<&Mat<F>> {
            let k = if ascending { lo + t as i64 } else { hi - t as i64 };
            self.coeffs.get(&k)
        };
        let mut out: Vec<Mat<F>> = Vec::with_capacity(len + 1);
        out.push(lead_inv.clone());
        for t in 1..=len {
            let mut acc = Mat::zeros(n, n);
            for s in 1..=t {
                if let Some(a) = coeff_at(s) {
                    acc = acc.add(&a.mul(&out[t - s]));
                }
            }
            out.push(lead_inv.mul(&acc).neg());
        }
        let terms = out.into_iter().enumerate().map(|(t, m)| {
            let k = if ascending { -lo + t as i64 } else { -hi - t as i64 };
            (k, m)
        });
        if ascending {
            Ok(TruncSeries::ascending(-lo, -lo + len as i64, terms))
        } else {
            Ok(TruncSeries::descending(-hi - len as i64, -hi, terms))
        }
    }
}

/// Expand a rational function in `z` as a Laurent series around `0` or
/// `∞`, returning exactly the coefficients of `z^k` for `lo <= k <= hi`.
pub fn expand<F: Field>(
    f: &RatFunc<F>,
    direction: Direction,
    lo: i64,
    hi: i64,
) -> Result<TruncSeries<F>> {
    match direction {
        Direction::AroundZero => expand_at_zero(f, lo, hi),
        Direction::AroundInfinity => {
            let g = f.invert_variable();
            let s = expand_at_zero(&g, -hi, -lo)?;
            Ok(TruncSeries::new(
                lo,
                hi,
                s.zero_above,
                s.zero_below,
                s.coeffs.into_iter().map(|(k, c)| (-k, c)),
            ))
        }
    }
}

fn expand_at_zero<F: Field>(f: &RatFunc<F>, lo: i64, hi: i64) -> Result<TruncSeries<F>> {
    if f.is_zero() {
        return Ok(TruncSeries::laurent(lo, hi, std::iter::empty()));
    }
    let vn = f.num().valuation().unwrap();
    let vd = f.den().valuation().unwrap();
    let num = f.num().unshift(vn);
    let den = f.den().unshift(vd);
    let v = vn as i64 - vd as i64;
    let d0 = den.coeff(0);
    let d0_inv = d0
        .inv()
        .map_err(|_| EngineError::PoleAtExpansionPoint("denominator vanishes at 0".into()))?;
    let laurent = den.is_constant();
    let top = hi - v;
    let mut c: Vec<F> = Vec::new();
    if top >= 0 {
        for k in 0..=top as usize {
            let mut acc = num.coeff(k);
            for j in 1..=k.min(den.degree().unwrap_or(0)) {
                let dj = den.coeff(j);
                if !dj.is_zero() {
                    acc = acc.sub(&dj.mul(&c[k - j]));
                }
            }
            c.push(acc.mul(&d0_inv));
        }
    }
    let terms = c.into_iter().enumerate().map(|(k, x)| (k as i64 + v, x));
    let support_hi = v + num.degree().unwrap_or(0) as i64;
    Ok(TruncSeries::new(lo, hi, v >= lo, laurent && support_hi <= hi, terms))
}

/// `expand(f, ∞) - expand(f, 0)` on the window: the formal distribution
/// supported at the finite nonzero poles of `f`.
pub fn expansion_difference<F: Field>(f: &RatFunc<F>, lo: i64, hi: i64) -> Result<TruncSeries<F>> {
    let inf = expand(f, Direction::AroundInfinity, lo, hi)?;
    let zero = expand(f, Direction::AroundZero, lo, hi)?;
    Ok(inf.sub(&zero).restrict(lo, hi))
}

/// Expand every entry of a rational matrix.
pub fn expand_matrix<F: Field>(
    m: &Mat<RatFunc<F>>,
    direction: Direction,
    lo: i64,
    hi: i64,
) -> Result<TruncSeries<Mat<F>>> {
    let mut entries = Vec::new();
    for (i, j, f) in m.entries() {
        entries.push((i, j, expand(f, direction, lo, hi)?));
    }
    Ok(assemble_matrix_series(m.rows(), m.cols(), &entries))
}

/// Entrywise expansion difference of a rational matrix.
pub fn matrix_expansion_difference<F: Field>(
    m: &Mat<RatFunc<F>>,
    lo: i64,
    hi: i64,
) -> Result<TruncSeries<Mat<F>>> {
    let mut entries = Vec::new();
    for (i, j, f) in m.entries() {
        entries.push((i, j, expansion_difference(f, lo, hi)?));
    }
    Ok(assemble_matrix_series(m.rows(), m.cols(), &entries))
}

fn assemble_matrix_series<F: Field>(
    rows: usize,
    cols: usize,
    entries: &[(usize, usize, TruncSeries<F>)],
) -> TruncSeries<Mat<F>> {
    // the matrix series is known where every entry is
    let mut kn = Iv::ALL;
    let mut lo = i64::MAX;
    let mut hi = i64::MIN;
    for (_, _, s) in entries {
        kn = kn.intersect(&s.known());
        lo = lo.min(s.lo);
        hi = hi.max(s.hi);
    }
    let zb = kn.lo == -INF;
    let za = kn.hi == INF;
    let lo = if zb { lo } else { kn.lo };
    let hi = if za { hi } else { kn.hi };
    let mut coeffs: BTreeMap<i64, Mat<F>> = BTreeMap::new();
    for (i, j, s) in entries {
        for (k, c) in s.terms() {
            if k < lo || k > hi {
                continue;
            }
            coeffs.entry(k).or_insert_with(|| Mat::zeros(rows, cols)).set(*i, *j, c.clone());
        }
    }
    TruncSeries::new(lo, hi, zb, za, coeffs)
}

/// Coefficient table of a formal series in two variables `z^a w^b`. Only
/// cells listed in `known` carry information; absent coefficients at known
/// cells are zero.
#[derive(Clone, Debug, PartialEq)]
pub struct BiSeries<C> {
    coeffs: BTreeMap<(i64, i64), C>,
    known: BTreeSet<(i64, i64)>,
}

/// A mismatching cell with the two values found there.
pub type Mismatch<C> = ((i64, i64), Option<C>, Option<C>);

/// Outcome of comparing two two-variable tables.
#[derive(Clone, Debug, PartialEq)]
pub struct Comparison<C> {
    pub cells: usize,
    pub bounding: Option<((i64, i64), (i64, i64))>,
    pub first_mismatch: Option<Mismatch<C>>,
}

impl<C: Coeff> BiSeries<C> {
    pub fn new(known: BTreeSet<(i64, i64)>, coeffs: impl IntoIterator<Item = ((i64, i64), C)>) -> Self {
        let coeffs = coeffs
            .into_iter()
            .filter(|(k, c)| !c.is_zero() && known.contains(k))
            .collect();
        BiSeries { coeffs, known }
    }

    pub fn zero_on(known: BTreeSet<(i64, i64)>) -> Self {
        BiSeries { coeffs: BTreeMap::new(), known }
    }

    /// Every cell of the rectangle `[zlo, zhi] x [wlo, whi]`.
    pub fn rectangle(zlo: i64, zhi: i64, wlo: i64, whi: i64) -> BTreeSet<(i64, i64)> {
        (zlo..=zhi).flat_map(|a| (wlo..=whi).map(move |b| (a, b))).collect()
    }

    /// Product of a series in `z` (left) and a series in `w` (right).
    pub fn outer(z: &TruncSeries<C>, w: &TruncSeries<C>, zr: (i64, i64), wr: (i64, i64)) -> Self {
        let mut known = BTreeSet::new();
        let mut coeffs = Vec::new();
        for a in zr.0..=zr.1 {
            for b in wr.0..=wr.1 {
                if let (Some(x), Some(y)) = (z.get(a), w.get(b)) {
                    known.insert((a, b));
                    if let (Some(x), Some(y)) = (x, y) {
                        coeffs.push(((a, b), x.mul(y)));
                    }
                }
            }
        }
        Self::new(known, coeffs)
    }

    pub fn known_cells(&self) -> &BTreeSet<(i64, i64)> {
        &self.known
    }

    pub fn get(&self, a: i64, b: i64) -> Option<Option<&C>> {
        if !self.known.contains(&(a, b)) {
            return None;
        }
        Some(self.coeffs.get(&(a, b)))
    }

    pub fn terms(&self) -> impl Iterator<Item = ((i64, i64), &C)> {
        self.coeffs.iter().map(|(k, c)| (*k, c))
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    fn combine(&self, o: &Self, neg: bool) -> Self {
        let known: BTreeSet<_> = self.known.intersection(&o.known).copied().collect();
        let mut coeffs: BTreeMap<(i64, i64), C> = BTreeMap::new();
        for k in &known {
            let v = match (self.coeffs.get(k), o.coeffs.get(k)) {
                (Some(a), Some(b)) => Some(if neg { a.sub(b) } else { a.add(b) }),
                (Some(a), None) => Some(a.clone()),
                (None, Some(b)) => Some(if neg { b.neg() } else { b.clone() }),
                (None, None) => None,
            };
            if let Some(v) = v {
                coeffs.insert(*k, v);
            }
        }
        Self::new(known, coeffs)
    }

    pub fn add(&self, o: &Self) -> Self {
        self.combine(o, false)
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.combine(o, true)
    }

    pub fn map<D: Coeff>(&self, f: impl Fn(&C) -> D) -> BiSeries<D> {
        BiSeries::new(self.known.clone(), self.coeffs.iter().map(|(k, c)| (*k, f(c))))
    }

    /// Keep only the cells in `cells`.
    pub fn restrict(&self, cells: &BTreeSet<(i64, i64)>) -> Self {
        let known: BTreeSet<_> = self.known.intersection(cells).copied().collect();
        Self::new(known, self.coeffs.iter().map(|(k, c)| (*k, c.clone())))
    }

    /// Compare on the intersection of the known cells, in cell order.
    pub fn compare(&self, o: &Self) -> Comparison<C> {
        let cells: Vec<_> = self.known.intersection(&o.known).copied().collect();
        let bounding = if cells.is_empty() {
            None
        } else {
            let zlo = cells.iter().map(|c| c.0).min().unwrap();
            let zhi = cells.iter().map(|c| c.0).max().unwrap();
            let wlo = cells.iter().map(|c| c.1).min().unwrap();
            let whi = cells.iter().map(|c| c.1).max().unwrap();
            Some(((zlo, zhi), (wlo, whi)))
        };
        let first_mismatch = cells.iter().find_map(|k| {
            let (a, b) = (self.coeffs.get(k), o.coeffs.get(k));
            (a != b).then(|| (*k, a.cloned(), b.cloned()))
        });
        Comparison { cells: cells.len(), bounding, first_mismatch }
    }
}

/// Finite sum of terms `δ(w / (z s)) X(w)`.
#[derive(Clone, Debug, PartialEq)]
pub struct DeltaComb<F: Field, C> {
    terms: Vec<(F, TruncSeries<C>)>,
}

impl<F: Field, C: Module<F>> DeltaComb<F, C> {
    pub fn new() -> Self {
        DeltaComb { terms: Vec::new() }
    }

    /// Add a term; a term with an existing shift is merged into it.
    pub fn push(&mut self, shift: F, profile: TruncSeries<C>) -> Result<()> {
        if shift.is_zero() {
            return Err(EngineError::DegenerateScalar("delta shift must be nonzero".into()));
        }
        if let Some(t) = self.terms.iter_mut().find(|t| t.0 == shift) {
            t.1 = t.1.add(&profile);
        } else {
            self.terms.push((shift, profile));
        }
        Ok(())
    }

    pub fn terms(&self) -> &[(F, TruncSeries<C>)] {
        &self.terms
    }

    /// Coefficient table on the given cells: the `(z^a, w^b)` coefficient of
    /// `δ(w/(z s)) X(w)` is `s^a X_{a+b}`.
    pub fn pair(&self, cells: &BTreeSet<(i64, i64)>) -> Result<BiSeries<C>> {
        let mut coeffs = Vec::new();
        for &(a, b) in cells {
            let mut acc: Option<C> = None;
            for (s, x) in &self.terms {
                let c = x.get(a + b).ok_or_else(|| {
                    EngineError::WindowUnderflow(format!("delta profile unknown at exponent {}", a + b))
                })?;
                if let Some(c) = c {
                    let v = c.scale_by(&s.pow(a)?);
                    acc = Some(match acc {
                        Some(p) => p.add(&v),
                        None => v,
                    });
                }
            }
            if let Some(v) = acc {
                coeffs.push(((a, b), v));
            }
        }
        Ok(BiSeries::new(cells.clone(), coeffs))
    }
}

impl<F: Field, C: Module<F>> Default for DeltaComb<F, C> {
    fn default() -> Self {
        Self::new()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::Rational;
    use crate::poly::Poly;

    type Q = Rational;
    type Rf = RatFunc<Q>;

    fn q(i: i64) -> Q {
        Q::from_int(i)
    }

    fn z() -> Rf {
        Rf::var()
    }

    fn geometric() -> Rf {
        Rf::one().div(&Rf::one().sub(&z())).unwrap()
    }

    fn coeffs(s: &TruncSeries<Q>) -> Vec<(i64, i64)> {
        s.terms().map(|(k, c)| (k, c.0.to_integer().try_into().unwrap())).collect()
    }

    #[test]
    fn geometric_both_directions() {
        let s = expand(&geometric(), Direction::AroundZero, 0, 3).unwrap();
        assert_eq!(coeffs(&s), vec![(0, 1), (1, 1), (2, 1), (3, 1)]);
        assert_eq!(s.window(), (0, 3));
        let s = expand(&geometric(), Direction::AroundInfinity, -4, -1).unwrap();
        assert_eq!(coeffs(&s), vec![(-4, -1), (-3, -1), (-2, -1), (-1, -1)]);
        assert_eq!(s.window(), (-4, -1));
        for d in [Direction::AroundZero, Direction::AroundInfinity] {
            let s = expand(&z(), d, 0, 2).unwrap();
            assert_eq!(coeffs(&s), vec![(1, 1)]);
        }
    }

    #[test]
    fn products_and_windows() {
        let a = TruncSeries::ascending(0, 1, vec![(0, q(1)), (1, q(1))]);
        let b = TruncSeries::ascending(0, 5, vec![(0, q(1))]);
        let p = a.mul(&b).unwrap();
        assert_eq!(p.window(), (0, 1));
        assert_eq!(coeffs(&p), vec![(0, 1), (1, 1)]);

        let a = TruncSeries::ascending(-1, -1, vec![(-1, q(1))]);
        let b = TruncSeries::ascending(1, 1, vec![(1, q(1))]);
        let p = a.mul(&b).unwrap();
        assert_eq!((p.window(), coeffs(&p)), ((0, 0), vec![(0, 1)]));

        let a = TruncSeries::ascending(0, 2, vec![(0, q(1)), (1, q(1)), (2, q(1))]);
        let p = a.mul(&a).unwrap();
        assert_eq!((p.window(), coeffs(&p)), ((0, 2), vec![(0, 1), (1, 2), (2, 3)]));
    }

    #[test]
    fn opposite_directions_underflow() {
        let a = TruncSeries::ascending(0, 3, vec![(0, q(1))]);
        let b = TruncSeries::descending(-3, 0, vec![(0, q(1))]);
        assert!(matches!(a.mul(&b), Err(EngineError::WindowUnderflow(_))));
    }

    #[test]
    fn expansion_differences() {
        assert!(expansion_difference(&z(), -3, 3).unwrap().terms().next().is_none());
        assert!(expansion_difference(&Rf::one(), -3, 3).unwrap().terms().next().is_none());
        let d = expansion_difference(&geometric(), -2, 2).unwrap();
        assert_eq!(d.window(), (-2, 2));
        assert_eq!(coeffs(&d), (-2..=2).map(|k| (k, -1)).collect::<Vec<_>>());
    }

    #[test]
    fn delta_pairing() {
        let cells = BiSeries::<Q>::rectangle(-1, 1, -1, 1);
        let mut d = DeltaComb::<Q, Q>::new();
        d.push(q(1), TruncSeries::laurent(0, 0, vec![(0, q(1))])).unwrap();
        let b = d.pair(&cells).unwrap();
        for &(a, c) in &cells {
            let v = b.get(a, c).unwrap();
            assert_eq!(v.is_some(), a + c == 0);
        }
        let mut d = DeltaComb::<Q, Q>::new();
        d.push(q(1), TruncSeries::laurent(1, 1, vec![(1, q(1))])).unwrap();
        let b = d.pair(&cells).unwrap();
        for &(a, c) in &cells {
            assert_eq!(b.get(a, c).unwrap().is_some(), a + c == 1);
        }
        let empty = DeltaComb::<Q, Q>::new().pair(&cells).unwrap();
        assert!(empty.is_zero());
        let mut short = DeltaComb::<Q, Q>::new();
        short.push(q(2), TruncSeries::two_sided(0, 0, vec![(0, q(1))])).unwrap();
        assert!(matches!(short.pair(&cells), Err(EngineError::WindowUnderflow(_))));
    }

    #[test]
    fn matrix_series_inverse() {
        let a = Mat::from_rows(vec![vec![q(1), q(2)], vec![q(0), q(3)]]);
        let s = TruncSeries::ascending(0, 4, vec![(0, Mat::identity(2)), (1, a.clone())]);
        let inv = s.inverse().unwrap();
        let mut p = Mat::identity(2);
        for k in 0..=4 {
            assert_eq!(inv.get(k).unwrap().cloned().unwrap_or(Mat::zeros(2, 2)), p);
            p = p.mul(&a).neg();
        }
        let check = s.mul(&inv).unwrap();
        assert_eq!(check.window(), (0, 4));
        assert_eq!(check.get(0).unwrap(), Some(&Mat::identity(2)));
        assert!((1..=4).all(|k| check.get(k).unwrap().is_none()));
        let sing = TruncSeries::ascending(0, 2, vec![(0, Mat::<Q>::unit(2, 0, 0))]);
        assert!(matches!(sing.inverse(), Err(EngineError::SingularLeadingTerm(_))));
    }

    #[test]
    fn resubstitution_of_expansion() {
        let f = Rf::new(Poly::from_coeffs(vec![q(1), q(2)]), Poly::from_coeffs(vec![q(3), q(-1), q(1)])).unwrap();
        let s = expand(&f, Direction::AroundZero, 0, 6).unwrap();
        let den = TruncSeries::laurent(0, 2, vec![(0, q(3)), (1, q(-1)), (2, q(1))]);
        let num = TruncSeries::laurent(0, 1, vec![(0, q(1)), (1, q(2))]);
        let r = den.mul(&s).unwrap().sub(&num);
        assert!(r.terms().next().is_none());
        assert_eq!(r.window().1, 6);
    }
}
