//! Partial and full Gauss decompositions of operator matrices whose entries
//! do not commute.
//!
//! The same block algorithms run on truncated series (`DirSeries`) and on
//! exact rational operator matrices (`Mat<RatFunc<F>>`).

use std::ops::Range;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::error::{EngineError, Result};
use crate::field::{Coeff, Field};
use crate::linalg::Mat;
use crate::ratfunc::RatFunc;
use crate::report::{Mismatch, VerificationReport, Window};
use crate::series::{Direction, Iv, TruncSeries};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn name(self) -> &'static str {
        match self {
            Sign::Plus => "plus",
            Sign::Minus => "minus",
        }
    }

    pub fn direction(self) -> Direction {
        match self {
            Sign::Plus => Direction::AroundZero,
            Sign::Minus => Direction::AroundInfinity,
        }
    }
}

/// Operations the block algorithms need from an operator-matrix carrier.
pub trait BlockOp: Clone + Send + Sync + Sized {
    fn shape(&self) -> (usize, usize);
    fn sub_block(&self, rows: Range<usize>, cols: Range<usize>) -> Self;
    /// Assemble a block matrix from rows of blocks.
    fn stack(grid: &[Vec<Self>]) -> Result<Self>;
    fn zeros_like(&self, rows: usize, cols: usize) -> Self;
    fn identity_like(&self, n: usize) -> Self;
    fn mul(&self, o: &Self) -> Result<Self>;
    fn add(&self, o: &Self) -> Result<Self>;
    fn sub(&self, o: &Self) -> Result<Self>;
    fn inv(&self) -> Result<Self>;
    /// `x` with `a x = b`.
    fn solve_left(a: &Self, b: &Self) -> Result<Self>;
    /// `x` with `x a = b`.
    fn solve_right(b: &Self, a: &Self) -> Result<Self>;
    /// Number of compared coefficients and the first disagreement.
    fn diff(&self, expected: &Self, names: &[&str]) -> (usize, Option<Mismatch>);
}

fn check_shapes(grid: &[(usize, usize)], cols: usize) -> Result<()> {
    if cols == 0 || !grid.len().is_multiple_of(cols) {
        return Err(EngineError::ShapeError("ragged block grid".into()));
    }
    Ok(())
}

fn grid_layout<T>(grid: &[Vec<T>], shape: impl Fn(&T) -> (usize, usize)) -> Result<(Vec<usize>, Vec<usize>)> {
    let ncols = grid.first().map(|r| r.len()).unwrap_or(0);
    let shapes: Vec<(usize, usize)> = grid.iter().flatten().map(&shape).collect();
    check_shapes(&shapes, ncols)?;
    let heights: Vec<usize> = grid.iter().map(|r| shape(&r[0]).0).collect();
    let widths: Vec<usize> = grid[0].iter().map(|b| shape(b).1).collect();
    for (i, row) in grid.iter().enumerate() {
        if row.len() != ncols {
            return Err(EngineError::ShapeError("ragged block grid".into()));
        }
        for (j, b) in row.iter().enumerate() {
            if shape(b) != (heights[i], widths[j]) {
                return Err(EngineError::ShapeError(format!(
                    "block ({i},{j}) is {:?}, expected {:?}",
                    shape(b),
                    (heights[i], widths[j])
                )));
            }
        }
    }
    Ok((heights, widths))
}

fn stack_mats<F: Field>(grid: &[Vec<Mat<F>>]) -> Result<Mat<F>> {
    let (hs, ws) = grid_layout(grid, |m: &Mat<F>| m.shape())?;
    let mut out = Mat::zeros(hs.iter().sum(), ws.iter().sum());
    let mut r0 = 0;
    for (i, row) in grid.iter().enumerate() {
        let mut c0 = 0;
        for (j, b) in row.iter().enumerate() {
            for (r, c, v) in b.entries() {
                if !v.is_zero() {
                    out.set(r0 + r, c0 + c, v.clone());
                }
            }
            c0 += ws[j];
        }
        r0 += hs[i];
    }
    Ok(out)
}

fn first_entry_mismatch<F: Field>(got: &Mat<F>, exp: &Mat<F>, prefix: &[i64], names: &[&str]) -> Option<Mismatch> {
    got.entries().zip(exp.entries()).find(|(a, b)| a.2 != b.2).map(|(a, b)| {
        let mut indices = prefix.to_vec();
        indices.extend([a.0 as i64, a.1 as i64]);
        Mismatch { indices, expected: b.2.to_text(names), got: a.2.to_text(names) }
    })
}

impl<F: Field> BlockOp for Mat<RatFunc<F>> {
    fn shape(&self) -> (usize, usize) {
        Mat::shape(self)
    }

    fn sub_block(&self, rows: Range<usize>, cols: Range<usize>) -> Self {
        self.select(&rows.collect::<Vec<_>>(), &cols.collect::<Vec<_>>())
    }

    fn stack(grid: &[Vec<Self>]) -> Result<Self> {
        stack_mats(grid)
    }

    fn zeros_like(&self, rows: usize, cols: usize) -> Self {
        Mat::zeros(rows, cols)
    }

    fn identity_like(&self, n: usize) -> Self {
        Mat::identity(n)
    }

    fn mul(&self, o: &Self) -> Result<Self> {
        self.checked_mul(o)
    }

    fn add(&self, o: &Self) -> Result<Self> {
        if self.shape() != o.shape() {
            return Err(EngineError::ShapeError("sum of differently shaped blocks".into()));
        }
        Ok(Coeff::add(self, o))
    }

    fn sub(&self, o: &Self) -> Result<Self> {
        if self.shape() != o.shape() {
            return Err(EngineError::ShapeError("difference of differently shaped blocks".into()));
        }
        Ok(Coeff::sub(self, o))
    }

    fn inv(&self) -> Result<Self> {
        self.inverse()
    }

    fn solve_left(a: &Self, b: &Self) -> Result<Self> {
        a.inverse()?.checked_mul(b)
    }

    fn solve_right(b: &Self, a: &Self) -> Result<Self> {
        // x a = b  <=>  a^T x^T = b^T
        Ok(a.transpose().inverse()?.checked_mul(&b.transpose())?.transpose())
    }

    fn diff(&self, expected: &Self, names: &[&str]) -> (usize, Option<Mismatch>) {
        if self.shape() != expected.shape() {
            return (0, Some(Mismatch { indices: vec![], expected: format!("{:?}", expected.shape()), got: format!("{:?}", self.shape()) }));
        }
        let mut full = vec!["z"];
        full.extend_from_slice(names);
        (self.rows() * self.cols(), first_entry_mismatch(self, expected, &[], &full))
    }
}

/// A matrix series together with the direction it is expanded in.
#[derive(Clone, Debug, PartialEq)]
pub struct DirSeries<F: Field> {
    pub dir: Direction,
    pub s: TruncSeries<Mat<F>>,
    rows: usize,
    cols: usize,
}

impl<F: Field> DirSeries<F> {
    pub fn new(dir: Direction, s: TruncSeries<Mat<F>>, rows: usize, cols: usize) -> Self {
        DirSeries { dir, s, rows, cols }
    }

    /// Shape is read off any stored coefficient; a series with none needs
    /// `new`.
    pub fn from_series(dir: Direction, s: TruncSeries<Mat<F>>) -> Result<Self> {
        let (rows, cols) = s
            .terms()
            .next()
            .map(|(_, m)| m.shape())
            .ok_or_else(|| EngineError::ShapeError("series has no coefficient to read a shape from".into()))?;
        Ok(DirSeries { dir, s, rows, cols })
    }

    fn wrap(&self, s: TruncSeries<Mat<F>>, rows: usize, cols: usize) -> Self {
        DirSeries { dir: self.dir, s, rows, cols }
    }
}

fn reflect<C: Coeff>(s: &TruncSeries<C>) -> TruncSeries<C> {
    let (lo, hi) = s.window();
    TruncSeries::new(-hi, -lo, s.zero_above(), s.zero_below(), s.terms().map(|(k, c)| (-k, c.clone())))
}

/// Ascending solve of `a x = b` (or `x a = b` when `right`).
fn solve_ascending<F: Field>(a: &TruncSeries<Mat<F>>, b: &TruncSeries<Mat<F>>, right: bool, shape: (usize, usize)) -> Result<TruncSeries<Mat<F>>> {
    if !a.zero_below() || !b.zero_below() {
        return Err(EngineError::WindowUnderflow("solve needs series with a lowest exponent".into()));
    }
    let la = a
        .terms()
        .next()
        .map(|(k, _)| k)
        .ok_or_else(|| EngineError::SingularLeadingTerm("coefficient series vanishes".into()))?;
    let a0_inv = a.get(la).flatten().unwrap().inverse().map_err(|_| EngineError::SingularLeadingTerm(format!("exponent {la}")))?;
    let lb = b.lo();
    let len = (a.hi() - la).min(b.hi() - lb);
    if len < 0 {
        return Err(EngineError::WindowUnderflow("no exact coefficient in solve".into()));
    }
    let zero = Mat::zeros(shape.0, shape.1);
    let mut xs: Vec<Mat<F>> = Vec::with_capacity(len as usize + 1);
    for t in 0..=len {
        let mut acc = b.get(lb + t).flatten().cloned().unwrap_or_else(|| zero.clone());
        for s in 1..=t {
            if let Some(a_s) = a.get(la + s).flatten() {
                let x = &xs[(t - s) as usize];
                acc = acc.sub(&if right { x.mul(a_s) } else { a_s.mul(x) });
            }
        }
        xs.push(if right { acc.mul(&a0_inv) } else { a0_inv.mul(&acc) });
    }
    let lx = lb - la;
    Ok(TruncSeries::ascending(lx, lx + len, xs.into_iter().enumerate().map(|(t, m)| (lx + t as i64, m))))
}

fn known_range<F: Field>(a: &TruncSeries<Mat<F>>, b: &TruncSeries<Mat<F>>) -> Option<(i64, i64)> {
    let span = Iv::new(a.lo().min(b.lo()), a.hi().max(b.hi()));
    let r = a.known().intersect(&b.known()).intersect(&span);
    (!r.is_empty()).then_some((r.lo, r.hi))
}

impl<F: Field> BlockOp for DirSeries<F> {
    fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    fn sub_block(&self, rows: Range<usize>, cols: Range<usize>) -> Self {
        let (r, c) = (rows.len(), cols.len());
        let rv: Vec<usize> = rows.collect();
        let cv: Vec<usize> = cols.collect();
        self.wrap(self.s.map(|m| m.select(&rv, &cv)), r, c)
    }

    fn stack(grid: &[Vec<Self>]) -> Result<Self> {
        let (hs, ws) = grid_layout(grid, |b: &Self| b.shape())?;
        let blocks: Vec<&DirSeries<F>> = grid.iter().flatten().collect();
        let dir = blocks[0].dir;
        let known = blocks.iter().fold(Iv::ALL, |acc, b| acc.intersect(&b.s.known()));
        let zb = blocks.iter().all(|b| b.s.zero_below());
        let za = blocks.iter().all(|b| b.s.zero_above());
        let lo = if zb { blocks.iter().map(|b| b.s.lo()).min().unwrap() } else { known.lo };
        let hi = if za { blocks.iter().map(|b| b.s.hi()).max().unwrap() } else { known.hi };
        let mut coeffs = Vec::new();
        for k in lo..=hi {
            let g: Vec<Vec<Mat<F>>> = grid
                .iter()
                .enumerate()
                .map(|(i, row)| {
                    row.iter()
                        .enumerate()
                        .map(|(j, b)| b.s.get(k).flatten().cloned().unwrap_or_else(|| Mat::zeros(hs[i], ws[j])))
                        .collect()
                })
                .collect();
            coeffs.push((k, stack_mats(&g)?));
        }
        Ok(DirSeries { dir, s: TruncSeries::new(lo, hi, zb, za, coeffs), rows: hs.iter().sum(), cols: ws.iter().sum() })
    }

    fn zeros_like(&self, rows: usize, cols: usize) -> Self {
        self.wrap(TruncSeries::laurent(0, 0, std::iter::empty()), rows, cols)
    }

    fn identity_like(&self, n: usize) -> Self {
        self.wrap(TruncSeries::laurent(0, 0, [(0, Mat::identity(n))]), n, n)
    }

    fn mul(&self, o: &Self) -> Result<Self> {
        if self.cols != o.rows {
            return Err(EngineError::ShapeError(format!("{:?} times {:?}", self.shape(), o.shape())));
        }
        Ok(self.wrap(self.s.mul(&o.s)?, self.rows, o.cols))
    }

    fn add(&self, o: &Self) -> Result<Self> {
        if self.shape() != o.shape() {
            return Err(EngineError::ShapeError("sum of differently shaped blocks".into()));
        }
        Ok(self.wrap(self.s.add(&o.s), self.rows, self.cols))
    }

    fn sub(&self, o: &Self) -> Result<Self> {
        if self.shape() != o.shape() {
            return Err(EngineError::ShapeError("difference of differently shaped blocks".into()));
        }
        Ok(self.wrap(self.s.sub(&o.s), self.rows, self.cols))
    }

    fn inv(&self) -> Result<Self> {
        if self.rows != self.cols {
            return Err(EngineError::ShapeError("inverse of a non-square block".into()));
        }
        Ok(self.wrap(self.s.inverse_in(self.dir)?, self.rows, self.cols))
    }

    fn solve_left(a: &Self, b: &Self) -> Result<Self> {
        let shape = (a.cols, b.cols);
        let s = match a.dir {
            Direction::AroundZero => solve_ascending(&a.s, &b.s, false, shape)?,
            Direction::AroundInfinity => reflect(&solve_ascending(&reflect(&a.s), &reflect(&b.s), false, shape)?),
        };
        Ok(a.wrap(s, shape.0, shape.1))
    }

    fn solve_right(b: &Self, a: &Self) -> Result<Self> {
        let shape = (b.rows, a.rows);
        let s = match a.dir {
            Direction::AroundZero => solve_ascending(&a.s, &b.s, true, shape)?,
            Direction::AroundInfinity => reflect(&solve_ascending(&reflect(&a.s), &reflect(&b.s), true, shape)?),
        };
        Ok(a.wrap(s, shape.0, shape.1))
    }

    fn diff(&self, expected: &Self, names: &[&str]) -> (usize, Option<Mismatch>) {
        if self.shape() != expected.shape() {
            return (0, Some(Mismatch { indices: vec![], expected: format!("{:?}", expected.shape()), got: format!("{:?}", self.shape()) }));
        }
        let Some((lo, hi)) = known_range(&self.s, &expected.s) else {
            return (0, None);
        };
        let zero = Mat::zeros(self.rows, self.cols);
        for k in lo..=hi {
            let g = self.s.get(k).flatten().unwrap_or(&zero);
            let e = expected.s.get(k).flatten().unwrap_or(&zero);
            if let Some(m) = first_entry_mismatch(g, e, &[k], names) {
                return ((hi - lo + 1) as usize, Some(m));
            }
        }
        ((hi - lo + 1) as usize, None)
    }
}

/// `L = [[1, 0], [e, 1]] diag(K, k) [[1, f], [0, 1]]` with `C^n = C^{n-1} ⊕ C`.
/// `e` is the bottom-left block row, `f` the top-right block column.
#[derive(Clone, Debug, PartialEq)]
pub struct GaussFactors<T> {
    pub kk: T,
    pub kscal: T,
    pub e: T,
    pub f: T,
    pub sign: Sign,
}

impl<T: BlockOp> GaussFactors<T> {
    /// `D = k + e K f`.
    pub fn d(&self) -> Result<T> {
        self.kscal.add(&self.e.mul(&self.kk)?.mul(&self.f)?)
    }

    pub fn recompose(&self) -> Result<T> {
        let kf = self.kk.mul(&self.f)?;
        let ek = self.e.mul(&self.kk)?;
        T::stack(&[vec![self.kk.clone(), kf], vec![ek, self.d()?]])
    }

    /// Block formula for `L^{-1}`.
    pub fn inverse_blocks(&self) -> Result<T> {
        let kinv = self.kk.inv()?;
        let sinv = self.kscal.inv()?;
        let fs = self.f.mul(&sinv)?;
        let tl = kinv.add(&fs.mul(&self.e)?)?;
        let zero_tr = fs.zeros_like(fs.shape().0, fs.shape().1);
        let se = sinv.mul(&self.e)?;
        let zero_bl = se.zeros_like(se.shape().0, se.shape().1);
        T::stack(&[vec![tl, zero_tr.sub(&fs)?], vec![zero_bl.sub(&se)?, sinv]])
    }
}

fn split<T: BlockOp>(l: &T, n: usize, d: usize) -> Result<[T; 4]> {
    if n < 2 {
        return Err(EngineError::ShapeError("partial decomposition needs n >= 2".into()));
    }
    if l.shape() != (n * d, n * d) {
        return Err(EngineError::ShapeError(format!("operator matrix is {:?}, expected {}x{}", l.shape(), n * d, n * d)));
    }
    let (s, t) = ((n - 1) * d, n * d);
    Ok([l.sub_block(0..s, 0..s), l.sub_block(0..s, s..t), l.sub_block(s..t, 0..s), l.sub_block(s..t, s..t)])
}

fn singular_block(what: &str) -> impl Fn(EngineError) -> EngineError + '_ {
    move |e| match e {
        EngineError::SingularLeadingTerm(m) | EngineError::NormalizationFailure(m) => {
            EngineError::SingularLeadingTerm(format!("{what}: {m}"))
        }
        EngineError::SingularMatrix => EngineError::SingularLeadingTerm(format!("{what} is singular")),
        other => other,
    }
}

/// Split `C^n = C^{n-1} ⊕ C` in the auxiliary space; `d` is the quantum
/// dimension.
pub fn partial_decompose<T: BlockOp>(l: &T, n: usize, d: usize, sign: Sign) -> Result<GaussFactors<T>> {
    let [a, b, c, dd] = split(l, n, d)?;
    let kinv = a.inv().map_err(singular_block("K block"))?;
    let f = kinv.mul(&b)?;
    let e = c.mul(&kinv)?;
    let kscal = dd.sub(&e.mul(&b)?)?;
    Ok(GaussFactors { kk: a, kscal, e, f, sign })
}

/// Unipotent lower, diagonal, unipotent upper in `d x d` blocks.
#[derive(Clone, Debug, PartialEq)]
pub struct FullGaussFactors<T> {
    pub lower: T,
    pub diag: T,
    pub upper: T,
}

impl<T: BlockOp> FullGaussFactors<T> {
    pub fn recompose(&self) -> Result<T> {
        self.lower.mul(&self.diag)?.mul(&self.upper)
    }

    /// The diagonal block `k_i`.
    pub fn k(&self, i: usize, d: usize) -> T {
        self.diag.sub_block(i * d..(i + 1) * d, i * d..(i + 1) * d)
    }
}

/// Iterated partial decomposition on the leading principal blocks.
pub fn full_decompose<T: BlockOp>(l: &T, n: usize, d: usize, sign: Sign) -> Result<FullGaussFactors<T>> {
    if n == 1 {
        let id = l.identity_like(d);
        return Ok(FullGaussFactors { lower: id.clone(), diag: l.clone(), upper: id });
    }
    let g = partial_decompose(l, n, d, sign).map_err(|e| match e {
        EngineError::SingularLeadingTerm(m) => EngineError::SingularLeadingTerm(format!("principal block {}: {m}", n - 1)),
        other => other,
    })?;
    let inner = full_decompose(&g.kk, n - 1, d, sign)?;
    let s = (n - 1) * d;
    let id = l.identity_like(d);
    let lower = T::stack(&[vec![inner.lower.clone(), l.zeros_like(s, d)], vec![g.e.mul(&inner.lower)?, id.clone()]])?;
    let diag = T::stack(&[vec![inner.diag, l.zeros_like(s, d)], vec![l.zeros_like(d, s), g.kscal]])?;
    let upper = T::stack(&[vec![inner.upper.clone(), inner.upper.mul(&g.f)?], vec![l.zeros_like(d, s), id]])?;
    Ok(FullGaussFactors { lower, diag, upper })
}

/// Block Doolittle elimination, independent of `full_decompose`.
pub fn direct_ldu<T: BlockOp>(l: &T, n: usize, d: usize) -> Result<FullGaussFactors<T>> {
    if l.shape() != (n * d, n * d) {
        return Err(EngineError::ShapeError(format!("operator matrix is {:?}, expected {}x{}", l.shape(), n * d, n * d)));
    }
    let blk = |i: usize, j: usize| l.sub_block(i * d..(i + 1) * d, j * d..(j + 1) * d);
    let zero = l.zeros_like(d, d);
    let id = l.identity_like(d);
    let mut lo: Vec<Vec<T>> = vec![vec![zero.clone(); n]; n];
    let mut up: Vec<Vec<T>> = vec![vec![zero.clone(); n]; n];
    let mut dg: Vec<T> = Vec::with_capacity(n);
    for k in 0..n {
        lo[k][k] = id.clone();
        up[k][k] = id.clone();
        // Schur-type correction sum_{m<k} lo[i][m] dg[m] up[m][j]
        let corr = |i: usize, j: usize, lo: &Vec<Vec<T>>, up: &Vec<Vec<T>>, dg: &Vec<T>| -> Result<T> {
            let mut acc = blk(i, j);
            for m in 0..k {
                acc = acc.sub(&lo[i][m].mul(&dg[m])?.mul(&up[m][j])?)?;
            }
            Ok(acc)
        };
        let dk = corr(k, k, &lo, &up, &dg)?;
        let dk_inv = dk.inv().map_err(|e| match e {
            EngineError::SingularLeadingTerm(m) => EngineError::SingularLeadingTerm(format!("pivot block {k}: {m}")),
            other => other,
        })?;
        dg.push(dk);
        for i in k + 1..n {
            lo[i][k] = corr(i, k, &lo, &up, &dg)?.mul(&dk_inv)?;
        }
        for j in k + 1..n {
            up[k][j] = dk_inv.mul(&corr(k, j, &lo, &up, &dg)?)?;
        }
    }
    let mut diag: Vec<Vec<T>> = vec![vec![zero; n]; n];
    for (k, dk) in dg.into_iter().enumerate() {
        diag[k][k] = dk;
    }
    Ok(FullGaussFactors { lower: T::stack(&lo)?, diag: T::stack(&diag)?, upper: T::stack(&up)? })
}

/// Compare named pieces; the report fails at the first piece that differs.
pub fn compare_pieces<T: BlockOp>(
    id: impl Into<String>,
    anchor: impl Into<String>,
    pieces: &[(&str, &T, &T)],
    names: &[&str],
    start: Instant,
) -> VerificationReport {
    let mut cells = 0;
    let mut mismatch = None;
    let mut notes = Vec::new();
    for (label, got, exp) in pieces {
        let (c, m) = got.diff(exp, names);
        cells += c;
        if mismatch.is_none() {
            if let Some(m) = m {
                notes.push(format!("first difference in {label}"));
                mismatch = Some(m);
            }
        }
    }
    let mut r = VerificationReport::from_outcome(id, anchor, Some(Window::entries(cells)), mismatch, start);
    for n in notes {
        r = r.with_note(n);
    }
    r
}

/// Recomposition of the partial factors reproduces `L`.
pub fn check_recompose<T: BlockOp>(l: &T, fac: &GaussFactors<T>, n: usize, names: &[&str]) -> Result<VerificationReport> {
    let start = Instant::now();
    let rec = fac.recompose()?;
    Ok(compare_pieces(
        format!("gauss.partial.recompose.{}.n{n}", fac.sign.name()),
        "L = [[I,0],[e,1]] diag(K,k) [[I,f],[0,1]] = [[K, K f],[e K, k + e K f]]",
        &[("L", &rec, l)],
        names,
        start,
    ))
}

/// Re-derive the factors from the blocks of `L` by solving `K f = B`,
/// `e K = C`, `k = D - e K f`, and compare.
pub fn verify_uniqueness<T: BlockOp>(l: &T, fac: &GaussFactors<T>, n: usize, d: usize, names: &[&str]) -> Result<VerificationReport> {
    let start = Instant::now();
    let [a, b, c, dd] = split(l, n, d)?;
    let f = T::solve_left(&a, &b)?;
    let e = T::solve_right(&c, &a)?;
    let k = dd.sub(&e.mul(&a)?.mul(&f)?)?;
    Ok(compare_pieces(
        format!("gauss.partial.uniqueness.{}.n{n}", fac.sign.name()),
        "K = A, K f = B, e K = C, k = D - e K f determine the factors",
        &[("K", &fac.kk, &a), ("f", &fac.f, &f), ("e", &fac.e, &e), ("k", &fac.kscal, &k)],
        names,
        start,
    ))
}

/// Full decomposition: recomposition, unit diagonals, and agreement with
/// block elimination.
pub fn check_full<T: BlockOp>(l: &T, n: usize, d: usize, sign: Sign, names: &[&str]) -> Result<VerificationReport> {
    let start = Instant::now();
    let it = full_decompose(l, n, d, sign)?;
    let direct = direct_ldu(l, n, d)?;
    let rec = it.recompose()?;
    let id = l.identity_like(d);
    let mut pieces: Vec<(String, T, T)> = vec![
        ("L".into(), rec, l.clone()),
        ("lower (direct)".into(), it.lower.clone(), direct.lower.clone()),
        ("diag (direct)".into(), it.diag.clone(), direct.diag.clone()),
        ("upper (direct)".into(), it.upper.clone(), direct.upper.clone()),
    ];
    for i in 0..n {
        let r = i * d..(i + 1) * d;
        pieces.push((format!("lower[{i},{i}]"), it.lower.sub_block(r.clone(), r.clone()), id.clone()));
        pieces.push((format!("upper[{i},{i}]"), it.upper.sub_block(r.clone(), r), id.clone()));
    }
    let refs: Vec<(&str, &T, &T)> = pieces.iter().map(|(s, a, b)| (s.as_str(), a, b)).collect();
    Ok(compare_pieces(
        format!("gauss.full.{}.n{n}", sign.name()),
        "L = (1 + e_ij) diag(k_1, ..., k_n) (1 + f_ij), unique",
        &refs,
        names,
        start,
    ))
}

/// `L^{-1} = [[K^{-1} + f k^{-1} e, -f k^{-1}], [-k^{-1} e, k^{-1}]]`
/// against direct inversion.
pub fn check_inverse_blocks<T: BlockOp>(l: &T, fac: &GaussFactors<T>, n: usize, names: &[&str]) -> Result<VerificationReport> {
    let start = Instant::now();
    let direct = l.inv()?;
    let blocks = fac.inverse_blocks()?;
    Ok(compare_pieces(
        format!("gauss.inverse_blocks.{}.n{n}", fac.sign.name()),
        "(L(z))^{-1} = [[K^{-1} + f k^{-1} e, -f k^{-1}], [-k^{-1} e, k^{-1}]]",
        &[("L^{-1}", &blocks, &direct)],
        names,
        start,
    ))
}

/// Series view of an L-operator expansion.
pub fn series_of<F: Field>(s: &TruncSeries<Mat<F>>, size: usize, sign: Sign) -> DirSeries<F> {
    DirSeries::new(sign.direction(), s.clone(), size, size)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::Rational;

    type Q = Rational;

    fn rf(v: i64) -> RatFunc<Q> {
        RatFunc::constant(Q::from_int(v))
    }

    #[test]
    fn commuting_two_by_two() {
        let l = Mat::from_rows(vec![vec![rf(2), rf(1)], vec![rf(1), rf(1)]]);
        let g = partial_decompose(&l, 2, 1, Sign::Plus).unwrap();
        let half = RatFunc::constant(Q::new(1, 2));
        assert_eq!(g.kk.get(0, 0), &rf(2));
        assert_eq!(g.f.get(0, 0), &half);
        assert_eq!(g.e.get(0, 0), &half);
        assert_eq!(g.kscal.get(0, 0), &half);
        assert_eq!(g.recompose().unwrap(), l);
    }

    #[test]
    fn identity_factors() {
        let l: Mat<RatFunc<Q>> = Mat::identity(3);
        let g = partial_decompose(&l, 3, 1, Sign::Plus).unwrap();
        assert!(g.kk.is_identity() && g.kscal.is_identity());
        assert!(g.e.entries().all(|e| e.2.is_zero()) && g.f.entries().all(|e| e.2.is_zero()));
        let full = full_decompose(&l, 3, 1, Sign::Plus).unwrap();
        assert!(full.lower.is_identity() && full.diag.is_identity() && full.upper.is_identity());
    }

    #[test]
    fn noncommuting_blocks_keep_order() {
        // 2x2 operator blocks that do not commute
        let m = |r: [[i64; 2]; 2]| Mat::from_rows(r.iter().map(|row| row.iter().map(|&v| rf(v)).collect()).collect());
        let a = m([[1, 1], [0, 1]]);
        let b = m([[0, 1], [1, 0]]);
        let c = m([[2, 0], [1, 1]]);
        let d = m([[1, 0], [3, 1]]);
        let l = stack_mats(&[vec![a.clone(), b.clone()], vec![c.clone(), d.clone()]]).unwrap();
        let g = partial_decompose(&l, 2, 2, Sign::Plus).unwrap();
        assert_eq!(g.kk.checked_mul(&g.f).unwrap(), b);
        assert_eq!(g.e.checked_mul(&g.kk).unwrap(), c);
        assert_eq!(g.recompose().unwrap(), l);
        let full = full_decompose(&l, 2, 2, Sign::Plus).unwrap();
        let direct = direct_ldu(&l, 2, 2).unwrap();
        assert_eq!(full, direct);
        assert!(check_inverse_blocks(&l, &g, 2, &[]).unwrap().passed());
        assert!(verify_uniqueness(&l, &g, 2, 2, &[]).unwrap().passed());
    }

    #[test]
    fn series_solve_matches_inverse() {
        let s = TruncSeries::ascending(0, 5, (0..=5).map(|k| (k, Mat::from_rows(vec![vec![Q::from_int(k + 1), Q::from_int(k)], vec![Q::zero(), Q::one()]]))));
        let a = DirSeries::new(Direction::AroundZero, s.clone(), 2, 2);
        let b = DirSeries::new(Direction::AroundZero, s.map(|m| m.transpose()), 2, 2);
        let x = DirSeries::solve_left(&a, &b).unwrap();
        let y = a.inv().unwrap().mul(&b).unwrap();
        assert!(x.diff(&y, &[]).1.is_none());
        let x = DirSeries::solve_right(&b, &a).unwrap();
        let y = b.mul(&a.inv().unwrap()).unwrap();
        assert!(x.diff(&y, &[]).1.is_none());
        let rb = DirSeries::new(Direction::AroundInfinity, reflect(&b.s), 2, 2);
        let ra = DirSeries::new(Direction::AroundInfinity, reflect(&a.s), 2, 2);
        let x = DirSeries::solve_left(&ra, &rb).unwrap();
        let y = ra.inv().unwrap().mul(&rb).unwrap();
        let (cells, m) = x.diff(&y, &[]);
        assert!(cells > 0 && m.is_none());
    }
}
