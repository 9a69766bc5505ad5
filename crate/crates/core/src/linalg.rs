//! Dense exact matrices, tensor-leg embeddings and fraction-free inversion.

use crate::error::{EngineError, Result};
use crate::field::{Coeff, Field};

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Mat<F> {
    rows: usize,
    cols: usize,
    data: Vec<F>,
}

impl<F: Field> Mat<F> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Mat { rows, cols, data: vec![F::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        Self::scalar(n, F::one())
    }

    pub fn scalar(n: usize, c: F) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = c.clone();
        }
        m
    }

    /// Matrix unit `E_ij`.
    pub fn unit(n: usize, i: usize, j: usize) -> Self {
        let mut m = Self::zeros(n, n);
        m.data[i * n + j] = F::one();
        m
    }

    pub fn from_fn(rows: usize, cols: usize, f: impl Fn(usize, usize) -> F) -> Self {
        let data = (0..rows * cols).map(|k| f(k / cols, k % cols)).collect();
        Mat { rows, cols, data }
    }

    pub fn from_rows(rows: Vec<Vec<F>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        assert!(rows.iter().all(|x| x.len() == c), "ragged rows");
        Mat { rows: r, cols: c, data: rows.into_iter().flatten().collect() }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn get(&self, i: usize, j: usize) -> &F {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: F) {
        self.data[i * self.cols + j] = v;
    }

    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, &F)> {
        self.data.iter().enumerate().map(move |(k, v)| (k / self.cols, k % self.cols, v))
    }

    pub fn map<G: Field>(&self, f: impl Fn(&F) -> G) -> Mat<G> {
        Mat { rows: self.rows, cols: self.cols, data: self.data.iter().map(f).collect() }
    }

    pub fn try_map<G: Field>(&self, f: impl Fn(&F) -> Result<G>) -> Result<Mat<G>> {
        let data = self.data.iter().map(f).collect::<Result<Vec<_>>>()?;
        Ok(Mat { rows: self.rows, cols: self.cols, data })
    }

    pub fn scale(&self, c: &F) -> Self {
        self.map(|x| x.mul(c))
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self.get(j, i).clone())
    }

    pub fn is_identity(&self) -> bool {
        self.rows == self.cols && self.entries().all(|(i, j, v)| if i == j { v.is_one() } else { v.is_zero() })
    }

    /// Kronecker product `self ⊗ o` with `self`'s index major.
    pub fn kron(&self, o: &Self) -> Self {
        let (r, c) = (self.rows * o.rows, self.cols * o.cols);
        let mut m = Self::zeros(r, c);
        for (i, j, a) in self.entries() {
            if a.is_zero() {
                continue;
            }
            for (k, l, b) in o.entries() {
                if !b.is_zero() {
                    m.set(i * o.rows + k, j * o.cols + l, a.mul(b));
                }
            }
        }
        m
    }

    /// Sub-matrix on the given row and column index lists.
    pub fn select(&self, rows: &[usize], cols: &[usize]) -> Self {
        Self::from_fn(rows.len(), cols.len(), |i, j| self.get(rows[i], cols[j]).clone())
    }

    pub fn checked_mul(&self, o: &Self) -> Result<Self> {
        if self.cols != o.rows {
            return Err(EngineError::ShapeError(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, o.rows, o.cols
            )));
        }
        Ok(self.mul(o))
    }

    /// Inverse by fraction-free (Bareiss) elimination on `[M | I]`.
    ///
    /// Every pivot step divides exactly by the previous pivot, so entries
    /// stay minors of the input; the final scaling divides by `det M`.
    #[allow(clippy::needless_range_loop)]
    pub fn inverse(&self) -> Result<Self> {
        if self.rows != self.cols {
            return Err(EngineError::ShapeError("inverse of a non-square matrix".into()));
        }
        if F::depth() > 0 {
            return self.inverse_sparse();
        }
        let n = self.rows;
        let w = 2 * n;
        let mut a: Vec<Vec<F>> = (0..n)
            .map(|i| {
                let mut row: Vec<F> = (0..n).map(|j| self.get(i, j).clone()).collect();
                row.extend((0..n).map(|j| if i == j { F::one() } else { F::zero() }));
                row
            })
            .collect();
        let mut prev = F::one();
        for k in 0..n {
            let p = (k..n).find(|&r| !a[r][k].is_zero()).ok_or(EngineError::SingularMatrix)?;
            a.swap(p, k);
            let prev_inv = prev.inv()?;
            for i in 0..n {
                if i == k {
                    continue;
                }
                let aik = a[i][k].clone();
                let akk = a[k][k].clone();
                for j in 0..w {
                    if j == k {
                        continue;
                    }
                    let lhs = akk.mul(&a[i][j]);
                    let v = if aik.is_zero() { lhs } else { lhs.sub(&aik.mul(&a[k][j])) };
                    a[i][j] = v.mul(&prev_inv);
                }
                a[i][k] = F::zero();
            }
            prev = a[k][k].clone();
        }
        // [D | D M^-1] with D diagonal
        let mut inv = Self::zeros(n, n);
        for i in 0..n {
            let pi = a[i][i].inv()?;
            for j in 0..n {
                inv.set(i, j, a[i][n + j].mul(&pi));
            }
        }
        Ok(inv)
    }

    /// Gauss-Jordan over the field, touching only rows with a nonzero
    /// multiplier. Over rational-function fields every entry operation costs
    /// a gcd, so untouched zeros matter more than fraction-freeness.
    fn inverse_sparse(&self) -> Result<Self> {
        let n = self.rows;
        let mut a: Vec<Vec<F>> = (0..n)
            .map(|i| {
                let mut row: Vec<F> = (0..n).map(|j| self.get(i, j).clone()).collect();
                row.extend((0..n).map(|j| if i == j { F::one() } else { F::zero() }));
                row
            })
            .collect();
        for k in 0..n {
            let p = (k..n).find(|&r| !a[r][k].is_zero()).ok_or(EngineError::SingularMatrix)?;
            a.swap(p, k);
            let pinv = a[k][k].inv()?;
            if !pinv.is_one() {
                for x in a[k].iter_mut() {
                    if !x.is_zero() {
                        *x = x.mul(&pinv);
                    }
                }
            }
            let pivot = a[k].clone();
            for (i, row) in a.iter_mut().enumerate() {
                if i == k || row[k].is_zero() {
                    continue;
                }
                let m = row[k].clone();
                for (x, p) in row.iter_mut().zip(&pivot) {
                    if !p.is_zero() {
                        *x = x.sub(&m.mul(p));
                    }
                }
            }
        }
        Ok(Mat::from_fn(n, n, |i, j| a[i][n + j].clone()))
    }
}

impl<F: Field> Coeff for Mat<F> {
    fn add(&self, o: &Self) -> Self {
        assert_eq!(self.shape(), o.shape(), "matrix shape mismatch in add");
        Mat {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&o.data).map(|(a, b)| a.add(b)).collect(),
        }
    }

    fn sub(&self, o: &Self) -> Self {
        assert_eq!(self.shape(), o.shape(), "matrix shape mismatch in sub");
        Mat {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&o.data).map(|(a, b)| a.sub(b)).collect(),
        }
    }

    fn mul(&self, o: &Self) -> Self {
        assert_eq!(self.cols, o.rows, "matrix shape mismatch in mul");
        let mut m = Self::zeros(self.rows, o.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..o.cols {
                    let b = o.get(k, j);
                    if !b.is_zero() {
                        let idx = i * o.cols + j;
                        m.data[idx] = m.data[idx].add(&a.mul(b));
                    }
                }
            }
        }
        m
    }

    fn neg(&self) -> Self {
        self.map(|x| x.neg())
    }

    fn is_zero(&self) -> bool {
        self.data.iter().all(|x| x.is_zero())
    }
}

/// Dimensions of the tensor factors of a space, e.g. `[n, n, n]` for the
/// triple product in the Yang-Baxter equation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LegSpace {
    dims: Vec<usize>,
}

impl LegSpace {
    pub fn new(dims: Vec<usize>) -> Result<Self> {
        if dims.contains(&0) {
            return Err(EngineError::ShapeError("tensor factor of dimension 0".into()));
        }
        Ok(LegSpace { dims })
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn total(&self) -> usize {
        self.dims.iter().product()
    }
}

fn digits(mut idx: usize, dims: &[usize]) -> Vec<usize> {
    let mut d = vec![0; dims.len()];
    for k in (0..dims.len()).rev() {
        d[k] = idx % dims[k];
        idx /= dims[k];
    }
    d
}

fn flatten(d: &[usize], dims: &[usize]) -> usize {
    d.iter().zip(dims).fold(0, |acc, (x, n)| acc * n + x)
}

/// Rectangular embedding: `op` maps the chosen legs from dimensions
/// `in_dims` to `out_dims`; other legs carry the identity and must have
/// equal input and output dimension. Legs are listed in the order the
/// operator's own tensor factors appear.
pub fn embed_rect<F: Field>(
    op: &Mat<F>,
    in_dims: &[usize],
    out_dims: &[usize],
    legs: &[usize],
) -> Result<Mat<F>> {
    if in_dims.len() != out_dims.len() {
        return Err(EngineError::ShapeError("leg count mismatch".into()));
    }
    if legs.iter().any(|&l| l >= in_dims.len()) {
        return Err(EngineError::ShapeError("leg index out of range".into()));
    }
    for (k, (a, b)) in in_dims.iter().zip(out_dims).enumerate() {
        if !legs.contains(&k) && a != b {
            return Err(EngineError::ShapeError(format!("identity leg {k} changes dimension")));
        }
    }
    let op_in: Vec<usize> = legs.iter().map(|&l| in_dims[l]).collect();
    let op_out: Vec<usize> = legs.iter().map(|&l| out_dims[l]).collect();
    if op.rows() != op_out.iter().product::<usize>() || op.cols() != op_in.iter().product::<usize>() {
        return Err(EngineError::ShapeError(format!(
            "operator is {}x{}, legs need {}x{}",
            op.rows(),
            op.cols(),
            op_out.iter().product::<usize>(),
            op_in.iter().product::<usize>()
        )));
    }
    let rows: usize = out_dims.iter().product();
    let cols: usize = in_dims.iter().product();
    let mut m = Mat::zeros(rows, cols);
    for (r, c, v) in op.entries() {
        if v.is_zero() {
            continue;
        }
        let rd = digits(r, &op_out);
        let cd = digits(c, &op_in);
        // iterate over identity legs
        let free: Vec<usize> = (0..in_dims.len()).filter(|k| !legs.contains(k)).collect();
        let free_dims: Vec<usize> = free.iter().map(|&k| in_dims[k]).collect();
        let count: usize = free_dims.iter().product();
        for f in 0..count {
            let fd = digits(f, &free_dims);
            let mut out = vec![0; in_dims.len()];
            let mut inn = vec![0; in_dims.len()];
            for (t, &k) in free.iter().enumerate() {
                out[k] = fd[t];
                inn[k] = fd[t];
            }
            for (t, &k) in legs.iter().enumerate() {
                out[k] = rd[t];
                inn[k] = cd[t];
            }
            m.set(flatten(&out, out_dims), flatten(&inn, in_dims), v.clone());
        }
    }
    Ok(m)
}

/// Square embedding of `op` onto `legs` of `space`.
pub fn embed<F: Field>(op: &Mat<F>, space: &LegSpace, legs: &[usize]) -> Result<Mat<F>> {
    embed_rect(op, space.dims(), space.dims(), legs)
}

/// Permutation operator on `C^a ⊗ C^b` swapping the factors.
pub fn swap<F: Field>(a: usize, b: usize) -> Mat<F> {
    let mut m = Mat::zeros(a * b, a * b);
    for i in 0..a {
        for j in 0..b {
            m.set(j * a + i, i * b + j, F::one());
        }
    }
    m
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::Rational;
    use crate::ratfunc::ScalarQ;

    fn r(i: i64) -> Rational {
        Rational::from_int(i)
    }

    #[test]
    fn embed_identity_and_swap() {
        let sp = LegSpace::new(vec![3, 3]).unwrap();
        let e = embed(&Mat::<Rational>::identity(3), &sp, &[0]).unwrap();
        assert!(e.is_identity());
        let p = swap::<Rational>(2, 2);
        let sp2 = LegSpace::new(vec![2, 2]).unwrap();
        let emb = embed(&p, &sp2, &[0, 1]).unwrap();
        // rows (1,3,2,4): basis e1e1, e2e1, e1e2, e2e2
        let perm: Vec<usize> = (0..4).map(|i| (0..4).find(|&j| emb.get(i, j).is_one()).unwrap()).collect();
        assert_eq!(perm, vec![0, 2, 1, 3]);
        // embedding on reversed legs is the swap conjugate
        let a = Mat::from_rows(vec![vec![r(1), r(2)], vec![r(3), r(4)]]);
        let b = Mat::from_rows(vec![vec![r(0), r(5)], vec![r(7), r(1)]]);
        let ab = a.kron(&b);
        assert_eq!(embed(&ab, &sp2, &[1, 0]).unwrap(), p.mul(&ab).mul(&p));
    }

    #[test]
    fn disjoint_legs_commute() {
        let a = Mat::from_rows(vec![vec![r(1), r(2)], vec![r(3), r(4)]]);
        let b = Mat::from_rows(vec![vec![r(0), r(5)], vec![r(7), r(1)]]);
        let sp = LegSpace::new(vec![2, 2, 2]).unwrap();
        let lhs = embed(&a.kron(&b), &sp, &[0, 2]).unwrap();
        let ea = embed(&a, &sp, &[0]).unwrap();
        let eb = embed(&b, &sp, &[2]).unwrap();
        assert_eq!(lhs, ea.mul(&eb));
        assert_eq!(lhs, eb.mul(&ea));
    }

    #[test]
    fn inverse_diag_and_singular() {
        let d = Mat::from_rows(vec![vec![r(2), r(0)], vec![r(0), r(5)]]);
        let inv = d.inverse().unwrap();
        assert_eq!(*inv.get(0, 0), Rational::new(1, 2));
        assert_eq!(*inv.get(1, 1), Rational::new(1, 5));
        let s = Mat::from_rows(vec![vec![r(1), r(2)], vec![r(2), r(4)]]);
        assert_eq!(s.inverse(), Err(EngineError::SingularMatrix));
        assert!(Mat::<Rational>::identity(4).inverse().unwrap().is_identity());
    }

    #[test]
    fn inverse_over_rational_functions() {
        let q = ScalarQ::var();
        let c = |i: i64| ScalarQ::from_int(i);
        let m = Mat::from_rows(vec![
            vec![q.clone(), c(1), c(0)],
            vec![c(2), q.mul(&q), c(1)],
            vec![c(0), q.sub(&c(1)), c(3)],
        ]);
        let inv = m.inverse().unwrap();
        assert!(m.mul(&inv).is_identity());
        assert!(inv.mul(&m).is_identity());
    }
}
