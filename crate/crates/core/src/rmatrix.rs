//! The trigonometric R-matrix of `gl(n)`, its restriction to `gl(n-1)`,
//! its block form, and exact Yang-Baxter and unitarity checks.

use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::error::{EngineError, Result};
use crate::field::{Coeff, Field};
use crate::linalg::{embed, swap, LegSpace, Mat};
use crate::ratfunc::RatFunc;
use crate::report::{Mismatch, VerificationReport, Window};

/// Tensor placement of the `i > j` off-diagonal family.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Convention {
    /// `E_ij ⊗ E_ij` for `i > j`, as printed.
    Literal,
    /// `E_ij ⊗ E_ji` for `i > j`, the standard trigonometric solution.
    Corrected,
}

impl Convention {
    pub fn name(self) -> &'static str {
        match self {
            Convention::Literal => "literal",
            Convention::Corrected => "corrected",
        }
    }
}

impl std::str::FromStr for Convention {
    type Err = EngineError;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "literal" => Ok(Convention::Literal),
            "corrected" => Ok(Convention::Corrected),
            _ => Err(EngineError::Parse(format!("unknown convention {s:?}"))),
        }
    }
}

/// `R(z)` acting on `C^n ⊗ C^n`, entries rational in `z` over `F ∋ q`.
#[derive(Clone, Debug, PartialEq)]
pub struct RMatrix<F: Field> {
    pub n: usize,
    pub convention: Convention,
    pub q: F,
    pub value: Mat<RatFunc<F>>,
}

/// The four rational weights of the R-matrix: the diagonal `i != j`
/// weight and the `i > j` and `i < j` off-diagonal weights.
pub struct Weights<F: Field> {
    pub diag: RatFunc<F>,
    pub lower: RatFunc<F>,
    pub upper: RatFunc<F>,
}

pub fn weights<F: Field>(q: &F) -> Result<Weights<F>> {
    let z = RatFunc::<F>::var();
    let qc = RatFunc::constant(q.clone());
    let qi = RatFunc::constant(q.inv()?);
    let den = qi.mul(&z).sub(&qc);
    let diag = z.sub(&RatFunc::one()).div(&den)?;
    let lower = qi.sub(&qc).div(&den)?;
    let upper = z.mul(&lower);
    Ok(Weights { diag, lower, upper })
}

fn place<F: Field>(m: &mut Mat<F>, n: usize, (i, j): (usize, usize), (k, l): (usize, usize), v: F) {
    // E_ij ⊗ E_kl
    m.set(i * n + k, j * n + l, v);
}

impl<F: Field> RMatrix<F> {
    pub fn build(n: usize, convention: Convention, q: F) -> Result<Self> {
        if n == 0 {
            return Err(EngineError::ShapeError("n must be positive".into()));
        }
        let w = weights(&q)?;
        let mut m = Mat::zeros(n * n, n * n);
        for i in 0..n {
            for j in 0..n {
                if i == j {
                    place(&mut m, n, (i, i), (i, i), RatFunc::one());
                } else {
                    place(&mut m, n, (i, i), (j, j), w.diag.clone());
                }
                if i > j {
                    match convention {
                        Convention::Literal => place(&mut m, n, (i, j), (i, j), w.lower.clone()),
                        Convention::Corrected => place(&mut m, n, (i, j), (j, i), w.lower.clone()),
                    }
                } else if i < j {
                    place(&mut m, n, (i, j), (j, i), w.upper.clone());
                }
            }
        }
        Ok(RMatrix { n, convention, q, value: m })
    }

    /// `R(value)` for a rational value of the spectral parameter.
    pub fn at(&self, value: &RatFunc<F>) -> Result<Mat<RatFunc<F>>> {
        self.value.try_map(|f| f.substitute(value))
    }

    /// Point evaluation `R(z0)`.
    pub fn eval(&self, z0: &F) -> Result<Mat<F>> {
        self.value.try_map(|f| f.eval(z0))
    }

    /// `R` restricted to `C^{n-1} ⊗ C^{n-1}`.
    pub fn restrict_rbar(&self) -> Result<Self> {
        if self.n < 2 {
            return Err(EngineError::ShapeError("restriction needs n >= 2".into()));
        }
        let m = self.n - 1;
        let idx: Vec<usize> = (0..m).flat_map(|i| (0..m).map(move |j| i * self.n + j)).collect();
        Ok(RMatrix {
            n: m,
            convention: self.convention,
            q: self.q.clone(),
            value: self.value.select(&idx, &idx),
        })
    }

    /// Split `C^n = C^{n-1} ⊕ C e_n` in both factors.
    pub fn block_form(&self) -> Result<RBlockForm<F>> {
        if self.n < 2 {
            return Err(EngineError::ShapeError("block form needs n >= 2".into()));
        }
        let n = self.n;
        let last = n - 1;
        let mut a = Mat::zeros(n * n, n * n);
        let mut b = Mat::zeros(n * n, n * n);
        let mut c = Mat::zeros(n * n, n * n);
        let mut d = Mat::zeros(n * n, n * n);
        for i in 0..last {
            place(&mut a, n, (i, i), (last, last), F::one());
            place(&mut d, n, (last, last), (i, i), F::one());
            place(&mut b, n, (i, last), (last, i), F::one());
            place(&mut c, n, (last, i), (i, last), F::one());
        }
        let w = weights(&self.q)?;
        let form = RBlockForm {
            rbar: self.restrict_rbar()?,
            a_block: a,
            b_block: b,
            c_block: c,
            d_block: d,
            prefactors: [w.diag.clone(), w.upper, w.lower, w.diag],
        };
        if form.reassemble() != self.value {
            return Err(EngineError::ShapeError(format!(
                "{} R-matrix is not of the 2x2 block form",
                self.convention.name()
            )));
        }
        Ok(form)
    }

    pub fn is_permutation_at_one(&self) -> Result<bool> {
        Ok(self.eval(&F::one())? == swap(self.n, self.n))
    }
}

/// Block decomposition `R = Rbar ⊕ [[pA A, pB B], [pC C, pD D]] ⊕ 1`.
#[derive(Clone, Debug)]
pub struct RBlockForm<F: Field> {
    pub rbar: RMatrix<F>,
    pub a_block: Mat<F>,
    pub b_block: Mat<F>,
    pub c_block: Mat<F>,
    pub d_block: Mat<F>,
    /// Prefactors of A, B, C, D in that order.
    pub prefactors: [RatFunc<F>; 4],
}

impl<F: Field> RBlockForm<F> {
    pub fn reassemble(&self) -> Mat<RatFunc<F>> {
        let n = self.rbar.n + 1;
        let m = n - 1;
        let lift = |x: &Mat<F>, p: &RatFunc<F>| x.map(|v| RatFunc::constant(v.clone()).mul(p));
        let mut out = lift(&self.a_block, &self.prefactors[0])
            .add(&lift(&self.b_block, &self.prefactors[1]))
            .add(&lift(&self.c_block, &self.prefactors[2]))
            .add(&lift(&self.d_block, &self.prefactors[3]));
        for i in 0..m {
            for j in 0..m {
                for k in 0..m {
                    for l in 0..m {
                        let v = self.rbar.value.get(i * m + j, k * m + l);
                        if !v.is_zero() {
                            out.set(i * n + j, k * n + l, v.clone());
                        }
                    }
                }
            }
        }
        out.set(n * n - 1, n * n - 1, RatFunc::one());
        out
    }
}

fn first_mismatch<G: Field>(lhs: &Mat<G>, rhs: &Mat<G>, names: &[&str]) -> Option<Mismatch> {
    lhs.entries().zip(rhs.entries()).find(|(a, b)| a.2 != b.2).map(|(a, b)| Mismatch {
        indices: vec![a.0 as i64, a.1 as i64],
        expected: b.2.to_text(names),
        got: a.2.to_text(names),
    })
}

/// `R12(z) R13(zw) R23(w) = R23(w) R13(zw) R12(z)` as an identity of
/// rational functions in two independent variables.
pub fn check_ybe<F: Field>(r: &RMatrix<F>, names: &[&str]) -> Result<VerificationReport> {
    let start = Instant::now();
    type W<F> = RatFunc<F>;
    let n = r.n;
    // z is the outer variable, w the next one
    let q_w: W<F> = RatFunc::constant(r.q.clone());
    let r_z = RMatrix::build(n, r.convention, q_w)?.value;
    let r_w: Mat<RatFunc<W<F>>> = r.value.map(|f| RatFunc::constant(f.clone()));
    let zw = RatFunc::<W<F>>::var().mul(&RatFunc::constant(W::<F>::var()));
    let r_zw = r_z.try_map(|f| f.substitute(&zw))?;
    let space = LegSpace::new(vec![n, n, n])?;
    let r12 = embed(&r_z, &space, &[0, 1])?;
    let r13 = embed(&r_zw, &space, &[0, 2])?;
    let r23 = embed(&r_w, &space, &[1, 2])?;
    let lhs = r12.mul(&r13).mul(&r23);
    let rhs = r23.mul(&r13).mul(&r12);
    let mut full = vec!["z", "w"];
    full.extend_from_slice(names);
    let mm = first_mismatch(&lhs, &rhs, &full);
    Ok(VerificationReport::from_outcome(
        format!("ybe.n{n}.{}", r.convention.name()),
        "R12(z) R13(zw) R23(w) = R23(w) R13(zw) R12(z)",
        Some(Window::entries(lhs.rows() * lhs.cols())),
        mm,
        start,
    ))
}

/// `(P R(z) P)^{-1} = R(1/z)`.
pub fn check_unitarity<F: Field>(r: &RMatrix<F>, names: &[&str]) -> Result<VerificationReport> {
    let start = Instant::now();
    let n = r.n;
    let p: Mat<RatFunc<F>> = swap(n, n);
    let r21 = p.mul(&r.value).mul(&p);
    let inv = r21.inverse()?;
    let zinv = RatFunc::<F>::var().inv()?;
    let r_inv_arg = r.at(&zinv)?;
    let mut full = vec!["z"];
    full.extend_from_slice(names);
    let mm = first_mismatch(&inv, &r_inv_arg, &full);
    Ok(VerificationReport::from_outcome(
        format!("unitarity.n{n}.{}", r.convention.name()),
        "R21(z)^{-1} = R(1/z), R21 = P R P",
        Some(Window::entries(inv.rows() * inv.cols())),
        mm,
        start,
    ))
}

/// `R(1) = P`.
pub fn check_permutation_at_one<F: Field>(r: &RMatrix<F>, names: &[&str]) -> Result<VerificationReport> {
    let start = Instant::now();
    let at_one = r.eval(&F::one())?;
    let p = swap(r.n, r.n);
    let mm = first_mismatch(&at_one, &p, names);
    Ok(VerificationReport::from_outcome(
        format!("r_at_one.n{}.{}", r.n, r.convention.name()),
        "R(1) = P",
        Some(Window::entries(p.rows() * p.cols())),
        mm,
        start,
    ))
}

/// JSON form: `{n, convention, entries}` with entries in canonical text.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct RMatrixJson {
    pub n: usize,
    pub convention: Convention,
    pub variables: Vec<String>,
    pub entries: Vec<Vec<String>>,
}

impl<F: Field> RMatrix<F> {
    pub fn to_json(&self, names: &[&str]) -> RMatrixJson {
        let mut full = vec!["z"];
        full.extend_from_slice(names);
        let entries = (0..self.value.rows())
            .map(|i| (0..self.value.cols()).map(|j| self.value.get(i, j).to_text(&full)).collect())
            .collect();
        RMatrixJson {
            n: self.n,
            convention: self.convention,
            variables: full.iter().map(|s| s.to_string()).collect(),
            entries,
        }
    }
}
