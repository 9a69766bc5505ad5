//! JSON coefficient tables for L-pairs and Gauss factors.
//!
//! A series of matrices is stored as its window, the two exactness flags and
//! the nonzero coefficients keyed by `(i, j, exponent)`, values in canonical
//! text. The same table type serves L-pairs and Gauss factors.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{EngineError, Result};
use crate::field::{Coeff, Field};
use crate::gauss::{BlockOp, DirSeries, GaussFactors, Sign};
use crate::linalg::Mat;
use crate::loperator::LPair;
use crate::parse::parse_scalar;
use crate::ratfunc::RatFunc;
use crate::series::{Direction, TruncSeries};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Entry {
    pub i: usize,
    pub j: usize,
    pub exponent: i64,
    pub value: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeriesTable {
    pub rows: usize,
    pub cols: usize,
    pub window: [i64; 2],
    pub zero_below: bool,
    pub zero_above: bool,
    pub entries: Vec<Entry>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RationalEntry {
    pub i: usize,
    pub j: usize,
    pub value: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LPairJson {
    pub n: usize,
    pub dim: usize,
    pub order: i64,
    /// Names of the scalar indeterminates, outermost first; the spectral
    /// variable of `rational` and `rho` is `z`.
    pub variables: Vec<String>,
    pub rho: String,
    pub transposed: bool,
    pub rational: Vec<RationalEntry>,
    pub lplus: SeriesTable,
    pub lminus: SeriesTable,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GaussJson {
    pub sign: String,
    pub variables: Vec<String>,
    /// `K`, `k`, `e`, `f`.
    pub blocks: BTreeMap<String, SeriesTable>,
}

pub fn series_table<F: Field>(s: &TruncSeries<Mat<F>>, rows: usize, cols: usize, names: &[&str]) -> SeriesTable {
    let mut entries = Vec::new();
    for (k, m) in s.terms() {
        for (i, j, x) in m.entries() {
            if !x.is_zero() {
                entries.push(Entry { i, j, exponent: k, value: x.to_text(names) });
            }
        }
    }
    entries.sort_by_key(|e| (e.i, e.j, e.exponent));
    let (lo, hi) = s.window();
    SeriesTable { rows, cols, window: [lo, hi], zero_below: s.zero_below(), zero_above: s.zero_above(), entries }
}

pub fn series_from_table<F: Field>(t: &SeriesTable, names: &[&str]) -> Result<TruncSeries<Mat<F>>> {
    let [lo, hi] = t.window;
    let mut coeffs: BTreeMap<i64, Mat<F>> = BTreeMap::new();
    for e in &t.entries {
        if e.i >= t.rows || e.j >= t.cols {
            return Err(EngineError::ShapeError(format!("entry ({}, {}) outside {}x{}", e.i, e.j, t.rows, t.cols)));
        }
        if e.exponent < lo || e.exponent > hi {
            return Err(EngineError::WindowUnderflow(format!("exponent {} outside [{lo}, {hi}]", e.exponent)));
        }
        let m = coeffs.entry(e.exponent).or_insert_with(|| Mat::zeros(t.rows, t.cols));
        m.set(e.i, e.j, parse_scalar(&e.value, names)?);
    }
    Ok(TruncSeries::new(lo, hi, t.zero_below, t.zero_above, coeffs))
}

fn with_z<'a>(names: &[&'a str]) -> Vec<&'a str> {
    let mut full = vec!["z"];
    full.extend_from_slice(names);
    full
}

pub fn export_lpair<F: Field>(lp: &LPair<F>, names: &[&str]) -> LPairJson {
    let size = lp.n * lp.dim;
    let full = with_z(names);
    let rational = lp
        .rational
        .entries()
        .filter(|e| !e.2.is_zero())
        .map(|(i, j, x)| RationalEntry { i, j, value: x.to_text(&full) })
        .collect();
    LPairJson {
        n: lp.n,
        dim: lp.dim,
        order: lp.order,
        variables: names.iter().map(|s| s.to_string()).collect(),
        rho: lp.rho.to_text(&full),
        transposed: lp.transposed,
        rational,
        lplus: series_table(&lp.lplus, size, size, names),
        lminus: series_table(&lp.lminus, size, size, names),
    }
}

pub fn import_lpair<F: Field>(j: &LPairJson) -> Result<LPair<F>> {
    let names: Vec<&str> = j.variables.iter().map(|s| s.as_str()).collect();
    let full = with_z(&names);
    let size = j.n * j.dim;
    let mut rational = Mat::zeros(size, size);
    for e in &j.rational {
        if e.i >= size || e.j >= size {
            return Err(EngineError::ShapeError(format!("entry ({}, {}) outside {size}x{size}", e.i, e.j)));
        }
        rational.set(e.i, e.j, parse_scalar::<RatFunc<F>>(&e.value, &full)?);
    }
    Ok(LPair {
        n: j.n,
        dim: j.dim,
        order: j.order,
        rational,
        lplus: series_from_table(&j.lplus, &names)?,
        lminus: series_from_table(&j.lminus, &names)?,
        rho: parse_scalar(&j.rho, &full)?,
        transposed: j.transposed,
    })
}

pub fn export_gauss<F: Field>(g: &GaussFactors<DirSeries<F>>, names: &[&str]) -> GaussJson {
    let mut blocks = BTreeMap::new();
    for (key, b) in [("K", &g.kk), ("k", &g.kscal), ("e", &g.e), ("f", &g.f)] {
        let (rows, cols) = b.shape();
        blocks.insert(key.to_string(), series_table(&b.s, rows, cols, names));
    }
    GaussJson { sign: g.sign.name().to_string(), variables: names.iter().map(|s| s.to_string()).collect(), blocks }
}

pub fn import_gauss<F: Field>(j: &GaussJson) -> Result<GaussFactors<DirSeries<F>>> {
    let names: Vec<&str> = j.variables.iter().map(|s| s.as_str()).collect();
    let sign = match j.sign.as_str() {
        "plus" => Sign::Plus,
        "minus" => Sign::Minus,
        other => return Err(EngineError::Parse(format!("unknown sign {other:?}"))),
    };
    let dir: Direction = sign.direction();
    let block = |key: &str| -> Result<DirSeries<F>> {
        let t = j.blocks.get(key).ok_or_else(|| EngineError::Parse(format!("missing block {key:?}")))?;
        Ok(DirSeries::new(dir, series_from_table(t, &names)?, t.rows, t.cols))
    };
    Ok(GaussFactors { kk: block("K")?, kscal: block("k")?, e: block("e")?, f: block("f")?, sign })
}
