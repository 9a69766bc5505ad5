//! The field abstraction every layer of the engine is generic over.
//!
//! Towers such as `Q(q)(a)(z)` are built by nesting [`RatFunc`](crate::RatFunc)
//! over [`Rational`]. Methods use plain names (`add`, `mul`, ...) taking
//! references; `std::ops` is deliberately not used in generic code.

use std::fmt::Debug;
use std::hash::Hash;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{EngineError, Result};

/// Ring operations shared by scalars and matrices. Multiplication need not
/// commute.
pub trait Coeff: Clone + PartialEq + Debug + Send + Sync {
    fn add(&self, other: &Self) -> Self;
    fn sub(&self, other: &Self) -> Self;
    fn mul(&self, other: &Self) -> Self;
    fn neg(&self) -> Self;
    fn is_zero(&self) -> bool;
}

/// A commutative field with exact equality.
pub trait Field: Coeff + Eq + Hash + 'static {
    fn zero() -> Self;
    fn one() -> Self;
    fn from_rational(r: &BigRational) -> Self;

    fn inv(&self) -> Result<Self>;

    fn is_one(&self) -> bool {
        *self == Self::one()
    }

    fn from_int(i: i64) -> Self {
        Self::from_rational(&BigRational::from_integer(BigInt::from(i)))
    }

    fn div(&self, other: &Self) -> Result<Self> {
        Ok(self.mul(&other.inv()?))
    }

    fn pow(&self, e: i64) -> Result<Self> {
        let base = if e < 0 { self.inv()? } else { self.clone() };
        let mut acc = Self::one();
        let mut sq = base;
        let mut k = e.unsigned_abs();
        while k > 0 {
            if k & 1 == 1 {
                acc = acc.mul(&sq);
            }
            k >>= 1;
            if k > 0 {
                sq = sq.mul(&sq);
            }
        }
        Ok(acc)
    }

    /// Number of nested indeterminates in the tower (0 for `Q`).
    fn depth() -> usize;

    /// The indeterminate at `level` of the tower, `0` being the outermost.
    fn generator(level: usize) -> Option<Self>;

    /// Monic gcd of two nonconstant polynomials over this field, when the
    /// field knows a better route than Euclid's algorithm.
    fn poly_gcd(_a: &crate::poly::Poly<Self>, _b: &crate::poly::Poly<Self>) -> Option<crate::poly::Poly<Self>> {
        None
    }

    /// Canonical infix text. `names[0]` names the outermost indeterminate.
    fn write_text(&self, names: &[&str], out: &mut String);

    /// True when the canonical text is a single atom or a signed atom and
    /// needs no parentheses as a factor.
    fn is_atomic(&self) -> bool;

    fn to_text(&self, names: &[&str]) -> String {
        let mut s = String::new();
        self.write_text(names, &mut s);
        s
    }
}

/// Arbitrary-precision rational number, always in lowest terms.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct Rational(pub BigRational);

impl Rational {
    pub fn new(num: i64, den: i64) -> Self {
        Rational(BigRational::new(BigInt::from(num), BigInt::from(den)))
    }

    pub fn inner(&self) -> &BigRational {
        &self.0
    }

    pub fn parse(s: &str) -> Result<Self> {
        let s = s.trim();
        let parse_int = |t: &str| {
            t.trim()
                .parse::<BigInt>()
                .map_err(|e| EngineError::Parse(format!("bad integer {t:?}: {e}")))
        };
        match s.split_once('/') {
            Some((n, d)) => {
                let d = parse_int(d)?;
                if d.is_zero() {
                    return Err(EngineError::DegenerateScalar("zero denominator".into()));
                }
                Ok(Rational(BigRational::new(parse_int(n)?, d)))
            }
            None => Ok(Rational(BigRational::from_integer(parse_int(s)?))),
        }
    }
}

impl Coeff for Rational {
    fn add(&self, o: &Self) -> Self {
        Rational(&self.0 + &o.0)
    }
    fn sub(&self, o: &Self) -> Self {
        Rational(&self.0 - &o.0)
    }
    fn mul(&self, o: &Self) -> Self {
        Rational(&self.0 * &o.0)
    }
    fn neg(&self) -> Self {
        Rational(-&self.0)
    }
    fn is_zero(&self) -> bool {
        self.0.is_zero()
    }
}

impl Field for Rational {
    fn zero() -> Self {
        Rational(BigRational::zero())
    }
    fn one() -> Self {
        Rational(BigRational::one())
    }
    fn from_rational(r: &BigRational) -> Self {
        Rational(r.clone())
    }
    fn inv(&self) -> Result<Self> {
        if self.0.is_zero() {
            return Err(EngineError::DegenerateScalar("division by zero".into()));
        }
        Ok(Rational(self.0.recip()))
    }
    fn is_one(&self) -> bool {
        self.0.is_one()
    }
    fn depth() -> usize {
        0
    }
    fn generator(_level: usize) -> Option<Self> {
        None
    }
    fn write_text(&self, _names: &[&str], out: &mut String) {
        if self.0.is_integer() {
            out.push_str(&self.0.numer().to_string());
        } else {
            out.push_str(&format!("{}/{}", self.0.numer(), self.0.denom()));
        }
    }
    fn is_atomic(&self) -> bool {
        self.0.is_integer()
    }
}
