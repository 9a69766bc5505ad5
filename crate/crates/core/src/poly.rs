//! Dense univariate polynomials over a field.

use crate::error::{EngineError, Result};
use crate::field::Field;

/// Dense polynomial, coefficients stored lowest degree first, never with a
/// trailing zero. The zero polynomial has no coefficients.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Poly<F> {
    coeffs: Vec<F>,
}

impl<F: Field> Poly<F> {
    pub fn zero() -> Self {
        Poly { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Self::constant(F::one())
    }

    pub fn constant(c: F) -> Self {
        Self::from_coeffs(vec![c])
    }

    /// The indeterminate `x`.
    pub fn x() -> Self {
        Self::monomial(F::one(), 1)
    }

    pub fn monomial(c: F, deg: usize) -> Self {
        let mut v = vec![F::zero(); deg + 1];
        v[deg] = c;
        Self::from_coeffs(v)
    }

    pub fn from_coeffs(mut coeffs: Vec<F>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    pub fn coeffs(&self) -> &[F] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> F {
        self.coeffs.get(k).cloned().unwrap_or_else(F::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.len() <= 1
    }

    pub fn lead(&self) -> F {
        self.coeffs.last().cloned().unwrap_or_else(F::zero)
    }

    /// Order of vanishing at zero; `None` for the zero polynomial.
    pub fn valuation(&self) -> Option<usize> {
        self.coeffs.iter().position(|c| !c.is_zero())
    }

    /// True for `c * x^k`.
    pub fn is_monomial(&self) -> bool {
        match self.valuation() {
            Some(v) => v + 1 == self.coeffs.len(),
            None => false,
        }
    }

    pub fn add(&self, o: &Self) -> Self {
        let n = self.coeffs.len().max(o.coeffs.len());
        let v = (0..n)
            .map(|k| match (self.coeffs.get(k), o.coeffs.get(k)) {
                (Some(a), Some(b)) => a.add(b),
                (Some(a), None) => a.clone(),
                (None, Some(b)) => b.clone(),
                (None, None) => unreachable!(),
            })
            .collect();
        Self::from_coeffs(v)
    }

    pub fn neg(&self) -> Self {
        Poly { coeffs: self.coeffs.iter().map(|c| c.neg()).collect() }
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }

    pub fn mul(&self, o: &Self) -> Self {
        if self.is_zero() || o.is_zero() {
            return Self::zero();
        }
        let mut v = vec![F::zero(); self.coeffs.len() + o.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.coeffs.iter().enumerate() {
                if b.is_zero() {
                    continue;
                }
                v[i + j] = v[i + j].add(&a.mul(b));
            }
        }
        Self::from_coeffs(v)
    }

    pub fn scale(&self, c: &F) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        Poly { coeffs: self.coeffs.iter().map(|a| a.mul(c)).collect() }
    }

    /// Multiply by `x^k`.
    pub fn shift(&self, k: usize) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        let mut v = vec![F::zero(); k];
        v.extend(self.coeffs.iter().cloned());
        Poly { coeffs: v }
    }

    /// Divide by `x^k`, which must divide the polynomial.
    pub fn unshift(&self, k: usize) -> Self {
        debug_assert!(self.valuation().is_none_or(|v| v >= k));
        Poly { coeffs: self.coeffs.iter().skip(k).cloned().collect() }
    }

    pub fn monic(&self) -> Result<Self> {
        if self.is_zero() {
            return Ok(Self::zero());
        }
        let inv = self.lead().inv()?;
        Ok(self.scale(&inv))
    }

    pub fn div_rem(&self, d: &Self) -> Result<(Self, Self)> {
        let dd = d
            .degree()
            .ok_or_else(|| EngineError::DegenerateScalar("polynomial division by zero".into()))?;
        let lead_inv = d.lead().inv()?;
        let mut rem = self.coeffs.clone();
        if rem.len() <= dd {
            return Ok((Self::zero(), self.clone()));
        }
        let mut quot = vec![F::zero(); rem.len() - dd];
        for k in (dd..rem.len()).rev() {
            if rem[k].is_zero() {
                continue;
            }
            let c = rem[k].mul(&lead_inv);
            for (j, dc) in d.coeffs.iter().enumerate() {
                if !dc.is_zero() {
                    rem[k - dd + j] = rem[k - dd + j].sub(&c.mul(dc));
                }
            }
            quot[k - dd] = c;
        }
        rem.truncate(dd);
        Ok((Self::from_coeffs(quot), Self::from_coeffs(rem)))
    }

    /// Monic greatest common divisor.
    pub fn gcd(&self, o: &Self) -> Self {
        if self.is_zero() {
            return o.monic().expect("nonzero lead");
        }
        if o.is_zero() {
            return self.monic().expect("nonzero lead");
        }
        if self.is_constant() || o.is_constant() {
            return Self::one();
        }
        if self.is_monomial() || o.is_monomial() {
            let v = self.valuation().unwrap().min(o.valuation().unwrap());
            return Self::monomial(F::one(), v);
        }
        if let Some(g) = F::poly_gcd(self, o) {
            return g;
        }
        let (mut a, mut b) = (self.monic().expect("nonzero lead"), o.monic().expect("nonzero lead"));
        while !b.is_zero() {
            let (_, r) = a.div_rem(&b).expect("nonzero divisor");
            a = b;
            b = if r.is_zero() { r } else { r.monic().expect("nonzero lead") };
        }
        a
    }

    /// Returns `(g, s, t)` with `s*self + t*o = g`, `g` monic.
    pub fn ext_gcd(&self, o: &Self) -> Result<(Self, Self, Self)> {
        let (mut r0, mut r1) = (self.clone(), o.clone());
        let (mut s0, mut s1) = (Self::one(), Self::zero());
        let (mut t0, mut t1) = (Self::zero(), Self::one());
        while !r1.is_zero() {
            let (q, r) = r0.div_rem(&r1)?;
            let s = s0.sub(&q.mul(&s1));
            let t = t0.sub(&q.mul(&t1));
            r0 = std::mem::replace(&mut r1, r);
            s0 = std::mem::replace(&mut s1, s);
            t0 = std::mem::replace(&mut t1, t);
        }
        if r0.is_zero() {
            return Ok((r0, s0, t0));
        }
        let li = r0.lead().inv()?;
        Ok((r0.scale(&li), s0.scale(&li), t0.scale(&li)))
    }

    /// Inverse of `self` modulo `m`; fails when they share a factor.
    pub fn inv_mod(&self, m: &Self) -> Result<Self> {
        let (g, s, _) = self.ext_gcd(m)?;
        if g.degree() != Some(0) {
            return Err(EngineError::DegenerateScalar(
                "polynomial not invertible modulo the given modulus".into(),
            ));
        }
        Ok(s.div_rem(m)?.1)
    }

    pub fn eval(&self, x: &F) -> F {
        self.coeffs.iter().rev().fold(F::zero(), |acc, c| acc.mul(x).add(c))
    }

    /// Coefficients reversed to degree `deg`: `x^deg * p(1/x)`.
    pub fn reversed(&self, deg: usize) -> Self {
        let mut v: Vec<F> = (0..=deg).map(|k| self.coeff(k)).collect();
        v.reverse();
        Self::from_coeffs(v)
    }

    pub fn map<G: Field>(&self, f: impl Fn(&F) -> G) -> Poly<G> {
        Poly::from_coeffs(self.coeffs.iter().map(f).collect())
    }

    /// Infix text with the given indeterminate names, highest degree first.
    pub fn write_text(&self, names: &[&str], out: &mut String) {
        if self.is_zero() {
            out.push('0');
            return;
        }
        let var = names.first().copied().unwrap_or("x");
        let inner = names.get(1..).unwrap_or(&[]);
        let mut first = true;
        for k in (0..self.coeffs.len()).rev() {
            let c = &self.coeffs[k];
            if c.is_zero() {
                continue;
            }
            let mut ct = String::new();
            c.write_text(inner, &mut ct);
            let negative = c.is_atomic() && ct.starts_with('-');
            if !first {
                out.push_str(if negative { " - " } else { " + " });
            } else if negative {
                out.push('-');
            }
            first = false;
            let body = if negative { &ct[1..] } else { &ct[..] };
            if k == 0 {
                if c.is_atomic() {
                    out.push_str(body);
                } else {
                    out.push('(');
                    out.push_str(body);
                    out.push(')');
                }
                continue;
            }
            if body != "1" {
                if c.is_atomic() {
                    out.push_str(body);
                } else {
                    out.push('(');
                    out.push_str(body);
                    out.push(')');
                }
                out.push('*');
            }
            out.push_str(var);
            if k > 1 {
                out.push('^');
                out.push_str(&k.to_string());
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::Rational;

    fn p(v: &[i64]) -> Poly<Rational> {
        Poly::from_coeffs(v.iter().map(|&c| Rational::from_int(c)).collect())
    }

    #[test]
    fn product_matches_convolution() {
        // (q - 1)(q + 1) = q^2 - 1
        assert_eq!(p(&[-1, 1]).mul(&p(&[1, 1])), p(&[-1, 0, 1]));
    }

    #[test]
    fn division_with_remainder() {
        let (q, r) = p(&[1, 0, 1]).div_rem(&p(&[-1, 1])).unwrap();
        assert_eq!(q, p(&[1, 1]));
        assert_eq!(r, p(&[2]));
    }

    #[test]
    fn gcd_is_monic_common_factor() {
        let a = p(&[-1, 0, 1]).mul(&p(&[3, 1]));
        let b = p(&[-2, 2]).mul(&p(&[5, 0, 1]));
        assert_eq!(a.gcd(&b), p(&[-1, 1]));
    }

    #[test]
    fn inverse_mod() {
        let m = p(&[-2, 0, 1]);
        let a = p(&[1, 1]);
        let inv = a.inv_mod(&m).unwrap();
        assert_eq!(a.mul(&inv).div_rem(&m).unwrap().1, p(&[1]));
        assert!(p(&[0, 1]).mul(&p(&[1, 1])).inv_mod(&p(&[1, 1])).is_err());
    }

    #[test]
    fn text_form() {
        let mut s = String::new();
        p(&[-1, 0, 2]).write_text(&["q"], &mut s);
        assert_eq!(s, "2*q^2 - 1");
    }
}
