//! Univariate rational functions over a field, kept in canonical form.

use num_rational::BigRational;

use crate::error::{EngineError, Result};
use crate::field::{Coeff, Field, Rational};
use crate::poly::Poly;

/// `num / den` with `gcd(num, den) = 1` and `den` monic. Two values are
/// equal iff their fields are identical.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct RatFunc<F> {
    num: Poly<F>,
    den: Poly<F>,
}

/// Rational functions in `q` over the rationals.
pub type ScalarQ = RatFunc<Rational>;

impl<F: Field> RatFunc<F> {
    pub fn new(num: Poly<F>, den: Poly<F>) -> Result<Self> {
        if den.is_zero() {
            return Err(EngineError::DegenerateScalar("zero denominator".into()));
        }
        Ok(Self::normalize(num, den))
    }

    fn normalize(num: Poly<F>, den: Poly<F>) -> Self {
        if num.is_zero() {
            return RatFunc { num, den: Poly::one() };
        }
        let (num, den) = if den.is_constant() {
            (num, den)
        } else {
            let g = num.gcd(&den);
            if g.is_constant() {
                (num, den)
            } else {
                (num.div_rem(&g).unwrap().0, den.div_rem(&g).unwrap().0)
            }
        };
        let li = den.lead().inv().expect("nonzero denominator");
        if li.is_one() {
            RatFunc { num, den }
        } else {
            RatFunc { num: num.scale(&li), den: den.scale(&li) }
        }
    }

    pub fn constant(c: F) -> Self {
        RatFunc { num: Poly::constant(c), den: Poly::one() }
    }

    pub fn var() -> Self {
        RatFunc { num: Poly::x(), den: Poly::one() }
    }

    pub fn from_poly(p: Poly<F>) -> Self {
        RatFunc { num: p, den: Poly::one() }
    }

    pub fn num(&self) -> &Poly<F> {
        &self.num
    }

    pub fn den(&self) -> &Poly<F> {
        &self.den
    }

    pub fn is_polynomial(&self) -> bool {
        self.den.is_constant()
    }

    /// True when the denominator is a power of the indeterminate.
    pub fn is_laurent_polynomial(&self) -> bool {
        self.den.is_monomial()
    }

    pub fn as_constant(&self) -> Option<F> {
        (self.num.is_constant() && self.den.is_constant()).then(|| self.num.coeff(0))
    }

    /// Evaluation at a point of the coefficient field.
    pub fn eval(&self, x: &F) -> Result<F> {
        let d = self.den.eval(x);
        if d.is_zero() {
            return Err(EngineError::PoleAtExpansionPoint("evaluation at a pole".into()));
        }
        self.num.eval(x).div(&d)
    }

    /// Composition `f(value)`.
    pub fn substitute(&self, value: &Self) -> Result<Self> {
        let horner = |p: &Poly<F>| {
            p.coeffs()
                .iter()
                .rev()
                .fold(Self::zero(), |acc, c| acc.mul(value).add(&Self::constant(c.clone())))
        };
        let d = horner(&self.den);
        if d.is_zero() {
            return Err(EngineError::DegenerateScalar(
                "substitution makes the denominator vanish".into(),
            ));
        }
        horner(&self.num).div(&d)
    }

    /// Apply `x -> 1/x`.
    pub fn invert_variable(&self) -> Self {
        let dn = self.num.degree().unwrap_or(0);
        let dd = self.den.degree().unwrap_or(0);
        let d = dn.max(dd);
        Self::normalize(self.num.reversed(d), self.den.reversed(d))
    }

    /// Sum of the principal parts of `self` at the roots of `d`, as `c / b`
    /// with `deg c < deg b`. Poles away from the roots of `d` are dropped.
    pub fn principal_part(&self, d: &Poly<F>) -> Result<Self> {
        if self.is_zero() || d.is_constant() {
            return Ok(Self::zero());
        }
        let mut rest = self.den.clone();
        let mut b = Poly::one();
        loop {
            let g = rest.gcd(d);
            if g.is_constant() {
                break;
            }
            b = b.mul(&g);
            rest = rest.div_rem(&g)?.0;
        }
        if b.is_constant() {
            return Ok(Self::zero());
        }
        let c = self.num.mul(&rest.inv_mod(&b)?).div_rem(&b)?.1;
        Self::new(c, b)
    }

    /// Lift coefficients into a larger field.
    pub fn map<G: Field>(&self, f: impl Fn(&F) -> G) -> RatFunc<G> {
        RatFunc::normalize(self.num.map(&f), self.den.map(&f))
    }
}

impl<F: Field> Coeff for RatFunc<F> {
    fn add(&self, o: &Self) -> Self {
        if self.den == o.den {
            return Self::normalize(self.num.add(&o.num), self.den.clone());
        }
        Self::normalize(
            self.num.mul(&o.den).add(&o.num.mul(&self.den)),
            self.den.mul(&o.den),
        )
    }

    fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }

    fn mul(&self, o: &Self) -> Self {
        if self.is_zero() || o.is_zero() {
            return Self::zero();
        }
        if self.den.is_constant() && o.den.is_constant() {
            return RatFunc { num: self.num.mul(&o.num), den: Poly::one() };
        }
        // cross-cancel before multiplying keeps degrees small
        let g1 = self.num.gcd(&o.den);
        let g2 = o.num.gcd(&self.den);
        let div = |p: &Poly<F>, g: &Poly<F>| {
            if g.is_constant() {
                p.clone()
            } else {
                p.div_rem(g).unwrap().0
            }
        };
        let num = div(&self.num, &g1).mul(&div(&o.num, &g2));
        let den = div(&self.den, &g2).mul(&div(&o.den, &g1));
        let li = den.lead().inv().expect("nonzero");
        if li.is_one() {
            RatFunc { num, den }
        } else {
            RatFunc { num: num.scale(&li), den: den.scale(&li) }
        }
    }

    fn neg(&self) -> Self {
        RatFunc { num: self.num.neg(), den: self.den.clone() }
    }

    fn is_zero(&self) -> bool {
        self.num.is_zero()
    }
}

impl<F: Field> Field for RatFunc<F> {
    fn zero() -> Self {
        RatFunc { num: Poly::zero(), den: Poly::one() }
    }

    fn one() -> Self {
        RatFunc { num: Poly::one(), den: Poly::one() }
    }

    fn from_rational(r: &BigRational) -> Self {
        Self::constant(F::from_rational(r))
    }

    fn inv(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(EngineError::DegenerateScalar("division by zero".into()));
        }
        Ok(Self::normalize(self.den.clone(), self.num.clone()))
    }

    fn depth() -> usize {
        F::depth() + 1
    }

    fn generator(level: usize) -> Option<Self> {
        match level {
            0 => Some(Self::var()),
            k => F::generator(k - 1).map(Self::constant),
        }
    }

    fn poly_gcd(a: &Poly<Self>, b: &Poly<Self>) -> Option<Poly<Self>> {
        Some(primitive_gcd(a, b))
    }

    fn write_text(&self, names: &[&str], out: &mut String) {
        if self.den.degree() == Some(0) {
            self.num.write_text(names, out);
            return;
        }
        out.push('(');
        self.num.write_text(names, out);
        out.push_str(")/(");
        self.den.write_text(names, out);
        out.push(')');
    }

    fn is_atomic(&self) -> bool {
        if self.den.degree() != Some(0) {
            return false;
        }
        match self.num.degree() {
            None => true,
            Some(0) => self.num.coeff(0).is_atomic(),
            Some(_) => self.num.is_monomial() && self.num.lead().is_one(),
        }
    }
}

/// Coefficients of `p` over `F[x]` after clearing denominators, divided by
/// their content.
fn primitive_over_ring<F: Field>(p: &Poly<RatFunc<F>>) -> Vec<Poly<F>> {
    let l = p.coeffs().iter().fold(Poly::one(), |l: Poly<F>, c| {
        let g = l.gcd(&c.den);
        l.mul(&c.den.div_rem(&g).expect("monic gcd").0)
    });
    let cleared: Vec<Poly<F>> =
        p.coeffs().iter().map(|c| c.num.mul(&l.div_rem(&c.den).expect("monic denominator").0)).collect();
    primitive_part(cleared)
}

fn primitive_part<F: Field>(mut c: Vec<Poly<F>>) -> Vec<Poly<F>> {
    while c.last().is_some_and(|x| x.is_zero()) {
        c.pop();
    }
    let unit = |g: &Poly<F>| g.degree() == Some(0);
    let content = c.iter().filter(|x| !x.is_zero()).fold(Poly::zero(), |g: Poly<F>, x| if unit(&g) { g } else { g.gcd(x) });
    if content.is_zero() || unit(&content) {
        return c;
    }
    c.iter().map(|x| x.div_rem(&content).expect("content divides").0).collect()
}

/// Primitive polynomial remainder sequence over `F[x]`: pseudo-remainders
/// with the content removed at each step, so coefficients never leave the
/// ring and stay small.
fn primitive_gcd<F: Field>(a: &Poly<RatFunc<F>>, b: &Poly<RatFunc<F>>) -> Poly<RatFunc<F>> {
    let (mut a, mut b) = (primitive_over_ring(a), primitive_over_ring(b));
    if a.len() < b.len() {
        std::mem::swap(&mut a, &mut b);
    }
    while b.len() > 1 {
        let r = primitive_part(pseudo_rem(a, &b));
        a = b;
        b = r;
    }
    if b.len() == 1 {
        // a nonzero constant remainder
        return Poly::one();
    }
    let g = Poly::from_coeffs(a.into_iter().map(RatFunc::from_poly).collect());
    g.monic().expect("nonzero gcd")
}

fn pseudo_rem<F: Field>(mut r: Vec<Poly<F>>, b: &[Poly<F>]) -> Vec<Poly<F>> {
    let n = b.len() - 1;
    let lc = &b[n];
    while r.len() > n {
        let top = r.pop().expect("nonempty");
        let shift = r.len() - n;
        for x in r.iter_mut() {
            *x = x.mul(lc);
        }
        for (j, bj) in b[..n].iter().enumerate() {
            r[shift + j] = r[shift + j].sub(&top.mul(bj));
        }
        while r.last().is_some_and(|x| x.is_zero()) {
            r.pop();
        }
    }
    r
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q() -> ScalarQ {
        ScalarQ::var()
    }

    fn int(i: i64) -> ScalarQ {
        ScalarQ::from_int(i)
    }

    #[test]
    fn additive_identity_and_self_division() {
        let x = q().sub(&q().inv().unwrap());
        assert_eq!(x.add(&ScalarQ::zero()), x);
        assert_eq!(x.div(&x).unwrap(), ScalarQ::one());
        assert_eq!(x.to_text(&["q"]), "(q^2 - 1)/(q)");
    }

    #[test]
    fn product_of_linear_factors() {
        let a = q().sub(&int(1));
        let b = q().add(&int(1));
        assert_eq!(a.mul(&b).to_text(&["q"]), "q^2 - 1");
    }

    #[test]
    fn division_by_zero_is_degenerate() {
        assert!(matches!(q().div(&ScalarQ::zero()), Err(EngineError::DegenerateScalar(_))));
    }

    #[test]
    fn substitution_examples() {
        type Z = RatFunc<ScalarQ>;
        let z = Z::var();
        assert_eq!(z.substitute(&Z::one()).unwrap(), Z::one());
        let qc = Z::constant(q());
        let qi = Z::constant(q().inv().unwrap());
        let f = z.sub(&Z::one()).div(&qi.mul(&z).sub(&qc)).unwrap();
        assert_eq!(f.substitute(&Z::one()).unwrap(), Z::zero());
        let z2 = z.mul(&z);
        assert_eq!(z2.substitute(&z).unwrap(), z2);
        let pole = Z::one().div(&z.sub(&Z::one())).unwrap();
        assert!(pole.substitute(&Z::one()).is_err());
    }

    #[test]
    fn invert_variable_roundtrip() {
        let f = q().add(&int(2)).div(&q().mul(&q()).sub(&int(3))).unwrap();
        assert_eq!(f.invert_variable().invert_variable(), f);
    }

    #[test]
    fn principal_parts_at_selected_poles() {
        let lin = |c: i64| q().sub(&int(c));
        // 1/((q-1)(q-2)) = -1/(q-1) + 1/(q-2)
        let f = int(1).div(&lin(1).mul(&lin(2))).unwrap();
        let d = Poly::from_coeffs(vec![Rational::from_int(-1), Rational::from_int(1)]);
        assert_eq!(f.principal_part(&d).unwrap(), int(-1).div(&lin(1)).unwrap());
        // double pole plus a polynomial part that must be dropped
        let g = q().mul(&q()).mul(&q()).div(&lin(1).mul(&lin(1))).unwrap();
        let pp = g.principal_part(&d).unwrap();
        let rest = g.sub(&pp);
        assert!(rest.den().eval(&Rational::from_int(1)) != Rational::zero());
        assert!(pp.num().degree() < pp.den().degree());
        assert!(f.principal_part(&Poly::one()).unwrap().is_zero());
    }
}
