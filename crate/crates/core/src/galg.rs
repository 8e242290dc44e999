//! Supercommutative coefficient algebra.
//!
//! An [`SElement`] is a finite sum `Σ_I c_I ξ^I` over strictly increasing
//! index sets `I ⊆ {0..N}` of odd generators, stored sparsely as bitmasks.
//! The coefficient ring is a type parameter: complex doubles for numerical
//! integration, exact rationals for algebraic checks, or polynomials over the
//! even coordinates for the oscillator module.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Largest number of odd generators an element may carry.
pub const MAX_GENERATORS: usize = 32;

/// Commutative coefficient ring for [`SElement`].
pub trait Scalar:
    Clone
    + PartialEq
    + fmt::Debug
    + Send
    + Sync
    + Zero
    + One
    + Sub<Output = Self>
    + Neg<Output = Self>
{
    fn from_ratio(num: i64, den: i64) -> Self;

    fn from_int(k: i64) -> Self {
        Self::from_ratio(k, 1)
    }
}

/// A coefficient ring that is a field with a numeric size, used where
/// bodies must be inverted.
pub trait FieldScalar: Scalar {
    fn inv(&self) -> Option<Self>;
    /// Size used for pivot selection.
    fn modulus(&self) -> f64;
    fn to_complex(&self) -> Complex64;
}

impl Scalar for Complex64 {
    fn from_ratio(num: i64, den: i64) -> Self {
        Complex64::new(num as f64 / den as f64, 0.0)
    }
}

impl FieldScalar for Complex64 {
    fn inv(&self) -> Option<Self> {
        if self.norm_sqr() == 0.0 {
            None
        } else {
            Some(Complex64::new(1.0, 0.0) / self)
        }
    }

    fn modulus(&self) -> f64 {
        self.norm()
    }

    fn to_complex(&self) -> Complex64 {
        *self
    }
}

impl Scalar for BigRational {
    fn from_ratio(num: i64, den: i64) -> Self {
        BigRational::new(BigInt::from(num), BigInt::from(den))
    }
}

impl FieldScalar for BigRational {
    fn inv(&self) -> Option<Self> {
        if self.is_zero() {
            None
        } else {
            Some(self.recip())
        }
    }

    fn modulus(&self) -> f64 {
        self.abs().to_f64().unwrap_or(f64::INFINITY)
    }

    fn to_complex(&self) -> Complex64 {
        Complex64::new(self.to_f64().unwrap_or(f64::NAN), 0.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    pub fn of_len(k: u32) -> Parity {
        if k % 2 == 0 {
            Parity::Even
        } else {
            Parity::Odd
        }
    }

    pub fn sign(self, other: Parity) -> i64 {
        if self == Parity::Odd && other == Parity::Odd {
            -1
        } else {
            1
        }
    }
}

/// Sign of `ξ^a ξ^b` relative to `ξ^{a∪b}` for disjoint masks.
fn reorder_sign(a: u32, b: u32) -> bool {
    let mut swaps = 0u32;
    let mut rest = b;
    while rest != 0 {
        let j = rest.trailing_zeros();
        rest &= rest - 1;
        let above = if j >= 31 { 0 } else { a >> (j + 1) };
        swaps += above.count_ones();
    }
    swaps % 2 == 1
}

/// Element of the Grassmann algebra on `N` odd generators over `R`.
#[derive(Clone, PartialEq)]
pub struct SElement<R: Scalar> {
    generators: usize,
    terms: Vec<(u32, R)>,
}

/// Body/soul split of an element.
#[derive(Debug, Clone, PartialEq)]
pub struct BodySoul<R: Scalar> {
    pub body: R,
    pub soul: SElement<R>,
}

impl<R: Scalar> BodySoul<R> {
    pub fn reassemble(&self) -> SElement<R> {
        self.soul.add(&SElement::scalar(self.soul.generators, self.body.clone()))
    }
}

impl<R: Scalar> SElement<R> {
    pub fn zero(generators: usize) -> Self {
        assert!(generators <= MAX_GENERATORS, "too many odd generators");
        SElement {
            generators,
            terms: Vec::new(),
        }
    }

    pub fn one(generators: usize) -> Self {
        Self::scalar(generators, R::one())
    }

    pub fn scalar(generators: usize, c: R) -> Self {
        let mut e = Self::zero(generators);
        if !c.is_zero() {
            e.terms.push((0, c));
        }
        e
    }

    /// The odd generator `ξ_i` (zero-based).
    pub fn generator(generators: usize, i: usize) -> Result<Self> {
        if i >= generators {
            return Err(Error::GeneratorOutOfRange {
                index: i,
                count: generators,
            });
        }
        let mut e = Self::zero(generators);
        e.terms.push((1 << i, R::one()));
        Ok(e)
    }

    /// `c · ξ_{i_1} ⋯ ξ_{i_k}` for indices in the given order (sign applied).
    pub fn monomial(generators: usize, indices: &[usize], c: R) -> Result<Self> {
        let mut acc = Self::scalar(generators, c);
        for &i in indices {
            acc = acc.checked_mul(&Self::generator(generators, i)?)?;
        }
        Ok(acc)
    }

    /// Builds an element from raw (mask, coefficient) pairs.
    pub fn from_terms(generators: usize, terms: impl IntoIterator<Item = (u32, R)>) -> Self {
        let mut e = Self::zero(generators);
        let limit = if generators >= 32 { u32::MAX } else { (1u32 << generators) - 1 };
        for (mask, c) in terms {
            assert!(mask & !limit == 0, "mask uses undeclared generators");
            e.terms.push((mask, c));
        }
        e.normalize();
        e
    }

    fn normalize(&mut self) {
        self.terms.sort_by_key(|(m, _)| *m);
        let mut out: Vec<(u32, R)> = Vec::with_capacity(self.terms.len());
        for (m, c) in self.terms.drain(..) {
            match out.last_mut() {
                Some((lm, lc)) if *lm == m => *lc = lc.clone() + c,
                _ => out.push((m, c)),
            }
        }
        out.retain(|(_, c)| !c.is_zero());
        self.terms = out;
    }

    pub fn generators(&self) -> usize {
        self.generators
    }

    pub fn terms(&self) -> &[(u32, R)] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, mask: u32) -> R {
        match self.terms.binary_search_by_key(&mask, |(m, _)| *m) {
            Ok(k) => self.terms[k].1.clone(),
            Err(_) => R::zero(),
        }
    }

    pub fn body(&self) -> R {
        self.coefficient(0)
    }

    pub fn soul(&self) -> Self {
        SElement {
            generators: self.generators,
            terms: self.terms.iter().filter(|(m, _)| *m != 0).cloned().collect(),
        }
    }

    pub fn body_soul(&self) -> BodySoul<R> {
        BodySoul {
            body: self.body(),
            soul: self.soul(),
        }
    }

    /// `Some(parity)` if every term has the same parity; zero counts as even.
    pub fn parity(&self) -> Option<Parity> {
        let mut it = self.terms.iter().map(|(m, _)| Parity::of_len(m.count_ones()));
        let first = match it.next() {
            None => return Some(Parity::Even),
            Some(p) => p,
        };
        if it.all(|p| p == first) {
            Some(first)
        } else {
            None
        }
    }

    pub fn is_even(&self) -> bool {
        self.parity() == Some(Parity::Even)
    }

    pub fn is_odd(&self) -> bool {
        self.terms.is_empty() || self.parity() == Some(Parity::Odd)
    }

    fn check_universe(&self, other: &Self) -> Result<()> {
        if self.generators != other.generators {
            Err(Error::GeneratorMismatch(self.generators, other.generators))
        } else {
            Ok(())
        }
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        self.check_universe(other)?;
        let mut out = Vec::with_capacity(self.terms.len() + other.terms.len());
        let (mut i, mut j) = (0, 0);
        while i < self.terms.len() || j < other.terms.len() {
            let take_left = j >= other.terms.len()
                || (i < self.terms.len() && self.terms[i].0 < other.terms[j].0);
            let take_right = i >= self.terms.len()
                || (j < other.terms.len() && other.terms[j].0 < self.terms[i].0);
            if take_left {
                out.push(self.terms[i].clone());
                i += 1;
            } else if take_right {
                out.push(other.terms[j].clone());
                j += 1;
            } else {
                let c = self.terms[i].1.clone() + other.terms[j].1.clone();
                if !c.is_zero() {
                    out.push((self.terms[i].0, c));
                }
                i += 1;
                j += 1;
            }
        }
        Ok(SElement {
            generators: self.generators,
            terms: out,
        })
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self> {
        self.check_universe(other)?;
        if self.terms.is_empty() || other.terms.is_empty() {
            return Ok(Self::zero(self.generators));
        }
        let mut raw = Vec::with_capacity(self.terms.len() * other.terms.len());
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                if ma & mb != 0 {
                    continue;
                }
                let c = ca.clone() * cb.clone();
                let c = if reorder_sign(*ma, *mb) { -c } else { c };
                raw.push((ma | mb, c));
            }
        }
        let mut e = SElement {
            generators: self.generators,
            terms: raw,
        };
        e.normalize();
        Ok(e)
    }

    pub fn add(&self, other: &Self) -> Self {
        self.checked_add(other).expect("generator universes differ")
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Self {
        self.checked_mul(other).expect("generator universes differ")
    }

    pub fn neg(&self) -> Self {
        self.map(|c| -c.clone())
    }

    pub fn scale(&self, s: &R) -> Self {
        let mut e = self.map(|c| c.clone() * s.clone());
        e.terms.retain(|(_, c)| !c.is_zero());
        e
    }

    /// Coefficient-wise map; zero results are dropped.
    pub fn map<S: Scalar>(&self, f: impl Fn(&R) -> S) -> SElement<S> {
        SElement {
            generators: self.generators,
            terms: self
                .terms
                .iter()
                .map(|(m, c)| (*m, f(c)))
                .filter(|(_, c)| !c.is_zero())
                .collect(),
        }
    }

    /// Re-embeds into a larger universe, shifting generator `i` to `i + offset`.
    pub fn embed(&self, generators: usize, offset: usize) -> Result<Self> {
        if offset + self.generators > generators {
            return Err(Error::GeneratorOutOfRange {
                index: offset + self.generators,
                count: generators,
            });
        }
        Ok(SElement {
            generators,
            terms: self.terms.iter().map(|(m, c)| (m << offset, c.clone())).collect(),
        })
    }

    /// Left superderivation `∂/∂ξ_i`.
    pub fn odd_derivative(&self, i: usize) -> Result<Self> {
        if i >= self.generators {
            return Err(Error::GeneratorOutOfRange {
                index: i,
                count: self.generators,
            });
        }
        let bit = 1u32 << i;
        let below = bit - 1;
        let mut terms: Vec<(u32, R)> = self
            .terms
            .iter()
            .filter(|(m, _)| m & bit != 0)
            .map(|(m, c)| {
                let c = if (m & below).count_ones() % 2 == 1 { -c.clone() } else { c.clone() };
                (m & !bit, c)
            })
            .collect();
        terms.sort_by_key(|(m, _)| *m);
        Ok(SElement {
            generators: self.generators,
            terms,
        })
    }

    /// Coefficient of `ξ_0 ξ_1 ⋯ ξ_{N-1}`, i.e. the Berezin integral with
    /// `∫ ξ_0⋯ξ_{N-1} = 1`.
    pub fn berezin_top(&self) -> R {
        let top = if self.generators == 32 { u32::MAX } else { (1u32 << self.generators) - 1 };
        self.coefficient(top)
    }

    /// `exp(a)` for an even element with zero body; the series terminates.
    pub fn exp_nilpotent(&self) -> Result<Self> {
        if !self.body().is_zero() {
            return Err(Error::NotNilpotentEven("nonzero body"));
        }
        if !self.is_even() {
            return Err(Error::NotNilpotentEven("not even"));
        }
        let mut acc = Self::one(self.generators);
        let mut power = Self::one(self.generators);
        let mut k = 1i64;
        loop {
            power = power.mul(self).scale(&R::from_ratio(1, k));
            if power.is_zero() {
                break;
            }
            acc = acc.add(&power);
            k += 1;
        }
        Ok(acc)
    }

    /// Finite power series `Σ_k c_k s^k` in a nilpotent `s`; `coeff(k)` is queried lazily.
    pub fn nilpotent_series(&self, coeff: impl Fn(usize) -> R) -> Self {
        let mut acc = Self::scalar(self.generators, coeff(0));
        let mut power = Self::one(self.generators);
        let mut k = 1;
        loop {
            power = power.mul(self);
            if power.is_zero() {
                break;
            }
            acc = acc.add(&power.scale(&coeff(k)));
            k += 1;
        }
        acc
    }
}

impl<R: FieldScalar> SElement<R> {
    /// Inverse of an even element with invertible body.
    pub fn inverse(&self) -> Result<Self> {
        if !self.is_even() {
            return Err(Error::Parity("only even elements are inverted".into()));
        }
        let b = self.body();
        let binv = b
            .inv()
            .ok_or_else(|| Error::SingularBody("element body is zero".into()))?;
        // x = b (1 + s/b)  ⇒  x⁻¹ = b⁻¹ Σ (−s/b)^k
        let t = self.soul().scale(&binv);
        Ok(t.nilpotent_series(|k| if k % 2 == 0 { binv.clone() } else { -binv.clone() }))
    }

    /// Integer power; negative exponents go through [`SElement::inverse`].
    pub fn powi(&self, k: i64) -> Result<Self> {
        let base = if k < 0 { self.inverse()? } else { self.clone() };
        let mut e = k.unsigned_abs();
        let mut acc = Self::one(self.generators);
        let mut sq = base;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&sq);
            }
            e >>= 1;
            if e > 0 {
                sq = sq.mul(&sq);
            }
        }
        Ok(acc)
    }
}

impl SElement<Complex64> {
    /// `exp(x)` for any even element: body handled by `f64` exp, soul by series.
    pub fn exp_even(&self) -> Result<Self> {
        if !self.is_even() {
            return Err(Error::NotNilpotentEven("not even"));
        }
        let b = self.body().exp();
        Ok(self.soul().exp_nilpotent()?.scale(&b))
    }

    /// Largest coefficient modulus of `self − other`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.sub(other)
            .terms
            .iter()
            .map(|(_, c)| c.norm())
            .fold(0.0, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.terms.iter().map(|(_, c)| c.norm()).fold(0.0, f64::max)
    }
}

impl<R: Scalar> fmt::Debug for SElement<R> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (k, (m, c)) in self.terms.iter().enumerate() {
            if k > 0 {
                write!(f, " + ")?;
            }
            write!(f, "({c:?})")?;
            for i in 0..self.generators {
                if m & (1 << i) != 0 {
                    write!(f, "ξ{}", i + 1)?;
                }
            }
        }
        Ok(())
    }
}

impl<R: Scalar> Add for &SElement<R> {
    type Output = SElement<R>;
    fn add(self, rhs: Self) -> SElement<R> {
        SElement::add(self, rhs)
    }
}

impl<R: Scalar> Sub for &SElement<R> {
    type Output = SElement<R>;
    fn sub(self, rhs: Self) -> SElement<R> {
        SElement::sub(self, rhs)
    }
}

impl<R: Scalar> Mul for &SElement<R> {
    type Output = SElement<R>;
    fn mul(self, rhs: Self) -> SElement<R> {
        SElement::mul(self, rhs)
    }
}

impl<R: Scalar> Neg for &SElement<R> {
    type Output = SElement<R>;
    fn neg(self) -> SElement<R> {
        SElement::neg(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    type Q = BigRational;

    fn q(n: i64) -> Q {
        Q::from_int(n)
    }

    fn xi(n: usize, i: usize) -> SElement<Q> {
        SElement::generator(n, i).unwrap()
    }

    #[test]
    fn koszul_products() {
        let (x1, x2) = (xi(2, 0), xi(2, 1));
        assert_eq!(&x1 * &x2, SElement::monomial(2, &[0, 1], q(1)).unwrap());
        assert_eq!(&x2 * &x1, SElement::monomial(2, &[0, 1], q(-1)).unwrap());
        assert!((&x1 * &x1).is_zero());
        let a = SElement::one(2).add(&(&x1 * &x2));
        let expect = SElement::one(2).add(&(&x1 * &x2).scale(&q(2)));
        assert_eq!(&a * &a, expect);
    }

    #[test]
    fn derivative_examples() {
        let (x1, x2, x3) = (xi(3, 0), xi(3, 1), xi(3, 2));
        assert_eq!(x1.odd_derivative(0).unwrap(), SElement::one(3));
        assert_eq!((&x1 * &x2).odd_derivative(1).unwrap(), x1.neg());
        assert!((&x2 * &x3).odd_derivative(0).unwrap().is_zero());
        assert!(x1.odd_derivative(3).is_err());
    }

    #[test]
    fn berezin_top_examples() {
        let x12 = &xi(2, 0) * &xi(2, 1);
        let a = SElement::scalar(2, q(3)).add(&x12.scale(&q(5)));
        assert_eq!(a.berezin_top(), q(5));
        assert_eq!(SElement::scalar(1, q(7)).berezin_top(), q(0));
        assert_eq!(x12.exp_nilpotent().unwrap().berezin_top(), q(1));
    }

    #[test]
    fn exp_examples() {
        assert_eq!(SElement::<Q>::zero(4).exp_nilpotent().unwrap(), SElement::one(4));
        let x12 = &xi(4, 0) * &xi(4, 1);
        let x34 = &xi(4, 2) * &xi(4, 3);
        let (a, b) = (q(3), q(-2));
        let arg = x12.scale(&a).add(&x34.scale(&b));
        let expect = SElement::one(4)
            .add(&x12.scale(&a))
            .add(&x34.scale(&b))
            .add(&(&x12 * &x34).scale(&(a.clone() * b.clone())));
        assert_eq!(arg.exp_nilpotent().unwrap(), expect);
        assert!(SElement::<Q>::one(2).exp_nilpotent().is_err());
        assert!(xi(2, 0).exp_nilpotent().is_err());
    }

    #[test]
    fn body_soul_examples() {
        let x1 = xi(2, 0);
        let e = SElement::scalar(2, q(2)).add(&x1);
        let bs = e.body_soul();
        assert_eq!(bs.body, q(2));
        assert_eq!(bs.soul, x1);
        assert_eq!(bs.reassemble(), e);
        let x12 = &xi(2, 0) * &xi(2, 1);
        assert_eq!(x12.body_soul().body, q(0));
        let one = SElement::<Q>::one(2).body_soul();
        assert_eq!((one.body, one.soul.is_zero()), (q(1), true));
    }

    #[test]
    fn universe_mismatch_is_an_error() {
        assert!(xi(2, 0).checked_mul(&xi(3, 0)).is_err());
        assert!(xi(2, 0).checked_add(&xi(3, 0)).is_err());
    }

    #[test]
    fn inverse_and_powers() {
        let x12 = &xi(2, 0) * &xi(2, 1);
        let e = SElement::scalar(2, q(2)).add(&x12.scale(&q(3)));
        let inv = e.inverse().unwrap();
        assert_eq!(&e * &inv, SElement::one(2));
        assert_eq!(e.powi(-2).unwrap(), inv.powi(2).unwrap());
        assert!(x12.inverse().is_err());
    }
}
