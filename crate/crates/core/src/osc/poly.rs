//! Superpolynomials over ℚ: polynomial in the even variables, exterior in the
//! odd ones, with left multiplication and left superderivations.

use std::collections::btree_map::Entry;
use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Zero};

use super::Q;

/// Exponents of the even variables and a bitmask of the odd ones; odd
/// variables are kept in increasing index order.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Monomial {
    pub even: Vec<u16>,
    pub odd: u64,
}

impl Monomial {
    pub fn degree(&self) -> usize {
        self.even.iter().map(|&e| e as usize).sum::<usize>() + self.odd.count_ones() as usize
    }

    pub fn odd_degree(&self) -> u32 {
        self.odd.count_ones()
    }
}

/// Variable universe: each variable is either even (a slot in `even`) or odd
/// (a bit in `odd`).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VarSpace {
    names: Vec<String>,
    odd: Vec<bool>,
    slot: Vec<usize>,
    n_even: usize,
    n_odd: usize,
}

impl VarSpace {
    pub fn new(vars: Vec<(String, bool)>) -> Self {
        let (mut n_even, mut n_odd) = (0, 0);
        let mut slot = Vec::with_capacity(vars.len());
        for (_, odd) in &vars {
            if *odd {
                slot.push(n_odd);
                n_odd += 1;
            } else {
                slot.push(n_even);
                n_even += 1;
            }
        }
        assert!(n_odd <= 64, "at most 64 odd variables");
        let (names, odd) = vars.into_iter().unzip();
        VarSpace { names, odd, slot, n_even, n_odd }
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn is_odd(&self, v: usize) -> bool {
        self.odd[v]
    }

    pub fn name(&self, v: usize) -> &str {
        &self.names[v]
    }

    pub fn one(&self) -> Monomial {
        Monomial { even: vec![0; self.n_even], odd: 0 }
    }

    /// All monomials of total degree exactly `d`.
    pub fn monomials(&self, d: usize) -> Vec<Monomial> {
        let mut out = Vec::new();
        for mask in 0u64..(1u64 << self.n_odd) {
            let k = mask.count_ones() as usize;
            if k > d {
                continue;
            }
            let mut exps = vec![0u16; self.n_even];
            compositions(&mut exps, 0, d - k, &mut |e| out.push(Monomial { even: e.to_vec(), odd: mask }));
        }
        out.sort();
        out
    }

    /// `θ_v · m`, or `None` if it vanishes.
    pub fn mul_monomial(&self, v: usize, m: &Monomial) -> Option<(Monomial, bool)> {
        let mut r = m.clone();
        if self.odd[v] {
            let bit = 1u64 << self.slot[v];
            if m.odd & bit != 0 {
                return None;
            }
            r.odd |= bit;
            Some((r, (m.odd & (bit - 1)).count_ones() % 2 == 1))
        } else {
            r.even[self.slot[v]] += 1;
            Some((r, false))
        }
    }

    /// Left derivative `∂_v m` as (monomial, coefficient).
    pub fn der_monomial(&self, v: usize, m: &Monomial) -> Option<(Monomial, Q)> {
        let mut r = m.clone();
        if self.odd[v] {
            let bit = 1u64 << self.slot[v];
            if m.odd & bit == 0 {
                return None;
            }
            r.odd &= !bit;
            let neg = (m.odd & (bit - 1)).count_ones() % 2 == 1;
            Some((r, if neg { -Q::one() } else { Q::one() }))
        } else {
            let e = m.even[self.slot[v]];
            if e == 0 {
                return None;
            }
            r.even[self.slot[v]] -= 1;
            Some((r, Q::from_integer(e.into())))
        }
    }

    pub fn mul(&self, v: usize, f: &SuperPolynomial) -> SuperPolynomial {
        let mut out = SuperPolynomial::zero();
        for (m, c) in &f.terms {
            if let Some((r, neg)) = self.mul_monomial(v, m) {
                out.add_term(r, if neg { -c.clone() } else { c.clone() });
            }
        }
        out
    }

    pub fn der(&self, v: usize, f: &SuperPolynomial) -> SuperPolynomial {
        let mut out = SuperPolynomial::zero();
        for (m, c) in &f.terms {
            if let Some((r, k)) = self.der_monomial(v, m) {
                out.add_term(r, k * c);
            }
        }
        out
    }

    pub fn format(&self, f: &SuperPolynomial) -> String {
        if f.is_zero() {
            return "0".into();
        }
        let parts: Vec<String> = f
            .terms
            .iter()
            .map(|(m, c)| {
                let mut factors = Vec::new();
                for v in 0..self.len() {
                    if self.odd[v] {
                        if m.odd >> self.slot[v] & 1 == 1 {
                            factors.push(self.names[v].clone());
                        }
                    } else {
                        match m.even[self.slot[v]] {
                            0 => {}
                            1 => factors.push(self.names[v].clone()),
                            e => factors.push(format!("{}^{e}", self.names[v])),
                        }
                    }
                }
                if factors.is_empty() {
                    c.to_string()
                } else {
                    format!("({c})·{}", factors.join("·"))
                }
            })
            .collect();
        parts.join(" + ")
    }
}

fn compositions(exps: &mut [u16], i: usize, rest: usize, emit: &mut dyn FnMut(&[u16])) {
    if i + 1 >= exps.len() {
        if let Some(last) = exps.last_mut() {
            *last = rest as u16;
            emit(exps);
        } else if rest == 0 {
            emit(exps);
        }
        return;
    }
    for k in 0..=rest {
        exps[i] = k as u16;
        compositions(exps, i + 1, rest - k, emit);
    }
    exps[i] = 0;
}

/// Finite ℚ-linear combination of monomials.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct SuperPolynomial {
    pub terms: BTreeMap<Monomial, Q>,
}

impl SuperPolynomial {
    pub fn zero() -> Self {
        SuperPolynomial { terms: BTreeMap::new() }
    }

    pub fn monomial(m: Monomial, c: Q) -> Self {
        let mut p = Self::zero();
        p.add_term(m, c);
        p
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_term(&mut self, m: Monomial, c: Q) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn add_scaled(&mut self, other: &SuperPolynomial, s: &Q) {
        for (m, c) in &other.terms {
            self.add_term(m.clone(), c * s);
        }
    }

    pub fn scale(&self, s: &Q) -> SuperPolynomial {
        let mut out = Self::zero();
        out.add_scaled(self, s);
        out
    }

    pub fn sub(&self, other: &SuperPolynomial) -> SuperPolynomial {
        let mut out = self.clone();
        out.add_scaled(other, &-Q::one());
        out
    }

    /// Homogeneous total degree, or `None` for zero / mixed degrees.
    pub fn degree(&self) -> Option<usize> {
        let mut it = self.terms.keys().map(Monomial::degree);
        let d = it.next()?;
        it.all(|e| e == d).then_some(d)
    }

    /// The constant term.
    pub fn constant(&self) -> Q {
        self.terms
            .iter()
            .find(|(m, _)| m.degree() == 0)
            .map(|(_, c)| c.clone())
            .unwrap_or_else(Q::zero)
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}|{:b}", self.even, self.odd)
    }
}
