//! Exact oscillator realisation of `gl(2p|2q)` on superpolynomials on
//! `V = Hom(ℂⁿ, ℂ^{p|q}) ⊕ Hom(ℂ^{p|q}, ℂⁿ)`, and of the commuting `gl(n)`.
//!
//! Coordinates: `X_{αj}` on the first summand and `Y_{iα}` on the second,
//! odd exactly when the `ℂ^{p|q}` index is odd. For each index `I` of
//! `ℂ^{2p|2q} = ℂ^{p|q}_x ⊕ ℂ^{p|q}_y` and each `α` there is a pair with
//! `[c_{Iα}, c̄_{Jβ}] = δ_{IJ}δ_{αβ}`:
//!
//! * x-block: `c̄ = −(−1)^{|i|}∂_{X_{αi}}`, `c = X_{αi}`;
//! * y-block: `c̄ = Y_{iα}`, `c = ∂_{Y_{iα}}`;
//!
//! and `T_{E_{IJ}} = Σ_α ½(c̄_{Iα}c_{Jα} + (−1)^{|I||J|} c_{Jα}c̄_{Iα})`, the
//! symmetrised quadratic element, stored normal-ordered.

pub mod poly;

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
pub use poly::{Monomial, SuperPolynomial, VarSpace};
pub use crate::weights::Weight;

pub type Q = BigRational;

#[cfg(test)]
fn q(n: i64) -> Q {
    Q::from_integer(n.into())
}

fn half(n: i64) -> Q {
    Q::new(n.into(), 2.into())
}

/// Block of `gl(2p|2q)` in the `(A B; C D)` decomposition.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Block {
    A,
    B,
    C,
    D,
}

/// Basis element `E^{block}_{ij}`, indices from 0.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BasisLabel {
    pub block: Block,
    pub i: usize,
    pub j: usize,
}

impl BasisLabel {
    /// Row/column in `ℂ^{2p|2q}` (x-block first).
    fn big_indices(&self, n_small: usize) -> (usize, usize) {
        let (ri, cj) = match self.block {
            Block::A => (0, 0),
            Block::B => (0, 1),
            Block::C => (1, 0),
            Block::D => (1, 1),
        };
        (self.i + ri * n_small, self.j + cj * n_small)
    }

    fn from_big(r: usize, c: usize, n_small: usize) -> Self {
        let block = match (r >= n_small, c >= n_small) {
            (false, false) => Block::A,
            (false, true) => Block::B,
            (true, false) => Block::C,
            (true, true) => Block::D,
        };
        BasisLabel { block, i: r % n_small, j: c % n_small }
    }
}

impl std::fmt::Display for BasisLabel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "E^{:?}_{{{},{}}}", self.block, self.i + 1, self.j + 1)
    }
}

/// Elementary factor of an operator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Elem {
    Mul(usize),
    Der(usize),
}

/// `Σ c · f₁ f₂ …` applied right to left; an empty product is the identity.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct QuadOperator {
    pub terms: Vec<(Q, Vec<Elem>)>,
}

impl QuadOperator {
    pub fn apply(&self, space: &VarSpace, f: &SuperPolynomial) -> SuperPolynomial {
        let mut out = SuperPolynomial::zero();
        for (c, word) in &self.terms {
            let mut g = f.clone();
            for e in word.iter().rev() {
                g = match *e {
                    Elem::Mul(v) => space.mul(v, &g),
                    Elem::Der(v) => space.der(v, &g),
                };
                if g.is_zero() {
                    break;
                }
            }
            out.add_scaled(&g, c);
        }
        out
    }

    /// Net change of polynomial degree (all terms shift equally).
    pub fn degree_shift(&self) -> Option<i32> {
        let shifts: Vec<i32> = self
            .terms
            .iter()
            .filter(|(c, _)| !c.is_zero())
            .map(|(_, w)| w.iter().map(|e| if matches!(e, Elem::Mul(_)) { 1 } else { -1 }).sum())
            .collect();
        let first = *shifts.first()?;
        shifts.iter().all(|&s| s == first).then_some(first)
    }
}

/// The oscillator module for given `(p, q, n)`.
#[derive(Debug, Clone)]
pub struct Oscillator {
    pub p: usize,
    pub q: usize,
    pub n: usize,
    pub space: VarSpace,
}

/// Creation/annihilation factor: coefficient and elementary operator.
type Ladder = (Q, Elem);

impl Oscillator {
    pub fn new(p: usize, q: usize, n: usize) -> Result<Self> {
        if p > 2 || q > 2 || n > 2 || n == 0 {
            return Err(Error::InvalidArgument(format!(
                "oscillator realisation limited to p, q ≤ 2 and 1 ≤ n ≤ 2, got ({p},{q},{n})"
            )));
        }
        let k = p + q;
        let mut vars = Vec::with_capacity(2 * k * n);
        for a in 0..n {
            for i in 0..k {
                vars.push((format!("X{}{}", a + 1, i + 1), i >= p));
            }
        }
        for i in 0..k {
            for a in 0..n {
                vars.push((format!("Y{}{}", i + 1, a + 1), i >= p));
            }
        }
        Ok(Oscillator { p, q, n, space: VarSpace::new(vars) })
    }

    fn k(&self) -> usize {
        self.p + self.q
    }

    fn x(&self, a: usize, i: usize) -> usize {
        a * self.k() + i
    }

    fn y(&self, i: usize, a: usize) -> usize {
        self.n * self.k() + i * self.n + a
    }

    /// Parity of a `ℂ^{2p|2q}` index.
    fn big_odd(&self, big: usize) -> bool {
        big % self.k() >= self.p
    }

    fn sign(odd: bool) -> Q {
        if odd {
            -Q::one()
        } else {
            Q::one()
        }
    }

    fn cbar(&self, big: usize, a: usize) -> Ladder {
        let i = big % self.k();
        if big < self.k() {
            (-Self::sign(i >= self.p), Elem::Der(self.x(a, i)))
        } else {
            (Q::one(), Elem::Mul(self.y(i, a)))
        }
    }

    fn c(&self, big: usize, a: usize) -> Ladder {
        let i = big % self.k();
        if big < self.k() {
            (Q::one(), Elem::Mul(self.x(a, i)))
        } else {
            (Q::one(), Elem::Der(self.y(i, a)))
        }
    }

    fn elem_odd(&self, e: Elem) -> bool {
        match e {
            Elem::Mul(v) | Elem::Der(v) => self.space.is_odd(v),
        }
    }

    /// Normal-ordered `c₁·e₁ · c₂·e₂`: derivations to the right.
    fn ordered_product(&self, (c1, e1): &Ladder, (c2, e2): &Ladder) -> Vec<(Q, Vec<Elem>)> {
        let coef = c1 * c2;
        match (*e1, *e2) {
            (Elem::Der(u), Elem::Mul(v)) => {
                let sign = Self::sign(self.elem_odd(*e1) && self.elem_odd(*e2));
                let mut out = vec![(coef.clone() * sign, vec![Elem::Mul(v), Elem::Der(u)])];
                if u == v {
                    out.push((coef, vec![]));
                }
                out
            }
            _ => vec![(coef, vec![*e1, *e2])],
        }
    }

    pub fn check_label(&self, l: BasisLabel) -> Result<()> {
        if l.i >= self.k() || l.j >= self.k() {
            return Err(Error::InvalidArgument(format!("{l} out of range for ({}|{})", self.p, self.q)));
        }
        Ok(())
    }

    /// `T_X` for a basis element of `gl(2p|2q)`.
    pub fn build_operator(&self, label: BasisLabel) -> Result<QuadOperator> {
        self.check_label(label)?;
        let (bi, bj) = label.big_indices(self.k());
        let odd_i = self.big_odd(bi);
        let odd_j = self.big_odd(bj);
        let mut terms = Vec::new();
        for a in 0..self.n {
            let (l, r) = (self.cbar(bi, a), self.c(bj, a));
            for (c, w) in self.ordered_product(&l, &r) {
                terms.push((c * half(1), w));
            }
            let s = Self::sign(odd_i && odd_j) * half(1);
            for (c, w) in self.ordered_product(&r, &l) {
                terms.push((c * s.clone(), w));
            }
        }
        Ok(simplify(terms))
    }

    /// The `gl(n)` vector fields `G_{αβ}`, normal-ordered (they kill constants).
    pub fn gl_n_operator(&self, a: usize, b: usize) -> QuadOperator {
        let mut terms = Vec::new();
        for i in 0..self.k() {
            terms.push((-Q::one(), vec![Elem::Mul(self.x(b, i)), Elem::Der(self.x(a, i))]));
            terms.push((Q::one(), vec![Elem::Mul(self.y(i, a)), Elem::Der(self.y(i, b))]));
        }
        QuadOperator { terms }
    }

    pub fn labels(&self) -> Vec<BasisLabel> {
        let k2 = 2 * self.k();
        (0..k2)
            .flat_map(|r| (0..k2).map(move |c| (r, c)))
            .map(|(r, c)| BasisLabel::from_big(r, c, self.k()))
            .collect()
    }

    pub fn label_odd(&self, l: BasisLabel) -> bool {
        let (r, c) = l.big_indices(self.k());
        self.big_odd(r) != self.big_odd(c)
    }

    /// `[X, Y] = δ_{jk}E_{il} − (−1)^{|X||Y|} δ_{li} E_{kj}` in `gl(2p|2q)`.
    pub fn bracket(&self, x: BasisLabel, y: BasisLabel) -> Vec<(Q, BasisLabel)> {
        let (i, j) = x.big_indices(self.k());
        let (k, l) = y.big_indices(self.k());
        let mut out = Vec::new();
        if j == k {
            out.push((Q::one(), BasisLabel::from_big(i, l, self.k())));
        }
        if l == i {
            out.push((-Self::sign(self.label_odd(x) && self.label_odd(y)), BasisLabel::from_big(k, j, self.k())));
        }
        out
    }

    /// Monomials of degree ≤ d.
    pub fn basis_up_to(&self, d: usize) -> Vec<Monomial> {
        (0..=d).flat_map(|k| self.space.monomials(k)).collect()
    }

    pub fn one(&self) -> SuperPolynomial {
        SuperPolynomial::monomial(self.space.one(), Q::one())
    }
}

fn simplify(terms: Vec<(Q, Vec<Elem>)>) -> QuadOperator {
    let mut merged: Vec<(Q, Vec<Elem>)> = Vec::new();
    for (c, w) in terms {
        match merged.iter_mut().find(|(_, w2)| *w2 == w) {
            Some(slot) => slot.0 += c,
            None => merged.push((c, w)),
        }
    }
    merged.retain(|(c, _)| !c.is_zero());
    QuadOperator { terms: merged }
}

/// Result of the exact bracket verification.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CommutatorReport {
    pub p: usize,
    pub q: usize,
    pub n: usize,
    pub degree_cap: usize,
    pub basis_size: usize,
    pub pairs_checked: usize,
    pub centralizer_pairs_checked: usize,
    pub failures: Vec<String>,
    pub grading_ok: bool,
    pub pass: bool,
}

fn supercommutator(
    osc: &Oscillator,
    tx: &QuadOperator,
    ty: &QuadOperator,
    sign: &Q,
    f: &SuperPolynomial,
) -> SuperPolynomial {
    let mut out = tx.apply(&osc.space, &ty.apply(&osc.space, f));
    out.add_scaled(&ty.apply(&osc.space, &tx.apply(&osc.space, f)), &-sign.clone());
    out
}

/// Verifies `[T_X, T_Y] = T_{[X,Y]}` for all basis pairs and `[T_X, G] = 0`
/// for the `gl(n)` operators, on every monomial of degree ≤ d. Since all
/// operators have degree shift ≤ 2, inputs of degree ≤ d suffice.
pub fn commutator_check(p: usize, q: usize, n: usize, degree_cap: usize) -> Result<CommutatorReport> {
    if degree_cap > 4 {
        return Err(Error::InvalidArgument("degree cap must be ≤ 4".into()));
    }
    let osc = Oscillator::new(p, q, n)?;
    let labels = osc.labels();
    let ops: Vec<QuadOperator> = labels.iter().map(|&l| osc.build_operator(l)).collect::<Result<_>>()?;
    let basis: Vec<SuperPolynomial> = osc
        .basis_up_to(degree_cap)
        .into_iter()
        .map(|m| SuperPolynomial::monomial(m, Q::one()))
        .collect();
    let index = |l: BasisLabel| labels.iter().position(|&x| x == l).expect("label");
    let grading_ok = labels.iter().zip(&ops).all(|(l, t)| {
        let want = match l.block {
            Block::A | Block::D => 0,
            Block::B => -2,
            Block::C => 2,
        };
        t.terms.is_empty() || t.degree_shift() == Some(want)
    });

    let pairs: Vec<(usize, usize)> = (0..labels.len()).flat_map(|a| (0..labels.len()).map(move |b| (a, b))).collect();
    let mut failures: Vec<String> = pairs
        .par_iter()
        .filter_map(|&(a, b)| {
            let (x, y) = (labels[a], labels[b]);
            let sign = Oscillator::sign(osc.label_odd(x) && osc.label_odd(y));
            let rhs_terms = osc.bracket(x, y);
            for f in &basis {
                let lhs = supercommutator(&osc, &ops[a], &ops[b], &sign, f);
                let mut rhs = SuperPolynomial::zero();
                for (c, l) in &rhs_terms {
                    rhs.add_scaled(&ops[index(*l)].apply(&osc.space, f), c);
                }
                if lhs != rhs {
                    return Some(format!("[{x}, {y}] on {}", osc.space.format(f)));
                }
            }
            None
        })
        .collect();

    let gens: Vec<QuadOperator> = (0..n).flat_map(|a| (0..n).map(move |b| (a, b))).map(|(a, b)| osc.gl_n_operator(a, b)).collect();
    let central: Vec<String> = (0..labels.len())
        .into_par_iter()
        .flat_map_iter(|a| {
            let osc = &osc;
            let basis = &basis;
            let ops = &ops;
            let labels = &labels;
            gens.iter().enumerate().filter_map(move |(g, gen)| {
                basis
                    .iter()
                    .find(|f| !supercommutator(osc, &ops[a], gen, &Q::one(), f).is_zero())
                    .map(|f| format!("[{}, G#{g}] ≠ 0 on {}", labels[a], osc.space.format(f)))
            })
        })
        .collect();
    failures.extend(central);
    if !grading_ok {
        failures.push("degree grading violated".into());
    }
    Ok(CommutatorReport {
        p,
        q,
        n,
        degree_cap,
        basis_size: basis.len(),
        pairs_checked: pairs.len(),
        centralizer_pairs_checked: labels.len() * gens.len(),
        pass: failures.is_empty(),
        failures,
        grading_ok,
    })
}

/// `λ = n/2 (str D − str A)` in the `δ/ε` coordinates.
pub fn highest_weight(p: usize, q: usize, n: usize) -> Weight {
    crate::weights::highest_weight(p, q, n)
}

/// The same weight read off from the Cartan operators acting on `1`, checking
/// along the way that `1` is an eigenvector of every `T_h` and is killed by
/// every `T_{E^B}`.
pub fn highest_weight_from_operators(p: usize, q: usize, n: usize) -> Result<Weight> {
    let osc = Oscillator::new(p, q, n)?;
    let one = osc.one();
    let value = |l: BasisLabel| -> Result<Q> {
        let t = osc.build_operator(l)?.apply(&osc.space, &one);
        let c = t.constant();
        if t != one.scale(&c) {
            return Err(Error::Hypothesis(format!("1 is not an eigenvector of T_{l}")));
        }
        Ok(c)
    };
    for i in 0..p + q {
        for j in 0..p + q {
            let l = BasisLabel { block: Block::B, i, j };
            if !osc.build_operator(l)?.apply(&osc.space, &one).is_zero() {
                return Err(Error::Hypothesis(format!("T_{l} does not annihilate 1")));
            }
        }
    }
    let diag = |block, a| BasisLabel { block, i: a, j: a };
    let mut delta = Vec::with_capacity(2 * p);
    for a in 0..p {
        delta.push(value(diag(Block::A, a))?);
    }
    for a in 0..p {
        delta.push(value(diag(Block::D, a))?);
    }
    let mut eps = Vec::with_capacity(2 * q);
    for a in p..p + q {
        eps.push(value(diag(Block::A, a))?);
    }
    for a in p..p + q {
        eps.push(value(diag(Block::D, a))?);
    }
    Ok(Weight { delta, eps })
}

/// Reduced row echelon form in place; returns pivot columns.
fn rref(rows: &mut Vec<Vec<Q>>, ncols: usize) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut r = 0;
    for col in 0..ncols {
        let Some(pr) = (r..rows.len()).find(|&i| !rows[i][col].is_zero()) else {
            continue;
        };
        rows.swap(r, pr);
        let inv = Q::one() / rows[r][col].clone();
        for x in rows[r].iter_mut() {
            *x *= inv.clone();
        }
        for i in 0..rows.len() {
            if i != r && !rows[i][col].is_zero() {
                let f = rows[i][col].clone();
                let (src, dst) = if i < r {
                    let (a, b) = rows.split_at_mut(r);
                    (&b[0], &mut a[i])
                } else {
                    let (a, b) = rows.split_at_mut(i);
                    (&a[r], &mut b[0])
                };
                for (d, s) in dst.iter_mut().zip(src) {
                    *d -= f.clone() * s;
                }
            }
        }
        pivots.push(col);
        r += 1;
        if r == rows.len() {
            break;
        }
    }
    rows.truncate(r);
    pivots
}

/// `gl(n)`-invariant superpolynomials of each degree `≤ d`, as a kernel basis.
pub fn invariants_up_to_degree(p: usize, q: usize, n: usize, d: usize) -> Result<Vec<(usize, Vec<SuperPolynomial>)>> {
    if d > 4 {
        return Err(Error::InvalidArgument("degree must be ≤ 4".into()));
    }
    let osc = Oscillator::new(p, q, n)?;
    let gens: Vec<QuadOperator> = (0..n).flat_map(|a| (0..n).map(move |b| (a, b))).map(|(a, b)| osc.gl_n_operator(a, b)).collect();
    let mut out = Vec::new();
    for k in 0..=d {
        let mons = osc.space.monomials(k);
        let pos = |m: &Monomial| mons.binary_search(m).expect("degree preserved");
        // Rows: (generator, output monomial); columns: input monomials.
        let mut rows: Vec<Vec<Q>> = Vec::new();
        for g in &gens {
            let mut block = vec![vec![Q::zero(); mons.len()]; mons.len()];
            for (col, m) in mons.iter().enumerate() {
                let img = g.apply(&osc.space, &SuperPolynomial::monomial(m.clone(), Q::one()));
                for (mm, c) in img.terms {
                    block[pos(&mm)][col] = c;
                }
            }
            rows.extend(block.into_iter().filter(|r| r.iter().any(|x| !x.is_zero())));
        }
        let pivots = rref(&mut rows, mons.len());
        let free: Vec<usize> = (0..mons.len()).filter(|c| !pivots.contains(c)).collect();
        let basis = free
            .iter()
            .map(|&fc| {
                let mut v = SuperPolynomial::monomial(mons[fc].clone(), Q::one());
                for (row, &pc) in rows.iter().zip(&pivots) {
                    v.add_term(mons[pc].clone(), -row[fc].clone());
                }
                v
            })
            .collect();
        out.push((k, basis));
    }
    Ok(out)
}

/// Highest weight of `C[V]^G` for the standard Borel: the weight of the
/// lowest-degree invariant killed by every standard positive root vector.
/// The `gl(2p|2q)` index order is `x`-even, `y`-even, `x`-odd, `y`-odd, matching
/// the `δ₁…δ_{2p}, ε₁…ε_{2q}` coordinates of [`highest_weight`].
pub fn standard_borel_highest_weight(p: usize, q: usize, n: usize, max_degree: usize) -> Result<(Weight, SuperPolynomial)> {
    let osc = Oscillator::new(p, q, n)?;
    let mut order: Vec<(bool, usize)> = Vec::new();
    order.extend((0..p).map(|i| (false, i)));
    order.extend((0..p).map(|i| (true, i)));
    order.extend((p..p + q).map(|j| (false, j)));
    order.extend((p..p + q).map(|j| (true, j)));
    let label = |a: (bool, usize), b: (bool, usize)| {
        let block = match (a.0, b.0) {
            (false, false) => Block::A,
            (false, true) => Block::B,
            (true, false) => Block::C,
            (true, true) => Block::D,
        };
        BasisLabel { block, i: a.1, j: b.1 }
    };
    let mut raising = Vec::new();
    for a in 0..order.len() {
        for b in a + 1..order.len() {
            raising.push(osc.build_operator(label(order[a], order[b]))?);
        }
    }
    for (_, basis) in invariants_up_to_degree(p, q, n, max_degree)? {
        if basis.is_empty() {
            continue;
        }
        // Columns: basis vectors; rows: coefficients of every image monomial.
        let images: Vec<Vec<SuperPolynomial>> =
            basis.iter().map(|b| raising.iter().map(|t| t.apply(&osc.space, b)).collect()).collect();
        let mut keys: Vec<(usize, Monomial)> = Vec::new();
        for img in &images {
            for (r, f) in img.iter().enumerate() {
                keys.extend(f.terms.keys().map(|m| (r, m.clone())));
            }
        }
        keys.sort();
        keys.dedup();
        let mut rows: Vec<Vec<Q>> = keys
            .iter()
            .map(|(r, m)| images.iter().map(|img| img[*r].terms.get(m).cloned().unwrap_or_else(Q::zero)).collect())
            .collect();
        let pivots = rref(&mut rows, basis.len());
        let Some(fc) = (0..basis.len()).find(|c| !pivots.contains(c)) else {
            continue;
        };
        let mut v = basis[fc].clone();
        for (row, &pc) in rows.iter().zip(&pivots) {
            v.add_scaled(&basis[pc], &-row[fc].clone());
        }
        let (lead, lc) = v.terms.iter().next().map(|(m, c)| (m.clone(), c.clone())).expect("nonzero");
        let mut coords = Vec::with_capacity(order.len());
        for &o in &order {
            let t = osc.build_operator(label(o, o))?.apply(&osc.space, &v);
            let e = t.terms.get(&lead).cloned().unwrap_or_else(Q::zero) / lc.clone();
            if t != v.scale(&e) {
                return Err(Error::Hypothesis("singular vector is not a weight vector".into()));
            }
            coords.push(e);
        }
        let eps = coords.split_off(2 * p);
        return Ok((Weight { delta: coords, eps }, v));
    }
    Err(Error::Hypothesis(format!("no singular invariant up to degree {max_degree}")))
}

/// `Q(v)_{ij} = Σ_α Y_{iα} X_{αj}`: the quadratic invariants.
pub fn q_entries(osc: &Oscillator) -> Vec<SuperPolynomial> {
    let mut out = Vec::new();
    for i in 0..osc.k() {
        for j in 0..osc.k() {
            let mut e = SuperPolynomial::zero();
            for a in 0..osc.n {
                let xj = osc.space.mul(osc.x(a, j), &osc.one());
                e.add_scaled(&osc.space.mul(osc.y(i, a), &xj), &Q::one());
            }
            out.push(e);
        }
    }
    out
}

/// Coefficient helper for reports.
pub fn rational_to_f64(x: &Q) -> f64 {
    let (n, d) = (x.numer(), x.denom());
    let s = if x.is_negative() { -1.0 } else { 1.0 };
    s * n.abs().to_string().parse::<f64>().unwrap_or(f64::NAN) / d.to_string().parse::<f64>().unwrap_or(f64::NAN)
}
