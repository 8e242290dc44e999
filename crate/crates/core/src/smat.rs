//! Supermatrices over the Grassmann algebra.
//!
//! Rows and columns are ordered even-first: indices `0..p` are even,
//! `p..p+q` odd. An even supermatrix has even entries in the diagonal blocks
//! and odd entries in the off-diagonal blocks.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::galg::{FieldScalar, Parity, SElement, Scalar};

/// Dense matrix of Grassmann elements; the workhorse behind [`SuperMatrix`].
#[derive(Debug, Clone, PartialEq)]
pub struct GMat<R: Scalar> {
    rows: usize,
    cols: usize,
    generators: usize,
    data: Vec<SElement<R>>,
}

impl<R: Scalar> GMat<R> {
    pub fn zeros(rows: usize, cols: usize, generators: usize) -> Self {
        GMat {
            rows,
            cols,
            generators,
            data: vec![SElement::zero(generators); rows * cols],
        }
    }

    pub fn identity(n: usize, generators: usize) -> Self {
        let mut m = Self::zeros(n, n, generators);
        for i in 0..n {
            m.data[i * n + i] = SElement::one(generators);
        }
        m
    }

    pub fn from_fn(
        rows: usize,
        cols: usize,
        generators: usize,
        f: impl Fn(usize, usize) -> SElement<R>,
    ) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                let e = f(i, j);
                assert_eq!(e.generators(), generators, "entry generator universe");
                data.push(e);
            }
        }
        GMat {
            rows,
            cols,
            generators,
            data,
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn generators(&self) -> usize {
        self.generators
    }

    pub fn get(&self, i: usize, j: usize) -> &SElement<R> {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, e: SElement<R>) {
        self.data[i * self.cols + j] = e;
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn submatrix(&self, r0: usize, r1: usize, c0: usize, c1: usize) -> Self {
        Self::from_fn(r1 - r0, c1 - c0, self.generators, |i, j| {
            self.get(r0 + i, c0 + j).clone()
        })
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::Shape(format!(
                "{}x{} times {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Self::zeros(self.rows, other.cols, self.generators);
        for i in 0..self.rows {
            for k in 0..other.cols {
                let mut acc = SElement::zero(self.generators);
                for j in 0..self.cols {
                    let (x, y) = (self.get(i, j), other.get(j, k));
                    if !x.is_zero() && !y.is_zero() {
                        acc = acc.add(&x.checked_mul(y)?);
                    }
                }
                out.set(i, k, acc);
            }
        }
        Ok(out)
    }

    fn zip(&self, other: &Self, f: impl Fn(&SElement<R>, &SElement<R>) -> SElement<R>) -> Result<Self> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::Shape(format!(
                "{}x{} vs {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        Ok(GMat {
            rows: self.rows,
            cols: self.cols,
            generators: self.generators,
            data: self.data.iter().zip(&other.data).map(|(a, b)| f(a, b)).collect(),
        })
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.zip(other, |a, b| a.add(b))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.zip(other, |a, b| a.sub(b))
    }

    pub fn neg(&self) -> Self {
        self.map(|e| e.neg())
    }

    pub fn scale(&self, s: &SElement<R>) -> Self {
        self.map(|e| s.mul(e))
    }

    pub fn map(&self, f: impl Fn(&SElement<R>) -> SElement<R>) -> Self {
        GMat {
            rows: self.rows,
            cols: self.cols,
            generators: self.generators,
            data: self.data.iter().map(f).collect(),
        }
    }

    pub fn trace(&self) -> SElement<R> {
        (0..self.rows.min(self.cols))
            .fold(SElement::zero(self.generators), |acc, i| acc.add(self.get(i, i)))
    }

    pub fn body(&self) -> Vec<R> {
        self.data.iter().map(|e| e.body()).collect()
    }

    /// Soul part: every entry with its body removed.
    pub fn soul(&self) -> Self {
        self.map(|e| e.soul())
    }

    fn from_body(rows: usize, cols: usize, generators: usize, body: &[R]) -> Self {
        Self::from_fn(rows, cols, generators, |i, j| {
            SElement::scalar(generators, body[i * cols + j].clone())
        })
    }
}

/// Inverse of a numeric square matrix (row-major) by partial pivoting.
pub fn numeric_inverse<R: FieldScalar>(n: usize, m: &[R]) -> Option<Vec<R>> {
    let mut a = m.to_vec();
    let mut inv: Vec<R> = (0..n * n)
        .map(|k| if k / n == k % n { R::one() } else { R::zero() })
        .collect();
    for col in 0..n {
        let piv = (col..n).max_by(|&i, &j| {
            a[i * n + col]
                .modulus()
                .partial_cmp(&a[j * n + col].modulus())
                .unwrap_or(std::cmp::Ordering::Equal)
        })?;
        if a[piv * n + col].is_zero() || !(a[piv * n + col].modulus() > 0.0) {
            return None;
        }
        if piv != col {
            for k in 0..n {
                a.swap(piv * n + k, col * n + k);
                inv.swap(piv * n + k, col * n + k);
            }
        }
        let pinv = a[col * n + col].inv()?;
        for k in 0..n {
            a[col * n + k] = a[col * n + k].clone() * pinv.clone();
            inv[col * n + k] = inv[col * n + k].clone() * pinv.clone();
        }
        for r in 0..n {
            if r == col || a[r * n + col].is_zero() {
                continue;
            }
            let f = a[r * n + col].clone();
            for k in 0..n {
                a[r * n + k] = a[r * n + k].clone() - f.clone() * a[col * n + k].clone();
                inv[r * n + k] = inv[r * n + k].clone() - f.clone() * inv[col * n + k].clone();
            }
        }
    }
    Some(inv)
}

impl<R: FieldScalar> GMat<R> {
    /// Two-sided inverse: numeric body inverse followed by the terminating
    /// Neumann series in the soul.
    pub fn inverse(&self) -> Result<Self> {
        if !self.is_square() {
            return Err(Error::Shape("inverse of a non-square matrix".into()));
        }
        let n = self.rows;
        let b_inv = numeric_inverse(n, &self.body())
            .ok_or_else(|| Error::SingularBody(format!("{n}x{n} body not invertible")))?;
        let b_inv = Self::from_body(n, n, self.generators, &b_inv);
        // M = B(1 + X), X = B⁻¹N  ⇒  M⁻¹ = Σ (−X)^k B⁻¹
        let x = b_inv.mul(&self.soul())?.neg();
        let mut acc = Self::identity(n, self.generators);
        let mut power = Self::identity(n, self.generators);
        loop {
            power = power.mul(&x)?;
            if power.data.iter().all(|e| e.is_zero()) {
                break;
            }
            acc = acc.add(&power)?;
        }
        acc.mul(&b_inv)
    }

    /// Determinant of a matrix whose entries are all even (so they commute).
    pub fn det(&self) -> Result<SElement<R>> {
        if !self.is_square() {
            return Err(Error::Shape("determinant of a non-square matrix".into()));
        }
        if self.data.iter().any(|e| !e.is_even()) {
            return Err(Error::Parity("determinant needs even entries".into()));
        }
        let n = self.rows;
        let mut a = self.clone();
        let mut det = SElement::one(self.generators);
        for col in 0..n {
            let piv = (col..n)
                .max_by(|&i, &j| {
                    a.get(i, col)
                        .body()
                        .modulus()
                        .partial_cmp(&a.get(j, col).body().modulus())
                        .unwrap_or(std::cmp::Ordering::Equal)
                })
                .unwrap();
            if !(a.get(piv, col).body().modulus() > 0.0) {
                // Column body vanishes: the determinant is nilpotent. Fall back
                // to cofactor expansion which needs no inverses.
                return Ok(self.det_expansion());
            }
            if piv != col {
                for k in 0..n {
                    a.data.swap(piv * n + k, col * n + k);
                }
                det = det.neg();
            }
            let p = a.get(col, col).clone();
            det = det.mul(&p);
            let pinv = p.inverse()?;
            for r in col + 1..n {
                let f = a.get(r, col).mul(&pinv);
                if f.is_zero() {
                    continue;
                }
                for k in col..n {
                    let v = a.get(r, k).sub(&f.mul(a.get(col, k)));
                    a.set(r, k, v);
                }
            }
        }
        Ok(det)
    }

    fn det_expansion(&self) -> SElement<R> {
        let n = self.rows;
        if n == 0 {
            return SElement::one(self.generators);
        }
        let mut acc = SElement::zero(self.generators);
        for j in 0..n {
            let e = self.get(0, j);
            if e.is_zero() {
                continue;
            }
            let minor = GMat::from_fn(n - 1, n - 1, self.generators, |r, c| {
                self.get(r + 1, if c < j { c } else { c + 1 }).clone()
            });
            let term = e.mul(&minor.det_expansion());
            acc = if j % 2 == 0 { acc.add(&term) } else { acc.sub(&term) };
        }
        acc
    }
}

/// Integer multi-index `m ∈ Z^{p+q}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, serde::Serialize, serde::Deserialize)]
pub struct MultiIndex(pub Vec<i64>);

impl MultiIndex {
    pub fn zeros(len: usize) -> Self {
        MultiIndex(vec![0; len])
    }

    pub fn constant(len: usize, n: i64) -> Self {
        MultiIndex(vec![n; len])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn shifted(&self, n: i64) -> Self {
        MultiIndex(self.0.iter().map(|m| m + n).collect())
    }

    pub fn plus(&self, other: &MultiIndex) -> Self {
        MultiIndex(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn abs_sum(&self) -> i64 {
        self.0.iter().map(|m| m.abs()).sum()
    }

    /// Exponents `m_k − m_{k+1}` of the principal-minor Berezinians.
    pub fn minor_exponents(&self) -> Vec<i64> {
        let m = &self.0;
        (0..m.len())
            .map(|k| m[k] - m.get(k + 1).copied().unwrap_or(0))
            .collect()
    }

    /// Whether `Δ_m` is a polynomial: `m_1 ≥ … ≥ m_p ≥ 0 ≥ m_{p+q} ≥ … ≥ m_{p+1}`.
    pub fn is_polynomial(&self, p: usize) -> bool {
        let (even, odd) = self.0.split_at(p.min(self.0.len()));
        even.windows(2).all(|w| w[0] >= w[1])
            && even.last().is_none_or(|&x| x >= 0)
            && odd.windows(2).all(|w| w[0] <= w[1])
            && odd.last().is_none_or(|&x| x <= 0)
    }

    /// All polynomial-cone indices of type `(p|q)` with `Σ|m_j| ≤ max_abs`.
    pub fn cone(p: usize, q: usize, max_abs: i64) -> Vec<MultiIndex> {
        let mut out = vec![Vec::new()];
        for _ in 0..p + q {
            out = out
                .into_iter()
                .flat_map(|v: Vec<i64>| {
                    (-max_abs..=max_abs).map(move |x| {
                        let mut w = v.clone();
                        w.push(x);
                        w
                    })
                })
                .filter(|v| v.iter().map(|x| x.abs()).sum::<i64>() <= max_abs)
                .collect();
        }
        out.into_iter().map(MultiIndex).filter(|m| m.is_polynomial(p)).collect()
    }

    pub fn parse(s: &str) -> Result<Self> {
        if s.trim().is_empty() {
            return Ok(MultiIndex(Vec::new()));
        }
        s.split(',')
            .map(|t| {
                t.trim()
                    .parse::<i64>()
                    .map_err(|e| Error::InvalidArgument(format!("multi-index entry {t:?}: {e}")))
            })
            .collect::<Result<Vec<_>>>()
            .map(MultiIndex)
    }
}

impl std::fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|m| m.to_string()).collect();
        write!(f, "({})", parts.join(","))
    }
}

/// Supermatrix of row type `(r_ev|r_od)` and column type `(c_ev|c_od)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SuperMatrix<R: Scalar> {
    row_type: (usize, usize),
    col_type: (usize, usize),
    parity: Parity,
    mat: GMat<R>,
}

fn is_odd_index(i: usize, even: usize) -> bool {
    i >= even
}

impl<R: Scalar> SuperMatrix<R> {
    /// Wraps a dense matrix, checking the parity pattern.
    pub fn new(
        row_type: (usize, usize),
        col_type: (usize, usize),
        parity: Parity,
        mat: GMat<R>,
    ) -> Result<Self> {
        if mat.rows() != row_type.0 + row_type.1 || mat.cols() != col_type.0 + col_type.1 {
            return Err(Error::Shape(format!(
                "{}x{} matrix for type ({}|{})x({}|{})",
                mat.rows(),
                mat.cols(),
                row_type.0,
                row_type.1,
                col_type.0,
                col_type.1
            )));
        }
        for i in 0..mat.rows() {
            for j in 0..mat.cols() {
                let block_odd = is_odd_index(i, row_type.0) != is_odd_index(j, col_type.0);
                let want_odd = block_odd != (parity == Parity::Odd);
                let e = mat.get(i, j);
                let ok = if want_odd { e.is_odd() } else { e.is_even() };
                if !ok {
                    return Err(Error::Parity(format!("entry ({i},{j}) has wrong parity")));
                }
            }
        }
        Ok(SuperMatrix {
            row_type,
            col_type,
            parity,
            mat,
        })
    }

    /// Even square supermatrix of type `(p|q)`.
    pub fn even(p: usize, q: usize, mat: GMat<R>) -> Result<Self> {
        Self::new((p, q), (p, q), Parity::Even, mat)
    }

    pub fn identity(p: usize, q: usize, generators: usize) -> Self {
        SuperMatrix {
            row_type: (p, q),
            col_type: (p, q),
            parity: Parity::Even,
            mat: GMat::identity(p + q, generators),
        }
    }

    pub fn zeros(p: usize, q: usize, generators: usize) -> Self {
        SuperMatrix {
            row_type: (p, q),
            col_type: (p, q),
            parity: Parity::Even,
            mat: GMat::zeros(p + q, p + q, generators),
        }
    }

    /// Numeric even matrix: entries in odd blocks must be zero.
    pub fn from_numeric(p: usize, q: usize, generators: usize, entries: &[R]) -> Result<Self> {
        let n = p + q;
        if entries.len() != n * n {
            return Err(Error::Shape(format!("expected {} entries", n * n)));
        }
        let mat = GMat::from_fn(n, n, generators, |i, j| {
            SElement::scalar(generators, entries[i * n + j].clone())
        });
        Self::even(p, q, mat)
    }

    /// Block-diagonal even matrix from numeric `p×p` and `q×q` blocks.
    pub fn block_diag_numeric(p: usize, q: usize, generators: usize, a: &[R], d: &[R]) -> Result<Self> {
        if a.len() != p * p || d.len() != q * q {
            return Err(Error::Shape("block sizes".into()));
        }
        let n = p + q;
        let mut entries = vec![R::zero(); n * n];
        for i in 0..p {
            for j in 0..p {
                entries[i * n + j] = a[i * p + j].clone();
            }
        }
        for i in 0..q {
            for j in 0..q {
                entries[(p + i) * n + p + j] = d[i * q + j].clone();
            }
        }
        Self::from_numeric(p, q, generators, &entries)
    }

    pub fn row_type(&self) -> (usize, usize) {
        self.row_type
    }

    pub fn col_type(&self) -> (usize, usize) {
        self.col_type
    }

    pub fn parity(&self) -> Parity {
        self.parity
    }

    pub fn generators(&self) -> usize {
        self.mat.generators()
    }

    pub fn matrix(&self) -> &GMat<R> {
        &self.mat
    }

    pub fn get(&self, i: usize, j: usize) -> &SElement<R> {
        self.mat.get(i, j)
    }

    pub fn is_square(&self) -> bool {
        self.row_type == self.col_type
    }

    /// `(p, q)` of a square supermatrix.
    pub fn square_type(&self) -> Result<(usize, usize)> {
        if self.is_square() {
            Ok(self.row_type)
        } else {
            Err(Error::Shape("supermatrix is not square".into()))
        }
    }

    pub fn block_a(&self) -> GMat<R> {
        self.mat.submatrix(0, self.row_type.0, 0, self.col_type.0)
    }

    pub fn block_b(&self) -> GMat<R> {
        self.mat
            .submatrix(0, self.row_type.0, self.col_type.0, self.mat.cols())
    }

    pub fn block_c(&self) -> GMat<R> {
        self.mat
            .submatrix(self.row_type.0, self.mat.rows(), 0, self.col_type.0)
    }

    pub fn block_d(&self) -> GMat<R> {
        self.mat.submatrix(
            self.row_type.0,
            self.mat.rows(),
            self.col_type.0,
            self.mat.cols(),
        )
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        if self.col_type != other.row_type {
            return Err(Error::Shape("supermatrix types do not compose".into()));
        }
        let parity = if self.parity == other.parity { Parity::Even } else { Parity::Odd };
        Ok(SuperMatrix {
            row_type: self.row_type,
            col_type: other.col_type,
            parity,
            mat: self.mat.mul(&other.mat)?,
        })
    }

    fn same_shape(&self, other: &Self) -> Result<()> {
        if self.row_type != other.row_type
            || self.col_type != other.col_type
            || self.parity != other.parity
        {
            Err(Error::Shape("supermatrix types differ".into()))
        } else {
            Ok(())
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.same_shape(other)?;
        Ok(SuperMatrix {
            mat: self.mat.add(&other.mat)?,
            ..self.clone()
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.same_shape(other)?;
        Ok(SuperMatrix {
            mat: self.mat.sub(&other.mat)?,
            ..self.clone()
        })
    }

    pub fn neg(&self) -> Self {
        SuperMatrix {
            mat: self.mat.neg(),
            ..self.clone()
        }
    }

    /// Multiplies every entry by an even scalar element.
    pub fn scale(&self, s: &SElement<R>) -> Self {
        SuperMatrix {
            mat: self.mat.scale(s),
            ..self.clone()
        }
    }

    /// `str(Z) = tr A − tr D`.
    pub fn supertrace(&self) -> Result<SElement<R>> {
        let (p, _) = self.square_type()?;
        if self.parity != Parity::Even {
            return Err(Error::Parity("supertrace of an odd supermatrix".into()));
        }
        let mut acc = SElement::zero(self.generators());
        for i in 0..self.mat.rows() {
            acc = if i < p {
                acc.add(self.get(i, i))
            } else {
                acc.sub(self.get(i, i))
            };
        }
        Ok(acc)
    }

    /// Leading principal `k×k` minor, as a supermatrix of type `(min(k,p)|k−min(k,p))`.
    pub fn principal_minor(&self, k: usize) -> Result<Self> {
        let (p, q) = self.square_type()?;
        if k > p + q {
            return Err(Error::InvalidArgument(format!("minor {k} of a ({p}|{q}) matrix")));
        }
        let ke = k.min(p);
        Ok(SuperMatrix {
            row_type: (ke, k - ke),
            col_type: (ke, k - ke),
            parity: self.parity,
            mat: self.mat.submatrix(0, k, 0, k),
        })
    }

    /// Coefficient-wise conversion to another ring.
    pub fn map_scalars<S: Scalar>(&self, f: impl Fn(&R) -> S + Copy) -> SuperMatrix<S> {
        let n = self.generators();
        SuperMatrix {
            row_type: self.row_type,
            col_type: self.col_type,
            parity: self.parity,
            mat: GMat::from_fn(self.mat.rows(), self.mat.cols(), n, |i, j| self.get(i, j).map(f)),
        }
    }
}

impl<R: FieldScalar> SuperMatrix<R> {
    pub fn inverse(&self) -> Result<Self> {
        self.square_type()?;
        if self.parity != Parity::Even {
            return Err(Error::Parity("only even supermatrices are inverted".into()));
        }
        Ok(SuperMatrix {
            mat: self.mat.inverse()?,
            ..self.clone()
        })
    }

    fn check_even_square(&self) -> Result<()> {
        self.square_type()?;
        if self.parity != Parity::Even {
            return Err(Error::Parity("Berezinian of an odd supermatrix".into()));
        }
        Ok(())
    }

    /// `det(A − B D⁻¹ C) · det(D)⁻¹`.
    pub fn berezinian_d_form(&self) -> Result<SElement<R>> {
        self.check_even_square()?;
        let (a, b, c, d) = (self.block_a(), self.block_b(), self.block_c(), self.block_d());
        let d_inv = d.inverse()?;
        let schur = a.sub(&b.mul(&d_inv)?.mul(&c)?)?;
        Ok(schur.det()?.mul(&d.det()?.inverse()?))
    }

    /// `det(A) · det(D − C A⁻¹ B)⁻¹`.
    pub fn berezinian_a_form(&self) -> Result<SElement<R>> {
        self.check_even_square()?;
        let (a, b, c, d) = (self.block_a(), self.block_b(), self.block_c(), self.block_d());
        let a_inv = a.inverse()?;
        let schur = d.sub(&c.mul(&a_inv)?.mul(&b)?)?;
        Ok(a.det()?.mul(&schur.det()?.inverse()?))
    }

    /// Berezinian, using whichever Schur form has an invertible pivot block.
    pub fn berezinian(&self) -> Result<SElement<R>> {
        match self.berezinian_d_form() {
            Ok(b) => Ok(b),
            Err(Error::SingularBody(_)) => self.berezinian_a_form().map_err(|e| match e {
                Error::SingularBody(_) => {
                    Error::SingularBody("neither diagonal block has invertible body".into())
                }
                other => other,
            }),
            Err(e) => Err(e),
        }
    }

    /// `Ber(Z)^e`. Nonpositive powers prefer `det(A)^e · det(D − CA⁻¹B)^{−e}`,
    /// which stays defined when the body of `D` is singular.
    pub fn berezinian_pow(&self, e: i64) -> Result<SElement<R>> {
        self.check_even_square()?;
        let g = self.generators();
        if e == 0 {
            return Ok(SElement::one(g));
        }
        let a = self.block_a();
        if e < 0 {
            if let Ok(a_inv) = a.inverse() {
                let schur = self
                    .block_d()
                    .sub(&self.block_c().mul(&a_inv)?.mul(&self.block_b())?)?;
                return Ok(a.det()?.powi(e)?.mul(&schur.det()?.powi(-e)?));
            }
        }
        self.berezinian()?.powi(e)
    }

    /// Conical superfunction `Δ_m(Z) = Π_k Ber([Z]_k)^{m_k − m_{k+1}}`.
    pub fn delta_m(&self, m: &MultiIndex) -> Result<SElement<R>> {
        let (p, q) = self.square_type()?;
        if m.len() != p + q {
            return Err(Error::Shape(format!(
                "multi-index of length {} for type ({p}|{q})",
                m.len()
            )));
        }
        let mut acc = SElement::one(self.generators());
        for (k, e) in m.minor_exponents().into_iter().enumerate() {
            if e == 0 {
                continue;
            }
            let minor = self.principal_minor(k + 1)?;
            let factor = if k < p {
                let det = minor.block_a().det()?;
                det.powi(e).map_err(|_| {
                    Error::SingularBody(format!("minor {} has singular body", k + 1))
                })?
            } else {
                minor.berezinian_pow(e).map_err(|err| match err {
                    Error::SingularBody(msg) => {
                        Error::SingularBody(format!("minor {} with exponent {e}: {msg}", k + 1))
                    }
                    other => other,
                })?
            };
            acc = acc.mul(&factor);
        }
        Ok(acc)
    }

    /// Cayley transform `(1 + Z)(1 − Z)⁻¹`.
    pub fn cayley(&self) -> Result<Self> {
        let (p, q) = self.square_type()?;
        let one = Self::identity(p, q, self.generators());
        let den = one.sub(self)?.inverse().map_err(|e| match e {
            Error::SingularBody(_) => Error::SingularBody("1 − Z has singular body".into()),
            other => other,
        })?;
        one.add(self)?.mul(&den)
    }
}

impl SuperMatrix<Complex64> {
    /// Largest coefficient deviation over all entries.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        let (a, b) = (&self.mat, &other.mat);
        let mut worst = 0.0f64;
        for i in 0..a.rows() {
            for j in 0..a.cols() {
                worst = worst.max(a.get(i, j).max_abs_diff(b.get(i, j)));
            }
        }
        worst
    }

    /// Largest coefficient modulus over all entries.
    pub fn max_abs(&self) -> f64 {
        let a = &self.mat;
        let mut worst = 0.0f64;
        for i in 0..a.rows() {
            for j in 0..a.cols() {
                worst = worst.max(a.get(i, j).max_abs());
            }
        }
        worst
    }
}

/// Even element of `gl(2p|2q)` written as `[[A, B], [C, D]]` with `(p|q)` blocks.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockSuperMatrix<R: Scalar> {
    pub a: SuperMatrix<R>,
    pub b: SuperMatrix<R>,
    pub c: SuperMatrix<R>,
    pub d: SuperMatrix<R>,
}

impl<R: FieldScalar> BlockSuperMatrix<R> {
    pub fn new(a: SuperMatrix<R>, b: SuperMatrix<R>, c: SuperMatrix<R>, d: SuperMatrix<R>) -> Result<Self> {
        let t = a.square_type()?;
        for blk in [&b, &c, &d] {
            if blk.square_type()? != t || blk.parity() != Parity::Even {
                return Err(Error::Shape("blocks must share one (p|q) type".into()));
            }
        }
        Ok(BlockSuperMatrix { a, b, c, d })
    }

    pub fn identity(p: usize, q: usize, generators: usize) -> Self {
        BlockSuperMatrix {
            a: SuperMatrix::identity(p, q, generators),
            b: SuperMatrix::zeros(p, q, generators),
            c: SuperMatrix::zeros(p, q, generators),
            d: SuperMatrix::identity(p, q, generators),
        }
    }

    pub fn block_diag(a: SuperMatrix<R>, d: SuperMatrix<R>) -> Result<Self> {
        let (p, q) = a.square_type()?;
        let g = a.generators();
        Self::new(a, SuperMatrix::zeros(p, q, g), SuperMatrix::zeros(p, q, g), d)
    }

    /// Upper unipotent `[[1, B], [0, 1]]`.
    pub fn upper_unipotent(b: SuperMatrix<R>) -> Result<Self> {
        let (p, q) = b.square_type()?;
        let g = b.generators();
        Self::new(SuperMatrix::identity(p, q, g), b, SuperMatrix::zeros(p, q, g), SuperMatrix::identity(p, q, g))
    }

    /// The element `[[1, 1], [−1, 1]]` whose Möbius action is the Cayley transform.
    pub fn cayley_element(p: usize, q: usize, generators: usize) -> Self {
        let one = SuperMatrix::identity(p, q, generators);
        BlockSuperMatrix {
            a: one.clone(),
            b: one.clone(),
            c: one.neg(),
            d: one,
        }
    }

    pub fn mul(&self, o: &Self) -> Result<Self> {
        Ok(BlockSuperMatrix {
            a: self.a.mul(&o.a)?.add(&self.b.mul(&o.c)?)?,
            b: self.a.mul(&o.b)?.add(&self.b.mul(&o.d)?)?,
            c: self.c.mul(&o.a)?.add(&self.d.mul(&o.c)?)?,
            d: self.c.mul(&o.b)?.add(&self.d.mul(&o.d)?)?,
        })
    }

    /// Möbius action `g·Z = (AZ + B)(CZ + D)⁻¹`.
    pub fn mobius(&self, z: &SuperMatrix<R>) -> Result<SuperMatrix<R>> {
        let den = self.c.mul(z)?.add(&self.d)?;
        let den_inv = den.inverse().map_err(|e| match e {
            Error::SingularBody(_) => {
                Error::SingularBody("CZ + D has singular body: g·Z leaves the affine patch".into())
            }
            other => other,
        })?;
        self.a.mul(z)?.add(&self.b)?.mul(&den_inv)
    }

    /// Isotropy cocycle `k(g, Z) = diag((A − BD⁻¹C)(1 + ZD⁻¹C)⁻¹, CZ + D)`.
    pub fn isotropy_cocycle(&self, z: &SuperMatrix<R>) -> Result<(SuperMatrix<R>, SuperMatrix<R>)> {
        let (p, q) = z.square_type()?;
        let one = SuperMatrix::identity(p, q, z.generators());
        let d_inv = self.d.inverse()?;
        let d_inv_c = d_inv.mul(&self.c)?;
        let k1 = self
            .a
            .sub(&self.b.mul(&d_inv_c)?)?
            .mul(&one.add(&z.mul(&d_inv_c)?)?.inverse()?)?;
        let k2 = self.c.mul(z)?.add(&self.d)?;
        Ok((k1, k2))
    }
}

/// Random samplers shared by property tests and verification suites.
pub mod sample {
    use super::*;
    use rand::Rng;

    fn cnum<G: Rng + ?Sized>(rng: &mut G, scale: f64) -> Complex64 {
        Complex64::new(rng.random_range(-scale..scale), rng.random_range(-scale..scale))
    }

    /// Random element of the given parity with complex coefficients.
    pub fn element<G: Rng + ?Sized>(
        rng: &mut G,
        generators: usize,
        parity: Parity,
        body: Complex64,
        scale: f64,
    ) -> SElement<Complex64> {
        let mut terms = Vec::new();
        for mask in 1u32..(1u32 << generators) {
            if Parity::of_len(mask.count_ones()) == parity {
                terms.push((mask, cnum(rng, scale)));
            }
        }
        if parity == Parity::Even {
            terms.push((0, body));
        }
        SElement::from_terms(generators, terms)
    }

    /// Random even `(p|q)` supermatrix with body `diag_shift·1 + noise`.
    pub fn even_supermatrix<G: Rng + ?Sized>(
        rng: &mut G,
        p: usize,
        q: usize,
        generators: usize,
        diag_shift: f64,
        scale: f64,
    ) -> SuperMatrix<Complex64> {
        let n = p + q;
        let mut rows = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                let odd = (i < p) != (j < p);
                let e = if odd {
                    element(rng, generators, Parity::Odd, Complex64::new(0.0, 0.0), scale)
                } else {
                    let shift = if i == j { diag_shift } else { 0.0 };
                    let body = cnum(rng, scale) + Complex64::new(shift, 0.0);
                    element(rng, generators, Parity::Even, body, scale)
                };
                rows.push(e);
            }
        }
        let mat = GMat::from_fn(n, n, generators, |i, j| rows[i * n + j].clone());
        SuperMatrix::even(p, q, mat).expect("parity pattern holds by construction")
    }

    /// Random even element of `gl(2p|2q)` near the identity.
    pub fn block_element<G: Rng + ?Sized>(
        rng: &mut G,
        p: usize,
        q: usize,
        generators: usize,
        scale: f64,
    ) -> BlockSuperMatrix<Complex64> {
        BlockSuperMatrix {
            a: even_supermatrix(rng, p, q, generators, 1.0, scale),
            b: even_supermatrix(rng, p, q, generators, 0.0, scale),
            c: even_supermatrix(rng, p, q, generators, 0.0, scale),
            d: even_supermatrix(rng, p, q, generators, 1.0, scale),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::BigRational;
    use num_traits::{One, Zero};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    type Q = BigRational;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn q(n: i64) -> Q {
        Q::from_int(n)
    }

    #[test]
    fn supertrace_examples() {
        let id = SuperMatrix::<Q>::identity(2, 1, 0);
        assert_eq!(id.supertrace().unwrap().body(), q(1));
        let z = SuperMatrix::block_diag_numeric(1, 1, 0, &[q(2)], &[q(3)]).unwrap();
        assert_eq!(z.supertrace().unwrap().body(), q(-1));
    }

    #[test]
    fn supertrace_needs_square() {
        let m = SuperMatrix::<Q>::new((1, 0), (2, 0), Parity::Even, GMat::zeros(1, 2, 0)).unwrap();
        assert!(m.supertrace().is_err());
    }

    #[test]
    fn parity_checked_on_construction() {
        let xi = SElement::<Q>::generator(1, 0).unwrap();
        let mut m = GMat::zeros(2, 2, 1);
        m.set(0, 0, xi.clone());
        assert!(SuperMatrix::even(1, 1, m.clone()).is_err());
        let mut m = GMat::zeros(2, 2, 1);
        m.set(0, 1, xi);
        assert!(SuperMatrix::even(1, 1, m).is_ok());
    }

    #[test]
    fn inverse_examples() {
        let id = SuperMatrix::<Q>::identity(1, 1, 0);
        assert_eq!(id.inverse().unwrap(), id);
        let z = SuperMatrix::block_diag_numeric(1, 1, 0, &[q(2)], &[q(5)]).unwrap();
        let expect = SuperMatrix::block_diag_numeric(1, 1, 0, &[Q::new(1.into(), 2.into())], &[Q::new(1.into(), 5.into())]).unwrap();
        assert_eq!(z.inverse().unwrap(), expect);
        let sing = SuperMatrix::block_diag_numeric(1, 1, 0, &[q(0)], &[q(1)]).unwrap();
        assert!(matches!(sing.inverse(), Err(Error::SingularBody(_))));
    }

    #[test]
    fn random_inverse_is_two_sided() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..20 {
            let z = sample::even_supermatrix(&mut rng, 2, 1, 3, 2.0, 0.5);
            let zi = z.inverse().unwrap();
            let id = SuperMatrix::identity(2, 1, 3);
            assert!(z.mul(&zi).unwrap().max_abs_diff(&id) < 1e-12);
            assert!(zi.mul(&z).unwrap().max_abs_diff(&id) < 1e-12);
        }
    }

    fn one_one(a: Q, beta: SElement<Q>, gamma: SElement<Q>, d: Q) -> SuperMatrix<Q> {
        let g = beta.generators();
        let mut m = GMat::zeros(2, 2, g);
        m.set(0, 0, SElement::scalar(g, a));
        m.set(0, 1, beta);
        m.set(1, 0, gamma);
        m.set(1, 1, SElement::scalar(g, d));
        SuperMatrix::even(1, 1, m).unwrap()
    }

    #[test]
    fn berezinian_one_one_closed_form() {
        let (a, d) = (q(3), q(2));
        let beta = SElement::generator(2, 0).unwrap();
        let gamma = SElement::generator(2, 1).unwrap();
        let z = one_one(a.clone(), beta.clone(), gamma.clone(), d.clone());
        // a/d − βγ/d²
        let expect = SElement::scalar(2, a / d.clone())
            .sub(&beta.mul(&gamma).scale(&(Q::one() / (d.clone() * d))));
        assert_eq!(z.berezinian_d_form().unwrap(), expect);
        assert_eq!(z.berezinian_a_form().unwrap(), expect);
        assert_eq!(SuperMatrix::<Q>::identity(2, 2, 0).berezinian().unwrap(), SElement::one(0));
    }

    #[test]
    fn berezinian_rejects_fully_singular() {
        let beta = SElement::generator(2, 0).unwrap();
        let gamma = SElement::generator(2, 1).unwrap();
        let z = one_one(Q::zero(), beta, gamma, Q::zero());
        assert!(matches!(z.berezinian(), Err(Error::SingularBody(_))));
    }

    #[test]
    fn negative_power_with_nilpotent_d_block() {
        // z = 2, w = ξ1ξ2 (no body): Ber⁻¹ = det(w − ωz⁻¹ζ)/det(z)
        let g = 4;
        let x = |i| SElement::<Q>::generator(g, i).unwrap();
        let w = x(0).mul(&x(1));
        let mut m = GMat::zeros(2, 2, g);
        m.set(0, 0, SElement::scalar(g, q(2)));
        m.set(0, 1, x(2));
        m.set(1, 0, x(3));
        m.set(1, 1, w.clone());
        let z = SuperMatrix::even(1, 1, m).unwrap();
        assert!(z.berezinian().is_err());
        let half = Q::new(1.into(), 2.into());
        let schur = w.sub(&x(3).mul(&x(2)).scale(&half));
        assert_eq!(z.berezinian_pow(-1).unwrap(), schur.scale(&half));
        assert_eq!(z.berezinian_pow(-2).unwrap(), schur.mul(&schur).scale(&(half.clone() * half)));
    }

    #[test]
    fn delta_m_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let z = sample::even_supermatrix(&mut rng, 1, 1, 2, 2.0, 0.3);
        let one = z.delta_m(&MultiIndex(vec![0, 0])).unwrap();
        assert!(one.max_abs_diff(&SElement::one(2)) < 1e-15);
        let full = z.delta_m(&MultiIndex(vec![2, 2])).unwrap();
        assert!(full.max_abs_diff(&z.berezinian().unwrap().powi(2).unwrap()) < 1e-12);
        let s = SuperMatrix::from_numeric(1, 0, 0, &[c(1.7)]).unwrap();
        let v = s.delta_m(&MultiIndex(vec![3])).unwrap().body();
        assert!((v - c(1.7f64.powi(3))).norm() < 1e-12);
        assert!(z.delta_m(&MultiIndex(vec![1])).is_err());
    }

    #[test]
    fn mobius_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let z = sample::even_supermatrix(&mut rng, 1, 1, 2, 0.0, 0.4);
        let id = BlockSuperMatrix::identity(1, 1, 2);
        assert!(id.mobius(&z).unwrap().max_abs_diff(&z) < 1e-15);
        let b = sample::even_supermatrix(&mut rng, 1, 1, 2, 0.0, 0.4);
        let u = BlockSuperMatrix::upper_unipotent(b.clone()).unwrap();
        assert!(u.mobius(&z).unwrap().max_abs_diff(&z.add(&b).unwrap()) < 1e-14);
    }

    #[test]
    fn cayley_examples() {
        let zero = SuperMatrix::<Complex64>::zeros(1, 1, 0);
        assert!(zero.cayley().unwrap().max_abs_diff(&SuperMatrix::identity(1, 1, 0)) < 1e-15);
        let z = SuperMatrix::from_numeric(1, 0, 0, &[c(1.0 / 3.0)]).unwrap();
        assert!((z.cayley().unwrap().get(0, 0).body() - c(2.0)).norm() < 1e-14);
        let one = SuperMatrix::from_numeric(1, 0, 0, &[c(1.0)]).unwrap();
        assert!(matches!(one.cayley(), Err(Error::SingularBody(_))));
    }

    #[test]
    fn cocycle_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let z = sample::even_supermatrix(&mut rng, 1, 1, 2, 0.0, 0.3);
        let (k1, k2) = BlockSuperMatrix::identity(1, 1, 2).isotropy_cocycle(&z).unwrap();
        let id = SuperMatrix::identity(1, 1, 2);
        assert!(k1.max_abs_diff(&id) < 1e-14 && k2.max_abs_diff(&id) < 1e-14);
        let a = sample::even_supermatrix(&mut rng, 1, 1, 2, 2.0, 0.3);
        let d = sample::even_supermatrix(&mut rng, 1, 1, 2, 2.0, 0.3);
        let g = BlockSuperMatrix::block_diag(a.clone(), d.clone()).unwrap();
        let (k1, k2) = g.isotropy_cocycle(&SuperMatrix::zeros(1, 1, 2)).unwrap();
        assert!(k1.max_abs_diff(&a) < 1e-14 && k2.max_abs_diff(&d) < 1e-14);
    }

    #[test]
    fn polynomial_cone_predicate() {
        assert!(MultiIndex(vec![2, 1, -1, 0]).is_polynomial(2));
        assert!(!MultiIndex(vec![1, 2]).is_polynomial(2));
        assert!(!MultiIndex(vec![0, 1]).is_polynomial(1));
        assert!(MultiIndex(vec![]).is_polynomial(0));
    }
}
