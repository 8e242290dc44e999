//! Structured superfunctions `c · poly(y) · Δ_m(y) · e^{−str(X y)}`, the
//! quadratic map `Q(L, L') = L L'`, and the action of the even group `H`.

use crate::error::{Error, Result};
use crate::galg::SElement;
use crate::numeric::{self, c, CMat, C};
use crate::smat::{GMat, MultiIndex, SuperMatrix};

/// A `(p|q)`-square even supermatrix with complex Grassmann entries.
pub type SuperPoint = SuperMatrix<C>;

/// Anything that can be integrated over the flat space or over Ω.
pub trait Integrand: Sync {
    /// `(p, q)` of the argument.
    fn shape(&self) -> (usize, usize);

    fn evaluate(&self, y: &SuperPoint) -> Result<SElement<C>>;

    /// `K` with the integrand decaying like `e^{−tr(K z)}` along `Herm⁺(p)`;
    /// `None` if there is no Gaussian factor.
    fn z_decay(&self) -> Option<CMat>;
}

/// Block-diagonal numeric supermatrix built from `z` and `w`.
pub fn numeric_point(z: &CMat, w: &CMat, generators: usize) -> Result<SuperPoint> {
    let (p, q) = (z.nrows(), w.nrows());
    SuperMatrix::block_diag_numeric(
        p,
        q,
        generators,
        &numeric::to_row_major(z),
        &numeric::to_row_major(w),
    )
}

/// Number of odd generators used by a point of Ω: one `(ω, ζ)` pair per entry.
pub fn omega_generators(p: usize, q: usize) -> usize {
    2 * p * q
}

/// Index of `ω_{ℓi}` in the Ω generator universe; `ζ_{iℓ}` follows it.
pub fn omega_index(q: usize, i: usize, l: usize) -> usize {
    2 * (i * q + l)
}

/// The point `[[z, ζ], [ω, w]]` of Ω over the body point `(z, w)`.
pub fn omega_point(z: &CMat, w: &CMat) -> Result<SuperPoint> {
    let (p, q) = (z.nrows(), w.nrows());
    let g = omega_generators(p, q);
    let mat = GMat::from_fn(p + q, p + q, g, |r, s| match (r < p, s < p) {
        (true, true) => SElement::scalar(g, z[(r, s)]),
        (false, false) => SElement::scalar(g, w[(r - p, s - p)]),
        (true, false) => SElement::generator(g, omega_index(q, r, s - p) + 1).unwrap(),
        (false, true) => SElement::generator(g, omega_index(q, s, r - p)).unwrap(),
    });
    SuperMatrix::even(p, q, mat)
}

/// Number of odd generators on the flat side: the odd blocks of `L` and `L'`.
pub fn flat_generators(q: usize, n: usize) -> usize {
    2 * n * q
}

/// `Q(v) = L L'` on the real cycle `L' = (L_even*, L'_odd)`.
///
/// Odd coordinates come in adjacent pairs `(ξ_{kα}, ξ'_{αk})`.
pub fn q_map(l_even: &CMat, q: usize) -> Result<SuperPoint> {
    let (p, n) = (l_even.nrows(), l_even.ncols());
    let g = flat_generators(q, n);
    let xi = |k: usize, a: usize| SElement::generator(g, 2 * (k * n + a)).unwrap();
    let xi_p = |a: usize, k: usize| SElement::generator(g, 2 * (k * n + a) + 1).unwrap();
    let mat = GMat::from_fn(p + q, p + q, g, |r, s| {
        let mut acc = SElement::zero(g);
        for a in 0..n {
            let term = match (r < p, s < p) {
                (true, true) => SElement::scalar(g, l_even[(r, a)] * l_even[(s, a)].conj()),
                (true, false) => xi_p(a, s - p).scale(&l_even[(r, a)]),
                (false, true) => xi(r - p, a).scale(&l_even[(s, a)].conj()),
                (false, false) => xi(r - p, a).mul(&xi_p(a, s - p)),
            };
            acc = acc.add(&term);
        }
        acc
    });
    SuperMatrix::even(p, q, mat)
}

/// Polynomial in the matrix entries: `Σ c · y_{i₁j₁} ⋯ y_{i_kj_k}` (ordered products).
#[derive(Debug, Clone, PartialEq, Default)]
pub struct EntryPolynomial {
    pub terms: Vec<(C, Vec<(usize, usize)>)>,
}

impl EntryPolynomial {
    pub fn entry(i: usize, j: usize) -> Self {
        EntryPolynomial {
            terms: vec![(c(1.0, 0.0), vec![(i, j)])],
        }
    }

    pub fn constant(v: C) -> Self {
        EntryPolynomial {
            terms: vec![(v, Vec::new())],
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut terms = Vec::new();
        for (a, ea) in &self.terms {
            for (b, eb) in &other.terms {
                terms.push((a * b, ea.iter().chain(eb).copied().collect()));
            }
        }
        EntryPolynomial { terms }
    }

    pub fn evaluate(&self, y: &SuperPoint) -> Result<SElement<C>> {
        let g = y.generators();
        let n = y.matrix().rows();
        let mut acc = SElement::zero(g);
        for (coef, entries) in &self.terms {
            let mut t = SElement::scalar(g, *coef);
            for &(i, j) in entries {
                if i >= n || j >= n {
                    return Err(Error::Shape(format!("entry ({i},{j}) of a {n}x{n} point")));
                }
                t = t.mul(y.get(i, j));
            }
            acc = acc.add(&t);
        }
        Ok(acc)
    }
}

/// `coefficient · poly(y) · Δ_m(y) · e^{−str(X y)}` with `X = diag(kernel_z, kernel_w)`.
#[derive(Debug, Clone, PartialEq)]
pub struct StructuredFunction {
    p: usize,
    q: usize,
    pub kernel_z: CMat,
    pub kernel_w: CMat,
    pub m: Option<MultiIndex>,
    pub poly: Option<EntryPolynomial>,
    pub coefficient: C,
}

impl StructuredFunction {
    /// `e^{−α str(y)}`.
    pub fn gaussian(p: usize, q: usize, alpha: f64) -> Self {
        StructuredFunction {
            p,
            q,
            kernel_z: numeric::scalar_matrix(p, c(alpha, 0.0)),
            kernel_w: numeric::scalar_matrix(q, c(alpha, 0.0)),
            m: None,
            poly: None,
            coefficient: c(1.0, 0.0),
        }
    }

    /// `Δ_m(y) e^{−α str(y)}`.
    pub fn conical(p: usize, q: usize, m: MultiIndex, alpha: f64) -> Result<Self> {
        Self::gaussian(p, q, alpha).with_conical(m)
    }

    /// A pure entry polynomial (no Gaussian factor).
    pub fn polynomial(p: usize, q: usize, poly: EntryPolynomial) -> Self {
        Self::gaussian(p, q, 0.0).with_poly(poly)
    }

    /// `e^{−str(X y)}` for a numeric block-diagonal `X = diag(kz, kw)`.
    pub fn exponential(kz: CMat, kw: CMat) -> Result<Self> {
        if !kz.is_square() || !kw.is_square() {
            return Err(Error::Shape("kernel blocks must be square".into()));
        }
        let (p, q) = (kz.nrows(), kw.nrows());
        Ok(StructuredFunction {
            kernel_z: kz,
            kernel_w: kw,
            ..Self::gaussian(p, q, 0.0)
        })
    }

    pub fn with_conical(mut self, m: MultiIndex) -> Result<Self> {
        if m.len() != self.p + self.q {
            return Err(Error::Shape(format!(
                "multi-index {m} for type ({}|{})",
                self.p, self.q
            )));
        }
        self.m = Some(match self.m.take() {
            Some(old) => old.plus(&m),
            None => m,
        });
        Ok(self)
    }

    pub fn with_poly(mut self, poly: EntryPolynomial) -> Self {
        self.poly = Some(match self.poly.take() {
            Some(old) => old.mul(&poly),
            None => poly,
        });
        self
    }

    pub fn scaled(mut self, s: C) -> Self {
        self.coefficient *= s;
        self
    }

    /// Pointwise product; conical factors combine via `Δ_m Δ_m' = Δ_{m+m'}`.
    pub fn times(&self, other: &Self) -> Result<Self> {
        if (self.p, self.q) != (other.p, other.q) {
            return Err(Error::Shape("product of functions on different spaces".into()));
        }
        let mut out = StructuredFunction {
            kernel_z: &self.kernel_z + &other.kernel_z,
            kernel_w: &self.kernel_w + &other.kernel_w,
            coefficient: self.coefficient * other.coefficient,
            ..self.clone()
        };
        if let Some(m) = &other.m {
            out = out.with_conical(m.clone())?;
        }
        if let Some(poly) = &other.poly {
            out = out.with_poly(poly.clone());
        }
        Ok(out)
    }

    /// `α` if the kernel is `α·1`.
    pub fn alpha(&self) -> Option<f64> {
        let probe = if self.p > 0 { self.kernel_z[(0, 0)] } else if self.q > 0 { self.kernel_w[(0, 0)] } else { c(0.0, 0.0) };
        let scalar_z = numeric::scalar_matrix(self.p, probe);
        let scalar_w = numeric::scalar_matrix(self.q, probe);
        (probe.im == 0.0 && self.kernel_z == scalar_z && self.kernel_w == scalar_w).then_some(probe.re)
    }

    /// `str(X y)` as a Grassmann element.
    pub fn kernel_supertrace(&self, y: &SuperPoint) -> SElement<C> {
        let (p, q) = (self.p, self.q);
        let mut acc = SElement::zero(y.generators());
        for i in 0..p {
            for j in 0..p {
                let k = self.kernel_z[(i, j)];
                if k != c(0.0, 0.0) {
                    acc = acc.add(&y.get(j, i).scale(&k));
                }
            }
        }
        for i in 0..q {
            for j in 0..q {
                let k = self.kernel_w[(i, j)];
                if k != c(0.0, 0.0) {
                    acc = acc.sub(&y.get(p + j, p + i).scale(&k));
                }
            }
        }
        acc
    }
}

impl Integrand for StructuredFunction {
    fn shape(&self) -> (usize, usize) {
        (self.p, self.q)
    }

    fn evaluate(&self, y: &SuperPoint) -> Result<SElement<C>> {
        if y.square_type()? != (self.p, self.q) {
            return Err(Error::Shape(format!(
                "function on ({}|{}) evaluated at a {:?} point",
                self.p,
                self.q,
                y.row_type()
            )));
        }
        let g = y.generators();
        let mut val = self.kernel_supertrace(y).neg().exp_even()?;
        if let Some(m) = &self.m {
            val = val.mul(&y.delta_m(m)?);
        }
        if let Some(poly) = &self.poly {
            val = val.mul(&poly.evaluate(y)?);
        }
        Ok(val.mul(&SElement::scalar(g, self.coefficient)))
    }

    fn z_decay(&self) -> Option<CMat> {
        (self.kernel_z.iter().any(|x| x.norm() > 0.0) || self.p == 0).then(|| self.kernel_z.clone())
    }
}

/// Numeric block-diagonal element `diag(a, d)` of `GL(p) × GL(q)`.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockDiag {
    pub a: CMat,
    pub d: CMat,
}

impl BlockDiag {
    pub fn new(a: CMat, d: CMat) -> Result<Self> {
        if !a.is_square() || !d.is_square() {
            return Err(Error::Shape("blocks must be square".into()));
        }
        Ok(BlockDiag { a, d })
    }

    pub fn identity(p: usize, q: usize) -> Self {
        BlockDiag {
            a: numeric::identity(p),
            d: numeric::identity(q),
        }
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.a.nrows(), self.d.nrows())
    }

    /// `det(a) / det(d)`.
    pub fn ber(&self) -> Result<C> {
        let dd = numeric::det(&self.d);
        if dd.norm() == 0.0 {
            return Err(Error::SingularBody("d block of a group element".into()));
        }
        Ok(numeric::det(&self.a) / dd)
    }

    pub fn mul(&self, o: &Self) -> Self {
        BlockDiag {
            a: &self.a * &o.a,
            d: &self.d * &o.d,
        }
    }

    pub fn inverse(&self) -> Result<Self> {
        Ok(BlockDiag {
            a: numeric::inverse(&self.a)?,
            d: numeric::inverse(&self.d)?,
        })
    }

    pub fn to_point(&self, generators: usize) -> Result<SuperPoint> {
        numeric_point(&self.a, &self.d, generators)
    }
}

/// Even element `h = (K₁, K₂)` of `H`, acting on arguments by `y ↦ K₂⁻¹ y K₁`.
#[derive(Debug, Clone, PartialEq)]
pub struct HElement {
    pub k1: BlockDiag,
    pub k2: BlockDiag,
}

impl HElement {
    pub fn new(k1: BlockDiag, k2: BlockDiag) -> Result<Self> {
        if k1.shape() != k2.shape() {
            return Err(Error::Shape("K1 and K2 of different type".into()));
        }
        k1.inverse()?;
        k2.inverse()?;
        Ok(HElement { k1, k2 })
    }

    pub fn identity(p: usize, q: usize) -> Self {
        HElement {
            k1: BlockDiag::identity(p, q),
            k2: BlockDiag::identity(p, q),
        }
    }

    /// Element of the real form: `K₁ = diag(a, d)`, `K₂ = diag((a*)⁻¹, d')`.
    pub fn real_form(a: CMat, d: CMat, d_prime: CMat) -> Result<Self> {
        let a_star_inv = numeric::inverse(&a.adjoint())?;
        Self::new(BlockDiag::new(a, d)?, BlockDiag::new(a_star_inv, d_prime)?)
    }

    pub fn shape(&self) -> (usize, usize) {
        self.k1.shape()
    }

    pub fn mul(&self, o: &Self) -> Self {
        HElement {
            k1: self.k1.mul(&o.k1),
            k2: self.k2.mul(&o.k2),
        }
    }

    pub fn inverse(&self) -> Result<Self> {
        Ok(HElement {
            k1: self.k1.inverse()?,
            k2: self.k2.inverse()?,
        })
    }

    /// `K₂⁻¹ y K₁`.
    pub fn act_on_argument(&self, y: &SuperPoint) -> Result<SuperPoint> {
        let g = y.generators();
        let k2_inv = self.k2.inverse()?.to_point(g)?;
        k2_inv.mul(y)?.mul(&self.k1.to_point(g)?)
    }

    /// `h⁻¹·x = K₁⁻¹ x K₂`, the contragredient action on Laplace variables.
    pub fn act_on_dual(&self, x: &SuperPoint) -> Result<SuperPoint> {
        let g = x.generators();
        self.k1.inverse()?.to_point(g)?.mul(x)?.mul(&self.k2.to_point(g)?)
    }

    /// `χ_{2λ}(h) = Ber(K₂)ⁿ Ber(K₁)⁻ⁿ`.
    pub fn chi_2lambda(&self, n: i64) -> Result<C> {
        let (b1, b2) = (self.k1.ber()?, self.k2.ber()?);
        if b1.norm() == 0.0 {
            return Err(Error::SingularBody("a block of K1".into()));
        }
        Ok((b2 / b1).powi(n as i32))
    }

    /// `Ber(K₁)^{n/2} Ber(K₂)^{−n/2}`, principal branch for odd `n`.
    pub fn twist_factor(&self, n: i64) -> Result<C> {
        let ratio = self.k1.ber()? / self.k2.ber()?;
        Ok(if n % 2 == 0 {
            ratio.powi((n / 2) as i32)
        } else {
            ratio.powf(n as f64 / 2.0)
        })
    }
}

/// The evaluator `y ↦ [Ber(K₁)^{n/2}Ber(K₂)^{−n/2}] · f(K₂⁻¹ y K₁)`.
pub struct Acted<'a, F: Integrand + ?Sized> {
    pub f: &'a F,
    pub h: HElement,
    pub twisted: bool,
    pub n: i64,
}

impl<'a, F: Integrand + ?Sized> Acted<'a, F> {
    pub fn untwisted(f: &'a F, h: HElement) -> Result<Self> {
        Self::new(f, h, false, 0)
    }

    pub fn twisted(f: &'a F, h: HElement, n: i64) -> Result<Self> {
        Self::new(f, h, true, n)
    }

    fn new(f: &'a F, h: HElement, twisted: bool, n: i64) -> Result<Self> {
        if h.shape() != f.shape() {
            return Err(Error::Shape("group element and function of different type".into()));
        }
        Ok(Acted { f, h, twisted, n })
    }

    pub fn prefactor(&self) -> Result<C> {
        if self.twisted {
            self.h.twist_factor(self.n)
        } else {
            Ok(c(1.0, 0.0))
        }
    }
}

impl<F: Integrand + ?Sized> Integrand for Acted<'_, F> {
    fn shape(&self) -> (usize, usize) {
        self.f.shape()
    }

    fn evaluate(&self, y: &SuperPoint) -> Result<SElement<C>> {
        let v = self.f.evaluate(&self.h.act_on_argument(y)?)?;
        Ok(v.scale(&self.prefactor()?))
    }

    fn z_decay(&self) -> Option<CMat> {
        // tr(K a₂⁻¹ z a₁) = tr(a₁ K a₂⁻¹ z)
        let k = self.f.z_decay()?;
        let a2_inv = numeric::inverse(&self.h.k2.a).ok()?;
        Some(&self.h.k1.a * k * a2_inv)
    }
}

/// `y ↦ e^{−str(X y)} f(y)` for a numeric block-diagonal `X = diag(x_z, x_w)`.
pub struct Kernelled<'a, F: Integrand + ?Sized> {
    pub f: &'a F,
    pub x_z: CMat,
    pub x_w: CMat,
}

impl<'a, F: Integrand + ?Sized> Kernelled<'a, F> {
    pub fn new(f: &'a F, x_z: CMat, x_w: CMat) -> Result<Self> {
        if (x_z.nrows(), x_w.nrows()) != f.shape() || !x_z.is_square() || !x_w.is_square() {
            return Err(Error::Shape("kernel and function of different type".into()));
        }
        Ok(Kernelled { f, x_z, x_w })
    }
}

impl<F: Integrand + ?Sized> Integrand for Kernelled<'_, F> {
    fn shape(&self) -> (usize, usize) {
        self.f.shape()
    }

    fn evaluate(&self, y: &SuperPoint) -> Result<SElement<C>> {
        let k = StructuredFunction::exponential(self.x_z.clone(), self.x_w.clone())?;
        Ok(k.evaluate(y)?.mul(&self.f.evaluate(y)?))
    }

    fn z_decay(&self) -> Option<CMat> {
        Some(match self.f.z_decay() {
            Some(k) => &self.x_z + k,
            None => self.x_z.clone(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::diagonal;

    fn close(a: C, b: C, tol: f64) -> bool {
        (a - b).norm() <= tol
    }

    #[test]
    fn gaussian_at_numeric_point() {
        let f = StructuredFunction::gaussian(1, 1, 1.0);
        let y = numeric_point(&diagonal(&[c(2.0, 0.0)]), &diagonal(&[c(0.5, 0.0)]), 0).unwrap();
        let v = f.evaluate(&y).unwrap().body();
        assert!(close(v, c((-(2.0 - 0.5f64)).exp(), 0.0), 1e-15));
    }

    #[test]
    fn cauchy_gaussian_truncates() {
        // p = 0, q = 1, n = 1: w = ξξ', e^{−str} = 1 + ξξ'
        let y = q_map(&CMat::zeros(0, 1), 1).unwrap();
        let v = StructuredFunction::gaussian(0, 1, 1.0).evaluate(&y).unwrap();
        let expect = SElement::one(2).add(&SElement::monomial(2, &[0, 1], c(1.0, 0.0)).unwrap());
        assert!(v.max_abs_diff(&expect) < 1e-15);
    }

    #[test]
    fn conical_times_gaussian() {
        let f = StructuredFunction::conical(1, 0, MultiIndex(vec![1]), 1.0).unwrap();
        let y = numeric_point(&diagonal(&[c(1.5, 0.0)]), &CMat::zeros(0, 0), 0).unwrap();
        assert!(close(f.evaluate(&y).unwrap().body(), c(1.5 * (-1.5f64).exp(), 0.0), 1e-15));
    }

    #[test]
    fn q_map_shapes() {
        let l = CMat::from_row_slice(1, 1, &[c(0.6, 0.8)]);
        let y = q_map(&l, 0).unwrap();
        assert!(close(y.get(0, 0).body(), c(1.0, 0.0), 1e-15));
        let l = CMat::from_row_slice(1, 2, &[c(1.0, 2.0), c(-0.5, 0.3)]);
        let y = q_map(&l, 1).unwrap();
        assert_eq!(y.generators(), 4);
        assert_eq!(y.get(1, 1).body(), c(0.0, 0.0));
        assert!(y.get(0, 1).is_odd() && y.get(1, 0).is_odd());
    }

    #[test]
    fn group_action_examples() {
        let f = StructuredFunction::conical(1, 0, MultiIndex(vec![2]), 1.0).unwrap();
        let y = numeric_point(&diagonal(&[c(0.7, 0.0)]), &CMat::zeros(0, 0), 0).unwrap();
        let id = Acted::untwisted(&f, HElement::identity(1, 0)).unwrap();
        assert!(close(id.evaluate(&y).unwrap().body(), f.evaluate(&y).unwrap().body(), 1e-15));
        // K₁ = 2, K₂ = 1: (h·f)(z) = f(2z)
        let h = HElement::new(
            BlockDiag::new(diagonal(&[c(2.0, 0.0)]), CMat::zeros(0, 0)).unwrap(),
            BlockDiag::identity(1, 0),
        )
        .unwrap();
        let acted = Acted::untwisted(&f, h.clone()).unwrap();
        let y2 = numeric_point(&diagonal(&[c(1.4, 0.0)]), &CMat::zeros(0, 0), 0).unwrap();
        assert!(close(acted.evaluate(&y).unwrap().body(), f.evaluate(&y2).unwrap().body(), 1e-15));
        assert!(close(Acted::twisted(&f, h, 2).unwrap().prefactor().unwrap(), c(2.0, 0.0), 1e-15));
    }

    #[test]
    fn chi_example() {
        let h = HElement::new(
            BlockDiag::new(diagonal(&[c(2.0, 0.0)]), CMat::zeros(0, 0)).unwrap(),
            BlockDiag::new(diagonal(&[c(3.0, 0.0)]), CMat::zeros(0, 0)).unwrap(),
        )
        .unwrap();
        assert!(close(h.chi_2lambda(1).unwrap(), c(1.5, 0.0), 1e-15));
        assert!(close(HElement::identity(1, 1).chi_2lambda(3).unwrap(), c(1.0, 0.0), 1e-15));
    }
}
