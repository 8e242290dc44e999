//! Small dense complex matrices and deterministic reductions.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};

pub type C = Complex64;
pub type CMat = DMatrix<Complex64>;

pub fn c(re: f64, im: f64) -> C {
    Complex64::new(re, im)
}

pub fn identity(n: usize) -> CMat {
    CMat::identity(n, n)
}

pub fn scalar_matrix(n: usize, s: C) -> CMat {
    CMat::from_diagonal_element(n, n, s)
}

pub fn diagonal(entries: &[C]) -> CMat {
    CMat::from_diagonal(&nalgebra::DVector::from_column_slice(entries))
}

/// Row-major entries.
pub fn to_row_major(m: &CMat) -> Vec<C> {
    let mut out = Vec::with_capacity(m.nrows() * m.ncols());
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            out.push(m[(i, j)]);
        }
    }
    out
}

pub fn inverse(m: &CMat) -> Result<CMat> {
    if m.nrows() == 0 {
        return Ok(m.clone());
    }
    m.clone()
        .try_inverse()
        .ok_or_else(|| Error::SingularBody(format!("{}x{} numeric matrix", m.nrows(), m.ncols())))
}

pub fn det(m: &CMat) -> C {
    if m.nrows() == 0 {
        C::new(1.0, 0.0)
    } else {
        m.determinant()
    }
}

pub fn is_hermitian(m: &CMat, tol: f64) -> bool {
    m.is_square() && (m - m.adjoint()).iter().all(|x| x.norm() <= tol * (1.0 + m.norm()))
}

/// `X^{-1/2}` for a Hermitian positive-definite `X`.
pub fn herm_inv_sqrt(x: &CMat) -> Result<CMat> {
    if !is_hermitian(x, 1e-12) {
        return Err(Error::InvalidArgument("decay kernel is not Hermitian".into()));
    }
    if x.nrows() == 0 {
        return Ok(x.clone());
    }
    let eig = x.clone().symmetric_eigen();
    if eig.eigenvalues.iter().any(|&l| !(l > 0.0)) {
        return Err(Error::InvalidArgument("decay kernel is not positive definite".into()));
    }
    let d = CMat::from_diagonal(&eig.eigenvalues.map(|l| C::new(l.powf(-0.5), 0.0)));
    Ok(&eig.eigenvectors * d * eig.eigenvectors.adjoint())
}

/// Haar-random unitary via QR of a complex Ginibre matrix with phase fix.
pub fn random_unitary<G: Rng + ?Sized>(rng: &mut G, n: usize) -> CMat {
    if n == 0 {
        return CMat::zeros(0, 0);
    }
    let g = CMat::from_fn(n, n, |_, _| {
        let re: f64 = StandardNormal.sample(rng);
        let im: f64 = StandardNormal.sample(rng);
        c(re, im)
    });
    let qr = g.qr();
    let (q, r) = (qr.q(), qr.r());
    let phases = CMat::from_diagonal(&r.diagonal().map(|x| if x.norm() > 0.0 { x / x.norm() } else { c(1.0, 0.0) }));
    q * phases
}

/// Random Hermitian positive-definite matrix with spectrum in `[lo, hi]`.
pub fn random_positive<G: Rng + ?Sized>(rng: &mut G, n: usize, lo: f64, hi: f64) -> CMat {
    let u = random_unitary(rng, n);
    let d = CMat::from_diagonal(&nalgebra::DVector::from_fn(n, |_, _| c(rng.random_range(lo..hi), 0.0)));
    &u * d * u.adjoint()
}

/// Pairwise (cascade) summation: fixed reduction tree, independent of threading.
pub fn pairwise_sum(xs: &[C]) -> C {
    match xs.len() {
        0 => C::new(0.0, 0.0),
        n if n <= 8 => xs.iter().sum(),
        n => {
            let (a, b) = xs.split_at(n / 2);
            pairwise_sum(a) + pairwise_sum(b)
        }
    }
}
