//! Node/weight grids for the real line, the half-line, the circle, `Herm⁺(p)`
//! and `U(q)`.

use std::f64::consts::PI;
use std::num::NonZeroUsize;

use gauss_quad::{FiniteAboveNegOneF64, GaussHermite, GaussLaguerre, GaussLegendre};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1, Gamma, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::{self, c, CMat};

fn nz(n: usize) -> Result<NonZeroUsize> {
    NonZeroUsize::new(n).ok_or_else(|| Error::InvalidArgument("node count must be positive".into()))
}

/// Gauss–Hermite rule for weight `e^{−x²}` on the line.
pub fn hermite(n: usize) -> Result<Vec<(f64, f64)>> {
    Ok(GaussHermite::new(nz(n)?).as_node_weight_pairs().to_vec())
}

/// Generalized Gauss–Laguerre rule for weight `x^α e^{−x}` on `(0, ∞)`.
pub fn laguerre(n: usize, alpha: f64) -> Result<Vec<(f64, f64)>> {
    let a = FiniteAboveNegOneF64::new(alpha)
        .ok_or_else(|| Error::InvalidArgument(format!("Laguerre exponent {alpha} must exceed -1")))?;
    Ok(GaussLaguerre::new(nz(n)?, a).as_node_weight_pairs().to_vec())
}

/// Gauss–Legendre rule mapped to `[0, 1]` (weights sum to 1).
pub fn legendre_unit(n: usize) -> Result<Vec<(f64, f64)>> {
    Ok(GaussLegendre::new(nz(n)?)
        .as_node_weight_pairs()
        .iter()
        .map(|&(x, w)| (0.5 * (x + 1.0), 0.5 * w))
        .collect())
}

/// Trapezoid rule on the circle: angles `2πk/n`, weights `1/n`.
pub fn circle(n: usize) -> Result<Vec<(f64, f64)>> {
    nz(n)?;
    Ok((0..n).map(|k| (2.0 * PI * k as f64 / n as f64, 1.0 / n as f64)).collect())
}

/// How the `Herm⁺(p)` factor is integrated.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum HermMethod {
    /// Laguerre in the eigen/Cholesky radii, Hermite in the off-diagonal entry.
    Quadrature { laguerre: usize, hermite: usize },
    /// Bartlett sampling of a complex Wishart matrix.
    MonteCarlo { samples: usize, seed: u64 },
}

/// Node counts for the `U(q)` product rules.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UnitaryNodes {
    /// Circle nodes for `q = 1`.
    pub circle: usize,
    /// Overall phase, diagonal phase, off-diagonal phase, and `sin²θ` nodes for `q = 2`.
    pub phi: usize,
    pub alpha: usize,
    pub beta: usize,
    pub u: usize,
}

impl Default for UnitaryNodes {
    fn default() -> Self {
        UnitaryNodes {
            circle: 32,
            phi: 22,
            alpha: 20,
            beta: 8,
            u: 10,
        }
    }
}

/// Points `z ∈ Herm⁺(p)` with weights for `∫ F(z) |dz|`, where `F` decays like
/// `e^{−tr(K z)}`. Weights absorb the Jacobian and the compensating `e^{tr(K z)}`,
/// so the rule is exact for `F = e^{−tr(K z)} × polynomial`.
///
/// The Lebesgue density on `Herm(p)` is the one of the trace form:
/// `dz₁₁ dz₂₂ · 2 dRe z₁₂ dIm z₁₂`.
pub fn herm_points(p: usize, decay: &CMat, method: HermMethod) -> Result<Vec<(CMat, f64)>> {
    if decay.nrows() != p {
        return Err(Error::Shape("decay kernel size".into()));
    }
    if p == 0 {
        return Ok(vec![(CMat::zeros(0, 0), 1.0)]);
    }
    let s = numeric::herm_inv_sqrt(decay)?;
    let jac = numeric::det(&s).norm().powi(2 * p as i32);
    let std_points = match (p, method) {
        (1, HermMethod::Quadrature { laguerre: nl, .. }) => laguerre(nl, 0.0)?
            .into_iter()
            .map(|(x, w)| (CMat::from_element(1, 1, c(x, 0.0)), w * x.exp()))
            .collect::<Vec<_>>(),
        (2, HermMethod::Quadrature { laguerre: nl, hermite: nh }) => {
            let lag = laguerre(nl, 0.0)?;
            let her = hermite(nh)?;
            let mut pts = Vec::with_capacity(lag.len() * lag.len() * her.len() * her.len());
            for &(u1, w1) in &lag {
                for &(u2, w2) in &lag {
                    for &(x, wx) in &her {
                        for &(y, wy) in &her {
                            let cc = c(x, y);
                            let weight = 2.0 * u1 * w1 * w2 * wx * wy * (u1 + u2 + x * x + y * y).exp();
                            pts.push((cholesky_point(u1, u2, cc), weight));
                        }
                    }
                }
            }
            pts
        }
        (1, HermMethod::MonteCarlo { samples, seed }) => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            (0..samples)
                .map(|_| {
                    let x: f64 = Exp1.sample(&mut rng);
                    (CMat::from_element(1, 1, c(x, 0.0)), x.exp() / samples as f64)
                })
                .collect()
        }
        (2, HermMethod::MonteCarlo { samples, seed }) => {
            // Bartlett: u₁ ~ Γ(2), u₂ ~ Γ(1), c ~ CN(0,1); density u₁e^{−tr z}/π.
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let g2 = Gamma::new(2.0, 1.0).expect("valid shape");
            (0..samples)
                .map(|_| {
                    let u1: f64 = g2.sample(&mut rng);
                    let u2: f64 = Exp1.sample(&mut rng);
                    let x: f64 = StandardNormal.sample(&mut rng);
                    let y: f64 = StandardNormal.sample(&mut rng);
                    let cc = c(x, y) * std::f64::consts::FRAC_1_SQRT_2;
                    let tr = u1 + u2 + cc.norm_sqr();
                    (cholesky_point(u1, u2, cc), 2.0 * PI * tr.exp() / samples as f64)
                })
                .collect()
        }
        _ => {
            return Err(Error::InvalidArgument(format!(
                "Herm⁺({p}) is supported for p ≤ 2 only"
            )))
        }
    };
    Ok(std_points
        .into_iter()
        .map(|(z, w)| (&s * z * &s, w * jac))
        .collect())
}

/// `z = T T*` with `T = [[√u₁, 0], [c, √u₂]]`.
fn cholesky_point(u1: f64, u2: f64, cc: num_complex::Complex64) -> CMat {
    let t1 = u1.sqrt();
    CMat::from_row_slice(
        2,
        2,
        &[c(u1, 0.0), cc.conj() * t1, cc * t1, c(cc.norm_sqr() + u2, 0.0)],
    )
}

/// Points of `U(q)` with weights summing to 1 (normalised Haar measure).
pub fn unitary_points(q: usize, nodes: UnitaryNodes) -> Result<Vec<(CMat, f64)>> {
    match q {
        0 => Ok(vec![(CMat::zeros(0, 0), 1.0)]),
        1 => Ok(circle(nodes.circle)?
            .into_iter()
            .map(|(t, w)| (CMat::from_element(1, 1, num_complex::Complex64::from_polar(1.0, t)), w))
            .collect()),
        2 => {
            let (phis, alphas, betas, us) = (
                circle(nodes.phi)?,
                circle(nodes.alpha)?,
                circle(nodes.beta)?,
                legendre_unit(nodes.u)?,
            );
            let mut pts = Vec::with_capacity(phis.len() * alphas.len() * betas.len() * us.len());
            for &(phi, wp) in &phis {
                let ph = num_complex::Complex64::from_polar(1.0, phi);
                for &(al, wa) in &alphas {
                    let ea = num_complex::Complex64::from_polar(1.0, al);
                    for &(be, wb) in &betas {
                        let eb = num_complex::Complex64::from_polar(1.0, be);
                        for &(u, wu) in &us {
                            let (cs, sn) = ((1.0 - u).sqrt(), u.sqrt());
                            let w = CMat::from_row_slice(
                                2,
                                2,
                                &[ea * cs, eb * sn, -eb.conj() * sn, ea.conj() * cs],
                            ) * ph;
                            pts.push((w, wp * wa * wb * wu));
                        }
                    }
                }
            }
            Ok(pts)
        }
        _ => Err(Error::InvalidArgument(format!("U({q}) is supported for q ≤ 2 only"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hermite_moments() {
        let rule = hermite(6).unwrap();
        let m4: f64 = rule.iter().map(|&(x, w)| w * x.powi(4)).sum();
        assert!((m4 - 0.75 * PI.sqrt()).abs() < 1e-13);
    }

    #[test]
    fn herm2_volume_factor() {
        // ∫ e^{−tr z} det(z)^{0} (det z)^{−2}·u₁^{m₁}u₂^{m₂}… reduces to 2π Γ(m₁)Γ(m₂−1)
        let pts = herm_points(2, &numeric::identity(2), HermMethod::Quadrature { laguerre: 10, hermite: 4 }).unwrap();
        let v: f64 = pts
            .iter()
            .map(|(z, w)| {
                let d = numeric::det(z).re;
                w * (-(z[(0, 0)].re + z[(1, 1)].re)).exp() * z[(0, 0)].re.powi(2 - 3) * d.powi(3) / (d * d)
            })
            .sum();
        // m = (2, 3): Δ_m = z₁₁^{−1} det³ ⇒ 2π Γ(2) Γ(2)
        assert!((v - 2.0 * PI).abs() < 1e-10, "{v}");
    }

    #[test]
    fn unitary_weights_normalised() {
        for q in 0..3 {
            let pts = unitary_points(q, UnitaryNodes::default()).unwrap();
            let total: f64 = pts.iter().map(|p| p.1).sum();
            assert!((total - 1.0).abs() < 1e-12);
        }
        let pts = unitary_points(2, UnitaryNodes::default()).unwrap();
        let (w, _) = &pts[37];
        assert!((w * w.adjoint() - numeric::identity(2)).norm() < 1e-13);
    }
}
