//! `∫_Ω |Dy| Ber(y)ⁿ f(y)` over `Ω₀ = Herm⁺(p) × U(q)` with the standard retraction.
//!
//! `|Dy| = |dz||dw| |det z|^{−p} D(ζ,ω) det(z − ζw⁻¹ω)^q det(w − ωz⁻¹ζ)^p`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::quadrature::{herm_points, unitary_points, HermMethod, UnitaryNodes};
use super::{berezin_fiber, Estimate};
use crate::error::{Error, Result};
use crate::galg::SElement;
use crate::numeric::{self, CMat, C};
use crate::sfunc::{omega_generators, omega_point, Integrand, SuperPoint};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OmegaDomain {
    pub p: usize,
    pub q: usize,
    pub herm: HermMethod,
    pub unitary: UnitaryNodes,
}

impl OmegaDomain {
    pub fn quadrature(p: usize, q: usize) -> Self {
        OmegaDomain {
            p,
            q,
            herm: HermMethod::Quadrature { laguerre: 16, hermite: 6 },
            unitary: UnitaryNodes::default(),
        }
    }

    pub fn monte_carlo(p: usize, q: usize, samples: usize, seed: u64) -> Self {
        OmegaDomain {
            herm: HermMethod::MonteCarlo { samples, seed },
            ..Self::quadrature(p, q)
        }
    }

    pub fn is_monte_carlo(&self) -> bool {
        matches!(self.herm, HermMethod::MonteCarlo { .. })
    }
}

/// The odd part of the invariant density times `Ber(y)ⁿ` at a point of Ω.
pub fn density_soul(y: &SuperPoint, n: i64) -> Result<SElement<C>> {
    let (p, q) = y.square_type()?;
    let (a, b, c, d) = (y.block_a(), y.block_b(), y.block_c(), y.block_d());
    let upper = a.sub(&b.mul(&d.inverse()?)?.mul(&c)?)?.det()?;
    let lower = d.sub(&c.mul(&a.inverse()?)?.mul(&b)?)?.det()?;
    let dens = upper.powi(q as i64)?.mul(&lower.powi(p as i64)?);
    Ok(dens.mul(&y.berezinian_pow(n)?))
}

/// Integrates several integrands sharing one decay kernel in a single sweep.
pub fn integrate_omega_many(fs: &[&dyn Integrand], n: i64, dom: &OmegaDomain) -> Result<Vec<Estimate>> {
    let (p, q) = (dom.p, dom.q);
    let Some(first) = fs.first() else {
        return Ok(Vec::new());
    };
    let decay = if p == 0 {
        CMat::zeros(0, 0)
    } else {
        first.z_decay().ok_or_else(|| {
            Error::Divergent("the integrand has no decay along Herm⁺(p)".into())
        })?
    };
    for f in fs {
        if f.shape() != (p, q) {
            return Err(Error::Shape(format!("integrand on {:?} over Ω of type ({p}|{q})", f.shape())));
        }
        if p > 0 {
            let k = f.z_decay().ok_or_else(|| Error::Divergent("no decay along Herm⁺(p)".into()))?;
            if (&k - &decay).norm() > 1e-14 * (1.0 + decay.norm()) {
                return Err(Error::InvalidArgument("batched integrands need a common decay kernel".into()));
            }
        }
    }
    let gens = omega_generators(p, q);
    let zs = herm_points(p, &decay, dom.herm)?;
    let ws = unitary_points(q, dom.unitary)?;
    let per_z: Vec<Vec<C>> = zs
        .par_iter()
        .map(|(z, wz)| -> Result<Vec<C>> {
            let body = wz / numeric::det(z).norm().powi(p as i32);
            let mut cols: Vec<Vec<C>> = vec![Vec::with_capacity(ws.len()); fs.len()];
            for (w, ww) in &ws {
                let y = omega_point(z, w)?;
                let dens = density_soul(&y, n)?;
                for (k, f) in fs.iter().enumerate() {
                    let top = berezin_fiber(&dens.mul(&f.evaluate(&y)?), gens)?;
                    cols[k].push(top * (body * ww));
                }
            }
            Ok(cols.iter().map(|c| numeric::pairwise_sum(c)).collect())
        })
        .collect::<Result<_>>()?;
    Ok((0..fs.len())
        .map(|k| {
            let vals: Vec<C> = per_z.iter().map(|v| v[k]).collect();
            if dom.is_monte_carlo() {
                Estimate::from_samples(&vals)
            } else {
                Estimate::exact(numeric::pairwise_sum(&vals), vals.len() * ws.len())
            }
        })
        .collect())
}

/// `∫_Ω |Dy| Ber(y)ⁿ f(y)`.
pub fn integrate_omega(f: &dyn Integrand, n: i64, dom: &OmegaDomain) -> Result<Estimate> {
    Ok(integrate_omega_many(&[f], n, dom)?.remove(0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::c;
    use crate::sfunc::StructuredFunction;
    use crate::smat::MultiIndex;

    #[test]
    fn haar_mass() {
        for q in 1..=2 {
            let f = StructuredFunction::gaussian(0, q, 0.0);
            let v = integrate_omega(&f, 0, &OmegaDomain::quadrature(0, q)).unwrap();
            assert!((v.value - c(1.0, 0.0)).norm() < 1e-12, "q={q}: {:?}", v.value);
        }
    }

    #[test]
    fn gamma_one() {
        let f = StructuredFunction::gaussian(1, 0, 1.0);
        let v = integrate_omega(&f, 1, &OmegaDomain::quadrature(1, 0)).unwrap();
        assert!((v.value - c(1.0, 0.0)).norm() < 1e-13);
    }

    #[test]
    fn unitary_conical() {
        let f = StructuredFunction::conical(0, 1, MultiIndex(vec![1]), 1.0).unwrap();
        let v = integrate_omega(&f, 0, &OmegaDomain::quadrature(0, 1)).unwrap();
        assert!((v.value - c(1.0, 0.0)).norm() < 1e-13);
    }

    #[test]
    fn one_one_gaussian() {
        let f = StructuredFunction::gaussian(1, 1, 1.0);
        let v = integrate_omega(&f, 1, &OmegaDomain::quadrature(1, 1)).unwrap();
        assert!((v.value - c(1.0, 0.0)).norm() < 1e-10, "{:?}", v.value);
    }
}
