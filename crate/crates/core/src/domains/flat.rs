//! `∫_{V_R} |Dv| f(Q(v))`.
//!
//! Each complex entry of the even block carries `dx dy / √π`, so that
//! `∫ e^{−tr LL*} = √π^{np}`; the odd Gaussian integrates to 1.

use std::f64::consts::PI;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::quadrature::{circle, hermite, laguerre, legendre_unit};
use super::{berezin_fiber, Estimate};
use crate::error::{Error, Result};
use crate::numeric::{self, c, CMat, C};
use crate::sfunc::{flat_generators, q_map, Integrand};

/// Integration scheme for the flat even directions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FlatMethod {
    /// Polar coordinates when `p = 1, n ≤ 2` (Laguerre radius × sphere rule),
    /// Cartesian Gauss–Hermite otherwise.
    Quadrature { nodes: usize, sphere: usize },
    /// Gauss–Hermite tensor grid in all `2pn` real directions.
    Cartesian { nodes: usize },
    MonteCarlo { samples: usize, seed: u64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FlatDomain {
    pub p: usize,
    pub q: usize,
    pub n: usize,
    pub method: FlatMethod,
}

const MAX_POINTS: usize = 4_000_000;

impl FlatDomain {
    pub fn quadrature(p: usize, q: usize, n: usize) -> Self {
        FlatDomain {
            p,
            q,
            n,
            method: FlatMethod::Quadrature { nodes: 14, sphere: 4 },
        }
    }

    pub fn with_method(mut self, method: FlatMethod) -> Self {
        self.method = method;
        self
    }
}

/// Weighted sample points `L ∈ C^{p×n}` for `∫ g(L) dL` (normalised entries).
fn flat_points(dom: &FlatDomain, decay: &CMat) -> Result<(Vec<(CMat, f64)>, bool)> {
    let (p, n) = (dom.p, dom.n);
    let s = numeric::herm_inv_sqrt(decay)?;
    let jac = numeric::det(&s).norm().powi(2 * n as i32);
    let mut mc = false;
    let std_points: Vec<(CMat, f64)> = match dom.method {
        FlatMethod::Quadrature { nodes, sphere } if p == 1 && (1..=2).contains(&n) => {
            polar_points(n, nodes, sphere)?
        }
        FlatMethod::Quadrature { nodes, .. } | FlatMethod::Cartesian { nodes } => {
            let rule = hermite(nodes)?;
            let dims = 2 * p * n;
            let total = rule.len().checked_pow(dims as u32).filter(|&t| t <= MAX_POINTS).ok_or_else(|| {
                Error::InvalidArgument(format!("{nodes}^{dims} Hermite points exceed the budget"))
            })?;
            (0..total)
                .map(|mut idx| {
                    let mut l = CMat::zeros(p, n);
                    let mut w = PI.powf(-((p * n) as f64) / 2.0);
                    let mut r2 = 0.0;
                    for k in 0..p * n {
                        let (x, wx) = rule[idx % rule.len()];
                        idx /= rule.len();
                        let (y, wy) = rule[idx % rule.len()];
                        idx /= rule.len();
                        l[(k / n, k % n)] = c(x, y);
                        w *= wx * wy;
                        r2 += x * x + y * y;
                    }
                    (l, w * r2.exp())
                })
                .collect()
        }
        FlatMethod::MonteCarlo { samples, seed } => {
            mc = true;
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let scale = std::f64::consts::FRAC_1_SQRT_2;
            let norm = PI.powf((p * n) as f64 / 2.0) / samples as f64;
            (0..samples)
                .map(|_| {
                    let mut r2 = 0.0;
                    let l = CMat::from_fn(p, n, |_, _| {
                        let x: f64 = StandardNormal.sample(&mut rng);
                        let y: f64 = StandardNormal.sample(&mut rng);
                        r2 += (x * x + y * y) * 0.5;
                        c(x * scale, y * scale)
                    });
                    (l, norm * r2.exp())
                })
                .collect()
        }
    };
    Ok((
        std_points.into_iter().map(|(l, w)| (&s * l, w * jac)).collect(),
        mc,
    ))
}

/// `L = √s · u` with `u` on the unit sphere of `Cⁿ`; the radial rule is
/// generalized Laguerre with exponent `n − 1`, the sphere rule uses
/// `|u₂|² ~ U[0,1]` and uniform phases.
fn polar_points(n: usize, nodes: usize, sphere: usize) -> Result<Vec<(CMat, f64)>> {
    let radial = laguerre(nodes, n as f64 - 1.0)?;
    let norm = PI.powf(n as f64 / 2.0) / (1..n).map(|k| k as f64).product::<f64>();
    let dirs: Vec<(Vec<C>, f64)> = match n {
        1 => circle(sphere)?
            .into_iter()
            .map(|(t, w)| (vec![C::from_polar(1.0, t)], w))
            .collect(),
        _ => {
            let mut out = Vec::new();
            for (t, wt) in legendre_unit(sphere)? {
                for &(a, wa) in &circle(sphere)? {
                    for &(b, wb) in &circle(sphere)? {
                        out.push((
                            vec![C::from_polar((1.0 - t).sqrt(), a), C::from_polar(t.sqrt(), b)],
                            wt * wa * wb,
                        ));
                    }
                }
            }
            out
        }
    };
    let mut pts = Vec::with_capacity(radial.len() * dirs.len());
    for &(s, ws) in &radial {
        for (u, wu) in &dirs {
            let l = CMat::from_fn(1, n, |_, j| u[j] * s.sqrt());
            pts.push((l, norm * ws * wu * s.exp()));
        }
    }
    Ok(pts)
}

/// `∫ |Dv| f(Q(v))`.
pub fn integrate_flat(f: &dyn Integrand, dom: &FlatDomain) -> Result<Estimate> {
    let (p, q, n) = (dom.p, dom.q, dom.n);
    if f.shape() != (p, q) {
        return Err(Error::Shape(format!(
            "integrand on {:?} over a ({p}|{q}) flat domain",
            f.shape()
        )));
    }
    let gens = flat_generators(q, n);
    if gens > 16 {
        return Err(Error::InvalidArgument(format!("{gens} odd generators exceed the budget of 16")));
    }
    let top = |l: &CMat| -> Result<C> { berezin_fiber(&f.evaluate(&q_map(l, q)?)?, gens) };
    if p == 0 {
        return Ok(Estimate::exact(top(&CMat::zeros(0, n))?, 1));
    }
    let decay = f.z_decay().ok_or_else(|| {
        Error::Divergent("the integrand has no Gaussian decay along the even directions".into())
    })?;
    let (points, mc) = flat_points(dom, &decay)?;
    let values: Vec<C> = points
        .par_iter()
        .map(|(l, w)| top(l).map(|v| v * *w))
        .collect::<Result<_>>()?;
    Ok(if mc {
        Estimate::from_samples(&values)
    } else {
        Estimate::exact(numeric::pairwise_sum(&values), values.len())
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sfunc::{EntryPolynomial, StructuredFunction};
    use crate::smat::MultiIndex;

    #[test]
    fn ingham_siegel_gaussian() {
        let f = StructuredFunction::gaussian(1, 0, 1.0);
        let v = integrate_flat(&f, &FlatDomain::quadrature(1, 0, 1)).unwrap();
        assert!((v.value - c(PI.sqrt(), 0.0)).norm() < 1e-13);
    }

    #[test]
    fn cauchy_case() {
        let f = StructuredFunction::polynomial(0, 1, EntryPolynomial::entry(0, 0));
        let v = integrate_flat(&f, &FlatDomain::quadrature(0, 1, 1)).unwrap();
        assert!((v.value - c(1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn conical_flat() {
        let f = StructuredFunction::conical(1, 0, MultiIndex(vec![1]), 1.0).unwrap();
        let v = integrate_flat(&f, &FlatDomain::quadrature(1, 0, 2)).unwrap();
        assert!((v.value - c(2.0 * PI, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn no_decay_is_rejected() {
        let f = StructuredFunction::polynomial(1, 0, EntryPolynomial::entry(0, 0));
        assert!(matches!(
            integrate_flat(&f, &FlatDomain::quadrature(1, 0, 1)),
            Err(Error::Divergent(_))
        ));
    }
}
