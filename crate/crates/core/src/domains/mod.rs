//! Integration engines over the flat cycle and over Ω.

pub mod flat;
pub mod omega;
pub mod quadrature;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::galg::SElement;
use crate::numeric::{self, C};

pub use flat::{integrate_flat, FlatDomain, FlatMethod};
pub use omega::{integrate_omega, integrate_omega_many, OmegaDomain};
pub use quadrature::{HermMethod, UnitaryNodes};

/// Value of an integral, with a standard error for sampled estimates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub value: C,
    pub std_error: Option<f64>,
    pub evaluations: usize,
}

impl Estimate {
    pub fn exact(value: C, evaluations: usize) -> Self {
        Estimate {
            value,
            std_error: None,
            evaluations,
        }
    }

    /// From weighted samples whose sum is the estimate.
    pub fn from_samples(terms: &[C]) -> Self {
        let n = terms.len();
        let value = numeric::pairwise_sum(terms);
        let mean = value / n.max(1) as f64;
        let var = terms.iter().map(|t| (t - mean).norm_sqr()).sum::<f64>() / (n.max(2) - 1) as f64;
        Estimate {
            value,
            std_error: Some((n as f64 * var).sqrt()),
            evaluations: n,
        }
    }

    pub fn scaled(self, s: C) -> Self {
        Estimate {
            value: self.value * s,
            std_error: self.std_error.map(|e| e * s.norm()),
            ..self
        }
    }
}

/// Fiber integral along the odd directions: the top coefficient, after checking
/// that the integrand lives in the declared generator universe.
pub fn berezin_fiber(integrand: &SElement<C>, declared: usize) -> Result<C> {
    if integrand.generators() != declared {
        return Err(Error::GeneratorMismatch(integrand.generators(), declared));
    }
    Ok(integrand.berezin_top())
}
