//! Exact supermatrix calculus, Berezin and numerical integration over the
//! superbosonisation cycle, and the representation-theoretic data behind it.

pub mod cli;
pub mod domains;
pub mod error;
pub mod galg;
pub mod numeric;
pub mod osc;
pub mod properties;
pub mod report;
pub mod riesz;
pub mod sfunc;
pub mod smat;
pub mod weights;

pub use error::{Error, Result};
