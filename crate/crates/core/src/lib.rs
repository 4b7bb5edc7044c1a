//! Slopes, error-bound moduli and metric-subregularity constants on
//! desk-scale discretizations.
//!
//! Every quantity is computed by enumeration over a finite probe set: finite
//! metric spaces are handled exactly, grids over `R^dim` approximately. Limits
//! as the radius shrinks are evaluated on a [`RadiusSchedule`] and reported as
//! [`LimitEstimate`]s carrying the whole per-radius sequence.
#![no_std]

extern crate alloc;

pub mod catalog;
pub mod cone;
pub mod criteria;
pub mod error;
pub mod ext;
pub mod limit;
pub mod oracle;
pub mod product;
pub mod setval;
pub mod function;
pub mod slopes;
pub mod slopes2;
pub mod space;

pub use error::{Error, Result};
pub use ext::{extreal_div, ExtReal};
pub use limit::{estimate_limit, estimate_sup_limit, LimitEstimate, RadiusSchedule, DEFAULT_TOL};
pub use space::{
    dual_rho_norm, duality_map, rho_dist, Combiner, EuclideanSpace, FiniteMetricSpace, Grid, Metric,
    NormKind, ProductSpace, Vector,
};
