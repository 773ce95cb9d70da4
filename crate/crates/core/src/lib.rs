//! Weighted L^p-Hardy constants on radial model domains.
//!
//! The crate computes the closed-form constants `c_{α,p,m}`, the indicial
//! roots that govern power-type solutions, radial operator checks, discrete
//! Rayleigh-quotient minima on graded meshes and the resulting gap verdicts.

pub mod error;
pub mod gap;
pub mod indicial;
pub mod params;
pub mod quadrature;
pub mod radial;
pub mod rayleigh;

pub use error::{Error, Result};
pub use gap::{classify, convexity_shortcut, predict_decay, ClassifyOptions, GapReport, NumericH};
pub use params::{
    c_boundary, c_const, c_infinity, c_min, classify_regime, classify_regime_with, BoundaryClass,
    DomainClass, DomainSpec, Params, Regime, EQ_TOLERANCE,
};
