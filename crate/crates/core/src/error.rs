use thiserror::Error;

/// Errors raised by the numerical layers of the crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("invalid domain: {0}")]
    InvalidDomain(String),

    #[error("constant index m={m} must be 1 or the dimension {dim}")]
    InvalidConstantIndex { m: u32, dim: u32 },

    #[error("target value {mu} outside admissible range [0, {max}]")]
    MuOutOfRange { mu: f64, max: f64 },

    #[error("indicial equation is degenerate here (c = 0): only mu = 0 is admissible, got {mu}")]
    DegenerateIndicial { mu: f64 },

    #[error("hypothesis violated ({clause}): {detail}")]
    Hypothesis { clause: &'static str, detail: String },

    #[error("radius {r} is a kink of the distance function")]
    KinkPoint { r: f64 },

    #[error("radius {r} lies outside the profile domain")]
    OutsideDomain { r: f64 },

    #[error("operator undefined at r = {r}: zero gradient with p < 2")]
    UndefinedPoint { r: f64 },

    #[error("candidate U- is not positive on the window (first failure at r = {r})")]
    NonPositiveCandidate { r: f64 },

    #[error("configuration is not integrable: exponent {exponent} >= 1")]
    Divergent { exponent: f64 },

    #[error("non-finite quadrature value on element [{a}, {b}]")]
    QuadratureOverflow { a: f64, b: f64 },

    #[error("admissible space is empty: {0}")]
    EmptyAdmissibleSpace(String),

    #[error("collar too thin: {interior} interior nodes, need at least {required}")]
    CollarTooThin { interior: usize, required: usize },

    #[error("non-positive minimizer value at node {index} (r = {r})")]
    NonPositiveMinimizer { index: usize, r: f64 },

    #[error("invalid mesh: {0}")]
    InvalidMesh(String),

    #[error("input Hardy value {h} exceeds the constant at infinity {lambda_inf} beyond the margin {margin}")]
    InconsistentInput { h: f64, lambda_inf: f64, margin: f64 },

    #[error("need at least {required} levels, got {got}")]
    TooFewLevels { required: usize, got: usize },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
