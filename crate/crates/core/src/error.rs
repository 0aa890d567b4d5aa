use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix is not square: row {row} has {len} entries, expected {n}")]
    NotSquare { row: usize, len: usize, n: usize },
    #[error("matrix dimension {0} is below the minimum of 2")]
    DimensionTooSmall(usize),
    #[error("hermiticity violation at ({i},{j}): mismatch {mismatch:e} exceeds 1e-12")]
    HermiticityViolation { i: usize, j: usize, mismatch: f64 },
    #[error("non-finite value encountered ({0})")]
    NonFinite(&'static str),
    #[error("operation requires dimension {expected}, got {got}")]
    DimensionUnsupported { expected: usize, got: usize },
    #[error("depressed cubic has complex roots (discriminant {0:e})")]
    ComplexRoots(f64),
    #[error("eigensolver did not converge after {sweeps} sweeps (off-norm {off_norm:e})")]
    NoConvergence { sweeps: usize, off_norm: f64 },
    #[error("eigenvector {index} has a vanishing boundary component ({value:e})")]
    VanishingComponent { index: usize, value: f64 },
    #[error("exponential overflow: exponent*s = {0} exceeds 700")]
    Overflow(f64),
    #[error("exponential sum has a non-positive coefficient {0:e}")]
    NonPositiveCoefficient(f64),
    #[error("step too large: |rhs|*h = {0:.3} exceeds 0.1")]
    StepTooLarge(f64),
    #[error("invalid integration plan: {0}")]
    InvalidPlan(String),
    #[error("square-root argument {value:e} is negative beyond tolerance {tolerance:e}")]
    NegativeRadicand { value: f64, tolerance: f64 },
    #[error("adaptive quadrature failed to reach tolerance within the subdivision budget")]
    QuadratureFailure,
    #[error("exponents are degenerate (min separation {0:e})")]
    DegenerateExponents(f64),
    #[error("matrix is not tridiagonal: entry ({i},{j}) has modulus {value:e}")]
    NotTridiagonal { i: usize, j: usize, value: f64 },
    #[error("matrix is not real symmetric: entry ({i},{j})")]
    NotRealSymmetric { i: usize, j: usize },
    #[error("coefficient product violates the normalization constraint (relative residual {0:e})")]
    FFViolation(f64),
    #[error("dimension {n} exceeds the cap of {cap} (C(n, n/2) terms per η)")]
    DimensionCap { n: usize, cap: usize },
    #[error("trajectory too sparse: {0:.1} samples per unit s, at least 200 required")]
    TooSparse(f64),
    #[error("unsupported exact case: {0}")]
    UnsupportedExactCase(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}
