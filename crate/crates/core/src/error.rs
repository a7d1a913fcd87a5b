use thiserror::Error;

/// Errors raised by the toolkit.
///
/// Scientific failures (a certificate that does not hold) are kept apart from
/// configuration problems so the CLI can map them onto distinct exit codes.
#[derive(Debug, Error)]
pub enum Error {
    #[error("interval endpoint {value} lies outside [0, 2pi]")]
    EndpointOutOfRange { value: f64 },

    #[error("non-finite interval endpoint")]
    NonFiniteEndpoint,

    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("matrix is not Hermitian (defect {defect:e})")]
    NotHermitian { defect: f64 },

    #[error("matrix is not square ({rows} rows, row of length {cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error(
        "eigensolver did not converge after {sweeps} sweeps (off-diagonal residual {residual:e})"
    )]
    NoConvergence { sweeps: usize, residual: f64 },

    #[error("invalid Gram matrix: {reason} (min eigenvalue {min_eig:e})")]
    InvalidGram { reason: String, min_eig: f64 },

    #[error("not the first moment of any covariant POVM: {0}")]
    NotFirstMoment(FirstMomentCertificate),

    #[error("generator vector {index} is not a unit vector (norm {norm})")]
    NonUnitGenerator { index: usize, norm: f64 },

    #[error("state vector is not normalized (norm {norm})")]
    NonUnitState { norm: f64 },

    #[error("operation requires {0}")]
    UnsupportedIndexing(&'static str),

    #[error("window {window} exceeds dimension {dim}")]
    WindowTooLarge { window: usize, dim: usize },

    #[error("partition is not a disjoint cover: {0}")]
    InvalidPartition(String),

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("invalid density profile: {0}")]
    InvalidDensity(String),

    #[error("boundary precondition violated: {mass:e} of probability mass reaches the grid edge")]
    BoundaryMass { mass: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

/// Diagnostics collected when an operator fails the first-moment test.
#[derive(Debug, Clone, PartialEq)]
pub struct FirstMomentCertificate {
    /// Largest deviation of a diagonal entry from pi.
    pub diagonal_defect: f64,
    /// Largest modulus of a reconstructed Gram entry.
    pub max_modulus: f64,
    /// Smallest eigenvalue of the reconstructed Gram matrix.
    pub min_eig: f64,
}

impl std::fmt::Display for FirstMomentCertificate {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "diagonal defect {:e}, max |G_nm| {}, min eigenvalue {:e}",
            self.diagonal_defect, self.max_modulus, self.min_eig
        )
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
