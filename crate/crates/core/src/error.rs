use crate::prelude::*;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("empty system: every dimension must be at least one")]
    EmptySystem,

    #[error("eigensolver did not converge")]
    EigensolveFailure,

    /// `sE - A` could not be factored; the frequency sits on (or very near) a pole.
    #[error("singular shift: the frequency coincides with a pole")]
    SingularShift,

    #[error("largest singular value is not simple")]
    NonSimpleSingularValue,

    #[error("singular values are not separated enough for the second derivative")]
    DegenerateSpectrum,

    #[error("gamma {0} is (numerically) a singular value of D")]
    GammaNearSingularValueOfD(f64),

    #[error("crossing carries no eigenvectors")]
    MissingEigenvectors,

    #[error("no starting frequencies available")]
    NoSeedsAvailable,

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("operation requires dense storage")]
    DenseRequired,
}
