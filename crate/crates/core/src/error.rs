use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Failure modes of the numerical library surface.
///
/// Each variant has a stable [`Error::name`] used by the command-line front
/// end when reporting numerical failures.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("spectra overlap: min |λ(A)+λ(B)| = {gap:e} below threshold {threshold:e}")]
    SpectraOverlap { gap: f64, threshold: f64 },
    #[error("matrix is not symmetric (relative asymmetry {0:e})")]
    NotSymmetric(f64),
    #[error("eigenvalue {re:e}{im:+e}i lies on or next to the branch cut (-inf, 0]")]
    BranchCutEigenvalue { re: f64, im: f64 },
    #[error("system is not Hurwitz stable (max Re λ = {0:e})")]
    NotStable(f64),
    #[error("matrix is not antistable (min Re λ = {0:e})")]
    NotAntistable(f64),
    #[error("invalid frequency band [{lo}, {hi}]")]
    InvalidBand { lo: f64, hi: f64 },
    #[error("shift {re:e}{im:+e}i makes sI-A singular")]
    SingularShift { re: f64, im: f64 },
    #[error("interpolation point {re:e}{im:+e}i coincides with a pole")]
    ShiftIsPole { re: f64, im: f64 },
    #[error("Krylov basis is rank deficient (σ_min/σ_max = {0:e})")]
    RankDeficientBasis(f64),
    #[error("pair (S, T) is not observable/controllable (PBH margin {0:e})")]
    UnobservablePair(f64),
    #[error("pseudo Gramian is singular or negative semidefinite (λ_min = {min:e}, λ_max = {max:e})")]
    IndefiniteGramian { min: f64, max: f64 },
    #[error("frequency-limited Gramians have numerical rank below the target order {0}")]
    RankDeficientGramians(usize),
    #[error("{re:e}{im:+e}i is not an eigenvalue of A")]
    NotAnEigenvalue { re: f64, im: f64 },
    #[error("eigenvalue {re:e}{im:+e}i is not simple")]
    DefectiveEigenvalue { re: f64, im: f64 },
    #[error("mode {re:e}{im:+e}i is not in the open left half plane")]
    UnstableMode { re: f64, im: f64 },
    #[error("invalid interpolation data: {0}")]
    InvalidInterpolation(String),
    #[error("invalid network model: {0}")]
    InvalidNetwork(String),
    #[error("Newton iteration did not converge (residual {0:e})")]
    NoConvergence(f64),
    #[error("Schur decomposition did not converge")]
    SchurFailed,
    #[error("dual norm expressions disagree: {primal:e} vs {dual:e}")]
    NormCrossCheck { primal: f64, dual: f64 },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

impl Error {
    /// Stable identifier of the variant.
    pub fn name(&self) -> &'static str {
        match self {
            Error::DimensionMismatch(_) => "DimensionMismatch",
            Error::SpectraOverlap { .. } => "SpectraOverlap",
            Error::NotSymmetric(_) => "NotSymmetric",
            Error::BranchCutEigenvalue { .. } => "BranchCutEigenvalue",
            Error::NotStable(_) => "NotStable",
            Error::NotAntistable(_) => "NotAntistable",
            Error::InvalidBand { .. } => "InvalidBand",
            Error::SingularShift { .. } => "SingularShift",
            Error::ShiftIsPole { .. } => "ShiftIsPole",
            Error::RankDeficientBasis(_) => "RankDeficientBasis",
            Error::UnobservablePair(_) => "UnobservablePair",
            Error::IndefiniteGramian { .. } => "IndefiniteGramian",
            Error::RankDeficientGramians(_) => "RankDeficientGramians",
            Error::NotAnEigenvalue { .. } => "NotAnEigenvalue",
            Error::DefectiveEigenvalue { .. } => "DefectiveEigenvalue",
            Error::UnstableMode { .. } => "UnstableMode",
            Error::InvalidInterpolation(_) => "InvalidInterpolation",
            Error::InvalidNetwork(_) => "InvalidNetwork",
            Error::NoConvergence(_) => "NoConvergence",
            Error::SchurFailed => "SchurFailed",
            Error::NormCrossCheck { .. } => "NormCrossCheck",
            Error::InvalidArgument(_) => "InvalidArgument",
        }
    }
}
