use thiserror::Error;

/// Why a pair of points fails to be spin-connectable.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConnectReason {
    NotProperlyTimelike,
    NotGenericallySeparated,
    NotTimeDirected,
}

impl std::fmt::Display for ConnectReason {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            ConnectReason::NotProperlyTimelike => "not properly timelike",
            ConnectReason::NotGenericallySeparated => "not generically separated",
            ConnectReason::NotTimeDirected => "not time-directed",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix is not diagonalizable within tolerance")]
    DefectiveMatrix,
    #[error("spectrum is not strictly positive")]
    NotPositiveSpectrum,
    #[error("Gram matrix of the generators is degenerate")]
    DegenerateGram,
    #[error("operator pair does not span a plane of signature (1,1)")]
    NotSignature11,
    #[error("sign operators are not generically separated")]
    NotGenericallySeparated,
    #[error("identification requires a parity-reversing map")]
    ParityObstruction,
    #[error("no identification map between the given Clifford subspaces")]
    NoSolution,
    #[error("operator is not in the stabilizer of the Clifford subspace")]
    NotInStabilizer,
    #[error("closed chain is not properly timelike")]
    NotProperlyTimelike,
    #[error("directional sign operator is ambiguous (degenerate spectrum)")]
    AmbiguousDirection,
    #[error("points are not spin-connectable: {0}")]
    NotSpinConnectable(ConnectReason),
    #[error("tangent vector home does not match")]
    HomeMismatch,
    #[error("vector is not spacelike")]
    NotSpacelike,
    #[error("not admissible: {0}")]
    NotAdmissible(String),
    #[error("operator does not have rank four")]
    NotRegular,
    #[error("argument out of domain: {0}")]
    OutOfDomain(String),
    #[error("separation vector lies on the light cone")]
    OnLightCone,
    #[error("quadrature did not converge: {0}")]
    QuadratureFailure(String),
    #[error("mass shell integral is degenerate")]
    MassShellDegenerate,
    #[error("integration failed: {0}")]
    IntegrationFailure(String),
    #[error("curve segment {segment} is not timelike and future-directed")]
    NotAdmissibleCurve { segment: usize },
}

pub type Result<T> = std::result::Result<T, Error>;
