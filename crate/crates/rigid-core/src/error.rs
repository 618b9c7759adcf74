//! Error taxonomy shared by every solver module.

/// Errors produced by the solver core.
///
/// Path-tracking outcomes (step budget, singular encounters) are reported as
/// statuses on `TrackResult`, not as errors; this enum covers argument
/// violations and numerical dead ends that abort an operation.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },
    #[error("matrix is not unitary (defect {defect:.3e})")]
    NonUnitary { defect: f64 },
    #[error("singular point: projected Jacobian is rank deficient")]
    SingularPoint,
    #[error("principal logarithm branch ambiguity: eigenvalue at angle pi")]
    BranchAmbiguity,
    #[error("rank-deficient input after retries")]
    RankDeficient,
    #[error("invalid argument: {0}")]
    Domain(&'static str),
    #[error("capacity exceeded: {required} terms over the limit {limit}")]
    Capacity { required: u128, limit: u128 },
    #[error("root finding failed: {0}")]
    RootFinding(&'static str),
}

pub type Result<T> = core::result::Result<T, Error>;
