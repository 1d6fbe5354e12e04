use thiserror::Error;

use crate::C64;

/// Every failure mode of the library. Variants carry enough context to print
/// a useful diagnostic; the CLI maps them onto exit codes.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum IstError {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("singular point at zeta = {0}")]
    SingularPoint(C64),
    #[error("near branch point at zeta = {0}")]
    NearBranchPoint(C64),
    #[error("singular Theta product: 1 - q_k r_k vanishes at k = {0}")]
    SingularProduct(i64),
    #[error("non-finite transfer matrix at site {site} (zeta = {zeta})")]
    SingularTransfer { site: i64, zeta: C64 },
    #[error("division by a near-zero scattering coefficient at zeta = {0}")]
    DivisionNearZero(C64),
    #[error("inadmissible: {0}")]
    Inadmissible(String),
    #[error("degenerate eigenvalues: {0}")]
    DegenerateEigenvalues(String),
    #[error("singular solution at n = {n}, t = {t} (relative det {rel_det:e})")]
    SingularSolution { n: i64, t: f64, rel_det: f64 },
    #[error("blow-up detected at step {step} (t = {t}, max |q| = {max_abs:e})")]
    BlowupDetected { step: usize, t: f64, max_abs: f64 },
    #[error("grid mismatch: {0}")]
    GridMismatch(String),
}

pub type Result<T> = std::result::Result<T, IstError>;
