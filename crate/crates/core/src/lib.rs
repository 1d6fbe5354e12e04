//! Inverse scattering transform for the integrable discrete nonlocal
//! PT-symmetric nonlinear Schrödinger equation
//!
//! ```text
//! i dq_n/dt = q_{n+1} - 2 q_n + q_{n-1} - σ q_n q*_{-n} (q_{n+1} + q_{n-1})
//! ```
//!
//! with nonzero boundary conditions, in all four (σ, Δθ) cases.
//!
//! * [`spectral`] — case parameters, uniformization, regions, γ(ζ).
//! * [`lattice`] — truncated fields, backgrounds, Θ-products, the lattice RHS.
//! * [`scattering`] — Jost columns, scattering data, symmetries, trace formulas.
//! * [`ist`] — discrete eigenvalues, norming constants, reflectionless solitons.
//! * [`verify`] — equation residuals and an RK4 time-domain cross-check.

pub mod error;
pub mod ist;
pub mod lattice;
pub mod scattering;
pub mod spectral;
pub mod verify;

pub use num_complex::Complex64 as C64;

pub use error::{IstError, Result};
pub use ist::{
    EigenFamily, EigenPair, EigenSet, FeasibilityReport, NormingConvention, NormingData,
    ReflectionlessSystem, SingularityScan,
};
pub use lattice::{PotentialWindow, ThetaProduct};
pub use scattering::{
    ColumnKind, EigenfunctionColumn, ScatteringCoefficients, ScatteringReport, SymmetryResiduals,
};
pub use spectral::{CaseConfig, CaseId, RegionTag, SpectralPoint};
pub use verify::{ResidualReport, Trajectory};

/// `|q|` above which a field is declared to have blown up.
pub const BLOWUP_THRESHOLD: f64 = 1e6;
