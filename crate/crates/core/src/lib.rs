//! Greedy moment-matching model order reduction for parametric linear systems in
//! the frequency domain, driven by a posteriori transfer-function error
//! estimators that need no inf-sup constant.
//!
//! The crate is organized bottom-up:
//!
//! * [`linalg`]: dense complex matrices, LU, orthonormal bases.
//! * [`system`]: affine parametric systems `Q(μ̃) x = B`, `y = C x`.
//! * [`projection`]: Petrov-Galerkin reduced models and residuals.
//! * [`moments`]: rational Krylov and multi-moment basis blocks.
//! * [`estimators`]: the seven output-error estimators and their diagnostics.
//! * [`greedy`]: the greedy basis construction and effectivity validation.
//! * [`io`] and [`synthetic`]: file formats, reports and test systems.

pub mod error;
pub mod estimators;
pub mod greedy;
pub mod io;
pub mod linalg;
pub mod moments;
pub mod projection;
pub mod synthetic;
pub mod system;

pub use error::{Error, Result};
pub use estimators::{
    delta_r, evaluate, evaluate_mimo, sensitivity_report, true_error, BasisSet, DeltaRConfig,
    EstimateBreakdown, EstimatorKind, EstimatorWorkspace, SensitivityReport,
};
pub use greedy::{
    run_greedy, select_points, validate, EffectivityReport, GreedyConfig, GreedyResult,
    InitialPoints, IterationRecord, SelectedPoints, StopReason,
};
pub use linalg::{Basis, BasisRole, CMatrix, C64};
pub use moments::{krylov_block, multimoment_block, Direction, ExpansionRequest};
pub use projection::{reduce, ReducedModel};
pub use system::{AffineMatrix, Monomial, ParametricSystem, SamplePoint};
