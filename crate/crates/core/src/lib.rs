//! Trapped-ion electric-field sensing with simultaneous spin-dependent forces
//! and parametric squeezing.
//!
//! The crate is split along the lines of the physics:
//!
//! * [`protocol`] builds the pulse sequences (single-squeeze and the
//!   eight-segment multi-squeezing protocol, plus arbitrary sequences).
//! * [`engine`] propagates each spin branch exactly as
//!   `phase × D(displacement) × S(squeeze)` using closed forms.
//! * [`oracle`] is the brute-force ground truth: truncated Fock space,
//!   matrix exponentials, Trotter products, readout and Fisher information.
//! * [`metrology`] holds the closed-form sensitivities, phonon budgets and
//!   gains, and parameter sweeps.
//! * [`validation`] runs the acceptance criteria end to end.
//!
//! Units: ħ = 1 and z₀ = 1, so η, α and g are angular frequencies and every
//! prediction depends only on the products ητ, ατ and gτ.

pub mod engine;
pub mod error;
pub mod metrology;
pub mod oracle;
pub mod parallel;
pub mod protocol;
pub mod series;
pub mod validation;

pub use engine::{BranchOperator, CompositionResult};
pub use error::{Error, Result};
pub use metrology::{ProtocolKind, SensitivityReport};
pub use oracle::{OracleConfig, SpinFockState};
pub use parallel::Execution;
pub use protocol::{ProtocolSpec, SegmentSpec};
