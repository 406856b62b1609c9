//! Spectral solvers for the stochastic Schlogl model.
//!
//! The crate builds the truncated birth-death generator of the model's
//! master equation, produces Hermitian surrogates of it, and recovers its
//! lowest two eigenvalues and its steady state two ways: an exact dense
//! classical reference, and emulated quantum pipelines (VQD and the
//! VQD-exact0 variant, phase estimation, and variational SVD) running on a
//! built-in statevector simulator.
//!
//! Modules map onto the pipeline stages:
//!
//! - [`system`]: model parameters and the truncated generator matrix
//! - [`hermitize`]: block embedding, `Q Q^dag`, constant state, `exp(-iH)`
//! - [`oracle`]: exact diagonalization, zeromode, propagation, metrics
//! - [`pauli`]: Pauli-string decomposition, sorting and truncation
//! - [`qsim`]: dense statevector simulator and the two-local ansatz
//! - [`variational`]: VQD / VQD-exact0 driver and gradients
//! - [`qpe`]: phase estimation over `exp(-i Q_H)`
//! - [`vqsvd`]: variational SVD and the steady-state recovery pipeline

pub mod error;
pub mod hermitize;
pub mod io;
pub mod oracle;
pub mod pauli;
pub mod qpe;
pub mod qsim;
pub mod system;
pub mod variational;
pub mod vqsvd;

pub use error::{Error, Result};
pub use hermitize::{
    block_embed, constant_amplitudes, constant_state, spd_form, unitary_of, HermitianOperator,
    OperatorKind, UnitaryOperator,
};
pub use oracle::{ComparisonMetrics, SpectralResult};
pub use pauli::{decompose, PauliSum, PauliTerm, SortStrategy};
pub use qpe::{phase_to_eigenvalue, qpe_probabilities, qpe_run, QpeConfig, QpeInput, QpeResult};
pub use qsim::{build_ansatz, AnsatzSpec, Circuit, Gate, StateVector};
pub use system::{GeneratorMatrix, SchloglSystem};
pub use variational::{
    gradient, vqd, vqd_exact0, vqe_ground, GradientMode, InitStrategy, OptimizerKind, VqdConfig,
    VqdReport,
};
pub use vqsvd::{steady_state_pipeline, vqsvd_decompose, VqsvdConfig, VqsvdResult, ZeromodeReport};
