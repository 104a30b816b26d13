//! Quantum-kernel support vector machines on an exact state-vector backend.
//!
//! * [`statevector`] simulates pure n-qubit states and the gates the encodings need.
//! * [`feature_maps`] builds the nine encoding circuits and prepares `|phi(x)>`.
//! * [`kernel`] turns encoded states into fidelity Gram matrices, exactly or by
//!   simulated shot sampling.
//! * [`svm`] trains a soft-margin SVM on a precomputed kernel with SMO.
//! * [`preprocess`] and [`metrics`] cover data conditioning and evaluation.
//! * [`bench`] wires everything into the feature-map comparison harness.

pub mod bench;
pub mod error;
pub mod feature_maps;
pub mod kernel;
pub mod metrics;
pub mod preprocess;
pub mod statevector;
pub mod svm;

pub use error::{Error, Result};
pub use feature_maps::{FeatureMapFamily, FeatureMapSpec};
pub use kernel::{KernelMatrix, KernelMode};
pub use statevector::{Gate, StateVector};
pub use svm::{Label, LabeledDataset, SmoParams, SvmModel};
