//! Coherence, partial coherence and geometric discord on finite-dimensional
//! quantum states.
//!
//! The crate is organised bottom-up:
//!
//! - [`linalg`]: dense complex matrices, Hermitian eigensolver, `sqrt`, Kronecker
//!   products and partial traces.
//! - [`states`] and [`measurements`]: validated density matrices, bipartite
//!   structure, von Neumann measurements and their Lüders extensions.
//! - [`channels`]: Kraus channels plus classifiers and samplers for
//!   incoherent and partial incoherent operations.
//! - [`measures`]: entropy, Wigner-Yanase skew information, quantum Fisher
//!   information and the coherence functionals built on them.
//! - [`optim`]: geometric discord (minimum over local measurements) and
//!   heuristic lower bounds for the channel-supremum coherence families.
//! - [`verify`]: seeded randomized property suites.
//!
//! Bipartite operators are a-major: `|i>_a |j>_b` has flat index `i * d_b + j`.

pub mod channels;
pub mod error;
pub mod linalg;
pub mod measurements;
pub mod measures;
pub mod optim;
pub mod rng;
pub mod states;
pub mod verify;

pub use channels::KrausChannel;
pub use error::{Error, Result};
pub use linalg::{ComplexMatrix, Party, SpectralDecomposition, C64};
pub use measurements::{LuedersMeasurement, VonNeumannMeasurement};
pub use measures::{MeasureKind, MeasureValue};
pub use optim::{DiscordResult, OptimizerConfig};
pub use states::{BipartiteState, DensityMatrix};
pub use verify::{Suite, SuiteReport};
