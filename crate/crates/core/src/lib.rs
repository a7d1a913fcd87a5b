//! Covariant phase POVMs on truncated number spaces, their moment operators,
//! the spectral measure of the first moment, and smeared position measures on a line grid.

pub mod cli;
pub mod error;
pub mod interval_sets;
pub mod linalg;
pub mod line_povm;
pub mod moments;
pub mod phase_povm;
pub mod quadrature;
pub mod spectral;

pub use error::{Error, Result};
pub use interval_sets::{CircleSet, RealSet};
pub use linalg::{CMatrix, DiagonalOperator, HermitianOperator, StateVector};
pub use line_povm::{DensityKind, DensityProfile, LineGrid, SmearedPositionPovm};
pub use moments::{moment_coefficient, moment_operator, noise_operator, recover_gram};
pub use phase_povm::{GeneratorSpec, GramMatrix, Indexing, PhasePovm};
pub use spectral::{spectral_measure, BinnedSpectralMeasure};
