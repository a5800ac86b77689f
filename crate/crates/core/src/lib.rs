//! Representations of finite products of matrix algebras and their
//! correspondence with ultrafilters on the index set.
//!
//! * [`filters`]: filters and ultrafilters over a finite universe.
//! * [`algebra`]: the product algebra `B = ∏_x M_{n_x}(ℂ)` and spectral checks.
//! * [`reps`]: representations of `B`, their decomposition into factor
//!   projections, irreducibility and equivalence.
//! * [`fixtures`]: seeded random inputs for tests and the fixture generator.

pub mod algebra;
pub mod filters;
pub mod fixtures;
pub mod json;
pub mod linalg;
pub mod reps;

pub use algebra::{AlgebraElement, AlgebraError, IndexSet, DEFAULT_TOL};
pub use filters::{Filter, FilterError, Partition, SetFamily, Subset, Universe};
pub use reps::{Decomposition, EquivalenceCertificate, RepError, Representation};
pub use num_complex::Complex64;
