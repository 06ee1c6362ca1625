//! Exit-path categories of finitely triangulated stratified spaces.
//!
//! Modules, from the bottom up:
//!
//! * [`poset`]: finite posets, subposets and monotone maps
//! * [`homlin`]: exact linear algebra and homology
//! * [`complex`]: stratified simplicial and regular cell complexes
//! * [`category`]: finite categories with explicit composition tables
//! * [`exit`]: presentations `R → P` and their localizations
//! * [`rep`]: representations, constructibility and counting over finite fields
//! * [`random`]: random instances for property tests

pub mod category;
pub mod complex;
pub mod exit;
pub mod homlin;
pub mod poset;
pub mod random;
pub mod rep;

pub use category::FinCategory;
pub use complex::{Cells, SimplicialComplex, StratifiedComplex};
pub use exit::{ExitPresentation, LocalizationReport};
pub use homlin::{Coefficients, Field, HomologyResult};
pub use poset::{MonotoneMap, Poset, SubposetSpec};
