//! Exact symbolic computation in the Toeplitz-cube groupoid algebras.

pub mod coeff;
pub mod cone_sets;
pub mod error;
pub mod gadgets;
pub mod groupoid;
pub mod ktheory;
pub mod line_bundles;
pub mod matrix;
pub mod monoid;
pub mod verify;

pub use coeff::Gaussian;
pub use cone_sets::{BoxRegion, ClopenSet, ExtNat};
pub use error::{Error, Result};
pub use gadgets::{build, GadgetSpec};
pub use groupoid::{AlgebraElement, GroupoidTerm, SigmaElement};
pub use ktheory::{ConeVerdict, ElementaryProj, K0Class};
pub use line_bundles::LbDecomposition;
pub use matrix::{conjugate, conjugate_with_inverse, verify_equivalence, AlgMatrix, Mode};
pub use monoid::{Ambient, ShuffleIndex, StandardSum};
pub use verify::{Bounds, CheckResult, Report};
