//! Exact computer algebra for syzygy bundles on smooth plane curves over
//! finite fields and rational function fields.
//!
//! The crate builds syzygy bundles `Syz(f_1,...,f_{n+1})(m)` on plane curves,
//! computes their Frobenius pullbacks and section spaces, certifies
//! trivializations and destabilizing subsheaves, and evaluates two-chart
//! Cech `H^1` with its semilinear Frobenius action (Hasse-Witt matrices,
//! Fitting decompositions, connecting classes of rank-2 extensions).
//!
//! Everything is exact: coefficients live in `F_p`, a single extension
//! `F_{p^a}`, or towers of rational function fields such as `GF(2)(s)(t)`.
//! All operations are pure functions on immutable values and every search
//! result is backed by a machine-checkable certificate; the `scenario`
//! module packages the library's benchmark computations as reproducible
//! reports.

pub mod bundle;
pub mod cech;
pub mod certificate;
pub mod curve;
pub mod error;
pub mod field;
pub mod linalg;
pub mod poly;
pub mod report;
pub mod scenario;
pub mod semilinear;

pub use bundle::{BundleSpec, FamilySpec, Section};
pub use cech::{CechClass, Cochain};
pub use curve::{PlaneCurve, RingElement, Var};
pub use error::{Result, SyzError};
pub use field::{Elem, Field};
pub use linalg::Matrix;
pub use poly::HomogeneousPoly;
pub use semilinear::{FittingDecomposition, SemilinearMap};
