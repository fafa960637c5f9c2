//! Exact-arithmetic library for divisorial valuations of plane curves and
//! hypersurface families: dicritical divisors, Rees valuations, normality and
//! reduction checks, contact numbers and local intersection multiplicities.
//!
//! Everything is computed over exact coefficient fields (the rationals,
//! number-field towers, and rational function fields); there is no floating
//! point anywhere, and all reported equalities are exact.

pub mod contact;
pub mod field;
pub mod hypersurface;
pub mod linalg;
pub mod pencil;
pub mod plane;
pub mod poly;
pub mod report;
pub mod suite;
mod value;

pub use field::{Field, FieldElement, FieldError};
pub use poly::{Monomial, MultiPoly, PolyError};
pub use value::ValOrInf;
