//! Geometric moment invariants built from two generating functions.
//!
//! Shapes are weighted point sets. Invariant cores are products of the
//! dot-product generator `f(i,j)` and the determinant generator `g(i,j)`
//! (`g(i,j,k)` in 3D) over abstract point labels; translating a core
//! integrates it over the shape once per label, which yields an exact
//! polynomial in central moments.
//!
//! Module map:
//!
//! * [`moments`]: raw and central moments of point sets, plus file loaders in [`io`].
//! * [`poly`] and [`genfun`]: moment polynomials, cores, translation, normalization.
//! * [`catalog`]: Hu, primitive, affine and 3D rotation invariants with verification.
//! * [`independence`]: Jacobian-rank functional independence.
//! * [`discovery`]: enumeration of cores and extraction of independent sets.
//! * [`harness`]: transforms and invariance campaigns.

pub mod catalog;
pub mod discovery;
pub mod error;
pub mod genfun;
pub mod harness;
pub mod independence;
pub mod io;
pub mod moments;
pub mod poly;

pub use error::{Error, Result};
pub use genfun::{CoreSum, FactorKind, GfFactor, Group, InvariantCore};
pub use moments::{MomentIndex, MomentVector, WeightedPoint, WeightedPointSet};
pub use poly::MomentPolynomial;
