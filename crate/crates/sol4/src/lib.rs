//! Verification-grade computational geometry for the solvable 4-dimensional
//! homogeneous space Sol_0^4: the group model and its isometries, the
//! left-invariant metric with its curvature, extrinsic geometry of
//! hypersurfaces, the catalog of homogeneous hypersurfaces, and the
//! reconstruction of that catalog from constant-angle normal data.
//!
//! Every numerical claim is exposed as a checkable quantity; the `verify`
//! module packages them into reportable suites.

pub mod ambient;
pub mod catalog;
pub mod error;
pub mod hypersurface;
pub mod reconstruct;
pub mod report;
pub mod solgroup;
pub mod verify;

pub use error::{Error, Result};
pub use solgroup::{FrameVector, Isometry, Point, Sign, TangentVector};
