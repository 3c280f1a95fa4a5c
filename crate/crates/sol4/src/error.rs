//! Crate-wide error type. Every fallible operation returns [`Result`] with a
//! variant naming the violated contract; nothing panics on bad input.

/// Errors raised by geometric operations.
#[derive(Debug, Clone, thiserror::Error)]
pub enum Error {
    /// A coordinate exponent would overflow: |t| beyond the supported range.
    #[error("coordinate t = {t} outside the supported range |t| <= {limit}")]
    CoordinateRange { t: f64, limit: f64 },

    /// A computation produced or received a NaN/infinite value.
    #[error("non-finite value encountered in {context}")]
    NonFinite { context: &'static str },

    /// Frame index outside 1..=4.
    #[error("frame index {index} out of range (expected 1..=4)")]
    FrameIndex { index: usize },

    /// Two tangent vectors were combined although they live at different points.
    #[error("tangent vectors are based at different points")]
    BasepointMismatch,

    /// A 2-plane spanned by near-parallel vectors.
    #[error("degenerate tangent plane: Gram determinant {gram} below {threshold}")]
    DegeneratePlane { gram: f64, threshold: f64 },

    /// Geodesic initial data must be unit length.
    #[error("initial velocity has norm {norm}, expected a unit vector")]
    NotUnitSpeed { norm: f64 },

    /// An integrator was asked for zero steps or a non-finite interval.
    #[error("invalid integration setup: {reason}")]
    BadIntegration { reason: &'static str },

    /// The immersion is rank-deficient at a parameter point.
    #[error("immersion rank-deficient at ({u0}, {u1}, {u2}): smallest singular value {sigma}")]
    RankDeficient { u0: f64, u1: f64, u2: f64, sigma: f64 },

    /// The numerically built shape operator is too far from symmetric,
    /// indicating a broken normal field or too-coarse difference steps.
    #[error("shape operator asymmetry {asymmetry} exceeds {limit}")]
    AsymmetricShape { asymmetry: f64, limit: f64 },

    /// A family parameter outside its admissible range.
    #[error("parameter r = {r} not admissible for family {family}: {reason}")]
    FamilyParameter {
        family: &'static str,
        r: f64,
        reason: &'static str,
    },

    /// A reconstruction case was given data violating its defining constraints.
    #[error("case data violates {constraint}: off by {defect}")]
    CaseConstraint { constraint: &'static str, defect: f64 },

    /// Angle functions vary over the patch where a case requires them constant.
    #[error("angle functions vary over the patch (max deviation {deviation}); no constant-angle case applies")]
    NonConstantAngles { deviation: f64 },

    /// The case split sits inside the numerical tie-break band.
    #[error("third angle function |c| = {c} falls in the ambiguous band [{lo}, {hi}); refusing to guess a case")]
    AmbiguousCase { c: f64, lo: f64, hi: f64 },

    /// Canonicalization found no catalog family within tolerance.
    #[error("no catalog family matches: best residual {residual} exceeds tolerance {tolerance}")]
    NoMatch { residual: f64, tolerance: f64 },

    /// An operation that only applies to certain families was given another.
    #[error("operation {operation} is not defined for family {family}")]
    UnsupportedFamily {
        operation: &'static str,
        family: &'static str,
    },

    /// A linear-algebra step (Cholesky, eigensolve) failed on the given data.
    #[error("linear algebra failure in {context}")]
    LinearAlgebra { context: &'static str },

    /// A run-configuration key or value could not be parsed or validated.
    #[error("invalid configuration: {message}")]
    Config { message: String },
}

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
