//! Crate-wide error type.
//!
//! Every fallible operation returns [`CoreError`].  Numerical *flags* that do
//! not invalidate a result (e.g. a degenerate spectrum) are carried on the
//! result types instead of being reported as errors.

use thiserror::Error;

/// Errors raised by the library's domain and validation checks.
#[derive(Debug, Clone, Error)]
pub enum CoreError {
    /// Coupling constructor rejected its arguments (need n >= 2, x != 0).
    #[error("invalid coupling: n = {n}, x = {x} (need n >= 2 and x != 0)")]
    InvalidCoupling { n: usize, x: f64 },

    /// Input dimensions disagree with the coupling or with each other.
    #[error("dimension mismatch: {context} (expected {expected}, got {got})")]
    DimensionMismatch {
        context: &'static str,
        expected: usize,
        got: usize,
    },

    /// Matrix failed the Hermitian-symmetry precondition.
    #[error("matrix is not Hermitian: residual {residual:.3e} exceeds tol {tol:.3e}")]
    NotHermitian { residual: f64, tol: f64 },

    /// Matrix failed the unitarity precondition.
    #[error("matrix is not unitary: residual {residual:.3e} exceeds tol {tol:.3e}")]
    NotUnitary { residual: f64, tol: f64 },

    /// Two configuration angles coincide mod 2*pi; no canonical ordering exists.
    #[error("coincident angles: q[{i}] and q[{j}] agree mod 2*pi within {tol:.3e}")]
    CoincidentAngles { i: usize, j: usize, tol: f64 },

    /// Point is not in the ordered convex domain C(n) on the line.
    #[error("point not in the ordered domain: {reason}")]
    NotInC { reason: &'static str },

    /// Point is not in the open simplex (delta_j > 0, sum delta < 2*pi).
    #[error("point not in the open simplex: {reason}")]
    NotInSimplex { reason: &'static str },

    /// Chart point is not on the two-chart overlap region.
    #[error("chart point not on the overlap: phi = {phi:.6} lies in neither window")]
    NotOnOverlap { phi: f64 },

    /// Action vector violates the thick-walled chamber condition.
    #[error("actions not in chamber: gap {gap:.6e} at position {index} requires {required:.6e}")]
    NotInChamber {
        index: usize,
        gap: f64,
        required: f64,
    },

    /// Interior-only operation received a boundary (gap-saturating) point.
    #[error("point on the chamber boundary: |z[{index}]| = {magnitude:.3e} below tol")]
    OnBoundary { index: usize, magnitude: f64 },

    /// The completed coordinate Z must stay away from the origin.
    #[error("coordinate Z is zero (|Z| = {magnitude:.3e}); not a valid completed point")]
    ZeroZ { magnitude: f64 },

    /// Gauge fixing could not bring the point to the expected slice form.
    #[error("gauge fixing failed: {context} residual {residual:.3e} exceeds tol {tol:.3e}")]
    GaugeFixFailure {
        context: &'static str,
        residual: f64,
        tol: f64,
    },

    /// The unitary component has (numerically) degenerate spectrum where a
    /// regular point was required.
    #[error("degenerate torus spectrum: minimal eigenvalue gap {min_gap:.3e} below {tol:.3e}")]
    DegenerateTorusSpectrum { min_gap: f64, tol: f64 },

    /// A conjugated matrix failed to match the structural pattern required of
    /// the slice (off-diagonal coupling law).
    #[error("slice pattern mismatch: {context} residual {residual:.3e} exceeds tol {tol:.3e}")]
    PatternMismatch {
        context: &'static str,
        residual: f64,
        tol: f64,
    },

    /// Moment-map residual too large for an operation requiring on-shell input.
    #[error("point is off-shell: moment residual {residual:.3e} exceeds tol {tol:.3e}")]
    OffShell { residual: f64, tol: f64 },

    /// Reference integrator halted: two particles approached collision.
    #[error("collision guard tripped at t = {t:.6}: min angular gap {min_gap:.3e}")]
    CollisionGuard { t: f64, min_gap: f64 },

    /// A flow family index is out of the admissible range.
    #[error("invalid flow index {k} for n = {n}")]
    InvalidFlowIndex { k: i64, n: usize },

    /// A covering operation received a point whose relative factor belongs
    /// to the other sector.
    #[error("{context} requires a {expected} relative factor")]
    WrongRel {
        context: &'static str,
        expected: &'static str,
    },

    /// A verification sampler exhausted its retry budget without producing a
    /// point satisfying the check's margins.
    #[error("sampler for {context} rejected {tries} consecutive candidates")]
    SampleRejection { context: &'static str, tries: usize },
}

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, CoreError>;
