//! Centralized numerical tolerances.
//!
//! Every threshold used by the library is named here with its rationale, so
//! that the verification suite, the library internals, and the tests agree on
//! one set of numbers.

/// Structural matrix predicates (Hermitian / unitary / anti-Hermitian
/// residuals), scaled by `max(1, norm)` of the input.  On-shell data is
/// constructed from exact formulas, so anything beyond accumulated rounding
/// indicates a genuinely malformed input.
pub const STRUCTURAL: f64 = 1e-10;

/// Eigenvalue-degeneracy flag threshold.  On-shell spectra have gaps of at
/// least |x|, so a smaller separation marks the point for the caller without
/// invalidating the decomposition.
pub const DEGENERACY: f64 = 1e-8;

/// Cluster width used internally when splitting the spectrum of the
/// Hermitian part of a unitary matrix.  Wider than [`DEGENERACY`] on purpose:
/// over-clustering is harmless (the anti-Hermitian part separates the
/// cluster), under-clustering loses accuracy.
pub const EIG_CLUSTER: f64 = 1e-7;

/// Square-root clamping for chamber-boundary factors: values within this
/// distance below zero are floating-point dust and are clamped to zero;
/// anything lower is a genuine constraint violation.
pub const SQRT_CLAMP: f64 = 1e-12;

/// Closed-chamber membership: gaps may fall short of |x| by at most this.
pub const CHAMBER: f64 = 1e-8;

/// Boundary detection for completed coordinates: |z_j| at or below this is
/// treated as exactly on the gap-saturating boundary.
pub const BOUNDARY: f64 = 1e-8;

/// Gauge fixing switches to the boundary-safe extraction branch when the
/// smallest component of the slice vector V drops below this.  Phase
/// extraction from a vanishing component is ill-conditioned exactly where
/// the phase ceases to matter.
pub const NEAR_BOUNDARY_V: f64 = 1e-6;

/// Relative off-diagonal residual accepted when a gauge-fixing step must
/// produce a diagonal matrix.  Failures are hard errors: a non-diagonal
/// result means the input violated the constraint, and projecting it away
/// would mask bugs.
pub const DIAGONALITY: f64 = 1e-6;

/// Moment-map residual required of inputs to projection operations.
pub const ON_SHELL: f64 = 1e-8;

/// Residual accepted when validating the off-diagonal coupling pattern of a
/// conjugated slice matrix.
pub const PATTERN: f64 = 1e-8;

/// Per-coordinate tolerance for equality of canonicalized points.
pub const POINT_EQ: f64 = 1e-9;

/// Margin for open-simplex membership; boundary points are rejected.
pub const SIMPLEX_MARGIN: f64 = 1e-12;

/// Half-width of the transition windows in the two-chart atlas.
pub const ATLAS_EPSILON: f64 = 0.1;

/// Step used by all central-difference Jacobians in the verification suite.
pub const FD_STEP: f64 = 1e-5;

/// Minimal angular gap allowed by the reference integrator's collision guard.
pub const COLLISION_GUARD: f64 = 1e-4;
