//! Numerical toolkit for the trigonometric Sutherland system, its rational
//! Ruijsenaars--Schneider dual, and the action-angle duality maps between them.
//!
//! The library is organized around a symplectic-reduction picture: an
//! unreduced phase space of triples `(g, J, v)` (a unitary matrix, an
//! anti-Hermitian matrix, and a complex vector parametrizing a minimal
//! coadjoint orbit) carries a moment-map constraint and a unitary gauge
//! action.  Two families of distinguished gauge slices of the constraint
//! surface realize, respectively, the Sutherland system in its particle
//! coordinates and the dual Ruijsenaars--Schneider system in action-angle
//! type coordinates.  Mapping a point from one slice into the other is the
//! duality symplectomorphism; time evolution in either system is obtained by
//! running the explicit free flows upstairs and projecting back.
//!
//! Modules:
//! - [`matrix`]: deterministic dense complex eigendecompositions.
//! - [`phase`]: phase-space value types, canonicalization, chart coordinates.
//! - [`reduction`]: moment map, gauge action, and all slice constructions.
//! - [`duality`]: the duality maps and their gauge-fixing machinery.
//! - [`coverings`]: covering projections, deck maps, and the commuting web.
//! - [`dynamics`]: free flows, projected evolution, and an RK4 cross-check.
//! - [`verify`]: the randomized verification suite and its report types.

pub mod batch;
pub mod coverings;
pub mod duality;
pub mod dynamics;
pub mod error;
pub mod matrix;
pub mod phase;
pub mod reduction;
pub mod serde_complex;
pub mod tol;
pub mod verify;

pub use error::CoreError;
pub use phase::Coupling;
