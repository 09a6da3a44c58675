//! The web of symplectic coverings connecting the center-of-mass-split
//! models to the position-side and dual-side phase spaces, together with
//! the deck transformations and the commuting-square checker.
//!
//! Shape of the web (one column per relative-factor model):
//!
//! ```text
//!   (u0, w0) x rel           -- id x R0 -->   (u0, w0) x rel'
//!        | psi2                                    | psi2
//!   (zeta0, v0) x rel        -- id x R0 -->   (zeta0, v0) x rel'
//!        | psi1_i                                  | psi1_ii
//!   position point (q, p)    ----- R ------>  completed point (z, Z)
//! ```
//!
//! The vertical maps are local symplectomorphisms; the quotiented cyclic
//! actions [`alpha_red_i`] / [`alpha_red_ii`] generate the fibers of the
//! lower projections, and [`shift_deck`] generates the fiber of the upper
//! one.  [`diagram_check`] runs both ways around the lower square and
//! returns the discrepancy.

use num_complex::Complex64;

use crate::duality::{dual_transform, su_dual_transform};
use crate::error::{CoreError, Result};
use crate::phase::{
    alcove_embed, canonicalize_sutherland, cyclic_deck_lifted, momenta_from_separated,
    relabel_cyclic, CenterMassPointI, CenterMassPointII, Coupling, CoveringPoint1,
    CoveringPoint2, DualCompletedPoint, RelPoint, SutherlandPoint,
};
use std::f64::consts::PI;

fn wrong_rel(context: &'static str, expected: &'static str) -> CoreError {
    CoreError::WrongRel { context, expected }
}

/// Exponentiate the line-valued center of mass: `(u0, w0, rel)` maps to
/// `(e^{i u0}, w0, rel)` with the relative factor untouched.  Covers both
/// relative models; `2*pi`-periodic in `u0`.
pub fn psi2(pt: &CoveringPoint2) -> Result<CoveringPoint1> {
    CoveringPoint1::new(
        Complex64::from_polar(1.0, pt.u0),
        pt.w0,
        pt.rel.clone(),
    )
}

/// Project a circle-times-simplex covering point to the position-side phase
/// space: positions `arg(zeta0) + beta(delta)` (traceless alcove embedding
/// shifted by the center of mass), momenta `gamma_m - gamma_{m-1} + v0/n`,
/// canonicalized.
pub fn psi1_i(pt: &CoveringPoint1, _c: &Coupling) -> Result<SutherlandPoint> {
    let rel = match &pt.rel {
        RelPoint::I(rel) => rel,
        RelPoint::II(_) => return Err(wrong_rel("psi1_i", "model-I")),
    };
    let beta = alcove_embed(&rel.delta)?;
    let base = pt.zeta0.arg();
    let q: Vec<f64> = beta.iter().map(|b| base + b).collect();
    let p = momenta_from_separated(pt.v0, &rel.gamma);
    canonicalize_sutherland(&q, &p)
}

/// Project a circle-times-flat covering point to the completed dual phase
/// space: `z_j = zeta0^{n-j} zeta_j` and
/// `Z = zeta0^n exp((1-n)x/2 + v0/n + sum_k (k-n)/n |zeta_k|^2)`.
///
/// Negative couplings go through the parity identification that defines the
/// completed chart there: conjugate the center phase, negate the center
/// momentum, and evaluate at `|x|` (the flat relative coordinates are
/// already expressed in the parity-fixed chart).
pub fn psi1_ii(pt: &CoveringPoint1, c: &Coupling) -> Result<DualCompletedPoint> {
    let rel = match &pt.rel {
        RelPoint::II(rel) => rel,
        RelPoint::I(_) => return Err(wrong_rel("psi1_ii", "model-II")),
    };
    if c.x < 0.0 {
        let mirrored = CoveringPoint1::new(pt.zeta0.conj(), -pt.v0, pt.rel.clone())?;
        return psi1_ii(&mirrored, &Coupling::new(c.n, -c.x)?);
    }
    let n = c.n;
    if rel.n() != n {
        return Err(CoreError::DimensionMismatch {
            context: "psi1_ii relative factor",
            expected: n,
            got: rel.n(),
        });
    }
    let z: Vec<Complex64> = (0..n - 1)
        .map(|j| pt.zeta0.powu((n - 1 - j) as u32) * rel.zeta[j])
        .collect();
    let mut exponent = 0.5 * (1.0 - n as f64) * c.x + pt.v0 / n as f64;
    for (j, zeta_j) in rel.zeta.iter().enumerate() {
        exponent += ((j as f64 + 1.0) - n as f64) / n as f64 * zeta_j.norm_sqr();
    }
    let big_z = pt.zeta0.powu(n as u32) * exponent.exp();
    DualCompletedPoint::new(z, big_z)
}

/// Generator of the cyclic deck action in the model-I realization:
/// `zeta0 -> e^{-2 pi i / n} zeta0` with the cyclic relabeling of
/// `(delta, gamma)`; order `n`, fixes `v0`.
pub fn alpha_red_i(pt: &CoveringPoint1) -> Result<CoveringPoint1> {
    let rel = match &pt.rel {
        RelPoint::I(rel) => rel,
        RelPoint::II(_) => return Err(wrong_rel("alpha_red_i", "model-I")),
    };
    let (zeta0, v0, d, g) = cyclic_deck_lifted(pt.zeta0, pt.v0, &rel.delta, &rel.gamma);
    CoveringPoint1::new(zeta0, v0, RelPoint::I(CenterMassPointI::new(d, g)?))
}

/// Generator of the cyclic deck action in the model-II realization:
/// `zeta0 -> e^{-2 pi i / n} zeta0`, `zeta_j -> e^{2 pi i (n-j)/n} zeta_j`;
/// order `n`, fixes `v0`.
pub fn alpha_red_ii(pt: &CoveringPoint1) -> Result<CoveringPoint1> {
    let rel = match &pt.rel {
        RelPoint::II(rel) => rel,
        RelPoint::I(_) => return Err(wrong_rel("alpha_red_ii", "model-II")),
    };
    let n = rel.n();
    let rot = Complex64::from_polar(1.0, -2.0 * PI / n as f64);
    let zeta: Vec<Complex64> = rel
        .zeta
        .iter()
        .enumerate()
        .map(|(j, zeta_j)| {
            let phase = 2.0 * PI * ((n - 1 - j) as f64) / n as f64;
            Complex64::from_polar(1.0, phase) * zeta_j
        })
        .collect();
    CoveringPoint1::new(
        rot * pt.zeta0,
        pt.v0,
        RelPoint::II(CenterMassPointII::new(zeta)),
    )
}

/// Generator of the integer deck action on the line-valued covering:
/// `u0 -> u0 - 2 pi / n` together with the model-appropriate cyclic
/// relabeling of the relative factor.  Its `n`-th power is the pure
/// translation `u0 -> u0 - 2 pi`, and it covers [`alpha_red_i`] /
/// [`alpha_red_ii`] through [`psi2`].
pub fn shift_deck(pt: &CoveringPoint2) -> Result<CoveringPoint2> {
    let n = pt.rel.n() as f64;
    let rel = match &pt.rel {
        RelPoint::I(rel) => {
            let (d, g) = relabel_cyclic(&rel.delta, &rel.gamma);
            RelPoint::I(CenterMassPointI::new(d, g)?)
        }
        RelPoint::II(rel) => {
            let m = rel.n();
            let zeta: Vec<Complex64> = rel
                .zeta
                .iter()
                .enumerate()
                .map(|(j, zeta_j)| {
                    let phase = 2.0 * PI * ((m - 1 - j) as f64) / m as f64;
                    Complex64::from_polar(1.0, phase) * zeta_j
                })
                .collect();
            RelPoint::II(CenterMassPointII::new(zeta))
        }
    };
    Ok(CoveringPoint2 {
        u0: pt.u0 - 2.0 * PI / n,
        w0: pt.w0,
        rel,
    })
}

/// Run both ways around the covering square from a model-I line-covering
/// point and return the distance between the two completed dual points:
/// down the model-I column and across the duality map, versus across the
/// center-of-mass duality and down the model-II column.
pub fn diagram_check(pt: &CoveringPoint2, c: &Coupling) -> Result<f64> {
    let rel = match &pt.rel {
        RelPoint::I(rel) => rel,
        RelPoint::II(_) => return Err(wrong_rel("diagram_check", "model-I")),
    };
    let path_a = dual_transform(&psi1_i(&psi2(pt)?, c)?, c)?;
    let swapped = CoveringPoint2 {
        u0: pt.u0,
        w0: pt.w0,
        rel: RelPoint::II(su_dual_transform(rel, c)?),
    };
    let path_b = psi1_ii(&psi2(&swapped)?, c)?;
    Ok(path_a.distance(&path_b))
}
