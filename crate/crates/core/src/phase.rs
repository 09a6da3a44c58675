//! Phase-space value types and coordinate charts.
//!
//! The systems connected by the duality maps live on a small family of
//! spaces:
//!
//! - `P`: the Sutherland phase space of `n` indistinguishable particles on
//!   the circle — points are classes of `(q, p)` under simultaneous
//!   permutations and per-particle `2*pi` shifts, stored canonically
//!   ([`SutherlandPoint`]).
//! - `P_hat`: the dual interior `(q_hat, p_hat)` with actions in the
//!   thick-walled chamber `p_hat_i - p_hat_{i+1} > |x|`
//!   ([`DualInteriorPoint`]).
//! - `P_hat_c`: the completed dual space, globally coordinatized by
//!   `(z_1..z_{n-1}, Z)` with `Z != 0` ([`DualCompletedPoint`]).
//! - center-of-mass-reduced models of the SU(n) systems: an open simplex
//!   cotangent bundle ([`CenterMassPointI`]) and a flat complex vector space
//!   ([`CenterMassPointII`]).
//! - covering spaces that reinstate the center of mass as either a circle
//!   factor ([`CoveringPoint1`]) or a line factor ([`CoveringPoint2`]).
//!
//! The second half of the module implements the explicit coordinate maps on
//! the line/circle configuration spaces (separation of the center of mass,
//! the simplex-to-alcove embedding, the two-chart atlas of the quotient
//! configuration space and its transition function, and the cyclic deck
//! action), which the covering projections are built from.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{CoreError, Result};
use crate::matrix::principal_angle;
use crate::serde_complex;
use crate::tol;

/// Problem size and coupling strength; parametrizes every space and map.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Coupling {
    pub n: usize,
    pub x: f64,
}

impl Coupling {
    pub fn new(n: usize, x: f64) -> Result<Self> {
        if n < 2 || x == 0.0 || !x.is_finite() {
            return Err(CoreError::InvalidCoupling { n, x });
        }
        Ok(Coupling { n, x })
    }
}

fn check_len(context: &'static str, expected: usize, got: usize) -> Result<()> {
    if expected != got {
        return Err(CoreError::DimensionMismatch {
            context,
            expected,
            got,
        });
    }
    Ok(())
}

/// Absolute angular distance mod 2*pi.
pub fn angular_distance(a: f64, b: f64) -> f64 {
    principal_angle(a - b).abs()
}

// ---------------------------------------------------------------------------
// Point types
// ---------------------------------------------------------------------------

/// Canonical representative of a Sutherland phase-space point: angles
/// strictly decreasing within a `2*pi` window, each stored in `(-pi, pi]`,
/// momenta carried along by the same permutation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SutherlandPoint {
    pub q: Vec<f64>,
    pub p: Vec<f64>,
}

impl SutherlandPoint {
    pub fn n(&self) -> usize {
        self.q.len()
    }

    /// Equality as points of the quotient: canonicalize both representatives
    /// and compare per coordinate (angles by angular distance).
    pub fn approx_eq(&self, other: &SutherlandPoint, tolerance: f64) -> bool {
        let (a, b) = match (
            canonicalize_sutherland(&self.q, &self.p),
            canonicalize_sutherland(&other.q, &other.p),
        ) {
            (Ok(a), Ok(b)) => (a, b),
            _ => return false,
        };
        a.q.len() == b.q.len()
            && a.q
                .iter()
                .zip(&b.q)
                .all(|(x, y)| angular_distance(*x, *y) <= tolerance)
            && a.p.iter().zip(&b.p).all(|(x, y)| (x - y).abs() <= tolerance)
    }
}

/// Interior point of the dual phase space: torus angles and actions in the
/// open thick-walled chamber.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DualInteriorPoint {
    pub qhat: Vec<f64>,
    pub phat: Vec<f64>,
}

impl DualInteriorPoint {
    /// Wraps angles into `(-pi, pi]` and validates the chamber condition
    /// `phat_i - phat_{i+1} > |x|`.
    pub fn new(qhat: &[f64], phat: &[f64], coupling: &Coupling) -> Result<Self> {
        check_len("qhat length", coupling.n, qhat.len())?;
        check_len("phat length", coupling.n, phat.len())?;
        for i in 0..phat.len() - 1 {
            let gap = phat[i] - phat[i + 1];
            if gap <= coupling.x.abs() {
                return Err(CoreError::NotInChamber {
                    index: i,
                    gap,
                    required: coupling.x.abs(),
                });
            }
        }
        Ok(DualInteriorPoint {
            qhat: qhat.iter().map(|&a| principal_angle(a)).collect(),
            phat: phat.to_vec(),
        })
    }

    pub fn n(&self) -> usize {
        self.qhat.len()
    }
}

/// Point of the completed dual space: `n-1` unconstrained complex
/// coordinates plus one nonzero complex coordinate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DualCompletedPoint {
    #[serde(with = "serde_complex::c64_vec")]
    pub z: Vec<Complex64>,
    #[serde(with = "serde_complex::c64", rename = "Z")]
    pub big_z: Complex64,
}

impl DualCompletedPoint {
    pub fn new(z: Vec<Complex64>, big_z: Complex64) -> Result<Self> {
        if big_z.norm() == 0.0 || !big_z.is_finite() {
            return Err(CoreError::ZeroZ {
                magnitude: big_z.norm(),
            });
        }
        Ok(DualCompletedPoint { z, big_z })
    }

    pub fn n(&self) -> usize {
        self.z.len() + 1
    }

    /// Largest coordinate-wise distance to another point.
    pub fn distance(&self, other: &DualCompletedPoint) -> f64 {
        let mut d = (self.big_z - other.big_z).norm();
        for (a, b) in self.z.iter().zip(&other.z) {
            d = d.max((a - b).norm());
        }
        d
    }
}

/// Center-of-mass-reduced model I: cotangent bundle of the open simplex
/// `delta_j > 0`, `sum delta_j < 2*pi`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CenterMassPointI {
    pub delta: Vec<f64>,
    pub gamma: Vec<f64>,
}

impl CenterMassPointI {
    pub fn new(delta: Vec<f64>, gamma: Vec<f64>) -> Result<Self> {
        check_len("gamma length", delta.len(), gamma.len())?;
        check_simplex(&delta)?;
        Ok(CenterMassPointI { delta, gamma })
    }

    pub fn n(&self) -> usize {
        self.delta.len() + 1
    }
}

/// Center-of-mass-reduced model II: the flat space of `n-1` complex
/// coordinates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CenterMassPointII {
    #[serde(with = "serde_complex::c64_vec")]
    pub zeta: Vec<Complex64>,
}

impl CenterMassPointII {
    pub fn new(zeta: Vec<Complex64>) -> Self {
        CenterMassPointII { zeta }
    }

    pub fn n(&self) -> usize {
        self.zeta.len() + 1
    }
}

/// Relative (center-of-mass-reduced) factor of a covering point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum RelPoint {
    #[serde(rename = "modelI")]
    I(CenterMassPointI),
    #[serde(rename = "modelII")]
    II(CenterMassPointII),
}

impl RelPoint {
    pub fn n(&self) -> usize {
        match self {
            RelPoint::I(p) => p.n(),
            RelPoint::II(p) => p.n(),
        }
    }
}

/// Covering point with a circle-valued center of mass: `(zeta0, v0)` on
/// `T*U(1)` times a relative factor.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoveringPoint1 {
    #[serde(with = "serde_complex::c64")]
    pub zeta0: Complex64,
    pub v0: f64,
    pub rel: RelPoint,
}

impl CoveringPoint1 {
    /// Validates `|zeta0| = 1` (then renormalizes exactly).
    pub fn new(zeta0: Complex64, v0: f64, rel: RelPoint) -> Result<Self> {
        let m = zeta0.norm();
        if (m - 1.0).abs() > 1e-8 {
            return Err(CoreError::GaugeFixFailure {
                context: "covering coordinate zeta0 must be unit modulus",
                residual: (m - 1.0).abs(),
                tol: 1e-8,
            });
        }
        Ok(CoveringPoint1 {
            zeta0: zeta0 / m,
            v0,
            rel,
        })
    }
}

/// Covering point with a line-valued center of mass: `(u0, w0)` on `T*R`
/// times a relative factor.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoveringPoint2 {
    pub u0: f64,
    pub w0: f64,
    pub rel: RelPoint,
}

/// The two charts of the two-chart atlas on the quotient configuration
/// space.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Chart {
    /// Window `(-eps, pi + eps)` for the fiber angle.
    Main,
    /// Window `(-pi - eps, eps)`.
    Prime,
}

/// Point of the cotangent bundle of the quotient configuration space in the
/// two-chart atlas: a fiber angle `phi` with conjugate momentum plus simplex
/// coordinates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChartPointQ {
    pub chart: Chart,
    pub phi: f64,
    pub pphi: f64,
    pub delta: Vec<f64>,
    pub gamma: Vec<f64>,
}

impl ChartPointQ {
    pub fn new(chart: Chart, phi: f64, pphi: f64, delta: Vec<f64>, gamma: Vec<f64>) -> Result<Self> {
        check_len("gamma length", delta.len(), gamma.len())?;
        check_simplex(&delta)?;
        let eps = tol::ATLAS_EPSILON;
        let in_window = match chart {
            Chart::Main => phi > -eps && phi < PI + eps,
            Chart::Prime => phi > -PI - eps && phi < eps,
        };
        if !in_window {
            return Err(CoreError::NotOnOverlap { phi });
        }
        Ok(ChartPointQ {
            chart,
            phi,
            pphi,
            delta,
            gamma,
        })
    }

    pub fn n(&self) -> usize {
        self.delta.len() + 1
    }
}

fn check_simplex(delta: &[f64]) -> Result<()> {
    if delta.is_empty() {
        return Err(CoreError::NotInSimplex {
            reason: "need at least one simplex coordinate",
        });
    }
    if delta.iter().any(|&d| d <= tol::SIMPLEX_MARGIN) {
        return Err(CoreError::NotInSimplex {
            reason: "delta_j must be strictly positive",
        });
    }
    if delta.iter().sum::<f64>() >= 2.0 * PI - tol::SIMPLEX_MARGIN {
        return Err(CoreError::NotInSimplex {
            reason: "sum of delta_j must stay below 2*pi",
        });
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Canonicalization
// ---------------------------------------------------------------------------

/// Bring `(q, p)` to the canonical fundamental-domain representative:
/// reduce each angle to `(-pi, pi]`, then sort strictly descending with the
/// momenta permuted identically.
///
/// Errors with [`CoreError::CoincidentAngles`] when two angles agree mod
/// `2*pi` within tolerance — such configurations have no ordered
/// representative.
pub fn canonicalize_sutherland(q: &[f64], p: &[f64]) -> Result<SutherlandPoint> {
    check_len("momentum length", q.len(), p.len())?;
    let wrapped: Vec<f64> = q.iter().map(|&a| principal_angle(a)).collect();
    for i in 0..wrapped.len() {
        for j in (i + 1)..wrapped.len() {
            if angular_distance(wrapped[i], wrapped[j]) < tol::POINT_EQ {
                return Err(CoreError::CoincidentAngles {
                    i,
                    j,
                    tol: tol::POINT_EQ,
                });
            }
        }
    }
    let mut order: Vec<usize> = (0..wrapped.len()).collect();
    order.sort_by(|&i, &j| wrapped[j].partial_cmp(&wrapped[i]).unwrap());
    Ok(SutherlandPoint {
        q: order.iter().map(|&i| wrapped[i]).collect(),
        p: order.iter().map(|&i| p[i]).collect(),
    })
}

// ---------------------------------------------------------------------------
// Line coordinates: separating the center of mass
// ---------------------------------------------------------------------------

/// Split ordered line coordinates `(u, w)` into center of mass and relative
/// parts:
///
/// `u0 = mean(u)`, `w0 = sum(w)`, `delta_j = u_j - u_{j+1}`,
/// `gamma_j = sum_{k<=j} w_k - (j/n) sum(w)`.
///
/// Requires `u_1 > ... > u_n` with `u_1 - u_n < 2*pi`.
pub fn line_to_separated(u: &[f64], w: &[f64]) -> Result<(f64, f64, Vec<f64>, Vec<f64>)> {
    check_len("momentum length", u.len(), w.len())?;
    let n = u.len();
    if n < 2 {
        return Err(CoreError::NotInC {
            reason: "need at least two coordinates",
        });
    }
    if u.windows(2).any(|v| v[0] <= v[1]) {
        return Err(CoreError::NotInC {
            reason: "coordinates must be strictly decreasing",
        });
    }
    if u[0] - u[n - 1] >= 2.0 * PI {
        return Err(CoreError::NotInC {
            reason: "width must stay below 2*pi",
        });
    }
    let u0 = u.iter().sum::<f64>() / n as f64;
    let w0: f64 = w.iter().sum();
    let delta: Vec<f64> = (0..n - 1).map(|j| u[j] - u[j + 1]).collect();
    let mut acc = 0.0;
    let gamma: Vec<f64> = (0..n - 1)
        .map(|j| {
            acc += w[j];
            acc - (j + 1) as f64 / n as f64 * w0
        })
        .collect();
    Ok((u0, w0, delta, gamma))
}

/// Inverse of [`line_to_separated`]:
///
/// `u_n = u0 - (1/n) sum_k k*delta_k`, `u_j = u_n + sum_{k>=j} delta_k`,
/// `w_m = gamma_m - gamma_{m-1} + w0/n` (with `gamma_0 = gamma_n = 0`).
pub fn separated_to_line(
    u0: f64,
    w0: f64,
    delta: &[f64],
    gamma: &[f64],
) -> Result<(Vec<f64>, Vec<f64>)> {
    check_len("gamma length", delta.len(), gamma.len())?;
    check_simplex(delta)?;
    let n = delta.len() + 1;
    let mut u = vec![0.0; n];
    let weighted: f64 = delta.iter().enumerate().map(|(k, d)| (k + 1) as f64 * d).sum();
    u[n - 1] = u0 - weighted / n as f64;
    for j in (0..n - 1).rev() {
        u[j] = u[j + 1] + delta[j];
    }
    let w: Vec<f64> = (0..n)
        .map(|m| {
            let prev = if m == 0 { 0.0 } else { gamma[m - 1] };
            let next = if m == n - 1 { 0.0 } else { gamma[m] };
            next - prev + w0 / n as f64
        })
        .collect();
    Ok((u, w))
}

/// The momenta reconstruction half of [`separated_to_line`], usable on its
/// own: `w_m = gamma_m - gamma_{m-1} + w0/n`.
pub fn momenta_from_separated(w0: f64, gamma: &[f64]) -> Vec<f64> {
    let n = gamma.len() + 1;
    (0..n)
        .map(|m| {
            let prev = if m == 0 { 0.0 } else { gamma[m - 1] };
            let next = if m == n - 1 { 0.0 } else { gamma[m] };
            next - prev + w0 / n as f64
        })
        .collect()
}

/// Inverse of [`momenta_from_separated`]: `(w0, gamma)` from momenta.
pub fn separate_momenta(w: &[f64]) -> (f64, Vec<f64>) {
    let n = w.len();
    let w0: f64 = w.iter().sum();
    let mut acc = 0.0;
    let gamma = (0..n - 1)
        .map(|j| {
            acc += w[j];
            acc - (j + 1) as f64 / n as f64 * w0
        })
        .collect();
    (w0, gamma)
}

/// The sl(n) Cartan matrix `A_{jk} = 2 delta_{jk} - delta_{|j-k|,1}`
/// appearing in the kinetic-energy split.
pub fn cartan_matrix(n: usize) -> Vec<Vec<f64>> {
    (0..n - 1)
        .map(|j| {
            (0..n - 1)
                .map(|k| {
                    if j == k {
                        2.0
                    } else if j.abs_diff(k) == 1 {
                        -1.0
                    } else {
                        0.0
                    }
                })
                .collect()
        })
        .collect()
}

// ---------------------------------------------------------------------------
// Simplex <-> alcove
// ---------------------------------------------------------------------------

/// Embed an open-simplex point into the Weyl alcove:
///
/// `beta_n = -(1/n) sum_k k*delta_k`, `beta_j = beta_n + sum_{k>=j} delta_k`.
///
/// The image satisfies `beta_1 > ... > beta_n`, `beta_1 - beta_n < 2*pi`,
/// `sum beta = 0`.
pub fn alcove_embed(delta: &[f64]) -> Result<Vec<f64>> {
    check_simplex(delta)?;
    let n = delta.len() + 1;
    let weighted: f64 = delta.iter().enumerate().map(|(k, d)| (k + 1) as f64 * d).sum();
    let mut beta = vec![0.0; n];
    beta[n - 1] = -weighted / n as f64;
    for j in (0..n - 1).rev() {
        beta[j] = beta[j + 1] + delta[j];
    }
    Ok(beta)
}

/// Inverse of [`alcove_embed`]: consecutive differences.
pub fn alcove_to_simplex(beta: &[f64]) -> Vec<f64> {
    beta.windows(2).map(|w| w[0] - w[1]).collect()
}

// ---------------------------------------------------------------------------
// K(n) fundamental domain <-> (zeta0, delta)
// ---------------------------------------------------------------------------

/// Split a fundamental-domain configuration into the center-of-mass phase
/// and simplex coordinates: `zeta0 = exp(i*mean(q))`, `delta_j = q_j -
/// q_{j+1}`.
pub fn kn_split(q: &[f64]) -> Result<(Complex64, Vec<f64>)> {
    if q.windows(2).any(|v| v[0] <= v[1]) || q[0] - q[q.len() - 1] >= 2.0 * PI {
        return Err(CoreError::NotInC {
            reason: "configuration must lie in the ordered fundamental domain",
        });
    }
    let mean = q.iter().sum::<f64>() / q.len() as f64;
    let delta = q.windows(2).map(|w| w[0] - w[1]).collect();
    Ok((Complex64::from_polar(1.0, mean), delta))
}

/// Inverse of [`kn_split`] up to the overall `2*pi` branch: angles
/// `arg(zeta0) + beta(delta)`.
pub fn kn_join(zeta0: Complex64, delta: &[f64]) -> Result<Vec<f64>> {
    let beta = alcove_embed(delta)?;
    let theta0 = zeta0.arg();
    Ok(beta.into_iter().map(|b| b + theta0).collect())
}

// ---------------------------------------------------------------------------
// Cyclic relabeling and deck action
// ---------------------------------------------------------------------------

/// Cyclic relabeling of simplex/cotangent coordinates:
///
/// `delta -> (delta_2, ..., delta_{n-1}, 2*pi - sum delta)`,
/// `gamma -> (gamma_2 - gamma_1, ..., gamma_{n-1} - gamma_1, -gamma_1)`.
pub fn relabel_cyclic(delta: &[f64], gamma: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let m = delta.len();
    let mut d = Vec::with_capacity(m);
    d.extend_from_slice(&delta[1..]);
    d.push(2.0 * PI - delta.iter().sum::<f64>());
    let mut g = Vec::with_capacity(m);
    g.extend(gamma[1..].iter().map(|gj| gj - gamma[0]));
    g.push(-gamma[0]);
    (d, g)
}

/// Inverse of [`relabel_cyclic`].
pub fn relabel_cyclic_inverse(delta: &[f64], gamma: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let m = delta.len();
    let mut d = Vec::with_capacity(m);
    d.push(2.0 * PI - delta.iter().sum::<f64>());
    d.extend_from_slice(&delta[..m - 1]);
    let g1 = -gamma[m - 1];
    let mut g = Vec::with_capacity(m);
    g.push(g1);
    g.extend(gamma[..m - 1].iter().map(|gj| gj + g1));
    (d, g)
}

/// Generator of the cyclic deck action on the circle-covering coordinates
/// (base form): `zeta0 -> exp(-2*pi*i/n) * zeta0` together with the cyclic
/// relabeling of `delta`.
pub fn cyclic_deck_base(zeta0: Complex64, delta: &[f64]) -> (Complex64, Vec<f64>) {
    let n = delta.len() + 1;
    let rot = Complex64::from_polar(1.0, -2.0 * PI / n as f64);
    let (d, _) = relabel_cyclic(delta, &vec![0.0; delta.len()]);
    (rot * zeta0, d)
}

/// Cotangent lift of [`cyclic_deck_base`]: momenta `v0` unchanged, `gamma`
/// relabeled cyclically.
pub fn cyclic_deck_lifted(
    zeta0: Complex64,
    v0: f64,
    delta: &[f64],
    gamma: &[f64],
) -> (Complex64, f64, Vec<f64>, Vec<f64>) {
    let n = delta.len() + 1;
    let rot = Complex64::from_polar(1.0, -2.0 * PI / n as f64);
    let (d, g) = relabel_cyclic(delta, gamma);
    (rot * zeta0, v0, d, g)
}

// ---------------------------------------------------------------------------
// Two-chart atlas transition
// ---------------------------------------------------------------------------

/// Transition between the two atlas charts on the overlap.
///
/// On the window around `phi = 0` the two coordinate systems coincide; on
/// the window around `phi = pi` (equivalently `phi' = -pi`) the transition
/// shifts the fiber angle by `2*pi` and applies the cyclic relabeling to the
/// simplex/cotangent coordinates.  Applying the transition twice returns the
/// original point.
pub fn chart_transition(pt: &ChartPointQ) -> Result<ChartPointQ> {
    let eps = tol::ATLAS_EPSILON;
    match pt.chart {
        Chart::Main => {
            if pt.phi > -eps && pt.phi < eps {
                ChartPointQ::new(
                    Chart::Prime,
                    pt.phi,
                    pt.pphi,
                    pt.delta.clone(),
                    pt.gamma.clone(),
                )
            } else if pt.phi > PI - eps && pt.phi < PI + eps {
                let (d, g) = relabel_cyclic(&pt.delta, &pt.gamma);
                ChartPointQ::new(Chart::Prime, pt.phi - 2.0 * PI, pt.pphi, d, g)
            } else {
                Err(CoreError::NotOnOverlap { phi: pt.phi })
            }
        }
        Chart::Prime => {
            if pt.phi > -eps && pt.phi < eps {
                ChartPointQ::new(
                    Chart::Main,
                    pt.phi,
                    pt.pphi,
                    pt.delta.clone(),
                    pt.gamma.clone(),
                )
            } else if pt.phi > -PI - eps && pt.phi < -PI + eps {
                let (d, g) = relabel_cyclic_inverse(&pt.delta, &pt.gamma);
                ChartPointQ::new(Chart::Main, pt.phi + 2.0 * PI, pt.pphi, d, g)
            } else {
                Err(CoreError::NotOnOverlap { phi: pt.phi })
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn canonicalize_sorts_and_permutes_momenta() {
        let pt = canonicalize_sutherland(&[0.0, PI / 2.0], &[1.0, 2.0]).unwrap();
        assert_eq!(pt.q, vec![PI / 2.0, 0.0]);
        assert_eq!(pt.p, vec![2.0, 1.0]);
    }

    #[test]
    fn canonicalize_keeps_canonical_input() {
        let pt = canonicalize_sutherland(&[PI / 4.0, -PI / 4.0], &[0.0, 0.0]).unwrap();
        assert_eq!(pt.q, vec![PI / 4.0, -PI / 4.0]);
    }

    #[test]
    fn canonicalize_reduces_mod_two_pi() {
        let pt = canonicalize_sutherland(&[3.0 * PI, 0.0], &[1.0, 0.0]).unwrap();
        assert_relative_eq!(pt.q[0], PI, max_relative = 1e-15);
        assert_eq!(pt.q[1], 0.0);
        assert_eq!(pt.p, vec![1.0, 0.0]);
    }

    #[test]
    fn canonicalize_is_idempotent() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..50 {
            let q: Vec<f64> = (0..4).map(|_| rng.gen_range(-10.0..10.0)).collect();
            let p: Vec<f64> = (0..4).map(|_| rng.gen_range(-2.0..2.0)).collect();
            if let Ok(a) = canonicalize_sutherland(&q, &p) {
                let b = canonicalize_sutherland(&a.q, &a.p).unwrap();
                assert_eq!(a, b);
            }
        }
    }

    #[test]
    fn canonicalize_rejects_coincident_angles() {
        assert!(matches!(
            canonicalize_sutherland(&[1.0, 1.0 + 2.0 * PI], &[0.0, 0.0]),
            Err(CoreError::CoincidentAngles { .. })
        ));
    }

    #[test]
    fn line_separation_worked_example() {
        let (u0, w0, delta, gamma) = line_to_separated(&[1.0, 0.0], &[1.0, -1.0]).unwrap();
        assert_relative_eq!(u0, 0.5);
        assert_relative_eq!(w0, 0.0);
        assert_eq!(delta, vec![1.0]);
        assert_eq!(gamma, vec![1.0]);
    }

    #[test]
    fn line_separation_zero_momenta() {
        let (_, w0, _, gamma) = line_to_separated(&[0.5, 0.1, -0.4], &[0.0; 3]).unwrap();
        assert_eq!(w0, 0.0);
        assert!(gamma.iter().all(|&g| g == 0.0));
    }

    #[test]
    fn line_separation_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for n in 2..=6 {
            for _ in 0..40 {
                let mut u: Vec<f64> = (0..n).map(|_| rng.gen_range(-3.0..3.0)).collect();
                u.sort_by(|a, b| b.partial_cmp(a).unwrap());
                if u[0] - u[n - 1] >= 2.0 * PI - 1e-3 {
                    continue;
                }
                if u.windows(2).any(|w| w[0] - w[1] < 1e-6) {
                    continue;
                }
                let w: Vec<f64> = (0..n).map(|_| rng.gen_range(-2.0..2.0)).collect();
                let (u0, w0, delta, gamma) = line_to_separated(&u, &w).unwrap();
                let (u2, w2) = separated_to_line(u0, w0, &delta, &gamma).unwrap();
                for (a, b) in u.iter().zip(&u2) {
                    assert!((a - b).abs() < 1e-12);
                }
                for (a, b) in w.iter().zip(&w2) {
                    assert!((a - b).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn kinetic_energy_splits_against_cartan_matrix() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for n in 2..=6 {
            let u: Vec<f64> = (0..n).map(|j| 1.0 - 0.3 * j as f64).collect();
            let w: Vec<f64> = (0..n).map(|_| rng.gen_range(-2.0..2.0)).collect();
            let (_, w0, _, gamma) = line_to_separated(&u, &w).unwrap();
            let lhs: f64 = 0.5 * w.iter().map(|v| v * v).sum::<f64>();
            let a = cartan_matrix(n);
            let mut quad = 0.0;
            for j in 0..n - 1 {
                for k in 0..n - 1 {
                    quad += gamma[j] * a[j][k] * gamma[k];
                }
            }
            let rhs = w0 * w0 / (2.0 * n as f64) + 0.5 * quad;
            assert_relative_eq!(lhs, rhs, max_relative = 1e-12);
        }
    }

    #[test]
    fn alcove_embedding_worked_examples() {
        let beta = alcove_embed(&[PI]).unwrap();
        assert_relative_eq!(beta[0], PI / 2.0);
        assert_relative_eq!(beta[1], -PI / 2.0);

        let beta = alcove_embed(&[2.0 * PI / 3.0, 2.0 * PI / 3.0]).unwrap();
        assert_relative_eq!(beta[0], 2.0 * PI / 3.0, max_relative = 1e-14);
        assert_relative_eq!(beta[1], 0.0, epsilon = 1e-15);
        assert_relative_eq!(beta[2], -2.0 * PI / 3.0, max_relative = 1e-14);
    }

    #[test]
    fn alcove_embedding_is_traceless_and_ordered() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for n in 2..=6 {
            for _ in 0..30 {
                let raw: Vec<f64> = (0..n - 1).map(|_| rng.gen_range(0.05..1.0)).collect();
                let scale = rng.gen_range(0.1..0.95) * 2.0 * PI / raw.iter().sum::<f64>();
                let delta: Vec<f64> = raw.iter().map(|d| d * scale).collect();
                let beta = alcove_embed(&delta).unwrap();
                assert!(beta.iter().sum::<f64>().abs() < 1e-12);
                assert!(beta.windows(2).all(|w| w[0] > w[1]));
                assert!(beta[0] - beta[n - 1] < 2.0 * PI);
                let back = alcove_to_simplex(&beta);
                for (a, b) in delta.iter().zip(&back) {
                    assert!((a - b).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn alcove_rejects_boundary() {
        assert!(matches!(
            alcove_embed(&[0.0, 1.0]),
            Err(CoreError::NotInSimplex { .. })
        ));
        assert!(matches!(
            alcove_embed(&[PI, PI]),
            Err(CoreError::NotInSimplex { .. })
        ));
    }

    #[test]
    fn chart_transition_identity_near_zero() {
        let pt = ChartPointQ::new(Chart::Main, 0.05, 0.7, vec![1.0, 2.0], vec![0.3, -0.4]).unwrap();
        let out = chart_transition(&pt).unwrap();
        assert_eq!(out.chart, Chart::Prime);
        assert_eq!(out.phi, pt.phi);
        assert_eq!(out.delta, pt.delta);
        assert_eq!(out.gamma, pt.gamma);
    }

    #[test]
    fn chart_transition_n2_window_formula() {
        let pt = ChartPointQ::new(Chart::Main, PI - 0.05, 0.7, vec![1.3], vec![0.25]).unwrap();
        let out = chart_transition(&pt).unwrap();
        assert_eq!(out.chart, Chart::Prime);
        assert_relative_eq!(out.phi, pt.phi - 2.0 * PI);
        assert_eq!(out.pphi, pt.pphi);
        assert_relative_eq!(out.delta[0], 2.0 * PI - 1.3);
        assert_relative_eq!(out.gamma[0], -0.25);
    }

    #[test]
    fn chart_transition_round_trips() {
        for n in 2..=5 {
            let delta = vec![0.8; n - 1];
            let gamma: Vec<f64> = (0..n - 1).map(|j| 0.1 * j as f64 - 0.2).collect();
            for phi in [0.03, PI - 0.04] {
                let pt = ChartPointQ::new(Chart::Main, phi, -0.5, delta.clone(), gamma.clone())
                    .unwrap();
                let there = chart_transition(&pt).unwrap();
                let back = chart_transition(&there).unwrap();
                assert_eq!(back.chart, Chart::Main);
                assert!((back.phi - pt.phi).abs() < 1e-12);
                for (a, b) in back.delta.iter().zip(&pt.delta) {
                    assert!((a - b).abs() < 1e-12);
                }
                for (a, b) in back.gamma.iter().zip(&pt.gamma) {
                    assert!((a - b).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn chart_transition_rejects_off_overlap() {
        let pt = ChartPointQ::new(Chart::Main, PI / 2.0, 0.0, vec![1.0], vec![0.0]).unwrap();
        assert!(matches!(
            chart_transition(&pt),
            Err(CoreError::NotOnOverlap { .. })
        ));
    }

    #[test]
    fn cyclic_deck_n2_flips() {
        let (z, v, d, g) = cyclic_deck_lifted(Complex64::new(1.0, 0.0), 0.4, &[1.1], &[0.6]);
        assert!((z - Complex64::new(-1.0, 0.0)).norm() < 1e-15);
        assert_eq!(v, 0.4);
        assert_relative_eq!(d[0], 2.0 * PI - 1.1);
        assert_relative_eq!(g[0], -0.6);
    }

    #[test]
    fn cyclic_deck_n3_base_formula() {
        let (_, d) = cyclic_deck_base(Complex64::new(1.0, 0.0), &[0.7, 1.2]);
        assert_relative_eq!(d[0], 1.2);
        assert_relative_eq!(d[1], 2.0 * PI - 0.7 - 1.2);
    }

    #[test]
    fn cyclic_deck_has_order_n() {
        for n in 2..=5 {
            let delta: Vec<f64> = (0..n - 1).map(|j| 0.5 + 0.1 * j as f64).collect();
            let gamma: Vec<f64> = (0..n - 1).map(|j| 0.2 * j as f64 - 0.3).collect();
            let mut z = Complex64::new(0.6, 0.8);
            let mut v = 1.5;
            let mut d = delta.clone();
            let mut g = gamma.clone();
            for _ in 0..n {
                let out = cyclic_deck_lifted(z, v, &d, &g);
                z = out.0;
                v = out.1;
                d = out.2;
                g = out.3;
            }
            assert!((z - Complex64::new(0.6, 0.8)).norm() < 1e-12);
            assert_eq!(v, 1.5);
            for (a, b) in d.iter().zip(&delta) {
                assert!((a - b).abs() < 1e-12);
            }
            for (a, b) in g.iter().zip(&gamma) {
                assert!((a - b).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn kn_split_join_round_trip() {
        let q = vec![1.2, 0.3, -0.9];
        let (zeta0, delta) = kn_split(&q).unwrap();
        let back = kn_join(zeta0, &delta).unwrap();
        for (a, b) in q.iter().zip(&back) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn dual_interior_point_validates_chamber() {
        let c = Coupling::new(2, 1.0).unwrap();
        assert!(DualInteriorPoint::new(&[0.0, 0.0], &[2.0, 0.0], &c).is_ok());
        assert!(matches!(
            DualInteriorPoint::new(&[0.0, 0.0], &[0.5, 0.0], &c),
            Err(CoreError::NotInChamber { .. })
        ));
    }

    #[test]
    fn coupling_rejects_degenerate_parameters() {
        assert!(Coupling::new(1, 1.0).is_err());
        assert!(Coupling::new(3, 0.0).is_err());
        assert!(Coupling::new(3, f64::NAN).is_err());
    }

    #[test]
    fn sutherland_equality_is_representation_independent() {
        let a = SutherlandPoint {
            q: vec![PI / 2.0, 0.0],
            p: vec![1.0, 2.0],
        };
        let b = SutherlandPoint {
            q: vec![0.0, PI / 2.0 + 2.0 * PI],
            p: vec![2.0, 1.0],
        };
        assert!(a.approx_eq(&b, 1e-9));
    }
}
