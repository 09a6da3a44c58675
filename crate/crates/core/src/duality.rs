//! The duality symplectomorphisms between the trigonometric model and its
//! rational relativistic dual, together with the chart map into completed
//! dual coordinates.
//!
//! The maps realized here:
//!
//! - [`zx_map`] / [`zx_invert`]: the chart change between interior dual
//!   coordinates `(qhat, phat)` and the completed coordinates `(z, Z)`.
//! - [`dual_transform`] (and its inverse [`dual_invert`]): the duality map
//!   carrying a position-side point to completed dual coordinates by
//!   diagonalizing the `J`-leg of its lift, gauge-fixing the residual torus
//!   freedom, and reading off `(z, Z)`.
//! - [`project_to_dual`] / [`project_to_sutherland`]: the same two
//!   extractions starting from an arbitrary on-shell triple instead of a
//!   slice lift.
//! - [`su_dual_transform`] / [`su_dual_invert`]: the center-of-mass-reduced
//!   (traceless) analogues.
//!
//! Gauge fixing sends back a [`GaugeFixReport`] so callers can observe the
//! conditioning of the phase extraction.  Interior points use the
//! chamber-matrix route (diagonalize, split off the known orthogonal factor,
//! verify the remainder is a torus element); points near a chamber wall
//! switch to a wall-safe route that pins phases through the subdiagonal of
//! the completed slice matrix, whose entries stay bounded away from zero on
//! the whole space.

use num_complex::Complex64;

use crate::error::{CoreError, Result};
use crate::matrix::{
    diagonality_residual, eig_hermitian, eig_unitary, fro_norm, principal_angle, CMatrix, CVector,
    I, ONE,
};
use crate::phase::{
    canonicalize_sutherland, CenterMassPointI, CenterMassPointII, Coupling, DualCompletedPoint,
    DualInteriorPoint, SutherlandPoint,
};
use crate::reduction::{
    chamber_check, completed_slice, eval_eta, eval_v, moment_residual, parity_conjugate,
    su_moment_residual, su_parity_conjugate, su_slice_i, su_slice_ii, sutherland_slice,
    LevelPoint, SULevelPoint,
};
use crate::tol;
use std::f64::consts::PI;

/// Diagnostics from the residual-gauge fixing inside the duality maps.
#[derive(Debug, Clone)]
pub struct GaugeFixReport {
    /// The diagonal torus phases used to reach the slice representative.
    pub torus_phases: Vec<Complex64>,
    /// Interior route: relative off-diagonal mass of the recovered torus
    /// matrix.  Wall route: residual of the candidate against the completed
    /// slice at the extracted coordinates.
    pub diagonality_residual: f64,
    /// Smallest chamber-vector component encountered; small values mean the
    /// interior phase extraction is ill-conditioned (and the wall-safe route
    /// is used instead).
    pub conditioning: f64,
}

// ---------------------------------------------------------------------------
// Chart map (qhat, phat) <-> (z, Z)
// ---------------------------------------------------------------------------

/// The parity mirror on dual charts: `qhat'_j = -qhat_{n+1-j}`,
/// `phat'_j = -phat_{n+1-j}`.  An involution; maps the chamber at coupling
/// `x` onto the chamber at `-x`.
pub fn mirror_dual_chart(qhat: &[f64], phat: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let n = qhat.len();
    (
        (0..n).map(|j| -qhat[n - 1 - j]).collect(),
        (0..n).map(|j| -phat[n - 1 - j]).collect(),
    )
}

/// [`zx_map`] on raw chart components, accepting the closed chamber; gaps
/// saturated at `|x|` produce `z_j = 0`.
pub fn zx_map_parts(qhat: &[f64], phat: &[f64], c: &Coupling) -> Result<DualCompletedPoint> {
    chamber_check(phat, c)?;
    if c.x < 0.0 {
        let (mq, mp) = mirror_dual_chart(qhat, phat);
        return zx_map_parts(&mq, &mp, &Coupling::new(c.n, -c.x)?);
    }
    let n = c.n;
    let mut z = Vec::with_capacity(n - 1);
    for j in 0..n - 1 {
        let radicand = (phat[j] - phat[j + 1] - c.x).max(0.0);
        let phase: f64 = -qhat[j + 1..n].iter().sum::<f64>();
        z.push(Complex64::from_polar(radicand.sqrt(), phase));
    }
    let total: f64 = qhat.iter().sum();
    let big_z = Complex64::from_polar((-phat[0]).exp(), -total);
    DualCompletedPoint::new(z, big_z)
}

/// The chart map from interior dual coordinates to completed coordinates:
/// `z_j = (phat_j - phat_{j+1} - x)^{1/2} exp(-i sum_{k>j} qhat_k)`,
/// `Z = exp(-phat_1) exp(-i sum_k qhat_k)` (negative couplings go through
/// the [`mirror_dual_chart`] parity first).
pub fn zx_map(pt: &DualInteriorPoint, c: &Coupling) -> Result<DualCompletedPoint> {
    zx_map_parts(&pt.qhat, &pt.phat, c)
}

/// Inverse chart map.  Actions come from `|Z|` and the moduli `|z_j|`
/// (gap law `phat_j - phat_{j+1} = x + |z_j|^2`); angles unwind from the
/// phases by back-substitution anchored at the last component.  Requires all
/// `|z_j|` above the boundary tolerance, else the angles are not determined.
pub fn zx_invert(pt: &DualCompletedPoint, c: &Coupling) -> Result<DualInteriorPoint> {
    if pt.n() != c.n {
        return Err(CoreError::DimensionMismatch {
            context: "completed point size",
            expected: c.n,
            got: pt.n(),
        });
    }
    if c.x < 0.0 {
        let inner = zx_invert(pt, &Coupling::new(c.n, -c.x)?)?;
        let (mq, mp) = mirror_dual_chart(&inner.qhat, &inner.phat);
        return DualInteriorPoint::new(&mq, &mp, c);
    }
    let n = c.n;
    for (j, zj) in pt.z.iter().enumerate() {
        if zj.norm() <= tol::BOUNDARY {
            return Err(CoreError::OnBoundary {
                index: j,
                magnitude: zj.norm(),
            });
        }
    }
    let mut phat = Vec::with_capacity(n);
    phat.push(-pt.big_z.norm().ln());
    for j in 0..n - 1 {
        let prev = *phat.last().unwrap();
        phat.push(prev - c.x - pt.z[j].norm_sqr());
    }
    let phi: Vec<f64> = pt.z.iter().map(|zj| zj.arg()).collect();
    let chi = pt.big_z.arg();
    let mut qhat = vec![0.0; n];
    qhat[n - 1] = -phi[n - 2];
    for j in (1..n - 1).rev() {
        qhat[j] = phi[j] - phi[j - 1];
    }
    qhat[0] = phi[0] - chi;
    for q in &mut qhat {
        *q = principal_angle(*q);
    }
    DualInteriorPoint::new(&qhat, &phat, c)
}

// ---------------------------------------------------------------------------
// Extraction machinery
// ---------------------------------------------------------------------------

/// The positive factors `f_j` with `V_j(z, Z) = z_j f_j`: each is
/// `gap_j^{-1/2}` times the square-root products over non-neighbor indices,
/// computable from the actions alone and bounded away from zero.  Requires
/// `x > 0`.
fn v_linear_factors(pihat: &[f64], x: f64) -> Vec<f64> {
    let n = pihat.len();
    (0..n - 1)
        .map(|j| {
            let gap = pihat[j] - pihat[j + 1];
            let product: f64 = (0..n)
                .filter(|&k| k != j && k != j + 1)
                .map(|k| {
                    let d = pihat[j] - pihat[k];
                    let r = (d - x) / d;
                    if r < 0.0 {
                        0.0
                    } else {
                        r.sqrt()
                    }
                })
                .product();
            product / gap.max(f64::MIN_POSITIVE).sqrt()
        })
        .collect()
}

/// Wall-safe extraction of completed coordinates from an on-shell triple at
/// `x > 0`, already expressed in the eigenbasis of `-iJ`:
///
/// - `pihat`: descending eigenvalues of `-iJ`;
/// - `w`: the orbit vector in that basis;
/// - `b`: the candidate slice matrix `u* g^{-1} u` (equal to the completed
///   slice matrix up to a diagonal torus conjugation `h . h*`).
///
/// The diagonal gauge `h` is pinned by making the last component of `h w`
/// real positive and each subdiagonal entry of `h b h*` real negative; both
/// families of pinning entries are bounded away from zero on the entire
/// completed space, so this extraction stays well-conditioned at the walls.
fn extract_completed_in_basis(
    pihat: &[f64],
    w: &CVector,
    b: &CMatrix,
    x: f64,
) -> Result<(DualCompletedPoint, Vec<Complex64>, f64)> {
    let n = pihat.len();
    let mut h = vec![ONE; n];
    let wn = w[n - 1];
    if wn.norm() == 0.0 {
        return Err(CoreError::GaugeFixFailure {
            context: "wall-safe extraction: last orbit-vector component vanished",
            residual: 0.0,
            tol: 0.0,
        });
    }
    h[n - 1] = wn.conj() / wn.norm();
    for i in (0..n - 1).rev() {
        let beta = b[(i, i + 1)] * h[i + 1].conj();
        if beta.norm() == 0.0 {
            return Err(CoreError::GaugeFixFailure {
                context: "wall-safe extraction: subdiagonal pinning entry vanished",
                residual: 0.0,
                tol: 0.0,
            });
        }
        h[i] = -beta.conj() / beta.norm();
    }
    let factors = v_linear_factors(pihat, x);
    let z: Vec<Complex64> = (0..n - 1).map(|j| h[j] * w[j] / factors[j]).collect();
    // The corner entry of the slice matrix carries the phase of Z against a
    // strictly positive prefactor.
    let corner = h[n - 1] * b[(n - 1, 0)] * h[0].conj();
    if corner.norm() == 0.0 {
        return Err(CoreError::GaugeFixFailure {
            context: "wall-safe extraction: corner pinning entry vanished",
            residual: 0.0,
            tol: 0.0,
        });
    }
    let big_z = Complex64::from_polar((-pihat[0]).exp(), -corner.arg());
    Ok((DualCompletedPoint::new(z, big_z)?, h, corner.norm()))
}

fn offshell_check(residual: f64) -> Result<()> {
    if residual > tol::ON_SHELL {
        return Err(CoreError::OffShell {
            residual,
            tol: tol::ON_SHELL,
        });
    }
    Ok(())
}

/// Extraction of completed dual coordinates from an arbitrary on-shell
/// triple, with gauge-fix diagnostics.
pub fn project_to_dual_with_report(
    pt: &LevelPoint,
    c: &Coupling,
) -> Result<(DualCompletedPoint, GaugeFixReport)> {
    offshell_check(moment_residual(pt, c))?;
    if c.x < 0.0 {
        return project_to_dual_with_report(&parity_conjugate(pt), &Coupling::new(c.n, -c.x)?);
    }
    let n = c.n;
    // The dual slice carries J = -i diag(phat), so the chamber variable is
    // the descending spectrum of iJ.
    let herm = &pt.j * I;
    let es = eig_hermitian(&herm, tol::DEGENERACY)?;
    let pihat = es.values.clone();
    let u = &es.vectors;
    let w = u.adjoint() * &pt.v;
    let v = eval_v(&pihat, c)?;
    let conditioning = v.iter().cloned().fold(f64::INFINITY, f64::min);

    if conditioning >= tol::NEAR_BOUNDARY_V {
        // Interior route: strip the known orthogonal factor and verify the
        // remainder is diagonal.
        let t = CMatrix::from_fn(n, n, |i, j| {
            if i == j {
                w[i] / w[i].norm()
            } else {
                Complex64::ZERO
            }
        });
        let g_fixed = t.adjoint() * (u.adjoint() * &pt.g * u) * &t;
        let eta = eval_eta(&pihat, c)?;
        let d = eta.transpose() * g_fixed.adjoint();
        let residual = diagonality_residual(&d);
        if residual > tol::DIAGONALITY {
            return Err(CoreError::GaugeFixFailure {
                context: "interior dual extraction: torus factor not diagonal",
                residual,
                tol: tol::DIAGONALITY,
            });
        }
        let qhat: Vec<f64> = (0..n).map(|k| d[(k, k)].arg()).collect();
        let phases: Vec<Complex64> = (0..n)
            .map(|k| Complex64::from_polar(1.0, qhat[k]))
            .collect();
        let out = zx_map_parts(&qhat, &pihat, c)?;
        Ok((
            out,
            GaugeFixReport {
                torus_phases: phases,
                diagonality_residual: residual,
                conditioning,
            },
        ))
    } else {
        // Wall-safe route.
        let b = u.adjoint() * pt.g.adjoint() * u;
        let (out, h, _) = extract_completed_in_basis(&pihat, &w, &b, c.x)?;
        // Certify against the completed slice at the extracted coordinates.
        let slice = completed_slice(&out, c)?;
        let theta_cand = {
            let hd = CMatrix::from_fn(n, n, |i, j| if i == j { h[i] } else { Complex64::ZERO });
            &hd * &b * hd.adjoint()
        };
        let theta = slice.g.adjoint();
        let scale = fro_norm(&theta).max(1.0);
        let mut residual = fro_norm(&(&theta_cand - &theta)) / scale;
        for k in 0..n {
            residual = residual.max((h[k] * w[k] - slice.v[k]).norm());
        }
        if residual > tol::PATTERN {
            return Err(CoreError::GaugeFixFailure {
                context: "wall-safe dual extraction: candidate does not match the slice",
                residual,
                tol: tol::PATTERN,
            });
        }
        Ok((
            out,
            GaugeFixReport {
                torus_phases: h,
                diagonality_residual: residual,
                conditioning,
            },
        ))
    }
}

/// Extraction of completed dual coordinates from an arbitrary on-shell
/// triple.
pub fn project_to_dual(pt: &LevelPoint, c: &Coupling) -> Result<DualCompletedPoint> {
    project_to_dual_with_report(pt, c).map(|(out, _)| out)
}

/// The duality map: lift a position-side point to its slice representative
/// and extract completed dual coordinates.  The actions of the output are
/// the eigenvalues of the position-side Lax matrix.
pub fn dual_transform(pt: &SutherlandPoint, c: &Coupling) -> Result<DualCompletedPoint> {
    project_to_dual(&sutherland_slice(pt, c)?, c)
}

/// [`dual_transform`] with gauge-fix diagnostics.
pub fn dual_transform_with_report(
    pt: &SutherlandPoint,
    c: &Coupling,
) -> Result<(DualCompletedPoint, GaugeFixReport)> {
    project_to_dual_with_report(&sutherland_slice(pt, c)?, c)
}

/// Extraction of a position-side point from an arbitrary on-shell triple:
/// diagonalize the unitary leg, re-phase its eigenvectors so the orbit
/// vector becomes `(1,...,1)`, read the momenta off the rotated `J`-leg,
/// validate the off-diagonal coupling pattern, and canonicalize.
pub fn project_to_sutherland(pt: &LevelPoint, c: &Coupling) -> Result<SutherlandPoint> {
    offshell_check(moment_residual(pt, c))?;
    let n = c.n;
    let es = eig_unitary(&pt.g, tol::DEGENERACY, PI)?;
    if es.degenerate {
        return Err(CoreError::DegenerateTorusSpectrum {
            min_gap: es.min_gap,
            tol: tol::DEGENERACY,
        });
    }
    let mut y = es.vectors.clone();
    let w = y.adjoint() * &pt.v;
    for k in 0..n {
        let norm = w[k].norm();
        if norm < 1e-12 {
            return Err(CoreError::PatternMismatch {
                context: "position extraction: orbit-vector component vanished",
                residual: norm,
                tol: 1e-12,
            });
        }
        let phase = w[k] / norm;
        for i in 0..n {
            y[(i, k)] *= phase;
        }
    }
    let j_new = y.adjoint() * &pt.j * &y;
    let tau = &es.values;
    let mut pattern = 0.0_f64;
    for a in 0..n {
        for b in 0..n {
            if a != b {
                let lhs = j_new[(a, b)] * (ONE - tau[b] / tau[a]);
                pattern = pattern.max((lhs - I * c.x).norm());
            }
        }
    }
    let pattern_rel = pattern / c.x.abs().max(1.0);
    if pattern_rel > tol::PATTERN {
        return Err(CoreError::PatternMismatch {
            context: "position extraction: off-diagonal coupling law violated",
            residual: pattern_rel,
            tol: tol::PATTERN,
        });
    }
    let q: Vec<f64> = es.angles(PI);
    let p: Vec<f64> = (0..n).map(|k| j_new[(k, k)].im).collect();
    canonicalize_sutherland(&q, &p)
}

/// Inverse duality map: realize the completed point as its slice triple and
/// extract the position-side coordinates.
pub fn dual_invert(pt: &DualCompletedPoint, c: &Coupling) -> Result<SutherlandPoint> {
    project_to_sutherland(&completed_slice(pt, c)?, c)
}

// ---------------------------------------------------------------------------
// Traceless (center-of-mass-reduced) duality
// ---------------------------------------------------------------------------

/// Traceless duality map: extract the flat coordinates of the dual slice
/// from the simplex-side slice triple.
pub fn su_dual_transform(pt: &CenterMassPointI, c: &Coupling) -> Result<CenterMassPointII> {
    let lp = su_slice_i(pt, c)?;
    su_project_to_flat(&lp, c)
}

/// [`su_dual_transform`] from an arbitrary on-shell traceless triple.
pub fn su_project_to_flat(pt: &SULevelPoint, c: &Coupling) -> Result<CenterMassPointII> {
    offshell_check(su_moment_residual(pt, c))?;
    if c.x < 0.0 {
        return su_project_to_flat(&su_parity_conjugate(pt), &Coupling::new(c.n, -c.x)?);
    }
    let n = c.n;
    let herm = &pt.jsu * I;
    let es = eig_hermitian(&herm, tol::DEGENERACY)?;
    let pihat = es.values.clone();
    let u = &es.vectors;
    let w = u.adjoint() * &pt.v;
    let b = u.adjoint() * pt.gamma.adjoint() * u;
    let (cand, h, _) = extract_completed_in_basis(&pihat, &w, &b, c.x)?;
    let zeta = CenterMassPointII::new(cand.z);
    // Certify against the traceless slice at the extracted coordinates.
    let slice = su_slice_ii(&zeta, c)?;
    let theta_cand = {
        let hd = CMatrix::from_fn(n, n, |i, j| if i == j { h[i] } else { Complex64::ZERO });
        &hd * &b * hd.adjoint()
    };
    let theta = slice.gamma.adjoint();
    let scale = fro_norm(&theta).max(1.0);
    let mut residual = fro_norm(&(&theta_cand - &theta)) / scale;
    for k in 0..n {
        residual = residual.max((h[k] * w[k] - slice.v[k]).norm());
    }
    if residual > tol::PATTERN {
        return Err(CoreError::GaugeFixFailure {
            context: "traceless dual extraction: candidate does not match the slice",
            residual,
            tol: tol::PATTERN,
        });
    }
    Ok(zeta)
}

/// Inverse traceless duality map: realize the flat point as its slice
/// triple, diagonalize the special-unitary leg into the alcove, and read
/// the simplex coordinates.
pub fn su_dual_invert(pt: &CenterMassPointII, c: &Coupling) -> Result<CenterMassPointI> {
    let lp = su_slice_ii(pt, c)?;
    su_project_to_simplex(&lp, c)
}

/// [`su_dual_invert`] from an arbitrary on-shell traceless triple.
pub fn su_project_to_simplex(pt: &SULevelPoint, c: &Coupling) -> Result<CenterMassPointI> {
    offshell_check(su_moment_residual(pt, c))?;
    let n = c.n;
    let es = eig_unitary(&pt.gamma, tol::DEGENERACY, PI)?;
    if es.degenerate {
        return Err(CoreError::DegenerateTorusSpectrum {
            min_gap: es.min_gap,
            tol: tol::DEGENERACY,
        });
    }
    let mut y = es.vectors.clone();
    let w = y.adjoint() * &pt.v;
    for k in 0..n {
        let norm = w[k].norm();
        if norm < 1e-12 {
            return Err(CoreError::PatternMismatch {
                context: "simplex extraction: orbit-vector component vanished",
                residual: norm,
                tol: 1e-12,
            });
        }
        let phase = w[k] / norm;
        for i in 0..n {
            y[(i, k)] *= phase;
        }
    }
    // Unit-determinant leg: the angle sum is a multiple of 2*pi.  Normalize
    // to the zero-sum alcove representative by cyclically moving the top
    // angle down one full turn (or up from the bottom), keeping each angle
    // paired with its eigenvector.
    let mut entries: Vec<(f64, usize)> = es
        .angles(PI)
        .into_iter()
        .enumerate()
        .map(|(k, a)| (a, k))
        .collect();
    let total: f64 = entries.iter().map(|e| e.0).sum();
    let mut moves = (total / (2.0 * PI)).round() as i64;
    while moves > 0 {
        let top = entries.remove(0);
        entries.push((top.0 - 2.0 * PI, top.1));
        moves -= 1;
    }
    while moves < 0 {
        let bottom = entries.pop().unwrap();
        entries.insert(0, (bottom.0 + 2.0 * PI, bottom.1));
        moves += 1;
    }
    let beta: Vec<f64> = entries.iter().map(|e| e.0).collect();
    let y2 = CMatrix::from_fn(n, n, |i, k| y[(i, entries[k].1)]);
    let tau: Vec<Complex64> = beta.iter().map(|&b| Complex64::from_polar(1.0, b)).collect();

    let j_new = y2.adjoint() * &pt.jsu * &y2;
    let mut pattern = 0.0_f64;
    for a in 0..n {
        for b in 0..n {
            if a != b {
                let lhs = j_new[(a, b)] * (ONE - tau[b] / tau[a]);
                pattern = pattern.max((lhs - I * c.x).norm());
            }
        }
    }
    let pattern_rel = pattern / c.x.abs().max(1.0);
    if pattern_rel > tol::PATTERN {
        return Err(CoreError::PatternMismatch {
            context: "simplex extraction: off-diagonal coupling law violated",
            residual: pattern_rel,
            tol: tol::PATTERN,
        });
    }
    let delta: Vec<f64> = beta.windows(2).map(|w| w[0] - w[1]).collect();
    let mut acc = 0.0;
    let gamma: Vec<f64> = (0..n - 1)
        .map(|k| {
            acc += j_new[(k, k)].im;
            acc
        })
        .collect();
    CenterMassPointI::new(delta, gamma)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::{exp_i_hermitian, re};
    use crate::reduction::{dual_slice_interior, gauge_act, sutherland_lax};
    use approx::assert_relative_eq;
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn random_interior(rng: &mut ChaCha8Rng, n: usize, c: &Coupling) -> DualInteriorPoint {
        let mut phat = vec![rng.gen_range(-1.0..1.0)];
        for _ in 1..n {
            let gap = c.x.abs() * (1.0 + rng.gen_range(0.1..2.0));
            phat.push(phat.last().unwrap() - gap);
        }
        let qhat: Vec<f64> = (0..n).map(|_| rng.gen_range(-PI..PI)).collect();
        DualInteriorPoint::new(&qhat, &phat, c).unwrap()
    }

    fn random_canonical(rng: &mut ChaCha8Rng, n: usize) -> SutherlandPoint {
        loop {
            let q: Vec<f64> = (0..n).map(|_| rng.gen_range(-PI..PI)).collect();
            let p: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.5..1.5)).collect();
            if let Ok(pt) = canonicalize_sutherland(&q, &p) {
                if pt.q.windows(2).all(|w| w[0] - w[1] > 0.05)
                    && (pt.q[0] - pt.q[n - 1]) < 2.0 * PI - 0.05
                {
                    return pt;
                }
            }
        }
    }

    #[test]
    fn zx_map_worked_examples() {
        let c = Coupling::new(2, 1.0).unwrap();
        let pt = DualInteriorPoint::new(&[0.0, 0.0], &[2.0, 0.0], &c).unwrap();
        let out = zx_map(&pt, &c).unwrap();
        assert!((out.z[0] - ONE).norm() < 1e-14);
        assert!((out.big_z - re((-2.0_f64).exp())).norm() < 1e-14);

        // Wall-saturated gap: z vanishes, Z keeps the full phase.
        let out = zx_map_parts(&[0.3, -0.8], &[1.0, 0.0], &c).unwrap();
        assert_eq!(out.z[0].norm(), 0.0);
        let expected = Complex64::from_polar((-1.0_f64).exp(), -(0.3 - 0.8));
        assert!((out.big_z - expected).norm() < 1e-14);
    }

    #[test]
    fn zx_invert_worked_example_and_boundary_error() {
        let c = Coupling::new(2, 1.0).unwrap();
        let pt = DualCompletedPoint::new(vec![ONE], re((-2.0_f64).exp())).unwrap();
        let back = zx_invert(&pt, &c).unwrap();
        assert!(back.qhat.iter().all(|&q| q.abs() < 1e-14));
        assert_relative_eq!(back.phat[0], 2.0, max_relative = 1e-14);
        assert!(back.phat[1].abs() < 1e-14);

        let wall = DualCompletedPoint::new(vec![re(0.0)], ONE).unwrap();
        assert!(matches!(
            zx_invert(&wall, &c),
            Err(CoreError::OnBoundary { .. })
        ));
    }

    #[test]
    fn zx_round_trips() {
        let mut rng = ChaCha8Rng::seed_from_u64(101);
        for n in 2..=5 {
            for &x in &[0.7, 1.0, -1.4] {
                let c = Coupling::new(n, x).unwrap();
                for _ in 0..25 {
                    let pt = random_interior(&mut rng, n, &c);
                    let fwd = zx_map(&pt, &c).unwrap();
                    let back = zx_invert(&fwd, &c).unwrap();
                    for k in 0..n {
                        assert!(
                            crate::phase::angular_distance(back.qhat[k], pt.qhat[k]) < 1e-10
                        );
                        assert!((back.phat[k] - pt.phat[k]).abs() < 1e-10);
                    }
                    // And the reverse composition on the completed side.
                    let fwd2 = zx_map(&back, &c).unwrap();
                    assert!(fwd2.distance(&fwd) < 1e-10);
                }
            }
        }
    }

    #[test]
    fn zx_map_negative_coupling_mirror() {
        let c = Coupling::new(2, -1.0).unwrap();
        let pt = DualInteriorPoint::new(&[0.0, 0.0], &[2.0, 0.0], &c).unwrap();
        let out = zx_map(&pt, &c).unwrap();
        assert!((out.z[0] - ONE).norm() < 1e-14);
        assert!((out.big_z - ONE).norm() < 1e-14);
    }

    #[test]
    fn completed_slice_extends_interior_slice() {
        // The completed slice at zx_map(qhat, phat) must reproduce the
        // interior slice triple exactly (not just up to gauge).
        let mut rng = ChaCha8Rng::seed_from_u64(103);
        for n in 2..=5 {
            for &x in &[0.6, 1.0, 2.5, -0.9] {
                let c = Coupling::new(n, x).unwrap();
                for _ in 0..15 {
                    let pt = random_interior(&mut rng, n, &c);
                    let direct = dual_slice_interior(&pt, &c).unwrap();
                    let via_completed = completed_slice(&zx_map(&pt, &c).unwrap(), &c).unwrap();
                    assert!(
                        fro_norm(&(&direct.g - &via_completed.g)) < 1e-10,
                        "g mismatch at n={n}, x={x}"
                    );
                    assert!(fro_norm(&(&direct.j - &via_completed.j)) < 1e-10);
                    assert!((&direct.v - &via_completed.v).norm() < 1e-10);
                }
            }
        }
    }

    #[test]
    fn dual_transform_worked_example() {
        let c = Coupling::new(2, 1.0).unwrap();
        let pt = SutherlandPoint {
            q: vec![PI / 4.0, -PI / 4.0],
            p: vec![0.0, 0.0],
        };
        let out = dual_transform(&pt, &c).unwrap();
        let s = 1.0 / 2.0_f64.sqrt();
        // Actions are the Lax eigenvalues +-1/sqrt(2).
        let pihat1 = -out.big_z.norm().ln();
        let pihat2 = pihat1 - c.x - out.z[0].norm_sqr();
        assert_relative_eq!(pihat1, s, max_relative = 1e-10);
        assert_relative_eq!(pihat2, -s, max_relative = 1e-10);
    }

    #[test]
    fn dual_transform_actions_are_lax_eigenvalues() {
        let mut rng = ChaCha8Rng::seed_from_u64(107);
        for n in 2..=4 {
            for &x in &[0.8, -1.1] {
                let c = Coupling::new(n, x).unwrap();
                for _ in 0..10 {
                    let pt = random_canonical(&mut rng, n);
                    let out = dual_transform(&pt, &c).unwrap();
                    let lax = sutherland_lax(&pt, &c).unwrap();
                    let es = eig_hermitian(&lax, tol::STRUCTURAL).unwrap();
                    // Recover actions from the completed coordinates.
                    let slice = completed_slice(&out, &c).unwrap();
                    let mut actions: Vec<f64> =
                        (0..n).map(|k| (slice.j[(k, k)] * I).re).collect();
                    actions.sort_by(|a, b| b.partial_cmp(a).unwrap());
                    // The slice carries J = -i diag(actions) while the
                    // position slice carries J conjugate to i*L, so the
                    // actions are the negated, order-reversed Lax spectrum.
                    for (k, a) in actions.iter().enumerate() {
                        assert!(
                            (a + es.values[n - 1 - k]).abs() < 1e-9,
                            "action {k} off at n={n}, x={x}"
                        );
                    }
                    // Power sums match the traces of -L.
                    for k in 1..=n as i32 {
                        let power: f64 = actions.iter().map(|a| a.powi(k)).sum();
                        let tr = crate::matrix::mat_pow(&lax, k as usize).trace().re;
                        let signed = if k % 2 == 0 { tr } else { -tr };
                        assert!((power - signed).abs() < 1e-9);
                    }
                }
            }
        }
    }

    #[test]
    fn dual_transform_uniform_momentum_shift() {
        let c = Coupling::new(3, 1.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(109);
        let pt = random_canonical(&mut rng, 3);
        let shift = 0.9;
        let shifted = SutherlandPoint {
            q: pt.q.clone(),
            p: pt.p.iter().map(|p| p + shift).collect(),
        };
        let a = completed_slice(&dual_transform(&pt, &c).unwrap(), &c).unwrap();
        let b = completed_slice(&dual_transform(&shifted, &c).unwrap(), &c).unwrap();
        // J gains +i*shift*1, and the slice form J = -i diag(phat) turns that
        // into a downward action shift.
        for k in 0..3 {
            let pa = (a.j[(k, k)] * I).re;
            let pb = (b.j[(k, k)] * I).re;
            assert_relative_eq!(pb, pa - shift, max_relative = 1e-9);
        }
    }

    #[test]
    fn duality_round_trips() {
        let mut rng = ChaCha8Rng::seed_from_u64(113);
        for n in 2..=5 {
            for &x in &[1.0, -0.7] {
                let c = Coupling::new(n, x).unwrap();
                for _ in 0..12 {
                    let pt = random_canonical(&mut rng, n);
                    let fwd = dual_transform(&pt, &c).unwrap();
                    let back = dual_invert(&fwd, &c).unwrap();
                    assert!(
                        back.approx_eq(&pt, 1e-8),
                        "roundtrip failed at n={n}, x={x}: {:?} vs {:?}",
                        back,
                        pt
                    );
                }
            }
        }
    }

    #[test]
    fn dual_invert_worked_example() {
        let c = Coupling::new(2, 1.0).unwrap();
        let pt = DualCompletedPoint::new(vec![ONE], re((-2.0_f64).exp())).unwrap();
        let out = dual_invert(&pt, &c).unwrap();
        // Positions are the eigenphases +-pi/6 of the slice unitary.
        assert_relative_eq!(out.q[0], PI / 6.0, max_relative = 1e-10);
        assert_relative_eq!(out.q[1], -PI / 6.0, max_relative = 1e-10);
        // And the full roundtrip restores the completed coordinates.
        let fwd = dual_transform(&out, &c).unwrap();
        assert!(fwd.distance(&pt) < 1e-9);
    }

    #[test]
    fn projection_is_gauge_invariant() {
        let mut rng = ChaCha8Rng::seed_from_u64(127);
        for &x in &[1.0, -0.8] {
            let c = Coupling::new(3, x).unwrap();
            let pt = random_canonical(&mut rng, 3);
            let lp = sutherland_slice(&pt, &c).unwrap();
            let base = project_to_dual(&lp, &c).unwrap();
            for _ in 0..5 {
                let h = {
                    let a = CMatrix::from_fn(3, 3, |_, _| {
                        Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
                    });
                    (&a + a.adjoint()) * re(0.5)
                };
                let y = exp_i_hermitian(&h, 1.0).unwrap();
                let moved = gauge_act(&y, &lp).unwrap();
                let out = project_to_dual(&moved, &c).unwrap();
                assert!(out.distance(&base) < 1e-9);
            }
        }
    }

    #[test]
    fn projection_requires_on_shell_input() {
        let c = Coupling::new(2, 1.0).unwrap();
        let off = LevelPoint {
            g: CMatrix::identity(2, 2),
            j: crate::matrix::cdiag(&[-I * 2.0, re(0.0)]),
            v: CVector::from_vec(vec![ONE, ONE]),
        };
        assert!(matches!(
            project_to_dual(&off, &c),
            Err(CoreError::OffShell { .. })
        ));
        assert!(matches!(
            project_to_sutherland(&off, &c),
            Err(CoreError::OffShell { .. })
        ));
    }

    #[test]
    fn wall_route_recovers_small_and_zero_coordinates() {
        let c = Coupling::new(3, 1.0).unwrap();
        for &mag in &[0.0, 1e-9, 1e-7, 1e-4] {
            let z1 = Complex64::from_polar(mag, 0.8);
            let pt = DualCompletedPoint::new(
                vec![z1, Complex64::new(0.4, -0.2)],
                Complex64::from_polar(0.9, -1.3),
            )
            .unwrap();
            let lp = completed_slice(&pt, &c).unwrap();
            let (back, report) = project_to_dual_with_report(&lp, &c).unwrap();
            assert!(
                back.distance(&pt) < 1e-8,
                "wall roundtrip failed at |z1| = {mag}: distance {}",
                back.distance(&pt)
            );
            if mag < 1e-7 {
                assert!(report.conditioning < tol::NEAR_BOUNDARY_V);
            }
        }
    }

    #[test]
    fn interior_route_reports_conditioning() {
        let c = Coupling::new(2, 1.0).unwrap();
        let pt = SutherlandPoint {
            q: vec![PI / 4.0, -PI / 4.0],
            p: vec![0.0, 0.0],
        };
        let (_, report) = dual_transform_with_report(&pt, &c).unwrap();
        assert!(report.diagonality_residual < 1e-8);
        assert!(report.conditioning > 0.1);
        assert_eq!(report.torus_phases.len(), 2);
    }

    #[test]
    fn su_duality_worked_example() {
        let c = Coupling::new(2, 1.0).unwrap();
        // The flat origin pairs with the equally-spaced configuration at
        // rest: delta = (pi), gamma = (0).
        let flat = CenterMassPointII::new(vec![re(0.0)]);
        let simplex = su_dual_invert(&flat, &c).unwrap();
        assert_relative_eq!(simplex.delta[0], PI, max_relative = 1e-10);
        assert!(simplex.gamma[0].abs() < 1e-10);
        let back = su_dual_transform(&simplex, &c).unwrap();
        assert!(back.zeta[0].norm() < 1e-9);
    }

    #[test]
    fn su_duality_round_trips() {
        let mut rng = ChaCha8Rng::seed_from_u64(131);
        for n in 2..=5 {
            for &x in &[1.0, -0.9] {
                let c = Coupling::new(n, x).unwrap();
                for _ in 0..12 {
                    let zeta: Vec<Complex64> = (0..n - 1)
                        .map(|_| {
                            Complex64::new(rng.gen_range(-1.2..1.2), rng.gen_range(-1.2..1.2))
                        })
                        .collect();
                    let flat = CenterMassPointII::new(zeta);
                    let simplex = su_dual_invert(&flat, &c).unwrap();
                    let back = su_dual_transform(&simplex, &c).unwrap();
                    for k in 0..n - 1 {
                        assert!(
                            (back.zeta[k] - flat.zeta[k]).norm() < 1e-8,
                            "flat roundtrip failed at n={n}, x={x}"
                        );
                    }
                    // And the other composition order.
                    let again = su_dual_invert(&back, &c).unwrap();
                    for k in 0..n - 1 {
                        assert!((again.delta[k] - simplex.delta[k]).abs() < 1e-8);
                        assert!((again.gamma[k] - simplex.gamma[k]).abs() < 1e-8);
                    }
                }
            }
        }
    }

    #[test]
    fn su_duality_matches_spectral_invariants() {
        let mut rng = ChaCha8Rng::seed_from_u64(137);
        for n in 2..=4 {
            let c = Coupling::new(n, 1.3).unwrap();
            for _ in 0..8 {
                let raw: Vec<f64> = (0..n - 1).map(|_| rng.gen_range(0.05..1.0)).collect();
                let scale = rng.gen_range(0.2..0.9) * 2.0 * PI / raw.iter().sum::<f64>();
                let delta: Vec<f64> = raw.iter().map(|d| d * scale).collect();
                let gamma: Vec<f64> = (0..n - 1).map(|_| rng.gen_range(-1.0..1.0)).collect();
                let pt = CenterMassPointI::new(delta, gamma).unwrap();
                let out = su_dual_transform(&pt, &c).unwrap();
                let pihat = crate::reduction::pi_hat_su(&out.zeta, n, c.x);
                assert!(pihat.iter().sum::<f64>().abs() < 1e-9);
                let lp = su_slice_i(&pt, &c).unwrap();
                let herm = &lp.jsu * I;
                for k in 1..=n as i32 {
                    let power: f64 = pihat.iter().map(|a| a.powi(k)).sum();
                    let tr = crate::matrix::mat_pow(&herm, k as usize).trace().re;
                    assert!(
                        (power - tr).abs() < 1e-9,
                        "invariant {k} mismatch at n={n}"
                    );
                }
            }
        }
    }

    #[test]
    fn mirror_chart_is_an_involution() {
        let qhat = vec![0.3, -0.9, 2.0];
        let phat = vec![2.5, 0.4, -1.8];
        let (mq, mp) = mirror_dual_chart(&qhat, &phat);
        let (bq, bp) = mirror_dual_chart(&mq, &mp);
        assert_eq!(bq, qhat);
        assert_eq!(bp, phat);
    }
}
