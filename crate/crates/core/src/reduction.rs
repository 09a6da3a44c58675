//! The unreduced master phase space, its moment map and gauge action, and
//! the explicit cross-sections of the zero level set.
//!
//! The master space consists of triples `(g, J, v)` with `g` unitary, `J`
//! anti-Hermitian and `v` a complex `n`-vector of squared length `n`; the
//! vector enters through the rank-one projector matrix
//! `xi(x, v) = i x (1_n - v v*)`.  The zero level of the moment map is the
//! set where `J - g^{-1} J g + xi(x, v) = 0`.
//!
//! Four slices of the level set are constructed here, each hitting every
//! gauge orbit of its stratum exactly once:
//!
//! - [`sutherland_slice`]: parametrized by particle positions and momenta;
//!   the spectral data of its `J`-leg reproduces the trigonometric-model
//!   Lax matrix [`sutherland_lax`].
//! - [`dual_slice_interior`]: parametrized by dual angles and actions inside
//!   the thick-walled chamber, built from the chamber functions [`eval_v`],
//!   [`eval_eta`] and the torus cocycle [`eval_aleph`].
//! - [`completed_slice`]: a global cross-section in the completed dual
//!   coordinates `(z, Z)`, smooth across the chamber walls where particles
//!   of the dual model collide.
//! - [`su_slice_i`] / [`su_slice_ii`]: the analogous pair for the traceless
//!   (center-of-mass-reduced) systems.
//!
//! Everything here is a pure function of its inputs and safe to evaluate in
//! parallel over batches of points.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{CoreError, Result};
use crate::matrix::{cdiag, fro_norm, is_unitary, re, CMatrix, CVector, I, ONE};
use crate::phase::{
    alcove_embed, CenterMassPointI, CenterMassPointII, Coupling, DualCompletedPoint,
    DualInteriorPoint, SutherlandPoint,
};
use crate::serde_complex;
use crate::tol;

/// A point of the unreduced space: unitary `g`, anti-Hermitian `J`, and the
/// orbit vector `v` with `|v|^2 = n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LevelPoint {
    #[serde(with = "serde_complex::cmatrix")]
    pub g: CMatrix,
    #[serde(with = "serde_complex::cmatrix")]
    pub j: CMatrix,
    #[serde(with = "serde_complex::cvector")]
    pub v: CVector,
}

impl LevelPoint {
    pub fn n(&self) -> usize {
        self.g.nrows()
    }
}

/// The traceless analogue: special-unitary `gamma`, traceless
/// anti-Hermitian `jsu`, orbit vector `v`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SULevelPoint {
    #[serde(with = "serde_complex::cmatrix")]
    pub gamma: CMatrix,
    #[serde(with = "serde_complex::cmatrix")]
    pub jsu: CMatrix,
    #[serde(with = "serde_complex::cvector")]
    pub v: CVector,
}

impl SULevelPoint {
    pub fn n(&self) -> usize {
        self.gamma.nrows()
    }
}

/// The coadjoint-orbit matrix `xi(x, v) = i x (1_n - v v*)`.
pub fn xi(x: f64, v: &CVector) -> CMatrix {
    let n = v.len();
    let mut m = CMatrix::identity(n, n);
    m -= v * v.adjoint();
    m * (I * x)
}

fn moment_map(g: &CMatrix, j: &CMatrix, v: &CVector, x: f64) -> CMatrix {
    j - g.adjoint() * j * g + xi(x, v)
}

/// Frobenius norm of the moment-map value at a point.  The value lies in
/// su(n) whenever `|v|^2 = n`, so a small norm certifies both the
/// commutation constraint and tracelessness.
pub fn moment_residual(pt: &LevelPoint, c: &Coupling) -> f64 {
    fro_norm(&moment_map(&pt.g, &pt.j, &pt.v, c.x))
}

/// Moment-map residual for the traceless system (same defining formula).
pub fn su_moment_residual(pt: &SULevelPoint, c: &Coupling) -> f64 {
    fro_norm(&moment_map(&pt.gamma, &pt.jsu, &pt.v, c.x))
}

/// Gauge action of a unitary `y`: `(g, J, v) -> (y g y^{-1}, y J y^{-1}, y v)`.
/// Leaves the moment residual invariant.
pub fn gauge_act(y: &CMatrix, pt: &LevelPoint) -> Result<LevelPoint> {
    if !is_unitary(y, tol::STRUCTURAL) {
        return Err(CoreError::NotUnitary {
            residual: crate::matrix::unitarity_residual(y),
            tol: tol::STRUCTURAL,
        });
    }
    Ok(LevelPoint {
        g: y * &pt.g * y.adjoint(),
        j: y * &pt.j * y.adjoint(),
        v: y * &pt.v,
    })
}

/// The antidiagonal permutation matrix `P` with `P_{i,j} = delta_{i, n+1-j}`.
pub fn antidiagonal_permutation(n: usize) -> CMatrix {
    CMatrix::from_fn(n, n, |i, j| if i + j == n - 1 { ONE } else { re(0.0) })
}

/// Index-reversal parity: conjugate every component entrywise and then
/// reverse the index order with the antidiagonal permutation.  Maps points
/// on shell at coupling `x` to points on shell at coupling `-x`, which is
/// how every `x < 0` slice below is produced from its `x > 0` form.
pub fn parity_conjugate(pt: &LevelPoint) -> LevelPoint {
    let p = antidiagonal_permutation(pt.n());
    LevelPoint {
        g: &p * pt.g.conjugate() * &p,
        j: &p * pt.j.conjugate() * &p,
        v: &p * pt.v.conjugate(),
    }
}

/// [`parity_conjugate`] for the traceless system.
pub fn su_parity_conjugate(pt: &SULevelPoint) -> SULevelPoint {
    let p = antidiagonal_permutation(pt.n());
    SULevelPoint {
        gamma: &p * pt.gamma.conjugate() * &p,
        jsu: &p * pt.jsu.conjugate() * &p,
        v: &p * pt.v.conjugate(),
    }
}

// ---------------------------------------------------------------------------
// Sutherland side
// ---------------------------------------------------------------------------

/// The position-side cross-section: `(tau, J(tau, p), (1,...,1))` with
/// `tau = diag(e^{iq})` and the off-diagonal entries of `J` pinned by
/// `J_ab (1 - tau_b/tau_a) = i x`.
pub fn sutherland_slice(pt: &SutherlandPoint, c: &Coupling) -> Result<LevelPoint> {
    check_n("sutherland point size", c.n, pt.n())?;
    check_distinct_angles(&pt.q)?;
    let n = c.n;
    let tau: Vec<Complex64> = pt.q.iter().map(|&q| Complex64::from_polar(1.0, q)).collect();
    let g = CMatrix::from_fn(n, n, |a, b| if a == b { tau[a] } else { re(0.0) });
    let j = CMatrix::from_fn(n, n, |a, b| {
        if a == b {
            I * pt.p[a]
        } else {
            I * c.x / (ONE - tau[b] / tau[a])
        }
    });
    Ok(LevelPoint {
        g,
        j,
        v: CVector::from_element(n, ONE),
    })
}

/// The trigonometric Lax matrix: diagonal `p`, off-diagonal
/// `-(i x / 2) / sin((q_a - q_b)/2)`.  Hermitian; its spectrum equals the
/// spectrum of `-i J` on the slice.
pub fn sutherland_lax(pt: &SutherlandPoint, c: &Coupling) -> Result<CMatrix> {
    check_n("sutherland point size", c.n, pt.n())?;
    check_distinct_angles(&pt.q)?;
    let n = c.n;
    Ok(CMatrix::from_fn(n, n, |a, b| {
        if a == b {
            re(pt.p[a])
        } else {
            -I * (c.x / 2.0) / ((pt.q[a] - pt.q[b]) / 2.0).sin()
        }
    }))
}

fn check_distinct_angles(q: &[f64]) -> Result<()> {
    for i in 0..q.len() {
        for j in (i + 1)..q.len() {
            if crate::phase::angular_distance(q[i], q[j]) < tol::POINT_EQ {
                return Err(CoreError::CoincidentAngles {
                    i,
                    j,
                    tol: tol::POINT_EQ,
                });
            }
        }
    }
    Ok(())
}

fn check_n(context: &'static str, expected: usize, got: usize) -> Result<()> {
    if expected != got {
        return Err(CoreError::DimensionMismatch {
            context,
            expected,
            got,
        });
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Chamber functions
// ---------------------------------------------------------------------------

/// Validates that `phat` is descending with adjacent gaps at least
/// `|x| - tol::CHAMBER` (the closed thick-walled chamber, up to floating
/// dust from eigenvalue extraction).
pub fn chamber_check(phat: &[f64], c: &Coupling) -> Result<()> {
    check_n("phat length", c.n, phat.len())?;
    let required = c.x.abs();
    for i in 0..phat.len() - 1 {
        let gap = phat[i] - phat[i + 1];
        if gap < required - tol::CHAMBER {
            return Err(CoreError::NotInChamber {
                index: i,
                gap,
                required,
            });
        }
    }
    Ok(())
}

/// Nonnegative square root of a ratio that is nonnegative on the closed
/// chamber; values driven below zero by floating dust (bounded by the
/// chamber tolerance, enforced by [`chamber_check`]) clamp to zero.
fn sqrt_ratio(num: f64, den: f64) -> f64 {
    let r = num / den;
    if r < 0.0 {
        0.0
    } else {
        r.sqrt()
    }
}

/// The square-root factor `[(phat_j - phat_k - x)/(phat_j - phat_k)]^{1/2}`;
/// real and nonnegative for every ordered pair on the closed chamber.
fn q_factor(phat: &[f64], j: usize, k: usize, x: f64) -> f64 {
    let d = phat[j] - phat[k];
    sqrt_ratio(d - x, d)
}

/// The chamber vector `V(x, phat)_b = prod_{k != b} [(phat_b - phat_k - x) /
/// (phat_b - phat_k)]^{1/2}`, with the nonnegative square root in each
/// factor.  Satisfies `sum_b V_b^2 = n`; components vanish exactly at the
/// chamber walls.
pub fn eval_v(phat: &[f64], c: &Coupling) -> Result<Vec<f64>> {
    chamber_check(phat, c)?;
    Ok((0..c.n)
        .map(|b| {
            (0..c.n)
                .filter(|&k| k != b)
                .map(|k| q_factor(phat, b, k, c.x))
                .product()
        })
        .collect())
}

/// The real orthogonal chamber matrix: off-diagonal entries
/// `x/(phat_b - phat_a)` times paired square-root factors over the other
/// indices, diagonal entries `prod_{j != a} [(d^2 - x^2)/d^2]^{1/2}`.
/// Satisfies `eta^T eta = 1`, `det eta = 1`, and `eta(x)^{-1} = eta(-x)`.
pub fn eval_eta(phat: &[f64], c: &Coupling) -> Result<CMatrix> {
    chamber_check(phat, c)?;
    let n = c.n;
    let x = c.x;
    let mut m = CMatrix::zeros(n, n);
    for a in 0..n {
        for b in 0..n {
            let value = if a == b {
                (0..n)
                    .filter(|&j| j != a)
                    .map(|j| {
                        let d = phat[a] - phat[j];
                        sqrt_ratio((d - x) * (-d - x), -d * d)
                    })
                    .product::<f64>()
            } else {
                let product: f64 = (0..n)
                    .filter(|&j| j != a && j != b)
                    .map(|j| {
                        sqrt_ratio(
                            (phat[a] - phat[j] - x) * (phat[j] - phat[b] - x),
                            (phat[a] - phat[j]) * (phat[j] - phat[b]),
                        )
                    })
                    .product();
                x / (phat[b] - phat[a]) * product
            };
            m[(a, b)] = re(value);
        }
    }
    Ok(m)
}

/// The torus cocycle: for `x > 0`, `aleph_j = prod_{k >= j} tau_k^{-1}` and
/// the shifted branch `(aleph_2, ..., aleph_n, 1)`; for `x < 0`,
/// `aleph_j = prod_{k <= j} tau_k^{-1}` and `(1, aleph_1, ..., aleph_{n-1})`.
/// In both branches `aleph_j / (aleph_shift)_j = tau_j^{-1}`.
pub fn eval_aleph(tau: &[Complex64], c: &Coupling) -> (Vec<Complex64>, Vec<Complex64>) {
    let n = tau.len();
    let mut aleph = vec![ONE; n];
    if c.x > 0.0 {
        let mut acc = ONE;
        for j in (0..n).rev() {
            acc *= ONE / tau[j];
            aleph[j] = acc;
        }
        let mut shift = Vec::with_capacity(n);
        shift.extend_from_slice(&aleph[1..]);
        shift.push(ONE);
        (aleph, shift)
    } else {
        let mut acc = ONE;
        for (j, t) in tau.iter().enumerate() {
            acc *= ONE / t;
            aleph[j] = acc;
        }
        let mut shift = Vec::with_capacity(n);
        shift.push(ONE);
        shift.extend_from_slice(&aleph[..n - 1]);
        (aleph, shift)
    }
}

// ---------------------------------------------------------------------------
// Dual slices
// ---------------------------------------------------------------------------

/// The action-side cross-section over the open chamber:
/// `gauge_act(diag(aleph_shift), ((eta e^{i qhat})^{-1}, -i diag(phat), V))`.
/// The `J`-leg is always `-i diag(phat)`.
pub fn dual_slice_interior(pt: &DualInteriorPoint, c: &Coupling) -> Result<LevelPoint> {
    check_n("dual point size", c.n, pt.n())?;
    let n = c.n;
    let eta = eval_eta(&pt.phat, c)?;
    let v = eval_v(&pt.phat, c)?;
    let tau: Vec<Complex64> = pt
        .qhat
        .iter()
        .map(|&q| Complex64::from_polar(1.0, q))
        .collect();
    let (_, shift) = eval_aleph(&tau, c);
    // (eta * diag(tau))^{-1} = diag(tau)^{-1} * eta^T since eta is orthogonal.
    let mut g = eta.transpose();
    for b in 0..n {
        for a in 0..n {
            g[(a, b)] /= tau[a];
        }
    }
    let a_diag = CMatrix::from_fn(n, n, |i, j| if i == j { shift[i] } else { re(0.0) });
    let pre = LevelPoint {
        g,
        j: cdiag(&pt.phat.iter().map(|&p| -I * p).collect::<Vec<_>>()),
        v: CVector::from_iterator(n, v.iter().map(|&w| re(w))),
    };
    gauge_act(&a_diag, &pre)
}

/// Action variables of the completed coordinates: `pihat_1 = -log|Z|`,
/// `pihat_k = -(k-1) x - log|Z| - sum_{j<k} |z_j|^2`.  Valid for `x > 0`;
/// consecutive gaps are `x + |z_k|^2`.
fn pi_hat_completed(z: &[Complex64], abs_big_z: f64, x: f64) -> Vec<f64> {
    let n = z.len() + 1;
    let base = -abs_big_z.ln();
    let mut acc = 0.0;
    (0..n)
        .map(|k| {
            let value = -(k as f64) * x + base - acc;
            if k < n - 1 {
                acc += z[k].norm_sqr();
            }
            value
        })
        .collect()
}

/// The smooth slice entries shared by the completed slice and its traceless
/// analogue: given actions `pihat` (descending, gaps `>= x`), coordinates
/// `z` with `s_j = sqrt(|z_j|^2 + x)`, and the conjugate phase of the `Z`
/// coordinate, returns the unitary matrix `theta` and the orbit vector.
///
/// Each entry is a product of the square-root factors
/// `Q_{j,k} = [(pihat_j - pihat_k - x)/(pihat_j - pihat_k)]^{1/2}` with
/// boundary phases `z_a/s_a` on the left, `conj(z_{b-1})/s_{b-1}` (or the
/// `Z`-phase in the first column) on the right, and the kernel
/// `x/(pihat_b - pihat_a)` off the diagonal.  On the subdiagonal `b = a + 1`
/// the two boundary phases cancel exactly and are omitted, which is what
/// makes the entries smooth across `z_a = 0`.  Requires `x > 0`.
fn theta_entries(
    pihat: &[f64],
    z: &[Complex64],
    big_z_phase_conj: Complex64,
    x: f64,
) -> (CMatrix, CVector) {
    let n = pihat.len();
    let s: Vec<f64> = z.iter().map(|zj| (zj.norm_sqr() + x).sqrt()).collect();
    let q = |j: usize, k: usize| q_factor(pihat, j, k, x);
    let left_phase = |a: usize| if a + 1 < n { z[a] / s[a] } else { ONE };
    let right_phase = |b: usize| {
        if b >= 1 {
            z[b - 1].conj() / s[b - 1]
        } else {
            big_z_phase_conj
        }
    };

    let mut theta = CMatrix::zeros(n, n);
    for a in 0..n {
        for b in 0..n {
            let core = if a == b {
                ONE
            } else {
                re(x / (pihat[b] - pihat[a]))
            };
            let left: f64 = (0..n)
                .filter(|&j| j != a && j != b && j != a + 1)
                .map(|j| q(a, j))
                .product();
            let right: f64 = (0..n)
                .filter(|&j| j != a && j != b && (b == 0 || j != b - 1))
                .map(|j| q(j, b))
                .product();
            let phases = if b == a + 1 {
                ONE
            } else {
                left_phase(a) * right_phase(b)
            };
            theta[(a, b)] = core * phases * left * right;
        }
    }

    let vcal = CVector::from_fn(n, |j, _| {
        let product: f64 = (0..n)
            .filter(|&k| k != j && k != j + 1)
            .map(|k| q(j, k))
            .product();
        if j + 1 < n {
            z[j] / s[j] * product
        } else {
            re(product)
        }
    });
    (theta, vcal)
}

/// The global cross-section in completed coordinates:
/// `(theta(z, Z)^{-1}, -i diag(pihat(z, Z)), V(z, Z))`.  Agrees with
/// [`dual_slice_interior`] wherever all `z_j != 0` and extends smoothly
/// across the loci where they vanish.  For `x < 0` the point is produced by
/// [`parity_conjugate`] of the `x > 0` slice at the same coordinates.
pub fn completed_slice(pt: &DualCompletedPoint, c: &Coupling) -> Result<LevelPoint> {
    check_n("completed point size", c.n, pt.n())?;
    if pt.big_z.norm() == 0.0 {
        return Err(CoreError::ZeroZ { magnitude: 0.0 });
    }
    if c.x < 0.0 {
        let mirror = Coupling::new(c.n, -c.x)?;
        return Ok(parity_conjugate(&completed_slice(pt, &mirror)?));
    }
    let pihat = pi_hat_completed(&pt.z, pt.big_z.norm(), c.x);
    let phase = pt.big_z.conj() / pt.big_z.norm();
    let (theta, vcal) = theta_entries(&pihat, &pt.z, phase, c.x);
    Ok(LevelPoint {
        g: theta.adjoint(),
        j: cdiag(&pihat.iter().map(|&p| -I * p).collect::<Vec<_>>()),
        v: vcal,
    })
}

// ---------------------------------------------------------------------------
// Traceless (center-of-mass-reduced) slices
// ---------------------------------------------------------------------------

/// Position-side cross-section of the traceless system over the open
/// simplex: `(e^{i beta(delta)}, Jsu(delta, gamma), (1,...,1))` with the
/// same off-diagonal pinning as the Sutherland slice and diagonal built
/// from the simplex momenta.
pub fn su_slice_i(pt: &CenterMassPointI, c: &Coupling) -> Result<SULevelPoint> {
    check_n("simplex point size", c.n, pt.n())?;
    let n = c.n;
    let beta = alcove_embed(&pt.delta)?;
    let tau: Vec<Complex64> = beta.iter().map(|&b| Complex64::from_polar(1.0, b)).collect();
    let gamma_full = |k: usize| -> f64 {
        if k == 0 || k == n {
            0.0
        } else {
            pt.gamma[k - 1]
        }
    };
    let jsu = CMatrix::from_fn(n, n, |a, b| {
        if a == b {
            I * (gamma_full(a + 1) - gamma_full(a))
        } else {
            I * c.x / (ONE - tau[b] / tau[a])
        }
    });
    Ok(SULevelPoint {
        gamma: CMatrix::from_fn(n, n, |a, b| if a == b { tau[a] } else { re(0.0) }),
        jsu,
        v: CVector::from_element(n, ONE),
    })
}

/// Zero-sum action variables of the traceless completed coordinates:
/// `pihat0_k = x (n + 1 - 2k)/2 - sum_{j<k} (j/n)|zeta_j|^2 +
/// sum_{j>=k} ((n-j)/n)|zeta_j|^2`.  Consecutive gaps are `x + |zeta_k|^2`;
/// the components sum to zero.  Valid for `x > 0`.
pub fn pi_hat_su(zeta: &[Complex64], n: usize, x: f64) -> Vec<f64> {
    (1..=n)
        .map(|k| {
            let mut value = x * (n as f64 + 1.0 - 2.0 * k as f64) / 2.0;
            for (idx, zj) in zeta.iter().enumerate() {
                let j = idx + 1;
                if j < k {
                    value -= j as f64 / n as f64 * zj.norm_sqr();
                } else {
                    value += (n - j) as f64 / n as f64 * zj.norm_sqr();
                }
            }
            value
        })
        .collect()
}

/// Global cross-section of the traceless system in completed coordinates:
/// the same entry formulas as [`completed_slice`] with the zero-sum actions
/// [`pi_hat_su`] and the `Z`-phase replaced by `1`.  For `x < 0` the point
/// is produced by [`su_parity_conjugate`] of the `x > 0` slice.
pub fn su_slice_ii(pt: &CenterMassPointII, c: &Coupling) -> Result<SULevelPoint> {
    check_n("traceless point size", c.n, pt.n())?;
    if c.x < 0.0 {
        let mirror = Coupling::new(c.n, -c.x)?;
        return Ok(su_parity_conjugate(&su_slice_ii(pt, &mirror)?));
    }
    let pihat = pi_hat_su(&pt.zeta, c.n, c.x);
    let (theta, vcal) = theta_entries(&pihat, &pt.zeta, ONE, c.x);
    Ok(SULevelPoint {
        gamma: theta.adjoint(),
        jsu: cdiag(&pihat.iter().map(|&p| -I * p).collect::<Vec<_>>()),
        v: vcal,
    })
}
