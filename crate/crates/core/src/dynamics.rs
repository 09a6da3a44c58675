//! Commuting Hamiltonian families, exact integration by projecting the free
//! flows of the unreduced space, and an independent fixed-step integrator
//! for cross-validation.
//!
//! The unreduced space carries two Abelian families: the spectral invariants
//! of the momentum leg, `H_k = (1/k) tr(-iJ)^k`, and those of the group leg,
//! `Hhat_k = (1/k) tr(g^k + g^{-k})` and `Hhat_{-k} = (1/(ik)) tr(g^k -
//! g^{-k})`.  All their flows are exact one-liners ([`free_flow`]); the
//! position-side and dual-side dynamics are obtained by lifting to a slice,
//! flowing for the requested time from the initial lift (never compounding
//! steps), and projecting back ([`evolve_sutherland`], [`evolve_dual`]).
//! [`rk4_reference`] integrates the position-side equations of motion
//! directly and independently, as an oracle.

use nalgebra::DVector;

use crate::error::{CoreError, Result};
use crate::matrix::{exp_i_hermitian, mat_pow, I};
use crate::phase::{angular_distance, Coupling, DualCompletedPoint, SutherlandPoint};
use crate::reduction::{completed_slice, sutherland_slice, LevelPoint};
use crate::tol;
use crate::duality::{project_to_dual, project_to_sutherland};
use std::f64::consts::PI;

/// Which commuting family generates a flow, and with which label.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FlowFamily {
    /// Spectral invariants of the momentum leg; labels `1..=n`.
    H { k: usize },
    /// Spectral invariants of the group leg; labels `±1..=±n` (positive for
    /// the symmetric combination, negative for the antisymmetric one).
    Hhat { k: i32 },
}

/// A flow request: family label plus flow time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FlowSpec {
    pub family: FlowFamily,
    pub t: f64,
}

impl FlowSpec {
    /// Validates the family label against the matrix size.
    pub fn new(family: FlowFamily, t: f64, n: usize) -> Result<Self> {
        match family {
            FlowFamily::H { k } => {
                if k == 0 || k > n {
                    return Err(CoreError::InvalidFlowIndex { k: k as i64, n });
                }
            }
            FlowFamily::Hhat { k } => {
                if k == 0 || k.unsigned_abs() as usize > n {
                    return Err(CoreError::InvalidFlowIndex { k: k as i64, n });
                }
            }
        }
        Ok(FlowSpec { family, t })
    }
}

/// Sampled flow output: sample times, the phase-space point at each time,
/// and the largest per-sample drift of the generating family's conserved
/// quantities.
#[derive(Debug, Clone)]
pub struct Trajectory<P> {
    pub times: Vec<f64>,
    pub points: Vec<P>,
    pub invariant_drift: f64,
}

/// `H_k(g, J, v) = (1/k) tr(-iJ)^k`; defined on all of the unreduced space
/// and gauge-invariant.
pub fn eval_h(pt: &LevelPoint, k: usize) -> Result<f64> {
    let n = pt.j.nrows();
    if k == 0 || k > n {
        return Err(CoreError::InvalidFlowIndex { k: k as i64, n });
    }
    let herm = &pt.j * (-I);
    Ok(mat_pow(&herm, k).trace().re / k as f64)
}

/// `Hhat_k` for positive labels, `Hhat_{-k}` for negative ones; defined on
/// all of the unreduced space and gauge-invariant.
pub fn eval_hhat(pt: &LevelPoint, k: i32) -> Result<f64> {
    let n = pt.g.nrows();
    if k == 0 || k.unsigned_abs() as usize > n {
        return Err(CoreError::InvalidFlowIndex { k: k as i64, n });
    }
    let m = k.unsigned_abs() as usize;
    let tr = mat_pow(&pt.g, m).trace();
    // For unitary g, tr(g^{-m}) is the conjugate of tr(g^m).
    if k > 0 {
        Ok(2.0 * tr.re / m as f64)
    } else {
        Ok(2.0 * tr.im / m as f64)
    }
}

/// Exact flow of a free Hamiltonian: the momentum-leg family moves only the
/// group leg, `g(t) = exp(i t (-iJ)^{k-1}) g`; the group-leg family moves
/// only the momentum leg, `J(t) = J + t(g^k - g^{-k})` resp.
/// `J(t) = J - i t (g^k + g^{-k})`.
///
/// The exponential multiplies on the left: the Poisson bracket pairs the
/// momentum leg with left translations, and this is the unique side for
/// which the flow preserves the moment map (the generators are invariant
/// under the conjugation action, so their flows must commute with it and
/// stay on the zero level).
pub fn free_flow(pt: &LevelPoint, spec: &FlowSpec) -> Result<LevelPoint> {
    match spec.family {
        FlowFamily::H { k } => {
            let n = pt.j.nrows();
            if k == 0 || k > n {
                return Err(CoreError::InvalidFlowIndex { k: k as i64, n });
            }
            let herm = mat_pow(&(&pt.j * (-I)), k - 1);
            let rot = exp_i_hermitian(&herm, spec.t)?;
            Ok(LevelPoint {
                g: rot * &pt.g,
                j: pt.j.clone(),
                v: pt.v.clone(),
            })
        }
        FlowFamily::Hhat { k } => {
            let n = pt.g.nrows();
            if k == 0 || k.unsigned_abs() as usize > n {
                return Err(CoreError::InvalidFlowIndex { k: k as i64, n });
            }
            let m = k.unsigned_abs() as usize;
            let fwd = mat_pow(&pt.g, m);
            let bwd = mat_pow(&pt.g.adjoint(), m);
            let j = if k > 0 {
                &pt.j + (&fwd - &bwd) * num_complex::Complex64::from(spec.t)
            } else {
                &pt.j + (&fwd + &bwd) * (I * (-spec.t))
            };
            Ok(LevelPoint {
                g: pt.g.clone(),
                j,
                v: pt.v.clone(),
            })
        }
    }
}

fn sample_times(t: f64, samples: usize) -> Vec<f64> {
    if samples <= 1 {
        return vec![t];
    }
    (0..samples)
        .map(|i| t * i as f64 / (samples - 1) as f64)
        .collect()
}

/// Integrate the position-side system along the `k`-th momentum-leg flow by
/// lifting once, flowing exactly from the initial lift to each sample time,
/// and projecting back.  The generating family's values are conserved
/// exactly at the unreduced level; the reported drift re-measures them on
/// the projected points, certifying the projection numerics.
pub fn evolve_sutherland(
    pt: &SutherlandPoint,
    k: usize,
    t: f64,
    samples: usize,
    c: &Coupling,
) -> Result<Trajectory<SutherlandPoint>> {
    let lift = sutherland_slice(pt, c)?;
    let reference: Vec<f64> = (1..=c.n).map(|j| eval_h(&lift, j)).collect::<Result<_>>()?;
    let times = sample_times(t, samples);
    let mut points = Vec::with_capacity(times.len());
    let mut drift = 0.0_f64;
    for &ti in &times {
        let spec = FlowSpec::new(FlowFamily::H { k }, ti, c.n)?;
        let moved = free_flow(&lift, &spec)?;
        let projected = project_to_sutherland(&moved, c)?;
        let relift = sutherland_slice(&projected, c)?;
        for (j, reference_j) in reference.iter().enumerate() {
            drift = drift.max((eval_h(&relift, j + 1)? - reference_j).abs());
        }
        points.push(projected);
    }
    Ok(Trajectory {
        times,
        points,
        invariant_drift: drift,
    })
}

/// Integrate the dual system along a group-leg flow (label `±1..=±n`),
/// lifting through the completed slice.  Trajectories may cross the chamber
/// walls (`z_j = 0`); the wall-safe projection keeps them smooth there.
pub fn evolve_dual(
    pt: &DualCompletedPoint,
    k: i32,
    t: f64,
    samples: usize,
    c: &Coupling,
) -> Result<Trajectory<DualCompletedPoint>> {
    let lift = completed_slice(pt, c)?;
    let mut reference = Vec::with_capacity(2 * c.n);
    for j in 1..=c.n as i32 {
        reference.push(eval_hhat(&lift, j)?);
        reference.push(eval_hhat(&lift, -j)?);
    }
    let times = sample_times(t, samples);
    let mut points = Vec::with_capacity(times.len());
    let mut drift = 0.0_f64;
    for &ti in &times {
        let spec = FlowSpec::new(FlowFamily::Hhat { k }, ti, c.n)?;
        let moved = free_flow(&lift, &spec)?;
        let projected = project_to_dual(&moved, c)?;
        let relift = completed_slice(&projected, c)?;
        let mut idx = 0;
        for j in 1..=c.n as i32 {
            drift = drift.max((eval_hhat(&relift, j)? - reference[idx]).abs());
            drift = drift.max((eval_hhat(&relift, -j)? - reference[idx + 1]).abs());
            idx += 2;
        }
        points.push(projected);
    }
    Ok(Trajectory {
        times,
        points,
        invariant_drift: drift,
    })
}

/// Align a canonical position-side trajectory into a continuous chart:
/// successive samples are matched by the cyclic relabeling and per-particle
/// `2*pi` branch that stay nearest to the previous sample.  Returns
/// `(positions, momenta)` streams suitable for plotting or pointwise
/// comparison against an unwrapped integrator.
pub fn unwrap_trajectory(traj: &Trajectory<SutherlandPoint>) -> (Vec<Vec<f64>>, Vec<Vec<f64>>) {
    let mut qs: Vec<Vec<f64>> = Vec::with_capacity(traj.points.len());
    let mut ps: Vec<Vec<f64>> = Vec::with_capacity(traj.points.len());
    for pt in &traj.points {
        let n = pt.q.len();
        match qs.last() {
            None => {
                qs.push(pt.q.clone());
                ps.push(pt.p.clone());
            }
            Some(prev) => {
                let mut best: Option<(f64, Vec<f64>, Vec<f64>)> = None;
                for r in 0..n {
                    let mut q = Vec::with_capacity(n);
                    let mut p = Vec::with_capacity(n);
                    let mut cost = 0.0;
                    for (j, &prev_j) in prev.iter().enumerate() {
                        let src = (j + r) % n;
                        let branch = ((prev_j - pt.q[src]) / (2.0 * PI)).round();
                        let qj = pt.q[src] + 2.0 * PI * branch;
                        cost += (qj - prev_j).abs();
                        q.push(qj);
                        p.push(pt.p[src]);
                    }
                    if best.as_ref().is_none_or(|(c, _, _)| cost < *c) {
                        best = Some((cost, q, p));
                    }
                }
                let (_, q, p) = best.unwrap();
                qs.push(q);
                ps.push(p);
            }
        }
    }
    (qs, ps)
}

/// The position-side Hamiltonian `(1/2) sum p^2 + (x^2/4) sum_{i<j}
/// 1/sin^2((q_i - q_j)/2)` evaluated in the unwrapped chart.
pub fn sutherland_energy(q: &[f64], p: &[f64], x: f64) -> f64 {
    let n = q.len();
    let kinetic: f64 = p.iter().map(|pi| pi * pi).sum::<f64>() / 2.0;
    let mut potential = 0.0;
    for i in 0..n {
        for j in i + 1..n {
            let s = ((q[i] - q[j]) / 2.0).sin();
            potential += 0.25 * x * x / (s * s);
        }
    }
    kinetic + potential
}

fn min_angular_gap(q: &[f64]) -> f64 {
    let n = q.len();
    let mut min = f64::INFINITY;
    for i in 0..n {
        for j in i + 1..n {
            min = min.min(angular_distance(q[i], q[j]));
        }
    }
    min
}

/// Hamilton's equations for [`sutherland_energy`]: the repulsion on
/// particle `m` is `(x^2/4) sum_{j != m} cos((q_m - q_j)/2) /
/// sin^3((q_m - q_j)/2)`.
fn eom(q: &DVector<f64>, p: &DVector<f64>, x: f64) -> (DVector<f64>, DVector<f64>) {
    let n = q.len();
    let qdot = p.clone();
    let mut pdot = DVector::zeros(n);
    for m in 0..n {
        let mut force = 0.0;
        for j in 0..n {
            if j != m {
                let half = (q[m] - q[j]) / 2.0;
                force += 0.25 * x * x * half.cos() / half.sin().powi(3);
            }
        }
        pdot[m] = force;
    }
    (qdot, pdot)
}

/// Classic fixed-step fourth-order integrator for the position-side
/// equations of motion, in the unwrapped chart (no canonicalization), as an
/// independent oracle.  Records every step; halts with an error if two
/// particles approach closer than the collision guard.
pub fn rk4_reference(
    pt: &SutherlandPoint,
    c: &Coupling,
    t: f64,
    step: f64,
) -> Result<Trajectory<SutherlandPoint>> {
    let mut q = DVector::from_vec(pt.q.clone());
    let mut p = DVector::from_vec(pt.p.clone());
    let energy0 = sutherland_energy(q.as_slice(), p.as_slice(), c.x);
    let mut times = vec![0.0];
    let mut points = vec![pt.clone()];
    let mut drift = 0.0_f64;
    let total_steps = (t / step).ceil() as usize;
    let mut current = 0.0;
    for _ in 0..total_steps {
        let h = step.min(t - current);
        if h <= 0.0 {
            break;
        }
        let gap = min_angular_gap(q.as_slice());
        if gap < tol::COLLISION_GUARD {
            return Err(CoreError::CollisionGuard {
                t: current,
                min_gap: gap,
            });
        }
        let (k1q, k1p) = eom(&q, &p, c.x);
        let (k2q, k2p) = eom(&(&q + &k1q * (h / 2.0)), &(&p + &k1p * (h / 2.0)), c.x);
        let (k3q, k3p) = eom(&(&q + &k2q * (h / 2.0)), &(&p + &k2p * (h / 2.0)), c.x);
        let (k4q, k4p) = eom(&(&q + &k3q * h), &(&p + &k3p * h), c.x);
        q += (k1q + k2q * 2.0 + k3q * 2.0 + k4q) * (h / 6.0);
        p += (k1p + k2p * 2.0 + k3p * 2.0 + k4p) * (h / 6.0);
        current += h;
        let energy = sutherland_energy(q.as_slice(), p.as_slice(), c.x);
        drift = drift.max((energy - energy0).abs());
        times.push(current);
        points.push(SutherlandPoint {
            q: q.as_slice().to_vec(),
            p: p.as_slice().to_vec(),
        });
    }
    Ok(Trajectory {
        times,
        points,
        invariant_drift: drift,
    })
}
