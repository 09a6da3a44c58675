//! Deterministic dense complex linear algebra.
//!
//! Thin layer over [`nalgebra`] providing Hermitian and unitary
//! eigendecompositions with a fixed ordering and eigenvector phase
//! convention, plus the small set of matrix helpers the slice constructions
//! need (adjoints, residual predicates, powers, Hermitian exponentials).
//!
//! Conventions applied to every decomposition:
//! - Hermitian eigenvalues are sorted descending.
//! - Unitary eigenvalues are sorted by descending angle within a branch
//!   `(cut - 2*pi, cut]`; the cut position is a per-call argument (default
//!   `pi`, giving the principal branch `(-pi, pi]`).
//! - Each eigenvector column is scaled so that its largest-modulus entry is
//!   real positive, ties broken by the lowest row index.
//!
//! With those conventions the output is a deterministic function of the
//! input: repeated calls are bit-identical.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use std::f64::consts::PI;

use crate::error::{CoreError, Result};
use crate::tol;

/// Dense complex matrix used throughout the crate.
pub type CMatrix = DMatrix<Complex64>;
/// Dense complex column vector.
pub type CVector = DVector<Complex64>;

/// `1` as a complex scalar.
pub const ONE: Complex64 = Complex64::new(1.0, 0.0);
/// `i` as a complex scalar.
pub const I: Complex64 = Complex64::new(0.0, 1.0);

/// Complex scalar from a real.
#[inline]
pub fn re(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

/// Frobenius norm.
pub fn fro_norm(a: &CMatrix) -> f64 {
    a.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
}

/// `‖A − A†‖_F`.
pub fn hermitian_residual(a: &CMatrix) -> f64 {
    fro_norm(&(a - a.adjoint()))
}

/// `‖A + A†‖_F`.
pub fn anti_hermitian_residual(a: &CMatrix) -> f64 {
    fro_norm(&(a + a.adjoint()))
}

/// `‖A†A − I‖_F`.
pub fn unitarity_residual(a: &CMatrix) -> f64 {
    let n = a.nrows();
    fro_norm(&(a.adjoint() * a - CMatrix::identity(n, n)))
}

/// Frobenius norm of the off-diagonal part divided by `max(1, ‖A‖_F)`.
pub fn diagonality_residual(a: &CMatrix) -> f64 {
    let mut off = 0.0;
    for i in 0..a.nrows() {
        for j in 0..a.ncols() {
            if i != j {
                off += a[(i, j)].norm_sqr();
            }
        }
    }
    off.sqrt() / fro_norm(a).max(1.0)
}

/// Predicate: Hermitian within `tol`, scaled by `max(1, ‖A‖_F)`.
pub fn is_hermitian(a: &CMatrix, tolerance: f64) -> bool {
    hermitian_residual(a) <= tolerance * fro_norm(a).max(1.0)
}

/// Predicate: anti-Hermitian within `tol`, scaled by `max(1, ‖A‖_F)`.
pub fn is_anti_hermitian(a: &CMatrix, tolerance: f64) -> bool {
    anti_hermitian_residual(a) <= tolerance * fro_norm(a).max(1.0)
}

/// Predicate: unitary within `tol`.
pub fn is_unitary(a: &CMatrix, tolerance: f64) -> bool {
    unitarity_residual(a) <= tolerance * (a.nrows() as f64).sqrt().max(1.0)
}

/// Predicate: diagonal within relative `tol`.
pub fn is_diagonal(a: &CMatrix, tolerance: f64) -> bool {
    diagonality_residual(a) <= tolerance
}

/// Diagonal matrix from complex entries.
pub fn cdiag(entries: &[Complex64]) -> CMatrix {
    let n = entries.len();
    CMatrix::from_fn(n, n, |i, j| if i == j { entries[i] } else { Complex64::ZERO })
}

/// Diagonal matrix from real entries.
pub fn rdiag(entries: &[f64]) -> CMatrix {
    let n = entries.len();
    CMatrix::from_fn(n, n, |i, j| if i == j { re(entries[i]) } else { Complex64::ZERO })
}

/// Unitary diagonal `exp(i * diag(angles))`.
pub fn phase_diag(angles: &[f64]) -> CMatrix {
    let n = angles.len();
    CMatrix::from_fn(n, n, |i, j| {
        if i == j {
            Complex64::from_polar(1.0, angles[i])
        } else {
            Complex64::ZERO
        }
    })
}

/// Integer matrix power by repeated multiplication (`k >= 0`).
pub fn mat_pow(a: &CMatrix, k: usize) -> CMatrix {
    let n = a.nrows();
    let mut acc = CMatrix::identity(n, n);
    for _ in 0..k {
        acc = &acc * a;
    }
    acc
}

/// `exp(i * t * A)` for Hermitian `A`, via eigendecomposition.
pub fn exp_i_hermitian(a: &CMatrix, t: f64) -> Result<CMatrix> {
    let es = eig_hermitian(a, tol::STRUCTURAL)?;
    let phases: Vec<Complex64> = es
        .values
        .iter()
        .map(|&lam| Complex64::from_polar(1.0, t * lam))
        .collect();
    Ok(&es.vectors * cdiag(&phases) * es.vectors.adjoint())
}

/// Reduce an angle to the branch `(cut - 2*pi, cut]`.
pub fn branch_angle(angle: f64, cut: f64) -> f64 {
    let mut a = angle;
    while a > cut {
        a -= 2.0 * PI;
    }
    while a <= cut - 2.0 * PI {
        a += 2.0 * PI;
    }
    a
}

/// Reduce an angle to the principal branch `(-pi, pi]`.
pub fn principal_angle(angle: f64) -> f64 {
    branch_angle(angle, PI)
}

/// Eigendecomposition with the crate's ordering and phase conventions.
///
/// `values` are real for the Hermitian solver and unit-modulus complex for
/// the unitary solver.  `vectors` holds orthonormal column eigenvectors in
/// the matching order.  `min_gap` is the smallest pairwise separation of the
/// values (absolute difference; chordal distance in the unitary case), and
/// `degenerate` flags `min_gap` below the degeneracy tolerance without
/// invalidating the decomposition.
#[derive(Debug, Clone)]
pub struct EigenSystem<V> {
    pub values: Vec<V>,
    pub vectors: CMatrix,
    pub min_gap: f64,
    pub degenerate: bool,
}

impl EigenSystem<f64> {
    /// `‖A · vectors − vectors · diag(values)‖_F`.
    pub fn reconstruction_residual(&self, a: &CMatrix) -> f64 {
        let d = rdiag(&self.values);
        fro_norm(&(a * &self.vectors - &self.vectors * d))
    }
}

impl EigenSystem<Complex64> {
    /// `‖A · vectors − vectors · diag(values)‖_F`.
    pub fn reconstruction_residual(&self, a: &CMatrix) -> f64 {
        let d = cdiag(&self.values);
        fro_norm(&(a * &self.vectors - &self.vectors * d))
    }

    /// Eigenvalue angles reduced to the branch `(cut - 2*pi, cut]`, in the
    /// stored (descending) order.
    pub fn angles(&self, cut: f64) -> Vec<f64> {
        self.values.iter().map(|v| branch_angle(v.arg(), cut)).collect()
    }
}

/// Scale each column so its largest-modulus entry is real positive; ties are
/// broken by the lowest row index (strict `>` keeps the first maximum).
fn fix_column_phases(m: &mut CMatrix) {
    for j in 0..m.ncols() {
        let mut best_row = 0;
        let mut best_mod = -1.0;
        for i in 0..m.nrows() {
            let a = m[(i, j)].norm();
            if a > best_mod {
                best_mod = a;
                best_row = i;
            }
        }
        let pivot = m[(best_row, j)];
        if best_mod > 0.0 {
            let phase = pivot.conj() / best_mod;
            for i in 0..m.nrows() {
                m[(i, j)] *= phase;
            }
        }
    }
}

fn min_pairwise_real(values: &[f64]) -> f64 {
    let mut min = f64::INFINITY;
    for i in 0..values.len() {
        for j in (i + 1)..values.len() {
            min = min.min((values[i] - values[j]).abs());
        }
    }
    min
}

fn min_pairwise_complex(values: &[Complex64]) -> f64 {
    let mut min = f64::INFINITY;
    for i in 0..values.len() {
        for j in (i + 1)..values.len() {
            min = min.min((values[i] - values[j]).norm());
        }
    }
    min
}

/// Hermitian eigendecomposition: descending real eigenvalues, deterministic
/// eigenvector phases.
///
/// Errors with [`CoreError::NotHermitian`] if the symmetry residual exceeds
/// `tolerance * max(1, ‖A‖_F)`.  A (numerically) degenerate spectrum is
/// reported through the `degenerate` flag, not as an error.
pub fn eig_hermitian(a: &CMatrix, tolerance: f64) -> Result<EigenSystem<f64>> {
    let scale = fro_norm(a).max(1.0);
    let residual = hermitian_residual(a);
    if residual > tolerance * scale {
        return Err(CoreError::NotHermitian {
            residual,
            tol: tolerance * scale,
        });
    }
    // Symmetrize exactly so the backend sees a Hermitian matrix.
    let sym = (a + a.adjoint()).scale(0.5);
    let es = sym.symmetric_eigen();

    let n = a.nrows();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| es.eigenvalues[j].partial_cmp(&es.eigenvalues[i]).unwrap());

    let values: Vec<f64> = order.iter().map(|&i| es.eigenvalues[i]).collect();
    let mut vectors = CMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        vectors.set_column(dst, &es.eigenvectors.column(src));
    }
    fix_column_phases(&mut vectors);

    let min_gap = min_pairwise_real(&values);
    Ok(EigenSystem {
        values,
        vectors,
        min_gap,
        degenerate: min_gap < tol::DEGENERACY,
    })
}

/// Unitary eigendecomposition: unit-modulus eigenvalues ordered by descending
/// angle within the branch `(cut - 2*pi, cut]`, deterministic phases.
///
/// A unitary matrix is normal, so its Hermitian part `H = (U + U†)/2` and
/// anti-Hermitian part share eigenvectors.  `H` alone cannot separate the
/// conjugate pair `exp(±i·angle)`; within each `H`-eigenvalue cluster the
/// projected matrix `(U − U†)/(2i)` (eigenvalues `sin(angle)`) completes the
/// split.  Eigenvalues are then read off as Rayleigh quotients and normalized
/// to the unit circle.
pub fn eig_unitary(u: &CMatrix, tolerance: f64, cut: f64) -> Result<EigenSystem<Complex64>> {
    let n = u.nrows();
    let residual = unitarity_residual(u);
    if residual > tolerance * (n as f64).sqrt().max(1.0) {
        return Err(CoreError::NotUnitary {
            residual,
            tol: tolerance * (n as f64).sqrt().max(1.0),
        });
    }

    let h = (u + u.adjoint()).scale(0.5);
    let k = (u - u.adjoint()) * Complex64::new(0.0, -0.5);
    let hs = eig_hermitian(&h, 10.0 * tolerance)?;

    // Group the H-spectrum into clusters and split each cluster with K.
    let mut vectors = hs.vectors.clone();
    let mut start = 0;
    while start < n {
        let mut end = start + 1;
        while end < n && (hs.values[end - 1] - hs.values[end]).abs() < tol::EIG_CLUSTER {
            end += 1;
        }
        if end - start > 1 {
            let q = vectors.columns(start, end - start).into_owned();
            let k_sub = q.adjoint() * &k * &q;
            let sub = (&k_sub + k_sub.adjoint()).scale(0.5).symmetric_eigen();
            let rotated = &q * sub.eigenvectors;
            for (offset, col) in rotated.column_iter().enumerate() {
                vectors.set_column(start + offset, &col);
            }
        }
        start = end;
    }

    // Two rounds of inverse iteration against the unitary input snap each
    // column onto its true invariant direction.  The Hermitian QR pass above
    // carries a backward error well above machine precision, and when two
    // angles fold onto nearby cosines (without forming a cluster) the
    // leftover mixing would otherwise leak into downstream pattern gates.
    for _ in 0..2 {
        for j in 0..n {
            let col = vectors.column(j).into_owned();
            let lam: Complex64 = (col.adjoint() * u * &col)[(0, 0)];
            let unit = if lam.norm() > 0.0 { lam / lam.norm() } else { ONE };
            let mut shifted = u.clone();
            let mu = unit * Complex64::from(1.0 + 1e-9);
            for d in 0..n {
                shifted[(d, d)] -= mu;
            }
            if let Some(sol) = shifted.lu().solve(&col) {
                let norm = sol.norm();
                if norm > 0.0 {
                    vectors.set_column(j, &sol.unscale(norm));
                }
            }
        }
    }

    // Rayleigh quotients: exact eigenvalues for normal input, pushed onto the
    // unit circle.
    let mut pairs: Vec<(f64, Complex64, usize)> = (0..n)
        .map(|j| {
            let col = vectors.column(j);
            let lam: Complex64 = (col.adjoint() * u * col)[(0, 0)];
            let unit = if lam.norm() > 0.0 { lam / lam.norm() } else { ONE };
            (branch_angle(unit.arg(), cut), unit, j)
        })
        .collect();
    pairs.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap());

    let values: Vec<Complex64> = pairs.iter().map(|p| p.1).collect();
    let mut sorted_vectors = CMatrix::zeros(n, n);
    for (dst, p) in pairs.iter().enumerate() {
        sorted_vectors.set_column(dst, &vectors.column(p.2));
    }
    fix_column_phases(&mut sorted_vectors);

    let min_gap = min_pairwise_complex(&values);
    Ok(EigenSystem {
        values,
        vectors: sorted_vectors,
        min_gap,
        degenerate: min_gap < tol::DEGENERACY,
    })
}
