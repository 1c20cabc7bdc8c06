//! Hermitian eigendecomposition by cyclic complex Jacobi rotations.
//!
//! Each rotation first removes the phase of the pivot `a_pq` with a diagonal
//! unitary and then applies a real plane rotation that annihilates it. The
//! accumulated product of the rotations gives the eigenvectors. At the sizes
//! used here (dim <= 64, usually 2..8) this is accurate to a few ulps of the
//! matrix norm and needs no pivoting heuristics.

use std::cmp::Ordering;

use num_complex::Complex64;

use super::matrix::ComplexMatrix;
use super::TOL_HERMITIAN;
use crate::{Error, Result};

/// Maximum number of full sweeps over the strict upper triangle.
pub const MAX_SWEEPS: usize = 100;

/// Off-diagonal Frobenius norm, relative to `max(1, ||M||_F)`, below which the
/// iteration stops.
pub const OFF_DIAGONAL_THRESHOLD: f64 = 1e-12;

/// Relative gap below which two eigenvalues are treated as degenerate for
/// ordering purposes.
const TIE_TOLERANCE: f64 = 1e-12;

/// Eigenvalues in descending order with matching orthonormal eigenvector
/// columns.
#[derive(Debug, Clone)]
pub struct Spectrum {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: ComplexMatrix,
}

impl Spectrum {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn eigenvector(&self, k: usize) -> Vec<Complex64> {
        self.eigenvectors.column(k)
    }

    /// `V diag(f(λ)) V^dagger`.
    pub fn map(&self, f: impl Fn(f64) -> Complex64) -> ComplexMatrix {
        let n = self.dim();
        let v = &self.eigenvectors;
        let mut out = ComplexMatrix::zeros(n, n);
        for (k, &lambda) in self.eigenvalues.iter().enumerate() {
            let fk = f(lambda);
            for i in 0..n {
                let vik = v[(i, k)] * fk;
                for j in 0..n {
                    out[(i, j)] += vik * v[(j, k)].conj();
                }
            }
        }
        out
    }

    /// `V Λ V^dagger`.
    pub fn reconstruct(&self) -> ComplexMatrix {
        self.map(|l| Complex64::new(l, 0.0))
    }

    /// Rank-one projectors onto the eigenvectors, in eigenvalue order.
    pub fn projectors(&self) -> Vec<ComplexMatrix> {
        (0..self.dim())
            .map(|k| ComplexMatrix::projector(&self.eigenvector(k)))
            .collect()
    }
}

/// Eigendecomposition of a Hermitian matrix.
///
/// The result is deterministic: eigenvectors are phase-normalized so their
/// first nonzero component is real and positive, sorted by descending
/// eigenvalue, and degenerate eigenvalues are ordered by descending
/// lexicographic `(re, im)` order of their normalized eigenvectors.
pub fn eig_hermitian(m: &ComplexMatrix) -> Result<Spectrum> {
    if !m.is_square() {
        return Err(Error::DimensionMismatch(format!(
            "eigendecomposition needs a square matrix, got {}x{}",
            m.rows(),
            m.cols()
        )));
    }
    let deviation = m.hermitian_deviation();
    if deviation > TOL_HERMITIAN {
        return Err(Error::NotHermitian { deviation });
    }

    let n = m.rows();
    let mut a = m.hermitian_part();
    let mut v = ComplexMatrix::identity(n);
    let scale = a.frobenius_norm().max(1.0);

    let mut converged = false;
    for sweep in 0..MAX_SWEEPS {
        if off_diagonal_norm(&a) <= OFF_DIAGONAL_THRESHOLD * scale {
            converged = true;
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let b = a[(p, q)];
                let g = b.norm();
                if g == 0.0 {
                    continue;
                }
                let app = a[(p, p)].re;
                let aqq = a[(q, q)].re;
                // Pivot below the resolution of both diagonal entries.
                if sweep > 3 && app.abs() + 100.0 * g == app.abs() && aqq.abs() + 100.0 * g == aqq.abs()
                {
                    a[(p, q)] = Complex64::new(0.0, 0.0);
                    a[(q, p)] = Complex64::new(0.0, 0.0);
                    continue;
                }
                rotate(&mut a, &mut v, p, q, b, g);
            }
        }
    }
    if !converged {
        let off_norm = off_diagonal_norm(&a);
        if off_norm > OFF_DIAGONAL_THRESHOLD * scale {
            return Err(Error::NoConvergence {
                sweeps: MAX_SWEEPS,
                off_norm,
            });
        }
    }

    let eigenvalues: Vec<f64> = (0..n).map(|i| a[(i, i)].re).collect();
    let vectors: Vec<Vec<Complex64>> = (0..n).map(|k| phase_normalized(v.column(k))).collect();
    Ok(ordered_spectrum(eigenvalues, vectors))
}

fn off_diagonal_norm(a: &ComplexMatrix) -> f64 {
    let n = a.rows();
    let mut acc = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                acc += a[(i, j)].norm_sqr();
            }
        }
    }
    acc.sqrt()
}

/// Applies `A <- U^dagger A U`, `V <- V U` for the rotation annihilating `a_pq`.
fn rotate(a: &mut ComplexMatrix, v: &mut ComplexMatrix, p: usize, q: usize, b: Complex64, g: f64) {
    let n = a.rows();
    let app = a[(p, p)].re;
    let aqq = a[(q, q)].re;
    let phase = b / g;
    let theta = (aqq - app) / (2.0 * g);
    let t = if theta.abs() > 1e150 {
        0.5 / theta
    } else {
        let sign = if theta >= 0.0 { 1.0 } else { -1.0 };
        sign / (theta.abs() + (theta * theta + 1.0).sqrt())
    };
    let c = 1.0 / (t * t + 1.0).sqrt();
    let s = t * c;
    let phase_c = phase.conj();

    // A <- A U on columns p, q.
    for k in 0..n {
        let akp = a[(k, p)];
        let akq = a[(k, q)];
        a[(k, p)] = akp * c - akq * phase_c * s;
        a[(k, q)] = akp * s + akq * phase_c * c;
    }
    // A <- U^dagger A on rows p, q.
    for k in 0..n {
        let apk = a[(p, k)];
        let aqk = a[(q, k)];
        a[(p, k)] = apk * c - aqk * phase * s;
        a[(q, k)] = apk * s + aqk * phase * c;
    }
    a[(p, p)] = Complex64::new(app - t * g, 0.0);
    a[(q, q)] = Complex64::new(aqq + t * g, 0.0);
    a[(p, q)] = Complex64::new(0.0, 0.0);
    a[(q, p)] = Complex64::new(0.0, 0.0);

    for k in 0..n {
        let vkp = v[(k, p)];
        let vkq = v[(k, q)];
        v[(k, p)] = vkp * c - vkq * phase_c * s;
        v[(k, q)] = vkp * s + vkq * phase_c * c;
    }
}

fn phase_normalized(mut vec: Vec<Complex64>) -> Vec<Complex64> {
    let norm = vec.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if norm == 0.0 {
        return vec;
    }
    if let Some(lead) = vec.iter().find(|z| z.norm() > 1e-12 * norm).copied() {
        let rot = lead.conj() / (lead.norm() * norm);
        for z in &mut vec {
            *z *= rot;
        }
    }
    vec
}

fn lex_desc(a: &[Complex64], b: &[Complex64]) -> Ordering {
    for (x, y) in a.iter().zip(b) {
        let ord = y.re.total_cmp(&x.re).then(y.im.total_cmp(&x.im));
        if ord != Ordering::Equal {
            return ord;
        }
    }
    Ordering::Equal
}

fn ordered_spectrum(eigenvalues: Vec<f64>, vectors: Vec<Vec<Complex64>>) -> Spectrum {
    let n = eigenvalues.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eigenvalues[j].total_cmp(&eigenvalues[i]));

    let scale = eigenvalues.iter().fold(1.0_f64, |m, x| m.max(x.abs()));
    let mut start = 0;
    while start < n {
        let mut end = start + 1;
        while end < n && eigenvalues[order[end - 1]] - eigenvalues[order[end]] <= TIE_TOLERANCE * scale {
            end += 1;
        }
        order[start..end].sort_by(|&i, &j| lex_desc(&vectors[i], &vectors[j]));
        start = end;
    }

    let mut eigenvectors = ComplexMatrix::zeros(n, n);
    for (col, &k) in order.iter().enumerate() {
        for (row, z) in vectors[k].iter().enumerate() {
            eigenvectors[(row, col)] = *z;
        }
    }
    Spectrum {
        eigenvalues: order.iter().map(|&k| eigenvalues[k]).collect(),
        eigenvectors,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn identity_spectrum() {
        let s = eig_hermitian(&ComplexMatrix::identity(2)).unwrap();
        assert_eq!(s.eigenvalues, vec![1.0, 1.0]);
        assert_eq!(s.eigenvectors, ComplexMatrix::identity(2));
    }

    #[test]
    fn diagonal_is_sorted() {
        let s = eig_hermitian(&ComplexMatrix::diagonal(&[0.3, 0.7])).unwrap();
        assert_eq!(s.eigenvalues, vec![0.7, 0.3]);
        assert_eq!(s.eigenvector(0), vec![c(0.0, 0.0), c(1.0, 0.0)]);
    }

    #[test]
    fn pauli_x() {
        // Characteristic polynomial λ² - 1 = 0.
        let x = ComplexMatrix::from_real(2, 2, &[0.0, 1.0, 1.0, 0.0]).unwrap();
        let s = eig_hermitian(&x).unwrap();
        assert!((s.eigenvalues[0] - 1.0).abs() < 1e-14);
        assert!((s.eigenvalues[1] + 1.0).abs() < 1e-14);
        let h = std::f64::consts::FRAC_1_SQRT_2;
        assert!((s.eigenvector(0)[0] - c(h, 0.0)).norm() < 1e-14);
        assert!((s.eigenvector(0)[1] - c(h, 0.0)).norm() < 1e-14);
        assert!((s.eigenvector(1)[0] - c(h, 0.0)).norm() < 1e-14);
        assert!((s.eigenvector(1)[1] - c(-h, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn pauli_y_complex_pivot() {
        let y = ComplexMatrix::from_vec(2, 2, vec![c(0.0, 0.0), c(0.0, -1.0), c(0.0, 1.0), c(0.0, 0.0)])
            .unwrap();
        let s = eig_hermitian(&y).unwrap();
        assert!((s.eigenvalues[0] - 1.0).abs() < 1e-14);
        assert!(s.reconstruct().max_abs_diff(&y) < 1e-14);
    }

    #[test]
    fn rejects_non_hermitian() {
        let m = ComplexMatrix::from_real(2, 2, &[0.0, 1.0, 0.0, 0.0]).unwrap();
        assert!(matches!(eig_hermitian(&m), Err(Error::NotHermitian { .. })));
    }

    #[test]
    fn rejects_non_square() {
        let m = ComplexMatrix::zeros(2, 3);
        assert!(matches!(eig_hermitian(&m), Err(Error::DimensionMismatch(_))));
    }

    #[test]
    fn degenerate_block_is_deterministic() {
        // diag(1, 1, 0) rotated in the first two coordinates: any basis of the
        // degenerate plane is valid, the reported one must not depend on the
        // rotation.
        let base = ComplexMatrix::diagonal(&[1.0, 1.0, 0.0]);
        let s = eig_hermitian(&base).unwrap();
        assert_eq!(s.eigenvector(0), vec![c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)]);
        assert_eq!(s.eigenvector(1), vec![c(0.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)]);
        let again = eig_hermitian(&base).unwrap();
        assert_eq!(s.eigenvectors, again.eigenvectors);
    }
}
