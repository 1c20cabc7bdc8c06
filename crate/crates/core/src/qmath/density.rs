use num_complex::Complex64;

use super::eigen::{eig_hermitian, Spectrum};
use super::matrix::ComplexMatrix;
use super::{TOL_HERMITIAN, TOL_PSD, TOL_TRACE};
use crate::{Error, Result};

/// Trace-one positive-semidefinite Hermitian matrix.
///
/// Construct with [`validate_density`] or one of the named constructors; the
/// stored matrix is always exactly Hermitian.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    matrix: ComplexMatrix,
}

impl DensityMatrix {
    /// Wraps a matrix already known to be a valid state, symmetrizing it.
    pub(crate) fn from_trusted(matrix: ComplexMatrix) -> Self {
        debug_assert!(matrix.is_square());
        Self {
            matrix: matrix.hermitian_part(),
        }
    }

    /// Normalized pure state `|ψ><ψ|`.
    pub fn pure(ket: &[Complex64]) -> Result<Self> {
        let norm_sq: f64 = ket.iter().map(|z| z.norm_sqr()).sum();
        if ket.is_empty() || norm_sq == 0.0 || !norm_sq.is_finite() {
            return Err(Error::InvalidArgument("ket must be a nonzero finite vector".into()));
        }
        let scaled: Vec<Complex64> = ket.iter().map(|z| z / norm_sq.sqrt()).collect();
        Ok(Self::from_trusted(ComplexMatrix::projector(&scaled)))
    }

    /// Pure state from real amplitudes.
    pub fn pure_real(amplitudes: &[f64]) -> Result<Self> {
        let ket: Vec<Complex64> = amplitudes.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        Self::pure(&ket)
    }

    /// Computational basis state `|k><k|`.
    pub fn basis(dim: usize, k: usize) -> Self {
        assert!(k < dim, "basis index out of range");
        let mut m = ComplexMatrix::zeros(dim, dim);
        m[(k, k)] = Complex64::new(1.0, 0.0);
        Self { matrix: m }
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        assert!(dim > 0);
        Self {
            matrix: ComplexMatrix::identity(dim).scale_real(1.0 / dim as f64),
        }
    }

    /// Diagonal state with the given probabilities.
    pub fn diagonal(probs: &[f64]) -> Result<Self> {
        validate_density(&ComplexMatrix::diagonal(probs))
    }

    /// Convex combination `Σ w_k ρ_k`.
    pub fn mixture(weights: &[f64], states: &[DensityMatrix]) -> Result<Self> {
        if weights.len() != states.len() || states.is_empty() {
            return Err(Error::LengthMismatch {
                left: weights.len(),
                right: states.len(),
            });
        }
        let dim = states[0].dim();
        let mut acc = ComplexMatrix::zeros(dim, dim);
        for (w, s) in weights.iter().zip(states) {
            if s.dim() != dim {
                return Err(Error::DimensionMismatch(format!(
                    "mixture of {dim}- and {}-dimensional states",
                    s.dim()
                )));
            }
            acc = &acc + &s.matrix.scale_real(*w);
        }
        validate_density(&acc)
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }

    pub fn spectrum(&self) -> Result<Spectrum> {
        eig_hermitian(&self.matrix)
    }

    /// `ρ_self ⊗ ρ_other`.
    pub fn tensor(&self, other: &DensityMatrix) -> DensityMatrix {
        Self::from_trusted(self.matrix.kron(&other.matrix))
    }

    /// `U ρ U^dagger`. The caller guarantees `U` is unitary.
    pub fn conjugate_by(&self, unitary: &ComplexMatrix) -> DensityMatrix {
        Self::from_trusted(&(unitary * &self.matrix) * &unitary.adjoint())
    }
}

/// Checks that `m` is a density matrix.
///
/// A matrix within `TOL_HERMITIAN` of Hermitian is replaced by its Hermitian
/// part; nothing else is repaired.
pub fn validate_density(m: &ComplexMatrix) -> Result<DensityMatrix> {
    if !m.is_square() {
        return Err(Error::DimensionMismatch(format!(
            "density matrix must be square, got {}x{}",
            m.rows(),
            m.cols()
        )));
    }
    if m.as_slice().iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::InvalidArgument("matrix has non-finite entries".into()));
    }
    let deviation = m.hermitian_deviation();
    if deviation > TOL_HERMITIAN {
        return Err(Error::NotHermitian { deviation });
    }
    let h = m.hermitian_part();
    let trace = h.trace().re;
    if (trace - 1.0).abs() > TOL_TRACE {
        return Err(Error::TraceNotOne { trace });
    }
    let spectrum = eig_hermitian(&h)?;
    let min_eigenvalue = spectrum.eigenvalues.last().copied().unwrap_or(0.0);
    if min_eigenvalue < -TOL_PSD {
        return Err(Error::NotPsd { min_eigenvalue });
    }
    Ok(DensityMatrix { matrix: h })
}

fn check_subsystems(total: usize, dims: &[usize], keep: &[usize]) -> Result<()> {
    if dims.is_empty() || dims.contains(&0) {
        return Err(Error::DimensionMismatch("subsystem dims must be positive".into()));
    }
    let product: usize = dims.iter().product();
    if product != total {
        return Err(Error::DimensionMismatch(format!(
            "subsystem dims {dims:?} multiply to {product}, matrix has dim {total}"
        )));
    }
    if keep.is_empty() {
        return Err(Error::DimensionMismatch("keep set is empty".into()));
    }
    for (k, &s) in keep.iter().enumerate() {
        if s >= dims.len() {
            return Err(Error::DimensionMismatch(format!(
                "subsystem {s} out of range for {} subsystems",
                dims.len()
            )));
        }
        if keep[..k].contains(&s) {
            return Err(Error::DimensionMismatch(format!("subsystem {s} listed twice")));
        }
    }
    Ok(())
}

/// Partial trace of an arbitrary square operator over every subsystem not in
/// `keep`. Kept subsystems appear in ascending index order, leftmost slowest.
pub fn partial_trace_operator(m: &ComplexMatrix, dims: &[usize], keep: &[usize]) -> Result<ComplexMatrix> {
    if !m.is_square() {
        return Err(Error::DimensionMismatch("partial trace needs a square matrix".into()));
    }
    check_subsystems(m.rows(), dims, keep)?;

    let n_sub = dims.len();
    let mut strides = vec![1usize; n_sub];
    for s in (0..n_sub.saturating_sub(1)).rev() {
        strides[s] = strides[s + 1] * dims[s + 1];
    }
    let mut kept: Vec<usize> = keep.to_vec();
    kept.sort_unstable();
    let traced: Vec<usize> = (0..n_sub).filter(|s| !kept.contains(s)).collect();

    let kept_dims: Vec<usize> = kept.iter().map(|&s| dims[s]).collect();
    let traced_dims: Vec<usize> = traced.iter().map(|&s| dims[s]).collect();
    let out_dim: usize = kept_dims.iter().product();
    let traced_total: usize = traced_dims.iter().product();

    // Offset into the full index contributed by a flat index over a subset.
    let offsets = |subset: &[usize], sub_dims: &[usize], total: usize| -> Vec<usize> {
        (0..total)
            .map(|mut flat| {
                let mut off = 0;
                for k in (0..subset.len()).rev() {
                    off += (flat % sub_dims[k]) * strides[subset[k]];
                    flat /= sub_dims[k];
                }
                off
            })
            .collect()
    };
    let kept_off = offsets(&kept, &kept_dims, out_dim);
    let traced_off = offsets(&traced, &traced_dims, traced_total);

    let mut out = ComplexMatrix::zeros(out_dim, out_dim);
    for (r, &ro) in kept_off.iter().enumerate() {
        for (c, &co) in kept_off.iter().enumerate() {
            out[(r, c)] = traced_off.iter().map(|&t| m[(ro + t, co + t)]).sum();
        }
    }
    Ok(out)
}

/// Reduced state on the subsystems listed in `keep`.
pub fn partial_trace(rho: &DensityMatrix, dims: &[usize], keep: &[usize]) -> Result<DensityMatrix> {
    partial_trace_operator(rho.matrix(), dims, keep).map(DensityMatrix::from_trusted)
}
