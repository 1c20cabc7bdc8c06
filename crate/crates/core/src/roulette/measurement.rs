use num_complex::Complex64;

use crate::qmath::{ComplexMatrix, Spectrum};
use crate::{Error, Result};

/// Tolerance for completeness and projector identities.
pub const TOL_MEASUREMENT: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MeasurementKind {
    /// Orthogonal projectors `E_i` with `Σ E_i = 1`.
    Projective,
    /// Measurement operators `F_j` with `Σ F_j^dagger F_j = 1`.
    Povm,
}

/// A complete set of measurement operators on one Hilbert space.
#[derive(Debug, Clone, PartialEq)]
pub struct Measurement {
    kind: MeasurementKind,
    operators: Vec<ComplexMatrix>,
}

fn check_shapes(operators: &[ComplexMatrix]) -> Result<usize> {
    let first = operators
        .first()
        .ok_or_else(|| Error::InvalidArgument("measurement needs at least one operator".into()))?;
    let dim = first.rows();
    for (k, op) in operators.iter().enumerate() {
        if op.rows() != dim || op.cols() != dim {
            return Err(Error::DimensionMismatch(format!(
                "operator {k} is {}x{}, expected {dim}x{dim}",
                op.rows(),
                op.cols()
            )));
        }
    }
    Ok(dim)
}

impl Measurement {
    /// Projective measurement; checks Hermiticity, `E_i E_j = δ_ij E_i` and
    /// completeness.
    pub fn projective(operators: Vec<ComplexMatrix>) -> Result<Self> {
        let dim = check_shapes(&operators)?;
        let mut deviation: f64 = 0.0;
        for (i, ei) in operators.iter().enumerate() {
            deviation = deviation.max(ei.hermitian_deviation());
            for (j, ej) in operators.iter().enumerate().skip(i) {
                let prod = ei * ej;
                let expected = if i == j { ei.clone() } else { ComplexMatrix::zeros(dim, dim) };
                deviation = deviation.max(prod.max_abs_diff(&expected));
            }
        }
        if deviation > TOL_MEASUREMENT {
            return Err(Error::NotProjective { deviation });
        }
        let sum = operators
            .iter()
            .fold(ComplexMatrix::zeros(dim, dim), |acc, e| &acc + e);
        let deviation = sum.max_abs_diff(&ComplexMatrix::identity(dim));
        if deviation > TOL_MEASUREMENT {
            return Err(Error::CompletenessViolated { deviation });
        }
        Ok(Self {
            kind: MeasurementKind::Projective,
            operators,
        })
    }

    /// General measurement from operators `F_j`; checks `Σ F_j^dagger F_j = 1`.
    pub fn povm(operators: Vec<ComplexMatrix>) -> Result<Self> {
        let dim = check_shapes(&operators)?;
        let sum = operators
            .iter()
            .fold(ComplexMatrix::zeros(dim, dim), |acc, f| &acc + &(&f.adjoint() * f));
        let deviation = sum.max_abs_diff(&ComplexMatrix::identity(dim));
        if deviation > TOL_MEASUREMENT {
            return Err(Error::CompletenessViolated { deviation });
        }
        Ok(Self {
            kind: MeasurementKind::Povm,
            operators,
        })
    }

    /// Rank-one projectors onto the columns of a unitary.
    pub fn from_basis(unitary: &ComplexMatrix) -> Result<Self> {
        let ops = (0..unitary.cols())
            .map(|k| ComplexMatrix::projector(&unitary.column(k)))
            .collect();
        Self::projective(ops)
    }

    /// Rank-one projectors onto a list of orthonormal kets.
    pub fn from_kets(kets: &[Vec<Complex64>]) -> Result<Self> {
        Self::projective(kets.iter().map(|k| ComplexMatrix::projector(k)).collect())
    }

    pub fn computational(dim: usize) -> Self {
        Self {
            kind: MeasurementKind::Projective,
            operators: (0..dim)
                .map(|k| {
                    let mut m = ComplexMatrix::zeros(dim, dim);
                    m[(k, k)] = Complex64::new(1.0, 0.0);
                    m
                })
                .collect(),
        }
    }

    /// The single-outcome measurement `{1}`.
    pub fn trivial(dim: usize) -> Self {
        Self {
            kind: MeasurementKind::Projective,
            operators: vec![ComplexMatrix::identity(dim)],
        }
    }

    /// Projectors onto the eigenvectors of a spectrum, in its order.
    pub fn eigenbasis(spectrum: &Spectrum) -> Self {
        Self {
            kind: MeasurementKind::Projective,
            operators: spectrum.projectors(),
        }
    }

    /// `{1 ⊗ M_j}` for a measurement `{M_j}` on the right factor.
    pub fn lift_right(&self, left_dim: usize) -> Self {
        let id = ComplexMatrix::identity(left_dim);
        Self {
            kind: self.kind,
            operators: self.operators.iter().map(|op| id.kron(op)).collect(),
        }
    }

    pub fn kind(&self) -> MeasurementKind {
        self.kind
    }

    pub fn dim(&self) -> usize {
        self.operators[0].rows()
    }

    /// Number of outcomes.
    pub fn len(&self) -> usize {
        self.operators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.operators.is_empty()
    }

    /// Operators as given: the projectors, or the Kraus-form `F_j`.
    pub fn operators(&self) -> &[ComplexMatrix] {
        &self.operators
    }

    /// Effects whose traces against a state give outcome probabilities:
    /// `E_i` or `F_j^dagger F_j`.
    pub fn effects(&self) -> Vec<ComplexMatrix> {
        match self.kind {
            MeasurementKind::Projective => self.operators.clone(),
            MeasurementKind::Povm => self.operators.iter().map(|f| &f.adjoint() * f).collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn computational_is_valid() {
        let m = Measurement::computational(3);
        assert!(Measurement::projective(m.operators().to_vec()).is_ok());
        assert_eq!(m.len(), 3);
    }

    #[test]
    fn incomplete_rejected() {
        let p0 = ComplexMatrix::diagonal(&[1.0, 0.0]);
        assert!(matches!(
            Measurement::projective(vec![p0.clone()]),
            Err(Error::CompletenessViolated { .. })
        ));
        assert!(matches!(
            Measurement::povm(vec![p0]),
            Err(Error::CompletenessViolated { .. })
        ));
    }

    #[test]
    fn overlapping_projectors_rejected() {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let plus = ComplexMatrix::projector(&[Complex64::new(h, 0.0), Complex64::new(h, 0.0)]);
        let zero = ComplexMatrix::diagonal(&[1.0, 0.0]);
        assert!(matches!(
            Measurement::projective(vec![zero, plus]),
            Err(Error::NotProjective { .. })
        ));
    }

    #[test]
    fn trine_povm() {
        // Scaled trine states: F_k = sqrt(2/3) |ψ_k><ψ_k| has F^dagger F = (2/3)|ψ_k><ψ_k|.
        let ops: Vec<ComplexMatrix> = (0..3)
            .map(|k| {
                let angle = 2.0 * std::f64::consts::PI * k as f64 / 3.0;
                let ket = [
                    Complex64::new((angle / 2.0).cos(), 0.0),
                    Complex64::new((angle / 2.0).sin(), 0.0),
                ];
                ComplexMatrix::projector(&ket).scale_real((2.0_f64 / 3.0).sqrt())
            })
            .collect();
        let m = Measurement::povm(ops).unwrap();
        assert_eq!(m.kind(), MeasurementKind::Povm);
        assert_eq!(m.effects().len(), 3);
    }

    #[test]
    fn shape_mismatch() {
        assert!(matches!(
            Measurement::projective(vec![ComplexMatrix::identity(2), ComplexMatrix::zeros(3, 3)]),
            Err(Error::DimensionMismatch(_))
        ));
        assert!(Measurement::projective(vec![]).is_err());
    }
}
