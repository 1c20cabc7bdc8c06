//! Classical and quantum entropy functionals, in bits.
//!
//! `0 log 0` is taken to be `0` everywhere.

use crate::qmath::{partial_trace, DensityMatrix, TOL_PSD};
use crate::{Error, Result};

/// Max `|Σ p_i - 1|` accepted for a probability vector.
pub const TOL_SUM: f64 = 1e-10;

/// Probability vector over a finite outcome set.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbVector(Vec<f64>);

impl ProbVector {
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        if probs.is_empty() {
            return Err(Error::InvalidProbabilities("empty vector".into()));
        }
        if let Some(i) = probs.iter().position(|p| !p.is_finite() || *p < 0.0) {
            return Err(Error::InvalidProbabilities(format!(
                "entry {i} is {} (must be a finite nonnegative number)",
                probs[i]
            )));
        }
        let sum: f64 = probs.iter().sum();
        if (sum - 1.0).abs() > TOL_SUM {
            return Err(Error::InvalidProbabilities(format!("entries sum to {sum}")));
        }
        Ok(Self(probs))
    }

    pub fn uniform(n: usize) -> Self {
        assert!(n > 0);
        Self(vec![1.0 / n as f64; n])
    }

    /// Point mass on outcome `k` of `n`.
    pub fn delta(n: usize, k: usize) -> Self {
        assert!(k < n);
        let mut v = vec![0.0; n];
        v[k] = 1.0;
        Self(v)
    }

    /// Clamps entries in `[-TOL_PSD, 0)` to zero and renormalizes when the sum
    /// is within `sum_tol` of one. Used for probabilities computed as traces.
    pub fn from_clamped(mut probs: Vec<f64>, sum_tol: f64) -> Result<Self> {
        for (i, p) in probs.iter_mut().enumerate() {
            if *p < 0.0 {
                if *p >= -TOL_PSD {
                    *p = 0.0;
                } else {
                    return Err(Error::InvalidProbabilities(format!("entry {i} is {p}")));
                }
            }
        }
        let sum: f64 = probs.iter().sum();
        if !sum.is_finite() || (sum - 1.0).abs() > sum_tol {
            return Err(Error::InvalidProbabilities(format!("entries sum to {sum}")));
        }
        for p in &mut probs {
            *p /= sum;
        }
        Self::new(probs)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }
}

impl std::ops::Index<usize> for ProbVector {
    type Output = f64;

    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

/// Joint distribution of `(A, B)` stored row-major: entry `(i, j)` at `i * m + j`.
#[derive(Debug, Clone, PartialEq)]
pub struct JointProb {
    probs: ProbVector,
    n: usize,
    m: usize,
}

impl JointProb {
    pub fn new(probs: ProbVector, n: usize, m: usize) -> Result<Self> {
        if n == 0 || m == 0 || probs.len() != n * m {
            return Err(Error::DimensionMismatch(format!(
                "joint of length {} is not {n}x{m}",
                probs.len()
            )));
        }
        Ok(Self { probs, n, m })
    }

    /// Joint distribution `P(A=i) P(B=j)`.
    pub fn independent(a: &ProbVector, b: &ProbVector) -> Self {
        let mut v = Vec::with_capacity(a.len() * b.len());
        for &pa in a.as_slice() {
            for &pb in b.as_slice() {
                v.push(pa * pb);
            }
        }
        Self {
            probs: ProbVector(v),
            n: a.len(),
            m: b.len(),
        }
    }

    pub fn rows(&self) -> usize {
        self.n
    }

    pub fn cols(&self) -> usize {
        self.m
    }

    pub fn probs(&self) -> &ProbVector {
        &self.probs
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.probs[i * self.m + j]
    }

    pub fn marginal_a(&self) -> ProbVector {
        ProbVector(
            (0..self.n)
                .map(|i| (0..self.m).map(|j| self.get(i, j)).sum())
                .collect(),
        )
    }

    pub fn marginal_b(&self) -> ProbVector {
        ProbVector(
            (0..self.m)
                .map(|j| (0..self.n).map(|i| self.get(i, j)).sum())
                .collect(),
        )
    }

    /// `P(A = · | B = j)`, or `None` when `P(B = j) = 0`.
    pub fn conditional_a_given_b(&self, j: usize) -> Option<ProbVector> {
        let pb: f64 = (0..self.n).map(|i| self.get(i, j)).sum();
        if pb <= 0.0 {
            return None;
        }
        Some(ProbVector((0..self.n).map(|i| self.get(i, j) / pb).collect()))
    }
}

/// Relative entropy value; `Infinite` when the support condition fails.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Divergence {
    Finite(f64),
    Infinite,
}

impl Divergence {
    pub fn bits(self) -> f64 {
        match self {
            Divergence::Finite(x) => x,
            Divergence::Infinite => f64::INFINITY,
        }
    }

    pub fn is_finite(self) -> bool {
        matches!(self, Divergence::Finite(_))
    }
}

fn plogp(p: f64) -> f64 {
    if p > 0.0 {
        p * p.log2()
    } else {
        0.0
    }
}

/// `H(p) = -Σ p_i log p_i`.
pub fn shannon_entropy(p: &ProbVector) -> f64 {
    shannon_entropy_raw(p.as_slice())
}

pub(crate) fn shannon_entropy_raw(p: &[f64]) -> f64 {
    let h = -p.iter().map(|&x| plogp(x)).sum::<f64>();
    // -0.0 for deterministic inputs
    h.max(0.0)
}

/// `D(p || q) = Σ p_i log(p_i / q_i)`.
pub fn relative_entropy(p: &ProbVector, q: &ProbVector) -> Result<Divergence> {
    relative_entropy_raw(p.as_slice(), q.as_slice())
}

pub(crate) fn relative_entropy_raw(p: &[f64], q: &[f64]) -> Result<Divergence> {
    if p.len() != q.len() {
        return Err(Error::LengthMismatch {
            left: p.len(),
            right: q.len(),
        });
    }
    let mut acc = 0.0;
    for (&pi, &qi) in p.iter().zip(q) {
        if pi <= 0.0 {
            continue;
        }
        if qi <= 0.0 {
            return Ok(Divergence::Infinite);
        }
        acc += pi * (pi / qi).log2();
    }
    Ok(Divergence::Finite(acc))
}

/// Entropy of a spectrum, clamping eigenvalues in `[-TOL_PSD, 0)` to zero.
pub fn spectral_entropy(eigenvalues: &[f64]) -> Result<f64> {
    let mut acc = 0.0;
    for &l in eigenvalues {
        if l < -TOL_PSD {
            return Err(Error::NotPsd { min_eigenvalue: l });
        }
        acc -= plogp(l.max(0.0));
    }
    Ok(acc.max(0.0))
}

/// `S(ρ) = -Tr ρ log ρ`.
pub fn von_neumann_entropy(rho: &DensityMatrix) -> Result<f64> {
    spectral_entropy(&rho.spectrum()?.eigenvalues)
}

fn bipartite(rho_ab: &DensityMatrix, dims: [usize; 2]) -> Result<()> {
    if dims[0] == 0 || dims[1] == 0 || dims[0] * dims[1] != rho_ab.dim() {
        return Err(Error::DimensionMismatch(format!(
            "dims {dims:?} do not match a state of dimension {}",
            rho_ab.dim()
        )));
    }
    Ok(())
}

/// `S(A|B) = S(A,B) - S(B)`; subsystem A is the left factor.
pub fn quantum_conditional_entropy(rho_ab: &DensityMatrix, dims: [usize; 2]) -> Result<f64> {
    bipartite(rho_ab, dims)?;
    let rho_b = partial_trace(rho_ab, &dims, &[1])?;
    Ok(von_neumann_entropy(rho_ab)? - von_neumann_entropy(&rho_b)?)
}

/// `S(A:B) = S(A) + S(B) - S(A,B)`.
pub fn quantum_mutual_information(rho_ab: &DensityMatrix, dims: [usize; 2]) -> Result<f64> {
    bipartite(rho_ab, dims)?;
    let rho_a = partial_trace(rho_ab, &dims, &[0])?;
    let rho_b = partial_trace(rho_ab, &dims, &[1])?;
    Ok(von_neumann_entropy(&rho_a)? + von_neumann_entropy(&rho_b)? - von_neumann_entropy(rho_ab)?)
}

/// `H(A|B) = Σ_j P(B=j) H(A | B=j)`.
pub fn classical_conditional_entropy(joint: &JointProb) -> f64 {
    let pb = joint.marginal_b();
    (0..joint.cols())
        .filter_map(|j| {
            joint
                .conditional_a_given_b(j)
                .map(|cond| pb[j] * shannon_entropy(&cond))
        })
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qmath::ComplexMatrix;

    fn pv(v: &[f64]) -> ProbVector {
        ProbVector::new(v.to_vec()).unwrap()
    }

    #[test]
    fn shannon_examples() {
        assert_eq!(shannon_entropy(&pv(&[0.5, 0.5])), 1.0);
        assert_eq!(shannon_entropy(&pv(&[1.0, 0.0])), 0.0);
        // -0.9 log 0.9 - 0.1 log 0.1
        assert!((shannon_entropy(&pv(&[0.9, 0.1])) - 0.468_995_593_589_281_2).abs() < 1e-15);
    }

    #[test]
    fn prob_vector_validation() {
        assert!(ProbVector::new(vec![]).is_err());
        assert!(ProbVector::new(vec![0.5, 0.6]).is_err());
        assert!(ProbVector::new(vec![1.5, -0.5]).is_err());
        assert!(ProbVector::new(vec![f64::NAN, 1.0]).is_err());
        assert!(ProbVector::from_clamped(vec![1.0 + 1e-11, -1e-11], 1e-9).is_ok());
        assert!(ProbVector::from_clamped(vec![1.1, -0.1], 1e-9).is_err());
    }

    #[test]
    fn relative_entropy_examples() {
        let p = pv(&[0.2, 0.3, 0.5]);
        assert_eq!(relative_entropy(&p, &p).unwrap(), Divergence::Finite(0.0));
        assert_eq!(
            relative_entropy(&pv(&[1.0, 0.0]), &pv(&[0.5, 0.5])).unwrap(),
            Divergence::Finite(1.0)
        );
        assert_eq!(
            relative_entropy(&pv(&[0.5, 0.5]), &pv(&[1.0, 0.0])).unwrap(),
            Divergence::Infinite
        );
        assert!(matches!(
            relative_entropy(&pv(&[1.0]), &pv(&[0.5, 0.5])),
            Err(Error::LengthMismatch { .. })
        ));
    }

    #[test]
    fn von_neumann_examples() {
        assert_eq!(von_neumann_entropy(&DensityMatrix::basis(2, 0)).unwrap(), 0.0);
        assert!((von_neumann_entropy(&DensityMatrix::maximally_mixed(2)).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn spectral_entropy_clamps_tiny_negatives_only() {
        assert_eq!(spectral_entropy(&[1.0, -5e-11]).unwrap(), 0.0);
        assert!(matches!(spectral_entropy(&[1.1, -0.1]), Err(Error::NotPsd { .. })));
    }

    #[test]
    fn bell_pair_entropies() {
        let bell = DensityMatrix::pure_real(&[1.0, 0.0, 0.0, 1.0]).unwrap();
        assert!(von_neumann_entropy(&bell).unwrap().abs() < 1e-12);
        let rho_b = partial_trace(&bell, &[2, 2], &[1]).unwrap();
        assert!((von_neumann_entropy(&rho_b).unwrap() - 1.0).abs() < 1e-12);
        assert!((quantum_conditional_entropy(&bell, [2, 2]).unwrap() + 1.0).abs() < 1e-12);
        assert!((quantum_mutual_information(&bell, [2, 2]).unwrap() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn classically_correlated_state() {
        let rho = DensityMatrix::diagonal(&[0.5, 0.0, 0.0, 0.5]).unwrap();
        assert!(quantum_conditional_entropy(&rho, [2, 2]).unwrap().abs() < 1e-12);
        assert!((quantum_mutual_information(&rho, [2, 2]).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn product_state_quantities() {
        let a = DensityMatrix::diagonal(&[0.7, 0.3]).unwrap();
        let b = DensityMatrix::maximally_mixed(2);
        let ab = a.tensor(&b);
        let s_a = von_neumann_entropy(&a).unwrap();
        assert!((quantum_conditional_entropy(&ab, [2, 2]).unwrap() - s_a).abs() < 1e-12);
        assert!(quantum_mutual_information(&ab, [2, 2]).unwrap().abs() < 1e-12);
        assert!(quantum_mutual_information(&ab, [2, 3]).is_err());
    }

    #[test]
    fn conditional_entropy_examples() {
        let p = pv(&[0.2, 0.8]);
        let q = pv(&[0.1, 0.6, 0.3]);
        let joint = JointProb::independent(&p, &q);
        assert!((classical_conditional_entropy(&joint) - shannon_entropy(&p)).abs() < 1e-12);
        let diag = JointProb::new(pv(&[0.3, 0.0, 0.0, 0.7]), 2, 2).unwrap();
        assert_eq!(classical_conditional_entropy(&diag), 0.0);
        assert!(JointProb::new(pv(&[0.5, 0.5]), 2, 2).is_err());
    }

    #[test]
    fn rejects_non_state_in_entropy() {
        let m = ComplexMatrix::diagonal(&[1.0, 0.0]);
        let rho = crate::qmath::validate_density(&m).unwrap();
        assert_eq!(von_neumann_entropy(&rho).unwrap(), 0.0);
    }
}
