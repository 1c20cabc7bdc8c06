//! Named states and scenarios.

use num_complex::Complex64;

use crate::entropy::{JointProb, ProbVector};
use crate::qmath::{ComplexMatrix, DensityMatrix};

/// `|β00> = (|00> + |11>)/√2`.
pub fn bell() -> DensityMatrix {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    DensityMatrix::pure_real(&[h, 0.0, 0.0, h]).expect("normalized ket")
}

/// `(|000> + |111>)/√2`.
pub fn ghz() -> DensityMatrix {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let mut amps = [0.0; 8];
    amps[0] = h;
    amps[7] = h;
    DensityMatrix::pure_real(&amps).expect("normalized ket")
}

/// `(|00><00| + |11><11|)/2`.
pub fn classical_corr() -> DensityMatrix {
    DensityMatrix::diagonal(&[0.5, 0.0, 0.0, 0.5]).expect("valid diagonal")
}

pub fn maximally_mixed(dim: usize) -> DensityMatrix {
    DensityMatrix::maximally_mixed(dim)
}

/// `|+> = (|0> + |1>)/√2`.
pub fn plus() -> DensityMatrix {
    DensityMatrix::pure_real(&[1.0, 1.0]).expect("nonzero ket")
}

/// `p |β00><β00| + (1 - p) 1/4` for `p` in `[-1/3, 1]`.
pub fn werner(p: f64) -> DensityMatrix {
    let m = &bell().matrix().scale_real(p) + &ComplexMatrix::identity(4).scale_real((1.0 - p) / 4.0);
    crate::qmath::validate_density(&m).expect("Werner parameter out of range")
}

/// Pure state from complex amplitudes, normalized.
pub fn pure(ket: &[Complex64]) -> crate::Result<DensityMatrix> {
    DensityMatrix::pure(ket)
}

/// Number of roulette slots, `00, 0, 1, ..., 36`.
pub const ROULETTE_SLOTS: usize = 38;

/// American roulette with a binary hint: given `B = 0` the first 19 slots
/// each have probability `2/57` and the last 19 `1/57`; `B = 1` swaps the
/// halves. `B` is uniform, so `A` alone is uniform over 38 slots.
///
/// Layout is `(slot, hint)` row-major, 38 x 2.
pub fn american_roulette() -> JointProb {
    let half = ROULETTE_SLOTS / 2;
    let mut probs = Vec::with_capacity(ROULETTE_SLOTS * 2);
    for i in 0..ROULETTE_SLOTS {
        let (p0, p1) = if i < half { (2.0, 1.0) } else { (1.0, 2.0) };
        probs.push(p0 / 114.0);
        probs.push(p1 / 114.0);
    }
    JointProb::new(ProbVector::new(probs).expect("sums to one"), ROULETTE_SLOTS, 2).expect("38 x 2")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BuiltinKind {
    /// A density matrix with subsystem dimensions.
    State,
    /// A classical joint distribution over `(A, B)`.
    Joint,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Builtin {
    pub name: &'static str,
    pub kind: BuiltinKind,
    pub dims: &'static [usize],
    pub description: &'static str,
}

pub const BUILTINS: &[Builtin] = &[
    Builtin {
        name: "bell",
        kind: BuiltinKind::State,
        dims: &[2, 2],
        description: "maximally entangled pair (|00> + |11>)/sqrt2",
    },
    Builtin {
        name: "ghz",
        kind: BuiltinKind::State,
        dims: &[2, 2, 2],
        description: "three-qubit state (|000> + |111>)/sqrt2",
    },
    Builtin {
        name: "classical-corr",
        kind: BuiltinKind::State,
        dims: &[2, 2],
        description: "perfectly correlated classical bit (|00><00| + |11><11|)/2",
    },
    Builtin {
        name: "maximally-mixed",
        kind: BuiltinKind::State,
        dims: &[2, 2],
        description: "two-qubit identity / 4",
    },
    Builtin {
        name: "american-roulette",
        kind: BuiltinKind::Joint,
        dims: &[38, 2],
        description: "38-slot wheel with a binary hint favouring one half of the slots",
    },
];

pub fn find_builtin(name: &str) -> Option<&'static Builtin> {
    BUILTINS.iter().find(|b| b.name == name)
}

/// The density matrix of a builtin state, or `None` for unknown names and
/// classical scenarios.
pub fn builtin_state(name: &str) -> Option<DensityMatrix> {
    match name {
        "bell" => Some(bell()),
        "ghz" => Some(ghz()),
        "classical-corr" => Some(classical_corr()),
        "maximally-mixed" => Some(maximally_mixed(4)),
        _ => None,
    }
}

pub fn builtin_joint(name: &str) -> Option<JointProb> {
    match name {
        "american-roulette" => Some(american_roulette()),
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::entropy::von_neumann_entropy;

    #[test]
    fn builtin_table_matches_constructors() {
        for b in BUILTINS {
            match b.kind {
                BuiltinKind::State => {
                    let rho = builtin_state(b.name).unwrap();
                    assert_eq!(rho.dim(), b.dims.iter().product::<usize>(), "{}", b.name);
                }
                BuiltinKind::Joint => {
                    let j = builtin_joint(b.name).unwrap();
                    assert_eq!([j.rows(), j.cols()], [b.dims[0], b.dims[1]]);
                }
            }
        }
        assert!(find_builtin("nope").is_none());
    }

    #[test]
    fn pure_builtins() {
        assert!(von_neumann_entropy(&bell()).unwrap().abs() < 1e-12);
        assert!(von_neumann_entropy(&ghz()).unwrap().abs() < 1e-12);
        assert!((von_neumann_entropy(&classical_corr()).unwrap() - 1.0).abs() < 1e-12);
        assert!((von_neumann_entropy(&werner(0.0)).unwrap() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn roulette_conditionals() {
        let j = american_roulette();
        let b = j.marginal_b();
        assert!((b[0] - 0.5).abs() < 1e-15);
        let a = j.marginal_a();
        assert!(a.as_slice().iter().all(|p| (p - 1.0 / 38.0).abs() < 1e-15));
        let c0 = j.conditional_a_given_b(0).unwrap();
        assert!((c0[0] - 2.0 / 57.0).abs() < 1e-15 && (c0[37] - 1.0 / 57.0).abs() < 1e-15);
        let c1 = j.conditional_a_given_b(1).unwrap();
        assert!((c1[0] - 1.0 / 57.0).abs() < 1e-15 && (c1[37] - 2.0 / 57.0).abs() < 1e-15);
    }
}
