//! Two-system helper protocols.
//!
//! Alice gambles on `A`; Bob holds a correlated system `B` (right tensor
//! factor). Bob either measures `B` and reports the outcome (variant 1), or
//! leases `B` to Alice and keeps everything beyond `2^{K W_B}` of her wealth
//! (variant 2). At uniform odds the gap between the optimized variants is the
//! quantum discord of `ρ^{AB}`.

mod correlation;
pub mod nelder_mead;

pub use correlation::{
    classical_correlation, discord, variant1_rate_full_control, ClassicalCorrelation, DiscordReport,
    FullControlReport, MeasurementParams, OptimizerConfig, OptimizerTrace, RestartRecord,
};

use crate::entropy::{quantum_conditional_entropy, von_neumann_entropy, ProbVector};
use crate::kelly::{optimize_fair_superfair, require_fair_or_superfair, OddsVector};
use crate::qmath::{partial_trace, partial_trace_operator, ComplexMatrix, DensityMatrix};
use crate::roulette::{
    optimize_bets, optimize_bets_and_measurement, outcome_probs, uniform_odds, Measurement,
    TOL_MEASUREMENT,
};
use crate::{Error, Result};

/// Branches with probability below this carry no collapsed state.
pub const NEGLIGIBLE_BRANCH: f64 = 1e-12;

pub(crate) fn check_bipartite(rho_ab: &DensityMatrix, dims: [usize; 2]) -> Result<()> {
    if dims[0] == 0 || dims[1] == 0 || dims[0] * dims[1] != rho_ab.dim() {
        return Err(Error::DimensionMismatch(format!(
            "dims {dims:?} do not match a state of dimension {}",
            rho_ab.dim()
        )));
    }
    Ok(())
}

fn check_on(m: &Measurement, dim: usize, what: &str) -> Result<()> {
    if m.dim() != dim {
        return Err(Error::DimensionMismatch(format!(
            "{what} measurement acts on dimension {}, expected {dim}",
            m.dim()
        )));
    }
    Ok(())
}

/// `Tr_B[ρ^{AB} (1 ⊗ M)]` for an operator `M` on `B`, without forming the
/// product: entry `(i, i')` is `Σ_{k,l} ρ[(i,k),(i',l)] M[l,k]`.
pub(crate) fn reduce_with_effect(rho_ab: &ComplexMatrix, dims: [usize; 2], effect: &ComplexMatrix) -> ComplexMatrix {
    let [da, db] = dims;
    let mut out = ComplexMatrix::zeros(da, da);
    for i in 0..da {
        for ip in 0..da {
            let mut acc = num_complex::Complex64::new(0.0, 0.0);
            for k in 0..db {
                for l in 0..db {
                    acc += rho_ab[(i * db + k, ip * db + l)] * effect[(l, k)];
                }
            }
            out[(i, ip)] = acc;
        }
    }
    out
}

/// States of `A` after each outcome of a measurement on `B`.
#[derive(Debug, Clone)]
pub struct ConditionalEnsemble {
    /// `β_j`, the probability of outcome `j` on `B`.
    pub betas: ProbVector,
    /// `ρ^A_j`; `None` when `β_j < NEGLIGIBLE_BRANCH`.
    pub states: Vec<Option<DensityMatrix>>,
    /// `α_(j)`, the outcome distribution of a fixed measurement on each
    /// collapsed state. Empty until [`ConditionalEnsemble::with_alice_measurements`].
    pub alphas: Vec<Option<ProbVector>>,
}

impl ConditionalEnsemble {
    /// `Σ_j β_j S(ρ^A_j)` over the non-negligible branches.
    pub fn average_entropy(&self) -> Result<f64> {
        let mut acc = 0.0;
        for (beta, state) in self.betas.as_slice().iter().zip(&self.states) {
            if let Some(s) = state {
                acc += beta * von_neumann_entropy(s)?;
            }
        }
        Ok(acc)
    }

    /// `Σ_j β_j ρ^A_j`.
    pub fn average_state(&self) -> ComplexMatrix {
        let dim = self.states.iter().flatten().next().map_or(1, DensityMatrix::dim);
        self.betas
            .as_slice()
            .iter()
            .zip(&self.states)
            .filter_map(|(b, s)| s.as_ref().map(|s| s.matrix().scale_real(*b)))
            .fold(ComplexMatrix::zeros(dim, dim), |acc, m| &acc + &m)
    }

    /// Fills `alphas` with Alice measuring `per_outcome[j]` after outcome `j`.
    pub fn with_alice_measurements(mut self, per_outcome: &[Measurement]) -> Result<Self> {
        if per_outcome.len() != self.states.len() {
            return Err(Error::LengthMismatch {
                left: per_outcome.len(),
                right: self.states.len(),
            });
        }
        self.alphas = self
            .states
            .iter()
            .zip(per_outcome)
            .map(|(s, e)| s.as_ref().map(|s| outcome_probs(s, e)).transpose())
            .collect::<Result<_>>()?;
        Ok(self)
    }
}

/// `ρ^A_j = Tr_B[ρ^{AB}(1 ⊗ F_j^dagger F_j)] / β_j` with
/// `β_j = Tr[ρ^{AB}(1 ⊗ F_j^dagger F_j)]`.
pub fn condition_on_b(rho_ab: &DensityMatrix, dims: [usize; 2], f: &Measurement) -> Result<ConditionalEnsemble> {
    check_bipartite(rho_ab, dims)?;
    check_on(f, dims[1], "Bob's")?;
    let mut raw_betas = Vec::with_capacity(f.len());
    let mut reduced = Vec::with_capacity(f.len());
    for effect in f.effects() {
        let r = reduce_with_effect(rho_ab.matrix(), dims, &effect);
        raw_betas.push(r.trace().re);
        reduced.push(r);
    }
    let sum: f64 = raw_betas.iter().sum();
    let betas = ProbVector::from_clamped(raw_betas, TOL_MEASUREMENT).map_err(|_| {
        Error::CompletenessViolated {
            deviation: (sum - 1.0).abs(),
        }
    })?;
    let states = betas
        .as_slice()
        .iter()
        .zip(reduced)
        .map(|(&b, r)| (b >= NEGLIGIBLE_BRANCH).then(|| DensityMatrix::from_trusted(r.scale_real(1.0 / b))))
        .collect();
    Ok(ConditionalEnsemble {
        betas,
        states,
        alphas: Vec::new(),
    })
}

/// Rates with and without Bob's reported outcome.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Variant1Rates {
    pub w_with_help: f64,
    pub w_without: f64,
    pub gain: f64,
}

/// Variant 1 where Alice may change her measurement with Bob's outcome:
/// after outcome `j` she measures `per_outcome[j]` and bets proportionally;
/// without help she measures `unhelped`.
pub fn variant1_rate_adaptive(
    rho_ab: &DensityMatrix,
    dims: [usize; 2],
    f: &Measurement,
    per_outcome: &[Measurement],
    unhelped: &Measurement,
    odds: &OddsVector,
) -> Result<Variant1Rates> {
    require_fair_or_superfair(odds)?;
    check_on(unhelped, dims[0], "Alice's")?;
    for e in per_outcome {
        check_on(e, dims[0], "Alice's")?;
    }
    let ens = condition_on_b(rho_ab, dims, f)?.with_alice_measurements(per_outcome)?;
    let mut w_with_help = 0.0;
    for (beta, alpha) in ens.betas.as_slice().iter().zip(&ens.alphas) {
        if let Some(alpha) = alpha {
            w_with_help += beta * optimize_fair_superfair(alpha, odds)?.1;
        }
    }
    let rho_a = partial_trace(rho_ab, &dims, &[0])?;
    let w_without = optimize_bets(&rho_a, unhelped, odds)?.w;
    Ok(Variant1Rates {
        w_with_help,
        w_without,
        gain: w_with_help - w_without,
    })
}

/// Variant 1 with fixed measurements `f` on `B` and `e` on `A`:
/// `W*_{A|B} = Σ_j β_j W*_{A|B,j}` against `W*_A`. The gain is never negative.
pub fn variant1_rate_fixed_measurements(
    rho_ab: &DensityMatrix,
    dims: [usize; 2],
    f: &Measurement,
    e: &Measurement,
    odds: &OddsVector,
) -> Result<Variant1Rates> {
    let per_outcome = vec![e.clone(); f.len()];
    variant1_rate_adaptive(rho_ab, dims, f, &per_outcome, e, odds)
}

/// Outcome of the fixed negative-gain construction.
#[derive(Debug, Clone, PartialEq)]
pub struct NegativeGainDemo {
    pub w_with_help: f64,
    pub w_without: f64,
    /// `H(α_(j))` for each of Bob's outcomes.
    pub branch_entropies: Vec<f64>,
    /// `H(p^A)` without help.
    pub unhelped_entropy: f64,
}

/// `ρ^{AB} = |0><0| ⊗ 1/2` at uniform odds 2, Bob measuring in the
/// computational basis. Alice measures computationally without help and
/// after Bob's outcome 0, but in the `{|->, |+>}` basis after outcome 1, so
/// her unoptimized rate with "help" drops below the unhelped one.
pub fn variant1_negative_gain_demo() -> Result<NegativeGainDemo> {
    let rho_ab = DensityMatrix::basis(2, 0).tensor(&DensityMatrix::maximally_mixed(2));
    let dims = [2, 2];
    let f = Measurement::computational(2);
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let minus_plus = Measurement::from_basis(&ComplexMatrix::from_real(2, 2, &[h, h, -h, h])?)?;
    let per_outcome = [Measurement::computational(2), minus_plus];
    let odds = OddsVector::uniform(2.0, 2)?;

    let rates = variant1_rate_adaptive(&rho_ab, dims, &f, &per_outcome, &Measurement::computational(2), &odds)?;
    let ens = condition_on_b(&rho_ab, dims, &f)?.with_alice_measurements(&per_outcome)?;
    let branch_entropies = ens
        .alphas
        .iter()
        .map(|a| a.as_ref().map_or(0.0, crate::entropy::shannon_entropy))
        .collect();
    let rho_a = partial_trace(&rho_ab, &dims, &[0])?;
    let unhelped_entropy = crate::entropy::shannon_entropy(&outcome_probs(&rho_a, &Measurement::computational(2))?);
    Ok(NegativeGainDemo {
        w_with_help: rates.w_with_help,
        w_without: rates.w_without,
        branch_entropies,
        unhelped_entropy,
    })
}

/// `S(A)` after Bob applies `f` as a quantum operation (Kraus operators
/// `F_j`, outcome discarded) versus `Σ_j β_j S(ρ^A_j)` when he measures and
/// reports. The first is never smaller.
pub fn measure_vs_operate(rho_ab: &DensityMatrix, dims: [usize; 2], f: &Measurement) -> Result<(f64, f64)> {
    check_bipartite(rho_ab, dims)?;
    check_on(f, dims[1], "Bob's")?;
    let id_a = ComplexMatrix::identity(dims[0]);
    let mut evolved = ComplexMatrix::zeros(rho_ab.dim(), rho_ab.dim());
    for kraus in f.operators() {
        let k = id_a.kron(kraus);
        evolved = &evolved + &(&(&k * rho_ab.matrix()) * &k.adjoint());
    }
    let after = DensityMatrix::from_trusted(partial_trace_operator(&evolved, &dims, &[0])?);
    let s_after_operation = von_neumann_entropy(&after)?;
    let avg_conditional_s = condition_on_b(rho_ab, dims, f)?.average_entropy()?;
    Ok((s_after_operation, avg_conditional_s))
}

/// How Bob prices his share of a lease.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BobShareMode {
    /// `W_B = W*_B` at Bob's fixed measurement.
    Star,
    /// `W_B = W**_B`, measuring `B` in its eigenbasis.
    StarStar,
}

/// Measurements for a lease evaluated at fixed operators.
#[derive(Debug, Clone)]
pub struct FixedLeaseMeasurements {
    /// `G_{ij}` on `AB`, outcome `(i, j)` at index `i * m + j`.
    pub joint: Measurement,
    /// `F_j` on `B`, used for Bob's share.
    pub bob: Measurement,
    /// `E_i` on `A`, used for the unhelped baseline.
    pub alice: Measurement,
}

#[derive(Debug, Clone)]
pub enum LeaseSetup {
    Star(FixedLeaseMeasurements),
    /// Every system measured in its eigenbasis; needs uniform odds.
    StarStar,
}

impl LeaseSetup {
    pub fn mode(&self) -> BobShareMode {
        match self {
            LeaseSetup::Star(_) => BobShareMode::Star,
            LeaseSetup::StarStar => BobShareMode::StarStar,
        }
    }
}

/// Variant 2 rates, all in bits per gamble.
#[derive(Debug, Clone, PartialEq)]
pub struct LeaseReport {
    pub mode: BobShareMode,
    /// Alice's take-home rate `W_{A|B}` after Bob's share.
    pub w: f64,
    /// Rate on the composite system before Bob's share.
    pub w_joint: f64,
    /// `W_B`, the per-gamble share Bob takes.
    pub bob_share: f64,
    /// Alice's rate gambling on `A` alone.
    pub w_alone: f64,
    /// `w - w_alone`.
    pub gain: f64,
}

/// Variant 2: Alice gambles on `AB` at product odds `o^A_i o^B_j` and keeps
/// `2^{-K W_B}` of her wealth.
///
/// In `StarStar` mode with uniform odds `o` this is `log o - S(A|B)` and the
/// gain over `W**_A` is `S(A:B)`. In `Star` mode the rate is evaluated exactly
/// at the given measurements, with Bob's `p^B` taken from his own measurement
/// of `B` rather than from the joint outcomes.
pub fn variant2_rate(
    rho_ab: &DensityMatrix,
    dims: [usize; 2],
    odds_a: &OddsVector,
    odds_b: &OddsVector,
    setup: &LeaseSetup,
) -> Result<LeaseReport> {
    check_bipartite(rho_ab, dims)?;
    let rho_a = partial_trace(rho_ab, &dims, &[0])?;
    let rho_b = partial_trace(rho_ab, &dims, &[1])?;
    let joint_odds = odds_a.product(odds_b);
    let (w_joint, bob_share, w_alone) = match setup {
        LeaseSetup::StarStar => {
            uniform_odds(odds_a, dims[0])?;
            uniform_odds(odds_b, dims[1])?;
            (
                optimize_bets_and_measurement(rho_ab, &joint_odds)?.w,
                optimize_bets_and_measurement(&rho_b, odds_b)?.w,
                optimize_bets_and_measurement(&rho_a, odds_a)?.w,
            )
        }
        LeaseSetup::Star(m) => {
            check_on(&m.joint, rho_ab.dim(), "joint")?;
            check_on(&m.bob, dims[1], "Bob's")?;
            check_on(&m.alice, dims[0], "Alice's")?;
            if m.joint.len() != joint_odds.len() {
                return Err(Error::LengthMismatch {
                    left: m.joint.len(),
                    right: joint_odds.len(),
                });
            }
            (
                optimize_bets(rho_ab, &m.joint, &joint_odds)?.w,
                optimize_bets(&rho_b, &m.bob, odds_b)?.w,
                optimize_bets(&rho_a, &m.alice, odds_a)?.w,
            )
        }
    };
    let w = w_joint - bob_share;
    Ok(LeaseReport {
        mode: setup.mode(),
        w,
        w_joint,
        bob_share,
        w_alone,
        gain: w - w_alone,
    })
}

/// Bob holds `B` on a fraction `f` of the gambles and `C` on the rest, taking
/// his `W**` share each time: `W**_{A|BC} = log o - f S(A|B) - (1-f) S(A|C)`.
pub fn alternating_helper_rate(rho_abc: &DensityMatrix, dims: [usize; 3], f: f64, odds_a: &OddsVector) -> Result<f64> {
    if !(0.0..=1.0).contains(&f) {
        return Err(Error::InvalidArgument(format!("fraction f = {f} outside [0, 1]")));
    }
    if dims.contains(&0) || dims.iter().product::<usize>() != rho_abc.dim() {
        return Err(Error::DimensionMismatch(format!(
            "dims {dims:?} do not match a state of dimension {}",
            rho_abc.dim()
        )));
    }
    let o = uniform_odds(odds_a, dims[0])?;
    let rho_ab = partial_trace(rho_abc, &dims, &[0, 1])?;
    let rho_ac = partial_trace(rho_abc, &dims, &[0, 2])?;
    let s_a_b = quantum_conditional_entropy(&rho_ab, [dims[0], dims[1]])?;
    let s_a_c = quantum_conditional_entropy(&rho_ac, [dims[0], dims[2]])?;
    Ok(o.log2() - f * s_a_b - (1.0 - f) * s_a_c)
}
