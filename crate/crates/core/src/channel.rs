//! Gambling on the input of a noisy channel after seeing its output.
//!
//! A symbol `i` is drawn with prior `p_i` and sent through the channel; Alice
//! sees output `j` and bets `q_{i|j}` on the input at odds `o_i = 1/p_i`. The
//! resulting doubling rate is the input-output mutual information. When the
//! inputs are quantum states `ρ_i` read out by a POVM, the rate is bounded by
//! the Holevo information of the ensemble.

use crate::entropy::{von_neumann_entropy, ProbVector};
use crate::kelly::{doubling_rate, BetAllocation, OddsVector};
use crate::qmath::{ComplexMatrix, DensityMatrix};
use crate::roulette::{effect_probs, Measurement};
use crate::{Error, Result};

/// Input prior `p_i` and transition rows `p_{·|i}`.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassicalChannel {
    input_prior: ProbVector,
    transition: Vec<ProbVector>,
}

impl ClassicalChannel {
    pub fn new(input_prior: ProbVector, transition: Vec<ProbVector>) -> Result<Self> {
        if transition.len() != input_prior.len() {
            return Err(Error::LengthMismatch {
                left: transition.len(),
                right: input_prior.len(),
            });
        }
        let outputs = transition[0].len();
        if let Some(row) = transition.iter().find(|r| r.len() != outputs) {
            return Err(Error::DimensionMismatch(format!(
                "transition rows have {} and {} outputs",
                outputs,
                row.len()
            )));
        }
        Ok(Self {
            input_prior,
            transition,
        })
    }

    pub fn input_prior(&self) -> &ProbVector {
        &self.input_prior
    }

    pub fn transition(&self) -> &[ProbVector] {
        &self.transition
    }

    pub fn inputs(&self) -> usize {
        self.input_prior.len()
    }

    pub fn outputs(&self) -> usize {
        self.transition[0].len()
    }

    /// `P(Output = j)`.
    pub fn output_distribution(&self) -> Vec<f64> {
        (0..self.outputs())
            .map(|j| {
                self.input_prior
                    .as_slice()
                    .iter()
                    .zip(&self.transition)
                    .map(|(p, row)| p * row[j])
                    .sum()
            })
            .collect()
    }

    /// `P(Input = i | Output = j)`, or `None` if output `j` never occurs.
    pub fn posterior(&self, j: usize) -> Option<ProbVector> {
        let q_j = self.output_distribution()[j];
        if q_j <= 0.0 {
            return None;
        }
        let raw = self
            .input_prior
            .as_slice()
            .iter()
            .zip(&self.transition)
            .map(|(p, row)| p * row[j] / q_j)
            .collect();
        ProbVector::from_clamped(raw, 1e-9).ok()
    }
}

/// Kelly's odds `o_i = 1/p_i`.
pub fn channel_odds(prior: &ProbVector) -> Result<OddsVector> {
    if let Some(input) = prior.as_slice().iter().position(|&p| p <= 0.0) {
        return Err(Error::ZeroPriorWithSupport { input });
    }
    OddsVector::new(prior.as_slice().iter().map(|p| 1.0 / p).collect())
}

/// `W = Σ_j q_j Σ_i q_{i|j} log(q_{i|j} / p_i)`, obtained by betting the
/// posterior after each output at odds `1/p_i`. Equals `I(Input; Output)`.
pub fn kelly_channel_rate(ch: &ClassicalChannel) -> Result<f64> {
    let odds = channel_odds(&ch.input_prior)?;
    let q = ch.output_distribution();
    let mut w = 0.0;
    for (j, &q_j) in q.iter().enumerate() {
        let Some(post) = ch.posterior(j) else { continue };
        let bet = BetAllocation::proportional(&post);
        w += q_j * doubling_rate(&post, &bet, &odds)?.bits();
    }
    Ok(w)
}

/// States `ρ_i` prepared with priors `p_i`.
#[derive(Debug, Clone)]
pub struct QuantumEnsemble {
    priors: ProbVector,
    states: Vec<DensityMatrix>,
}

impl QuantumEnsemble {
    pub fn new(priors: ProbVector, states: Vec<DensityMatrix>) -> Result<Self> {
        if priors.len() != states.len() {
            return Err(Error::LengthMismatch {
                left: priors.len(),
                right: states.len(),
            });
        }
        let dim = states[0].dim();
        if let Some(s) = states.iter().find(|s| s.dim() != dim) {
            return Err(Error::DimensionMismatch(format!(
                "ensemble mixes dimensions {dim} and {}",
                s.dim()
            )));
        }
        Ok(Self { priors, states })
    }

    pub fn priors(&self) -> &ProbVector {
        &self.priors
    }

    pub fn states(&self) -> &[DensityMatrix] {
        &self.states
    }

    pub fn dim(&self) -> usize {
        self.states[0].dim()
    }

    /// `Σ_i p_i ρ_i`.
    pub fn average_state(&self) -> DensityMatrix {
        let d = self.dim();
        let m = self
            .priors
            .as_slice()
            .iter()
            .zip(&self.states)
            .fold(ComplexMatrix::zeros(d, d), |acc, (p, s)| &acc + &s.matrix().scale_real(*p));
        DensityMatrix::from_trusted(m)
    }

    /// Transition `p_{j|i} = Tr ρ_i Λ_j` induced by a POVM.
    pub fn induced_channel(&self, povm: &Measurement) -> Result<ClassicalChannel> {
        if povm.dim() != self.dim() {
            return Err(Error::DimensionMismatch(format!(
                "POVM on dimension {} applied to {}-dimensional states",
                povm.dim(),
                self.dim()
            )));
        }
        let effects = povm.effects();
        let rows = self
            .states
            .iter()
            .map(|s| effect_probs(s.matrix(), &effects))
            .collect::<Result<_>>()?;
        ClassicalChannel::new(self.priors.clone(), rows)
    }
}

/// Kelly rate of the classical channel induced by measuring each `ρ_i`.
pub fn quantum_channel_rate(ens: &QuantumEnsemble, povm: &Measurement) -> Result<f64> {
    kelly_channel_rate(&ens.induced_channel(povm)?)
}

/// `χ = S(Σ p_i ρ_i) - Σ p_i S(ρ_i)`.
pub fn holevo_information(ens: &QuantumEnsemble) -> Result<f64> {
    let mut avg = 0.0;
    for (p, s) in ens.priors.as_slice().iter().zip(&ens.states) {
        avg += p * von_neumann_entropy(s)?;
    }
    Ok(von_neumann_entropy(&ens.average_state())? - avg)
}
