//! Gambling on the outcomes of a measured quantum state.
//!
//! The state is re-prepared before every gamble, so outcomes are i.i.d. with
//! `p_i = Tr ρ E_i` and the classical Kelly results apply to them unchanged.
//! When Alice also picks the measurement (rank-one projectors, one per
//! dimension) the optimum at uniform odds `o` is `W** = log o - S(ρ)`,
//! reached by measuring in the eigenbasis of `ρ`.

mod measurement;

pub use measurement::{Measurement, MeasurementKind, TOL_MEASUREMENT};

use crate::entropy::ProbVector;
use crate::kelly::{optimize_fair_superfair, BetAllocation, OddsVector};
use crate::qmath::{ComplexMatrix, DensityMatrix};
use crate::{Error, Result};

/// Outcome probabilities `Re Tr(ρ E_i)` for effects `E_i`.
pub(crate) fn effect_probs(rho: &ComplexMatrix, effects: &[ComplexMatrix]) -> Result<ProbVector> {
    let raw: Vec<f64> = effects.iter().map(|e| rho.trace_product_re(e)).collect();
    ProbVector::from_clamped(raw, TOL_MEASUREMENT).map_err(|_| {
        let sum: f64 = effects.iter().map(|e| rho.trace_product_re(e)).sum();
        Error::CompletenessViolated {
            deviation: (sum - 1.0).abs(),
        }
    })
}

/// `p_i = Tr ρ E_i` (projective) or `Tr ρ F_i^dagger F_i` (POVM).
pub fn outcome_probs(rho: &DensityMatrix, m: &Measurement) -> Result<ProbVector> {
    if rho.dim() != m.dim() {
        return Err(Error::DimensionMismatch(format!(
            "state of dimension {} measured on a {}-dimensional space",
            rho.dim(),
            m.dim()
        )));
    }
    effect_probs(rho.matrix(), &m.effects())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OptimizedOver {
    BetsOnly,
    BetsAndMeasurement,
}

/// Outcome distribution, bet and doubling rate of one quantum gamble.
#[derive(Debug, Clone)]
pub struct GambleReport {
    pub probs: ProbVector,
    pub allocation: BetAllocation,
    pub measurement: Measurement,
    /// Doubling rate in bits per gamble.
    pub w: f64,
    pub optimized_over: OptimizedOver,
}

/// `W*`: proportional bets on the outcomes of a fixed measurement.
pub fn optimize_bets(rho: &DensityMatrix, m: &Measurement, odds: &OddsVector) -> Result<GambleReport> {
    let probs = outcome_probs(rho, m)?;
    let (allocation, w) = optimize_fair_superfair(&probs, odds)?;
    Ok(GambleReport {
        probs,
        allocation,
        measurement: m.clone(),
        w,
        optimized_over: OptimizedOver::BetsOnly,
    })
}

/// The common value of uniform, not sub-fair odds over `n` outcomes.
pub(crate) fn uniform_odds(odds: &OddsVector, n: usize) -> Result<f64> {
    if odds.len() != n {
        return Err(Error::LengthMismatch {
            left: odds.len(),
            right: n,
        });
    }
    let o = odds.uniform_value().ok_or(Error::NonUniformOdds)?;
    crate::kelly::require_fair_or_superfair(odds)?;
    Ok(o)
}

/// `W**`: proportional bets on the eigenbasis measurement of `ρ`.
///
/// Needs uniform odds with one outcome per dimension. The reported
/// measurement follows the eigensolver's deterministic ordering; within a
/// degenerate eigenspace any basis gives the same rate.
pub fn optimize_bets_and_measurement(rho: &DensityMatrix, odds: &OddsVector) -> Result<GambleReport> {
    uniform_odds(odds, rho.dim())?;
    let spectrum = rho.spectrum()?;
    let measurement = Measurement::eigenbasis(&spectrum);
    let mut report = optimize_bets(rho, &measurement, odds)?;
    report.optimized_over = OptimizedOver::BetsAndMeasurement;
    Ok(report)
}
