//! Seeded Monte Carlo wealth trajectories.
//!
//! Every gamble draws an outcome from a fixed distribution and multiplies
//! wealth by `q0 + q_i o_i`. Wealth is tracked only as `log2` of the growth
//! factor, so the empirical rate after `K` gambles is `(1/K) Σ log2 X_j`.
//!
//! Randomness comes from xoshiro256++ seeded through SplitMix64
//! (`seed_from_u64`). A uniform draw is `(next_u64 >> 11) · 2^-53` and the
//! outcome is the first index whose cumulative probability exceeds it.

use std::io::{self, Write};

use rand_xoshiro::rand_core::{RngCore, SeedableRng};
use rand_xoshiro::Xoshiro256PlusPlus;
use rayon::prelude::*;

use crate::entropy::ProbVector;
use crate::helper::{
    classical_correlation, condition_on_b, variant1_rate_fixed_measurements, variant2_rate, LeaseSetup, OptimizerConfig,
};
use crate::kelly::{doubling_rate, BetAllocation, DoublingRate, OddsVector};
use crate::qmath::{partial_trace, DensityMatrix};
use crate::roulette::{outcome_probs, uniform_odds, Measurement};
use crate::{Error, Result};

/// Generator for one trajectory.
pub fn rng_from_seed(seed: u64) -> Xoshiro256PlusPlus {
    Xoshiro256PlusPlus::seed_from_u64(seed)
}

/// Uniform double in `[0, 1)` from the top 53 bits of one draw.
pub fn uniform01(rng: &mut Xoshiro256PlusPlus) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SimConfig {
    /// Gambles per trajectory, `K`.
    pub num_gambles: usize,
    pub seed: u64,
    pub trials: usize,
    /// Record every `log_every`-th point of the trajectory.
    pub log_every: usize,
}

impl SimConfig {
    pub fn new(num_gambles: usize, seed: u64) -> Self {
        Self {
            num_gambles,
            seed,
            trials: 1,
            log_every: num_gambles.max(1),
        }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("num_gambles", self.num_gambles),
            ("trials", self.trials),
            ("log_every", self.log_every),
        ] {
            if v == 0 {
                return Err(Error::InvalidArgument(format!("{name} must be at least 1")));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct WealthTrajectory {
    /// `(gamble index, log2 of the wealth factor)`, starting at `(0, 0)`.
    /// After ruin the final point carries `-inf`.
    pub points: Vec<(usize, f64)>,
    pub empirical_rate: DoublingRate,
    pub analytic_rate: DoublingRate,
    /// Gamble at which wealth hit zero.
    pub ruined_at: Option<usize>,
    pub seed: u64,
}

impl WealthTrajectory {
    pub fn final_log_wealth(&self) -> f64 {
        self.points.last().map_or(0.0, |p| p.1)
    }
}

/// Outcome distribution with the `log2` wealth factor of each outcome.
#[derive(Debug, Clone, PartialEq)]
pub struct OutcomeTable {
    probs: ProbVector,
    log_factors: Vec<f64>,
    cdf: Vec<f64>,
}

impl OutcomeTable {
    pub fn new(probs: ProbVector, log_factors: Vec<f64>) -> Result<Self> {
        if probs.len() != log_factors.len() {
            return Err(Error::LengthMismatch {
                left: probs.len(),
                right: log_factors.len(),
            });
        }
        let mut cdf: Vec<f64> = probs
            .as_slice()
            .iter()
            .scan(0.0, |acc, p| {
                *acc += p;
                Some(*acc)
            })
            .collect();
        // The last outcome that can occur absorbs any rounding shortfall.
        if let Some(last) = probs.as_slice().iter().rposition(|&p| p > 0.0) {
            for c in &mut cdf[last..] {
                *c = 1.0;
            }
        }
        Ok(Self {
            probs,
            log_factors,
            cdf,
        })
    }

    /// Gambling `bet` at `odds` on outcomes distributed as `p`.
    pub fn from_bet(p: &ProbVector, bet: &BetAllocation, odds: &OddsVector) -> Result<Self> {
        if bet.len() != p.len() {
            return Err(Error::LengthMismatch {
                left: bet.len(),
                right: p.len(),
            });
        }
        let factors = bet.wealth_factors(odds).into_iter().map(f64::log2).collect();
        Self::new(p.clone(), factors)
    }

    pub fn probs(&self) -> &ProbVector {
        &self.probs
    }

    pub fn log_factors(&self) -> &[f64] {
        &self.log_factors
    }

    /// Subtracts a constant from every log factor.
    pub fn with_penalty(mut self, penalty: f64) -> Self {
        for l in &mut self.log_factors {
            *l -= penalty;
        }
        self
    }

    pub fn sample(&self, rng: &mut Xoshiro256PlusPlus) -> usize {
        let u = uniform01(rng);
        self.cdf.iter().position(|&c| u < c).unwrap_or(self.cdf.len() - 1)
    }

    /// `Σ p_i l_i`, or `NegInfinite` if an outcome with `p_i > 0` ruins.
    pub fn expected_log(&self) -> DoublingRate {
        let mut acc = 0.0;
        for (&p, &l) in self.probs.as_slice().iter().zip(&self.log_factors) {
            if p > 0.0 {
                if l == f64::NEG_INFINITY {
                    return DoublingRate::NegInfinite;
                }
                acc += p * l;
            }
        }
        DoublingRate::Finite(acc)
    }

    /// Per-gamble variance of `log2 X`; infinite when ruin is possible.
    pub fn log_variance(&self) -> f64 {
        let DoublingRate::Finite(mean) = self.expected_log() else {
            return f64::INFINITY;
        };
        self.probs
            .as_slice()
            .iter()
            .zip(&self.log_factors)
            .filter(|(p, _)| **p > 0.0)
            .map(|(p, l)| p * (l - mean).powi(2))
            .sum()
    }
}

fn run(table: &OutcomeTable, analytic: DoublingRate, k: usize, log_every: usize, seed: u64) -> WealthTrajectory {
    let mut rng = rng_from_seed(seed);
    let mut points = vec![(0, 0.0)];
    let mut acc = 0.0;
    for g in 1..=k {
        let l = table.log_factors[table.sample(&mut rng)];
        if l == f64::NEG_INFINITY {
            points.push((g, f64::NEG_INFINITY));
            return WealthTrajectory {
                points,
                empirical_rate: DoublingRate::NegInfinite,
                analytic_rate: analytic,
                ruined_at: Some(g),
                seed,
            };
        }
        acc += l;
        if g % log_every == 0 || g == k {
            points.push((g, acc));
        }
    }
    WealthTrajectory {
        points,
        empirical_rate: DoublingRate::Finite(acc / k as f64),
        analytic_rate: analytic,
        ruined_at: None,
        seed,
    }
}

/// One trajectory seeded with `cfg.seed`.
pub fn simulate_table(table: &OutcomeTable, analytic: DoublingRate, cfg: &SimConfig) -> Result<WealthTrajectory> {
    cfg.validate()?;
    Ok(run(table, analytic, cfg.num_gambles, cfg.log_every, cfg.seed))
}

/// Trials run with seeds `seed, seed + 1, ...`, reported in that order.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialSummary {
    pub trajectories: Vec<WealthTrajectory>,
    /// Mean and sample standard deviation of the finite empirical rates.
    pub mean_rate: f64,
    pub std_rate: f64,
    pub ruined: usize,
}

pub fn simulate_table_trials(table: &OutcomeTable, analytic: DoublingRate, cfg: &SimConfig) -> Result<TrialSummary> {
    cfg.validate()?;
    let trajectories: Vec<WealthTrajectory> = (0..cfg.trials)
        .into_par_iter()
        .map(|t| run(table, analytic, cfg.num_gambles, cfg.log_every, cfg.seed.wrapping_add(t as u64)))
        .collect();
    let rates: Vec<f64> = trajectories
        .iter()
        .filter_map(|t| match t.empirical_rate {
            DoublingRate::Finite(r) => Some(r),
            DoublingRate::NegInfinite => None,
        })
        .collect();
    let n = rates.len() as f64;
    let mean_rate = if rates.is_empty() {
        f64::NEG_INFINITY
    } else {
        rates.iter().sum::<f64>() / n
    };
    let std_rate = if rates.len() < 2 {
        0.0
    } else {
        (rates.iter().map(|r| (r - mean_rate).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
    };
    Ok(TrialSummary {
        ruined: trajectories.len() - rates.len(),
        trajectories,
        mean_rate,
        std_rate,
    })
}

/// Repeated classical gambles: outcome `i` with probability `p_i`, wealth
/// factor `q0 + q_i o_i`.
pub fn simulate(p: &ProbVector, bet: &BetAllocation, odds: &OddsVector, cfg: &SimConfig) -> Result<WealthTrajectory> {
    let analytic = doubling_rate(p, bet, odds)?;
    simulate_table(&OutcomeTable::from_bet(p, bet, odds)?, analytic, cfg)
}

pub fn simulate_trials(p: &ProbVector, bet: &BetAllocation, odds: &OddsVector, cfg: &SimConfig) -> Result<TrialSummary> {
    let analytic = doubling_rate(p, bet, odds)?;
    simulate_table_trials(&OutcomeTable::from_bet(p, bet, odds)?, analytic, cfg)
}

/// Gambling on measurement outcomes of a freshly prepared `ρ` each round.
pub fn simulate_quantum(
    rho: &DensityMatrix,
    m: &Measurement,
    bet: &BetAllocation,
    odds: &OddsVector,
    cfg: &SimConfig,
) -> Result<WealthTrajectory> {
    simulate(&outcome_probs(rho, m)?, bet, odds, cfg)
}

/// Helper protocol to simulate, each with proportional betting.
#[derive(Debug, Clone)]
pub enum HelperProtocol {
    /// Bob measures `bob` and reports; Alice measures `alice` and bets the
    /// conditional distribution.
    Variant1Fixed {
        bob: Measurement,
        alice: Measurement,
        odds: OddsVector,
    },
    /// Bob measures the classical-correlation optimum; Alice measures each
    /// collapsed state in its eigenbasis. Uniform odds.
    Variant1FullControl {
        odds: OddsVector,
        optimizer: OptimizerConfig,
    },
    /// Alice gambles on `AB` at product odds and pays Bob `W_B` per gamble.
    Variant2 {
        odds_a: OddsVector,
        odds_b: OddsVector,
        setup: LeaseSetup,
    },
}

/// Joint `(Bob outcome j, Alice outcome i)` table for conditional betting:
/// probability `β_j α_{i|j}`, factor `α_{i|j} o_i`.
fn conditional_table(betas: &ProbVector, branches: &[Option<ProbVector>], odds: &OddsVector) -> Result<OutcomeTable> {
    let mut probs = Vec::new();
    let mut factors = Vec::new();
    for (&beta, branch) in betas.as_slice().iter().zip(branches) {
        let Some(alpha) = branch else { continue };
        if alpha.len() != odds.len() {
            return Err(Error::LengthMismatch {
                left: alpha.len(),
                right: odds.len(),
            });
        }
        for (&a, &o) in alpha.as_slice().iter().zip(odds.as_slice()) {
            probs.push(beta * a);
            factors.push((a * o).log2());
        }
    }
    OutcomeTable::new(ProbVector::from_clamped(probs, 1e-9)?, factors)
}

/// Outcome table and analytic rate for a helper protocol.
pub fn helper_table(rho_ab: &DensityMatrix, dims: [usize; 2], protocol: &HelperProtocol) -> Result<(OutcomeTable, f64)> {
    match protocol {
        HelperProtocol::Variant1Fixed { bob, alice, odds } => {
            let rates = variant1_rate_fixed_measurements(rho_ab, dims, bob, alice, odds)?;
            let ens = condition_on_b(rho_ab, dims, bob)?.with_alice_measurements(&vec![alice.clone(); bob.len()])?;
            Ok((conditional_table(&ens.betas, &ens.alphas, odds)?, rates.w_with_help))
        }
        HelperProtocol::Variant1FullControl { odds, optimizer } => {
            let o = uniform_odds(odds, dims[0])?;
            let cc = classical_correlation(rho_ab, dims, optimizer)?;
            let ens = condition_on_b(rho_ab, dims, &cc.best_measurement)?;
            let branches = ens
                .states
                .iter()
                .map(|s| {
                    s.as_ref()
                        .map(|s| {
                            let ev = s.spectrum()?.eigenvalues;
                            ProbVector::from_clamped(ev, 1e-9)
                        })
                        .transpose()
                })
                .collect::<Result<Vec<_>>>()?;
            let rho_a = partial_trace(rho_ab, &dims, &[0])?;
            let s_a = crate::entropy::von_neumann_entropy(&rho_a)?;
            Ok((conditional_table(&ens.betas, &branches, odds)?, o.log2() - s_a + cc.value))
        }
        HelperProtocol::Variant2 { odds_a, odds_b, setup } => {
            let report = variant2_rate(rho_ab, dims, odds_a, odds_b, setup)?;
            let joint_odds = odds_a.product(odds_b);
            let probs = match setup {
                LeaseSetup::StarStar => ProbVector::from_clamped(rho_ab.spectrum()?.eigenvalues, 1e-9)?,
                LeaseSetup::Star(m) => outcome_probs(rho_ab, &m.joint)?,
            };
            let table = OutcomeTable::from_bet(&probs, &BetAllocation::proportional(&probs), &joint_odds)?;
            Ok((table.with_penalty(report.bob_share), report.w))
        }
    }
}

/// Repeated helper-assisted gambles. Variant 2 deducts Bob's share `W_B`
/// from every gamble's log factor.
pub fn simulate_with_helper(
    rho_ab: &DensityMatrix,
    dims: [usize; 2],
    protocol: &HelperProtocol,
    cfg: &SimConfig,
) -> Result<WealthTrajectory> {
    let (table, analytic) = helper_table(rho_ab, dims, protocol)?;
    simulate_table(&table, DoublingRate::Finite(analytic), cfg)
}

/// Writes `gamble,log2_wealth` rows with 17 significant digits.
pub fn write_trajectory_csv<W: Write>(traj: &WealthTrajectory, mut out: W) -> io::Result<()> {
    writeln!(out, "gamble,log2_wealth")?;
    for (g, v) in &traj.points {
        writeln!(out, "{g},{v:.16e}")?;
    }
    Ok(())
}
