//! Classical doubling rates and their log-optimal bets.
//!
//! A gamble pays `o_i`-for-1 on outcome `i`. A bet keeps `q0` of the wealth
//! and stakes `q_i` on outcome `i`, so the wealth factor is `q0 + q_i o_i`
//! when `i` occurs and the doubling rate is `W = Σ p_i log(q0 + q_i o_i)`.

use std::fmt;

use crate::entropy::{
    classical_conditional_entropy, relative_entropy_raw, shannon_entropy, Divergence, JointProb,
    ProbVector,
};
use crate::{Error, Result};

/// Tolerance on `Σ 1/o_i` around 1 for the fair regime.
pub const REGIME_TOL: f64 = 1e-12;

/// Per-outcome payoffs, `o_i`-for-1.
#[derive(Debug, Clone, PartialEq)]
pub struct OddsVector(Vec<f64>);

impl OddsVector {
    pub fn new(odds: Vec<f64>) -> Result<Self> {
        if odds.is_empty() {
            return Err(Error::InvalidOdds("no outcomes".into()));
        }
        if let Some(i) = odds.iter().position(|o| !o.is_finite() || *o <= 0.0) {
            return Err(Error::InvalidOdds(format!(
                "odds[{i}] = {} must be finite and positive",
                odds[i]
            )));
        }
        Ok(Self(odds))
    }

    pub fn uniform(o: f64, n: usize) -> Result<Self> {
        Self::new(vec![o; n])
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// `Σ 1/o_i`.
    pub fn reserve(&self) -> f64 {
        self.0.iter().map(|o| 1.0 / o).sum()
    }

    pub fn regime(&self) -> OddsRegime {
        let reserve = self.reserve();
        let kind = if (reserve - 1.0).abs() <= REGIME_TOL {
            RegimeKind::Fair
        } else if reserve < 1.0 {
            RegimeKind::SuperFair
        } else {
            RegimeKind::SubFair
        };
        OddsRegime { kind, reserve }
    }

    /// The common payoff when every outcome pays the same.
    pub fn uniform_value(&self) -> Option<f64> {
        let first = self.0[0];
        self.0.iter().all(|&o| o == first).then_some(first)
    }

    /// Payoffs `o^A_i o^B_j` on the joint outcome `(i, j)`, row-major.
    pub fn product(&self, other: &OddsVector) -> OddsVector {
        let mut v = Vec::with_capacity(self.len() * other.len());
        for &a in &self.0 {
            for &b in &other.0 {
                v.push(a * b);
            }
        }
        OddsVector(v)
    }

    /// Expected log-payoff `Σ p_i log o_i`.
    pub fn expected_log(&self, p: &ProbVector) -> f64 {
        p.as_slice()
            .iter()
            .zip(&self.0)
            .filter(|(pi, _)| **pi > 0.0)
            .map(|(pi, o)| pi * o.log2())
            .sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RegimeKind {
    SuperFair,
    Fair,
    SubFair,
}

impl RegimeKind {
    pub fn name(self) -> &'static str {
        match self {
            RegimeKind::SuperFair => "super-fair",
            RegimeKind::Fair => "fair",
            RegimeKind::SubFair => "sub-fair",
        }
    }
}

impl fmt::Display for RegimeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OddsRegime {
    pub kind: RegimeKind,
    pub reserve: f64,
}

impl OddsRegime {
    pub fn allows_full_investment(&self) -> bool {
        self.kind != RegimeKind::SubFair
    }
}

pub(crate) fn require_fair_or_superfair(odds: &OddsVector) -> Result<()> {
    let regime = odds.regime();
    if regime.allows_full_investment() {
        Ok(())
    } else {
        Err(Error::WrongRegime {
            expected: "fair or super-fair",
            found: regime.kind.name(),
        })
    }
}

/// Tolerance on `q0 + Σ q_i` around 1.
pub const ALLOCATION_TOL: f64 = 1e-10;

/// Fractions of wealth retained (`q0`) and staked on each outcome (`q`).
#[derive(Debug, Clone, PartialEq)]
pub struct BetAllocation {
    pub q0: f64,
    pub q: Vec<f64>,
}

impl BetAllocation {
    pub fn new(q0: f64, q: Vec<f64>) -> Result<Self> {
        if !(0.0..=1.0).contains(&q0) {
            return Err(Error::InvalidAllocation(format!("q0 = {q0} outside [0, 1]")));
        }
        if let Some(i) = q.iter().position(|x| !x.is_finite() || *x < 0.0) {
            return Err(Error::InvalidAllocation(format!("q[{i}] = {} is negative", q[i])));
        }
        let total = q0 + q.iter().sum::<f64>();
        if (total - 1.0).abs() > ALLOCATION_TOL {
            return Err(Error::InvalidAllocation(format!("fractions sum to {total}")));
        }
        Ok(Self { q0, q })
    }

    /// Keep everything.
    pub fn no_bet(n: usize) -> Self {
        Self { q0: 1.0, q: vec![0.0; n] }
    }

    /// Stake everything in proportion to `p`.
    pub fn proportional(p: &ProbVector) -> Self {
        Self {
            q0: 0.0,
            q: p.as_slice().to_vec(),
        }
    }

    pub fn len(&self) -> usize {
        self.q.len()
    }

    pub fn is_empty(&self) -> bool {
        self.q.is_empty()
    }

    /// Wealth factor `q0 + q_i o_i` per outcome.
    pub fn wealth_factors(&self, odds: &OddsVector) -> Vec<f64> {
        self.q
            .iter()
            .zip(odds.as_slice())
            .map(|(q, o)| self.q0 + q * o)
            .collect()
    }
}

/// A doubling rate; `NegInfinite` when some outcome with positive probability
/// wipes out the wealth.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DoublingRate {
    Finite(f64),
    NegInfinite,
}

impl DoublingRate {
    pub fn bits(self) -> f64 {
        match self {
            DoublingRate::Finite(w) => w,
            DoublingRate::NegInfinite => f64::NEG_INFINITY,
        }
    }

    pub fn is_finite(self) -> bool {
        matches!(self, DoublingRate::Finite(_))
    }
}

/// `W = Σ p_i log(q0 + q_i o_i)`.
pub fn doubling_rate(p: &ProbVector, bet: &BetAllocation, odds: &OddsVector) -> Result<DoublingRate> {
    if p.len() != bet.len() {
        return Err(Error::LengthMismatch {
            left: p.len(),
            right: bet.len(),
        });
    }
    if p.len() != odds.len() {
        return Err(Error::LengthMismatch {
            left: p.len(),
            right: odds.len(),
        });
    }
    let mut w = 0.0;
    for (pi, factor) in p.as_slice().iter().zip(bet.wealth_factors(odds)) {
        if *pi == 0.0 {
            continue;
        }
        if factor <= 0.0 {
            return Ok(DoublingRate::NegInfinite);
        }
        w += pi * factor.log2();
    }
    Ok(DoublingRate::Finite(w))
}

/// Proportional gambling for fair and super-fair odds: `q = p`, `q0 = 0`,
/// `W* = Σ p_i log o_i - H(p)`.
pub fn optimize_fair_superfair(p: &ProbVector, odds: &OddsVector) -> Result<(BetAllocation, f64)> {
    if p.len() != odds.len() {
        return Err(Error::LengthMismatch {
            left: p.len(),
            right: odds.len(),
        });
    }
    require_fair_or_superfair(odds)?;
    let w_star = odds.expected_log(p) - shannon_entropy(p);
    Ok((BetAllocation::proportional(p), w_star))
}

/// Kelly's optimum under sub-fair odds.
#[derive(Debug, Clone, PartialEq)]
pub struct KellySubfairSolution {
    /// Outcomes that receive a bet, in the order they were admitted.
    pub in_set: Vec<usize>,
    /// `Σ_{i∈I} p_i`.
    pub gamma: f64,
    /// `Σ_{i∈I} 1/o_i`.
    pub beta: f64,
    /// `1/(β o_i)` over `I`, in `in_set` order.
    pub sigma: Vec<f64>,
    pub allocation: BetAllocation,
    pub w_star: f64,
}

impl KellySubfairSolution {
    /// `(1-γ)/(1-β)`, which is also the retained fraction `q0`.
    pub fn threshold(&self) -> f64 {
        (1.0 - self.gamma) / (1.0 - self.beta)
    }
}

/// Sub-fair Kelly optimum.
///
/// Outcomes are admitted in descending `p_i o_i` order (ties by index) while
/// `p_i o_i` exceeds the running threshold `(1-γ)/(1-β)`. The bet is
/// `q_i = p_i - threshold/o_i` on `I` and zero elsewhere; the rate is
/// `γ D(p'||σ) + D([γ,1-γ] || [β,1-β])` with `p' = p/γ` over `I`.
pub fn optimize_subfair(p: &ProbVector, odds: &OddsVector) -> Result<KellySubfairSolution> {
    if p.len() != odds.len() {
        return Err(Error::LengthMismatch {
            left: p.len(),
            right: odds.len(),
        });
    }
    let regime = odds.regime();
    if regime.kind != RegimeKind::SubFair {
        return Err(Error::WrongRegime {
            expected: "sub-fair",
            found: regime.kind.name(),
        });
    }
    let o = odds.as_slice();
    let n = p.len();

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| (p[j] * o[j]).total_cmp(&(p[i] * o[i])).then(i.cmp(&j)));

    let mut in_set = Vec::new();
    let (mut gamma, mut beta) = (0.0_f64, 0.0_f64);
    for &k in &order {
        let threshold = (1.0 - gamma) / (1.0 - beta);
        let next_beta = beta + 1.0 / o[k];
        if p[k] * o[k] > threshold && next_beta < 1.0 {
            in_set.push(k);
            gamma += p[k];
            beta = next_beta;
        } else {
            break;
        }
    }
    let gamma = gamma.min(1.0);
    let threshold = (1.0 - gamma) / (1.0 - beta);

    let mut q = vec![0.0; n];
    for &i in &in_set {
        q[i] = (p[i] - threshold / o[i]).max(0.0);
    }
    let q0 = (1.0 - q.iter().sum::<f64>()).clamp(0.0, 1.0);
    let allocation = BetAllocation { q0, q };

    let sigma: Vec<f64> = in_set.iter().map(|&i| 1.0 / (beta * o[i])).collect();
    let w_star = if in_set.is_empty() {
        0.0
    } else {
        let p_cond: Vec<f64> = in_set.iter().map(|&i| p[i] / gamma).collect();
        let inner = relative_entropy_raw(&p_cond, &sigma)?;
        let outer = relative_entropy_raw(&[gamma, 1.0 - gamma], &[beta, 1.0 - beta])?;
        match (inner, outer) {
            (Divergence::Finite(a), Divergence::Finite(b)) => gamma * a + b,
            _ => unreachable!("σ and β are positive on the support of p' and γ"),
        }
    };

    Ok(KellySubfairSolution {
        in_set,
        gamma,
        beta,
        sigma,
        allocation,
        w_star,
    })
}

/// Log-optimal bet in any regime.
pub fn optimize(p: &ProbVector, odds: &OddsVector) -> Result<(BetAllocation, f64)> {
    if odds.regime().allows_full_investment() {
        optimize_fair_superfair(p, odds)
    } else {
        optimize_subfair(p, odds).map(|s| (s.allocation, s.w_star))
    }
}

/// Rate when Bob reports `B` and Alice bets `P(A | B = j)`:
/// `W*_{A|B} = Σ p^A_i log o^A_i - H(A|B)`.
pub fn conditional_doubling_rate(joint: &JointProb, odds_a: &OddsVector) -> Result<f64> {
    if joint.rows() != odds_a.len() {
        return Err(Error::LengthMismatch {
            left: joint.rows(),
            right: odds_a.len(),
        });
    }
    require_fair_or_superfair(odds_a)?;
    Ok(odds_a.expected_log(&joint.marginal_a()) - classical_conditional_entropy(joint))
}

/// Both helper variants for a classical joint distribution: Bob reports `B`
/// (`W*_{A|B}`), or Bob leases `B` and takes `2^{-K W*_B}` (`W*_{A,B} - W*_B`
/// with product odds `o^A_i o^B_j`).
pub fn lease_equivalence_check(
    joint: &JointProb,
    odds_a: &OddsVector,
    odds_b: &OddsVector,
) -> Result<(f64, f64)> {
    if joint.cols() != odds_b.len() {
        return Err(Error::LengthMismatch {
            left: joint.cols(),
            right: odds_b.len(),
        });
    }
    let reported = conditional_doubling_rate(joint, odds_a)?;
    require_fair_or_superfair(odds_b)?;
    let (_, w_joint) = optimize_fair_superfair(joint.probs(), &odds_a.product(odds_b))?;
    let (_, w_b) = optimize_fair_superfair(&joint.marginal_b(), odds_b)?;
    Ok((reported, w_joint - w_b))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pv(v: &[f64]) -> ProbVector {
        ProbVector::new(v.to_vec()).unwrap()
    }

    fn odds(v: &[f64]) -> OddsVector {
        OddsVector::new(v.to_vec()).unwrap()
    }

    #[test]
    fn regimes() {
        assert_eq!(odds(&[2.0, 2.0]).regime().kind, RegimeKind::Fair);
        assert_eq!(odds(&[3.0, 3.0]).regime().kind, RegimeKind::SuperFair);
        assert_eq!(odds(&[1.5, 1.5]).regime().kind, RegimeKind::SubFair);
        assert_eq!(odds(&[3.0, 3.0, 3.0]).regime().kind, RegimeKind::Fair);
        assert!(OddsVector::new(vec![1.0, 0.0]).is_err());
    }

    #[test]
    fn allocation_validation() {
        assert!(BetAllocation::new(0.5, vec![0.25, 0.25]).is_ok());
        assert!(BetAllocation::new(0.5, vec![0.5, 0.25]).is_err());
        assert!(BetAllocation::new(1.5, vec![0.0, -0.5]).is_err());
    }

    #[test]
    fn doubling_rate_examples() {
        let half = pv(&[0.5, 0.5]);
        assert_eq!(
            doubling_rate(&half, &BetAllocation::no_bet(2), &odds(&[7.0, 1.1])).unwrap(),
            DoublingRate::Finite(0.0)
        );
        assert_eq!(
            doubling_rate(&half, &BetAllocation::proportional(&half), &odds(&[2.0, 2.0])).unwrap(),
            DoublingRate::Finite(0.0)
        );
        let sure = pv(&[1.0, 0.0]);
        assert_eq!(
            doubling_rate(&sure, &BetAllocation::new(0.0, vec![1.0, 0.0]).unwrap(), &odds(&[2.0, 2.0]))
                .unwrap(),
            DoublingRate::Finite(1.0)
        );
    }

    #[test]
    fn uncovered_outcome_is_ruin() {
        let bet = BetAllocation::new(0.0, vec![1.0, 0.0]).unwrap();
        assert_eq!(
            doubling_rate(&pv(&[0.5, 0.5]), &bet, &odds(&[2.0, 2.0])).unwrap(),
            DoublingRate::NegInfinite
        );
        assert!(matches!(
            doubling_rate(&pv(&[1.0]), &bet, &odds(&[2.0, 2.0])),
            Err(Error::LengthMismatch { .. })
        ));
    }

    #[test]
    fn proportional_examples() {
        let (bet, w) = optimize_fair_superfair(&ProbVector::uniform(4), &odds(&[4.0; 4])).unwrap();
        assert_eq!(bet.q0, 0.0);
        assert_eq!(w, 0.0);
        let (_, w) = optimize_fair_superfair(&pv(&[0.9, 0.1]), &odds(&[2.0, 2.0])).unwrap();
        assert!((w - 0.531_004_406_410_718_8).abs() < 1e-15);
        let (_, w) = optimize_fair_superfair(&pv(&[1.0, 0.0]), &odds(&[2.0, 2.0])).unwrap();
        assert_eq!(w, 1.0);
        assert!(matches!(
            optimize_fair_superfair(&pv(&[0.5, 0.5]), &odds(&[1.0, 1.0])),
            Err(Error::WrongRegime { .. })
        ));
    }

    #[test]
    fn subfair_no_profitable_bet() {
        let s = optimize_subfair(&pv(&[0.5, 0.5]), &odds(&[1.0, 1.0])).unwrap();
        assert!(s.in_set.is_empty());
        assert_eq!(s.allocation.q0, 1.0);
        assert_eq!(s.w_star, 0.0);
        assert!(matches!(
            optimize_subfair(&pv(&[0.5, 0.5]), &odds(&[2.0, 2.0])),
            Err(Error::WrongRegime { .. })
        ));
    }

    #[test]
    fn subfair_rate_matches_allocation() {
        for (p, o) in [
            (vec![0.9, 0.1], vec![1.5, 1.5]),
            (vec![0.6, 0.3, 0.1], vec![2.0, 2.0, 2.0]),
            (vec![0.5, 0.3, 0.2], vec![1.8, 3.5, 2.5]),
        ] {
            let p = pv(&p);
            let o = odds(&o);
            let s = optimize_subfair(&p, &o).unwrap();
            let direct = doubling_rate(&p, &s.allocation, &o).unwrap().bits();
            assert!((direct - s.w_star).abs() < 1e-12, "{direct} vs {}", s.w_star);
            assert!((s.allocation.q0 - s.threshold()).abs() < 1e-12);
            assert!((s.sigma.iter().sum::<f64>() - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn conditional_rate_examples() {
        let a = pv(&[0.7, 0.3]);
        let b = pv(&[0.4, 0.6]);
        let o = odds(&[2.0, 2.0]);
        let indep = JointProb::independent(&a, &b);
        let (_, w_a) = optimize_fair_superfair(&a, &o).unwrap();
        assert!((conditional_doubling_rate(&indep, &o).unwrap() - w_a).abs() < 1e-12);

        let diag = JointProb::new(pv(&[0.2, 0.0, 0.0, 0.0, 0.5, 0.0, 0.0, 0.0, 0.3]), 3, 3).unwrap();
        let w = conditional_doubling_rate(&diag, &odds(&[3.0; 3])).unwrap();
        assert!((w - 3f64.log2()).abs() < 1e-12);
        assert!(conditional_doubling_rate(&diag, &odds(&[2.0; 3])).is_err());
    }

    #[test]
    fn lease_examples() {
        let a = pv(&[0.7, 0.3]);
        let o = odds(&[2.0, 2.0]);
        let indep = JointProb::independent(&a, &pv(&[0.5, 0.5]));
        let (w1, w2) = lease_equivalence_check(&indep, &o, &o).unwrap();
        let (_, w_a) = optimize_fair_superfair(&a, &o).unwrap();
        assert!((w1 - w_a).abs() < 1e-12 && (w2 - w_a).abs() < 1e-12);

        let corr = JointProb::new(pv(&[0.5, 0.0, 0.0, 0.5]), 2, 2).unwrap();
        let (w1, w2) = lease_equivalence_check(&corr, &o, &o).unwrap();
        assert!((w1 - 1.0).abs() < 1e-12 && (w2 - 1.0).abs() < 1e-12);
    }
}
