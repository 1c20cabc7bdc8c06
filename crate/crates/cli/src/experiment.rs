//! Experiment definitions: loading from a config and running to a report.

use qkelly::channel::{holevo_information, kelly_channel_rate, quantum_channel_rate, ClassicalChannel, QuantumEnsemble};
use qkelly::entropy::{
    classical_conditional_entropy, quantum_conditional_entropy, quantum_mutual_information, shannon_entropy,
    von_neumann_entropy, JointProb, ProbVector,
};
use qkelly::helper::{
    alternating_helper_rate, discord, measure_vs_operate, variant1_rate_fixed_measurements, variant1_rate_full_control,
    variant2_rate, FixedLeaseMeasurements, LeaseSetup, OptimizerConfig, OptimizerTrace,
};
use qkelly::kelly::{
    conditional_doubling_rate, lease_equivalence_check, optimize, optimize_fair_superfair, optimize_subfair,
    BetAllocation, OddsVector, RegimeKind,
};
use qkelly::qmath::{partial_trace, DensityMatrix};
use qkelly::roulette::{optimize_bets, optimize_bets_and_measurement, outcome_probs, Measurement};
use qkelly::sim::{
    helper_table, simulate_table_trials, write_trajectory_csv, HelperProtocol, OutcomeTable, SimConfig,
};
use qkelly::states::{self, BuiltinKind};

use crate::config::Ini;
use crate::error::{CliError, CliResult};
use crate::fields::{Fields, OddsSpec};
use crate::report::{Report, Section};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExperimentKind {
    ClassicalKelly,
    QuantumRoulette,
    HelperVariant1,
    HelperVariant2,
    Discord,
    Alternating,
    Channel,
    Simulate,
}

impl ExperimentKind {
    pub const ALL: [ExperimentKind; 8] = [
        ExperimentKind::ClassicalKelly,
        ExperimentKind::QuantumRoulette,
        ExperimentKind::HelperVariant1,
        ExperimentKind::HelperVariant2,
        ExperimentKind::Discord,
        ExperimentKind::Alternating,
        ExperimentKind::Channel,
        ExperimentKind::Simulate,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ExperimentKind::ClassicalKelly => "classical-kelly",
            ExperimentKind::QuantumRoulette => "quantum-roulette",
            ExperimentKind::HelperVariant1 => "helper-variant1",
            ExperimentKind::HelperVariant2 => "helper-variant2",
            ExperimentKind::Discord => "discord",
            ExperimentKind::Alternating => "alternating",
            ExperimentKind::Channel => "channel",
            ExperimentKind::Simulate => "simulate",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|k| k.name() == name)
    }
}

#[derive(Debug, Clone)]
pub enum ClassicalSource {
    Distribution(ProbVector),
    Joint(JointProb),
}

#[derive(Debug, Clone)]
pub struct ClassicalSpec {
    pub source: ClassicalSource,
    pub odds_a: OddsVector,
    /// Odds on `B` for the lease comparison; joint sources only.
    pub odds_b: Option<OddsVector>,
}

#[derive(Debug, Clone)]
pub struct RouletteSpec {
    pub rho: DensityMatrix,
    pub measurement: Measurement,
    pub odds: OddsVector,
}

#[derive(Debug, Clone)]
pub struct Variant1Spec {
    pub rho: DensityMatrix,
    pub dims: [usize; 2],
    pub bob: Measurement,
    pub alice: Measurement,
    pub odds: OddsVector,
    /// Set when Alice also optimizes Bob's measurement.
    pub full_control: Option<OptimizerConfig>,
}

#[derive(Debug, Clone)]
pub struct Variant2Spec {
    pub rho: DensityMatrix,
    pub dims: [usize; 2],
    pub odds_a: OddsVector,
    pub odds_b: OddsVector,
    pub setup: LeaseSetup,
}

#[derive(Debug, Clone)]
pub struct DiscordSpec {
    pub rho: DensityMatrix,
    pub dims: [usize; 2],
    pub optimizer: OptimizerConfig,
    pub odds_a: OddsVector,
    pub odds_b: OddsVector,
}

#[derive(Debug, Clone)]
pub struct AlternatingSpec {
    pub rho: DensityMatrix,
    pub dims: [usize; 3],
    pub f: f64,
    pub odds: OddsVector,
}

#[derive(Debug, Clone)]
pub enum ChannelSpec {
    Classical(ClassicalChannel),
    Quantum {
        ensemble: QuantumEnsemble,
        povm: Measurement,
    },
}

#[derive(Debug, Clone)]
pub enum SimSource {
    Classical {
        p: ProbVector,
        bet: BetAllocation,
        odds: OddsVector,
    },
    Quantum {
        rho: DensityMatrix,
        measurement: Measurement,
        bet: BetAllocation,
        odds: OddsVector,
    },
    Helper {
        rho: DensityMatrix,
        dims: [usize; 2],
        protocol: HelperProtocol,
    },
}

#[derive(Debug, Clone)]
pub struct SimulateSpec {
    pub source: SimSource,
    pub sim: SimConfig,
}

#[derive(Debug, Clone)]
pub enum ExperimentSpec {
    ClassicalKelly(ClassicalSpec),
    QuantumRoulette(RouletteSpec),
    HelperVariant1(Variant1Spec),
    HelperVariant2(Variant2Spec),
    Discord(DiscordSpec),
    Alternating(AlternatingSpec),
    Channel(ChannelSpec),
    Simulate(SimulateSpec),
}

/// A fully validated experiment.
#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub kind: ExperimentKind,
    /// Source of all randomness in the run.
    pub seed: u64,
    pub spec: ExperimentSpec,
}

fn two(dims: &[usize], path: &str) -> CliResult<[usize; 2]> {
    <[usize; 2]>::try_from(dims)
        .map_err(|_| CliError::validation(path, format!("expected two subsystems, found dims {dims:?}")))
}

fn three(dims: &[usize], path: &str) -> CliResult<[usize; 3]> {
    <[usize; 3]>::try_from(dims)
        .map_err(|_| CliError::validation(path, format!("expected three subsystems, found dims {dims:?}")))
}

fn fair(n: usize) -> OddsSpec {
    OddsSpec::Uniform(n as f64)
}

impl ExperimentConfig {
    pub fn from_ini(ini: &Ini) -> CliResult<Self> {
        let f = Fields::new(ini);
        let kind_name = f.require("experiment.kind")?.value.as_str();
        let kind = ExperimentKind::from_name(kind_name).ok_or_else(|| {
            let names: Vec<_> = ExperimentKind::ALL.iter().map(|k| k.name()).collect();
            CliError::validation(
                "experiment.kind",
                format!("unknown kind `{kind_name}` (expected one of {})", names.join(", ")),
            )
        })?;
        let seed: u64 = f.parse_or("experiment.seed", 0)?;
        let spec = match kind {
            ExperimentKind::ClassicalKelly => ExperimentSpec::ClassicalKelly(load_classical(&f)?),
            ExperimentKind::QuantumRoulette => ExperimentSpec::QuantumRoulette(load_roulette(&f)?),
            ExperimentKind::HelperVariant1 => ExperimentSpec::HelperVariant1(load_variant1(&f, seed)?),
            ExperimentKind::HelperVariant2 => ExperimentSpec::HelperVariant2(load_variant2(&f)?),
            ExperimentKind::Discord => ExperimentSpec::Discord(load_discord(&f, seed)?),
            ExperimentKind::Alternating => ExperimentSpec::Alternating(load_alternating(&f)?),
            ExperimentKind::Channel => ExperimentSpec::Channel(load_channel(&f)?),
            ExperimentKind::Simulate => ExperimentSpec::Simulate(load_simulate(&f, seed)?),
        };
        f.finish()?;
        Ok(Self { kind, seed, spec })
    }

    pub fn run(&self) -> CliResult<Report> {
        let mut report = Report::new(format!("{} (seed {})", self.kind.name(), self.seed));
        match &self.spec {
            ExperimentSpec::ClassicalKelly(s) => run_classical(s, &mut report),
            ExperimentSpec::QuantumRoulette(s) => run_roulette(s, &mut report),
            ExperimentSpec::HelperVariant1(s) => run_variant1(s, &mut report),
            ExperimentSpec::HelperVariant2(s) => run_variant2(s, &mut report),
            ExperimentSpec::Discord(s) => run_discord(s, &mut report),
            ExperimentSpec::Alternating(s) => run_alternating(s, &mut report),
            ExperimentSpec::Channel(s) => run_channel(s, &mut report),
            ExperimentSpec::Simulate(s) => run_simulate(s, &mut report),
        }?;
        Ok(report)
    }
}

// ---- loading ----

fn load_classical(f: &Fields) -> CliResult<ClassicalSpec> {
    let source = if let Some(name) = f.text("distribution.builtin") {
        let b = states::find_builtin(name)
            .filter(|b| b.kind == BuiltinKind::Joint)
            .ok_or_else(|| CliError::validation("distribution.builtin", format!("unknown classical scenario `{name}`")))?;
        ClassicalSource::Joint(states::builtin_joint(b.name).expect("listed builtin"))
    } else if f.has("distribution.joint") {
        let rows = f.real_rows("distribution.joint")?;
        let (n, m) = (rows.len(), rows[0].len());
        if rows.iter().any(|r| r.len() != m) {
            return Err(CliError::validation("distribution.joint", "rows have different lengths"));
        }
        let probs = ProbVector::new(rows.concat()).map_err(|e| CliError::lib("distribution.joint", e))?;
        ClassicalSource::Joint(JointProb::new(probs, n, m).map_err(|e| CliError::lib("distribution.joint", e))?)
    } else {
        ClassicalSource::Distribution(f.prob_vector("distribution.p")?)
    };
    let (n, m) = match &source {
        ClassicalSource::Distribution(p) => (p.len(), None),
        ClassicalSource::Joint(j) => (j.rows(), Some(j.cols())),
    };
    let odds_a = f.odds("odds.a", n, fair(n))?;
    let odds_b = match m {
        Some(m) => Some(f.odds("odds.b", m, fair(m))?),
        None => None,
    };
    Ok(ClassicalSpec { source, odds_a, odds_b })
}

fn load_roulette(f: &Fields) -> CliResult<RouletteSpec> {
    let (rho, _) = f.state("state")?;
    let measurement = f.measurement("measurement", rho.dim(), "computational")?;
    let odds = f.odds("odds.a", measurement.len(), fair(measurement.len()))?;
    Ok(RouletteSpec { rho, measurement, odds })
}

fn load_variant1(f: &Fields, seed: u64) -> CliResult<Variant1Spec> {
    let (rho, dims) = f.state("state")?;
    let dims = two(&dims, "state.dims")?;
    let bob = f.measurement("bob", dims[1], "computational")?;
    let alice = f.measurement("alice", dims[0], "computational")?;
    let odds = f.odds("odds.a", alice.len(), fair(alice.len()))?;
    let full_control = if f.bool_or("helper.full_control", true)? {
        Some(f.optimizer(seed)?)
    } else {
        None
    };
    Ok(Variant1Spec {
        rho,
        dims,
        bob,
        alice,
        odds,
        full_control,
    })
}

fn load_variant2(f: &Fields) -> CliResult<Variant2Spec> {
    let (rho, dims) = f.state("state")?;
    let dims = two(&dims, "state.dims")?;
    let mode = f.text("lease.mode").unwrap_or("starstar");
    let setup = match mode {
        "starstar" => LeaseSetup::StarStar,
        "star" => LeaseSetup::Star(FixedLeaseMeasurements {
            joint: f.measurement("joint", rho.dim(), "computational")?,
            bob: f.measurement("bob", dims[1], "computational")?,
            alice: f.measurement("alice", dims[0], "computational")?,
        }),
        other => {
            return Err(CliError::validation(
                "lease.mode",
                format!("unknown mode `{other}` (expected star or starstar)"),
            ))
        }
    };
    let (na, nb) = match &setup {
        LeaseSetup::StarStar => (dims[0], dims[1]),
        LeaseSetup::Star(m) => (m.alice.len(), m.bob.len()),
    };
    if let LeaseSetup::Star(m) = &setup {
        if m.joint.len() != na * nb {
            return Err(CliError::validation(
                "joint",
                format!("joint measurement has {} outcomes, expected {na} x {nb}", m.joint.len()),
            ));
        }
    }
    Ok(Variant2Spec {
        rho,
        dims,
        odds_a: f.odds("odds.a", na, fair(na))?,
        odds_b: f.odds("odds.b", nb, fair(nb))?,
        setup,
    })
}

fn load_discord(f: &Fields, seed: u64) -> CliResult<DiscordSpec> {
    let (rho, dims) = f.state("state")?;
    let dims = two(&dims, "state.dims")?;
    Ok(DiscordSpec {
        optimizer: f.optimizer(seed)?,
        odds_a: f.odds("odds.a", dims[0], fair(dims[0]))?,
        odds_b: f.odds("odds.b", dims[1], fair(dims[1]))?,
        rho,
        dims,
    })
}

fn load_alternating(f: &Fields) -> CliResult<AlternatingSpec> {
    let (rho, dims) = f.state("state")?;
    let dims = three(&dims, "state.dims")?;
    let frac = f.f64_or("alternating.f", 0.5)?;
    if !(0.0..=1.0).contains(&frac) {
        return Err(CliError::validation("alternating.f", format!("{frac} is outside [0, 1]")));
    }
    Ok(AlternatingSpec {
        rho,
        dims,
        f: frac,
        odds: f.odds("odds.a", dims[0], fair(dims[0]))?,
    })
}

fn load_channel(f: &Fields) -> CliResult<ChannelSpec> {
    if f.has_section("odds") {
        return Err(CliError::validation(
            "odds",
            "channel gambling uses odds 1/p_i fixed by the input prior; remove the [odds] section",
        ));
    }
    if f.has("ensemble.priors") {
        let priors = f.prob_vector("ensemble.priors")?;
        let mats = f.matrix_blocks("ensemble.states")?;
        let states = mats
            .iter()
            .map(|m| qkelly::qmath::validate_density(m).map_err(|e| CliError::lib("ensemble.states", e)))
            .collect::<CliResult<Vec<_>>>()?;
        let ensemble = QuantumEnsemble::new(priors, states).map_err(|e| CliError::lib("ensemble", e))?;
        let povm = f.measurement("measurement", ensemble.dim(), "computational")?;
        Ok(ChannelSpec::Quantum { ensemble, povm })
    } else {
        let prior = f.prob_vector("channel.prior")?;
        let rows = f
            .real_rows("channel.transition")?
            .into_iter()
            .map(|r| ProbVector::new(r).map_err(|e| CliError::lib("channel.transition", e)))
            .collect::<CliResult<Vec<_>>>()?;
        Ok(ChannelSpec::Classical(
            ClassicalChannel::new(prior, rows).map_err(|e| CliError::lib("channel", e))?,
        ))
    }
}

/// `proportional`, `kelly` (log-optimal in any regime), `none`, or
/// `explicit` with `bet.q0` and `bet.q`.
fn load_bet(f: &Fields, p: &ProbVector, odds: &OddsVector) -> CliResult<BetAllocation> {
    match f.text("bet.kind").unwrap_or("kelly") {
        "proportional" => Ok(BetAllocation::proportional(p)),
        "kelly" => optimize(p, odds).map(|(b, _)| b).map_err(|e| CliError::lib("bet.kind", e)),
        "none" => Ok(BetAllocation::no_bet(p.len())),
        "explicit" => {
            let q0 = f.f64_or("bet.q0", 0.0)?;
            let q = f
                .f64_list("bet.q")?
                .ok_or_else(|| CliError::validation("bet.q", "required field is missing"))?;
            if q.len() != p.len() {
                return Err(CliError::validation("bet.q", format!("{} fractions for {} outcomes", q.len(), p.len())));
            }
            BetAllocation::new(q0, q).map_err(|e| CliError::lib("bet", e))
        }
        other => Err(CliError::validation(
            "bet.kind",
            format!("unknown bet `{other}` (expected kelly, proportional, none or explicit)"),
        )),
    }
}

fn load_simulate(f: &Fields, seed: u64) -> CliResult<SimulateSpec> {
    let source_name = f.text("simulate.source").unwrap_or("classical");
    let source = match source_name {
        "classical" => {
            let p = f.prob_vector("distribution.p")?;
            let odds = f.odds("odds.a", p.len(), fair(p.len()))?;
            let bet = load_bet(f, &p, &odds)?;
            SimSource::Classical { p, bet, odds }
        }
        "quantum" => {
            let (rho, _) = f.state("state")?;
            let measurement = f.measurement("measurement", rho.dim(), "computational")?;
            let odds = f.odds("odds.a", measurement.len(), fair(measurement.len()))?;
            let p = outcome_probs(&rho, &measurement).map_err(|e| CliError::lib("measurement", e))?;
            let bet = load_bet(f, &p, &odds)?;
            SimSource::Quantum {
                rho,
                measurement,
                bet,
                odds,
            }
        }
        "variant1-fixed" | "variant1-full" | "variant2" => {
            let (rho, dims) = f.state("state")?;
            let dims = two(&dims, "state.dims")?;
            let protocol = match source_name {
                "variant1-fixed" => {
                    let bob = f.measurement("bob", dims[1], "computational")?;
                    let alice = f.measurement("alice", dims[0], "computational")?;
                    let odds = f.odds("odds.a", alice.len(), fair(alice.len()))?;
                    HelperProtocol::Variant1Fixed { bob, alice, odds }
                }
                "variant1-full" => HelperProtocol::Variant1FullControl {
                    odds: f.odds("odds.a", dims[0], fair(dims[0]))?,
                    optimizer: f.optimizer(seed)?,
                },
                _ => HelperProtocol::Variant2 {
                    odds_a: f.odds("odds.a", dims[0], fair(dims[0]))?,
                    odds_b: f.odds("odds.b", dims[1], fair(dims[1]))?,
                    setup: LeaseSetup::StarStar,
                },
            };
            SimSource::Helper { rho, dims, protocol }
        }
        other => {
            return Err(CliError::validation(
                "simulate.source",
                format!("unknown source `{other}` (expected classical, quantum, variant1-fixed, variant1-full or variant2)"),
            ))
        }
    };
    Ok(SimulateSpec {
        source,
        sim: f.sim(seed)?,
    })
}

// ---- running ----

fn lib<T>(path: &str, r: qkelly::Result<T>) -> CliResult<T> {
    r.map_err(|e| CliError::lib(path, e))
}

fn odds_section(report: &mut Report, key: &str, label: &str, odds: &OddsVector) {
    let regime = odds.regime();
    let mut s = Section::new(format!("{label} odds"));
    s.row(format!("{key}.reserve"), "sum of 1/o_i", regime.reserve)
        .note(format!("regime: {}", regime.kind));
    if let Some(o) = odds.uniform_value() {
        s.note(format!("uniform {o}-for-1 on {} outcomes", odds.len()));
    }
    report.push(s);
}

fn probs_rows(s: &mut Section, key: &str, label: &str, p: &ProbVector) {
    for (i, v) in p.as_slice().iter().enumerate() {
        s.row(format!("{key}.{i}"), format!("{label}[{i}]"), *v);
    }
}

/// Log-optimal bet on `p` at `odds` in whatever regime they fall.
fn kelly_rows(s: &mut Section, key: &str, p: &ProbVector, odds: &OddsVector) -> CliResult<f64> {
    if odds.regime().kind == RegimeKind::SubFair {
        let sol = lib(key, optimize_subfair(p, odds))?;
        s.row(format!("{key}.w_star"), "W* (sub-fair Kelly optimum)", sol.w_star)
            .row(format!("{key}.bet_set_size"), "outcomes bet on", sol.in_set.len() as f64)
            .row(format!("{key}.gamma"), "gamma (probability of bet set)", sol.gamma)
            .row(format!("{key}.beta"), "beta (sum of 1/o over bet set)", sol.beta)
            .row(format!("{key}.q0"), "q0 (retained fraction)", sol.allocation.q0);
        Ok(sol.w_star)
    } else {
        let (_, w) = lib(key, optimize_fair_superfair(p, odds))?;
        s.row(format!("{key}.w_star"), "W* (proportional betting)", w);
        Ok(w)
    }
}

fn run_classical(spec: &ClassicalSpec, report: &mut Report) -> CliResult<()> {
    odds_section(report, "odds_a", "A", &spec.odds_a);
    let p_a = match &spec.source {
        ClassicalSource::Distribution(p) => p.clone(),
        ClassicalSource::Joint(j) => j.marginal_a(),
    };
    let mut s = Section::new("Gambling on A alone");
    let h = shannon_entropy(&p_a);
    s.row("alone.h", "H(A)", h);
    let w = kelly_rows(&mut s, "alone", &p_a, &spec.odds_a)?;
    if let Some(o) = spec.odds_a.uniform_value() {
        if spec.odds_a.regime().kind == RegimeKind::Fair {
            s.row("alone.w_plus_h", "W* + H(A)", w + h)
                .row("alone.log_o", "log o", o.log2());
        }
    }
    report.push(s);

    let ClassicalSource::Joint(joint) = &spec.source else {
        return Ok(());
    };
    let mut s = Section::new("Bob reports B");
    s.row("side.h_b", "H(B)", shannon_entropy(&joint.marginal_b()))
        .row("side.h_a_given_b", "H(A|B)", classical_conditional_entropy(joint));
    let w_cond = if spec.odds_a.regime().allows_full_investment() {
        lib("side", conditional_doubling_rate(joint, &spec.odds_a))?
    } else {
        // Sub-fair: Kelly's optimum separately for each reported value of B.
        let betas = joint.marginal_b();
        let mut acc = 0.0;
        for (j, &beta) in betas.as_slice().iter().enumerate() {
            if let Some(cond) = joint.conditional_a_given_b(j) {
                acc += beta * lib("side", optimize_subfair(&cond, &spec.odds_a))?.w_star;
            }
        }
        s.note("sub-fair odds: W*_{A|B} is the beta-weighted per-branch Kelly optimum");
        acc
    };
    s.row("side.w_star", "W*_{A|B}", w_cond).row("side.gain", "W*_{A|B} - W*_A", w_cond - w);
    report.push(s);

    let odds_b = spec.odds_b.as_ref().expect("joint sources carry B odds");
    if spec.odds_a.regime().allows_full_investment() && odds_b.regime().allows_full_investment() {
        let (w1, w2) = lib("odds", lease_equivalence_check(joint, &spec.odds_a, odds_b))?;
        let mut s = Section::new("Bob leases B (product odds)");
        s.row("lease.w_reported", "W*_{A|B} (Bob reports)", w1)
            .row("lease.w_leased", "W*_{A,B} - W*_B (Bob leases)", w2)
            .row("lease.difference", "difference", w2 - w1);
        report.push(s);
    }
    Ok(())
}

fn run_roulette(spec: &RouletteSpec, report: &mut Report) -> CliResult<()> {
    odds_section(report, "odds_a", "A", &spec.odds);
    let probs = lib("measurement", outcome_probs(&spec.rho, &spec.measurement))?;
    let mut s = Section::new("Outcomes of the given measurement");
    probs_rows(&mut s, "outcome.p", "p", &probs);
    s.row("outcome.h", "H(outcomes)", shannon_entropy(&probs))
        .row("state.s", "S(rho)", lib("state", von_neumann_entropy(&spec.rho))?);
    if spec.odds.regime().kind == RegimeKind::SubFair {
        kelly_rows(&mut s, "roulette", &probs, &spec.odds)?;
    } else {
        let r = lib("measurement", optimize_bets(&spec.rho, &spec.measurement, &spec.odds))?;
        s.row("roulette.w_star", "W* (bets only)", r.w);
    }
    report.push(s);

    let eligible = spec.odds.uniform_value().is_some()
        && spec.odds.len() == spec.rho.dim()
        && spec.odds.regime().allows_full_investment();
    if eligible {
        let r = lib("odds", optimize_bets_and_measurement(&spec.rho, &spec.odds))?;
        let mut s = Section::new("Alice also chooses the measurement (eigenbasis)");
        probs_rows(&mut s, "eigen.p", "p", &r.probs);
        s.row("roulette.w_star_star", "W** = log o - S(rho)", r.w);
        report.push(s);
    }
    Ok(())
}

fn run_variant1(spec: &Variant1Spec, report: &mut Report) -> CliResult<()> {
    odds_section(report, "odds_a", "A", &spec.odds);
    let r = lib(
        "state",
        variant1_rate_fixed_measurements(&spec.rho, spec.dims, &spec.bob, &spec.alice, &spec.odds),
    )?;
    let mut s = Section::new("Fixed measurements, Bob reports his outcome");
    s.row("fixed.w_with_help", "W*_{A|B}", r.w_with_help)
        .row("fixed.w_without", "W*_A", r.w_without)
        .row("fixed.gain", "gain", r.gain);
    report.push(s);

    let (after, avg) = lib("bob", measure_vs_operate(&spec.rho, spec.dims, &spec.bob))?;
    let mut s = Section::new("Measuring B versus operating on B");
    s.row("operate.s_after_operation", "S(A) after Bob's operation", after)
        .row("operate.avg_conditional_s", "sum_j beta_j S(rho_j)", avg);
    report.push(s);

    if let Some(cfg) = &spec.full_control {
        if spec.odds.uniform_value().is_some() && spec.odds.len() == spec.dims[0] {
            let r = lib("optimizer", variant1_rate_full_control(&spec.rho, spec.dims, &spec.odds, cfg))?;
            let mut s = Section::new("Alice chooses both measurements");
            s.row("full.w", "W**_{A|B}", r.w)
                .row("full.w_without", "W**_A", r.w_without)
                .row("full.classical_correlation", "classical correlation (gain)", r.gain);
            trace_notes(&mut s, &r.trace);
            report.push(s);
            report.attachments.push(("optimizer_trace.csv".into(), trace_csv(&r.trace)));
        }
    }
    Ok(())
}

fn run_variant2(spec: &Variant2Spec, report: &mut Report) -> CliResult<()> {
    odds_section(report, "odds_a", "A", &spec.odds_a);
    odds_section(report, "odds_b", "B", &spec.odds_b);
    let r = lib("state", variant2_rate(&spec.rho, spec.dims, &spec.odds_a, &spec.odds_b, &spec.setup))?;
    let mut s = Section::new(match spec.setup {
        LeaseSetup::StarStar => "Bob leases B (eigenbasis measurements, W_B = W**_B)",
        LeaseSetup::Star(_) => "Bob leases B (fixed measurements, W_B = W*_B)",
    });
    s.row("lease.w", "W_{A|B} (after Bob's share)", r.w)
        .row("lease.w_joint", "W on AB before the share", r.w_joint)
        .row("lease.bob_share", "W_B", r.bob_share)
        .row("lease.w_alone", "W_A", r.w_alone)
        .row("lease.gain", "gain", r.gain);
    if let LeaseSetup::StarStar = spec.setup {
        let s_ab = lib("state", quantum_conditional_entropy(&spec.rho, spec.dims))?;
        s.row("lease.s_a_given_b", "S(A|B)", s_ab)
            .row("lease.mutual_information", "S(A:B)", lib("state", quantum_mutual_information(&spec.rho, spec.dims))?);
        if let Some(o) = spec.odds_a.uniform_value() {
            s.row("lease.log_o", "log o", o.log2());
            if r.w > o.log2() + 1e-12 {
                s.note("rate exceeds log o: negative conditional entropy, impossible classically");
            }
        }
    }
    report.push(s);
    Ok(())
}

fn trace_notes(s: &mut Section, trace: &OptimizerTrace) {
    let converged = trace.restarts.iter().filter(|r| r.converged).count();
    s.note(format!(
        "{} restarts, {} converged; search over rank-one projective measurements on B",
        trace.restarts.len(),
        converged
    ));
    if let Some(g) = trace.grid_best {
        s.note(format!("best 1-degree Bloch grid value {g:.12}"));
    }
}

fn trace_csv(trace: &OptimizerTrace) -> String {
    let mut out = String::from("restart,grid_seeded,iterations,converged,best_value\n");
    for r in &trace.restarts {
        out.push_str(&format!(
            "{},{},{},{},{:.16e}\n",
            r.index, r.grid_seeded as u8, r.iterations, r.converged as u8, r.best_value
        ));
    }
    out
}

fn run_discord(spec: &DiscordSpec, report: &mut Report) -> CliResult<()> {
    let d = lib("optimizer", discord(&spec.rho, spec.dims, &spec.optimizer))?;
    let mut s = Section::new("Quantum discord");
    s.row("discord.mutual_information", "S(A:B)", d.mutual_info)
        .row("discord.classical_correlation", "classical correlation", d.classical_correlation)
        .row("discord.discord", "discord", d.discord);
    trace_notes(&mut s, &d.optimizer_trace);
    report.push(s);
    report.attachments.push(("optimizer_trace.csv".into(), trace_csv(&d.optimizer_trace)));

    let uniform = spec.odds_a.uniform_value().is_some() && spec.odds_b.uniform_value().is_some();
    if uniform {
        let v2 = lib("state", variant2_rate(&spec.rho, spec.dims, &spec.odds_a, &spec.odds_b, &LeaseSetup::StarStar))?;
        let v1 = lib("optimizer", variant1_rate_full_control(&spec.rho, spec.dims, &spec.odds_a, &spec.optimizer))?;
        let mut s = Section::new("Helper variants at uniform odds");
        s.row("gap.variant2", "W**_{A|B}, Bob leases", v2.w)
            .row("gap.variant1", "W**_{A|B}, Bob reports", v1.w)
            .row("gap.difference", "lease minus report", v2.w - v1.w);
        report.push(s);
    }
    Ok(())
}

fn run_alternating(spec: &AlternatingSpec, report: &mut Report) -> CliResult<()> {
    let w = lib("state", alternating_helper_rate(&spec.rho, spec.dims, spec.f, &spec.odds))?;
    let [a, b, c] = spec.dims;
    let rho_ab = lib("state", partial_trace(&spec.rho, &spec.dims, &[0, 1]))?;
    let rho_ac = lib("state", partial_trace(&spec.rho, &spec.dims, &[0, 2]))?;
    let s_ab = lib("state", quantum_conditional_entropy(&rho_ab, [a, b]))?;
    let s_ac = lib("state", quantum_conditional_entropy(&rho_ac, [a, c]))?;
    let mut s = Section::new("Bob alternates between B and C");
    s.row("alternating.f", "fraction of gambles with B", spec.f)
        .row("alternating.w", "W**_{A|BC}", w)
        .row("alternating.s_a_given_b", "S(A|B)", s_ab)
        .row("alternating.s_a_given_c", "S(A|C)", s_ac)
        .row("alternating.half_sum", "S(A|B)/2 + S(A|C)/2", 0.5 * (s_ab + s_ac));
    report.push(s);
    Ok(())
}

fn run_channel(spec: &ChannelSpec, report: &mut Report) -> CliResult<()> {
    let (channel, quantum) = match spec {
        ChannelSpec::Classical(ch) => (ch.clone(), None),
        ChannelSpec::Quantum { ensemble, povm } => (lib("measurement", ensemble.induced_channel(povm))?, Some((ensemble, povm))),
    };
    let mut s = Section::new("Channel gambling at odds 1/p_i");
    for (i, row) in channel.transition().iter().enumerate() {
        for (j, v) in row.as_slice().iter().enumerate() {
            s.row(format!("channel.transition.{i}.{j}"), format!("p(out={j} | in={i})"), *v);
        }
    }
    s.row("channel.h_input", "H(input)", shannon_entropy(channel.input_prior()));
    let w = match quantum {
        Some((ens, povm)) => lib("ensemble", quantum_channel_rate(ens, povm))?,
        None => lib("channel.prior", kelly_channel_rate(&channel))?,
    };
    s.row("channel.w", "W = I(input; output)", w);
    if let Some((ens, _)) = quantum {
        let chi = lib("ensemble", holevo_information(ens))?;
        s.row("channel.holevo", "Holevo information", chi)
            .row("channel.slack", "Holevo information - W", chi - w);
    }
    report.push(s);
    Ok(())
}

fn run_simulate(spec: &SimulateSpec, report: &mut Report) -> CliResult<()> {
    let (table, analytic) = match &spec.source {
        SimSource::Classical { p, bet, odds } => {
            (lib("bet", OutcomeTable::from_bet(p, bet, odds))?, lib("bet", qkelly::kelly::doubling_rate(p, bet, odds))?)
        }
        SimSource::Quantum {
            rho,
            measurement,
            bet,
            odds,
        } => {
            let p = lib("measurement", outcome_probs(rho, measurement))?;
            (lib("bet", OutcomeTable::from_bet(&p, bet, odds))?, lib("bet", qkelly::kelly::doubling_rate(&p, bet, odds))?)
        }
        SimSource::Helper { rho, dims, protocol } => {
            let (t, w) = lib("state", helper_table(rho, *dims, protocol))?;
            (t, qkelly::kelly::DoublingRate::Finite(w))
        }
    };
    let summary = lib("sim", simulate_table_trials(&table, analytic, &spec.sim))?;
    let mut s = Section::new("Monte Carlo wealth growth");
    s.row("sim.analytic", "analytic W", analytic.bits())
        .row("sim.num_gambles", "gambles per trial K", spec.sim.num_gambles as f64)
        .row("sim.trials", "trials", spec.sim.trials as f64)
        .row("sim.mean_rate", "mean empirical rate", summary.mean_rate)
        .row("sim.std_rate", "std of empirical rate", summary.std_rate)
        .row("sim.ruined", "ruined trials", summary.ruined as f64);
    let sigma = table.log_variance().sqrt();
    if sigma.is_finite() {
        let band = 3.0 * sigma / (spec.sim.num_gambles as f64).sqrt() / (spec.sim.trials as f64).sqrt();
        s.row("sim.band", "3 sigma / sqrt(K trials)", band);
        if analytic.is_finite() {
            let ok = (summary.mean_rate - analytic.bits()).abs() <= band;
            s.note(format!("mean within band: {}", if ok { "yes" } else { "no" }));
        }
    }
    for (t, traj) in summary.trajectories.iter().enumerate() {
        s.row(format!("sim.trial.{t}.rate"), format!("trial {t} (seed {})", traj.seed), traj.empirical_rate.bits());
    }
    report.push(s);
    let mut csv = Vec::new();
    write_trajectory_csv(&summary.trajectories[0], &mut csv).expect("writing to memory");
    report
        .attachments
        .push(("trajectory.csv".into(), String::from_utf8(csv).expect("ASCII output")));
    Ok(())
}
