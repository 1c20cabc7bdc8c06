//! Classical correlation `J(A|B) = max_F [S(A) - Σ_j β_j S(ρ^A_j)]` and the
//! quantum discord `S(A:B) - J(A|B)`.
//!
//! The maximization runs over rank-one orthogonal projective measurements on
//! `B`, written as the columns of `base · exp(iH(θ))` for a Hermitian `H`
//! with `dim_B²` real parameters. Each restart is a Nelder–Mead search; for a
//! qubit `B` one restart starts from the best point of a 1° Bloch-sphere grid.
//! The returned value is the objective at an actual measurement, so it is a
//! lower bound on the true maximum.

use num_complex::Complex64;
use rayon::prelude::*;

use super::nelder_mead::{self, NelderMeadConfig};
use super::{check_bipartite, reduce_with_effect, NEGLIGIBLE_BRANCH};
use crate::entropy::{quantum_mutual_information, spectral_entropy, von_neumann_entropy};
use crate::kelly::OddsVector;
use crate::qmath::{eig_hermitian, partial_trace, ComplexMatrix, DensityMatrix};
use crate::roulette::{uniform_odds, Measurement};
use crate::sim::{rng_from_seed, uniform01};
use crate::{Error, Result};

/// Settings for the classical-correlation search.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OptimizerConfig {
    pub restarts: usize,
    pub max_iterations: usize,
    pub diameter_tol: f64,
    /// Initial simplex edge for random restarts.
    pub initial_step: f64,
    /// Initial simplex edge for the grid-seeded restart.
    pub seeded_step: f64,
    /// Seed the first restart from a Bloch-sphere grid when `dim_B = 2`.
    pub grid_seed: bool,
    /// Fail instead of returning the best point when no restart converged.
    pub require_convergence: bool,
    pub seed: u64,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        Self {
            restarts: 32,
            max_iterations: 2000,
            diameter_tol: 1e-8,
            initial_step: 0.5,
            seeded_step: 0.02,
            grid_seed: true,
            require_convergence: false,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RestartRecord {
    pub index: usize,
    pub grid_seeded: bool,
    pub iterations: usize,
    pub converged: bool,
    pub best_value: f64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct OptimizerTrace {
    pub restarts: Vec<RestartRecord>,
    /// Best grid value, when the grid ran.
    pub grid_best: Option<f64>,
}

/// Real parameters of a Hermitian generator: the `d` diagonal entries, then
/// `(re, im)` of each strictly upper entry in row-major order.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasurementParams {
    pub dim: usize,
    pub values: Vec<f64>,
}

impl MeasurementParams {
    pub fn new(dim: usize, values: Vec<f64>) -> Result<Self> {
        if values.len() != dim * dim {
            return Err(Error::LengthMismatch {
                left: values.len(),
                right: dim * dim,
            });
        }
        Ok(Self { dim, values })
    }

    pub fn hermitian(&self) -> ComplexMatrix {
        hermitian_from(self.dim, &self.values)
    }

    /// `exp(iH)`.
    pub fn unitary(&self) -> Result<ComplexMatrix> {
        unitary_from(self.dim, &self.values)
    }

    /// Rank-one projectors onto the columns of `exp(iH)`.
    pub fn measurement(&self) -> Result<Measurement> {
        Measurement::from_basis(&self.unitary()?)
    }
}

fn hermitian_from(dim: usize, values: &[f64]) -> ComplexMatrix {
    let mut h = ComplexMatrix::zeros(dim, dim);
    for i in 0..dim {
        h[(i, i)] = Complex64::new(values[i], 0.0);
    }
    let mut k = dim;
    for i in 0..dim {
        for j in (i + 1)..dim {
            let z = Complex64::new(values[k], values[k + 1]);
            h[(i, j)] = z;
            h[(j, i)] = z.conj();
            k += 2;
        }
    }
    h
}

fn unitary_from(dim: usize, values: &[f64]) -> Result<ComplexMatrix> {
    let spectrum = eig_hermitian(&hermitian_from(dim, values))?;
    Ok(spectrum.map(|l| Complex64::from_polar(1.0, l)))
}

/// `Σ_j β_j S(ρ^A_j)` for rank-one projectors onto the columns of `basis`.
fn average_collapsed_entropy(rho_ab: &ComplexMatrix, dims: [usize; 2], basis: &ComplexMatrix) -> Result<f64> {
    let mut acc = 0.0;
    for k in 0..basis.cols() {
        let effect = ComplexMatrix::projector(&basis.column(k));
        let reduced = reduce_with_effect(rho_ab, dims, &effect);
        let beta = reduced.trace().re;
        if beta < NEGLIGIBLE_BRANCH {
            continue;
        }
        let spectrum = eig_hermitian(&reduced.scale_real(1.0 / beta).hermitian_part())?;
        acc += beta * spectral_entropy(&spectrum.eigenvalues)?;
    }
    Ok(acc)
}

/// Qubit basis `{|n>, |n⊥>}` for Bloch angles `(θ, φ)`.
fn bloch_basis(theta: f64, phi: f64) -> ComplexMatrix {
    let (c, s) = ((theta / 2.0).cos(), (theta / 2.0).sin());
    let e = Complex64::from_polar(1.0, phi);
    let mut u = ComplexMatrix::zeros(2, 2);
    u[(0, 0)] = Complex64::new(c, 0.0);
    u[(1, 0)] = e * s;
    u[(0, 1)] = Complex64::new(s, 0.0);
    u[(1, 1)] = -e * c;
    u
}

/// Result of the classical-correlation search.
#[derive(Debug, Clone)]
pub struct ClassicalCorrelation {
    pub value: f64,
    pub best_measurement: Measurement,
    pub trace: OptimizerTrace,
}

/// `J(A|B) = max_F [S(A) - Σ_j β_j S(ρ^A_j)]` over rank-one projective
/// measurements on `B`.
pub fn classical_correlation(rho_ab: &DensityMatrix, dims: [usize; 2], cfg: &OptimizerConfig) -> Result<ClassicalCorrelation> {
    check_bipartite(rho_ab, dims)?;
    if cfg.restarts == 0 {
        return Err(Error::InvalidArgument("optimizer needs at least one restart".into()));
    }
    let db = dims[1];
    let n_params = db * db;
    let s_a = von_neumann_entropy(&partial_trace(rho_ab, &dims, &[0])?)?;
    let m = rho_ab.matrix();

    let mut trace = OptimizerTrace::default();
    let grid_base = if db == 2 && cfg.grid_seed {
        let mut best = (f64::INFINITY, 0.0, 0.0);
        for ti in 0..180 {
            let theta = (ti as f64).to_radians();
            for pi in 0..360 {
                let phi = (pi as f64).to_radians();
                let cost = average_collapsed_entropy(m, dims, &bloch_basis(theta, phi))?;
                if cost < best.0 {
                    best = (cost, theta, phi);
                }
            }
        }
        trace.grid_best = Some(s_a - best.0);
        Some(bloch_basis(best.1, best.2))
    } else {
        None
    };

    let nm = |step: f64| NelderMeadConfig {
        max_iterations: cfg.max_iterations,
        diameter_tol: cfg.diameter_tol,
        initial_step: step,
    };

    // (cost, params, base, record)
    let runs: Vec<(f64, Vec<f64>, ComplexMatrix, RestartRecord)> = (0..cfg.restarts)
        .into_par_iter()
        .map(|index| {
            let seeded = index == 0 && grid_base.is_some();
            let (base, x0, step) = if seeded {
                (grid_base.clone().unwrap(), vec![0.0; n_params], cfg.seeded_step)
            } else {
                let mut rng = rng_from_seed(cfg.seed.wrapping_add(index as u64));
                let x0 = (0..n_params)
                    .map(|_| (2.0 * uniform01(&mut rng) - 1.0) * std::f64::consts::PI)
                    .collect();
                (ComplexMatrix::identity(db), x0, cfg.initial_step)
            };
            let objective = |x: &[f64]| -> f64 {
                unitary_from(db, x)
                    .and_then(|u| average_collapsed_entropy(m, dims, &(&base * &u)))
                    .unwrap_or(f64::NAN)
            };
            let out = nelder_mead::minimize(objective, &x0, &nm(step));
            let record = RestartRecord {
                index,
                grid_seeded: seeded,
                iterations: out.iterations,
                converged: out.converged,
                best_value: s_a - out.value,
            };
            (out.value, out.x, base, record)
        })
        .collect();

    let mut best: Option<usize> = None;
    for (k, run) in runs.iter().enumerate() {
        if run.0.is_finite() && best.is_none_or(|b| run.0 < runs[b].0) {
            best = Some(k);
        }
    }
    let best = best.ok_or_else(|| Error::OptimizerFailed("every restart produced a non-finite objective".into()))?;
    if cfg.require_convergence && !runs.iter().any(|r| r.3.converged) {
        return Err(Error::OptimizerFailed(format!(
            "none of {} restarts converged within {} iterations",
            cfg.restarts, cfg.max_iterations
        )));
    }
    let (cost, x, base, _) = &runs[best];
    let best_measurement = Measurement::from_basis(&(base * &unitary_from(db, x)?))?;
    trace.restarts = runs.iter().map(|r| r.3.clone()).collect();

    Ok(ClassicalCorrelation {
        value: (s_a - cost).clamp(0.0, s_a),
        best_measurement,
        trace,
    })
}

#[derive(Debug, Clone)]
pub struct DiscordReport {
    pub mutual_info: f64,
    pub classical_correlation: f64,
    pub discord: f64,
    /// Bob's measurement attaining `classical_correlation`.
    pub best_measurement: Measurement,
    pub optimizer_trace: OptimizerTrace,
}

/// `D(A⟩B) = S(A:B) - J(A|B)`. Since `J` is a lower bound on the maximum,
/// the reported discord is an upper bound within optimizer tolerance.
pub fn discord(rho_ab: &DensityMatrix, dims: [usize; 2], cfg: &OptimizerConfig) -> Result<DiscordReport> {
    let mutual_info = quantum_mutual_information(rho_ab, dims)?;
    let cc = classical_correlation(rho_ab, dims, cfg)?;
    Ok(DiscordReport {
        mutual_info,
        classical_correlation: cc.value,
        discord: mutual_info - cc.value,
        best_measurement: cc.best_measurement,
        optimizer_trace: cc.trace,
    })
}

/// Variant 1 with Alice choosing Bob's measurement and her own (the
/// eigenbasis of each collapsed state), at uniform odds.
#[derive(Debug, Clone)]
pub struct FullControlReport {
    /// `W**_{A|B} = log o - S(A) + J(A|B)`.
    pub w: f64,
    /// `W**_A = log o - S(A)`.
    pub w_without: f64,
    /// `J(A|B)`.
    pub gain: f64,
    pub best_measurement: Measurement,
    pub trace: OptimizerTrace,
}

pub fn variant1_rate_full_control(
    rho_ab: &DensityMatrix,
    dims: [usize; 2],
    odds: &OddsVector,
    cfg: &OptimizerConfig,
) -> Result<FullControlReport> {
    check_bipartite(rho_ab, dims)?;
    let o = uniform_odds(odds, dims[0])?;
    let s_a = von_neumann_entropy(&partial_trace(rho_ab, &dims, &[0])?)?;
    let cc = classical_correlation(rho_ab, dims, cfg)?;
    let w_without = o.log2() - s_a;
    Ok(FullControlReport {
        w: w_without + cc.value,
        w_without,
        gain: cc.value,
        best_measurement: cc.best_measurement,
        trace: cc.trace,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::states;

    fn quick() -> OptimizerConfig {
        OptimizerConfig {
            restarts: 4,
            ..OptimizerConfig::default()
        }
    }

    #[test]
    fn params_generate_unitaries() {
        let p = MeasurementParams::new(3, (0..9).map(|k| 0.3 * k as f64 - 1.0).collect()).unwrap();
        let u = p.unitary().unwrap();
        assert!((&u.adjoint() * &u).max_abs_diff(&ComplexMatrix::identity(3)) < 1e-12);
        assert_eq!(p.measurement().unwrap().len(), 3);
        assert!(MeasurementParams::new(2, vec![0.0; 3]).is_err());
    }

    #[test]
    fn bloch_basis_is_unitary() {
        let u = bloch_basis(1.1, 2.3);
        assert!((&u.adjoint() * &u).max_abs_diff(&ComplexMatrix::identity(2)) < 1e-14);
    }

    #[test]
    fn product_state_has_no_correlation() {
        let prod = DensityMatrix::diagonal(&[0.7, 0.3]).unwrap().tensor(&states::plus());
        let cc = classical_correlation(&prod, [2, 2], &quick()).unwrap();
        assert!(cc.value.abs() < 1e-9);
        let d = discord(&prod, [2, 2], &quick()).unwrap();
        assert!(d.discord.abs() < 1e-9);
    }

    #[test]
    fn named_states() {
        let cfg = OptimizerConfig::default();
        let bell = discord(&states::bell(), [2, 2], &cfg).unwrap();
        assert!((bell.classical_correlation - 1.0).abs() < 1e-3);
        assert!((bell.discord - 1.0).abs() < 2e-3);
        let cl = discord(&states::classical_corr(), [2, 2], &cfg).unwrap();
        assert!((cl.classical_correlation - 1.0).abs() < 1e-3);
        assert!(cl.discord.abs() < 2e-3);
        assert_eq!(cl.optimizer_trace.restarts.len(), 32);
        assert!(cl.optimizer_trace.restarts[0].grid_seeded);
    }

    #[test]
    fn full_control_examples() {
        let o = OddsVector::uniform(2.0, 2).unwrap();
        let a = DensityMatrix::diagonal(&[0.9, 0.1]).unwrap();
        let prod = a.tensor(&DensityMatrix::maximally_mixed(2));
        let r = variant1_rate_full_control(&prod, [2, 2], &o, &quick()).unwrap();
        let s_a = von_neumann_entropy(&a).unwrap();
        assert!((r.w - (1.0 - s_a)).abs() < 1e-9);
        for rho in [states::bell(), states::classical_corr()] {
            let r = variant1_rate_full_control(&rho, [2, 2], &o, &quick()).unwrap();
            assert!((r.w - 1.0).abs() < 1e-3);
        }
    }

    #[test]
    fn deterministic_across_runs() {
        let rho = states::werner(0.4);
        let cfg = OptimizerConfig {
            restarts: 6,
            grid_seed: false,
            seed: 99,
            ..OptimizerConfig::default()
        };
        let a = classical_correlation(&rho, [2, 2], &cfg).unwrap();
        let b = classical_correlation(&rho, [2, 2], &cfg).unwrap();
        assert_eq!(a.value.to_bits(), b.value.to_bits());
        assert_eq!(a.trace, b.trace);
    }

    #[test]
    fn qutrit_helper() {
        // Perfectly correlated qubit-qutrit classical state: J = S(A) = 1.
        let mut diag = vec![0.0; 6];
        diag[0] = 0.5;
        diag[4] = 0.5;
        let rho = DensityMatrix::diagonal(&diag).unwrap();
        let cc = classical_correlation(&rho, [2, 3], &OptimizerConfig::default()).unwrap();
        assert!((cc.value - 1.0).abs() < 1e-3, "{}", cc.value);
    }

    #[test]
    fn strict_mode_reports_unconverged_search() {
        let cfg = OptimizerConfig {
            restarts: 2,
            max_iterations: 1,
            grid_seed: false,
            require_convergence: true,
            ..OptimizerConfig::default()
        };
        let err = classical_correlation(&states::werner(0.5), [2, 2], &cfg).unwrap_err();
        assert!(matches!(err, Error::OptimizerFailed(_)));
        let relaxed = OptimizerConfig {
            require_convergence: false,
            ..cfg
        };
        assert!(classical_correlation(&states::werner(0.5), [2, 2], &relaxed).is_ok());
    }

    #[test]
    fn zero_restarts_rejected() {
        let cfg = OptimizerConfig {
            restarts: 0,
            ..OptimizerConfig::default()
        };
        assert!(classical_correlation(&states::bell(), [2, 2], &cfg).is_err());
    }
}
