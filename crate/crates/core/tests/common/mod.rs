//! Random fixtures and independent reference computations shared by the
//! integration tests. The oracles here deliberately avoid the library code
//! they are used to check.
#![allow(dead_code)]

use qkelly::entropy::ProbVector;
use qkelly::kelly::OddsVector;
use qkelly::qmath::{eig_hermitian, Complex64, ComplexMatrix, DensityMatrix};
use qkelly::roulette::Measurement;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use rand_distr::{Exp1, StandardNormal};

pub fn rng(seed: u64) -> StdRng {
    StdRng::seed_from_u64(seed)
}

pub fn gaussian_matrix(rng: &mut StdRng, rows: usize, cols: usize) -> ComplexMatrix {
    let data = (0..rows * cols)
        .map(|_| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
        .collect();
    ComplexMatrix::from_vec(rows, cols, data).unwrap()
}

/// Uniform point of the probability simplex (flat Dirichlet).
pub fn simplex(rng: &mut StdRng, n: usize) -> Vec<f64> {
    let e: Vec<f64> = (0..n).map(|_| rng.sample::<f64, _>(Exp1)).collect();
    let s: f64 = e.iter().sum();
    e.into_iter().map(|x| x / s).collect()
}

pub fn prob_vector(rng: &mut StdRng, n: usize) -> ProbVector {
    ProbVector::from_clamped(simplex(rng, n), 1e-9).unwrap()
}

/// `G G^dagger / Tr` for a Ginibre `G` of the given rank.
pub fn density(rng: &mut StdRng, dim: usize, rank: usize) -> DensityMatrix {
    let g = gaussian_matrix(rng, dim, rank);
    let m = &g * &g.adjoint();
    let tr = m.trace().re;
    qkelly::qmath::validate_density(&m.scale_real(1.0 / tr)).unwrap()
}

/// Full-rank random state, sometimes mixed with a pure one.
pub fn mixed_state(rng: &mut StdRng, dim: usize) -> DensityMatrix {
    let rank = rng.gen_range(1..=dim);
    density(rng, dim, rank)
}

pub fn pure_state(rng: &mut StdRng, dim: usize) -> DensityMatrix {
    density(rng, dim, 1)
}

/// Haar-like unitary from Gram-Schmidt on Gaussian columns.
pub fn unitary(rng: &mut StdRng, d: usize) -> ComplexMatrix {
    let g = gaussian_matrix(rng, d, d);
    let mut cols: Vec<Vec<Complex64>> = Vec::with_capacity(d);
    for j in 0..d {
        let mut v = g.column(j);
        for u in &cols {
            let dot: Complex64 = u.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
            for (vi, ui) in v.iter_mut().zip(u) {
                *vi -= dot * ui;
            }
        }
        let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        cols.push(v.into_iter().map(|z| z / norm).collect());
    }
    let mut u = ComplexMatrix::zeros(d, d);
    for (j, c) in cols.iter().enumerate() {
        for (i, z) in c.iter().enumerate() {
            u[(i, j)] = *z;
        }
    }
    u
}

pub fn projective(rng: &mut StdRng, d: usize) -> Measurement {
    Measurement::from_basis(&unitary(rng, d)).unwrap()
}

/// `k` operators `A_i S^{-1/2}` with `S = Σ A_i^dagger A_i`, so that
/// `Σ F_i^dagger F_i = 1`.
pub fn povm(rng: &mut StdRng, d: usize, k: usize) -> Measurement {
    let a: Vec<ComplexMatrix> = (0..k).map(|_| gaussian_matrix(rng, d, d)).collect();
    let s = a
        .iter()
        .fold(ComplexMatrix::zeros(d, d), |acc, m| &acc + &(&m.adjoint() * m));
    let inv_sqrt = eig_hermitian(&s.hermitian_part())
        .unwrap()
        .map(|l| Complex64::new(1.0 / l.sqrt(), 0.0));
    Measurement::povm(a.iter().map(|m| m * &inv_sqrt).collect()).unwrap()
}

// ---- oracles ----

pub fn shannon(p: &[f64]) -> f64 {
    p.iter().filter(|&&x| x > 0.0).map(|&x| -x * x.ln()).sum::<f64>() / std::f64::consts::LN_2
}

/// Eigenvalues of a 2x2 Hermitian matrix from the characteristic polynomial.
pub fn eig2(m: &ComplexMatrix) -> [f64; 2] {
    let a = m[(0, 0)].re;
    let d = m[(1, 1)].re;
    let b = m[(0, 1)].norm();
    let mean = 0.5 * (a + d);
    let r = (0.25 * (a - d) * (a - d) + b * b).sqrt();
    [mean + r, mean - r]
}

pub fn vn2(m: &ComplexMatrix) -> f64 {
    shannon(&eig2(m).map(|x| x.max(0.0)))
}

/// Eigenvalues of a 3x3 Hermitian matrix by the trigonometric solution of
/// the characteristic cubic.
pub fn eig3(m: &ComplexMatrix) -> [f64; 3] {
    let q = (m[(0, 0)].re + m[(1, 1)].re + m[(2, 2)].re) / 3.0;
    let p1 = m[(0, 1)].norm_sqr() + m[(0, 2)].norm_sqr() + m[(1, 2)].norm_sqr();
    let p2 = (0..3).map(|i| (m[(i, i)].re - q).powi(2)).sum::<f64>() + 2.0 * p1;
    if p2 < 1e-30 {
        return [q; 3];
    }
    let p = (p2 / 6.0).sqrt();
    let b = |i: usize, j: usize| {
        let shift = if i == j { q } else { 0.0 };
        (m[(i, j)] - Complex64::new(shift, 0.0)) / p
    };
    let det = b(0, 0) * (b(1, 1) * b(2, 2) - b(1, 2) * b(2, 1)) - b(0, 1) * (b(1, 0) * b(2, 2) - b(1, 2) * b(2, 0))
        + b(0, 2) * (b(1, 0) * b(2, 1) - b(1, 1) * b(2, 0));
    let phi = (det.re / 2.0).clamp(-1.0, 1.0).acos() / 3.0;
    let e1 = q + 2.0 * p * phi.cos();
    let e3 = q + 2.0 * p * (phi + 2.0 * std::f64::consts::PI / 3.0).cos();
    [e1, 3.0 * q - e1 - e3, e3]
}

/// Von Neumann entropy in bits for dimension 1, 2 or 3.
pub fn vn_small(m: &ComplexMatrix) -> f64 {
    match m.rows() {
        1 => 0.0,
        2 => vn2(m),
        3 => shannon(&eig3(m).map(|x| x.max(0.0))),
        d => panic!("no closed-form oracle for dimension {d}"),
    }
}

/// `Tr_B` by explicit summation over the four indices `(i, k; i', k')`.
pub fn trace_out_b(rho: &ComplexMatrix, da: usize, db: usize) -> ComplexMatrix {
    let mut out = ComplexMatrix::zeros(da, da);
    for i in 0..da {
        for ip in 0..da {
            for k in 0..db {
                for kp in 0..db {
                    if k == kp {
                        out[(i, ip)] += rho[(i * db + k, ip * db + kp)];
                    }
                }
            }
        }
    }
    out
}

/// `Tr_A` by explicit summation.
pub fn trace_out_a(rho: &ComplexMatrix, da: usize, db: usize) -> ComplexMatrix {
    let mut out = ComplexMatrix::zeros(db, db);
    for k in 0..db {
        for kp in 0..db {
            for i in 0..da {
                out[(k, kp)] += rho[(i * db + k, i * db + kp)];
            }
        }
    }
    out
}

/// `max over a 1-degree Bloch grid of S(A) - Σ β S(ρ_A|n)` for a two-qubit
/// state, computed entry by entry with closed-form 2x2 entropies.
pub fn bloch_grid_classical_correlation(rho: &ComplexMatrix) -> f64 {
    let s_a = vn2(&trace_out_b(rho, 2, 2));
    let mut best = f64::NEG_INFINITY;
    for t in 0..=180 {
        let theta = (t as f64).to_radians();
        for ph in 0..360 {
            let phi = (ph as f64).to_radians();
            let e = Complex64::from_polar(1.0, phi);
            let n = [Complex64::new((theta / 2.0).cos(), 0.0), e * (theta / 2.0).sin()];
            let m = [Complex64::new((theta / 2.0).sin(), 0.0), -e * (theta / 2.0).cos()];
            let mut avg = 0.0;
            for ket in [n, m] {
                let mut red = ComplexMatrix::zeros(2, 2);
                for i in 0..2 {
                    for ip in 0..2 {
                        let mut acc = Complex64::new(0.0, 0.0);
                        for k in 0..2 {
                            for l in 0..2 {
                                acc += rho[(i * 2 + k, ip * 2 + l)] * ket[l] * ket[k].conj();
                            }
                        }
                        red[(i, ip)] = acc;
                    }
                }
                let beta = red[(0, 0)].re + red[(1, 1)].re;
                if beta > 1e-12 {
                    avg += beta * vn2(&red.scale_real(1.0 / beta));
                }
            }
            best = best.max(s_a - avg);
        }
    }
    best
}

/// `Σ p_i log2(q0 + q_i o_i)`, `-inf` on ruin.
pub fn log_growth(p: &[f64], q0: f64, q: &[f64], o: &[f64]) -> f64 {
    let mut w = 0.0;
    for i in 0..p.len() {
        if p[i] > 0.0 {
            let x = q0 + q[i] * o[i];
            if x <= 0.0 {
                return f64::NEG_INFINITY;
            }
            w += p[i] * x.log2();
        }
    }
    w
}

fn golden_max(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> f64 {
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..200 {
        if (b - a).abs() < 1e-14 {
            break;
        }
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = f(d);
        }
    }
    0.5 * (a + b)
}

/// Brute-force optimum of `Σ p_i log(q0 + q_i o_i)` over the simplex
/// `(q0, q_1..q_n)`: a grid of the given resolution, then golden-section
/// transfers of mass between every pair of coordinates until nothing moves.
pub fn simplex_grid_optimum(p: &[f64], o: &[f64], resolution: f64) -> f64 {
    let n = p.len();
    let steps = (1.0 / resolution).round() as usize;
    let eval = |x: &[f64]| log_growth(p, x[0], &x[1..], o);
    let mut best_x = vec![0.0; n + 1];
    let mut best = f64::NEG_INFINITY;
    let mut counts = vec![0usize; n + 1];
    // Enumerate compositions of `steps` into n + 1 parts.
    fn walk(
        k: usize,
        left: usize,
        counts: &mut Vec<usize>,
        steps: usize,
        visit: &mut dyn FnMut(&[usize]),
    ) {
        if k + 1 == counts.len() {
            counts[k] = left;
            visit(counts);
            return;
        }
        for c in 0..=left {
            counts[k] = c;
            walk(k + 1, left - c, counts, steps, visit);
        }
    }
    let mut x = vec![0.0; n + 1];
    walk(0, steps, &mut counts, steps, &mut |c: &[usize]| {
        for (xi, ci) in x.iter_mut().zip(c) {
            *xi = *ci as f64 / steps as f64;
        }
        let v = eval(&x);
        if v > best {
            best = v;
            best_x.copy_from_slice(&x);
        }
    });

    let mut x = best_x;
    for _ in 0..200 {
        let before = eval(&x);
        for i in 0..=n {
            for j in (i + 1)..=n {
                let total = x[i] + x[j];
                let along = |t: f64| {
                    let mut y = x.clone();
                    y[i] = t;
                    y[j] = total - t;
                    eval(&y)
                };
                let t = golden_max(along, 0.0, total);
                let mut y = x.clone();
                y[i] = t;
                y[j] = total - t;
                if eval(&y) >= eval(&x) {
                    x = y;
                }
            }
        }
        if eval(&x) - before < 1e-15 {
            break;
        }
    }
    eval(&x).max(best)
}

pub fn uniform_odds(o: f64, n: usize) -> OddsVector {
    OddsVector::uniform(o, n).unwrap()
}

/// Random odds with `Σ 1/o_i = reserve`.
pub fn odds_with_reserve(rng: &mut StdRng, n: usize, reserve: f64) -> OddsVector {
    let w = simplex(rng, n);
    OddsVector::new(w.iter().map(|x| 1.0 / (x * reserve)).collect()).unwrap()
}
