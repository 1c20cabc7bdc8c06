mod common;

use common::*;
use proptest::prelude::*;
use qkelly::channel::{holevo_information, kelly_channel_rate, quantum_channel_rate, ClassicalChannel, QuantumEnsemble};
use qkelly::entropy::{classical_conditional_entropy, shannon_entropy, JointProb, ProbVector};
use qkelly::qmath::{eig_hermitian, Complex64, ComplexMatrix};
use qkelly::roulette::Measurement;
use rand::Rng;

fn random_channel(rng: &mut rand::rngs::StdRng, n: usize, m: usize) -> ClassicalChannel {
    let prior = prob_vector(rng, n);
    let rows = (0..n).map(|_| prob_vector(rng, m)).collect();
    ClassicalChannel::new(prior, rows).unwrap()
}

/// Merges the last two outcomes of a measurement into one.
fn coarse_grain(m: &Measurement) -> Measurement {
    let mut effects = m.effects();
    let last = effects.pop().unwrap();
    let prev = effects.pop().unwrap();
    effects.push(&prev + &last);
    let ops = effects
        .iter()
        .map(|e| eig_hermitian(&e.hermitian_part()).unwrap().map(|l| Complex64::new(l.max(0.0).sqrt(), 0.0)))
        .collect::<Vec<ComplexMatrix>>();
    Measurement::povm(ops).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn rate_is_mutual_information(seed: u64, n in 1usize..=5, m in 1usize..=5) {
        let mut rng = rng(seed);
        let ch = random_channel(&mut rng, n, m);
        let mut joint = Vec::with_capacity(n * m);
        for i in 0..n {
            for j in 0..m {
                joint.push(ch.input_prior()[i] * ch.transition()[i][j]);
            }
        }
        let joint = JointProb::new(ProbVector::from_clamped(joint, 1e-9).unwrap(), n, m).unwrap();
        let want = shannon_entropy(ch.input_prior()) - classical_conditional_entropy(&joint);
        prop_assert!((kelly_channel_rate(&ch).unwrap() - want).abs() < 1e-12);
    }

    #[test]
    fn holevo_bound(seed: u64, d in 2usize..=3, k in 2usize..=4) {
        let mut rng = rng(seed);
        let priors = prob_vector(&mut rng, k);
        let states = (0..k).map(|_| mixed_state(&mut rng, d)).collect();
        let ens = QuantumEnsemble::new(priors, states).unwrap();
        let outcomes = rng.gen_range(d..=d + 2);
        let m = povm(&mut rng, d, outcomes);
        let chi = holevo_information(&ens).unwrap();
        prop_assert!(quantum_channel_rate(&ens, &m).unwrap() <= chi + 1e-9);
        prop_assert!(chi >= -1e-12 && chi <= shannon(ens.priors().as_slice()) + 1e-9);
    }

    #[test]
    fn coarse_graining_never_helps(seed: u64, d in 2usize..=3, k in 2usize..=3) {
        let mut rng = rng(seed);
        let priors = prob_vector(&mut rng, k);
        let states = (0..k).map(|_| mixed_state(&mut rng, d)).collect();
        let ens = QuantumEnsemble::new(priors, states).unwrap();
        let m = povm(&mut rng, d, d + 1);
        let fine = quantum_channel_rate(&ens, &m).unwrap();
        let coarse = quantum_channel_rate(&ens, &coarse_grain(&m)).unwrap();
        prop_assert!(coarse <= fine + 1e-10);
    }

    #[test]
    fn orthogonal_pure_states_reach_the_bound(seed: u64, d in 2usize..=4) {
        let mut rng = rng(seed);
        let u = unitary(&mut rng, d);
        let priors = prob_vector(&mut rng, d);
        let states = (0..d).map(|j| qkelly::qmath::DensityMatrix::pure(&u.column(j)).unwrap()).collect();
        let ens = QuantumEnsemble::new(priors.clone(), states).unwrap();
        let rate = quantum_channel_rate(&ens, &Measurement::from_basis(&u).unwrap()).unwrap();
        prop_assert!((rate - holevo_information(&ens).unwrap()).abs() < 1e-10);
        prop_assert!((rate - shannon(priors.as_slice())).abs() < 1e-10);
    }
}
