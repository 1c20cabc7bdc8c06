//! Log-optimal (Kelly) gambling on classical outcome distributions and on
//! measurement outcomes of quantum states.
//!
//! All logarithms are base 2, so every rate is in bits per gamble and wealth
//! grows as `2^(K W)` over `K` gambles.
//!
//! Modules, bottom-up:
//!
//! - [`qmath`]: dense complex matrices, Hermitian Jacobi eigensolver,
//!   tensor products, partial traces and density-matrix validation.
//! - [`entropy`]: Shannon, relative, von Neumann, conditional and mutual
//!   entropies.
//! - [`kelly`]: classical doubling rates, proportional gambling, the sub-fair
//!   Kelly solution and side-information variants.
//! - [`roulette`]: gambling on the outcomes of a measured quantum state.
//! - [`helper`]: two-system helper protocols, classical correlation, quantum
//!   discord and the alternating helper.
//! - [`channel`]: channel gambling and the Holevo bound.
//! - [`sim`]: seeded Monte Carlo wealth trajectories.
//! - [`states`]: named fixture states used by tests and the CLI.

pub mod channel;
pub mod entropy;
mod error;
pub mod helper;
pub mod kelly;
pub mod qmath;
pub mod roulette;
pub mod sim;
pub mod states;

pub use error::{Error, Result};
