//! Numerical laboratory for preparing the stationary state of a reversible
//! Markov chain with interpolated Szegedy walks.
//!
//! The pieces, bottom up:
//!
//! * [`chain`] and [`graph`]: transition matrices, lazy and absorbing
//!   variants, interpolation `P(s)` and the discriminant `D`.
//! * [`spectral`]: Jacobi eigensolver, hitting times, mixing times.
//! * [`walkspace`]: statevector over `R1..R5` and the walk primitives.
//! * [`qff`]: quantum fast-forwarding, the truncated Chebyshev simulation of `Dᵗ`.
//! * [`reflect`]: the approximate reflection about `|π⟩` and the Hadamard check.
//! * [`sampler`]: the preparation pipelines for known and unknown `π_g`.
//! * [`families`], [`scaling`], [`report`]: graph generators, scaling sweeps
//!   and report emission for the CLI.

pub mod chain;
pub mod error;
pub mod families;
pub mod graph;
pub mod qff;
pub mod reflect;
pub mod report;
pub mod sampler;
pub mod scaling;
pub mod spectral;
pub mod walkspace;

pub use chain::{
    absorbing_mod, discriminant, interpolate, pi_bar, random_walk_chain, Discriminant, InterpolatedChain, MarkovChain,
    Transition,
};
pub use error::{Error, Result};
pub use graph::{from_edge_list, Graph};
pub use spectral::{hitting_time_oracle, hitting_time_spectral, sym_eig, Spectrum};
pub use walkspace::{RegisterLayout, StateVector};
