//! Register model and primitive unitaries for the walk circuits.
//!
//! Coin basis index 0 plays the role of `|0̄⟩`. The swap is global rather
//! than edge-restricted; on the subspace the walk can reach from
//! `V|x⟩|0̄⟩` the two agree (tested below).

mod dump;
mod gates;
mod layout;
mod measure;
mod walk;

use nalgebra::DVector;

pub use dump::{read_state, write_state};
pub use gates::{apply_ctrl_flip, apply_x, Controls, Pauli};
pub use layout::{init_state, Coords, Flag, RegisterLayout, StateVector, MAX_DIM};
pub use measure::{measure_collapse, outcome_prob, project, Projector, R1Constraint};
pub use walk::{apply_coin_prep, apply_ref0, apply_swap, apply_walk, Walk};

pub(crate) use walk::Householder;

use crate::chain::MarkovChain;
use crate::error::{Error, Result};

/// Overlaps of the principal eigenvector `v₀(s)` of `D(s)` with `M = {g}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EigenOverlaps {
    /// `⟨v₀(s)|g⟩`.
    pub beta0: f64,
    /// `⟨v₀(s)|π̄⟩`.
    pub pibar: f64,
    /// `⟨π|v₀(s)⟩`.
    pub pi: f64,
}

/// Closed-form overlaps as functions of `π_g` and `s`.
///
/// Only `q = 1 - s(1 - π_g) > 0` is required, so this also evaluates the
/// algebraic continuation to `s < 0`.
pub fn eigen_overlaps(pi_g: f64, s: f64) -> Result<EigenOverlaps> {
    if !(pi_g > 0.0 && pi_g < 1.0) {
        return Err(Error::Domain(format!("π_g = {pi_g} outside (0, 1)")));
    }
    let q = 1.0 - s * (1.0 - pi_g);
    if q <= 1e-15 || s > 1.0 {
        return Err(Error::Domain(format!("s = {s} leaves no mass off the marked vertex")));
    }
    let beta0 = (pi_g / q).sqrt();
    let pibar = ((1.0 - s) * (1.0 - pi_g) / q).sqrt();
    let pi = (1.0 - pi_g) * ((1.0 - s) / q).sqrt() + pi_g / q.sqrt();
    Ok(EigenOverlaps { beta0, pibar, pi })
}

/// `v₀(s)`, `β₀(s)` and `⟨π|v₀(s)⟩` for the chain interpolated towards `g`.
#[derive(Debug, Clone, PartialEq)]
pub struct InterpolationEigen {
    pub v0: DVector<f64>,
    pub beta0: f64,
    pub overlap_pi: f64,
}

pub fn interpolation_eigenvector(c: &MarkovChain, g: usize, s: f64) -> Result<InterpolationEigen> {
    if g >= c.n() {
        return Err(Error::Domain(format!("vertex {g} out of range for n = {}", c.n())));
    }
    if !(0.0..=1.0).contains(&s) {
        return Err(Error::Domain(format!("interpolation parameter {s} outside [0, 1]")));
    }
    let pi_g = c.pi()[g];
    let ov = eigen_overlaps(pi_g, s)?;
    let q = 1.0 - s * (1.0 - pi_g);
    let mut v0 = c.pi().map(|p| ((1.0 - s) * p / q).sqrt());
    v0[g] = ov.beta0;
    Ok(InterpolationEigen { v0, beta0: ov.beta0, overlap_pi: ov.pi })
}
