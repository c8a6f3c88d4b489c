//! Stationary-state preparation pipelines.
//!
//! * [`umain`]: the preparation unitary for a guess of `π_g` and its
//!   success projections.
//! * [`amplify`]: amplitude amplification when `π_g` is known.
//! * [`compare`]: deciding whether a guess is close to, below or above `π_g`.
//! * [`search`]: backtracking binary search over guesses.
//! * [`unknown`]: the driver for unknown `π_g`.

pub mod amplify;
pub mod compare;
pub mod config;
pub mod search;
pub mod umain;
pub mod unknown;

use serde::{Deserialize, Serialize};

pub use amplify::{amplify_direct, amplitude_amplify};
pub use compare::{CircuitCache, CircuitEval, Comparison, IdealComparator, PiComparator, QuantumComparator};
pub use config::{PiLowerBound, SamplerConfig};
pub use search::{binary_search_pig, SearchOutcome};
pub use umain::{apply_u_main, interpolation_parameter, success_projection, SuccessProjector, UMain, UMainDiagnostics};
pub use unknown::{prepare_unknown, prepare_unknown_cached};

use crate::chain::MarkovChain;
use crate::error::Result;
use crate::walkspace::{outcome_prob, Projector, R1Constraint, StateVector};

/// `‖(|π⟩⟨π| ⊗ I) ψ‖² / ‖ψ‖²`: overlap of the R1 marginal with `|π⟩`.
pub fn fidelity(psi: &StateVector, c: &MarkovChain) -> Result<f64> {
    let proj =
        Projector { r1: Some(R1Constraint::Vector(c.sqrt_pi().iter().copied().collect())), ..Default::default() };
    Ok((outcome_prob(psi, &proj)? / psi.norm_sqr()).clamp(0.0, 1.0))
}

/// Ancilla qubits used by a run: R2, R3, R4, R5 and the check qubit.
pub fn ancilla_qubits(n: usize, tau: u32) -> u32 {
    let r2 = usize::BITS - (n.max(1) - 1).leading_zeros();
    r2 + tau + 3
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TrialKind {
    /// `π_g` supplied; `U_main` plus amplitude amplification.
    Known,
    /// `π_g` searched for.
    Unknown,
    /// Amplification straight from `|g⟩`.
    Direct,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Success,
    Fail,
}

/// One entry of a trial's measurement transcript.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "event", rename_all = "kebab-case")]
pub enum Event {
    /// Amplification schedule chosen from the initial good amplitude.
    Amplify {
        rounds: usize,
        amplitude: f64,
    },
    /// One Hadamard check on an amplified state.
    Check {
        prob: f64,
        is_pi: bool,
    },
    /// A block of up to `copies` checks at guess `x`; `runs` were performed.
    CheckBlock {
        x: f64,
        prob: f64,
        runs: usize,
        close: bool,
    },
    /// Flag-and-`g` counting block at guess `x`.
    GCount {
        x: f64,
        prob: f64,
        hits: usize,
        copies: usize,
        below: bool,
    },
    /// A search iteration on `[l, u]` at depth `level`.
    Search {
        iteration: usize,
        level: usize,
        l: f64,
        u: f64,
    },
    Backtrack {
        level: usize,
    },
    Restart,
    FastPath {
        pi_lb: f64,
    },
    Retry {
        attempt: usize,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialReport {
    pub kind: TrialKind,
    pub n: usize,
    pub g: usize,
    /// True `π_g`, for diagnostics only; the algorithms never read it
    /// unless the caller supplied it.
    pub pi_g: f64,
    pub eps: f64,
    pub fidelity: f64,
    pub pi_star: Option<f64>,
    pub walk_calls: u64,
    pub ancilla_qubits: u32,
    pub transcript: Vec<Event>,
    pub verdict: Verdict,
    pub seed: u64,
}

impl TrialReport {
    pub fn succeeded(&self) -> bool {
        self.verdict == Verdict::Success
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ancilla_count() {
        assert_eq!(ancilla_qubits(1, 0), 3);
        assert_eq!(ancilla_qubits(2, 0), 4);
        assert_eq!(ancilla_qubits(4, 2), 7);
        assert_eq!(ancilla_qubits(5, 2), 8);
    }

    #[test]
    fn transcript_serializes_tagged() {
        let e = Event::CheckBlock { x: 0.25, prob: 0.5, runs: 2, close: true };
        let s = serde_json::to_string(&e).unwrap();
        assert!(s.starts_with("{\"event\":\"check-block\""), "{s}");
        assert_eq!(serde_json::from_str::<Event>(&s).unwrap(), e);
    }
}
