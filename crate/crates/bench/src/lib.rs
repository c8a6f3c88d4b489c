//! Fixtures shared by the criterion benches.

use qsamp_core::families::FamilySpec;
use qsamp_core::walkspace::init_state;
use qsamp_core::{MarkovChain, RegisterLayout, StateVector};

/// Lazy walk on a family spec such as `cycle:16`.
///
/// Panics on a malformed spec; benches use fixed literals.
pub fn lazy_chain(spec: &str) -> MarkovChain {
    let spec: FamilySpec = spec.parse().expect("valid family spec");
    spec.chain(true).expect("family builds a chain")
}

/// `|g⟩|0⟩...` in a layout with `tau` branch qubits and `flags` flag qubits.
pub fn start(c: &MarkovChain, g: usize, tau: u32, flags: u8) -> StateVector {
    let layout = RegisterLayout::new(c.n(), tau, flags).expect("layout fits");
    init_state(g, layout).expect("vertex in range")
}
