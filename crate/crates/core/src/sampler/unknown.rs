//! Preparation when `π_g` is unknown: guess `1/n`, check, and fall back to
//! the binary search on `[0, C/n]`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::amplify::direct;
use super::compare::{CircuitCache, PiComparator, QuantumComparator};
use super::search::{binary_search_pig, SearchOutcome};
use super::{ancilla_qubits, fidelity, Event, SamplerConfig, TrialKind, TrialReport, Verdict};
use crate::chain::MarkovChain;
use crate::error::{Error, Result};
use crate::walkspace::StateVector;

/// Guesses must stay inside the domain of the interpolation parameter.
const MAX_GUESS: f64 = 0.499;

pub fn prepare_unknown(c: &MarkovChain, g: Option<usize>, config: &SamplerConfig) -> Result<TrialReport> {
    prepare_unknown_cached(c, g, config, &mut CircuitCache::new(64))
}

/// As [`prepare_unknown`], reusing circuit evaluations across trials on the
/// same chain.
pub fn prepare_unknown_cached(
    c: &MarkovChain,
    g: Option<usize>,
    config: &SamplerConfig,
    cache: &mut CircuitCache,
) -> Result<TrialReport> {
    config.validate()?;
    let n = c.n();
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let g = match g {
        Some(g) if g >= n => return Err(Error::Domain(format!("vertex {g} out of range for n = {n}"))),
        Some(g) => g,
        None => rng.gen_range(0..n),
    };
    let eps = config.eps;
    let pi_lb = config.pi_lower_bound(n, c.pi_min());
    let report = |fid: f64, pi_star, walk_calls, tau, transcript, ok: bool| TrialReport {
        kind: TrialKind::Unknown,
        n,
        g,
        pi_g: c.pi()[g],
        eps,
        fidelity: fid,
        pi_star,
        walk_calls,
        ancilla_qubits: ancilla_qubits(n, tau),
        transcript,
        verdict: if ok { Verdict::Success } else { Verdict::Fail },
        seed: config.seed,
    };

    if pi_lb >= config.fast_path {
        let mut transcript = vec![Event::FastPath { pi_lb }];
        let (done, tau) = direct(g, pi_lb, c, eps, config.mode, &mut rng, &mut transcript)?;
        return Ok(report(done.fidelity, None, done.walk_calls, tau, transcript, done.accepted));
    }

    let mut cmp = QuantumComparator::new(c, g, eps, config.copies, config.mode, cache, &mut rng)?;
    let guess = (1.0 / n as f64).min(MAX_GUESS);
    let found: Option<(f64, Option<StateVector>)> = match cmp.check_close(guess)? {
        Some(state) => Some((guess, state)),
        None => {
            let upper = (config.interval / n as f64).min(MAX_GUESS);
            let cap = config.search_cap(n, pi_lb);
            match binary_search_pig(&mut cmp, 0.0, upper, cap)? {
                SearchOutcome::Found { pi_star, state, .. } => Some((pi_star, state)),
                SearchOutcome::Failed { .. } => None,
            }
        }
    };
    let (walk_calls, tau) = (cmp.walk_calls, cmp.max_tau);
    let transcript = std::mem::take(&mut cmp.transcript);
    Ok(match found {
        Some((pi_star, Some(state))) => report(fidelity(&state, c)?, Some(pi_star), walk_calls, tau, transcript, true),
        Some((pi_star, None)) => report(0.0, Some(pi_star), walk_calls, tau, transcript, false),
        None => report(0.0, None, walk_calls, tau, transcript, false),
    })
}
