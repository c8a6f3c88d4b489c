//! Amplitude amplification towards `|π⟩` with the good part marked by the
//! approximate reflection.
//!
//! Good states are `|π⟩|0̄00⟩|1⟩` after `U_main`, or `|π⟩|0̄00⟩` when the
//! preparation is the identity on `|g⟩`. One round applies `S_G`, then
//! `S_m = U R_g U` with `R_g = I - 2|g,0̄000⟩⟨g,0̄000|`. The round count is
//! `round(π/(4 asin a) - 1/2)` from the exact initial good amplitude `a`.
//! A final Hadamard check projects onto `|π⟩`.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::umain::UMain;
use super::{ancilla_qubits, fidelity, Event, SamplerConfig, TrialKind, TrialReport, Verdict};
use crate::chain::MarkovChain;
use crate::error::{Error, Result};
use crate::reflect::{check_is_pi, CheckMode, Reflection};
use crate::walkspace::{outcome_prob, Projector, R1Constraint, RegisterLayout, StateVector};

/// Rounds for initial good amplitude `a`.
pub fn rounds_for(a: f64) -> Result<usize> {
    if a.is_nan() || a <= 1e-12 {
        return Err(Error::Domain(format!("good amplitude {a} is zero; nothing to amplify")));
    }
    let theta = a.min(1.0).asin();
    Ok((PI / (4.0 * theta) - 0.5).round().max(0.0) as usize)
}

/// Good amplitude after `k` rounds from initial amplitude `a`.
pub fn amplified(a: f64, k: usize) -> f64 {
    ((2 * k + 1) as f64 * a.min(1.0).asin()).sin()
}

/// How the state is prepared before amplification.
#[derive(Debug, Clone, Copy)]
pub(crate) enum Prep<'a> {
    Main(&'a UMain),
    /// Identity on `|g⟩`.
    Direct,
}

pub(crate) struct Amplifier<'a> {
    pub prep: Prep<'a>,
    pub refl: &'a Reflection,
    pub g: usize,
    pub layout: RegisterLayout,
    pub eps: f64,
}

pub(crate) struct Amplified {
    pub state: StateVector,
    pub rounds: usize,
    pub amplitude: f64,
    pub walk_calls: u64,
}

impl Amplifier<'_> {
    fn prep_calls(&self) -> u64 {
        match self.prep {
            Prep::Main(u) => u.walk_calls(),
            Prep::Direct => 0,
        }
    }

    fn prepare(&self) -> Result<StateVector> {
        match self.prep {
            Prep::Main(u) => u.prepare(self.layout),
            Prep::Direct => crate::walkspace::init_state(self.g, self.layout),
        }
    }

    fn good(&self, c: &MarkovChain) -> Projector {
        Projector {
            r1: Some(R1Constraint::Vector(c.sqrt_pi().iter().copied().collect())),
            r2: Some(0),
            r3: Some(0),
            r4: Some(0),
            r5: match self.prep {
                Prep::Main(_) => Some(1),
                Prep::Direct => Some(0),
            },
        }
    }

    fn mark_good(&self, psi: &mut StateVector) -> Result<()> {
        match self.prep {
            Prep::Main(_) => {
                let mut half = psi.r5_slice(1)?;
                self.refl.apply(&mut half)?;
                psi.set_r5_slice(1, &half)
            }
            Prep::Direct => self.refl.apply(psi),
        }
    }

    fn reflect_prepared(&self, psi: &mut StateVector) -> Result<()> {
        if let Prep::Main(u) = self.prep {
            u.apply(psi)?;
        }
        let idx = self.layout.index(self.g, 0, 0, 0, 0)?;
        psi.amplitudes_mut()[idx] *= Complex64::new(-1.0, 0.0);
        if let Prep::Main(u) = self.prep {
            u.apply(psi)?;
        }
        Ok(())
    }

    /// Prepare and amplify. `schedule_amplitude` overrides the amplitude
    /// the round count is computed from, for when the true one is unknown.
    pub fn run(&self, c: &MarkovChain, schedule_amplitude: Option<f64>) -> Result<Amplified> {
        let mut psi = self.prepare()?;
        let amplitude = outcome_prob(&psi, &self.good(c))?.sqrt();
        let rounds = rounds_for(schedule_amplitude.unwrap_or(amplitude))?;
        let per_round = self.refl.walk_calls() + 2 * self.prep_calls();
        for _ in 0..rounds {
            self.mark_good(&mut psi)?;
            self.reflect_prepared(&mut psi)?;
            let leak = psi.ancilla_mass();
            if leak > 2.0 * self.eps {
                return Err(Error::AncillaLeak(leak));
            }
        }
        Ok(Amplified { state: psi, rounds, amplitude, walk_calls: self.prep_calls() + rounds as u64 * per_round })
    }
}

pub(crate) struct Finished {
    pub fidelity: f64,
    pub accepted: bool,
    pub walk_calls: u64,
}

/// Amplify, then check; in sampled mode a rejected check restarts from
/// scratch up to `⌈ln(1/eps)⌉` more times.
pub(crate) fn amplify_and_check(
    amp: &Amplifier<'_>,
    c: &MarkovChain,
    schedule_amplitude: Option<f64>,
    mode: CheckMode,
    rng: &mut impl Rng,
    transcript: &mut Vec<Event>,
) -> Result<Finished> {
    let retries = match mode {
        CheckMode::Exact => 0,
        CheckMode::Sampled => (1.0 / amp.eps).ln().ceil() as usize,
    };
    let mut walk_calls = 0;
    let mut last = None;
    for attempt in 0..=retries {
        if attempt > 0 {
            transcript.push(Event::Retry { attempt });
        }
        let run = amp.run(c, schedule_amplitude)?;
        if attempt == 0 {
            transcript.push(Event::Amplify { rounds: run.rounds, amplitude: run.amplitude });
        }
        let out = check_is_pi(&run.state, amp.refl, mode, rng, 2.0 * amp.eps)?;
        walk_calls += run.walk_calls + amp.refl.walk_calls();
        transcript.push(Event::Check { prob: out.prob, is_pi: out.is_pi });
        if out.is_pi {
            let f = fidelity(&out.state, c)?;
            return Ok(Finished { fidelity: f, accepted: true, walk_calls });
        }
        last = Some(out.state);
    }
    let state = last.expect("at least one attempt");
    Ok(Finished { fidelity: fidelity(&state, c)?, accepted: false, walk_calls })
}

fn shared_layout(n: usize, taus: &[u32]) -> Result<RegisterLayout> {
    RegisterLayout::new(n, taus.iter().copied().max().unwrap_or(0), 2)
}

/// Known-`π_g` preparation: `U_main` at `pi_star`, amplification, check.
pub fn amplitude_amplify(
    g: usize,
    pi_star: f64,
    eps: f64,
    c: &MarkovChain,
    config: &SamplerConfig,
) -> Result<TrialReport> {
    config.validate()?;
    let u = UMain::new(c, g, pi_star, eps)?;
    let refl = Reflection::new(c, eps)?;
    let layout = shared_layout(c.n(), &[u.plan().tau(), refl.params().plan().tau()])?;
    let amp = Amplifier { prep: Prep::Main(&u), refl: &refl, g, layout, eps };
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut transcript = Vec::new();
    let done = amplify_and_check(&amp, c, None, config.mode, &mut rng, &mut transcript)?;
    Ok(TrialReport {
        kind: TrialKind::Known,
        n: c.n(),
        g,
        pi_g: c.pi()[g],
        eps,
        fidelity: done.fidelity,
        pi_star: Some(pi_star),
        walk_calls: done.walk_calls,
        ancilla_qubits: ancilla_qubits(c.n(), layout.tau()),
        transcript,
        verdict: if done.accepted { Verdict::Success } else { Verdict::Fail },
        seed: config.seed,
    })
}

/// Amplification straight from `|g⟩`, scheduled from the lower bound
/// `pi_lb` on `π_g`. Worth it when `π_g` is a constant.
pub(crate) fn direct(
    g: usize,
    pi_lb: f64,
    c: &MarkovChain,
    eps: f64,
    mode: CheckMode,
    rng: &mut impl Rng,
    transcript: &mut Vec<Event>,
) -> Result<(Finished, u32)> {
    let refl = Reflection::new(c, eps)?;
    let layout = shared_layout(c.n(), &[refl.params().plan().tau()])?;
    let amp = Amplifier { prep: Prep::Direct, refl: &refl, g, layout, eps };
    let done = amplify_and_check(&amp, c, Some(pi_lb.sqrt()), mode, rng, transcript)?;
    Ok((done, layout.tau()))
}

/// Public wrapper around the direct path for a single vertex.
pub fn amplify_direct(g: usize, pi_lb: f64, eps: f64, c: &MarkovChain, config: &SamplerConfig) -> Result<TrialReport> {
    config.validate()?;
    if g >= c.n() {
        return Err(Error::Domain(format!("vertex {g} out of range for n = {}", c.n())));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut transcript = vec![Event::FastPath { pi_lb }];
    let (done, tau) = direct(g, pi_lb, c, eps, config.mode, &mut rng, &mut transcript)?;
    Ok(TrialReport {
        kind: TrialKind::Direct,
        n: c.n(),
        g,
        pi_g: c.pi()[g],
        eps,
        fidelity: done.fidelity,
        pi_star: None,
        walk_calls: done.walk_calls,
        ancilla_qubits: ancilla_qubits(c.n(), tau),
        transcript,
        verdict: if done.accepted { Verdict::Success } else { Verdict::Fail },
        seed: config.seed,
    })
}
