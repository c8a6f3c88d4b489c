//! Comparing a guess `x` with the unknown `π_g`.
//!
//! Phase 1 runs `U_main` at `x` and a Hadamard check on up to `c` copies;
//! any "is π" outcome returns "close" with the post-check state. Phase 2
//! measures `c` fresh copies for `R1 = g` together with `R5 = 1`, whose
//! probability is `≈ β₀⁴(s_x)`, and calls `x` below `π_g` when at least a
//! quarter of them hit.

use std::collections::HashMap;
use std::sync::Arc;

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::umain::{success_projection, SuccessProjector, UMain};
use super::Event;
use crate::chain::MarkovChain;
use crate::error::{Error, Result};
use crate::reflect::{check_branches, CheckMode, Reflection};
use crate::walkspace::{RegisterLayout, StateVector};

#[derive(Debug, Clone)]
pub enum Comparison {
    /// `|x - π_g| ≤ π_g/3` by the check, with the post-check state when
    /// the comparator produces one.
    Close(Option<StateVector>),
    /// `x < 2π_g/3`.
    Below,
    /// `x > 4π_g/3`.
    Above,
}

impl Comparison {
    pub fn label(&self) -> &'static str {
        match self {
            Comparison::Close(_) => "close",
            Comparison::Below => "below",
            Comparison::Above => "above",
        }
    }
}

/// Anything that can place a guess relative to `π_g`.
pub trait PiComparator {
    /// The check rounds alone; `Some(state)` when one of them said "is π".
    fn check_close(&mut self, x: f64) -> Result<Option<Option<StateVector>>>;

    /// Check rounds, then the counting rounds if none succeeded.
    fn compare(&mut self, x: f64) -> Result<Comparison>;

    /// Record an event from a caller, such as the search, in order.
    fn note(&mut self, _event: Event) {}
}

/// Reference comparator that knows `π_g` and answers by the thresholds
/// directly. Used to test search logic apart from the circuits.
#[derive(Debug, Clone)]
pub struct IdealComparator {
    pub pi_g: f64,
    pub calls: usize,
    pub log: Vec<Event>,
}

impl IdealComparator {
    pub fn new(pi_g: f64) -> Self {
        IdealComparator { pi_g, calls: 0, log: Vec::new() }
    }

    fn is_close(&self, x: f64) -> bool {
        (x - self.pi_g).abs() <= self.pi_g / 3.0
    }
}

impl PiComparator for IdealComparator {
    fn check_close(&mut self, x: f64) -> Result<Option<Option<StateVector>>> {
        self.calls += 1;
        Ok(self.is_close(x).then_some(None))
    }

    fn compare(&mut self, x: f64) -> Result<Comparison> {
        if self.check_close(x)?.is_some() {
            return Ok(Comparison::Close(None));
        }
        Ok(if x < self.pi_g { Comparison::Below } else { Comparison::Above })
    }

    fn note(&mut self, event: Event) {
        self.log.push(event);
    }
}

/// Everything the comparator needs from one `U_main` circuit at one guess.
#[derive(Debug, Clone)]
pub struct CircuitEval {
    /// "is π" probability of the check on the `U_main` output.
    pub p_check: f64,
    /// Renormalised "is π" branch.
    pub check_post: Option<Arc<StateVector>>,
    /// Probability of `R1 = g` and `R5 = 1`.
    pub p_g_flag: f64,
    pub u_calls: u64,
    pub tau: u32,
}

/// Memo of circuit evaluations for one chain, keyed by `(g, x, eps)`.
///
/// The circuits are deterministic, so repeated guesses (the search revisits
/// interval ends) and repeated trials reuse the same statevector work.
#[derive(Debug, Default)]
pub struct CircuitCache {
    map: HashMap<(usize, u64, u64), Arc<CircuitEval>>,
    capacity: usize,
}

impl CircuitCache {
    pub fn new(capacity: usize) -> Self {
        CircuitCache { map: HashMap::new(), capacity: capacity.max(1) }
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    pub fn get_or_eval(
        &mut self,
        c: &MarkovChain,
        g: usize,
        x: f64,
        eps: f64,
        refl: &Reflection,
    ) -> Result<Arc<CircuitEval>> {
        let key = (g, x.to_bits(), eps.to_bits());
        if let Some(e) = self.map.get(&key) {
            return Ok(e.clone());
        }
        let u = UMain::new(c, g, x, eps)?;
        let tau = u.plan().tau().max(refl.params().plan().tau());
        let psi = u.prepare(RegisterLayout::new(c.n(), tau, 2)?)?;
        let p_g_flag = success_projection(&psi, c, SuccessProjector::GAndFlag(g))?;
        let b = check_branches(&psi, refl, 2.0 * eps)?;
        let eval = Arc::new(CircuitEval {
            p_check: b.prob,
            check_post: b.hit.map(Arc::new),
            p_g_flag,
            u_calls: u.walk_calls(),
            tau,
        });
        if self.map.len() >= self.capacity {
            self.map.clear();
        }
        self.map.insert(key, eval.clone());
        Ok(eval)
    }
}

/// The circuit-backed comparator for one chain and vertex.
pub struct QuantumComparator<'a> {
    c: &'a MarkovChain,
    g: usize,
    eps: f64,
    copies: usize,
    mode: CheckMode,
    refl: Reflection,
    cache: &'a mut CircuitCache,
    rng: &'a mut ChaCha8Rng,
    pub transcript: Vec<Event>,
    pub walk_calls: u64,
    pub max_tau: u32,
}

impl<'a> QuantumComparator<'a> {
    pub fn new(
        c: &'a MarkovChain,
        g: usize,
        eps: f64,
        copies: usize,
        mode: CheckMode,
        cache: &'a mut CircuitCache,
        rng: &'a mut ChaCha8Rng,
    ) -> Result<Self> {
        if g >= c.n() {
            return Err(Error::Domain(format!("vertex {g} out of range for n = {}", c.n())));
        }
        if copies == 0 {
            return Err(Error::Domain("need at least one copy".into()));
        }
        let refl = Reflection::new(c, eps)?;
        let max_tau = refl.params().plan().tau();
        Ok(QuantumComparator {
            c,
            g,
            eps,
            copies,
            mode,
            refl,
            cache,
            rng,
            transcript: Vec::new(),
            walk_calls: 0,
            max_tau,
        })
    }

    fn eval(&mut self, x: f64) -> Result<Arc<CircuitEval>> {
        let e = self.cache.get_or_eval(self.c, self.g, x, self.eps, &self.refl)?;
        self.max_tau = self.max_tau.max(e.tau);
        Ok(e)
    }
}

/// Expected number of copies until the first hit, capped at `c`.
impl QuantumComparator<'_> {
    /// The counting rounds alone: `true` ("below") when at least a quarter
    /// of `c` copies land on `g` with the flag set.
    pub fn count_below(&mut self, x: f64) -> Result<bool> {
        if x <= 0.0 {
            return Ok(true);
        }
        let e = self.eval(x)?;
        let c = self.copies;
        let (hits, below) = match self.mode {
            CheckMode::Exact => {
                let below = e.p_g_flag >= 0.25;
                (((e.p_g_flag * c as f64).round() as usize).min(c), below)
            }
            CheckMode::Sampled => {
                let hits = (0..c).filter(|_| self.rng.gen::<f64>() < e.p_g_flag).count();
                (hits, 4 * hits >= c)
            }
        };
        self.walk_calls += c as u64 * e.u_calls;
        self.transcript.push(Event::GCount { x, prob: e.p_g_flag, hits, copies: c, below });
        Ok(below)
    }
}

fn expected_runs(p: f64, c: usize) -> usize {
    if p <= 0.0 {
        return c;
    }
    let e = (1.0 - (1.0 - p).powi(c as i32)) / p;
    (e.ceil() as usize).clamp(1, c)
}

impl PiComparator for QuantumComparator<'_> {
    fn check_close(&mut self, x: f64) -> Result<Option<Option<StateVector>>> {
        if x <= 0.0 {
            return Ok(None);
        }
        let e = self.eval(x)?;
        let c = self.copies;
        let (close, runs) = match self.mode {
            CheckMode::Exact => {
                let close = 1.0 - (1.0 - e.p_check).powi(c as i32) >= 0.5;
                (close, if close { expected_runs(e.p_check, c) } else { c })
            }
            CheckMode::Sampled => {
                let hit = (1..=c).find(|_| self.rng.gen::<f64>() < e.p_check);
                (hit.is_some(), hit.unwrap_or(c))
            }
        };
        self.walk_calls += runs as u64 * (e.u_calls + self.refl.walk_calls());
        self.transcript.push(Event::CheckBlock { x, prob: e.p_check, runs, close });
        Ok(close.then(|| e.check_post.as_deref().cloned()))
    }

    fn compare(&mut self, x: f64) -> Result<Comparison> {
        if x <= 0.0 {
            return Ok(Comparison::Below);
        }
        if let Some(state) = self.check_close(x)? {
            return Ok(Comparison::Close(state));
        }
        Ok(if self.count_below(x)? { Comparison::Below } else { Comparison::Above })
    }

    fn note(&mut self, event: Event) {
        self.transcript.push(event);
    }
}
