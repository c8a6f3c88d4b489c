//! Approximate reflection about `|π⟩` built from two fast-forwarded walks,
//! and the Hadamard-test check that uses it.
//!
//! `R̃ = ccX_{2,4} · W_τ† · ccZ_{23,4} · W_τ · ccX_{2,4}`. On inputs with R2 in
//! `|0̄⟩` and zero ancillas it acts as `I - 2|π⟩⟨π|` up to `eps2`.

use num_complex::Complex64;
use rand::Rng;

use crate::chain::{discriminant, Transition};
use crate::error::{Error, Result};
use crate::qff::{apply_wtau, make_plan, QffPlan};
use crate::spectral::sym_eig;

/// Absolute spectral gaps at or below this count as periodic.
const PERIODIC_TOL: f64 = 1e-9;
use crate::walkspace::{apply_ctrl_flip, Controls, Flag, Pauli, RegisterLayout, StateVector, Walk};

#[derive(Debug, Clone)]
pub struct ReflectionParams {
    eps2: f64,
    delta: f64,
    t: usize,
    plan: QffPlan,
}

impl ReflectionParams {
    /// `t = ⌈(2/δ) ln(4/eps2)⌉` and a plan with `eps1 = eps2 / 4`.
    pub fn new(delta: f64, eps2: f64) -> Result<Self> {
        if !(eps2 > 0.0 && eps2 < 1.0) {
            return Err(Error::Domain(format!("eps2 = {eps2} outside (0, 1)")));
        }
        if !(delta > 0.0 && delta <= 2.0) {
            return Err(Error::Domain(format!("spectral gap {delta} must be positive")));
        }
        let t = ((2.0 / delta) * (4.0 / eps2).ln()).ceil().max(1.0) as usize;
        let plan = make_plan(t, eps2 / 4.0)?;
        Ok(ReflectionParams { eps2, delta, t, plan })
    }

    pub fn eps2(&self) -> f64 {
        self.eps2
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn t(&self) -> usize {
        self.t
    }

    pub fn plan(&self) -> &QffPlan {
        &self.plan
    }

    /// `(1 - δ)^t`, the weight a non-stationary eigenvector keeps after `Dᵗ`.
    pub fn suppression(&self) -> f64 {
        (1.0 - self.delta).max(0.0).powi(self.t as i32)
    }

    /// Controlled-walk applications per reflection.
    pub fn walk_calls(&self) -> u64 {
        2 * self.plan.walk_calls()
    }
}

/// The reflection circuit for one chain.
#[derive(Debug, Clone)]
pub struct Reflection {
    walk: Walk,
    params: ReflectionParams,
}

impl Reflection {
    /// Uses the gap of `c` itself.
    /// Errors on periodic chains: an eigenvalue at -1 survives every power
    /// of `D` and would be reflected like `|π⟩`.
    pub fn new(c: &impl Transition, eps2: f64) -> Result<Self> {
        let spec = sym_eig(&discriminant(c))?;
        if spec.absolute_gap() <= PERIODIC_TOL {
            return Err(Error::Chain("periodic chain: eigenvalue -1 present; use the lazy walk".into()));
        }
        Ok(Self::with_params(c, ReflectionParams::new(spec.gap(), eps2)?))
    }

    pub fn with_params(c: &impl Transition, params: ReflectionParams) -> Self {
        Reflection { walk: Walk::new(c), params }
    }

    pub fn params(&self) -> &ReflectionParams {
        &self.params
    }

    pub fn walk(&self) -> &Walk {
        &self.walk
    }

    pub fn walk_calls(&self) -> u64 {
        self.params.walk_calls()
    }

    /// Smallest layout that holds the circuit, with R4 only.
    pub fn layout(&self) -> Result<RegisterLayout> {
        RegisterLayout::new(self.walk.n(), self.params.plan.tau(), 1)
    }

    pub fn apply(&self, psi: &mut StateVector) -> Result<()> {
        let l = psi.layout();
        if l.flags() < 1 {
            return Err(Error::Layout("the reflection needs R4".into()));
        }
        let plan = &self.params.plan;
        apply_ctrl_flip(psi, Controls::coin(), Flag::R4, Pauli::X)?;
        apply_wtau(psi, &self.walk, plan, false)?;
        apply_ctrl_flip(psi, Controls::coin_r3(), Flag::R4, Pauli::Z)?;
        apply_wtau(psi, &self.walk, plan, true)?;
        apply_ctrl_flip(psi, Controls::coin(), Flag::R4, Pauli::X)
    }
}

/// `R̃ ψ` for a chain and error target, building the circuit on the spot.
pub fn apply_reflection(psi: &StateVector, c: &impl Transition, eps2: f64) -> Result<StateVector> {
    let refl = Reflection::new(c, eps2)?;
    let mut out = psi.clone();
    refl.apply(&mut out)?;
    Ok(out)
}

/// One row of the per-eigenvector error table.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EigenError {
    pub j: usize,
    pub lambda: f64,
    /// `‖(R̃ + I) ψ₀‖` for `j = 0`, `‖(R̃ - I) ψ_j‖` otherwise.
    pub norm: f64,
}

/// Reflection error on every eigenvector of the discriminant of `c`.
pub fn reflection_errors(c: &impl Transition, eps2: f64) -> Result<Vec<EigenError>> {
    let refl = Reflection::new(c, eps2)?;
    let spec = sym_eig(&discriminant(c))?;
    let layout = refl.layout()?;
    let mut rows = Vec::with_capacity(c.n());
    for (j, &lambda) in spec.eigenvalues().iter().enumerate() {
        let v: Vec<f64> = spec.eigenvector(j).iter().copied().collect();
        let input = StateVector::from_system(layout, &v)?;
        let mut out = input.clone();
        refl.apply(&mut out)?;
        let sign = if j == 0 { 1.0 } else { -1.0 };
        let norm =
            out.amplitudes().iter().zip(input.amplitudes()).map(|(o, i)| (o + i * sign).norm_sqr()).sum::<f64>().sqrt();
        rows.push(EigenError { j, lambda, norm });
    }
    Ok(rows)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CheckMode {
    /// Report the likelier branch; no randomness.
    Exact,
    /// Draw the check-qubit outcome.
    Sampled,
}

#[derive(Debug, Clone)]
pub struct CheckOutcome {
    pub is_pi: bool,
    /// Renormalised state of the branch that was observed.
    pub state: StateVector,
    /// Probability of the "is π" branch.
    pub prob: f64,
}

/// Both outcomes of the Hadamard test, before any draw.
#[derive(Debug, Clone)]
pub struct CheckBranches {
    /// Probability of the "is π" branch.
    pub prob: f64,
    /// Renormalised "is π" branch, `None` when it has no weight.
    pub hit: Option<StateVector>,
    /// Renormalised other branch, `None` when it has no weight.
    pub miss: Option<StateVector>,
}

/// Hadamard test with a `|0⟩`-controlled `R̃` on a fresh check qubit.
///
/// After `H · c-R̃ · H` the check qubit reads 1 with amplitude `(R̃ψ - ψ)/2`,
/// which is `-|π⟩⟨π|ψ⟩` up to the reflection error; that branch is the
/// "is π" verdict.
pub fn check_branches(psi: &StateVector, refl: &Reflection, ancilla_tol: f64) -> Result<CheckBranches> {
    let leak = psi.ancilla_mass();
    if leak > ancilla_tol {
        return Err(Error::AncillaLeak(leak));
    }
    let mut reflected = psi.clone();
    refl.apply(&mut reflected)?;
    let total = psi.norm_sqr();
    let branch = |sign: f64| -> Result<(f64, Option<StateVector>)> {
        let amps: Vec<Complex64> =
            psi.amplitudes().iter().zip(reflected.amplitudes()).map(|(a, r)| (a * sign + r) * 0.5).collect();
        let mut state = StateVector::from_amplitudes(*psi.layout(), amps)?;
        let w = state.norm_sqr() / total;
        Ok((w, if w > 1e-300 { state.normalize().ok().map(|_| state) } else { None }))
    };
    let (prob, hit) = branch(-1.0)?;
    let (_, miss) = branch(1.0)?;
    Ok(CheckBranches { prob: prob.clamp(0.0, 1.0), hit, miss })
}

/// Run the check and report the observed branch. Exact mode reports the
/// likelier one.
pub fn check_is_pi(
    psi: &StateVector,
    refl: &Reflection,
    mode: CheckMode,
    rng: &mut impl Rng,
    ancilla_tol: f64,
) -> Result<CheckOutcome> {
    let b = check_branches(psi, refl, ancilla_tol)?;
    let is_pi = match mode {
        CheckMode::Exact => b.prob >= 0.5,
        CheckMode::Sampled => rng.gen::<f64>() < b.prob,
    };
    let state = if is_pi { b.hit } else { b.miss };
    let state = state.ok_or_else(|| Error::Domain("observed a branch of zero weight".into()))?;
    Ok(CheckOutcome { is_pi, state, prob: b.prob })
}
