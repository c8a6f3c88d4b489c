//! Quantum fast-forwarding.
//!
//! `cosᵗθ = Σ_l p_l cos(lθ)` with binomial weights `p_l`, and the
//! zero-coin block of `W^l` is the Chebyshev polynomial `T_l(D)`. So
//! preparing `Σ_l sqrt(p_l)|l⟩` on R3, applying `W^l` on branch `l` and
//! unpreparing leaves `Dᵗ` on the `|0̄, 0⟩` block. Truncating at `2^τ`
//! branches costs `2^τ - 1` walk steps instead of `t`.

use std::ops::Range;

use nalgebra::DVector;
use num_complex::Complex64;

use crate::chain::{discriminant, Transition};
use crate::error::{Error, Result};
use crate::walkspace::{Householder, RegisterLayout, StateVector, Walk};

/// Weights `p_0..=p_t` of `cosᵗ` in the Chebyshev basis.
///
/// Binomials are formed as log-ratios outward from the central term and
/// normalised by their exact total, so the weights sum to one to rounding
/// even for very large `t`.
pub fn chebyshev_weights(t: usize) -> Vec<f64> {
    let mut p = vec![0.0; t + 1];
    let mid = t / 2;
    // log(C(t, k) / C(t, mid)) for k = 0..=mid
    let mut lw = vec![0.0; mid + 1];
    for k in (0..mid).rev() {
        lw[k] = lw[k + 1] + ((k + 1) as f64 / (t - k) as f64).ln();
    }
    let mult = |k: usize| if t % 2 == 0 && k == mid { 1.0 } else { 2.0 };
    let total: f64 = (0..=mid).map(|k| mult(k) * lw[k].exp()).sum();
    for k in 0..=mid {
        p[t - 2 * k] = mult(k) * lw[k].exp() / total;
    }
    p
}

/// Truncation plan for simulating `Dᵗ` to accuracy `eps1`.
#[derive(Debug, Clone)]
pub struct QffPlan {
    t: usize,
    eps1: f64,
    gamma: usize,
    tau: u32,
    weights: Vec<f64>,
    renorm: f64,
    amplitudes: Vec<f64>,
    prep: Option<Householder>,
}

impl QffPlan {
    pub fn t(&self) -> usize {
        self.t
    }

    pub fn eps1(&self) -> f64 {
        self.eps1
    }

    /// Largest Chebyshev order that must be kept.
    pub fn gamma(&self) -> usize {
        self.gamma
    }

    /// Width of the branch register.
    pub fn tau(&self) -> u32 {
        self.tau
    }

    /// `p_l` for `l < 2^τ` (zero off-parity and beyond `t`).
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// `1 - Σ_{l ≥ 2^τ} p_l`.
    pub fn renorm(&self) -> f64 {
        self.renorm
    }

    /// `sqrt(p_l / renorm)`, the state `V_q` prepares from `|0⟩`.
    pub fn amplitudes(&self) -> &[f64] {
        &self.amplitudes
    }

    /// Walk steps in one application of `W_τ`.
    pub fn walk_calls(&self) -> u64 {
        (1u64 << self.tau) - 1
    }
}

pub fn make_plan(t: usize, eps1: f64) -> Result<QffPlan> {
    if t == 0 {
        return Err(Error::Domain("simulation horizon t must be at least 1".into()));
    }
    if !(eps1 > 0.0 && eps1 < 1.0) {
        return Err(Error::Domain(format!("eps1 = {eps1} outside (0, 1)")));
    }
    let p = chebyshev_weights(t);
    let threshold = eps1 * eps1 / 4.0;
    let mut gamma = t;
    let mut tail = 0.0;
    while gamma > 0 && tail + p[gamma] <= threshold {
        tail += p[gamma];
        gamma -= 1;
    }
    let tau = usize::BITS - gamma.leading_zeros();
    let width = 1usize << tau;
    let dropped: f64 = p.iter().skip(width).sum();
    let renorm = 1.0 - dropped;
    let weights: Vec<f64> = (0..width).map(|l| p.get(l).copied().unwrap_or(0.0)).collect();
    let amplitudes: Vec<f64> = weights.iter().map(|w| (w / renorm).sqrt()).collect();
    let prep = Householder::to_target(&amplitudes);
    Ok(QffPlan { t, eps1, gamma, tau, weights, renorm, amplitudes, prep })
}

fn check_layout(psi: &StateVector, plan: &QffPlan) -> Result<()> {
    if psi.layout().tau() < plan.tau {
        return Err(Error::Layout(format!("plan needs {} branch qubits, layout has {}", plan.tau, psi.layout().tau())));
    }
    Ok(())
}

/// `V_q` on the low `plan.tau` bits of R3. It is a reflection, so the
/// adjoint is the same map.
pub fn apply_coeff_prep(psi: &mut StateVector, plan: &QffPlan, adjoint: bool) -> Result<()> {
    let _ = adjoint;
    check_layout(psi, plan)?;
    let Some(h) = &plan.prep else { return Ok(()) };
    let l = *psi.layout();
    let (tail, fdim) = (l.tail(), l.flag_dim());
    let lo_dim = 1usize << plan.tau;
    let hi_dim = l.r3_dim() >> plan.tau;
    let amps = psi.amplitudes_mut();
    let mut dot = Vec::new();
    for block in 0..l.n() * l.n() {
        for hi in 0..hi_dim {
            let base = block * tail + hi * lo_dim * fdim;
            h.apply_strided(amps, base, fdim, 0..fdim, &mut dot);
        }
    }
    Ok(())
}

/// `Σ_l W^l ⊗ |l⟩⟨l|` on the low `plan.tau` bits of R3, by a cumulative
/// sweep: step `l` advances every branch whose index is at least `l`.
/// Branches that are identically zero are skipped; the walk acts inside a
/// branch, so they stay zero.
pub fn apply_wctrl(psi: &mut StateVector, walk: &Walk, plan: &QffPlan, adjoint: bool) -> Result<()> {
    check_layout(psi, plan)?;
    if walk.n() != psi.layout().n() {
        return Err(Error::Layout(format!("walk on {} vertices, state has n = {}", walk.n(), psi.layout().n())));
    }
    let l = *psi.layout();
    let (tail, fdim) = (l.tail(), l.flag_dim());
    let lo_mask = (1usize << plan.tau) - 1;
    let mut live = vec![false; l.r3_dim()];
    for (idx, a) in psi.amplitudes().iter().enumerate() {
        if *a != Complex64::new(0.0, 0.0) {
            live[(idx % tail) / fdim] = true;
        }
    }
    let amps = psi.amplitudes_mut();
    let mut ranges: Vec<Range<usize>> = Vec::new();
    for step in 1..=lo_mask {
        ranges.clear();
        for (r3, _) in live.iter().enumerate().filter(|(r3, &on)| on && (r3 & lo_mask) >= step) {
            let r = r3 * fdim..(r3 + 1) * fdim;
            match ranges.last_mut() {
                Some(last) if last.end == r.start => last.end = r.end,
                _ => ranges.push(r),
            }
        }
        if !ranges.is_empty() {
            walk.step_ranges(amps, tail, &ranges, adjoint);
        }
    }
    Ok(())
}

/// `W_τ = V_q† W_ctrl V_q`, or its adjoint.
pub fn apply_wtau(psi: &mut StateVector, walk: &Walk, plan: &QffPlan, adjoint: bool) -> Result<()> {
    apply_coeff_prep(psi, plan, false)?;
    apply_wctrl(psi, walk, plan, adjoint)?;
    apply_coeff_prep(psi, plan, true)
}

/// `‖Π_{0̄0} W_τ |ψ,0̄,0⟩ − Dᵗ|ψ⟩|0̄,0⟩‖`, with `Dᵗψ` computed classically.
pub fn qff_residual(c: &impl Transition, plan: &QffPlan, psi_in: &[f64]) -> Result<f64> {
    let n = c.n();
    if psi_in.len() != n {
        return Err(Error::Domain(format!("input vector has length {}, n = {n}", psi_in.len())));
    }
    let nrm = psi_in.iter().map(|a| a * a).sum::<f64>().sqrt();
    if (nrm - 1.0).abs() > 1e-9 {
        return Err(Error::Domain(format!("input vector has norm {nrm}")));
    }
    let d = discriminant(c).into_matrix();
    let mut target = DVector::from_column_slice(psi_in);
    for _ in 0..plan.t {
        target = &d * target;
    }
    let layout = RegisterLayout::new(n, plan.tau, 0)?;
    let mut psi = StateVector::from_system(layout, psi_in)?;
    apply_wtau(&mut psi, &Walk::new(c), plan, false)?;
    let mut sq = 0.0;
    for x in 0..n {
        let a = psi.amplitudes()[layout.index(x, 0, 0, 0, 0)?];
        sq += (a - target[x]).norm_sqr();
    }
    Ok(sq.sqrt())
}
