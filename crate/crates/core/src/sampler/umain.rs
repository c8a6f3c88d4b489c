//! The preparation unitary for a known (or guessed) `π_g`.
//!
//! `U_main = ccX_{2,4} X_4 W_τ† ccX_{234,5} W_τ X_4 ccX_{2,4}` on the chain
//! interpolated towards `M = {g}` at `s = 1 - x/(1 - x)`. Started from
//! `|g⟩|0̄ 0 0 0⟩` it leaves `β₀ v₀ ⊗ |0̄00⟩|1⟩` in the flagged half, up to the
//! fast-forwarding error. The sequence reads the same backwards with `W_τ`
//! and `W_τ†` exchanged, so `U_main` is its own inverse.

use serde::{Deserialize, Serialize};

use crate::chain::{interpolate, InterpolatedChain, MarkovChain};
use crate::error::{Error, Result};
use crate::qff::{apply_wtau, make_plan, QffPlan};
use crate::spectral;
use crate::walkspace::{
    apply_ctrl_flip, apply_x, init_state, interpolation_eigenvector, outcome_prob, Controls, Flag, Pauli, Projector,
    R1Constraint, RegisterLayout, StateVector, Walk,
};

/// Interpolation parameter for a guess `x` of `π_g`.
pub fn interpolation_parameter(x: f64) -> Result<f64> {
    if !(x > 0.0 && x < 0.5) {
        return Err(Error::Domain(format!("π estimate {x} outside (0, 1/2)")));
    }
    Ok(1.0 - x / (1.0 - x))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UMainDiagnostics {
    pub s: f64,
    pub delta_s: f64,
    pub t: usize,
    pub tau: u32,
    pub walk_calls: u64,
    /// `⟨v₀(s)|g⟩`.
    pub beta0: f64,
    /// `⟨π|v₀(s)⟩`.
    pub overlap_pi: f64,
}

impl UMainDiagnostics {
    /// `β₀⟨π|v₀⟩`, the ideal amplitude of the flagged `|π⟩` component.
    pub fn amplitude_bound(&self) -> f64 {
        self.beta0 * self.overlap_pi
    }
}

#[derive(Debug, Clone)]
pub struct UMain {
    g: usize,
    ic: InterpolatedChain,
    walk: Walk,
    plan: QffPlan,
    diag: UMainDiagnostics,
}

impl UMain {
    /// `t = ⌈(2/δ(s)) ln(4/eps)⌉` with `eps1 = eps/2`.
    pub fn new(c: &MarkovChain, g: usize, pi_star: f64, eps: f64) -> Result<Self> {
        if g >= c.n() {
            return Err(Error::Domain(format!("vertex {g} out of range for n = {}", c.n())));
        }
        if !(eps > 0.0 && eps < 1.0) {
            return Err(Error::Domain(format!("eps = {eps} outside (0, 1)")));
        }
        let s = interpolation_parameter(pi_star)?;
        let ic = interpolate(c, &[g], s)?;
        let delta_s = spectral::gap(&ic)?;
        if delta_s <= 1e-12 {
            return Err(Error::Domain(format!("interpolated chain at s = {s} has no spectral gap")));
        }
        let t = ((2.0 / delta_s) * (4.0 / eps).ln()).ceil().max(1.0) as usize;
        let plan = make_plan(t, eps / 2.0)?;
        let eig = interpolation_eigenvector(c, g, s)?;
        let diag = UMainDiagnostics {
            s,
            delta_s,
            t,
            tau: plan.tau(),
            walk_calls: 2 * plan.walk_calls(),
            beta0: eig.beta0,
            overlap_pi: eig.overlap_pi,
        };
        Ok(UMain { g, walk: Walk::new(&ic), ic, plan, diag })
    }

    pub fn g(&self) -> usize {
        self.g
    }

    pub fn chain(&self) -> &InterpolatedChain {
        &self.ic
    }

    pub fn plan(&self) -> &QffPlan {
        &self.plan
    }

    pub fn diagnostics(&self) -> &UMainDiagnostics {
        &self.diag
    }

    pub fn walk_calls(&self) -> u64 {
        self.diag.walk_calls
    }

    /// Smallest layout for this circuit alone.
    pub fn layout(&self) -> Result<RegisterLayout> {
        RegisterLayout::new(self.walk.n(), self.plan.tau(), 2)
    }

    pub fn apply(&self, psi: &mut StateVector) -> Result<()> {
        if psi.layout().flags() != 2 {
            return Err(Error::Layout("U_main needs both R4 and R5".into()));
        }
        apply_ctrl_flip(psi, Controls::coin(), Flag::R4, Pauli::X)?;
        apply_x(psi, Flag::R4)?;
        apply_wtau(psi, &self.walk, &self.plan, false)?;
        apply_ctrl_flip(psi, Controls::coin_r3_r4(), Flag::R5, Pauli::X)?;
        apply_wtau(psi, &self.walk, &self.plan, true)?;
        apply_x(psi, Flag::R4)?;
        apply_ctrl_flip(psi, Controls::coin(), Flag::R4, Pauli::X)
    }

    /// `U_main |g⟩|0̄ 0 0 0⟩` on `layout`.
    pub fn prepare(&self, layout: RegisterLayout) -> Result<StateVector> {
        let mut psi = init_state(self.g, layout)?;
        self.apply(&mut psi)?;
        Ok(psi)
    }
}

/// Build and run `U_main` on its own minimal layout.
pub fn apply_u_main(
    g: usize,
    pi_star: f64,
    eps: f64,
    c: &MarkovChain,
) -> Result<(StateVector, QffPlan, UMainDiagnostics)> {
    let u = UMain::new(c, g, pi_star, eps)?;
    let psi = u.prepare(u.layout()?)?;
    Ok((psi, u.plan, u.diag))
}

/// Measurements applied to the output of `U_main`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SuccessProjector {
    /// `|π⟩⟨π|` on R1 and `|1⟩⟨1|` on R5.
    PiAndFlag,
    /// `|g⟩⟨g|` on R1 and `|1⟩⟨1|` on R5; probability `≈ β₀⁴`.
    GAndFlag(usize),
    /// `|g⟩⟨g|` on R1 alone; probability `≈ β₀⁴ + (1 - β₀²)²`.
    GOnly(usize),
}

pub fn success_projection(state: &StateVector, c: &MarkovChain, which: SuccessProjector) -> Result<f64> {
    let proj = match which {
        SuccessProjector::PiAndFlag => Projector {
            r1: Some(R1Constraint::Vector(c.sqrt_pi().iter().copied().collect())),
            r5: Some(1),
            ..Default::default()
        },
        SuccessProjector::GAndFlag(g) => {
            Projector { r1: Some(R1Constraint::Basis(g)), r5: Some(1), ..Default::default() }
        }
        SuccessProjector::GOnly(g) => Projector { r1: Some(R1Constraint::Basis(g)), ..Default::default() },
    };
    outcome_prob(state, &proj)
}

#[cfg(test)]
mod tests {
    use num_complex::Complex64;

    use super::*;
    use crate::chain::random_walk_chain;
    use crate::graph::Graph;
    use crate::walkspace::eigen_overlaps;

    fn lazy(n: usize, edges: &[(usize, usize)]) -> MarkovChain {
        random_walk_chain(&Graph::new(n, edges).unwrap(), true).unwrap()
    }

    fn corpus() -> Vec<MarkovChain> {
        let cycle8: Vec<_> = (0..8).map(|i| (i, (i + 1) % 8)).collect();
        vec![
            lazy(3, &[(0, 1), (1, 2), (0, 2)]),
            lazy(4, &[(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]),
            lazy(4, &[(0, 1), (0, 2), (0, 3)]),
            lazy(8, &cycle8),
        ]
    }

    #[test]
    fn parameter_examples() {
        assert!((interpolation_parameter(0.25).unwrap() - 2.0 / 3.0).abs() < 1e-15);
        assert!(interpolation_parameter(0.5).is_err());
        assert!(interpolation_parameter(0.0).is_err());
        let c = &corpus()[0];
        assert!(matches!(UMain::new(c, 0, 0.6, 0.05), Err(Error::Domain(_))));
        assert!(UMain::new(c, 3, 0.3, 0.05).is_err());
        assert!(UMain::new(c, 0, 0.3, 0.0).is_err());
    }

    #[test]
    fn amplitude_bound_at_exact_estimate() {
        for c in corpus() {
            for g in 0..c.n() {
                let pg = c.pi()[g];
                if pg >= 0.5 {
                    continue;
                }
                let d = *UMain::new(&c, g, pg, 0.05).unwrap().diagnostics();
                assert!(d.amplitude_bound() >= 0.5 - 1e-12);
                let closed = ((1.0 - pg).sqrt() + pg.sqrt()) / 2.0;
                assert!((d.amplitude_bound() - closed).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn success_probability_examples() {
        for c in corpus() {
            for g in 0..c.n() {
                let pg = c.pi()[g];
                if pg >= 0.5 {
                    continue;
                }
                let (psi, _, d) = apply_u_main(g, pg, 0.05, &c).unwrap();
                let p = success_projection(&psi, &c, SuccessProjector::PiAndFlag).unwrap();
                assert!(p >= 0.2, "n = {}, g = {g}: {p}", c.n());
                let a = d.amplitude_bound();
                assert!(p.sqrt() >= a - 0.05);
                assert!((psi.norm() - 1.0).abs() < 1e-10);
            }
        }
    }

    /// Flagged half `≈ β₀ v₀`, unflagged half `≈ |g⟩ - β₀ v₀`, both with
    /// clean ancillas.
    #[test]
    fn output_branches_match_closed_form() {
        let eps = 0.05;
        for c in corpus() {
            let g = c.n() - 1;
            for x in [0.05, 0.15, 0.3, 0.45] {
                let u = UMain::new(&c, g, x, eps).unwrap();
                let psi = u.prepare(u.layout().unwrap()).unwrap();
                let v0 = interpolation_eigenvector(&c, g, u.diagnostics().s).unwrap().v0;
                let b0 = u.diagnostics().beta0;
                let l = *psi.layout();
                let mut expect = StateVector::zeros(l);
                for y in 0..c.n() {
                    let flagged = b0 * v0[y];
                    let rest = if y == g { 1.0 } else { 0.0 } - flagged;
                    expect.amplitudes_mut()[l.index(y, 0, 0, 0, 1).unwrap()] = Complex64::new(flagged, 0.0);
                    expect.amplitudes_mut()[l.index(y, 0, 0, 0, 0).unwrap()] = Complex64::new(rest, 0.0);
                }
                let dist = psi.distance(&expect).unwrap();
                assert!(dist <= 2.0 * eps, "n = {}, x = {x}: {dist}", c.n());
                assert!(psi.ancilla_mass() <= (2.0 * eps).powi(2));
            }
        }
    }

    #[test]
    fn self_inverse() {
        let c = &corpus()[2];
        let u = UMain::new(c, 1, 0.2, 0.1).unwrap();
        let l = RegisterLayout::new(4, u.plan().tau() + 1, 2).unwrap();
        let mut psi = u.prepare(l).unwrap();
        u.apply(&mut psi).unwrap();
        assert!(psi.distance(&init_state(1, l).unwrap()).unwrap() < 1e-10);
        let bad = RegisterLayout::new(4, u.plan().tau(), 1).unwrap();
        assert!(u.apply(&mut StateVector::zeros(bad)).is_err());
    }

    #[test]
    fn g_projections_follow_beta0() {
        let eps = 0.02;
        let c = &corpus()[3];
        let pg = c.pi()[0];
        for x in [pg / 2.0, pg, 2.0 * pg, 0.4] {
            let (psi, _, d) = apply_u_main(0, x, eps, c).unwrap();
            let b2 = eigen_overlaps(pg, d.s).unwrap().beta0.powi(2);
            let flagged = success_projection(&psi, c, SuccessProjector::GAndFlag(0)).unwrap();
            let closed = (pg * (1.0 - x) / (pg + x - 2.0 * pg * x)).powi(2);
            assert!((b2 * b2 - closed).abs() < 1e-12);
            assert!((flagged - closed).abs() <= eps, "x = {x}: {flagged} vs {closed}");
            let only = success_projection(&psi, c, SuccessProjector::GOnly(0)).unwrap();
            assert!((only - (b2 * b2 + (1.0 - b2).powi(2))).abs() <= eps);
        }
    }
}
