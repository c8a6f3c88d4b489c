use num_complex::Complex64;
use rand::Rng;

use super::layout::StateVector;
use crate::error::{Error, Result};

/// Constraint on the system register R1.
#[derive(Debug, Clone, PartialEq)]
pub enum R1Constraint {
    Basis(usize),
    /// Projection onto a real unit vector over the vertex set.
    Vector(Vec<f64>),
}

/// A projector given by per-register constraints; `None` leaves a register free.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Projector {
    pub r1: Option<R1Constraint>,
    pub r2: Option<usize>,
    pub r3: Option<usize>,
    pub r4: Option<u8>,
    pub r5: Option<u8>,
}

impl Projector {
    fn validate(&self, psi: &StateVector) -> Result<()> {
        let l = psi.layout();
        let bad = |what: &str| Err(Error::Domain(format!("projector {what} does not fit the layout")));
        match &self.r1 {
            Some(R1Constraint::Basis(x)) if *x >= l.n() => return bad("R1 value"),
            Some(R1Constraint::Vector(v)) => {
                if v.len() != l.n() {
                    return bad("R1 vector");
                }
                let nrm = v.iter().map(|a| a * a).sum::<f64>().sqrt();
                if (nrm - 1.0).abs() > 1e-9 {
                    return Err(Error::Domain(format!("R1 vector has norm {nrm}")));
                }
            }
            _ => {}
        }
        if self.r2.is_some_and(|v| v >= l.n()) {
            return bad("R2 value");
        }
        if self.r3.is_some_and(|v| v >= l.r3_dim()) {
            return bad("R3 value");
        }
        if self.r4.is_some_and(|v| v > 1 || l.flags() < 1) {
            return bad("R4 value");
        }
        if self.r5.is_some_and(|v| v > 1 || l.flags() < 2) {
            return bad("R5 value");
        }
        Ok(())
    }

    /// Whether the non-R1 part of `(r2, tail index)` satisfies the constraints.
    fn rest_ok(&self, psi: &StateVector, r2: usize, k: usize) -> bool {
        let l = psi.layout();
        let r3 = k / l.flag_dim();
        let f = k % l.flag_dim();
        let (r4, r5) = match l.flags() {
            0 => (0, 0),
            1 => (f as u8, 0),
            _ => ((f >> 1) as u8, (f & 1) as u8),
        };
        self.r2.is_none_or(|v| v == r2)
            && self.r3.is_none_or(|v| v == r3)
            && self.r4.is_none_or(|v| v == r4)
            && self.r5.is_none_or(|v| v == r5)
    }
}

/// `P ψ`, unnormalised.
pub fn project(psi: &StateVector, proj: &Projector) -> Result<StateVector> {
    proj.validate(psi)?;
    let l = *psi.layout();
    let (n, tail) = (l.n(), l.tail());
    let src = psi.amplitudes();
    let mut out = StateVector::zeros(l);
    let dst = out.amplitudes_mut();
    for r2 in 0..n {
        for k in 0..tail {
            if !proj.rest_ok(psi, r2, k) {
                continue;
            }
            let at = |x: usize| (x * n + r2) * tail + k;
            match &proj.r1 {
                None => (0..n).for_each(|x| dst[at(x)] = src[at(x)]),
                Some(R1Constraint::Basis(x)) => dst[at(*x)] = src[at(*x)],
                Some(R1Constraint::Vector(v)) => {
                    let c: Complex64 = (0..n).map(|x| src[at(x)] * v[x]).sum();
                    (0..n).for_each(|x| dst[at(x)] = c * v[x]);
                }
            }
        }
    }
    Ok(out)
}

/// `‖P ψ‖²`.
pub fn outcome_prob(psi: &StateVector, proj: &Projector) -> Result<f64> {
    Ok(project(psi, proj)?.norm_sqr().min(1.0))
}

/// Draw the outcome of `{P, I - P}` and return the renormalised post-state.
pub fn measure_collapse(psi: &StateVector, proj: &Projector, rng: &mut impl Rng) -> Result<(bool, StateVector)> {
    let hit = project(psi, proj)?;
    let p = hit.norm_sqr() / psi.norm_sqr();
    let outcome = rng.gen::<f64>() < p;
    let mut post = if outcome {
        hit
    } else {
        let mut miss = psi.clone();
        for (m, h) in miss.amplitudes_mut().iter_mut().zip(hit.amplitudes()) {
            *m -= h;
        }
        miss
    };
    post.normalize()?;
    Ok((outcome, post))
}
