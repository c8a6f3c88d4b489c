//! The Szegedy walk `W = V† S V R_0̄` on `R1 ⊗ R2`.
//!
//! Every primitive acts identically on each position of the `(r3, r4, r5)`
//! tail, so the kernels below take a list of tail ranges and loop over them
//! innermost. That lets the controlled-power sweep in `qff` touch only the
//! branches that still need a step.

use std::ops::Range;

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::layout::StateVector;
use crate::chain::Transition;
use crate::error::{Error, Result};

/// Real Householder reflection `I - 2 u uᵀ`, stored by support.
#[derive(Debug, Clone)]
pub(crate) struct Householder {
    support: Vec<usize>,
    weights: Vec<f64>,
}

impl Householder {
    /// The reflection sending `e_0` to the unit vector `target`, or `None`
    /// when `target` already is `e_0`.
    pub(crate) fn to_target(target: &[f64]) -> Option<Self> {
        let mut u: Vec<f64> = target.iter().map(|a| -a).collect();
        u[0] += 1.0;
        let nrm = u.iter().map(|x| x * x).sum::<f64>().sqrt();
        if nrm < 1e-15 {
            return None;
        }
        let (support, weights) = u.iter().enumerate().filter(|(_, &x)| x != 0.0).map(|(i, &x)| (i, x / nrm)).unzip();
        Some(Householder { support, weights })
    }

    /// Apply to the vector whose `i`-th entry lives at `base + i * stride`,
    /// for every offset in `range` simultaneously.
    pub(crate) fn apply_strided(
        &self,
        amps: &mut [Complex64],
        base: usize,
        stride: usize,
        range: Range<usize>,
        dot: &mut Vec<Complex64>,
    ) {
        let len = range.len();
        dot.clear();
        dot.resize(len, Complex64::new(0.0, 0.0));
        for (&i, &w) in self.support.iter().zip(&self.weights) {
            let row = &amps[base + i * stride + range.start..][..len];
            for (d, a) in dot.iter_mut().zip(row) {
                *d += a * w;
            }
        }
        for (&i, &w) in self.support.iter().zip(&self.weights) {
            let row = &mut amps[base + i * stride + range.start..][..len];
            let w2 = 2.0 * w;
            for (a, d) in row.iter_mut().zip(dot.iter()) {
                *a -= d * w2;
            }
        }
    }
}

/// Precomputed coin reflections for one transition matrix.
#[derive(Debug, Clone)]
pub struct Walk {
    n: usize,
    coins: Vec<Option<Householder>>,
}

impl Walk {
    pub fn new(c: &impl Transition) -> Self {
        Self::from_matrix(c.transition())
    }

    pub fn from_matrix(p: &DMatrix<f64>) -> Self {
        let n = p.nrows();
        let coins = (0..n)
            .map(|x| {
                let row: Vec<f64> = (0..n).map(|y| p[(x, y)].sqrt()).collect();
                Householder::to_target(&row)
            })
            .collect();
        Walk { n, coins }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    fn check(&self, psi: &StateVector) -> Result<()> {
        if psi.layout().n() != self.n {
            return Err(Error::Layout(format!(
                "walk on {} vertices applied to a state with n = {}",
                self.n,
                psi.layout().n()
            )));
        }
        Ok(())
    }

    /// `V(s)`; it is its own inverse.
    pub fn coin(&self, psi: &mut StateVector) -> Result<()> {
        self.check(psi)?;
        let tail = psi.layout().tail();
        self.coin_ranges(psi.amplitudes_mut(), tail, std::slice::from_ref(&(0..tail)));
        Ok(())
    }

    /// `W^count`, or `(W†)^count` when `adjoint` is set.
    pub fn apply(&self, psi: &mut StateVector, count: usize, adjoint: bool) -> Result<()> {
        self.check(psi)?;
        let tail = psi.layout().tail();
        for _ in 0..count {
            self.step_ranges(psi.amplitudes_mut(), tail, std::slice::from_ref(&(0..tail)), adjoint);
        }
        Ok(())
    }

    pub(crate) fn coin_ranges(&self, amps: &mut [Complex64], tail: usize, ranges: &[Range<usize>]) {
        let n = self.n;
        let mut dot = Vec::new();
        for (x, coin) in self.coins.iter().enumerate() {
            if let Some(h) = coin {
                for r in ranges {
                    h.apply_strided(amps, x * n * tail, tail, r.clone(), &mut dot);
                }
            }
        }
    }

    /// One `W` (or `W†`) on the given tail ranges of every `(r1, r2)` block.
    pub(crate) fn step_ranges(&self, amps: &mut [Complex64], tail: usize, ranges: &[Range<usize>], adjoint: bool) {
        if adjoint {
            // W† = R_0̄ V S V
            self.coin_ranges(amps, tail, ranges);
            swap_ranges(amps, self.n, tail, ranges);
            self.coin_ranges(amps, tail, ranges);
            ref0_ranges(amps, self.n, tail, ranges);
        } else {
            ref0_ranges(amps, self.n, tail, ranges);
            self.coin_ranges(amps, tail, ranges);
            swap_ranges(amps, self.n, tail, ranges);
            self.coin_ranges(amps, tail, ranges);
        }
    }
}

pub(crate) fn swap_ranges(amps: &mut [Complex64], n: usize, tail: usize, ranges: &[Range<usize>]) {
    for x in 0..n {
        for y in x + 1..n {
            let a = (x * n + y) * tail;
            let b = (y * n + x) * tail;
            let (lo, hi) = amps.split_at_mut(b);
            for r in ranges {
                lo[a + r.start..a + r.end].swap_with_slice(&mut hi[r.start..r.end]);
            }
        }
    }
}

pub(crate) fn ref0_ranges(amps: &mut [Complex64], n: usize, tail: usize, ranges: &[Range<usize>]) {
    for x in 0..n {
        for y in 1..n {
            let base = (x * n + y) * tail;
            for r in ranges {
                amps[base + r.start..base + r.end].iter_mut().for_each(|a| *a = -*a);
            }
        }
    }
}

/// Coin preparation `V(s)` (or its adjoint, which is the same reflection).
pub fn apply_coin_prep(psi: &mut StateVector, c: &impl Transition, adjoint: bool) -> Result<()> {
    let _ = adjoint; // Householder blocks are symmetric: V† = V.
    Walk::new(c).coin(psi)
}

/// Global swap `|x⟩|y⟩ → |y⟩|x⟩` of R1 and R2.
pub fn apply_swap(psi: &mut StateVector) {
    let l = *psi.layout();
    swap_ranges(psi.amplitudes_mut(), l.n(), l.tail(), std::slice::from_ref(&(0..l.tail())));
}

/// `I ⊗ (2|0̄⟩⟨0̄| - I)` on R2.
pub fn apply_ref0(psi: &mut StateVector) {
    let l = *psi.layout();
    ref0_ranges(psi.amplitudes_mut(), l.n(), l.tail(), std::slice::from_ref(&(0..l.tail())));
}

/// `W(s)^count`, built from the chain on every call.
pub fn apply_walk(psi: &mut StateVector, c: &impl Transition, count: usize, adjoint: bool) -> Result<()> {
    Walk::new(c).apply(psi, count, adjoint)
}
