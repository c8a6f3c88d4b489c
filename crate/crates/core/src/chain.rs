//! Reversible Markov chains and the transforms the walk constructions need.
//!
//! Matrices are dense `f64`. A [`MarkovChain`] carries its stationary
//! distribution and the reversible/ergodic flags, computed once at
//! construction. [`InterpolatedChain`] blends a chain with its absorbing
//! modification, `P(s) = (1 - s) P + s P'`.

use std::collections::VecDeque;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::spectral;

const ROW_TOL: f64 = 1e-12;
const BALANCE_TOL: f64 = 1e-12;
const STATIONARY_TOL: f64 = 1e-10;

/// Anything that exposes a row-stochastic transition matrix.
pub trait Transition {
    fn transition(&self) -> &DMatrix<f64>;

    fn n(&self) -> usize {
        self.transition().nrows()
    }
}

#[derive(Debug, Clone)]
pub struct MarkovChain {
    p: DMatrix<f64>,
    pi: DVector<f64>,
    reversible: bool,
    irreducible: bool,
    ergodic: bool,
}

impl Transition for MarkovChain {
    fn transition(&self) -> &DMatrix<f64> {
        &self.p
    }
}

impl MarkovChain {
    /// Validate a transition matrix and compute its stationary distribution.
    ///
    /// π comes from the principal eigenvector of the discriminant when that
    /// vector satisfies detailed balance; otherwise power iteration on the
    /// lazy chain is used and the chain is flagged non-reversible.
    pub fn from_matrix(p: DMatrix<f64>) -> Result<Self> {
        check_stochastic(&p)?;
        let d = discriminant(&RawTransition(&p));
        if let Ok(spec) = spectral::sym_eig_matrix(d.matrix()) {
            let v = spec.eigenvector(0);
            let mut pi = v.map(|x| x * x);
            let total = pi.sum();
            if total > 0.0 {
                pi /= total;
                if detailed_balance_error(&p, &pi) <= BALANCE_TOL && stationarity_error(&p, &pi) <= STATIONARY_TOL {
                    return Self::from_parts(p, pi);
                }
            }
        }
        let pi = power_iteration(&p)?;
        Self::from_parts(p, pi)
    }

    /// Assemble a chain whose stationary distribution is already known.
    pub(crate) fn from_parts(p: DMatrix<f64>, pi: DVector<f64>) -> Result<Self> {
        check_stochastic(&p)?;
        if pi.len() != p.nrows() {
            return Err(Error::Chain("stationary vector has the wrong length".into()));
        }
        if stationarity_error(&p, &pi) > STATIONARY_TOL {
            return Err(Error::Chain("supplied distribution is not stationary".into()));
        }
        let reversible = detailed_balance_error(&p, &pi) <= BALANCE_TOL;
        let (irreducible, period) = support_structure(&p);
        Ok(MarkovChain { p, pi, reversible, irreducible, ergodic: irreducible && period == 1 })
    }

    pub fn n(&self) -> usize {
        self.p.nrows()
    }

    pub fn p(&self) -> &DMatrix<f64> {
        &self.p
    }

    pub fn pi(&self) -> &DVector<f64> {
        &self.pi
    }

    pub fn pi_min(&self) -> f64 {
        self.pi.min()
    }

    /// Componentwise square root of π, the amplitudes of |π⟩.
    pub fn sqrt_pi(&self) -> DVector<f64> {
        self.pi.map(f64::sqrt)
    }

    pub fn is_reversible(&self) -> bool {
        self.reversible
    }

    pub fn is_irreducible(&self) -> bool {
        self.irreducible
    }

    pub fn is_ergodic(&self) -> bool {
        self.ergodic
    }

    /// The lazy chain `(I + P) / 2`. Same stationary distribution.
    pub fn lazy(&self) -> MarkovChain {
        let n = self.n();
        let p = (DMatrix::identity(n, n) + &self.p) * 0.5;
        let (irreducible, period) = support_structure(&p);
        MarkovChain {
            p,
            pi: self.pi.clone(),
            reversible: self.reversible,
            irreducible,
            ergodic: irreducible && period == 1,
        }
    }

    /// True when the discriminant has an eigenvalue below zero, in which
    /// case the reflection circuits need the lazy chain.
    pub fn has_negative_spectrum(&self) -> Result<bool> {
        let spec = spectral::sym_eig(&discriminant(self))?;
        Ok(spec.eigenvalues().last().copied().unwrap_or(0.0) < -1e-12)
    }
}

struct RawTransition<'a>(&'a DMatrix<f64>);

impl Transition for RawTransition<'_> {
    fn transition(&self) -> &DMatrix<f64> {
        self.0
    }
}

fn check_stochastic(p: &DMatrix<f64>) -> Result<()> {
    let n = p.nrows();
    if n == 0 || p.ncols() != n {
        return Err(Error::Chain(format!("transition matrix is {}x{}", p.nrows(), p.ncols())));
    }
    for x in 0..n {
        let mut sum = 0.0;
        for y in 0..n {
            let v = p[(x, y)];
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::Chain(format!("entry ({x}, {y}) = {v} outside [0, 1]")));
            }
            sum += v;
        }
        if (sum - 1.0).abs() > ROW_TOL {
            return Err(Error::Chain(format!("row {x} sums to {sum}")));
        }
    }
    Ok(())
}

fn detailed_balance_error(p: &DMatrix<f64>, pi: &DVector<f64>) -> f64 {
    let n = p.nrows();
    let mut worst = 0.0f64;
    for x in 0..n {
        for y in x + 1..n {
            worst = worst.max((pi[x] * p[(x, y)] - pi[y] * p[(y, x)]).abs());
        }
    }
    worst
}

fn stationarity_error(p: &DMatrix<f64>, pi: &DVector<f64>) -> f64 {
    (p.tr_mul(pi) - pi).amax()
}

fn power_iteration(p: &DMatrix<f64>) -> Result<DVector<f64>> {
    let n = p.nrows();
    let lazy = (DMatrix::identity(n, n) + p) * 0.5;
    let mut pi = DVector::from_element(n, 1.0 / n as f64);
    for _ in 0..1_000_000 {
        let next = lazy.tr_mul(&pi);
        let diff = (&next - &pi).lp_norm(1);
        pi = next;
        if diff < 1e-15 {
            return Ok(&pi / pi.sum());
        }
    }
    Err(Error::Chain("power iteration for the stationary distribution did not settle".into()))
}

/// Strong connectivity of the support graph, and its period.
fn support_structure(p: &DMatrix<f64>) -> (bool, usize) {
    let n = p.nrows();
    let reach = |forward: bool| {
        let mut level = vec![usize::MAX; n];
        level[0] = 0;
        let mut queue = VecDeque::from([0]);
        while let Some(x) = queue.pop_front() {
            for y in 0..n {
                let w = if forward { p[(x, y)] } else { p[(y, x)] };
                if w > 0.0 && level[y] == usize::MAX {
                    level[y] = level[x] + 1;
                    queue.push_back(y);
                }
            }
        }
        level
    };
    let level = reach(true);
    let irreducible = level.iter().all(|&l| l != usize::MAX) && reach(false).iter().all(|&l| l != usize::MAX);
    if !irreducible {
        return (false, 0);
    }
    let mut g = 0usize;
    for x in 0..n {
        for y in 0..n {
            if p[(x, y)] > 0.0 {
                let diff = (level[x] + 1).abs_diff(level[y]);
                g = gcd(g, diff);
            }
        }
    }
    (true, g)
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Simple random walk on a (weighted) graph, optionally lazy.
pub fn random_walk_chain(g: &Graph, lazy: bool) -> Result<MarkovChain> {
    let n = g.n();
    let strength = g.strengths();
    if let Some(x) = strength.iter().position(|&s| s <= 0.0) {
        return Err(Error::Chain(format!("vertex {x} is isolated")));
    }
    let mut p = DMatrix::zeros(n, n);
    for &(u, v, w) in g.edges() {
        p[(u, v)] = w / strength[u];
        p[(v, u)] = w / strength[v];
    }
    let total: f64 = strength.iter().sum();
    let pi = DVector::from_iterator(n, strength.iter().map(|s| s / total));
    let chain = MarkovChain::from_parts(p, pi)?;
    Ok(if lazy { chain.lazy() } else { chain })
}

/// Check a marked set and return it sorted.
pub fn validate_marked(n: usize, marked: &[usize]) -> Result<Vec<usize>> {
    if marked.is_empty() {
        return Err(Error::Domain("marked set is empty".into()));
    }
    let mut m = marked.to_vec();
    m.sort_unstable();
    if m.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::Domain("marked set has repeated vertices".into()));
    }
    if let Some(&x) = m.last().filter(|&&x| x >= n) {
        return Err(Error::Domain(format!("marked vertex {x} out of range for n = {n}")));
    }
    Ok(m)
}

fn validate_proper(n: usize, marked: &[usize]) -> Result<Vec<usize>> {
    let m = validate_marked(n, marked)?;
    if m.len() == n {
        return Err(Error::Domain("marked set covers every vertex".into()));
    }
    Ok(m)
}

fn absorbing_matrix(p: &DMatrix<f64>, marked: &[usize]) -> DMatrix<f64> {
    let mut q = p.clone();
    for &m in marked {
        q.row_mut(m).fill(0.0);
        q[(m, m)] = 1.0;
    }
    q
}

/// Make every marked vertex absorbing.
///
/// The result is reducible; its recorded stationary distribution is π
/// restricted to the marked set and renormalised.
pub fn absorbing_mod(c: &MarkovChain, marked: &[usize]) -> Result<MarkovChain> {
    let m = validate_proper(c.n(), marked)?;
    let p = absorbing_matrix(c.p(), &m);
    let mass: f64 = m.iter().map(|&x| c.pi[x]).sum();
    let mut pi = DVector::zeros(c.n());
    for &x in &m {
        pi[x] = c.pi[x] / mass;
    }
    MarkovChain::from_parts(p, pi)
}

#[derive(Debug, Clone)]
pub struct InterpolatedChain {
    base: MarkovChain,
    marked: Vec<usize>,
    s: f64,
    ps: DMatrix<f64>,
}

impl Transition for InterpolatedChain {
    fn transition(&self) -> &DMatrix<f64> {
        &self.ps
    }
}

impl InterpolatedChain {
    pub fn base(&self) -> &MarkovChain {
        &self.base
    }

    pub fn marked(&self) -> &[usize] {
        &self.marked
    }

    pub fn s(&self) -> f64 {
        self.s
    }

    pub fn ps(&self) -> &DMatrix<f64> {
        &self.ps
    }

    /// Stationary distribution of `P(s)`: proportional to `(1 - s) π_x` off
    /// the marked set and to `π_x` on it.
    pub fn pi(&self) -> DVector<f64> {
        let mut w = self.base.pi.map(|x| (1.0 - self.s) * x);
        for &m in &self.marked {
            w[m] = self.base.pi[m];
        }
        let total = w.sum();
        w / total
    }
}

/// `P(s) = (1 - s) P + s P'`. The endpoints return `P` and `P'` exactly.
pub fn interpolate(c: &MarkovChain, marked: &[usize], s: f64) -> Result<InterpolatedChain> {
    if !(0.0..=1.0).contains(&s) {
        return Err(Error::Domain(format!("interpolation parameter {s} outside [0, 1]")));
    }
    let m = validate_proper(c.n(), marked)?;
    let absorbing = absorbing_matrix(c.p(), &m);
    let ps = if s == 0.0 {
        c.p().clone()
    } else if s == 1.0 {
        absorbing
    } else {
        c.p() * (1.0 - s) + absorbing * s
    };
    Ok(InterpolatedChain { base: c.clone(), marked: m, s, ps })
}

/// The symmetric matrix `D_xy = sqrt(P_xy P_yx)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Discriminant {
    d: DMatrix<f64>,
}

impl Discriminant {
    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.d
    }

    pub fn into_matrix(self) -> DMatrix<f64> {
        self.d
    }
}

pub fn discriminant(c: &impl Transition) -> Discriminant {
    let p = c.transition();
    let n = p.nrows();
    let d = DMatrix::from_fn(n, n, |x, y| (p[(x, y)] * p[(y, x)]).sqrt());
    Discriminant { d }
}

/// Unit vector `sqrt(π_x) / sqrt(1 - π_M)` on unmarked vertices, zero on `M`.
pub fn pi_bar(pi: &DVector<f64>, marked: &[usize]) -> Result<DVector<f64>> {
    let m = validate_marked(pi.len(), marked)?;
    let mass: f64 = m.iter().map(|&x| pi[x]).sum();
    if mass >= 1.0 - 1e-12 {
        return Err(Error::Domain(format!("marked mass {mass} leaves nothing to normalise")));
    }
    let scale = (1.0 - mass).sqrt();
    let mut v = pi.map(|x| x.sqrt() / scale);
    for &x in &m {
        v[x] = 0.0;
    }
    Ok(v)
}
