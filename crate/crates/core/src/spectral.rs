//! Symmetric eigendecomposition and the classical scalar quantities built on
//! it: spectral gap, hitting times and mixing times.
//!
//! The eigensolver is cyclic Jacobi. Eigenvalues come out non-increasing and
//! each eigenvector has its first nonzero component positive, so results are
//! reproducible across runs.

use nalgebra::{DMatrix, DVector};

use crate::chain::{absorbing_mod, discriminant, pi_bar, validate_marked, Discriminant, MarkovChain, Transition};
use crate::error::{Error, Result};

const SYMMETRY_TOL: f64 = 1e-12;
const OFF_DIAGONAL_TOL: f64 = 1e-13;
const MAX_SWEEPS: usize = 100;
const SIGN_TOL: f64 = 1e-12;

/// Eigenvalues below this count as strictly less than one in the hitting-time sum.
pub const UNIT_EIGENVALUE_TOL: f64 = 1e-12;

/// Default cap for [`classical_mixing_time`].
pub const MIXING_CAP: u64 = 10_000_000;

#[derive(Debug, Clone)]
pub struct Spectrum {
    values: Vec<f64>,
    // Columns are eigenvectors, paired with `values`.
    vectors: DMatrix<f64>,
}

impl Spectrum {
    /// Eigenvalues, non-increasing.
    pub fn eigenvalues(&self) -> &[f64] {
        &self.values
    }

    /// Orthonormal eigenvectors as columns.
    pub fn eigenvectors(&self) -> &DMatrix<f64> {
        &self.vectors
    }

    pub fn eigenvector(&self, k: usize) -> DVector<f64> {
        self.vectors.column(k).into_owned()
    }

    /// `1 - λ_1`, or 1 for a one-dimensional matrix.
    pub fn gap(&self) -> f64 {
        self.values.get(1).map_or(1.0, |l| 1.0 - l)
    }

    /// `1 - max(λ_1, |λ_min|)`.
    pub fn absolute_gap(&self) -> f64 {
        let second = self.values.get(1).copied().unwrap_or(0.0);
        let last = self.values.last().copied().unwrap_or(0.0).abs();
        if self.values.len() < 2 {
            return 1.0;
        }
        1.0 - second.max(last)
    }

    /// `V Λ Vᵀ`.
    pub fn reconstruct(&self) -> DMatrix<f64> {
        let lambda = DMatrix::from_diagonal(&DVector::from_column_slice(&self.values));
        &self.vectors * lambda * self.vectors.transpose()
    }
}

pub fn sym_eig(d: &Discriminant) -> Result<Spectrum> {
    sym_eig_matrix(d.matrix())
}

/// Cyclic Jacobi on a dense symmetric matrix.
pub fn sym_eig_matrix(a: &DMatrix<f64>) -> Result<Spectrum> {
    let n = a.nrows();
    if a.ncols() != n {
        return Err(Error::Domain(format!("matrix is {}x{}", n, a.ncols())));
    }
    let mut asym = 0.0f64;
    for i in 0..n {
        for j in i + 1..n {
            asym = asym.max((a[(i, j)] - a[(j, i)]).abs());
        }
    }
    if asym > SYMMETRY_TOL {
        return Err(Error::NotSymmetric(asym));
    }

    // Row-major working copies; nalgebra indexing is too slow in the inner loop.
    let mut m: Vec<f64> = (0..n * n).map(|k| a[(k / n, k % n)]).collect();
    let mut v = vec![0.0; n * n];
    for i in 0..n {
        v[i * n + i] = 1.0;
    }

    let mut converged = false;
    for _ in 0..MAX_SWEEPS {
        let off: f64 = (0..n)
            .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
            .map(|(i, j)| 2.0 * m[i * n + j] * m[i * n + j])
            .sum::<f64>()
            .sqrt();
        if off <= OFF_DIAGONAL_TOL {
            converged = true;
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = m[p * n + q];
                if apq == 0.0 {
                    continue;
                }
                let theta = (m[q * n + q] - m[p * n + p]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let mkp = m[k * n + p];
                    let mkq = m[k * n + q];
                    m[k * n + p] = c * mkp - s * mkq;
                    m[k * n + q] = s * mkp + c * mkq;
                }
                for k in 0..n {
                    let mpk = m[p * n + k];
                    let mqk = m[q * n + k];
                    m[p * n + k] = c * mpk - s * mqk;
                    m[q * n + k] = s * mpk + c * mqk;
                }
                for k in 0..n {
                    let vkp = v[k * n + p];
                    let vkq = v[k * n + q];
                    v[k * n + p] = c * vkp - s * vkq;
                    v[k * n + q] = s * vkp + c * vkq;
                }
            }
        }
    }
    if !converged {
        return Err(Error::NoConvergence(MAX_SWEEPS));
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| m[j * n + j].total_cmp(&m[i * n + i]));
    let values = order.iter().map(|&i| m[i * n + i]).collect();
    let mut vectors = DMatrix::zeros(n, n);
    for (col, &i) in order.iter().enumerate() {
        let lead = (0..n).map(|k| v[k * n + i]).find(|x| x.abs() > SIGN_TOL).unwrap_or(1.0);
        let sign = if lead < 0.0 { -1.0 } else { 1.0 };
        for k in 0..n {
            vectors[(k, col)] = sign * v[k * n + i];
        }
    }
    Ok(Spectrum { values, vectors })
}

/// Spectral gap `1 - λ_1` of the chain's discriminant.
pub fn gap(c: &impl Transition) -> Result<f64> {
    Ok(sym_eig(&discriminant(c))?.gap())
}

fn check_ht_input(c: &MarkovChain, marked: &[usize]) -> Result<Vec<usize>> {
    if !c.is_reversible() {
        return Err(Error::Chain("hitting times need a reversible chain".into()));
    }
    if !c.is_irreducible() {
        return Err(Error::Chain("hitting times need an irreducible chain".into()));
    }
    let m = validate_marked(c.n(), marked)?;
    let mass: f64 = m.iter().map(|&x| c.pi()[x]).sum();
    if mass >= 1.0 - 1e-12 {
        return Err(Error::Domain(format!("marked mass {mass} is too close to one")));
    }
    Ok(m)
}

/// `HT(M)` from the eigenpairs of the absorbing discriminant:
/// `Σ |⟨v'_k|π̄⟩|² / (1 - λ'_k)` over eigenvalues strictly below one.
pub fn hitting_time_spectral(c: &MarkovChain, marked: &[usize]) -> Result<f64> {
    let m = check_ht_input(c, marked)?;
    let absorbing = absorbing_mod(c, &m)?;
    let spec = sym_eig(&discriminant(&absorbing))?;
    let target = pi_bar(c.pi(), &m)?;
    let units = spec.eigenvalues().iter().filter(|&&l| l >= 1.0 - UNIT_EIGENVALUE_TOL).count();
    if units != m.len() {
        return Err(Error::Chain(format!(
            "{units} unit eigenvalues for {} marked vertices; the unmarked block is not transient",
            m.len()
        )));
    }
    let mut ht = 0.0;
    for (k, &lambda) in spec.eigenvalues().iter().enumerate() {
        if lambda < 1.0 - UNIT_EIGENVALUE_TOL {
            let overlap = spec.eigenvectors().column(k).dot(&target);
            ht += overlap * overlap / (1.0 - lambda);
        }
    }
    Ok(ht)
}

/// `HT(M)` by solving `(I - Q) h = 1` on the unmarked block.
pub fn hitting_time_oracle(c: &MarkovChain, marked: &[usize]) -> Result<f64> {
    let m = check_ht_input(c, marked)?;
    let free: Vec<usize> = (0..c.n()).filter(|x| m.binary_search(x).is_err()).collect();
    let k = free.len();
    let a = DMatrix::from_fn(k, k, |i, j| {
        let id = if i == j { 1.0 } else { 0.0 };
        id - c.p()[(free[i], free[j])]
    });
    let h = a
        .lu()
        .solve(&DVector::from_element(k, 1.0))
        .ok_or_else(|| Error::Singular("I - Q is singular; the marked set is unreachable".into()))?;
    let mass: f64 = m.iter().map(|&x| c.pi()[x]).sum();
    let weighted: f64 = free.iter().zip(h.iter()).map(|(&x, hx)| c.pi()[x] * hx).sum();
    Ok(weighted / (1.0 - mass))
}

/// `HT({x})` for every vertex at once, from the fundamental matrix
/// `Z = (I - P + 1πᵀ)⁻¹ - 1πᵀ`: `E_π[τ_x] = Z_xx / π_x`, and the restriction to
/// unmarked starts divides by `1 - π_x`.
pub fn hitting_times_all(c: &MarkovChain) -> Result<Vec<f64>> {
    check_ht_input(c, &[0])?;
    let n = c.n();
    if n < 2 {
        return Err(Error::Domain("need at least two vertices".into()));
    }
    let pi = c.pi();
    let a = DMatrix::from_fn(n, n, |i, j| {
        let id = if i == j { 1.0 } else { 0.0 };
        id - c.p()[(i, j)] + pi[j]
    });
    let z = a.try_inverse().ok_or_else(|| Error::Singular("fundamental matrix is singular".into()))?;
    Ok((0..n).map(|x| (z[(x, x)] - pi[x]) / (pi[x] * (1.0 - pi[x]))).collect())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MixingTime {
    /// Smallest `t` with `max_x TV(e_x Pᵗ, π) <= eps`.
    pub steps: u64,
    /// `(ln(1/π_min) + ln(1/eps)) / δ*` with δ* the absolute spectral gap.
    pub bound: f64,
}

fn worst_tv(pt: &DMatrix<f64>, pi: &DVector<f64>) -> f64 {
    let n = pt.nrows();
    (0..n).map(|x| 0.5 * (0..n).map(|y| (pt[(x, y)] - pi[y]).abs()).sum::<f64>()).fold(0.0, f64::max)
}

pub fn classical_mixing_time(c: &MarkovChain, eps: f64) -> Result<MixingTime> {
    classical_mixing_time_capped(c, eps, MIXING_CAP)
}

/// Mixing time by repeated squaring, then binary lifting over the stored powers.
pub fn classical_mixing_time_capped(c: &MarkovChain, eps: f64, cap: u64) -> Result<MixingTime> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::Domain(format!("eps = {eps} outside (0, 1)")));
    }
    if !c.is_ergodic() {
        return Err(Error::Chain("mixing time needs an ergodic chain".into()));
    }
    let spec = sym_eig(&discriminant(c))?;
    let bound = ((1.0 / c.pi_min()).ln() + (1.0 / eps).ln()) / spec.absolute_gap();

    let pi = c.pi();
    let n = c.n();
    if worst_tv(&DMatrix::identity(n, n), pi) <= eps {
        return Ok(MixingTime { steps: 0, bound });
    }
    // powers[k] = P^(2^k)
    let mut powers = vec![c.p().clone()];
    while worst_tv(powers.last().unwrap(), pi) > eps {
        let steps = 1u64 << powers.len();
        if steps / 2 >= cap {
            return Err(Error::MixingCap(cap));
        }
        let last = powers.last().unwrap();
        powers.push(last * last);
    }
    // d(2^K) <= eps < d(2^(K-1)); find the smallest t in (2^(K-1), 2^K].
    let big = powers.len() - 1;
    if big == 0 {
        return Ok(MixingTime { steps: 1, bound });
    }
    let mut acc = powers[big - 1].clone();
    let mut t = 1u64 << (big - 1);
    for j in (0..big - 1).rev() {
        let candidate = &acc * &powers[j];
        if worst_tv(&candidate, pi) > eps {
            acc = candidate;
            t += 1 << j;
        }
    }
    let steps = t + 1;
    if steps > cap {
        return Err(Error::MixingCap(cap));
    }
    Ok(MixingTime { steps, bound })
}
