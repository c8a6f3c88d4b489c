use num_complex::Complex64;

use crate::error::{Error, Result};

/// Hard ceiling on the number of amplitudes a single state may hold.
pub const MAX_DIM: usize = 1 << 28;

/// Single-qubit flag registers.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Flag {
    R4,
    R5,
}

/// Register dimensions for `R1 ⊗ R2 ⊗ R3 ⊗ R4 ⊗ R5`.
///
/// R1 and R2 have dimension `n`, R3 has `2^tau`, and `flags` says how many of
/// the single-qubit registers R4, R5 are allocated (R4 first). Amplitudes are
/// indexed row-major, so the `(r3, r4, r5)` part of an index is a contiguous
/// "tail" of length `2^tau · 2^flags` inside each `(r1, r2)` block.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RegisterLayout {
    n: usize,
    tau: u32,
    flags: u8,
}

/// Decoded register values of one basis index.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Coords {
    pub r1: usize,
    pub r2: usize,
    pub r3: usize,
    pub r4: u8,
    pub r5: u8,
}

impl RegisterLayout {
    pub fn new(n: usize, tau: u32, flags: u8) -> Result<Self> {
        if n == 0 {
            return Err(Error::Layout("system dimension must be positive".into()));
        }
        if flags > 2 {
            return Err(Error::Layout(format!("{flags} flag registers requested, at most 2 exist")));
        }
        let dim = n
            .checked_mul(n)
            .and_then(|d| d.checked_mul(1usize.checked_shl(tau)?))
            .and_then(|d| d.checked_mul(1 << flags));
        match dim {
            Some(d) if d <= MAX_DIM => Ok(RegisterLayout { n, tau, flags }),
            _ => Err(Error::Layout(format!("n = {n}, tau = {tau}, flags = {flags} is too large"))),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn tau(&self) -> u32 {
        self.tau
    }

    pub fn flags(&self) -> u8 {
        self.flags
    }

    pub fn r3_dim(&self) -> usize {
        1 << self.tau
    }

    pub fn flag_dim(&self) -> usize {
        1 << self.flags
    }

    /// Length of the contiguous `(r3, r4, r5)` block.
    pub fn tail(&self) -> usize {
        self.r3_dim() * self.flag_dim()
    }

    pub fn dim(&self) -> usize {
        self.n * self.n * self.tail()
    }

    /// Bit mask of a flag inside the flag part of a tail index.
    pub fn flag_mask(&self, f: Flag) -> Result<usize> {
        match (f, self.flags) {
            (Flag::R4, 1) => Ok(1),
            (Flag::R4, 2) => Ok(2),
            (Flag::R5, 2) => Ok(1),
            _ => Err(Error::Layout(format!("{f:?} is not allocated in this layout"))),
        }
    }

    pub fn index(&self, r1: usize, r2: usize, r3: usize, r4: u8, r5: u8) -> Result<usize> {
        if r1 >= self.n || r2 >= self.n || r3 >= self.r3_dim() || r4 > 1 || r5 > 1 {
            return Err(Error::Layout(format!("({r1}, {r2}, {r3}, {r4}, {r5}) out of range")));
        }
        let f = match self.flags {
            0 if r4 == 0 && r5 == 0 => 0,
            1 if r5 == 0 => r4 as usize,
            2 => 2 * r4 as usize + r5 as usize,
            _ => return Err(Error::Layout("flag value set on an unallocated register".into())),
        };
        Ok((r1 * self.n + r2) * self.tail() + r3 * self.flag_dim() + f)
    }

    pub fn coords(&self, idx: usize) -> Coords {
        let tail = self.tail();
        let block = idx / tail;
        let k = idx % tail;
        let f = k % self.flag_dim();
        let (r4, r5) = match self.flags {
            0 => (0, 0),
            1 => (f as u8, 0),
            _ => ((f >> 1) as u8, (f & 1) as u8),
        };
        Coords { r1: block / self.n, r2: block % self.n, r3: k / self.flag_dim(), r4, r5 }
    }

    /// Same system and R3 width with a different number of flags.
    pub fn with_flags(&self, flags: u8) -> Result<Self> {
        Self::new(self.n, self.tau, flags)
    }
}

/// Complex amplitudes over a [`RegisterLayout`].
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    layout: RegisterLayout,
    amps: Vec<Complex64>,
}

impl StateVector {
    pub fn zeros(layout: RegisterLayout) -> Self {
        StateVector { layout, amps: vec![Complex64::new(0.0, 0.0); layout.dim()] }
    }

    pub fn from_amplitudes(layout: RegisterLayout, amps: Vec<Complex64>) -> Result<Self> {
        if amps.len() != layout.dim() {
            return Err(Error::Layout(format!("{} amplitudes for a layout of dimension {}", amps.len(), layout.dim())));
        }
        Ok(StateVector { layout, amps })
    }

    /// `|ψ⟩|0̄⟩|0^τ⟩|0⟩|0⟩` for a vector `ψ` over the vertex set.
    pub fn from_system(layout: RegisterLayout, psi: &[f64]) -> Result<Self> {
        if psi.len() != layout.n() {
            return Err(Error::Layout(format!("system vector has length {}, n = {}", psi.len(), layout.n())));
        }
        let mut s = Self::zeros(layout);
        for (x, &a) in psi.iter().enumerate() {
            s.amps[layout.index(x, 0, 0, 0, 0)?] = Complex64::new(a, 0.0);
        }
        Ok(s)
    }

    pub fn layout(&self) -> &RegisterLayout {
        &self.layout
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn amplitudes_mut(&mut self) -> &mut [Complex64] {
        &mut self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    /// Scale to unit norm. A zero state is an error.
    pub fn normalize(&mut self) -> Result<()> {
        let nrm = self.norm();
        if nrm == 0.0 {
            return Err(Error::Domain("cannot normalise the zero state".into()));
        }
        let inv = 1.0 / nrm;
        self.amps.iter_mut().for_each(|a| *a *= inv);
        Ok(())
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &StateVector) -> Result<Complex64> {
        self.same_layout(other)?;
        Ok(self.amps.iter().zip(&other.amps).map(|(a, b)| a.conj() * b).sum())
    }

    /// `‖self - other‖`.
    pub fn distance(&self, other: &StateVector) -> Result<f64> {
        self.same_layout(other)?;
        Ok(self.amps.iter().zip(&other.amps).map(|(a, b)| (a - b).norm_sqr()).sum::<f64>().sqrt())
    }

    pub(crate) fn same_layout(&self, other: &StateVector) -> Result<()> {
        if self.layout != other.layout {
            return Err(Error::Layout(format!("{:?} vs {:?}", self.layout, other.layout)));
        }
        Ok(())
    }

    /// Squared norm outside `R2 = 0̄, R3 = 0, R4 = 0` (R5 unconstrained).
    pub fn ancilla_mass(&self) -> f64 {
        let l = self.layout;
        let r4_mask = l.flag_mask(Flag::R4).unwrap_or(0);
        let mut mass = 0.0;
        for (idx, a) in self.amps.iter().enumerate() {
            let block = idx / l.tail();
            let k = idx % l.tail();
            let r3 = k / l.flag_dim();
            let f = k % l.flag_dim();
            if block % l.n() != 0 || r3 != 0 || f & r4_mask != 0 {
                mass += a.norm_sqr();
            }
        }
        mass
    }

    /// Copy of the `R5 = value` half as a state without R5.
    pub fn r5_slice(&self, value: u8) -> Result<StateVector> {
        if self.layout.flags() != 2 {
            return Err(Error::Layout("R5 is not allocated".into()));
        }
        let sub = self.layout.with_flags(1)?;
        let amps = self.amps.iter().skip(value as usize).step_by(2).copied().collect();
        StateVector::from_amplitudes(sub, amps)
    }

    /// Overwrite the `R5 = value` half from a state without R5.
    pub fn set_r5_slice(&mut self, value: u8, slice: &StateVector) -> Result<()> {
        if self.layout.flags() != 2 || slice.layout != self.layout.with_flags(1)? {
            return Err(Error::Layout("slice does not match the R5 half of this layout".into()));
        }
        for (dst, src) in self.amps.iter_mut().skip(value as usize).step_by(2).zip(&slice.amps) {
            *dst = *src;
        }
        Ok(())
    }
}

/// `|g⟩|0̄⟩|0^τ⟩|0⟩|0⟩`.
pub fn init_state(g: usize, layout: RegisterLayout) -> Result<StateVector> {
    if g >= layout.n() {
        return Err(Error::Domain(format!("vertex {g} out of range for n = {}", layout.n())));
    }
    let mut s = StateVector::zeros(layout);
    let idx = layout.index(g, 0, 0, 0, 0)?;
    s.amps[idx] = Complex64::new(1.0, 0.0);
    Ok(s)
}
