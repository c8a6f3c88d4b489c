use super::layout::{Flag, StateVector};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Pauli {
    X,
    Z,
}

/// Zero-state controls. A gate fires only where every listed register is in
/// its zero state; with nothing listed it is unconditional.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Controls {
    /// R2 equals 0̄.
    pub coin: bool,
    /// All of R3 is zero.
    pub r3: bool,
    pub r4: bool,
    pub r5: bool,
}

impl Controls {
    pub const NONE: Controls = Controls { coin: false, r3: false, r4: false, r5: false };

    pub fn coin() -> Self {
        Controls { coin: true, ..Self::NONE }
    }

    pub fn coin_r3() -> Self {
        Controls { coin: true, r3: true, ..Self::NONE }
    }

    pub fn coin_r3_r4() -> Self {
        Controls { coin: true, r3: true, r4: true, ..Self::NONE }
    }
}

/// Multi-controlled X or Z on a flag register, firing on the all-zero control pattern.
pub fn apply_ctrl_flip(psi: &mut StateVector, controls: Controls, target: Flag, pauli: Pauli) -> Result<()> {
    let l = *psi.layout();
    let t_mask = l.flag_mask(target)?;
    let mut c_mask = 0;
    for (on, f) in [(controls.r4, Flag::R4), (controls.r5, Flag::R5)] {
        if on {
            let m = l.flag_mask(f)?;
            if m == t_mask {
                return Err(Error::Layout(format!("{f:?} cannot control itself")));
            }
            c_mask |= m;
        }
    }
    let n = l.n();
    let tail = l.tail();
    let fdim = l.flag_dim();
    let amps = psi.amplitudes_mut();
    for block in 0..n * n {
        if controls.coin && block % n != 0 {
            continue;
        }
        let r3_count = if controls.r3 { 1 } else { l.r3_dim() };
        for r3 in 0..r3_count {
            let base = block * tail + r3 * fdim;
            for f in 0..fdim {
                if f & c_mask != 0 || f & t_mask != 0 {
                    continue;
                }
                let i0 = base + f;
                let i1 = base + (f | t_mask);
                match pauli {
                    Pauli::X => amps.swap(i0, i1),
                    Pauli::Z => amps[i1] = -amps[i1],
                }
            }
        }
    }
    Ok(())
}

/// Unconditional X on a flag.
pub fn apply_x(psi: &mut StateVector, target: Flag) -> Result<()> {
    apply_ctrl_flip(psi, Controls::NONE, target, Pauli::X)
}
