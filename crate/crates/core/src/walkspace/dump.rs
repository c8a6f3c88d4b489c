//! Binary state dumps.
//!
//! A dump is the text line `QSV1 n tau flags\n` followed by every amplitude
//! as a little-endian `f64` pair `(re, im)` in index order.

use std::io::{BufRead, Write};

use num_complex::Complex64;

use super::layout::{RegisterLayout, StateVector};
use crate::error::{Error, Result};

const MAGIC: &str = "QSV1";

pub fn write_state(psi: &StateVector, mut w: impl Write) -> Result<()> {
    let l = psi.layout();
    writeln!(w, "{MAGIC} {} {} {}", l.n(), l.tau(), l.flags())?;
    let mut buf = Vec::with_capacity(16 * psi.amplitudes().len());
    for a in psi.amplitudes() {
        buf.extend_from_slice(&a.re.to_le_bytes());
        buf.extend_from_slice(&a.im.to_le_bytes());
    }
    w.write_all(&buf)?;
    Ok(())
}

pub fn read_state(mut r: impl BufRead) -> Result<StateVector> {
    let mut header = String::new();
    r.read_line(&mut header)?;
    let fields: Vec<&str> = header.split_whitespace().collect();
    if fields.len() != 4 || fields[0] != MAGIC {
        return Err(Error::Dump(format!("bad header `{}`", header.trim_end())));
    }
    let num = |s: &str| s.parse::<u64>().map_err(|_| Error::Dump(format!("`{s}` is not a number")));
    let layout = RegisterLayout::new(num(fields[1])? as usize, num(fields[2])? as u32, num(fields[3])? as u8)?;
    let mut bytes = Vec::new();
    r.read_to_end(&mut bytes)?;
    if bytes.len() != 16 * layout.dim() {
        return Err(Error::Dump(format!("expected {} bytes of amplitudes, found {}", 16 * layout.dim(), bytes.len())));
    }
    let amps = bytes
        .chunks_exact(16)
        .map(|c| {
            let re = f64::from_le_bytes(c[..8].try_into().unwrap());
            let im = f64::from_le_bytes(c[8..].try_into().unwrap());
            Complex64::new(re, im)
        })
        .collect();
    StateVector::from_amplitudes(layout, amps)
}
