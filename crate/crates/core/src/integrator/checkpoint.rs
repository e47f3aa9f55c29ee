//! Binary field checkpoints.
//!
//! Layout, all little-endian:
//!
//! | bytes | content |
//! |------:|---------|
//! | 4 | magic `FNCK` |
//! | 4 | format version `u32` = 1 |
//! | 4 | representation `u32`: 0 Wigner, 1 positive-P |
//! | 4 | dispersion `u32`: 0 anomalous, 1 normal |
//! | 8 | mode count `M` (`u64`) |
//! | 8 ×3 | τ window, ζ end, dζ (`f64`) |
//! | 8 ×2 | master seed, trajectory index (`u64`) |
//! | 8 | record count (`u64`) |
//!
//! Each record is its ζ (`f64`) followed by `φ` as `M` interleaved
//! `(re, im)` pairs of `f64`, then `φ⁺` the same way for positive-P.

use num_complex::Complex64;
use thiserror::Error;

use super::FieldState;
use crate::grid::{Dispersion, Representation, SimulationGrid};

const MAGIC: &[u8; 4] = b"FNCK";
const VERSION: u32 = 1;
const HEADER: usize = 4 + 4 + 4 + 4 + 8 + 24 + 16 + 8;

#[derive(Debug, Error, PartialEq)]
pub enum CheckpointError {
    #[error("not a checkpoint file (bad magic)")]
    Magic,
    #[error("unsupported checkpoint version {0}")]
    Version(u32),
    #[error("file truncated: need {needed} bytes, have {have}")]
    Truncated { needed: usize, have: usize },
    #[error("{0} trailing bytes after the last record")]
    Trailing(usize),
    #[error("bad header field: {0}")]
    Header(String),
    #[error("record {0} does not match the file's representation or grid")]
    Record(usize),
}

/// One trajectory's checkpoints with the grid they live on.
#[derive(Debug, Clone, PartialEq)]
pub struct CheckpointFile {
    pub grid: SimulationGrid,
    pub trajectory: u64,
    pub states: Vec<FieldState>,
}

impl CheckpointFile {
    fn record_len(&self) -> usize {
        let fields = match self.grid.representation {
            Representation::Wigner => 1,
            Representation::PositiveP => 2,
        };
        8 + 16 * self.grid.modes * fields
    }
}

fn push_field(out: &mut Vec<u8>, field: &[Complex64]) {
    for z in field {
        out.extend_from_slice(&z.re.to_le_bytes());
        out.extend_from_slice(&z.im.to_le_bytes());
    }
}

/// Serializes the file; fails if a state does not fit the grid.
pub fn write_checkpoints(file: &CheckpointFile) -> Result<Vec<u8>, CheckpointError> {
    let g = &file.grid;
    for (i, s) in file.states.iter().enumerate() {
        let plus_ok = match (g.representation, &s.phi_plus) {
            (Representation::Wigner, None) => true,
            (Representation::PositiveP, Some(p)) => p.len() == g.modes,
            _ => false,
        };
        if s.phi.len() != g.modes || !plus_ok {
            return Err(CheckpointError::Record(i));
        }
    }
    let mut out = Vec::with_capacity(HEADER + file.states.len() * file.record_len());
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&VERSION.to_le_bytes());
    let rep: u32 = match g.representation {
        Representation::Wigner => 0,
        Representation::PositiveP => 1,
    };
    let disp: u32 = match g.dispersion {
        Dispersion::Anomalous => 0,
        Dispersion::Normal => 1,
    };
    out.extend_from_slice(&rep.to_le_bytes());
    out.extend_from_slice(&disp.to_le_bytes());
    out.extend_from_slice(&(g.modes as u64).to_le_bytes());
    for v in [g.window, g.zeta_end, g.dzeta] {
        out.extend_from_slice(&v.to_le_bytes());
    }
    out.extend_from_slice(&g.master_seed.to_le_bytes());
    out.extend_from_slice(&file.trajectory.to_le_bytes());
    out.extend_from_slice(&(file.states.len() as u64).to_le_bytes());
    for s in &file.states {
        out.extend_from_slice(&s.zeta.to_le_bytes());
        push_field(&mut out, &s.phi);
        if let Some(p) = &s.phi_plus {
            push_field(&mut out, p);
        }
    }
    Ok(out)
}

struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl Reader<'_> {
    fn take<const N: usize>(&mut self) -> Result<[u8; N], CheckpointError> {
        let end = self.pos + N;
        let slice = self
            .bytes
            .get(self.pos..end)
            .ok_or(CheckpointError::Truncated {
                needed: end,
                have: self.bytes.len(),
            })?;
        self.pos = end;
        Ok(slice.try_into().expect("slice length"))
    }

    fn u32(&mut self) -> Result<u32, CheckpointError> {
        self.take::<4>().map(u32::from_le_bytes)
    }

    fn u64(&mut self) -> Result<u64, CheckpointError> {
        self.take::<8>().map(u64::from_le_bytes)
    }

    fn f64(&mut self) -> Result<f64, CheckpointError> {
        self.take::<8>().map(f64::from_le_bytes)
    }

    fn field(&mut self, m: usize) -> Result<Vec<Complex64>, CheckpointError> {
        (0..m)
            .map(|_| Ok(Complex64::new(self.f64()?, self.f64()?)))
            .collect()
    }
}

/// Parses and validates a checkpoint file.
pub fn read_checkpoints(bytes: &[u8]) -> Result<CheckpointFile, CheckpointError> {
    let mut r = Reader { bytes, pos: 0 };
    if &r.take::<4>()? != MAGIC {
        return Err(CheckpointError::Magic);
    }
    let version = r.u32()?;
    if version != VERSION {
        return Err(CheckpointError::Version(version));
    }
    let representation = match r.u32()? {
        0 => Representation::Wigner,
        1 => Representation::PositiveP,
        v => return Err(CheckpointError::Header(format!("representation code {v}"))),
    };
    let dispersion = match r.u32()? {
        0 => Dispersion::Anomalous,
        1 => Dispersion::Normal,
        v => return Err(CheckpointError::Header(format!("dispersion code {v}"))),
    };
    let modes =
        usize::try_from(r.u64()?).map_err(|_| CheckpointError::Header("mode count".into()))?;
    let window = r.f64()?;
    let zeta_end = r.f64()?;
    let dzeta = r.f64()?;
    let master_seed = r.u64()?;
    let trajectory = r.u64()?;
    let count = r.u64()?;
    let grid = SimulationGrid::new(
        modes,
        window,
        zeta_end,
        dzeta,
        dispersion,
        representation,
        master_seed,
    )
    .map_err(|e| CheckpointError::Header(e.to_string()))?;
    let fields = if representation == Representation::PositiveP {
        2
    } else {
        1
    };
    let needed = modes
        .checked_mul(16 * fields)
        .and_then(|b| b.checked_add(8))
        .and_then(|rec| usize::try_from(count).ok().and_then(|c| rec.checked_mul(c)))
        .and_then(|body| body.checked_add(HEADER))
        .ok_or(CheckpointError::Header("record count overflows".into()))?;
    if bytes.len() < needed {
        return Err(CheckpointError::Truncated {
            needed,
            have: bytes.len(),
        });
    }
    if bytes.len() > needed {
        return Err(CheckpointError::Trailing(bytes.len() - needed));
    }
    let mut states = Vec::with_capacity(count as usize);
    for _ in 0..count {
        let zeta = r.f64()?;
        let phi = r.field(modes)?;
        let phi_plus = match representation {
            Representation::PositiveP => Some(r.field(modes)?),
            Representation::Wigner => None,
        };
        states.push(FieldState {
            phi,
            phi_plus,
            zeta,
        });
    }
    Ok(CheckpointFile {
        grid,
        trajectory,
        states,
    })
}

/// Text index of a checkpoint file: one line per record with its ζ and
/// byte offset.
pub fn checkpoint_index(name: &str, file: &CheckpointFile) -> String {
    let mut out = String::from("file record zeta offset\n");
    let len = file.record_len();
    for (i, s) in file.states.iter().enumerate() {
        out.push_str(&format!(
            "{name} {i} {:.12e} {}\n",
            s.zeta,
            HEADER + i * len
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn file(rep: Representation) -> CheckpointFile {
        let grid = SimulationGrid::new(8, 4.0, 1.0, 0.25, Dispersion::Normal, rep, 99).unwrap();
        let phi: Vec<Complex64> = (0..8)
            .map(|j| Complex64::new(j as f64, -0.5 * j as f64))
            .collect();
        let mut states = vec![
            match rep {
                Representation::Wigner => FieldState::wigner(phi.clone()),
                Representation::PositiveP => FieldState::positive_p(phi.clone()),
            };
            2
        ];
        states[1].zeta = 0.5;
        CheckpointFile {
            grid,
            trajectory: 7,
            states,
        }
    }

    #[test]
    fn round_trip_both_representations() {
        for rep in [Representation::Wigner, Representation::PositiveP] {
            let f = file(rep);
            let bytes = write_checkpoints(&f).unwrap();
            assert_eq!(&bytes[..4], b"FNCK");
            assert_eq!(read_checkpoints(&bytes).unwrap(), f);
            let index = checkpoint_index("traj.bin", &f);
            assert_eq!(index.lines().count(), 3);
            assert!(index
                .lines()
                .nth(2)
                .unwrap()
                .ends_with(&(HEADER + f.record_len()).to_string()));
        }
    }

    #[test]
    fn corrupt_inputs_are_rejected() {
        let bytes = write_checkpoints(&file(Representation::PositiveP)).unwrap();
        assert!(matches!(
            read_checkpoints(&bytes[..bytes.len() - 1]),
            Err(CheckpointError::Truncated { .. })
        ));
        let mut extra = bytes.clone();
        extra.push(0);
        assert_eq!(read_checkpoints(&extra), Err(CheckpointError::Trailing(1)));
        let mut magic = bytes.clone();
        magic[0] = b'X';
        assert_eq!(read_checkpoints(&magic), Err(CheckpointError::Magic));
        let mut huge = bytes.clone();
        huge[HEADER - 8..HEADER].copy_from_slice(&u64::MAX.to_le_bytes());
        assert!(read_checkpoints(&huge).is_err());
        let mut modes = bytes;
        modes[16..24].copy_from_slice(&6u64.to_le_bytes());
        assert!(matches!(
            read_checkpoints(&modes),
            Err(CheckpointError::Header(_))
        ));
        assert!(read_checkpoints(&[]).is_err());
    }

    #[test]
    fn mismatched_state_is_not_written() {
        let mut f = file(Representation::Wigner);
        f.states[1].phi_plus = Some(vec![Complex64::new(0.0, 0.0); 8]);
        assert_eq!(write_checkpoints(&f), Err(CheckpointError::Record(1)));
    }
}
