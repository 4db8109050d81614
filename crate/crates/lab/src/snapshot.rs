//! Binary snapshot files.
//!
//! Layout, all little-endian: magic `MHDS`, `u32` version, `u32` dimension,
//! `u32` points per axis, `f64` time, `u32` field count, then each field's
//! physical samples as `f64` in row-major order. An MHD state is stored as
//! the components of `u` followed by the components of `b`.

use std::fs;
use std::path::Path;

use mhdlab_core::solver::MHDState;
use mhdlab_core::{make_grid, SpectralField, VectorField};

use crate::error::{LabError, SnapshotError};

pub const MAGIC: [u8; 4] = *b"MHDS";
pub const VERSION: u32 = 1;
const HEADER_LEN: usize = 4 + 4 + 4 + 4 + 8 + 4;

/// Decoded snapshot: scalar fields sampled on a `dim`-dimensional grid.
#[derive(Debug, Clone, PartialEq)]
pub struct SnapshotFile {
    pub dim: u32,
    pub n: u32,
    pub time: f64,
    pub fields: Vec<Vec<f64>>,
}

impl SnapshotFile {
    pub fn from_state(state: &MHDState) -> Self {
        let grid = state.grid();
        let fields = state
            .u
            .components()
            .iter()
            .chain(state.b.components())
            .map(|c| c.values().into_owned())
            .collect();
        Self {
            dim: grid.dim() as u32,
            n: grid.n() as u32,
            time: state.t,
            fields,
        }
    }

    /// Splits the fields into `u` and `b` without checking the divergence.
    pub fn vector_fields(&self) -> Result<(VectorField, VectorField), SnapshotError> {
        let d = self.dim as usize;
        if self.fields.len() != 2 * d {
            return Err(SnapshotError::FieldCount(self.fields.len() as u32));
        }
        let grid = make_grid(d, self.n as usize)?;
        let comps = self
            .fields
            .iter()
            .map(|v| SpectralField::from_values(&grid, v.clone()))
            .collect::<Result<Vec<_>, _>>()?;
        let (u, b) = comps.split_at(d);
        Ok((VectorField::new(u.to_vec())?, VectorField::new(b.to_vec())?))
    }

    /// The stored state, certified divergence-free.
    pub fn to_state(&self) -> Result<MHDState, LabError> {
        let (u, b) = self.vector_fields()?;
        Ok(MHDState::new(u, b, self.time)?)
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let samples: usize = self.fields.iter().map(Vec::len).sum();
        let mut out = Vec::with_capacity(HEADER_LEN + 8 * samples);
        out.extend_from_slice(&MAGIC);
        out.extend_from_slice(&VERSION.to_le_bytes());
        out.extend_from_slice(&self.dim.to_le_bytes());
        out.extend_from_slice(&self.n.to_le_bytes());
        out.extend_from_slice(&self.time.to_le_bytes());
        out.extend_from_slice(&(self.fields.len() as u32).to_le_bytes());
        for x in self.fields.iter().flatten() {
            out.extend_from_slice(&x.to_le_bytes());
        }
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self, SnapshotError> {
        if bytes.len() < 4 {
            return Err(SnapshotError::Truncated);
        }
        if bytes[..4] != MAGIC {
            return Err(SnapshotError::BadMagic);
        }
        if bytes.len() < HEADER_LEN {
            return Err(SnapshotError::Truncated);
        }
        let word = |at: usize| u32::from_le_bytes(bytes[at..at + 4].try_into().expect("4 bytes"));
        let version = word(4);
        if version != VERSION {
            return Err(SnapshotError::UnsupportedVersion(version));
        }
        let (dim, n) = (word(8), word(12));
        let time = f64::from_le_bytes(bytes[16..24].try_into().expect("8 bytes"));
        let count = word(24);
        make_grid(dim as usize, n as usize)?;
        let len = (n as usize).pow(dim);
        let payload = &bytes[HEADER_LEN..];
        let expected = count as usize * len * 8;
        if payload.len() != expected {
            return Err(SnapshotError::PayloadLength {
                expected,
                found: payload.len(),
            });
        }
        let fields = payload
            .chunks_exact(len * 8)
            .map(|field| {
                field
                    .chunks_exact(8)
                    .map(|b| f64::from_le_bytes(b.try_into().expect("8 bytes")))
                    .collect()
            })
            .collect();
        Ok(Self {
            dim,
            n,
            time,
            fields,
        })
    }

    pub fn save(&self, path: &Path) -> Result<(), LabError> {
        fs::write(path, self.to_bytes()).map_err(LabError::file(path))
    }

    pub fn load(path: &Path) -> Result<Self, LabError> {
        let bytes = fs::read(path).map_err(LabError::file(path))?;
        Self::from_bytes(&bytes).map_err(|source| LabError::Snapshot {
            path: path.to_path_buf(),
            source,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> SnapshotFile {
        SnapshotFile {
            dim: 2,
            n: 8,
            time: 0.25,
            fields: (0..4)
                .map(|f| (0..64).map(|i| (f * 64 + i) as f64 * 0.1).collect())
                .collect(),
        }
    }

    #[test]
    fn header_layout() {
        let bytes = sample().to_bytes();
        assert_eq!(&bytes[..4], b"MHDS");
        assert_eq!(bytes.len(), HEADER_LEN + 4 * 64 * 8);
        assert_eq!(u32::from_le_bytes(bytes[24..28].try_into().unwrap()), 4);
    }

    #[test]
    fn rejects_damage() {
        let mut bytes = sample().to_bytes();
        assert!(matches!(
            SnapshotFile::from_bytes(&bytes[..bytes.len() - 8]),
            Err(SnapshotError::PayloadLength { .. })
        ));
        bytes[0] = b'X';
        assert!(matches!(
            SnapshotFile::from_bytes(&bytes),
            Err(SnapshotError::BadMagic)
        ));
        assert!(matches!(
            SnapshotFile::from_bytes(b"MHDS\x01"),
            Err(SnapshotError::Truncated)
        ));
    }
}
