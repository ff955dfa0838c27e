//! Binary snapshot files.
//!
//! Layout, all little-endian:
//!
//! | field      | type      |
//! |------------|-----------|
//! | magic      | `b"BULB"` |
//! | version    | u32       |
//! | N          | u32       |
//! | p          | f64       |
//! | geometry   | u8        |
//! | R          | f64       |
//! | boundary   | u8        |
//! | t          | f64       |
//! | frame kind | u8        |
//! | node count | u64       |
//! | values     | f64 × node count |
//!
//! Physical snapshots use the geometry and boundary codes of `bulb_core`. For similarity frames
//! the geometry byte records the grid layout (0: half-line `[0, R]`, 1: full line `[-R, R]`),
//! `R` is the frame's `y_max`, `t` its similarity time and the boundary byte is 0.
//! There is no checksum; the file length must match the header exactly.

use std::path::Path;
use std::sync::Arc;

use bulb_core::core::{build_grid, Boundary, Geometry, GridKind, InitialData, ProblemSpec, Snapshot};
use bulb_core::similarity::{FrameSource, SimilarityFrame};

use crate::error::{CliError, Result};
use crate::output::write_atomic;

pub const MAGIC: &[u8; 4] = b"BULB";
pub const VERSION: u32 = 1;
const HEADER_LEN: usize = 4 + 4 + 4 + 8 + 1 + 8 + 1 + 8 + 1 + 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FrameKind {
    Physical,
    WFrame,
    VnFrame,
}

impl FrameKind {
    fn code(self) -> u8 {
        match self {
            FrameKind::Physical => 0,
            FrameKind::WFrame => 1,
            FrameKind::VnFrame => 2,
        }
    }

    fn from_code(code: u8) -> Option<Self> {
        Some(match code {
            0 => FrameKind::Physical,
            1 => FrameKind::WFrame,
            2 => FrameKind::VnFrame,
            _ => return None,
        })
    }
}

/// The decoded contents of a snapshot file.
#[derive(Debug, Clone, PartialEq)]
pub struct SnapshotFile {
    pub dim: u32,
    pub p: f64,
    pub geometry: u8,
    pub radius: f64,
    pub boundary: u8,
    pub time: f64,
    pub kind: FrameKind,
    pub values: Vec<f64>,
}

impl SnapshotFile {
    pub fn from_snapshot(snapshot: &Snapshot) -> Self {
        let spec = &snapshot.spec;
        Self {
            dim: spec.dim as u32,
            p: spec.p,
            geometry: spec.geometry.code(),
            radius: spec.radius(),
            boundary: spec.boundary.code(),
            time: snapshot.time,
            kind: FrameKind::Physical,
            values: snapshot.values.clone(),
        }
    }

    pub fn from_frame(frame: &SimilarityFrame) -> Self {
        let kind = match frame.source {
            FrameSource::VnFrame { .. } => FrameKind::VnFrame,
            _ => FrameKind::WFrame,
        };
        Self {
            dim: frame.dim as u32,
            p: frame.p,
            geometry: u8::from(frame.grid.kind == GridKind::Line),
            radius: frame.grid.radius,
            boundary: 0,
            time: frame.s,
            kind,
            values: frame.values.clone(),
        }
    }

    /// Rebuilds a physical snapshot. Its initial data is the stored profile itself, so a run
    /// started from the result continues from this state.
    pub fn to_snapshot(&self) -> Result<Snapshot> {
        if self.kind != FrameKind::Physical {
            return Err(CliError::Format(format!("file holds a {:?} frame, not a physical snapshot", self.kind)));
        }
        let geometry = Geometry::from_code(self.geometry, self.radius)
            .ok_or_else(|| CliError::Format(format!("unknown geometry code {}", self.geometry)))?;
        let boundary = Boundary::from_code(self.boundary)
            .ok_or_else(|| CliError::Format(format!("unknown boundary code {}", self.boundary)))?;
        let bad = |e: bulb_core::Error| CliError::Format(e.to_string());
        let mut spec = ProblemSpec {
            dim: self.dim as usize,
            p: self.p,
            geometry,
            boundary,
            initial: InitialData::Constant { value: 0.0 },
        };
        let grid = build_grid(&spec, self.values.len()).map_err(bad)?;
        spec.initial = InitialData::Table { radii: grid.nodes().to_vec(), values: self.values.clone() };
        spec.validate().map_err(bad)?;
        Snapshot::new(grid, self.values.clone(), self.time, Arc::new(spec), 0).map_err(bad)
    }

    pub fn encode(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(HEADER_LEN + 8 * self.values.len());
        out.extend_from_slice(MAGIC);
        out.extend_from_slice(&VERSION.to_le_bytes());
        out.extend_from_slice(&self.dim.to_le_bytes());
        out.extend_from_slice(&self.p.to_le_bytes());
        out.push(self.geometry);
        out.extend_from_slice(&self.radius.to_le_bytes());
        out.push(self.boundary);
        out.extend_from_slice(&self.time.to_le_bytes());
        out.push(self.kind.code());
        out.extend_from_slice(&(self.values.len() as u64).to_le_bytes());
        for v in &self.values {
            out.extend_from_slice(&v.to_le_bytes());
        }
        out
    }

    pub fn decode(bytes: &[u8]) -> Result<Self> {
        if bytes.len() < 8 {
            return Err(CliError::Format(format!(
                "truncated header: expected at least {HEADER_LEN} bytes, found {}",
                bytes.len()
            )));
        }
        if &bytes[..4] != MAGIC {
            return Err(CliError::Format(format!("bad magic {:?}, expected \"BULB\"", &bytes[..4])));
        }
        let mut cur = Cursor { bytes, pos: 4 };
        let version = cur.u32();
        if version != VERSION {
            return Err(CliError::Format(format!(
                "unsupported version {version} (this build reads version {VERSION})"
            )));
        }
        if bytes.len() < HEADER_LEN {
            return Err(CliError::Format(format!(
                "truncated header: expected {HEADER_LEN} bytes, found {}",
                bytes.len()
            )));
        }
        let dim = cur.u32();
        let p = cur.f64();
        let geometry = cur.u8();
        let radius = cur.f64();
        let boundary = cur.u8();
        let time = cur.f64();
        let kind_code = cur.u8();
        let kind = FrameKind::from_code(kind_code)
            .ok_or_else(|| CliError::Format(format!("unknown frame kind {kind_code}")))?;
        let count = cur.u64();
        let expected = count
            .checked_mul(8)
            .and_then(|b| b.checked_add(HEADER_LEN as u64))
            .ok_or_else(|| CliError::Format(format!("node count {count} is too large")))?;
        if bytes.len() as u64 != expected {
            return Err(CliError::Format(format!(
                "length mismatch: expected {expected} bytes for {count} nodes, found {}",
                bytes.len()
            )));
        }
        let values = (0..count).map(|_| cur.f64()).collect();
        Ok(Self { dim, p, geometry, radius, boundary, time, kind, values })
    }
}

struct Cursor<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl Cursor<'_> {
    fn take<const K: usize>(&mut self) -> [u8; K] {
        let out = self.bytes[self.pos..self.pos + K].try_into().expect("length checked");
        self.pos += K;
        out
    }

    fn u8(&mut self) -> u8 {
        self.take::<1>()[0]
    }

    fn u32(&mut self) -> u32 {
        u32::from_le_bytes(self.take())
    }

    fn u64(&mut self) -> u64 {
        u64::from_le_bytes(self.take())
    }

    fn f64(&mut self) -> f64 {
        f64::from_le_bytes(self.take())
    }
}

pub fn write_snapshot_file(file: &SnapshotFile, path: &Path) -> Result<()> {
    write_atomic(path, &file.encode())
}

pub fn write_snapshot(snapshot: &Snapshot, path: &Path) -> Result<()> {
    write_snapshot_file(&SnapshotFile::from_snapshot(snapshot), path)
}

pub fn read_snapshot_file(path: &Path) -> Result<SnapshotFile> {
    let bytes = std::fs::read(path).map_err(|e| CliError::io(path, e))?;
    SnapshotFile::decode(&bytes)
}

pub fn read_snapshot(path: &Path) -> Result<Snapshot> {
    read_snapshot_file(path)?.to_snapshot()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> SnapshotFile {
        SnapshotFile {
            dim: 3,
            p: 7.0,
            geometry: 1,
            radius: 2.5,
            boundary: 1,
            time: 0.125,
            kind: FrameKind::Physical,
            values: vec![1.0, -0.0, f64::MIN_POSITIVE, 3.5e300],
        }
    }

    #[test]
    fn header_length() {
        assert_eq!(sample().encode().len(), HEADER_LEN + 32);
        assert_eq!(HEADER_LEN, 47);
    }

    #[test]
    fn bad_magic() {
        let mut b = sample().encode();
        b[0] = b'X';
        assert!(SnapshotFile::decode(&b).unwrap_err().to_string().contains("magic"));
    }

    #[test]
    fn version_mismatch() {
        let mut b = sample().encode();
        b[4..8].copy_from_slice(&99u32.to_le_bytes());
        let e = SnapshotFile::decode(&b).unwrap_err().to_string();
        assert!(e.contains("version 99"), "{e}");
    }

    #[test]
    fn truncated_payload_names_both_lengths() {
        let b = sample().encode();
        let e = SnapshotFile::decode(&b[..b.len() - 3]).unwrap_err().to_string();
        assert!(e.contains(&format!("expected {}", b.len())) && e.contains(&format!("found {}", b.len() - 3)), "{e}");
        let e = SnapshotFile::decode(&b[..20]).unwrap_err().to_string();
        assert!(e.contains("truncated header"), "{e}");
        let mut longer = b.clone();
        longer.push(0);
        assert!(SnapshotFile::decode(&longer).is_err());
    }

    #[test]
    fn frames_are_not_snapshots() {
        let mut f = sample();
        f.kind = FrameKind::WFrame;
        assert!(f.to_snapshot().is_err());
    }
}
