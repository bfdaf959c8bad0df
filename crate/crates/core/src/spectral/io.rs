//! Trajectory artifacts: a CSV time series and flat little-endian snapshots.
//!
//! Snapshot layout: `dim: u64, n: u64, L: f64, t: f64`, then `re, im` as
//! `f64` pairs in row-major order.

use std::io::{Read, Write};

use num_complex::Complex64;
use serde::Serialize;

use super::{Field, Grid, SpectralError, Trajectory};

pub const CSV_HEADER: &str = "t,mass,l2_norm,linf_norm";

pub fn write_csv(traj: &Trajectory, mut out: impl Write) -> std::io::Result<()> {
    writeln!(out, "{CSV_HEADER}")?;
    for i in 0..traj.times.len() {
        writeln!(out, "{:e},{:e},{:e},{:e}", traj.times[i], traj.mass[i], traj.l2[i], traj.linf[i])?;
    }
    Ok(())
}

pub fn write_snapshot(field: &Field, t: f64, mut out: impl Write) -> std::io::Result<()> {
    let g = &field.grid;
    let mut buf = Vec::with_capacity(32 + 16 * field.data.len());
    buf.extend_from_slice(&(g.dim as u64).to_le_bytes());
    buf.extend_from_slice(&(g.n as u64).to_le_bytes());
    buf.extend_from_slice(&g.length.to_le_bytes());
    buf.extend_from_slice(&t.to_le_bytes());
    for z in &field.data {
        buf.extend_from_slice(&z.re.to_le_bytes());
        buf.extend_from_slice(&z.im.to_le_bytes());
    }
    out.write_all(&buf)
}

/// Inverse of [`write_snapshot`]; returns the field and its time stamp.
pub fn read_snapshot(mut input: impl Read) -> Result<(Field, f64), SpectralError> {
    let mut bytes = Vec::new();
    input.read_to_end(&mut bytes)?;
    if bytes.len() < 32 {
        return Err(SpectralError::InvalidGrid("snapshot shorter than its header".into()));
    }
    let word = |i: usize| -> [u8; 8] { bytes[8 * i..8 * i + 8].try_into().unwrap() };
    let dim = u64::from_le_bytes(word(0)) as usize;
    let n = u64::from_le_bytes(word(1)) as usize;
    let length = f64::from_le_bytes(word(2));
    let t = f64::from_le_bytes(word(3));
    let grid = Grid::new(dim, n, length)?;
    if bytes.len() != 32 + 16 * grid.len() {
        return Err(SpectralError::InvalidGrid(format!(
            "snapshot holds {} bytes, expected {}",
            bytes.len(),
            32 + 16 * grid.len()
        )));
    }
    let data = (0..grid.len())
        .map(|k| Complex64::new(f64::from_le_bytes(word(4 + 2 * k)), f64::from_le_bytes(word(5 + 2 * k))))
        .collect();
    Ok((Field::from_data(grid, data), t))
}

/// JSON sidecar describing one snapshot file.
#[derive(Debug, Clone, Serialize)]
pub struct SnapshotMeta {
    pub file: String,
    pub step: usize,
    pub t: f64,
    pub dim: usize,
    pub n: usize,
    pub box_length: f64,
    pub layout: &'static str,
    pub mass: f64,
}

impl SnapshotMeta {
    pub fn new(file: impl Into<String>, step: usize, t: f64, field: &Field) -> Self {
        SnapshotMeta {
            file: file.into(),
            step,
            t,
            dim: field.grid.dim,
            n: field.grid.n,
            box_length: field.grid.length,
            layout: "header u64 dim, u64 n, f64 L, f64 t; then f64 (re, im) pairs, row-major, little-endian",
            mass: field.mass(),
        }
    }
}
