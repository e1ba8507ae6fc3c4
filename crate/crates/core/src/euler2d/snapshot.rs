//! Flat binary field snapshots.
//!
//! Layout, all little-endian: magic `DEL1`, `u32 n`, `f64 L`, `f64 t`, then
//! `3·n²` `f64` values: θ, u₁, u₂, each row-major with `x1` fastest.

use std::fs;
use std::path::Path;

use super::grid::Grid2D;
use super::state::FlowState2D;
use crate::error::{Error, Result};

pub const MAGIC: &[u8; 4] = b"DEL1";
const HEADER_LEN: usize = 4 + 4 + 8 + 8;

pub fn encode(state: &FlowState2D, grid: &Grid2D) -> Vec<u8> {
    let mut out = Vec::with_capacity(HEADER_LEN + 24 * grid.len());
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&(grid.n as u32).to_le_bytes());
    out.extend_from_slice(&grid.half_width.to_le_bytes());
    out.extend_from_slice(&state.t.to_le_bytes());
    for field in state.fields() {
        for v in field {
            out.extend_from_slice(&v.to_le_bytes());
        }
    }
    out
}

pub fn decode(bytes: &[u8], path: &Path) -> Result<(FlowState2D, Grid2D)> {
    let bad = |reason: String| Error::Snapshot {
        path: path.to_path_buf(),
        reason,
    };
    if bytes.len() < HEADER_LEN || &bytes[..4] != MAGIC {
        return Err(bad("missing DEL1 header".into()));
    }
    let n = u32::from_le_bytes(bytes[4..8].try_into().expect("4 bytes")) as usize;
    let half = f64::from_le_bytes(bytes[8..16].try_into().expect("8 bytes"));
    let t = f64::from_le_bytes(bytes[16..24].try_into().expect("8 bytes"));
    let expected = HEADER_LEN + 24 * n * n;
    if bytes.len() != expected {
        return Err(bad(format!("expected {expected} bytes for n = {n}, found {}", bytes.len())));
    }
    let grid = Grid2D::new(half, n).map_err(|e| bad(e.to_string()))?;
    let mut fields = bytes[HEADER_LEN..]
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().expect("8 bytes")));
    let mut take = || (&mut fields).take(n * n).collect::<Vec<f64>>();
    let (theta, u1, u2) = (take(), take(), take());
    Ok((FlowState2D { t, theta, u1, u2 }, grid))
}

pub fn write(path: &Path, state: &FlowState2D, grid: &Grid2D) -> Result<()> {
    fs::write(path, encode(state, grid))?;
    Ok(())
}

pub fn read(path: &Path) -> Result<(FlowState2D, Grid2D)> {
    decode(&fs::read(path)?, path)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_is_bit_exact() {
        let g = Grid2D::new(3.5, 16).unwrap();
        let mut s = FlowState2D::zeros(&g);
        s.t = 1.25;
        s.theta = g.sample(|x, y| (x * y).sin());
        s.u1 = g.sample(|x, _| x.exp());
        s.u2 = g.sample(|_, y| -y);
        let bytes = encode(&s, &g);
        assert_eq!(&bytes[..4], b"DEL1");
        assert_eq!(bytes.len(), 24 + 24 * 256);
        let (back, g2) = decode(&bytes, Path::new("mem")).unwrap();
        assert_eq!(back, s);
        assert_eq!(g2, g);
    }

    #[test]
    fn rejects_truncated_and_foreign_files() {
        let g = Grid2D::new(1.0, 16).unwrap();
        let bytes = encode(&FlowState2D::zeros(&g), &g);
        assert!(decode(&bytes[..bytes.len() - 1], Path::new("x")).is_err());
        let mut other = bytes.clone();
        other[0] = b'X';
        assert!(decode(&other, Path::new("x")).is_err());
    }
}
