//! Uniform cell-centred square grid on `[-L, L]²`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Smallest grid the fourth-order stencils and the support guard make sense on.
pub const MIN_CELLS: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid2D {
    pub half_width: f64,
    pub n: usize,
    pub h: f64,
}

impl Grid2D {
    pub fn new(half_width: f64, n: usize) -> Result<Self> {
        if !(half_width > 0.0 && half_width.is_finite()) {
            return Err(Error::param("half_width", format!("must be positive, got {half_width}")));
        }
        if n < MIN_CELLS {
            return Err(Error::param("n", format!("need at least {MIN_CELLS} cells per axis, got {n}")));
        }
        Ok(Self {
            half_width,
            n,
            h: 2.0 * half_width / n as f64,
        })
    }

    pub fn len(&self) -> usize {
        self.n * self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    /// Cell centre coordinate for index `i` along either axis.
    pub fn coord(&self, i: usize) -> f64 {
        -self.half_width + (i as f64 + 0.5) * self.h
    }

    /// Row-major index of cell `(i, j)`: `i` along `x1`, `j` along `x2`.
    pub fn idx(&self, i: usize, j: usize) -> usize {
        j * self.n + i
    }

    pub fn point(&self, k: usize) -> (f64, f64) {
        (self.coord(k % self.n), self.coord(k / self.n))
    }

    pub fn cell_area(&self) -> f64 {
        self.h * self.h
    }

    /// Samples `f(x1, x2)` at every cell centre.
    pub fn sample<F: Fn(f64, f64) -> f64 + Sync>(&self, f: F) -> Vec<f64> {
        use rayon::prelude::*;
        let mut out = vec![0.0; self.len()];
        out.par_chunks_mut(self.n).enumerate().for_each(|(j, row)| {
            let y = self.coord(j);
            for (i, v) in row.iter_mut().enumerate() {
                *v = f(self.coord(i), y);
            }
        });
        out
    }
}
