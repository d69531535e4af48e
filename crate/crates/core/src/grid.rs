//! Rectangular node grids and scalar fields sampled on them.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid2D {
    pub x0: f64,
    pub y0: f64,
    pub dx: f64,
    pub dy: f64,
    pub nx: usize,
    pub ny: usize,
}

impl Grid2D {
    pub fn new(x0: f64, y0: f64, dx: f64, dy: f64, nx: usize, ny: usize) -> Result<Self> {
        if !(dx > 0.0 && dy > 0.0 && dx.is_finite() && dy.is_finite()) {
            return Err(Error::InvalidGrid(format!("spacings must be positive, got dx={dx} dy={dy}")));
        }
        if nx < 3 || ny < 3 {
            return Err(Error::InvalidGrid(format!("need at least 3x3 nodes, got {nx}x{ny}")));
        }
        if !(x0.is_finite() && y0.is_finite()) {
            return Err(Error::InvalidGrid("non-finite origin".into()));
        }
        Ok(Self { x0, y0, dx, dy, nx, ny })
    }

    /// Grid spanning `[x_min, x_max] x [y_min, y_max]` with the given node counts.
    pub fn spanning(x_min: f64, x_max: f64, nx: usize, y_min: f64, y_max: f64, ny: usize) -> Result<Self> {
        if nx < 3 || ny < 3 {
            return Err(Error::InvalidGrid(format!("need at least 3x3 nodes, got {nx}x{ny}")));
        }
        Self::new(
            x_min,
            y_min,
            (x_max - x_min) / (nx - 1) as f64,
            (y_max - y_min) / (ny - 1) as f64,
            nx,
            ny,
        )
    }

    /// Same box with every cell split in two.
    pub fn refined(&self) -> Self {
        Self {
            dx: 0.5 * self.dx,
            dy: 0.5 * self.dy,
            nx: 2 * self.nx - 1,
            ny: 2 * self.ny - 1,
            ..*self
        }
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.nx * self.ny
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    #[inline]
    pub fn index(&self, i: usize, j: usize) -> usize {
        j * self.nx + i
    }

    #[inline]
    pub fn coords(&self, k: usize) -> (usize, usize) {
        (k % self.nx, k / self.nx)
    }

    #[inline]
    pub fn x(&self, i: usize) -> f64 {
        self.x0 + i as f64 * self.dx
    }

    #[inline]
    pub fn y(&self, j: usize) -> f64 {
        self.y0 + j as f64 * self.dy
    }

    #[inline]
    pub fn point(&self, k: usize) -> (f64, f64) {
        let (i, j) = self.coords(k);
        (self.x(i), self.y(j))
    }

    pub fn x_max(&self) -> f64 {
        self.x(self.nx - 1)
    }

    pub fn y_max(&self) -> f64 {
        self.y(self.ny - 1)
    }

    /// Nodes at least `ring` nodes away from every edge.
    #[inline]
    pub fn is_inner(&self, k: usize, ring: usize) -> bool {
        let (i, j) = self.coords(k);
        i >= ring && j >= ring && i + ring < self.nx && j + ring < self.ny
    }

    #[inline]
    pub fn is_interior(&self, k: usize) -> bool {
        self.is_inner(k, 1)
    }

    pub fn max_spacing(&self) -> f64 {
        self.dx.max(self.dy)
    }

    /// Sample `f(x, y)` at every node.
    pub fn sample<F: Fn(f64, f64) -> f64 + Sync + Send>(&self, f: F) -> Vec<f64> {
        crate::par::map_indices(self.len(), |k| {
            let (x, y) = self.point(k);
            f(x, y)
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct FieldStats {
    pub max: f64,
    pub rms: f64,
    pub count: usize,
}

impl FieldStats {
    pub fn of<I: IntoIterator<Item = f64>>(values: I) -> Self {
        let (mut max, mut sq, mut count) = (0.0f64, 0.0, 0usize);
        for v in values {
            if v.is_nan() {
                continue;
            }
            max = max.max(v.abs());
            sq += v * v;
            count += 1;
        }
        let rms = if count > 0 { (sq / count as f64).sqrt() } else { 0.0 };
        Self { max, rms, count }
    }
}

/// A scalar field with a per-node validity mask.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarField {
    pub grid: Grid2D,
    pub values: Vec<f64>,
    pub valid: Vec<bool>,
}

impl ScalarField {
    pub fn new(grid: Grid2D, values: Vec<f64>) -> Self {
        let valid = values.iter().map(|v| v.is_finite()).collect();
        Self { grid, values, valid }
    }

    pub fn with_mask(grid: Grid2D, values: Vec<f64>, valid: Vec<bool>) -> Self {
        debug_assert_eq!(values.len(), grid.len());
        debug_assert_eq!(valid.len(), grid.len());
        Self { grid, values, valid }
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[self.grid.index(i, j)]
    }

    /// Statistics over valid nodes; boundary nodes are skipped unless requested.
    pub fn stats(&self, include_boundary: bool) -> FieldStats {
        self.stats_where(|k| include_boundary || self.grid.is_interior(k))
    }

    pub fn stats_where<P: Fn(usize) -> bool>(&self, keep: P) -> FieldStats {
        FieldStats::of(
            self.values
                .iter()
                .enumerate()
                .filter(|&(k, _)| self.valid[k] && keep(k))
                .map(|(_, &v)| v),
        )
    }

    /// Statistics restricted to nodes shared with the grid one refinement
    /// coarser (even indices), so two levels are compared on the same points.
    pub fn stats_on_coarse_nodes(&self, include_boundary: bool) -> FieldStats {
        let g = self.grid;
        self.stats_where(|k| {
            let (i, j) = g.coords(k);
            i % 2 == 0 && j % 2 == 0 && (include_boundary || g.is_inner(k, 2))
        })
    }

    /// Statistics over valid nodes at least `ring` nodes from every edge.
    pub fn stats_inner(&self, ring: usize) -> FieldStats {
        self.stats_where(|k| self.grid.is_inner(k, ring))
    }

    /// Fine-level counterpart of `stats_inner(ring)` on the coarser grid.
    pub fn stats_on_coarse_nodes_inner(&self, ring: usize) -> FieldStats {
        let g = self.grid;
        self.stats_where(|k| {
            let (i, j) = g.coords(k);
            i % 2 == 0 && j % 2 == 0 && g.is_inner(k, 2 * ring)
        })
    }

    pub fn valid_fraction(&self) -> f64 {
        self.valid.iter().filter(|&&v| v).count() as f64 / self.values.len().max(1) as f64
    }
}
