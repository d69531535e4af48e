//! Resampling the image of a pair as a graph over a regular grid.
//!
//! The map (x, y) ↦ (Φ_x, Φ_y) is inverted by Newton's method on a sixth-order
//! tensor Lagrange interpolant of the potential gradient, and the image height
//! is interpolated at the preimage with the same stencil. Linear interpolation
//! would leave O(h²) kinks that finite-difference curvature amplifies to O(1).

use super::transform::CalabiPair;
use crate::diffgeom::GraphSurface;
use crate::error::{Error, Result};
use crate::grid::Grid2D;
use crate::interp::{GridInterpolator, Stencil};

pub const INTERPOLATION_ORDER: usize = 6;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResampleOptions {
    /// Fraction of the inscribed box trimmed from each side.
    pub margin: f64,
    /// Lower bound on the trim, in target cells.
    pub min_margin_cells: usize,
    /// Target node counts; `None` keeps the source counts.
    pub nx: Option<usize>,
    pub ny: Option<usize>,
}

impl Default for ResampleOptions {
    fn default() -> Self {
        Self { margin: 0.1, min_margin_cells: 4, nx: None, ny: None }
    }
}

impl ResampleOptions {
    pub fn exact_box() -> Self {
        Self { margin: 0.0, min_margin_cells: 0, nx: None, ny: None }
    }
}

/// Signed areas of the two image triangles of every source cell must be
/// positive; otherwise the projection folds.
pub fn check_fold_over(p: &CalabiPair) -> Result<()> {
    let g = p.source.grid;
    let mut bad = Vec::new();
    let area = |a: [f64; 3], b: [f64; 3], c: [f64; 3]| (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0]);
    for j in 0..g.ny - 1 {
        for i in 0..g.nx - 1 {
            let ks = [g.index(i, j), g.index(i + 1, j), g.index(i + 1, j + 1), g.index(i, j + 1)];
            if !ks.iter().all(|&k| p.valid[k]) {
                continue;
            }
            let q = ks.map(|k| p.image_points[k]);
            if area(q[0], q[1], q[2]) <= 0.0 || area(q[0], q[2], q[3]) <= 0.0 {
                bad.push((i, j));
            }
        }
    }
    if bad.is_empty() {
        Ok(())
    } else {
        Err(Error::FoldOver { cells: bad })
    }
}

/// Rectangle inscribed in the projected image of the source box, trimmed.
pub fn image_box(p: &CalabiPair, opts: &ResampleOptions) -> Result<Grid2D> {
    let g = p.source.grid;
    let nx = opts.nx.unwrap_or(g.nx);
    let ny = opts.ny.unwrap_or(g.ny);
    let pt = |i: usize, j: usize| -> Option<[f64; 3]> {
        let k = g.index(i, j);
        p.valid[k].then(|| p.image_points[k])
    };
    let fold = |it: &mut dyn Iterator<Item = Option<[f64; 3]>>, c: usize, take_max: bool| -> f64 {
        let vals = it.flatten().map(|q| q[c]);
        if take_max {
            vals.fold(f64::NEG_INFINITY, f64::max)
        } else {
            vals.fold(f64::INFINITY, f64::min)
        }
    };
    let x_lo = fold(&mut (0..g.ny).map(|j| pt(0, j)), 0, true);
    let x_hi = fold(&mut (0..g.ny).map(|j| pt(g.nx - 1, j)), 0, false);
    let y_lo = fold(&mut (0..g.nx).map(|i| pt(i, 0)), 1, true);
    let y_hi = fold(&mut (0..g.nx).map(|i| pt(i, g.ny - 1)), 1, false);
    let (wx, wy) = (x_hi - x_lo, y_hi - y_lo);
    if !(wx > 0.0 && wy > 0.0) {
        return Err(Error::InvalidGrid(format!("image has no inscribed box ([{x_lo}, {x_hi}] x [{y_lo}, {y_hi}])")));
    }
    let mx = (opts.margin * wx).max(opts.min_margin_cells as f64 * wx / (nx - 1) as f64);
    let my = (opts.margin * wy).max(opts.min_margin_cells as f64 * wy / (ny - 1) as f64);
    if 2.0 * mx >= wx || 2.0 * my >= wy {
        return Err(Error::InvalidGrid("margin leaves an empty resampling box".into()));
    }
    Grid2D::spanning(x_lo + mx, x_hi - mx, nx, y_lo + my, y_hi - my, ny)
}

struct Inverter<'a> {
    interp: GridInterpolator,
    px: &'a [f64],
    py: &'a [f64],
    ok: &'a [bool],
}

impl Inverter<'_> {
    fn eval(&self, x: f64, y: f64) -> Option<(Stencil, [f64; 6])> {
        let st = self.interp.stencil(x, y)?;
        if !self.interp.stencil_all(&st, self.ok) {
            return None;
        }
        let (a, ax, ay) = self.interp.apply(&st, self.px);
        let (b, bx, by) = self.interp.apply(&st, self.py);
        Some((st, [a, ax, ay, b, bx, by]))
    }

    fn solve(&self, target: [f64; 2], start: [f64; 2]) -> Option<[f64; 2]> {
        let scale = 1.0 + target[0].abs() + target[1].abs();
        let (mut x, mut y) = (start[0], start[1]);
        let (_, mut v) = self.eval(x, y)?;
        let res = |v: &[f64; 6]| [v[0] - target[0], v[3] - target[1]];
        let norm = |r: [f64; 2]| r[0].hypot(r[1]);
        for _ in 0..60 {
            let r = res(&v);
            if norm(r) <= 1e-13 * scale {
                return Some([x, y]);
            }
            let det = v[1] * v[5] - v[2] * v[4];
            if !(det.abs() > 0.0) {
                return None;
            }
            let sx = -(v[5] * r[0] - v[2] * r[1]) / det;
            let sy = -(-v[4] * r[0] + v[1] * r[1]) / det;
            let mut t = 1.0;
            loop {
                if let Some((_, nv)) = self.eval(x + t * sx, y + t * sy) {
                    if norm(res(&nv)) < norm(r) {
                        x += t * sx;
                        y += t * sy;
                        v = nv;
                        break;
                    }
                }
                t *= 0.5;
                if t < 1e-8 {
                    // stalled at roundoff: accept if already tight
                    return (norm(r) <= 1e-10 * scale).then_some([x, y]);
                }
            }
        }
        (norm(res(&v)) <= 1e-10 * scale).then_some([x, y])
    }
}

/// Preimage (x, y) on the source grid of every target node, where it exists.
pub fn locate_preimages(p: &CalabiPair, target: &Grid2D) -> Vec<Option<[f64; 2]>> {
    let g = p.source.grid;
    let px: Vec<f64> = p.image_points.iter().map(|q| q[0]).collect();
    let py: Vec<f64> = p.image_points.iter().map(|q| q[1]).collect();
    let inv = Inverter { interp: GridInterpolator::new(g, INTERPOLATION_ORDER), px: &px, py: &py, ok: &p.valid };
    let nearest = |xy: [f64; 2]| -> [f64; 2] {
        let mut best = (f64::INFINITY, 0usize);
        for k in 0..g.len() {
            if p.valid[k] {
                let d = (px[k] - xy[0]).powi(2) + (py[k] - xy[1]).powi(2);
                if d < best.0 {
                    best = (d, k);
                }
            }
        }
        let (x, y) = g.point(best.1);
        [x, y]
    };
    let rows: Vec<Vec<Option<[f64; 2]>>> = crate::par::map_indices(target.ny, |j| {
        let mut out = Vec::with_capacity(target.nx);
        let mut prev: Option<[f64; 2]> = None;
        for i in 0..target.nx {
            let xy = [target.x(i), target.y(j)];
            let sol = prev
                .and_then(|s| inv.solve(xy, s))
                .or_else(|| inv.solve(xy, nearest(xy)));
            if sol.is_some() {
                prev = sol;
            }
            out.push(sol);
        }
        out
    });
    rows.into_iter().flatten().collect()
}

/// Interpolate a source-grid field at the given preimages.
pub fn interpolate_at(p: &CalabiPair, field: &[f64], pre: &[Option<[f64; 2]>]) -> Vec<f64> {
    let interp = GridInterpolator::new(p.source.grid, INTERPOLATION_ORDER);
    crate::par::map_indices(pre.len(), |k| match pre[k] {
        Some([x, y]) => interp
            .stencil(x, y)
            .filter(|st| interp.stencil_all(st, &p.valid))
            .map(|st| interp.apply(&st, field).0)
            .unwrap_or(f64::NAN),
        None => f64::NAN,
    })
}

/// The image as a graph over `target`; nodes without a preimage are masked.
pub fn resample_onto(p: &CalabiPair, target: &Grid2D) -> Result<GraphSurface> {
    check_fold_over(p)?;
    let pre = locate_preimages(p, target);
    let u = interpolate_at(p, &p.image_height(), &pre);
    GraphSurface::new(*target, u, p.direction.image_signature())
}

/// The image as a graph over its trimmed inscribed box.
pub fn resample_image_graph(p: &CalabiPair, opts: &ResampleOptions) -> Result<GraphSurface> {
    let target = image_box(p, opts)?;
    resample_onto(p, &target)
}
