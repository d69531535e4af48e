//! Interpolation kernels: cubic Hermite along sampled curves and
//! tensor-product Lagrange on grids (value plus gradient).

use crate::grid::Grid2D;

/// Cubic Hermite interpolant through `(t_i, y_i)` with slopes `dy_i`.
#[derive(Debug, Clone)]
pub struct CubicHermite {
    t: Vec<f64>,
    y: Vec<f64>,
    dy: Vec<f64>,
}

impl CubicHermite {
    /// `t` must be strictly increasing; returns `None` otherwise.
    pub fn new(t: Vec<f64>, y: Vec<f64>, dy: Vec<f64>) -> Option<Self> {
        if t.len() < 2 || t.len() != y.len() || t.len() != dy.len() {
            return None;
        }
        if t.windows(2).any(|w| !(w[1] > w[0])) {
            return None;
        }
        Some(Self { t, y, dy })
    }

    pub fn domain(&self) -> (f64, f64) {
        (self.t[0], *self.t.last().unwrap())
    }

    /// Value and first derivative at `s`, `None` outside the sampled range.
    pub fn eval(&self, s: f64) -> Option<(f64, f64)> {
        let (lo, hi) = self.domain();
        if !(s >= lo && s <= hi) {
            return None;
        }
        let k = match self.t.partition_point(|&v| v <= s) {
            0 => 0,
            p => (p - 1).min(self.t.len() - 2),
        };
        let h = self.t[k + 1] - self.t[k];
        let u = (s - self.t[k]) / h;
        let (y0, y1) = (self.y[k], self.y[k + 1]);
        let (m0, m1) = (self.dy[k] * h, self.dy[k + 1] * h);
        let u2 = u * u;
        let u3 = u2 * u;
        let v = (2.0 * u3 - 3.0 * u2 + 1.0) * y0
            + (u3 - 2.0 * u2 + u) * m0
            + (-2.0 * u3 + 3.0 * u2) * y1
            + (u3 - u2) * m1;
        let d = ((6.0 * u2 - 6.0 * u) * y0
            + (3.0 * u2 - 4.0 * u + 1.0) * m0
            + (-6.0 * u2 + 6.0 * u) * y1
            + (3.0 * u2 - 2.0 * u) * m1)
            / h;
        Some((v, d))
    }
}

/// Lagrange weights and derivative weights for `order` equispaced nodes
/// starting at node `start`, evaluated at fractional node position `p`.
fn lagrange_1d(order: usize, start: usize, p: f64, w: &mut [f64], dw: &mut [f64]) {
    for a in 0..order {
        let xa = (start + a) as f64;
        let mut num = 1.0;
        let mut den = 1.0;
        let mut dnum = 0.0;
        for b in 0..order {
            if b == a {
                continue;
            }
            let xb = (start + b) as f64;
            den *= xa - xb;
            // product rule on the running numerator
            dnum = dnum * (p - xb) + num;
            num *= p - xb;
        }
        w[a] = num / den;
        dw[a] = dnum / den;
    }
}

/// Tensor-product Lagrange interpolation of node data on a grid.
#[derive(Debug, Clone, Copy)]
pub struct GridInterpolator {
    pub grid: Grid2D,
    pub order: usize,
}

/// Stencil weights at one evaluation point; reusable across fields.
#[derive(Debug, Clone, Copy)]
pub struct Stencil {
    i0: usize,
    j0: usize,
    n: usize,
    wx: [f64; 8],
    dwx: [f64; 8],
    wy: [f64; 8],
    dwy: [f64; 8],
}

impl GridInterpolator {
    pub fn new(grid: Grid2D, order: usize) -> Self {
        let order = order.clamp(2, 8).min(grid.nx).min(grid.ny);
        Self { grid, order }
    }

    /// Stencil at physical point `(x, y)`; `None` if outside the grid box.
    pub fn stencil(&self, x: f64, y: f64) -> Option<Stencil> {
        let g = &self.grid;
        let px = (x - g.x0) / g.dx;
        let py = (y - g.y0) / g.dy;
        let eps = 1e-9;
        if !(px >= -eps && py >= -eps && px <= (g.nx - 1) as f64 + eps && py <= (g.ny - 1) as f64 + eps) {
            return None;
        }
        let n = self.order;
        let start = |p: f64, len: usize| -> usize {
            let cell = p.floor().max(0.0) as isize;
            let s = cell - (n as isize - 1) / 2;
            s.clamp(0, (len - n) as isize) as usize
        };
        let (i0, j0) = (start(px, g.nx), start(py, g.ny));
        let mut st = Stencil { i0, j0, n, wx: [0.0; 8], dwx: [0.0; 8], wy: [0.0; 8], dwy: [0.0; 8] };
        lagrange_1d(n, i0, px, &mut st.wx, &mut st.dwx);
        lagrange_1d(n, j0, py, &mut st.wy, &mut st.dwy);
        for v in st.dwx.iter_mut().take(n) {
            *v /= g.dx;
        }
        for v in st.dwy.iter_mut().take(n) {
            *v /= g.dy;
        }
        Some(st)
    }

    /// Value and gradient of the interpolant of `data` under `st`.
    pub fn apply(&self, st: &Stencil, data: &[f64]) -> (f64, f64, f64) {
        let nx = self.grid.nx;
        let (mut v, mut vx, mut vy) = (0.0, 0.0, 0.0);
        for b in 0..st.n {
            let row = (st.j0 + b) * nx + st.i0;
            let (mut r, mut rx) = (0.0, 0.0);
            for a in 0..st.n {
                let d = data[row + a];
                r += st.wx[a] * d;
                rx += st.dwx[a] * d;
            }
            v += st.wy[b] * r;
            vx += st.wy[b] * rx;
            vy += st.dwy[b] * r;
        }
        (v, vx, vy)
    }

    /// Whether every node in the stencil satisfies `ok`.
    pub fn stencil_all(&self, st: &Stencil, ok: &[bool]) -> bool {
        let nx = self.grid.nx;
        (0..st.n).all(|b| (0..st.n).all(|a| ok[(st.j0 + b) * nx + st.i0 + a]))
    }
}
