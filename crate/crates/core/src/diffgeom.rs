//! Finite-difference geometry of height-field graphs in R³ and L³.
//!
//! Lorentzian quantities use ⟪a,b⟫ = a₁b₁ + a₂b₂ − a₃b₃. Mean curvature is
//! stored as the scalar h with 𝐇 = h·N for the stored normal N.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{Grid2D, ScalarField};
use crate::weights::WeightFunction;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Signature {
    Euclidean,
    Lorentzian,
}

/// Share of nodes allowed to fail the spacelike test before geometry errors out.
pub const SPACELIKE_FAILURE_LIMIT: f64 = 0.10;

#[derive(Debug, Clone, PartialEq)]
pub struct GraphSurface {
    pub grid: Grid2D,
    pub u: Vec<f64>,
    pub signature: Signature,
    pub valid: Vec<bool>,
}

impl GraphSurface {
    pub fn new(grid: Grid2D, u: Vec<f64>, signature: Signature) -> Result<Self> {
        if u.len() != grid.len() {
            return Err(Error::InvalidGrid(format!(
                "height field has {} values, grid has {} nodes",
                u.len(),
                grid.len()
            )));
        }
        let valid = u.iter().map(|v| v.is_finite()).collect();
        Ok(Self { grid, u, signature, valid })
    }

    pub fn from_fn<F>(grid: Grid2D, signature: Signature, f: F) -> Self
    where
        F: Fn(f64, f64) -> f64 + Sync + Send,
    {
        let u = grid.sample(f);
        let valid = u.iter().map(|v| v.is_finite()).collect();
        Self { grid, u, signature, valid }
    }

    /// Heights with masked nodes replaced by NaN, so stencils touching them
    /// come out non-finite.
    fn masked(&self) -> Vec<f64> {
        self.u
            .iter()
            .zip(&self.valid)
            .map(|(&v, &ok)| if ok { v } else { f64::NAN })
            .collect()
    }

    pub fn as_field(&self) -> ScalarField {
        ScalarField::with_mask(self.grid, self.u.clone(), self.valid.clone())
    }
}

/// First and second partial derivatives on the grid nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct Derivatives {
    pub fx: Vec<f64>,
    pub fy: Vec<f64>,
    pub fxx: Vec<f64>,
    pub fxy: Vec<f64>,
    pub fyy: Vec<f64>,
}

impl Derivatives {
    /// Whether every derivative at node `k` is finite.
    pub fn finite_at(&self, k: usize) -> bool {
        self.fx[k].is_finite()
            && self.fy[k].is_finite()
            && self.fxx[k].is_finite()
            && self.fxy[k].is_finite()
            && self.fyy[k].is_finite()
    }
}

#[inline]
fn d1(f: impl Fn(usize) -> f64, i: usize, n: usize, h: f64) -> f64 {
    if i == 0 {
        (-3.0 * f(0) + 4.0 * f(1) - f(2)) / (2.0 * h)
    } else if i == n - 1 {
        (3.0 * f(n - 1) - 4.0 * f(n - 2) + f(n - 3)) / (2.0 * h)
    } else {
        (f(i + 1) - f(i - 1)) / (2.0 * h)
    }
}

#[inline]
fn d2(f: impl Fn(usize) -> f64, i: usize, n: usize, h: f64) -> f64 {
    let h2 = h * h;
    if i > 0 && i < n - 1 {
        return (f(i - 1) - 2.0 * f(i) + f(i + 1)) / h2;
    }
    // one-sided, second order when four nodes exist
    let (a, s): (usize, isize) = if i == 0 { (0, 1) } else { (n - 1, -1) };
    let at = |m: isize| f((a as isize + s * m) as usize);
    if n >= 4 {
        (2.0 * at(0) - 5.0 * at(1) + 4.0 * at(2) - at(3)) / h2
    } else {
        (at(0) - 2.0 * at(1) + at(2)) / h2
    }
}

fn row_derivative(grid: &Grid2D, f: &[f64], second: bool) -> Vec<f64> {
    let (nx, dx) = (grid.nx, grid.dx);
    let mut out = vec![0.0; grid.len()];
    crate::par::for_each_row(&mut out, nx, |j, row| {
        let src = &f[j * nx..(j + 1) * nx];
        for (i, o) in row.iter_mut().enumerate() {
            *o = if second { d2(|m| src[m], i, nx, dx) } else { d1(|m| src[m], i, nx, dx) };
        }
    });
    out
}

fn column_derivative(grid: &Grid2D, f: &[f64], second: bool) -> Vec<f64> {
    let (nx, ny, dy) = (grid.nx, grid.ny, grid.dy);
    let mut out = vec![0.0; grid.len()];
    crate::par::for_each_row(&mut out, nx, |j, row| {
        for (i, o) in row.iter_mut().enumerate() {
            let col = |m: usize| f[m * nx + i];
            *o = if second { d2(col, j, ny, dy) } else { d1(col, j, ny, dy) };
        }
    });
    out
}

/// ∂f/∂x with the same stencils as [`gradient_and_hessian`].
pub fn partial_x(grid: &Grid2D, f: &[f64]) -> Vec<f64> {
    row_derivative(grid, f, false)
}

/// ∂f/∂y with the same stencils as [`gradient_and_hessian`].
pub fn partial_y(grid: &Grid2D, f: &[f64]) -> Vec<f64> {
    column_derivative(grid, f, false)
}

/// Second-order central differences inside, second-order one-sided on the
/// boundary ring (which callers treat as lower accuracy). Exact on quadratics.
pub fn gradient_and_hessian(grid: &Grid2D, f: &[f64]) -> Derivatives {
    assert_eq!(f.len(), grid.len(), "field length must match the grid");
    let ((fx, fxx), (fy, fyy)) = crate::par::join(
        || (row_derivative(grid, f, false), row_derivative(grid, f, true)),
        || (column_derivative(grid, f, false), column_derivative(grid, f, true)),
    );
    let fxy = column_derivative(grid, &fx, false);
    Derivatives { fx, fy, fxx, fxy, fyy }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GeometryFields {
    pub signature: Signature,
    pub grid: Grid2D,
    pub derivatives: Derivatives,
    /// W (Euclidean, ≥ 1) or W̄ (Lorentzian, in (0, 1]).
    pub w: Vec<f64>,
    pub normal: Vec<[f64; 3]>,
    pub e: Vec<f64>,
    pub f: Vec<f64>,
    pub g: Vec<f64>,
    pub h: Vec<f64>,
    pub k: Vec<f64>,
    pub valid: Vec<bool>,
}

impl GeometryFields {
    pub fn mean_curvature(&self) -> ScalarField {
        ScalarField::with_mask(self.grid, self.h.clone(), self.valid.clone())
    }

    pub fn gauss_curvature(&self) -> ScalarField {
        ScalarField::with_mask(self.grid, self.k.clone(), self.valid.clone())
    }

    /// ⟨N,N⟩ − 1 (Euclidean) or ⟪N,N⟫ + 1 (Lorentzian) per valid node.
    pub fn normal_defect(&self) -> ScalarField {
        let vals = self
            .normal
            .iter()
            .map(|n| match self.signature {
                Signature::Euclidean => n[0] * n[0] + n[1] * n[1] + n[2] * n[2] - 1.0,
                Signature::Lorentzian => n[0] * n[0] + n[1] * n[1] - n[2] * n[2] + 1.0,
            })
            .collect();
        ScalarField::with_mask(self.grid, vals, self.valid.clone())
    }
}

/// Metric, Gauss map and curvatures of the graph.
///
/// Lorentzian nodes with |∇ū| ≥ 1 are masked; more than
/// [`SPACELIKE_FAILURE_LIMIT`] of them is an error.
pub fn geometry(s: &GraphSurface) -> Result<GeometryFields> {
    let grid = s.grid;
    let d = gradient_and_hessian(&grid, &s.masked());
    let n = grid.len();

    let mut valid: Vec<bool> = (0..n).map(|k| s.valid[k] && d.finite_at(k)).collect();
    if s.signature == Signature::Lorentzian {
        let considered = valid.iter().filter(|&&v| v).count();
        let mut bad = 0;
        for (k, ok) in valid.iter_mut().enumerate() {
            if *ok && d.fx[k] * d.fx[k] + d.fy[k] * d.fy[k] >= 1.0 {
                *ok = false;
                bad += 1;
            }
        }
        if bad as f64 > SPACELIKE_FAILURE_LIMIT * considered as f64 {
            return Err(Error::NotSpacelike { invalid: bad, total: considered });
        }
    }

    let nan3 = [f64::NAN; 3];
    let mut w = vec![f64::NAN; n];
    let mut normal = vec![nan3; n];
    let (mut e, mut f, mut g) = (vec![f64::NAN; n], vec![f64::NAN; n], vec![f64::NAN; n]);
    let (mut h, mut kk) = (vec![f64::NAN; n], vec![f64::NAN; n]);
    for k in 0..n {
        if !valid[k] {
            continue;
        }
        let (ux, uy, uxx, uxy, uyy) = (d.fx[k], d.fy[k], d.fxx[k], d.fxy[k], d.fyy[k]);
        let det = uxx * uyy - uxy * uxy;
        match s.signature {
            Signature::Euclidean => {
                let ww = (1.0 + ux * ux + uy * uy).sqrt();
                let op = (1.0 + ux * ux) * uyy + (1.0 + uy * uy) * uxx - 2.0 * ux * uy * uxy;
                w[k] = ww;
                normal[k] = [-ux / ww, -uy / ww, 1.0 / ww];
                e[k] = 1.0 + ux * ux;
                f[k] = ux * uy;
                g[k] = 1.0 + uy * uy;
                h[k] = -op / (ww * ww * ww);
                kk[k] = det / (ww * ww * ww * ww);
            }
            Signature::Lorentzian => {
                let ww = (1.0 - ux * ux - uy * uy).sqrt();
                let op = (1.0 - ux * ux) * uyy + (1.0 - uy * uy) * uxx + 2.0 * ux * uy * uxy;
                w[k] = ww;
                normal[k] = [ux / ww, uy / ww, 1.0 / ww];
                e[k] = 1.0 - ux * ux;
                f[k] = -ux * uy;
                g[k] = 1.0 - uy * uy;
                h[k] = op / (ww * ww * ww);
                kk[k] = -det / (ww * ww * ww * ww);
            }
        }
    }
    // quietly drop nodes where the algebra overflowed
    for k in 0..n {
        valid[k] = valid[k] && h[k].is_finite() && kk[k].is_finite();
    }
    Ok(GeometryFields { signature: s.signature, grid, derivatives: d, w, normal, e, f, g, h, k: kk, valid })
}

/// Residual of the weighted minimal (Euclidean) or maximal (Lorentzian)
/// graph equation. Nodes whose height leaves the weight's domain are masked.
pub fn pde_residual(s: &GraphSurface, w: &WeightFunction) -> ScalarField {
    let d = gradient_and_hessian(&s.grid, &s.masked());
    residual_from_derivatives(s, &d, w)
}

pub(crate) fn residual_from_derivatives(s: &GraphSurface, d: &Derivatives, w: &WeightFunction) -> ScalarField {
    let n = s.grid.len();
    let values: Vec<f64> = crate::par::map_indices(n, |k| {
        let u = s.u[k];
        if !s.valid[k] || !w.contains(u) || !d.finite_at(k) {
            return f64::NAN;
        }
        let (ux, uy, uxx, uxy, uyy) = (d.fx[k], d.fy[k], d.fxx[k], d.fxy[k], d.fyy[k]);
        let pd = w.phi_dot_unchecked(u);
        match s.signature {
            Signature::Euclidean => {
                let op = (1.0 + ux * ux) * uyy + (1.0 + uy * uy) * uxx - 2.0 * ux * uy * uxy;
                op - pd * (1.0 + ux * ux + uy * uy)
            }
            Signature::Lorentzian => {
                let op = (1.0 - ux * ux) * uyy + (1.0 - uy * uy) * uxx + 2.0 * ux * uy * uxy;
                op + pd * (1.0 - ux * ux - uy * uy)
            }
        }
    });
    ScalarField::new(s.grid, values)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid(n: usize) -> Grid2D {
        Grid2D::spanning(-1.0, 1.0, n, -1.0, 1.0, n).unwrap()
    }

    fn interior_max(g: &Grid2D, v: &[f64]) -> f64 {
        (0..g.len()).filter(|&k| g.is_interior(k)).map(|k| v[k].abs()).fold(0.0, f64::max)
    }

    #[test]
    fn quadratic_is_differentiated_exactly() {
        let g = grid(11);
        let f = g.sample(|x, _| x * x);
        let d = gradient_and_hessian(&g, &f);
        assert!(d.fxx.iter().all(|&v| (v - 2.0).abs() < 1e-12));
        let f = g.sample(|_, _| 7.0);
        let d = gradient_and_hessian(&g, &f);
        for v in [&d.fx, &d.fy, &d.fxx, &d.fxy, &d.fyy] {
            assert!(v.iter().all(|&x| x.abs() < 1e-12));
        }
        // every node including the one-sided ring
        let f = g.sample(|x, y| 3.0 * x * y - y * y + 0.5 * x);
        let d = gradient_and_hessian(&g, &f);
        for k in 0..g.len() {
            let (x, y) = g.point(k);
            assert!((d.fx[k] - (3.0 * y + 0.5)).abs() < 1e-11);
            assert!((d.fy[k] - (3.0 * x - 2.0 * y)).abs() < 1e-11);
            assert!((d.fxy[k] - 3.0).abs() < 1e-10);
            assert!((d.fyy[k] + 2.0).abs() < 1e-10);
        }
    }

    #[test]
    fn sine_gradient_error_bound() {
        let g = Grid2D::new(0.0, 0.0, 0.01, 0.01, 629, 3).unwrap();
        let f = g.sample(|x, _| x.sin());
        let d = gradient_and_hessian(&g, &f);
        let err = (0..g.len())
            .filter(|&k| g.is_interior(k))
            .map(|k| (d.fx[k] - g.point(k).0.cos()).abs())
            .fold(0.0, f64::max);
        assert!(err <= 2e-5, "{err}");
    }

    #[test]
    fn flat_and_tilted_planes() {
        let g = grid(9);
        let s = GraphSurface::from_fn(g, Signature::Euclidean, |_, _| 0.0);
        let geo = geometry(&s).unwrap();
        for k in 0..g.len() {
            assert_eq!(geo.w[k], 1.0);
            assert_eq!(geo.normal[k], [0.0, 0.0, 1.0]);
            assert_eq!(geo.h[k], 0.0);
            assert_eq!(geo.k[k], 0.0);
        }
        let s = GraphSurface::from_fn(g, Signature::Euclidean, |x, _| x);
        let geo = geometry(&s).unwrap();
        assert!(geo.w.iter().all(|&w| (w - 2f64.sqrt()).abs() < 1e-12));
        assert!(interior_max(&g, &geo.h) < 1e-12);
        assert!(interior_max(&g, &geo.k) < 1e-12);
    }

    #[test]
    fn quadratic_caps_match_closed_forms() {
        let g = grid(21);
        // u = (x² + 2y²)/2 + xy/4
        let (a, b, c) = (1.0, 0.25, 2.0);
        let s = GraphSurface::from_fn(g, Signature::Euclidean, |x, y| 0.5 * a * x * x + b * x * y + 0.5 * c * y * y);
        let geo = geometry(&s).unwrap();
        for k in 0..g.len() {
            let (x, y) = g.point(k);
            let (ux, uy) = (a * x + b * y, b * x + c * y);
            let w2 = 1.0 + ux * ux + uy * uy;
            let h = -((1.0 + ux * ux) * c + (1.0 + uy * uy) * a - 2.0 * ux * uy * b) / w2.powf(1.5);
            let kk = (a * c - b * b) / (w2 * w2);
            assert!((geo.h[k] - h).abs() < 1e-12, "H at {k}");
            assert!((geo.k[k] - kk).abs() < 1e-12, "K at {k}");
        }
        assert!(geo.normal_defect().stats(true).max < 1e-12);
    }

    #[test]
    fn lorentzian_paraboloid() {
        let g = grid(21);
        let s = GraphSurface::from_fn(g, Signature::Lorentzian, |x, y| (x * x + y * y) / 4.0);
        let geo = geometry(&s).unwrap();
        let o = g.index(10, 10);
        assert!((geo.w[o] - 1.0).abs() < 1e-14);
        // intrinsic curvature −det(D²ū)/W̄⁴ at the apex
        assert!((geo.k[o] + 0.25).abs() < 1e-12);
        assert!((geo.h[o] - 1.0).abs() < 1e-12);
        for k in 0..g.len() {
            let (x, y) = g.point(k);
            let r2 = x * x + y * y;
            assert!((geo.w[k] - (1.0 - r2 / 4.0).sqrt()).abs() < 1e-12);
        }
        assert!(geo.normal_defect().stats(true).max < 1e-12);
    }

    #[test]
    fn timelike_surface_is_rejected() {
        let g = grid(9);
        let s = GraphSurface::from_fn(g, Signature::Lorentzian, |x, _| 2.0 * x);
        assert!(matches!(geometry(&s), Err(Error::NotSpacelike { .. })));
        // a small timelike patch is only masked
        let s = GraphSurface::from_fn(grid(41), Signature::Lorentzian, |x, y| {
            let r = (x * x + y * y).sqrt();
            2.0 * (0.2 - r).max(0.0)
        });
        let geo = geometry(&s).unwrap();
        assert!(geo.valid.iter().any(|v| !v));
    }

    #[test]
    fn residual_examples() {
        let g = grid(9);
        let s = GraphSurface::from_fn(g, Signature::Euclidean, |_, _| 3.0);
        assert_eq!(pde_residual(&s, &WeightFunction::minimal()).stats(false).max, 0.0);
        let r = pde_residual(&s, &WeightFunction::linear(1.0).unwrap());
        assert!(r.values.iter().all(|&v| v == -1.0));
        let r = pde_residual(&s, &WeightFunction::log_alpha(1.0).unwrap());
        assert!(r.valid.iter().all(|&v| v));
        let s = GraphSurface::from_fn(g, Signature::Euclidean, |_, _| -3.0);
        let r = pde_residual(&s, &WeightFunction::log_alpha(1.0).unwrap());
        assert!(r.valid.iter().all(|&v| !v));
    }

    #[test]
    fn grim_reaper_residual_is_second_order() {
        let lin = WeightFunction::linear(1.0).unwrap();
        let g = Grid2D::spanning(-1.0, 1.0, 41, -1.2, 1.2, 41).unwrap();
        let run = |g: Grid2D| {
            let s = GraphSurface::from_fn(g, Signature::Euclidean, |_, y| -y.cos().ln());
            pde_residual(&s, &lin)
        };
        // compare on the nodes both levels share
        let ratio = run(g).stats(false).max / run(g.refined()).stats_on_coarse_nodes(false).max;
        assert!((3.5..=4.5).contains(&ratio), "{ratio}");
    }
}
