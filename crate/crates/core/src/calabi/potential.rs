//! The Hessian system of the Calabi potential and its path integration.

use crate::diffgeom::{gradient_and_hessian, partial_x, partial_y, GraphSurface, Signature};
use crate::error::{Error, Result};
use crate::grid::{Grid2D, ScalarField};
use crate::weights::WeightFunction;

/// Prescribed second derivatives (Φ_xx, Φ_xy, Φ_yy) of the potential.
#[derive(Debug, Clone, PartialEq)]
pub struct HessianFields {
    pub grid: Grid2D,
    pub hxx: Vec<f64>,
    pub hxy: Vec<f64>,
    pub hyy: Vec<f64>,
    pub valid: Vec<bool>,
}

/// Euclidean: (1+u_x², u_x u_y, 1+u_y²)·e^φ/W.
/// Lorentzian: (1−ū_x², −ū_x ū_y, 1−ū_y²)·e^φ/W̄.
pub fn hessian_fields(s: &GraphSurface, w: &WeightFunction) -> Result<HessianFields> {
    let grid = s.grid;
    let u: Vec<f64> = s.u.iter().zip(&s.valid).map(|(&v, &ok)| if ok { v } else { f64::NAN }).collect();
    let d = gradient_and_hessian(&grid, &u);
    let n = grid.len();
    let rows: Vec<[f64; 3]> = crate::par::map_indices(n, |k| {
        let (ux, uy, z) = (d.fx[k], d.fy[k], u[k]);
        if !(ux.is_finite() && uy.is_finite()) || !w.contains(z) {
            return [f64::NAN; 3];
        }
        let ephi = w.phi_unchecked(z).exp();
        match s.signature {
            Signature::Euclidean => {
                let ww = (1.0 + ux * ux + uy * uy).sqrt();
                let c = ephi / ww;
                [(1.0 + ux * ux) * c, ux * uy * c, (1.0 + uy * uy) * c]
            }
            Signature::Lorentzian => {
                let q = 1.0 - ux * ux - uy * uy;
                if q <= 0.0 {
                    return [f64::NAN; 3];
                }
                let c = ephi / q.sqrt();
                [(1.0 - ux * ux) * c, -ux * uy * c, (1.0 - uy * uy) * c]
            }
        }
    });
    let valid: Vec<bool> = rows.iter().map(|r| r.iter().all(|v| v.is_finite())).collect();
    if s.signature == Signature::Lorentzian {
        let considered = (0..n).filter(|&k| s.valid[k] && w.contains(u[k])).count();
        let bad = considered - valid.iter().filter(|&&v| v).count();
        if bad as f64 > crate::diffgeom::SPACELIKE_FAILURE_LIMIT * considered as f64 {
            return Err(Error::NotSpacelike { invalid: bad, total: considered });
        }
    }
    Ok(HessianFields {
        grid,
        hxx: rows.iter().map(|r| r[0]).collect(),
        hxy: rows.iter().map(|r| r[1]).collect(),
        hyy: rows.iter().map(|r| r[2]).collect(),
        valid,
    })
}

/// Gradient (Φ_x, Φ_y) of the potential, gauge-fixed to vanish at the base node.
#[derive(Debug, Clone, PartialEq)]
pub struct PotentialGradient {
    pub grid: Grid2D,
    pub px: Vec<f64>,
    pub py: Vec<f64>,
    /// |alternate-path value − stored value|, the larger of the two components.
    pub compat_residual: ScalarField,
    pub valid: Vec<bool>,
    /// Base node (i, j) where the gauge is fixed.
    pub base: (usize, usize),
}

/// Cumulative trapezoid of `f(m)` for `m in 0..n`, anchored to zero at `from`.
/// NaN propagates outward from the anchor.
fn cumulative(n: usize, from: usize, h: f64, f: impl Fn(usize) -> f64) -> Vec<f64> {
    let mut out = vec![f64::NAN; n];
    out[from] = 0.0;
    for m in from + 1..n {
        out[m] = out[m - 1] + 0.5 * h * (f(m - 1) + f(m));
    }
    for m in (0..from).rev() {
        out[m] = out[m + 1] - 0.5 * h * (f(m) + f(m + 1));
    }
    out
}

/// F(i,j) = ∫ a along the base row, then ∫ c up column i.
fn row_then_column(g: &Grid2D, base: (usize, usize), a: &[f64], c: &[f64]) -> Vec<f64> {
    let (ib, jb) = base;
    let start = cumulative(g.nx, ib, g.dx, |i| a[g.index(i, jb)]);
    let cols: Vec<Vec<f64>> = crate::par::map_indices(g.nx, |i| {
        let col = cumulative(g.ny, jb, g.dy, |j| c[g.index(i, j)]);
        col.into_iter().map(|v| v + start[i]).collect()
    });
    let mut out = vec![0.0; g.len()];
    crate::par::for_each_row(&mut out, g.nx, |j, row| {
        for (i, o) in row.iter_mut().enumerate() {
            *o = cols[i][j];
        }
    });
    out
}

/// F(i,j) = ∫ b up the base column, then ∫ r along row j.
fn column_then_row(g: &Grid2D, base: (usize, usize), b: &[f64], r: &[f64]) -> Vec<f64> {
    let (ib, jb) = base;
    let start = cumulative(g.ny, jb, g.dy, |j| b[g.index(ib, j)]);
    let mut out = vec![0.0; g.len()];
    crate::par::for_each_row(&mut out, g.nx, |j, row| {
        let line = cumulative(g.nx, ib, g.dx, |i| r[g.index(i, j)]);
        for (o, v) in row.iter_mut().zip(line) {
            *o = v + start[j];
        }
    });
    out
}

/// Trapezoidal path integration of the Hessian system.
///
/// Φ_x integrates Φ_xx along the base row and then Φ_xy up each column; Φ_y
/// integrates Φ_yy up the base column and then Φ_xy along each row. The
/// opposite ordering gives the compatibility residual.
pub fn integrate_potential_gradient(h: &HessianFields) -> Result<PotentialGradient> {
    let g = h.grid;
    let k0 = h.valid.iter().position(|&v| v).ok_or(Error::Disconnected(0))?;
    let base = g.coords(k0);
    let nan_masked = |f: &[f64]| -> Vec<f64> {
        f.iter().zip(&h.valid).map(|(&v, &ok)| if ok { v } else { f64::NAN }).collect()
    };
    let (hxx, hxy, hyy) = (nan_masked(&h.hxx), nan_masked(&h.hxy), nan_masked(&h.hyy));

    let ((px, py), (px_alt, py_alt)) = crate::par::join(
        || (row_then_column(&g, base, &hxx, &hxy), column_then_row(&g, base, &hyy, &hxy)),
        || (column_then_row(&g, base, &hxy, &hxx), row_then_column(&g, base, &hxy, &hyy)),
    );

    let valid: Vec<bool> = (0..g.len()).map(|k| h.valid[k] && px[k].is_finite() && py[k].is_finite()).collect();
    let unreachable = (0..g.len()).filter(|&k| h.valid[k] && !valid[k]).count();
    if unreachable > 0 {
        return Err(Error::Disconnected(unreachable));
    }
    let compat: Vec<f64> = (0..g.len())
        .map(|k| (px[k] - px_alt[k]).abs().max((py[k] - py_alt[k]).abs()))
        .collect();
    Ok(PotentialGradient {
        grid: g,
        px,
        py,
        compat_residual: ScalarField::with_mask(g, compat, valid.clone()),
        valid,
        base,
    })
}

/// Pointwise max of |∂_x Φ_xy − ∂_y Φ_xx| and |∂_x Φ_yy − ∂_y Φ_xy|: the
/// integrability defect of the Hessian system.
pub fn curl_field(h: &HessianFields) -> ScalarField {
    let g = h.grid;
    let masked = |f: &[f64]| -> Vec<f64> {
        f.iter().zip(&h.valid).map(|(&v, &ok)| if ok { v } else { f64::NAN }).collect()
    };
    let (hxx, hxy, hyy) = (masked(&h.hxx), masked(&h.hxy), masked(&h.hyy));
    let (a, b) = (partial_x(&g, &hxy), partial_y(&g, &hxx));
    let (c, d) = (partial_x(&g, &hyy), partial_y(&g, &hxy));
    let v = (0..g.len()).map(|k| (a[k] - b[k]).abs().max((c[k] - d[k]).abs())).collect();
    ScalarField::new(g, v)
}

/// Finite-difference Jacobian of (Φ_x, Φ_y): returns (∂xΦx, ∂yΦx, ∂xΦy, ∂yΦy).
pub fn potential_jacobian(p: &PotentialGradient) -> [Vec<f64>; 4] {
    let g = p.grid;
    [partial_x(&g, &p.px), partial_y(&g, &p.px), partial_x(&g, &p.py), partial_y(&g, &p.py)]
}
