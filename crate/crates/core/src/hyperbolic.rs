//! α-maximal spacelike surfaces invariant under hyperbolic rotations,
//! ψ̃(x, t) = (x, u(x) sinh t, u(x) cosh t), and their Euclidean partners.
//!
//! The generating curve solves du/dx = tanh z, dz/dx = −(1+α)/u with
//! u(0) = u0, z(0) = 0, and conserves cosh(z)·u^{α+1} = k = u0^{α+1}.

use std::ops::Range;

use serde::{Deserialize, Serialize};

use crate::diffgeom::{GraphSurface, Signature};
use crate::error::{Error, Result};
use crate::grid::Grid2D;
use crate::mesh::SurfaceMesh;
use crate::ode::{rk4_increment, rk4_step, KahanState};
use crate::quadrature;

/// Angle at which x-stepping hands over to z-stepping when u → 0.
const SWITCH_ANGLE: f64 = -1.0;
/// ... or once the step exceeds this fraction of u (the x-system stiffens as u → 0).
const MAX_STEP_OVER_U: f64 = 0.02;
/// Integration stops once u < U_FLOOR · u0.
pub const U_FLOOR: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HyperbolicProfile {
    pub alpha: f64,
    pub u0: f64,
    pub k: f64,
    pub x: Vec<f64>,
    pub u: Vec<f64>,
    pub z: Vec<f64>,
    /// Λ, or +∞ when the curve is entire.
    pub halfwidth: f64,
    /// Samples spaced exactly `h` apart in x.
    pub uniform: Range<usize>,
    pub h: f64,
}

impl HyperbolicProfile {
    /// cosh(z)·u^{α+1} at every sample.
    pub fn first_integral(&self) -> Vec<f64> {
        self.z.iter().zip(&self.u).map(|(z, u)| z.cosh() * u.powf(self.alpha + 1.0)).collect()
    }

    /// max |cosh(z)u^{α+1} − k| / k.
    pub fn first_integral_drift(&self) -> f64 {
        self.first_integral().iter().map(|v| (v - self.k).abs() / self.k).fold(0.0, f64::max)
    }

    /// Index of x = 0.
    pub fn center(&self) -> usize {
        self.x.iter().position(|&x| x == 0.0).unwrap_or(0)
    }

    /// The samples in `range` only.
    pub fn section(&self, range: Range<usize>) -> Self {
        let lo = self.uniform.start.max(range.start);
        let hi = self.uniform.end.min(range.end).max(lo);
        Self {
            x: self.x[range.clone()].to_vec(),
            u: self.u[range.clone()].to_vec(),
            z: self.z[range.clone()].to_vec(),
            uniform: (lo - range.start)..(hi - range.start),
            ..self.clone()
        }
    }

    /// Closed-form Gauss curvature at every sample.
    pub fn gauss_curvature(&self) -> Vec<f64> {
        self.u.iter().map(|&u| hyperbolic_gauss_curvature(self.alpha, self.k, u)).collect()
    }
}

fn x_rhs(alpha: f64) -> impl Fn(f64, &[f64; 2]) -> [f64; 2] {
    move |_, y| [y[1].tanh(), -(1.0 + alpha) / y[0]]
}

/// In z: state (x, ln u); dx/dz = −u/(1+α), d ln u/dz = −tanh z/(1+α).
fn z_rhs(alpha: f64) -> impl Fn(f64, &[f64; 2]) -> [f64; 2] {
    move |z, y| [-y[1].exp() / (1.0 + alpha), -z.tanh() / (1.0 + alpha)]
}

/// One side (sign `dir`) of the profile: samples (x, u, z) from x = 0 outward,
/// and the count of uniformly spaced samples at the front.
fn half_profile(alpha: f64, u0: f64, x_extent: f64, h: f64, dir: f64) -> (Vec<[f64; 3]>, usize) {
    let f = x_rhs(alpha);
    let mut out = vec![[0.0, u0, 0.0]];
    let mut y = [u0, 0.0];
    let steps = (x_extent / h + 1e-9).floor() as usize;
    let mut n = 0;
    // leave the x phase while |z| is still moderate
    let fine = |y: &[f64; 2]| y[1] * dir > SWITCH_ANGLE && h < MAX_STEP_OVER_U * y[0];
    while n < steps && !(alpha + 1.0 > 0.0 && !fine(&y)) {
        y = rk4_step(&f, 0.0, &y, dir * h);
        n += 1;
        if !(y[0] > 0.0) || !y.iter().all(|v| v.is_finite()) {
            break;
        }
        out.push([dir * n as f64 * h, y[0], y[1]]);
    }
    let uniform = out.len();
    if alpha + 1.0 > 0.0 && n < steps {
        // continue in the angle down to u = U_FLOOR·u0
        let g = z_rhs(alpha);
        let &[x0, ua, za] = out.last().unwrap();
        // mirror the x < 0 side onto z < 0, integrate, mirror back
        let z0 = za * dir;
        let mut acc = KahanState::new([x0 * dir, ua.ln()]);
        let mut z = z0;
        let x_cap = x_extent;
        for m in 1.. {
            // far out every step adds the same increment; compensate the rounding
            acc.add(&rk4_increment(&g, z, &acc.sum, -h));
            let s = acc.sum;
            z = z0 - m as f64 * h;
            if !s.iter().all(|v| v.is_finite()) || s[0] > x_cap {
                break;
            }
            out.push([dir * s[0], s[1].exp(), dir * z]);
            if s[1].exp() < U_FLOOR * u0 {
                break;
            }
        }
    }
    (out, uniform)
}

/// Generating curve on both sides of x = 0, each integrated separately.
pub fn hyperbolic_profile(alpha: f64, u0: f64, x_extent: f64, h: f64) -> Result<HyperbolicProfile> {
    if !(u0 > 0.0 && u0.is_finite()) {
        return Err(Error::InvalidParameter(format!("u0 must be positive, got {u0}")));
    }
    if !alpha.is_finite() {
        return Err(Error::InvalidParameter(format!("alpha must be finite, got {alpha}")));
    }
    if !(h > 0.0 && x_extent > 0.0) {
        return Err(Error::InvalidParameter("step and extent must be positive".into()));
    }
    let (right, nr) = half_profile(alpha, u0, x_extent, h, 1.0);
    let (left, nl) = half_profile(alpha, u0, x_extent, h, -1.0);
    let samples: Vec<[f64; 3]> = left.iter().rev().chain(right.iter().skip(1)).copied().collect();
    let nlt = left.len();
    let halfwidth = if alpha == -1.0 { f64::INFINITY } else { domain_halfwidth(alpha, u0)? };
    Ok(HyperbolicProfile {
        alpha,
        u0,
        k: u0.powf(alpha + 1.0),
        x: samples.iter().map(|s| s[0]).collect(),
        u: samples.iter().map(|s| s[1]).collect(),
        z: samples.iter().map(|s| s[2]).collect(),
        halfwidth,
        uniform: (nlt - nl)..(nlt - 1 + nr),
        h,
    })
}

/// ∫₀^∞ sech^p τ dτ by adaptive quadrature with an exponential tail bound.
pub fn sech_power_integral(p: f64, abs_tol: f64) -> Result<f64> {
    if !(p > 0.0) {
        return Err(Error::InvalidParameter(format!("sech exponent must be positive, got {p}")));
    }
    // sech^p τ ≤ 2^p e^{−pτ}
    let q = quadrature::integrate_exp_tail(|t| (1.0 / t.cosh()).powf(p), 0.0, p, 2f64.powf(p), abs_tol)?;
    Ok(q.value)
}

/// Λ = u0/(α+1) · ∫₀^∞ sech^{1/(α+1)} τ dτ, the abscissa where u reaches 0,
/// obtained from dx/dz = −u/(1+α) along u = u0·sech^{1/(α+1)} z. Entire
/// curves (α + 1 < 0) return +∞.
pub fn domain_halfwidth(alpha: f64, u0: f64) -> Result<f64> {
    if alpha == -1.0 {
        return Err(Error::InvalidParameter("alpha = -1 gives a straight line; no halfwidth".into()));
    }
    if alpha + 1.0 < 0.0 {
        return Ok(f64::INFINITY);
    }
    let p = 1.0 / (alpha + 1.0);
    Ok(u0 * p * sech_power_integral(p, 1e-10 / (u0 * p).max(1.0))?)
}

/// K = (α+1)k²/u^{2α+4}.
pub fn hyperbolic_gauss_curvature(alpha: f64, k: f64, u: f64) -> f64 {
    if alpha == -1.0 {
        return 0.0;
    }
    (alpha + 1.0) * k * k / u.powf(2.0 * alpha + 4.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Completeness {
    Complete,
    Incomplete,
}

/// Hyperbolic bowls (α < −1) are complete iff α ≥ −2.
pub fn completeness_classifier(alpha: f64) -> Result<Completeness> {
    if !(alpha < -1.0) {
        return Err(Error::InvalidParameter(format!("completeness is classified for alpha < -1 only, got {alpha}")));
    }
    Ok(if alpha >= -2.0 { Completeness::Complete } else { Completeness::Incomplete })
}

fn t_samples(t_range: (f64, f64), n_t: usize) -> Result<Vec<f64>> {
    if n_t < 8 {
        return Err(Error::InvalidParameter(format!("need at least 8 samples in t, got {n_t}")));
    }
    let (a, b) = t_range;
    if !(b > a) {
        return Err(Error::InvalidParameter(format!("empty t range [{a}, {b}]")));
    }
    Ok((0..n_t).map(|j| a + (b - a) * j as f64 / (n_t - 1) as f64).collect())
}

fn lattice_step(x: &[f64], uniform: &Range<usize>) -> f64 {
    if uniform.len() >= 2 {
        x[uniform.start + 1] - x[uniform.start]
    } else {
        f64::NAN
    }
}

/// Orbit surface (x, u sinh t, u cosh t) with the closed-form K attribute.
/// The parameter lattice is uniform only over `p.uniform`.
pub fn hyperbolic_revolve(p: &HyperbolicProfile, t_range: (f64, f64), n_t: usize) -> Result<SurfaceMesh> {
    let ts = t_samples(t_range, n_t)?;
    let mut v = Vec::with_capacity(p.x.len() * n_t);
    let mut k = Vec::with_capacity(p.x.len() * n_t);
    for i in 0..p.x.len() {
        let kk = hyperbolic_gauss_curvature(p.alpha, p.k, p.u[i]);
        for &t in &ts {
            v.push([p.x[i], p.u[i] * t.sinh(), p.u[i] * t.cosh()]);
            k.push(kk);
        }
    }
    let mut m = SurfaceMesh::from_lattice(v, p.x.len(), n_t, lattice_step(&p.x, &p.uniform), ts[1] - ts[0], false)?;
    m.k = Some(k);
    Ok(m)
}

/// ∫₀^t cosh^α τ dτ at each sample, by cumulative trapezoid over the samples
/// anchored at the sample nearest 0 (plus an adaptive piece from 0 to it).
fn cosh_power_primitive(alpha: f64, ts: &[f64]) -> Result<Vec<f64>> {
    let f = |t: f64| t.cosh().powf(alpha);
    let j0 = ts.iter().enumerate().min_by(|a, b| a.1.abs().total_cmp(&b.1.abs())).map(|(j, _)| j).unwrap();
    let anchor = if ts[j0] == 0.0 { 0.0 } else { quadrature::integrate(f, 0.0, ts[j0], 1e-13)?.value };
    let mut out = vec![0.0; ts.len()];
    out[j0] = anchor;
    for j in j0 + 1..ts.len() {
        out[j] = out[j - 1] + 0.5 * (ts[j] - ts[j - 1]) * (f(ts[j]) + f(ts[j - 1]));
    }
    for j in (0..j0).rev() {
        out[j] = out[j + 1] - 0.5 * (ts[j + 1] - ts[j]) * (f(ts[j]) + f(ts[j + 1]));
    }
    Ok(out)
}

/// Euclidean partner ψ(x,t) = (−k u' cosh^{α+1}t/(α+1), k∫cosh^α t dt,
/// u^{α+1} cosh^{α+1}t/(α+1)). For α = −1 the partner is a Grim Reaper.
pub fn hyperbolic_partner(p: &HyperbolicProfile, t_range: (f64, f64), n_t: usize) -> Result<SurfaceMesh> {
    if p.alpha == -1.0 {
        let (y0, y1) = (p.x[0], *p.x.last().unwrap());
        return grim_reaper(0.0, p.u0, (y0, y1), t_range, (p.x.len(), n_t));
    }
    let ts = t_samples(t_range, n_t)?;
    let a1 = p.alpha + 1.0;
    let prim = cosh_power_primitive(p.alpha, &ts)?;
    let mut v = Vec::with_capacity(p.x.len() * n_t);
    for i in 0..p.x.len() {
        let (du, ua) = (p.z[i].tanh(), p.u[i].powf(a1));
        for (j, &t) in ts.iter().enumerate() {
            let c = t.cosh().powf(a1);
            v.push([-p.k * du * c / a1, p.k * prim[j], ua * c / a1]);
        }
    }
    SurfaceMesh::from_lattice(v, p.x.len(), n_t, lattice_step(&p.x, &p.uniform), ts[1] - ts[0], false)
}

/// Point of the (tilted) Grim Reaper partner of the ruled (−1)-maximal
/// surface, at parameters (y, t).
pub fn grim_reaper_point(lambda: f64, u0: f64, y: f64, t: f64) -> [f64; 3] {
    let gd = 2.0 * (0.5 * t).tanh().atan();
    let lc = t.cosh().ln();
    if lambda == 0.0 {
        [-y / u0, gd, (u0 * t.cosh()).ln()]
    } else {
        [y / lambda - lambda * lc, 2.0 * (1.0 + lambda * lambda).sqrt() * gd, y + lc]
    }
}

/// Closed-form Grim Reaper mesh over (y, t).
pub fn grim_reaper(lambda: f64, u0: f64, y_range: (f64, f64), t_range: (f64, f64), n: (usize, usize)) -> Result<SurfaceMesh> {
    if !(u0 > 0.0) {
        return Err(Error::InvalidParameter(format!("u0 must be positive, got {u0}")));
    }
    let (ny, nt) = n;
    if ny < 2 || !(y_range.1 > y_range.0) {
        return Err(Error::InvalidParameter("need a non-empty y range with at least 2 samples".into()));
    }
    let ts = t_samples(t_range, nt)?;
    let dy = (y_range.1 - y_range.0) / (ny - 1) as f64;
    let mut v = Vec::with_capacity(ny * nt);
    for i in 0..ny {
        let y = y_range.0 + i as f64 * dy;
        for &t in &ts {
            v.push(grim_reaper_point(lambda, u0, y, t));
        }
    }
    SurfaceMesh::from_lattice(v, ny, nt, dy, ts[1] - ts[0], false)
}

/// The ruled (−1)-maximal source (x, (tanh z0·x + u0) sinh t, (tanh z0·x + u0) cosh t)
/// with λ = sinh z0, as a mesh.
pub fn ruled_source(lambda: f64, u0: f64, x_range: (f64, f64), t_range: (f64, f64), n: (usize, usize)) -> Result<SurfaceMesh> {
    let slope = lambda.asinh().tanh();
    let (nx, nt) = n;
    let ts = t_samples(t_range, nt)?;
    if nx < 2 {
        return Err(Error::InvalidParameter("need at least 2 samples in x".into()));
    }
    let dx = (x_range.1 - x_range.0) / (nx - 1) as f64;
    let mut v = Vec::with_capacity(nx * nt);
    for i in 0..nx {
        let x = x_range.0 + i as f64 * dx;
        let r = slope * x + u0;
        if !(r > 0.0) {
            return Err(Error::InvalidParameter(format!("ruled surface degenerates at x = {x}")));
        }
        for &t in &ts {
            v.push([x, r * t.sinh(), r * t.cosh()]);
        }
    }
    SurfaceMesh::from_lattice(v, nx, nt, dx, ts[1] - ts[0], false)
}

/// The same surface as the spacelike graph ū(X, Y) = √((tanh z0·X + u0)² + Y²).
pub fn ruled_source_graph(lambda: f64, u0: f64, grid: &Grid2D) -> Result<GraphSurface> {
    let slope = lambda.asinh().tanh();
    GraphSurface::new(*grid, grid.sample(|x, y| ((slope * x + u0).powi(2) + y * y).sqrt()), Signature::Lorentzian)
}

/// max |z_s/cosh z + (1+α)/u| over the uniform samples. Along the curve
/// ds = dx/cosh z, so z_s/cosh z = dz/dx, taken by central differences.
pub fn hyperbolic_pde_residual(p: &HyperbolicProfile) -> f64 {
    let r = &p.uniform;
    if r.len() < 3 {
        return 0.0;
    }
    let mut worst: f64 = 0.0;
    for i in r.start + 1..r.end - 1 {
        let dz = (p.z[i + 1] - p.z[i - 1]) / (p.x[i + 1] - p.x[i - 1]);
        worst = worst.max((dz + (1.0 + p.alpha) / p.u[i]).abs());
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn straight_line() {
        let p = hyperbolic_profile(-1.0, 2.0, 3.0, 1e-2).unwrap();
        assert!(p.z.iter().all(|&z| z == 0.0));
        assert!(p.u.iter().all(|&u| u == 2.0));
        assert_eq!(hyperbolic_pde_residual(&p), 0.0);
        assert_eq!(p.halfwidth, f64::INFINITY);
    }

    #[test]
    fn curvature_formula() {
        assert_eq!(hyperbolic_gauss_curvature(1.0, 1.0, 1.0), 2.0);
        assert_eq!(hyperbolic_gauss_curvature(-1.0, 3.0, 0.2), 0.0);
        assert!(hyperbolic_gauss_curvature(-2.0, 1.0, 1e6) < 1e-11);
    }

    #[test]
    fn completeness() {
        assert_eq!(completeness_classifier(-1.5).unwrap(), Completeness::Complete);
        assert_eq!(completeness_classifier(-2.0).unwrap(), Completeness::Complete);
        assert_eq!(completeness_classifier(-3.0).unwrap(), Completeness::Incomplete);
        assert!(completeness_classifier(-1.0).is_err());
        assert!(completeness_classifier(0.5).is_err());
    }

    #[test]
    fn halfwidth_cases() {
        assert_eq!(domain_halfwidth(-2.0, 1.0).unwrap(), f64::INFINITY);
        assert!((domain_halfwidth(0.0, 1.0).unwrap() - std::f64::consts::FRAC_PI_2).abs() < 1e-9);
        assert!(domain_halfwidth(-1.0, 1.0).is_err());
    }

    #[test]
    fn revolve_origin_vertex() {
        let p = hyperbolic_profile(1.0, 1.0, 5.0, 1e-2).unwrap();
        let m = hyperbolic_revolve(&p, (-1.0, 1.0), 9).unwrap();
        let c = p.center();
        assert_eq!(m.vertices[c * 9 + 4], [0.0, 0.0, 1.0]);
    }

    #[test]
    fn grim_reaper_closed_form() {
        assert_eq!(grim_reaper_point(0.0, 1.0, 0.0, 0.0), [0.0, 0.0, 0.0]);
        let far = grim_reaper_point(0.0, 1.0, 0.0, 40.0)[1];
        assert!((far - std::f64::consts::FRAC_PI_2).abs() < 1e-15);
        let p = grim_reaper_point(0.5, 1.0, 0.3, 0.0);
        assert!((p[0] - 0.6).abs() < 1e-15);
    }

    #[test]
    fn partner_axis_row() {
        let p = hyperbolic_profile(1.0, 1.0, 5.0, 1e-2).unwrap();
        let m = hyperbolic_partner(&p, (-1.0, 1.0), 11).unwrap();
        let c = p.center();
        for j in 0..11 {
            assert_eq!(m.vertices[c * 11 + j][0], 0.0);
        }
    }
}
