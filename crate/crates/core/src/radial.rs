//! Rotationally symmetric solutions of elliptic type.
//!
//! Euclidean profiles are curves (x(s), u(s)) in arc length with turning angle
//! z: x' = cos z, u' = sin z, z' = φ̇(u) cos z − sin z / x. Lorentzian
//! profiles are graphs ū(r) written through the hyperbolic angle ζ with
//! ū' = tanh ζ, so ζ' = f(ū) − tanh ζ / r; the light cone sits at ζ = ±∞ and
//! is never reached in floating point by rounding ū' to 1.

use serde::{Deserialize, Serialize};

use crate::calabi::{singular_set, SINGULAR_ANGLE_TOL};
use crate::diffgeom::{GraphSurface, Signature};
use crate::error::{Error, Result};
use crate::grid::Grid2D;
use crate::interp::CubicHermite;
use crate::mesh::SurfaceMesh;
use crate::ode::rk4_step;
use crate::weights::WeightFunction;

/// Number of steps covered by the axis series before RK4 takes over.
pub const SERIES_STEPS: usize = 10;
/// Heights closer than this to a finite end of the weight's domain stop a profile.
pub const BOUNDARY_EPS: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProfileKind {
    Bowl,
    Winglike,
}

/// Why integration stopped.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Termination {
    /// Reached the requested arc length or radius.
    Span,
    /// Height reached the edge of the weight's domain.
    DomainBoundary,
    /// Curve returned to the rotation axis.
    Axis,
}

/// Lorentzian forcing f(ū) in ū''/(1−ū'²) + ū'/r = f(ū).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Forcing {
    One,
    AlphaOverU { alpha: f64 },
}

impl Forcing {
    pub fn value(&self, u: f64) -> f64 {
        match *self {
            Forcing::One => 1.0,
            Forcing::AlphaOverU { alpha } => alpha / u,
        }
    }

    pub fn derivative(&self, u: f64) -> f64 {
        match *self {
            Forcing::One => 0.0,
            Forcing::AlphaOverU { alpha } => -alpha / (u * u),
        }
    }

    /// The weight whose maximal-graph equation is this ODE: φ̇ = −f.
    pub fn weight(&self) -> WeightFunction {
        match *self {
            Forcing::One => WeightFunction::linear(-1.0).expect("valid"),
            Forcing::AlphaOverU { alpha } => WeightFunction::log_alpha(-alpha).expect("finite alpha"),
        }
    }
}

/// Which light-cone direction a Lorentzian winglike profile leaves the axis in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LightConeBranch {
    /// ū'(0) = −1.
    Down,
    /// ū'(0) = +1.
    Up,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadialProfile {
    pub signature: Signature,
    pub kind: ProfileKind,
    /// Euclidean weight, or for Lorentzian profiles the weight equivalent to the forcing.
    pub weight: WeightFunction,
    pub forcing: Option<Forcing>,
    /// Arc length (Euclidean) or radius (Lorentzian).
    pub s: Vec<f64>,
    pub x: Vec<f64>,
    pub u: Vec<f64>,
    /// Turning angle (Euclidean, radians) or hyperbolic angle ζ (Lorentzian).
    pub z: Vec<f64>,
    /// Apex of a two-sided bowl or neck of a winglike profile.
    pub center: Option<usize>,
    /// Interior minimum of a Lorentzian winglike profile.
    pub minimum: Option<usize>,
    /// Richardson estimate (one step halving) of the integration error in u.
    pub error_estimate: f64,
    pub termination: Termination,
}

impl RadialProfile {
    pub fn len(&self) -> usize {
        self.s.len()
    }

    pub fn is_empty(&self) -> bool {
        self.s.is_empty()
    }

    /// du/dx at sample i.
    pub fn slope(&self, i: usize) -> f64 {
        match self.signature {
            Signature::Euclidean => self.z[i].tan(),
            Signature::Lorentzian => self.z[i].tanh(),
        }
    }

    /// 1 − |ū'| computed without cancellation (Lorentzian profiles).
    pub fn slope_deficit(&self, i: usize) -> f64 {
        let a = self.z[i].abs();
        2.0 / ((2.0 * a).exp() + 1.0)
    }

    /// d²ū/dr² of a Lorentzian profile, from the ODE.
    pub fn lorentz_second_derivative(&self, i: usize) -> f64 {
        let f = self.forcing.unwrap_or(Forcing::One);
        let (r, z) = (self.x[i], self.z[i]);
        let dz = if r > 0.0 { f.value(self.u[i]) - z.tanh() / r } else { 0.5 * f.value(self.u[i]) };
        let c = z.cosh();
        dz / (c * c)
    }

    /// Indices where cos z vanishes (Euclidean profiles).
    pub fn singular_indices(&self) -> Vec<usize> {
        match self.signature {
            Signature::Euclidean => singular_set(&self.z, SINGULAR_ANGLE_TOL),
            Signature::Lorentzian => Vec::new(),
        }
    }

    /// Surface of revolution (x cos t, x sin t, u).
    pub fn revolve(&self, n_t: usize) -> Result<SurfaceMesh> {
        SurfaceMesh::revolve(&self.x, &self.u, n_t)
    }
}

fn euclid_rhs(w: &WeightFunction) -> impl Fn(f64, &[f64; 3]) -> [f64; 3] + '_ {
    move |_, y| {
        let (c, s) = (y[2].cos(), y[2].sin());
        [c, s, w.phi_dot_unchecked(y[1]) * c - s / y[0]]
    }
}

/// Distance from `u` to the nearest finite end of the domain.
fn boundary_distance(w: &WeightFunction, u: f64) -> f64 {
    let d = w.domain();
    (u - d.lo).abs().min((d.hi - u).abs())
}

struct March {
    s: Vec<f64>,
    y: Vec<[f64; 3]>,
    /// Samples produced with the nominal step (before boundary refinement).
    regular: usize,
    termination: Termination,
}

/// Arc-length march from (s0, y0) with nominal signed step `h` until
/// |s| ≥ s_max. Steps shrink to a tenth of the distance to a finite domain
/// end so that the approach to u = 0 of the log weights is resolved.
fn march_euclid(w: &WeightFunction, s0: f64, y0: [f64; 3], h: f64, s_max: f64) -> March {
    let f = euclid_rhs(w);
    let side = y0[0].signum();
    let (mut s, mut y) = (s0, y0);
    let mut out = March { s: vec![s0], y: vec![y0], regular: 1, termination: Termination::Span };
    let mut n = 0usize;
    let mut refined = false;
    let cap = 50_000_000usize;
    while out.s.len() < cap {
        let dist = boundary_distance(w, y[1]);
        let mut step = h.abs();
        if dist.is_finite() && dist / 10.0 < step {
            step = dist / 10.0;
            refined = true;
        }
        let remaining = s_max - s.abs();
        if remaining <= 1e-9 * h.abs() {
            break;
        }
        if step > remaining {
            step = remaining;
            refined = true;
        }
        let dt = step * h.signum();
        let next = rk4_step(&f, s, &y, dt);
        if !next.iter().all(|v| v.is_finite()) || !w.contains(next[1]) {
            out.termination = Termination::DomainBoundary;
            break;
        }
        n += 1;
        s = if refined { s + dt } else { s0 + n as f64 * h };
        y = next;
        if y[0] * side <= 0.0 {
            out.termination = Termination::Axis;
            out.s.push(s);
            out.y.push(y);
            break;
        }
        out.s.push(s);
        out.y.push(y);
        if !refined {
            out.regular = out.s.len();
        }
        if boundary_distance(w, y[1]) < BOUNDARY_EPS {
            out.termination = Termination::DomainBoundary;
            break;
        }
    }
    out
}

/// Axis series u = u0 + c2 r² + c4 r⁴ of a Euclidean bowl.
struct EuclidSeries {
    u0: f64,
    c2: f64,
    c4: f64,
}

impl EuclidSeries {
    fn new(w: &WeightFunction, u0: f64) -> Self {
        let c2 = w.phi_dot_unchecked(u0) / 4.0;
        let c4 = (w.phi_ddot_unchecked(u0) * c2 + 8.0 * c2 * c2 * c2) / 16.0;
        Self { u0, c2, c4 }
    }

    fn arc(&self, r: f64) -> f64 {
        let (c2, c4) = (self.c2, self.c4);
        r + 2.0 / 3.0 * c2 * c2 * r.powi(3) + (8.0 * c2 * c4 - 2.0 * c2.powi(4)) / 5.0 * r.powi(5)
    }

    /// State (x, u, z) at arc length `s` from the apex.
    fn state(&self, s: f64) -> [f64; 3] {
        let mut r = s;
        for _ in 0..20 {
            let du = 2.0 * self.c2 * r + 4.0 * self.c4 * r.powi(3);
            r -= (self.arc(r) - s) / (1.0 + du * du).sqrt();
        }
        let du = 2.0 * self.c2 * r + 4.0 * self.c4 * r.powi(3);
        [r, self.u0 + self.c2 * r * r + self.c4 * r.powi(4), du.atan()]
    }
}

fn check_step(h: f64, span: f64) -> Result<()> {
    if !(h > 0.0 && h.is_finite()) {
        return Err(Error::InvalidParameter(format!("step must be positive, got {h}")));
    }
    if !(span > 0.0 && span.is_finite()) {
        return Err(Error::InvalidParameter(format!("span must be positive, got {span}")));
    }
    Ok(())
}

fn richardson(a: &March, b: &March) -> f64 {
    // b ran with half the step: sample 2i of b matches sample i of a
    let n = a.regular.min(b.regular.div_ceil(2));
    (0..n)
        .map(|i| (a.y[i][1] - b.y[2 * i][1]).abs().max((a.y[i][0] - b.y[2 * i][0]).abs()))
        .fold(0.0, f64::max)
        / 15.0
}

fn one_sided_bowl(w: &WeightFunction, u0: f64, s_max: f64, h: f64, side: f64) -> (Vec<f64>, Vec<[f64; 3]>, March) {
    let series = EuclidSeries::new(w, u0);
    let s_launch = (SERIES_STEPS as f64 * h).min(s_max);
    let m_launch = (s_launch / h).floor() as usize;
    let mirror = |st: [f64; 3]| [side * st[0], st[1], side * st[2]];
    let mut s: Vec<f64> = (0..=m_launch).map(|m| side * m as f64 * h).collect();
    let mut y: Vec<[f64; 3]> = s.iter().map(|&t| mirror(series.state(t.abs()))).collect();
    let start = *y.last().unwrap();
    let run = march_euclid(w, *s.last().unwrap(), start, side * h, s_max);
    s.extend_from_slice(&run.s[1..]);
    y.extend_from_slice(&run.y[1..]);
    (s, y, run)
}

fn validate_bowl(w: &WeightFunction, u0: f64, s_max: f64, h: f64) -> Result<()> {
    check_step(h, s_max)?;
    if !w.contains(u0) {
        return Err(Error::Domain { weight: w.to_string(), z: u0, domain: w.domain().to_string() });
    }
    Ok(())
}

/// Bowl launched from the axis at height u0 and integrated outward.
pub fn bowl_profile(w: &WeightFunction, u0: f64, s_max: f64, h: f64) -> Result<RadialProfile> {
    validate_bowl(w, u0, s_max, h)?;
    let (s, y, run) = one_sided_bowl(w, u0, s_max, h, 1.0);
    let fine = march_euclid(w, run.s[0], run.y[0], 0.5 * h, run.s[run.regular - 1]);
    Ok(RadialProfile {
        signature: Signature::Euclidean,
        kind: ProfileKind::Bowl,
        weight: *w,
        forcing: None,
        x: y.iter().map(|v| v[0]).collect(),
        u: y.iter().map(|v| v[1]).collect(),
        z: y.iter().map(|v| v[2]).collect(),
        s,
        center: Some(0),
        minimum: None,
        error_estimate: richardson(&run, &fine),
        termination: run.termination,
    })
}

/// Both branches of a bowl, integrated separately across the apex; s runs
/// from 0 at the left end.
pub fn bowl_profile_full(w: &WeightFunction, u0: f64, s_max: f64, h: f64) -> Result<RadialProfile> {
    let right = bowl_profile(w, u0, s_max, h)?;
    let (ls, ly, _) = one_sided_bowl(w, u0, s_max, h, -1.0);
    let n_left = ls.len();
    let offset = -ls[n_left - 1];
    let mut s: Vec<f64> = ls.iter().rev().map(|t| t + offset).collect();
    let mut x: Vec<f64> = ly.iter().rev().map(|v| v[0]).collect();
    let mut u: Vec<f64> = ly.iter().rev().map(|v| v[1]).collect();
    let mut z: Vec<f64> = ly.iter().rev().map(|v| v[2]).collect();
    s.extend(right.s[1..].iter().map(|t| t + offset));
    x.extend_from_slice(&right.x[1..]);
    u.extend_from_slice(&right.u[1..]);
    z.extend_from_slice(&right.z[1..]);
    Ok(RadialProfile { s, x, u, z, center: Some(n_left - 1), ..right })
}

/// Profile through the neck (x1, u1) with vertical tangent, both directions.
pub fn winglike_profile(w: &WeightFunction, x1: f64, u1: f64, s_max: f64, h: f64) -> Result<RadialProfile> {
    check_step(h, s_max)?;
    if !(x1 > 0.0) {
        return Err(Error::InvalidParameter(format!("neck radius must be positive, got {x1}")));
    }
    if !(u1 > 0.0) || !w.contains(u1) {
        return Err(Error::Domain { weight: w.to_string(), z: u1, domain: w.domain().to_string() });
    }
    let seed = [x1, u1, std::f64::consts::FRAC_PI_2];
    let fwd = march_euclid(w, 0.0, seed, h, s_max);
    let bwd = march_euclid(w, 0.0, seed, -h, s_max);
    for run in [&fwd, &bwd] {
        if run.termination == Termination::Axis {
            let k = run.s.len() - 1;
            return Err(Error::AxisCollision { s: run.s[k], x: run.y[k][0] });
        }
    }
    let half = 0.5 * h;
    let fwd_fine = march_euclid(w, 0.0, seed, half, fwd.s[fwd.regular - 1].abs());
    let bwd_fine = march_euclid(w, 0.0, seed, -half, bwd.s[bwd.regular - 1].abs());
    let err = richardson(&fwd, &fwd_fine).max(richardson(&bwd, &bwd_fine));

    let n_b = bwd.s.len();
    let offset = -bwd.s[n_b - 1];
    let samples = bwd.s.iter().zip(&bwd.y).rev().chain(fwd.s.iter().zip(&fwd.y).skip(1));
    let (mut s, mut x, mut u, mut z) = (Vec::new(), Vec::new(), Vec::new(), Vec::new());
    for (t, y) in samples {
        s.push(t + offset);
        x.push(y[0]);
        u.push(y[1]);
        z.push(y[2]);
    }
    let termination = if fwd.termination == Termination::Span && bwd.termination == Termination::Span {
        Termination::Span
    } else {
        Termination::DomainBoundary
    };
    Ok(RadialProfile {
        signature: Signature::Euclidean,
        kind: ProfileKind::Winglike,
        weight: *w,
        forcing: None,
        s,
        x,
        u,
        z,
        center: Some(n_b - 1),
        minimum: None,
        error_estimate: err,
        termination,
    })
}

fn lorentz_rhs(f: Forcing) -> impl Fn(f64, &[f64; 2]) -> [f64; 2] {
    move |r, y| {
        let t = y[1].tanh();
        [t, f.value(y[0]) - t / r]
    }
}

/// Fixed-step march in r from sample (r0, y0); r_n = r0 + n·h.
fn march_lorentz(f: Forcing, r0: f64, y0: [f64; 2], h: f64, r_max: f64) -> Result<Vec<(f64, [f64; 2])>> {
    let rhs = lorentz_rhs(f);
    let steps = ((r_max - r0) / h + 1e-9).floor().max(0.0) as usize;
    let mut out = Vec::with_capacity(steps + 1);
    out.push((r0, y0));
    let mut y = y0;
    for n in 1..=steps {
        let r = r0 + (n - 1) as f64 * h;
        y = rk4_step(&rhs, r, &y, h);
        let rn = r0 + n as f64 * h;
        // the slope deficit 2/(e^{2|ζ|}+1) underflowing is the only way to hit the cone
        if !y.iter().all(|v| v.is_finite()) || 2.0 / ((2.0 * y[1].abs()).exp() + 1.0) == 0.0 {
            return Err(Error::Causality { r: rn });
        }
        if let Forcing::AlphaOverU { .. } = f {
            if y[0] <= 0.0 {
                return Err(Error::Domain { weight: format!("{f:?}"), z: y[0], domain: "(0, inf)".into() });
            }
        }
        out.push((rn, y));
    }
    Ok(out)
}

fn lorentz_profile(
    f: Forcing,
    kind: ProfileKind,
    head: Vec<(f64, [f64; 2])>,
    h: f64,
    r_max: f64,
) -> Result<RadialProfile> {
    let &(r0, y0) = head.last().unwrap();
    let tail = march_lorentz(f, r0, y0, h, r_max)?;
    let fine = march_lorentz(f, r0, y0, 0.5 * h, r_max)?;
    let err = tail
        .iter()
        .enumerate()
        .filter_map(|(i, (_, y))| fine.get(2 * i).map(|(_, yf)| (y[0] - yf[0]).abs()))
        .fold(0.0, f64::max)
        / 15.0;
    let all: Vec<(f64, [f64; 2])> = head.into_iter().chain(tail.into_iter().skip(1)).collect();
    let z: Vec<f64> = all.iter().map(|(_, y)| y[1]).collect();
    let minimum = z.windows(2).position(|w| w[0] < 0.0 && w[1] >= 0.0).map(|i| if -z[i] < z[i + 1] { i } else { i + 1 });
    Ok(RadialProfile {
        signature: Signature::Lorentzian,
        kind,
        weight: f.weight(),
        forcing: Some(f),
        s: all.iter().map(|(r, _)| *r).collect(),
        x: all.iter().map(|(r, _)| *r).collect(),
        u: all.iter().map(|(_, y)| y[0]).collect(),
        z,
        center: Some(0),
        minimum,
        error_estimate: err,
        termination: Termination::Span,
    })
}

/// Entire spacelike bowl with ū(0) = a, ū'(0) = 0.
pub fn lorentz_bowl_profile(f: Forcing, a: f64, r_max: f64, h: f64) -> Result<RadialProfile> {
    check_step(h, r_max)?;
    if !(a > 0.0) {
        return Err(Error::InvalidParameter(format!("axis height must be positive, got {a}")));
    }
    if let Forcing::AlphaOverU { alpha } = f {
        if !(alpha > 1.0) {
            return Err(Error::InvalidParameter(format!("bowl forcing needs alpha > 1, got {alpha}")));
        }
    }
    let d2 = f.value(a) / 4.0;
    let d4 = (f.derivative(a) * d2 - 8.0 * d2 * d2 * d2) / 16.0;
    let m_launch = SERIES_STEPS.min((r_max / h).floor() as usize);
    let head = (0..=m_launch)
        .map(|m| {
            let r = m as f64 * h;
            (r, [a + d2 * r * r + d4 * r.powi(4), (2.0 * d2 * r + 4.0 * d4 * r.powi(3)).atanh()])
        })
        .collect();
    lorentz_profile(f, ProfileKind::Bowl, head, h, r_max)
}

/// Profile leaving (0, a) along the light cone. With q = 1 ∓ ū' the seed is
/// q ≈ C r² ± 2Cf(a) r³; C > 0 is a free parameter of the family
/// (default f(a)²).
pub fn lorentz_winglike_profile(
    f: Forcing,
    a: f64,
    branch: LightConeBranch,
    r_max: f64,
    h: f64,
    cubic: Option<f64>,
) -> Result<RadialProfile> {
    check_step(h, r_max)?;
    if !(a > 0.0) {
        return Err(Error::InvalidParameter(format!("axis height must be positive, got {a}")));
    }
    let fa = f.value(a);
    let c = cubic.unwrap_or(fa * fa);
    if !(c > 0.0 && c.is_finite()) {
        return Err(Error::InvalidParameter(format!("light-cone coefficient must be positive, got {c}")));
    }
    let sg = match branch {
        LightConeBranch::Down => -1.0,
        LightConeBranch::Up => 1.0,
    };
    let m_launch = SERIES_STEPS.min((r_max / h).floor() as usize).max(1);
    let head = (1..=m_launch)
        .map(|m| {
            let r = m as f64 * h;
            let q = c * r * r - sg * 2.0 * c * fa * r.powi(3);
            let u = a + sg * r - sg * c / 3.0 * r.powi(3) + 0.5 * c * fa * r.powi(4);
            (r, [u, sg * 0.5 * ((2.0 - q) / q).ln()])
        })
        .collect::<Vec<_>>();
    if head.iter().any(|(_, y)| !y[1].is_finite()) {
        return Err(Error::InvalidParameter("light-cone seed left the spacelike region; reduce h".into()));
    }
    lorentz_profile(f, ProfileKind::Winglike, head, h, r_max)
}

/// Generating curve of the image: λ = e^{φ(u)} x cos z, θ = ϑ(u).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransformedCurve {
    pub lambda: Vec<f64>,
    pub theta: Vec<f64>,
    /// Turning angle of the source, for dθ/dλ = sin z.
    pub z: Vec<f64>,
    pub source_kind: ProfileKind,
    pub singular: Vec<usize>,
}

impl TransformedCurve {
    pub fn revolve(&self, n_t: usize) -> Result<SurfaceMesh> {
        SurfaceMesh::revolve(&self.lambda, &self.theta, n_t)
    }
}

pub fn transform_profile(p: &RadialProfile) -> Result<TransformedCurve> {
    if p.signature != Signature::Euclidean {
        return Err(Error::InvalidParameter("only Euclidean profiles are transformed".into()));
    }
    let w = &p.weight;
    let n = p.len();
    let mut lambda = Vec::with_capacity(n);
    let mut theta = Vec::with_capacity(n);
    for i in 0..n {
        let e = w.evaluate(p.u[i])?;
        lambda.push(e.phi.exp() * p.x[i] * p.z[i].cos());
        theta.push(e.theta);
    }
    Ok(TransformedCurve { lambda, theta, z: p.z.clone(), source_kind: p.kind, singular: p.singular_indices() })
}

/// Either kind of radial curve, as input to [`profile_to_graph`].
pub enum RadialCurve<'a> {
    Profile(&'a RadialProfile),
    Transformed(&'a TransformedCurve),
}

/// Rotate a curve into a graph over `grid` by cubic Hermite interpolation in
/// r = √(x² + y²), with the exact slope at each sample. Uses the branch that
/// leaves the apex or neck with increasing radius; nodes outside its radial
/// range are masked.
pub fn profile_to_graph(curve: RadialCurve<'_>, grid: &Grid2D) -> Result<GraphSurface> {
    let (r, v, dv, start, signature): (&[f64], &[f64], Vec<f64>, usize, Signature) = match curve {
        RadialCurve::Profile(p) => {
            let slopes = (0..p.len()).map(|i| p.slope(i)).collect();
            (&p.x, &p.u, slopes, p.center.unwrap_or(0), p.signature)
        }
        RadialCurve::Transformed(t) => {
            let slopes = t.z.iter().map(|z| z.sin()).collect();
            let start = t.lambda.iter().enumerate().min_by(|a, b| a.1.abs().total_cmp(&b.1.abs())).map_or(0, |(i, _)| i);
            (&t.lambda, &t.theta, slopes, start, Signature::Lorentzian)
        }
    };
    let mut end = start + 1;
    while end < r.len() && r[end] > r[end - 1] && dv[end].is_finite() {
        end += 1;
    }
    if end - start < 2 {
        return Err(Error::InvalidParameter("curve has no branch with increasing radius".into()));
    }
    let hermite = CubicHermite::new(r[start..end].to_vec(), v[start..end].to_vec(), dv[start..end].to_vec())
        .ok_or_else(|| Error::InvalidParameter("radius samples are not increasing".into()))?;
    let u = grid.sample(|x, y| hermite.eval(x.hypot(y)).map_or(f64::NAN, |(val, _)| val));
    GraphSurface::new(*grid, u, signature)
}
