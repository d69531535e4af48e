//! Named verification scenarios for `calabi verify --preset`.

use anyhow::{bail, Result};
use serde::Serialize;

use calabi_core::calabi::*;
use calabi_core::convergence::{pair_halving, second_order, shared_maxima, SECOND_ORDER_WINDOW};
use calabi_core::hyperbolic::*;
use calabi_core::radial::*;
use calabi_core::*;

pub const PRESETS: &[&str] = &[
    "plane-identity",
    "tilted-plane",
    "grim-reaper",
    "soliton-bowl",
    "cupola-dual",
    "grim-reaper-pair",
    "hyperbolic-curvature",
    "integrability-witness",
];

const ROUNDOFF_FLOOR: f64 = 1e-11;

/// One measured quantity and the closed interval it must fall in.
#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub lo: f64,
    pub hi: f64,
    pub pass: bool,
}

impl Check {
    fn within(name: &str, value: f64, lo: f64, hi: f64) -> Self {
        Self { name: name.into(), value, lo, hi, pass: value >= lo && value <= hi }
    }

    fn at_most(name: &str, value: f64, tol: f64) -> Self {
        Self::within(name, value, 0.0, tol)
    }

    /// Second-order ratio; both levels at round-off pass with the ratio reported as NaN.
    fn ratio(name: &str, coarse: f64, fine: f64) -> Self {
        let c = second_order(coarse, fine, ROUNDOFF_FLOOR);
        Self { name: name.into(), value: c.ratio, lo: SECOND_ORDER_WINDOW.0, hi: SECOND_ORDER_WINDOW.1, pass: c.pass }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct PresetReport {
    pub schema: u32,
    pub preset: String,
    pub checks: Vec<Check>,
    pub pairs: Vec<InvariantReport>,
    pub all_pass: bool,
}

impl PresetReport {
    fn new(preset: &str, checks: Vec<Check>, pairs: Vec<InvariantReport>) -> Self {
        let all_pass = checks.iter().all(|c| c.pass) && pairs.iter().all(|p| p.all_pass);
        Self { schema: 1, preset: preset.into(), checks, pairs, all_pass }
    }
}

pub fn run(name: &str) -> Result<PresetReport> {
    Ok(match name {
        "plane-identity" => plane_identity()?,
        "tilted-plane" => tilted_plane()?,
        "grim-reaper" => grim_reaper_residual()?,
        "soliton-bowl" => soliton_bowl()?,
        "cupola-dual" => cupola_dual()?,
        "grim-reaper-pair" => grim_reaper_pair()?,
        "hyperbolic-curvature" => hyperbolic_curvature()?,
        "integrability-witness" => integrability_witness()?,
        _ => bail!("unknown preset {name:?}; known: {}", PRESETS.join(", ")),
    })
}

fn unit_grid(n: usize) -> Result<Grid2D> {
    Ok(Grid2D::spanning(0.0, 1.0, n, 0.0, 1.0, n)?)
}

fn plane_identity() -> Result<PresetReport> {
    let g = unit_grid(21)?;
    let s = GraphSurface::from_fn(g, Signature::Euclidean, |_, _| 0.0);
    let p = forward_transform(&s, &WeightFunction::minimal())?;
    let err = (0..g.len())
        .map(|k| {
            let (x, y) = g.point(k);
            let q = p.image_points[k];
            (q[0] - x).abs().max((q[1] - y).abs()).max(q[2].abs())
        })
        .fold(0.0, f64::max);
    let r = resample_image_graph(&p, &ResampleOptions::default())?;
    let report = verify_pair(&p, &r);
    let mut checks = vec![Check::at_most("image_coordinate_error", err, 1e-12)];
    checks.extend(report.entries.iter().map(|(name, e)| Check::at_most(name, e.value, 1e-12)));
    Ok(PresetReport::new("plane-identity", checks, vec![report]))
}

fn tilted_plane() -> Result<PresetReport> {
    let s = GraphSurface::from_fn(unit_grid(21)?, Signature::Euclidean, |x, _| x);
    let p = forward_transform(&s, &WeightFunction::minimal())?;
    let r = resample_image_graph(&p, &ResampleOptions::default())?;
    let t = r.grid;
    let err = (0..t.len())
        .filter(|&k| t.is_interior(k) && r.valid[k])
        .map(|k| (r.u[k] - t.point(k).0 / 2f64.sqrt()).abs())
        .fold(0.0, f64::max);
    let report = verify_pair(&p, &r);
    Ok(PresetReport::new("tilted-plane", vec![Check::at_most("image_height_error", err, 1e-10)], vec![report]))
}

fn grim_reaper_residual() -> Result<PresetReport> {
    let w = WeightFunction::linear(1.0)?;
    let res = |n: usize| -> Result<ScalarField> {
        let g = Grid2D::spanning(-1.0, 1.0, n, -1.0, 1.0, n)?;
        Ok(pde_residual(&GraphSurface::from_fn(g, Signature::Euclidean, |_, y| -y.cos().ln()), &w))
    };
    let (c, f) = (res(201)?, res(401)?);
    let (a, b) = (c.stats(false).max, f.stats_on_coarse_nodes(false).max);
    Ok(PresetReport::new(
        "grim-reaper",
        vec![Check::at_most("residual_h0.01", a, 1e-3), Check::ratio("residual_ratio", a, b)],
        vec![],
    ))
}

fn soliton_bowl() -> Result<PresetReport> {
    let w = WeightFunction::linear(1.0)?;
    let p = bowl_profile(&w, 0.0, 3.0, 1e-3)?;
    let h = pair_halving(Grid2D::spanning(-1.0, 1.0, 21, -1.0, 1.0, 21)?, |g| {
        forward_transform(&profile_to_graph(RadialCurve::Profile(&p), g)?, &w)
    })?;
    let mut checks = Vec::new();
    for (name, c, f) in [
        ("hh", &h.coarse.hh, &h.fine.hh),
        ("kk", &h.coarse.kk, &h.fine.kk),
        ("conformal", &h.coarse.conformal, &h.fine.conformal),
        ("dual_pde", &h.coarse.dual_pde, &h.fine.dual_pde),
    ] {
        let (a, b) = shared_maxima(c, f, 2);
        checks.push(Check::ratio(&format!("{name}_ratio"), a, b));
    }
    checks.push(Check::at_most("gaussmap", h.fine.gaussmap.stats(true).max, 1e-12));
    let tol = Tolerances::default();
    let pairs = vec![
        InvariantReport::from_fields(&h.coarse_pair, &h.coarse, &tol, false),
        InvariantReport::from_fields(&h.fine_pair, &h.fine, &tol, false),
    ];
    Ok(PresetReport::new("soliton-bowl", checks, pairs))
}

fn cupola_dual() -> Result<PresetReport> {
    let w = WeightFunction::log_alpha(-2.0)?;
    let p = bowl_profile(&w, 1.0, 2.0, 1e-3)?;
    let g = Grid2D::spanning(-0.5, 0.5, 41, -0.5, 0.5, 41)?;
    let coarse_pair = forward_transform(&profile_to_graph(RadialCurve::Profile(&p), &g)?, &w)?;
    let t = image_box(&coarse_pair, &ResampleOptions::default())?;
    let coarse = fit_log_exponent_where(&resample_onto(&coarse_pair, &t)?, -4.0, 4.0, |k| t.is_inner(k, 2));
    let fine_pair = forward_transform(&profile_to_graph(RadialCurve::Profile(&p), &g.refined())?, &w)?;
    let tf = t.refined();
    let fine = fit_log_exponent_where(&resample_onto(&fine_pair, &tf)?, -4.0, 4.0, |k| {
        let (i, j) = tf.coords(k);
        i % 2 == 0 && j % 2 == 0 && tf.is_inner(k, 4)
    });
    Ok(PresetReport::new(
        "cupola-dual",
        vec![
            Check::within("fitted_exponent", fine.a, -2.01, -1.99),
            Check::ratio("fit_residual_ratio", coarse.residual_max, fine.residual_max),
        ],
        vec![],
    ))
}

fn grim_reaper_pair() -> Result<PresetReport> {
    let u0 = 1.0;
    let g = Grid2D::spanning(-1.0, 1.0, 5, -1.0, 1.0, 8001)?;
    let p = inverse_transform(&ruled_source_graph(0.0, u0, &g)?, &WeightFunction::log_alpha(-1.0)?)?;
    let exact = |k: usize| {
        let (x, y) = g.point(k);
        grim_reaper_point(0.0, u0, -x, (y / u0).asinh())
    };
    let (q0, e0) = (p.image_points[0], exact(0));
    let err = (0..g.len())
        .map(|k| {
            let (q, e) = (p.image_points[k], exact(k));
            (0..3).map(|c| ((q[c] - q0[c]) - (e[c] - e0[c])).abs()).fold(0.0, f64::max)
        })
        .fold(0.0, f64::max);
    Ok(PresetReport::new(
        "grim-reaper-pair",
        vec![
            Check::at_most("closed_form_error", err, 1e-6),
            Check::at_most("gaussmap", p.gaussmap_defect().stats(true).max, 1e-12),
        ],
        vec![],
    ))
}

fn hyperbolic_curvature() -> Result<PresetReport> {
    let fd_error = |h: f64, n_t: usize| -> Result<f64> {
        let p = hyperbolic_profile(1.0, 1.0, 0.5, h)?;
        let p = p.section(p.uniform.clone());
        let m = hyperbolic_revolve(&p, (-0.5, 0.5), n_t)?;
        let fd = m.fd_gauss_curvature(Signature::Lorentzian)?;
        let k = m.k.unwrap_or_default();
        Ok(fd.iter().zip(&k).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max))
    };
    let (a, b) = (fd_error(0.01, 101)?, fd_error(0.005, 201)?);
    let line = hyperbolic_profile(-1.0, 2.0, 1.0, 0.01)?;
    let flat = hyperbolic_revolve(&line, (-1.0, 1.0), 64)?
        .fd_gauss_curvature(Signature::Lorentzian)?
        .iter()
        .map(|k| k.abs())
        .fold(0.0, f64::max);
    let profile = hyperbolic_profile(1.0, 1.0, 2.0, 1e-3)?;
    let width = (profile.x.last().copied().unwrap_or(0.0) - domain_halfwidth(1.0, 1.0)?).abs();
    Ok(PresetReport::new(
        "hyperbolic-curvature",
        vec![
            Check::ratio("fd_curvature_ratio", a, b),
            Check::at_most("flat_curvature", flat, 1e-10),
            Check::at_most("first_integral_drift", profile.first_integral_drift(), 1e-10),
            Check::at_most("halfwidth_gap", width, 1e-4),
        ],
        vec![],
    ))
}

fn integrability_witness() -> Result<PresetReport> {
    let curl = |n: usize, f: &(dyn Fn(f64, f64) -> f64 + Sync), w: &WeightFunction| -> Result<ScalarField> {
        let g = Grid2D::spanning(0.2, 1.0, n, 0.2, 1.0, n)?;
        Ok(curl_field(&hessian_fields(&GraphSurface::from_fn(g, Signature::Euclidean, f), w)?))
    };
    let mn = WeightFunction::minimal();
    let witness = |x: f64, y: f64| x * x * y;
    let mut floor = f64::INFINITY;
    for n in [41, 81, 161] {
        floor = floor.min(curl(n, &witness, &mn)?.stats_inner(2).max);
    }
    let lin = WeightFunction::linear(1.0)?;
    let (sa, ca) = (0.5f64.sin(), 0.5f64.cos());
    let reaper = move |x: f64, y: f64| -((sa * (x - 0.6) + ca * (y - 0.6)).cos().ln());
    let (a, b) = shared_maxima(&curl(41, &reaper, &lin)?, &curl(81, &reaper, &lin)?, 2);
    Ok(PresetReport::new(
        "integrability-witness",
        vec![Check::within("witness_curl_floor", floor, 0.1, f64::INFINITY), Check::ratio("solution_curl_ratio", a, b)],
        vec![],
    ))
}
