//! End-to-end acceptance checks A1–A13. Each prints one PASS/FAIL line.

use calabi_core::calabi::*;
use calabi_core::convergence::second_order;
use calabi_core::hyperbolic::*;
use calabi_core::radial::*;
use calabi_core::*;
use std::panic;
use std::process::ExitCode;
use std::sync::atomic::{AtomicUsize, Ordering};

/// Round-off floor below which convergence ratios are meaningless.
const ROUNDOFF_FLOOR: f64 = 1e-11;

static FAILURES: AtomicUsize = AtomicUsize::new(0);

fn report(id: &str, pass: bool, detail: String) {
    println!("{id} {} {detail}", if pass { "PASS" } else { "FAIL" });
    if !pass {
        FAILURES.fetch_add(1, Ordering::Relaxed);
    }
}

fn soliton_bowl() -> RadialProfile {
    bowl_profile(&WeightFunction::linear(1.0).unwrap(), 0.0, 3.0, 1e-3).unwrap()
}

/// Residual maxima of a pair on a coarse grid and its halving, compared on
/// the coarse nodes two rings in from the edge.
struct Study {
    coarse: InvariantFields,
    fine: InvariantFields,
    pairs: Vec<CalabiPair>,
}

fn study<F>(grid: Grid2D, make: F) -> Study
where
    F: Fn(&Grid2D) -> CalabiPair,
{
    let mut target: Option<Grid2D> = None;
    let mut fields = Vec::new();
    let mut pairs = Vec::new();
    for g in [grid, grid.refined()] {
        let pair = make(&g);
        let t = target.map(|t| t.refined()).unwrap_or_else(|| image_box(&pair, &ResampleOptions::default()).unwrap());
        target = Some(t);
        let r = resample_onto(&pair, &t).unwrap();
        fields.push(invariant_fields(&pair, &r).unwrap());
        pairs.push(pair);
    }
    let fine = fields.pop().unwrap();
    let coarse = fields.pop().unwrap();
    Study { coarse, fine, pairs }
}

fn ring2(coarse: &ScalarField, fine: &ScalarField) -> (f64, f64) {
    (coarse.stats_inner(2).max, fine.stats_on_coarse_nodes_inner(2).max)
}

fn soliton_study() -> Study {
    let p = soliton_bowl();
    let w = WeightFunction::linear(1.0).unwrap();
    study(Grid2D::spanning(-1.0, 1.0, 21, -1.0, 1.0, 21).unwrap(), |g| {
        let s = profile_to_graph(RadialCurve::Profile(&p), g).unwrap();
        forward_transform(&s, &w).unwrap()
    })
}

fn a01_plane_identity() {
    let g = Grid2D::spanning(0.0, 1.0, 21, 0.0, 1.0, 21).unwrap();
    let s = GraphSurface::from_fn(g, Signature::Euclidean, |_, _| 0.0);
    let p = forward_transform(&s, &WeightFunction::minimal()).unwrap();
    let err = (0..g.len())
        .map(|k| {
            let (x, y) = g.point(k);
            let q = p.image_points[k];
            (q[0] - x).abs().max((q[1] - y).abs()).max(q[2].abs())
        })
        .fold(0.0, f64::max);
    report("A1", err <= 1e-12, format!("max coordinate error {err:.3e} (tol 1e-12)"));
}

fn a02_tilted_plane() {
    let g = Grid2D::spanning(0.0, 1.0, 21, 0.0, 1.0, 21).unwrap();
    let s = GraphSurface::from_fn(g, Signature::Euclidean, |x, _| x);
    let p = forward_transform(&s, &WeightFunction::minimal()).unwrap();
    let r = resample_image_graph(&p, &ResampleOptions::default()).unwrap();
    let t = r.grid;
    let err = (0..t.len())
        .filter(|&k| t.is_interior(k) && r.valid[k])
        .map(|k| (r.u[k] - t.point(k).0 / 2f64.sqrt()).abs())
        .fold(0.0, f64::max);
    report("A2", err <= 1e-10, format!("max interior error vs X/sqrt(2) {err:.3e} (tol 1e-10)"));
}

fn a03_grim_reaper_residual() {
    let w = WeightFunction::linear(1.0).unwrap();
    let res = |n: usize| {
        let g = Grid2D::spanning(-1.0, 1.0, n, -1.0, 1.0, n).unwrap();
        let s = GraphSurface::from_fn(g, Signature::Euclidean, |_, y| -y.cos().ln());
        pde_residual(&s, &w)
    };
    let (c, f) = (res(201), res(401));
    let c = second_order(c.stats(false).max, f.stats_on_coarse_nodes(false).max, ROUNDOFF_FLOOR);
    report("A3", c.pass, format!("residual h=0.01 {:.3e}, h=0.005 {:.3e}, ratio {:.3} (window [3.5,4.5])", c.coarse, c.fine, c.ratio));
}

fn a04_curvature_laws_converge() {
    let s = soliton_study();
    let mut ok = true;
    let mut detail = Vec::new();
    for (name, c, f) in [
        ("hh", &s.coarse.hh, &s.fine.hh),
        ("kk", &s.coarse.kk, &s.fine.kk),
        ("conformal", &s.coarse.conformal, &s.fine.conformal),
    ] {
        let (a, b) = ring2(c, f);
        let cv = second_order(a, b, ROUNDOFF_FLOOR);
        ok &= cv.pass;
        detail.push(format!("{name} {a:.3e}->{b:.3e} ratio {:.3}", cv.ratio));
    }
    report("A4", ok, format!("{} (window [3.5,4.5])", detail.join(", ")));
}

fn a05_dual_pde_converges() {
    let s = soliton_study();
    let dual = s.pairs[0].dual;
    let (a, b) = ring2(&s.coarse.dual_pde, &s.fine.dual_pde);
    let cv = second_order(a, b, ROUNDOFF_FLOOR);
    let right_weight = dual == WeightFunction::log_alpha(-1.0).unwrap();
    report(
        "A5",
        cv.pass && right_weight,
        format!("dual weight {dual}; dual_pde {a:.3e}->{b:.3e} ratio {:.3} (window [3.5,4.5])", cv.ratio),
    );
}

fn a06_first_integral() {
    let p = hyperbolic_profile(1.0, 1.0, 2.0, 1e-3).unwrap();
    let drift = p.first_integral().iter().map(|k| (k - 1.0).abs()).fold(0.0, f64::max);
    report("A6", drift <= 1e-10, format!("max |cosh(z)u^2 - 1| {drift:.3e} over {} samples (tol 1e-10)", p.x.len()));
}

fn a07_domain_width() {
    let lam = domain_halfwidth(1.0, 1.0).unwrap();
    let p = hyperbolic_profile(1.0, 1.0, 2.0, 1e-3).unwrap();
    let end = *p.x.last().unwrap();
    let quarter = domain_halfwidth(0.0, 1.0).unwrap();
    let (e1, e2) = ((end - lam).abs(), (quarter - std::f64::consts::FRAC_PI_2).abs());
    report(
        "A7",
        e1 <= 1e-4 && e2 <= 1e-8,
        format!("alpha=1: quadrature {lam:.10} vs ODE {end:.10} (|d| {e1:.2e}, tol 1e-4); alpha=0: |L-pi/2| {e2:.2e} (tol 1e-8)"),
    );
}

fn a08_lorentz_slopes() {
    let h = 1e-3;
    let slope_at = |p: &RadialProfile, r: f64| {
        let i = p.s.iter().position(|&s| (s - r).abs() < 0.5 * h).unwrap();
        (p.slope(i), p.slope_deficit(i))
    };
    let bowl = lorentz_bowl_profile(Forcing::One, 1.0, 50.0, h).unwrap();
    let wing = lorentz_winglike_profile(Forcing::One, 1.0, LightConeBranch::Down, 50.0, h, None).unwrap();
    let (sb, db) = slope_at(&bowl, 50.0);
    let (sw, dw) = slope_at(&wing, 50.0);
    let in_range = |s: f64, d: f64| s >= 0.99 && d > 0.0;
    let interior_min = wing.minimum.map(|i| wing.s[i]).filter(|&r| r > 0.0 && r < 50.0);
    report(
        "A8",
        in_range(sb, db) && in_range(sw, dw) && interior_min.is_some(),
        format!("bowl u'(50) {sb:.6} (1-u' {db:.2e}); winglike min at r={interior_min:?}, u'(50) {sw:.6} (1-u' {dw:.2e}); want [0.99,1)"),
    );
}

fn a09_dual_exponent() {
    let w = WeightFunction::log_alpha(-2.0).unwrap();
    let p = bowl_profile(&w, 1.0, 2.0, 1e-3).unwrap();
    let g = Grid2D::spanning(-0.5, 0.5, 41, -0.5, 0.5, 41).unwrap();
    let mut target: Option<Grid2D> = None;
    let mut fits = Vec::new();
    let mut dual = None;
    for (level, gg) in [g, g.refined()].into_iter().enumerate() {
        let s = profile_to_graph(RadialCurve::Profile(&p), &gg).unwrap();
        let pair = forward_transform(&s, &w).unwrap();
        dual = Some(pair.dual);
        let t = target.map(|t| t.refined()).unwrap_or_else(|| image_box(&pair, &ResampleOptions::default()).unwrap());
        target = Some(t);
        let r = resample_onto(&pair, &t).unwrap();
        fits.push(if level == 0 {
            fit_log_exponent_where(&r, -4.0, 4.0, |k| t.is_inner(k, 2))
        } else {
            fit_log_exponent_where(&r, -4.0, 4.0, |k| {
                let (i, j) = t.coords(k);
                i % 2 == 0 && j % 2 == 0 && t.is_inner(k, 4)
            })
        });
    }
    let cv = second_order(fits[0].residual_max, fits[1].residual_max, ROUNDOFF_FLOOR);
    let a = fits[1].a;
    let sign = if (a + 2.0).abs() < (a - 2.0).abs() { "-2 = beta/(beta+1)" } else { "+2 = -beta/(beta+1)" };
    report(
        "A9",
        cv.pass && (a + 2.0).abs() < 0.01,
        format!(
            "best-fit a {:.5} -> {a:.5} (closest to {sign}); dual weight {}; residual {:.3e}->{:.3e} ratio {:.3}",
            fits[0].a,
            dual.unwrap(),
            cv.coarse,
            cv.fine,
            cv.ratio
        ),
    );
}

fn a10_grim_reaper_pair() {
    let u0 = 1.0;
    let g = Grid2D::spanning(-1.0, 1.0, 5, -1.0, 1.0, 8001).unwrap();
    let s = ruled_source_graph(0.0, u0, &g).unwrap();
    let p = inverse_transform(&s, &WeightFunction::log_alpha(-1.0).unwrap()).unwrap();
    // closed form in the source coordinates: y = −X, sinh t = Y/u0
    let exact = |k: usize| {
        let (x, y) = g.point(k);
        [x / u0, (y / u0).atan(), (u0 * u0 + y * y).sqrt().ln()]
    };
    let k0 = 0;
    let (q0, e0) = (p.image_points[k0], exact(k0));
    let err = (0..g.len())
        .map(|k| {
            let (q, e) = (p.image_points[k], exact(k));
            (0..3).map(|c| ((q[c] - q0[c]) - (e[c] - e0[c])).abs()).fold(0.0, f64::max)
        })
        .fold(0.0, f64::max);
    // and the library's closed form agrees with the oracle above
    let lib = (0..g.len())
        .map(|k| {
            let (x, y) = g.point(k);
            let c = grim_reaper_point(0.0, u0, -x, (y / u0).asinh());
            let e = exact(k);
            (0..3).map(|i| (c[i] - e[i]).abs()).fold(0.0, f64::max)
        })
        .fold(0.0, f64::max);
    report("A10", err <= 1e-6 && lib <= 1e-14, format!("max error after gauge removal {err:.3e} (tol 1e-6); closed form check {lib:.1e}"));
}

fn a11_hyperbolic_curvature() {
    let err = |h: f64, n_t: usize| {
        let p = hyperbolic_profile(1.0, 1.0, 0.5, h).unwrap();
        let p = p.section(p.uniform.clone());
        let m = hyperbolic_revolve(&p, (-0.5, 0.5), n_t).unwrap();
        let fd = m.fd_gauss_curvature(Signature::Lorentzian).unwrap();
        // (α+1)k²/u^{2α+4} with α = 1, k = 1
        (0..fd.len())
            .map(|v| (fd[v] - 2.0 / p.u[v / n_t].powi(6)).abs())
            .fold(0.0, f64::max)
    };
    let cv = second_order(err(0.01, 101), err(0.005, 201), ROUNDOFF_FLOOR);
    let line = hyperbolic_profile(-1.0, 2.0, 1.0, 0.01).unwrap();
    let m = hyperbolic_revolve(&line, (-1.0, 1.0), 64).unwrap();
    let flat = m.fd_gauss_curvature(Signature::Lorentzian).unwrap().iter().map(|k| k.abs()).fold(0.0, f64::max);
    report(
        "A11",
        cv.pass && flat <= 1e-10,
        format!("alpha=1 FD error {:.3e}->{:.3e} ratio {:.3} (window [3.5,4.5]); alpha=-1 max|K| {flat:.2e} (tol 1e-10)", cv.coarse, cv.fine, cv.ratio),
    );
}

fn a12_gauss_map_identity() {
    let mut worst: f64 = 0.0;
    let g = Grid2D::spanning(-1.0, 1.0, 41, -1.0, 1.0, 41).unwrap();
    let bowl = soliton_bowl();
    let s = profile_to_graph(RadialCurve::Profile(&bowl), &g).unwrap();
    let forward = forward_transform(&s, &WeightFunction::linear(1.0).unwrap()).unwrap();
    let lb = lorentz_bowl_profile(Forcing::One, 1.0, 3.0, 1e-3).unwrap();
    let ls = profile_to_graph(RadialCurve::Profile(&lb), &g).unwrap();
    let inverse = inverse_transform(&ls, &Forcing::One.weight()).unwrap();
    let tilted = forward_transform(&GraphSurface::from_fn(g, Signature::Euclidean, |x, y| 0.3 * x - 0.7 * y), &WeightFunction::minimal()).unwrap();
    for p in [&forward, &inverse, &tilted] {
        // ⟪Ñ,Ñ⟫ + 1 recomputed here from the stored normals
        for (n, ok) in p.image_normal.iter().zip(&p.valid) {
            if *ok {
                let d = match p.direction {
                    Direction::EuclidToLorentz => n[0] * n[0] + n[1] * n[1] - n[2] * n[2] + 1.0,
                    Direction::LorentzToEuclid => n[0] * n[0] + n[1] * n[1] + n[2] * n[2] - 1.0,
                };
                worst = worst.max(d.abs());
            }
        }
        worst = worst.max(p.gaussmap_defect().stats(true).max);
    }
    report("A12", worst <= 1e-12, format!("max Gauss-map defect {worst:.2e} over 3 transforms (tol 1e-12)"));
}

/// Exact curl of the Hessian system for u = x²y with the minimal weight.
fn witness_curl(x: f64, y: f64) -> f64 {
    let w2 = 1.0 + 4.0 * x * x * y * y + x.powi(4);
    let w = w2.sqrt();
    let (a, b, c) = (1.0 + 4.0 * x * x * y * y, 2.0 * x.powi(3) * y, 1.0 + x.powi(4));
    let (wx, wy) = ((4.0 * x * y * y + 2.0 * x.powi(3)) / w, 4.0 * x * x * y / w);
    let d = |f: f64, fd: f64, wd: f64| fd / w - f * wd / w2;
    let c1 = d(b, 6.0 * x * x * y, wx) - d(a, 8.0 * x * x * y, wy);
    let c2 = d(c, 4.0 * x.powi(3), wx) - d(b, 2.0 * x.powi(3), wy);
    c1.abs().max(c2.abs())
}

fn a13_integrability_witness() {
    let mn = WeightFunction::minimal();
    let curl = |n: usize, f: &(dyn Fn(f64, f64) -> f64 + Sync), w: &WeightFunction| {
        let g = Grid2D::spanning(0.2, 1.0, n, 0.2, 1.0, n).unwrap();
        let s = GraphSurface::from_fn(g, Signature::Euclidean, f);
        curl_field(&hessian_fields(&s, w).unwrap())
    };
    let witness = |x: f64, y: f64| x * x * y;
    let mut floor = f64::INFINITY;
    let mut oracle_err = Vec::new();
    for n in [41, 81, 161] {
        let c = curl(n, &witness, &mn);
        floor = floor.min(c.stats_inner(2).max);
        let g = c.grid;
        let e = (0..g.len())
            .filter(|&k| g.is_inner(k, 2))
            .map(|k| {
                let (x, y) = g.point(k);
                (c.values[k] - witness_curl(x, y)).abs()
            })
            .fold(0.0, f64::max);
        oracle_err.push(e);
    }
    let exact_max = {
        let g = Grid2D::spanning(0.2, 1.0, 161, 0.2, 1.0, 161).unwrap();
        (0..g.len()).filter(|&k| g.is_inner(k, 4)).map(|k| witness_curl(g.point(k).0, g.point(k).1)).fold(0.0, f64::max)
    };
    let oc = second_order(oracle_err[1], oracle_err[2], ROUNDOFF_FLOOR);
    // a genuine solution (rotated Grim Reaper) for contrast
    let lin = WeightFunction::linear(1.0).unwrap();
    let (sa, ca) = (0.5f64.sin(), 0.5f64.cos());
    let gr = move |x: f64, y: f64| -((sa * (x - 0.6) + ca * (y - 0.6)).cos().ln());
    let sc = curl(41, &gr, &lin);
    let sf = curl(81, &gr, &lin);
    let sol = second_order(sc.stats_inner(2).max, sf.stats_on_coarse_nodes_inner(2).max, ROUNDOFF_FLOOR);
    report(
        "A13",
        floor >= 0.5 * exact_max && oc.pass && sol.pass,
        format!(
            "witness curl_max >= {floor:.4} (exact {exact_max:.4}); FD vs exact {:.2e}->{:.2e} ratio {:.3}; solution curl {:.2e}->{:.2e} ratio {:.3}",
            oc.coarse, oc.fine, oc.ratio, sol.coarse, sol.fine, sol.ratio
        ),
    );
}

fn main() -> ExitCode {
    let checks: [(&str, fn()); 13] = [
        ("A1", a01_plane_identity),
        ("A2", a02_tilted_plane),
        ("A3", a03_grim_reaper_residual),
        ("A4", a04_curvature_laws_converge),
        ("A5", a05_dual_pde_converges),
        ("A6", a06_first_integral),
        ("A7", a07_domain_width),
        ("A8", a08_lorentz_slopes),
        ("A9", a09_dual_exponent),
        ("A10", a10_grim_reaper_pair),
        ("A11", a11_hyperbolic_curvature),
        ("A12", a12_gauss_map_identity),
        ("A13", a13_integrability_witness),
    ];
    for (id, check) in checks {
        if panic::catch_unwind(check).is_err() {
            report(id, false, "panicked".into());
        }
    }
    let failed = FAILURES.load(Ordering::Relaxed);
    println!("acceptance: {} of {} failed", failed, checks.len());
    if failed == 0 { ExitCode::SUCCESS } else { ExitCode::FAILURE }
}
