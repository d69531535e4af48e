//! Checks of every relation the correspondence should satisfy.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::potential::{curl_field, hessian_fields};
use super::resample::{interpolate_at, locate_preimages};
use super::transform::{forward_transform, inverse_transform, CalabiPair, Direction};
use crate::diffgeom::{geometry, gradient_and_hessian, partial_x, partial_y, pde_residual, GraphSurface, Signature};
use crate::error::Result;
use crate::grid::{FieldStats, ScalarField};

/// Residual fields behind an [`InvariantReport`].
///
/// `hh`, `kk` and `dual_pde` live on the resampled grid; the rest on the
/// source grid.
#[derive(Debug, Clone, PartialEq)]
pub struct InvariantFields {
    /// H̃ + W²e^{−φ}H with source quantities pulled back to each image node.
    pub hh: ScalarField,
    /// K̃ + W⁴e^{−2φ}K likewise.
    pub kk: ScalarField,
    /// Largest metric-component gap between ψ̃*g̃ and (e^{2φ}/W²)g.
    pub conformal: ScalarField,
    pub dual_pde: ScalarField,
    pub curl: ScalarField,
    pub gaussmap: ScalarField,
    pub compat: ScalarField,
}


pub fn invariant_fields(p: &CalabiPair, resampled: &GraphSurface) -> Result<InvariantFields> {
    let src = &p.source;
    let g = src.grid;
    let w = &p.weight;

    let src_geo = geometry(src)?;
    let img_geo = geometry(resampled)?;

    // source quantities at each resampled node's preimage
    let pre = locate_preimages(p, &resampled.grid);
    let at = |f: &[f64]| interpolate_at(p, f, &pre);
    let masked = |f: &[f64], valid: &[bool]| -> Vec<f64> {
        f.iter().zip(valid).map(|(&v, &ok)| if ok { v } else { f64::NAN }).collect()
    };
    let u_pre = at(&masked(&src.u, &src.valid));
    let w_pre = at(&masked(&src_geo.w, &src_geo.valid));
    let h_pre = at(&masked(&src_geo.h, &src_geo.valid));
    let k_pre = at(&masked(&src_geo.k, &src_geo.valid));

    let m = resampled.grid.len();
    let (mut hh, mut kk) = (vec![f64::NAN; m], vec![f64::NAN; m]);
    for k in 0..m {
        if !img_geo.valid[k] || !w.contains(u_pre[k]) {
            continue;
        }
        let emphi = (-w.phi_unchecked(u_pre[k])).exp();
        let w2 = w_pre[k] * w_pre[k];
        hh[k] = img_geo.h[k] + w2 * emphi * h_pre[k];
        kk[k] = img_geo.k[k] + w2 * w2 * emphi * emphi * k_pre[k];
    }

    // pulled-back image metric on the source grid
    let comp = |c: usize| -> Vec<f64> { (0..g.len()).map(|k| if p.valid[k] { p.image_points[k][c] } else { f64::NAN }).collect() };
    let (x, y, z) = (comp(0), comp(1), comp(2));
    let (xa, ya, za) = (partial_x(&g, &x), partial_x(&g, &y), partial_x(&g, &z));
    let (xb, yb, zb) = (partial_y(&g, &x), partial_y(&g, &y), partial_y(&g, &z));
    let sz = match p.direction {
        Direction::EuclidToLorentz => -1.0,
        Direction::LorentzToEuclid => 1.0,
    };
    let conformal: Vec<f64> = (0..g.len())
        .map(|k| {
            if !src_geo.valid[k] || !w.contains(src.u[k]) {
                return f64::NAN;
            }
            let e2 = (2.0 * w.phi_unchecked(src.u[k])).exp() / (src_geo.w[k] * src_geo.w[k]);
            let ge = xa[k] * xa[k] + ya[k] * ya[k] + sz * za[k] * za[k];
            let gf = xa[k] * xb[k] + ya[k] * yb[k] + sz * za[k] * zb[k];
            let gg = xb[k] * xb[k] + yb[k] * yb[k] + sz * zb[k] * zb[k];
            (ge - e2 * src_geo.e[k]).abs().max((gf - e2 * src_geo.f[k]).abs()).max((gg - e2 * src_geo.g[k]).abs())
        })
        .collect();

    let curl = curl_field(&hessian_fields(src, w)?);
    Ok(InvariantFields {
        hh: ScalarField::new(resampled.grid, hh),
        kk: ScalarField::new(resampled.grid, kk),
        conformal: ScalarField::new(g, conformal),
        dual_pde: pde_residual(resampled, &p.dual),
        curl,
        gaussmap: p.gaussmap_defect(),
        compat: p.potential.compat_residual.clone(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// Identities that hold exactly in floating point.
    pub algebraic: f64,
    /// Discretisation-limited entries pass below `discretization · h²`.
    pub discretization: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self { algebraic: 1e-12, discretization: 200.0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReportEntry {
    pub value: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl ReportEntry {
    pub fn judge(value: f64, tolerance: f64) -> Self {
        Self { value, tolerance, pass: value.is_finite() && value <= tolerance }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReportEntries {
    pub hh_max: ReportEntry,
    pub hh_rms: ReportEntry,
    pub kk_max: ReportEntry,
    pub kk_rms: ReportEntry,
    pub conformal_max: ReportEntry,
    pub dual_pde_max: ReportEntry,
    pub curl_max: ReportEntry,
    pub gaussmap_defect: ReportEntry,
}

impl ReportEntries {
    pub fn iter(&self) -> impl Iterator<Item = (&'static str, &ReportEntry)> {
        [
            ("hh_max", &self.hh_max),
            ("hh_rms", &self.hh_rms),
            ("kk_max", &self.kk_max),
            ("kk_rms", &self.kk_rms),
            ("conformal_max", &self.conformal_max),
            ("dual_pde_max", &self.dual_pde_max),
            ("curl_max", &self.curl_max),
            ("gaussmap_defect", &self.gaussmap_defect),
        ]
        .into_iter()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportMetadata {
    pub weight: String,
    pub dual_weight: String,
    pub direction: Direction,
    pub source_h: f64,
    pub image_h: f64,
    pub include_boundary: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InvariantReport {
    pub schema: u32,
    pub metadata: ReportMetadata,
    pub entries: ReportEntries,
    /// Unjudged extras (compatibility residual, valid fractions, ...).
    pub diagnostics: BTreeMap<String, f64>,
    pub all_pass: bool,
}

impl InvariantReport {
    pub fn from_fields(p: &CalabiPair, f: &InvariantFields, tol: &Tolerances, include_boundary: bool) -> Self {
        let st = |s: &ScalarField| s.stats(include_boundary);
        let h = p.source.grid.max_spacing();
        let disc = tol.algebraic + tol.discretization * h * h;
        let (hh, kk) = (st(&f.hh), st(&f.kk));
        let entries = ReportEntries {
            hh_max: ReportEntry::judge(hh.max, disc),
            hh_rms: ReportEntry::judge(hh.rms, disc),
            kk_max: ReportEntry::judge(kk.max, disc),
            kk_rms: ReportEntry::judge(kk.rms, disc),
            conformal_max: ReportEntry::judge(st(&f.conformal).max, disc),
            dual_pde_max: ReportEntry::judge(st(&f.dual_pde).max, disc),
            curl_max: ReportEntry::judge(st(&f.curl).max, disc),
            gaussmap_defect: ReportEntry::judge(f.gaussmap.stats(true).max, tol.algebraic),
        };
        let mut diagnostics = BTreeMap::new();
        diagnostics.insert("compat_max".to_string(), st(&f.compat).max);
        diagnostics.insert("image_valid_fraction".to_string(), f.dual_pde.valid_fraction());
        let all_pass = entries.iter().all(|(_, e)| e.pass);
        Self {
            schema: 1,
            metadata: ReportMetadata {
                weight: p.weight.spec(),
                dual_weight: p.dual.spec(),
                direction: p.direction,
                source_h: h,
                image_h: f.hh.grid.max_spacing(),
                include_boundary,
            },
            entries,
            diagnostics,
            all_pass,
        }
    }

    /// A report whose every entry failed because the inputs could not be measured.
    fn unmeasurable(p: &CalabiPair, resampled: &GraphSurface, reason: &str) -> Self {
        let fail = ReportEntry { value: f64::INFINITY, tolerance: 0.0, pass: false };
        let mut diagnostics = BTreeMap::new();
        diagnostics.insert(format!("error: {reason}"), f64::NAN);
        Self {
            schema: 1,
            metadata: ReportMetadata {
                weight: p.weight.spec(),
                dual_weight: p.dual.spec(),
                direction: p.direction,
                source_h: p.source.grid.max_spacing(),
                image_h: resampled.grid.max_spacing(),
                include_boundary: false,
            },
            entries: ReportEntries {
                hh_max: fail,
                hh_rms: fail,
                kk_max: fail,
                kk_rms: fail,
                conformal_max: fail,
                dual_pde_max: fail,
                curl_max: fail,
                gaussmap_defect: fail,
            },
            diagnostics,
            all_pass: false,
        }
    }
}

/// Always produces a report; geometry failures show up as failed entries.
pub fn verify_pair(p: &CalabiPair, resampled: &GraphSurface) -> InvariantReport {
    verify_pair_with(p, resampled, &Tolerances::default(), false)
}

pub fn verify_pair_with(p: &CalabiPair, resampled: &GraphSurface, tol: &Tolerances, include_boundary: bool) -> InvariantReport {
    match invariant_fields(p, resampled) {
        Ok(f) => {
            let mut r = InvariantReport::from_fields(p, &f, tol, include_boundary);
            if let Ok(d) = round_trip_defect(p, resampled) {
                r.diagnostics.insert("round_trip_defect".into(), d);
            }
            r
        }
        Err(e) => InvariantReport::unmeasurable(p, resampled, &e.to_string()),
    }
}

/// Apply the correspondence to the resampled image with the dual weight and
/// measure how far the result is from the original source, after removing a
/// translation and an additive height constant.
pub fn round_trip_defect(p: &CalabiPair, resampled: &GraphSurface) -> Result<f64> {
    let back = match p.direction {
        Direction::EuclidToLorentz => inverse_transform(resampled, &p.dual)?,
        Direction::LorentzToEuclid => forward_transform(resampled, &p.dual)?,
    };
    let pre = locate_preimages(p, &resampled.grid);
    let u_src: Vec<f64> = p.source.u.iter().zip(&p.source.valid).map(|(&v, &ok)| if ok { v } else { f64::NAN }).collect();
    let u_pre = interpolate_at(p, &u_src, &pre);
    let t = resampled.grid;
    let diffs: Vec<Option<[f64; 3]>> = (0..t.len())
        .map(|k| {
            let [x, y] = pre[k]?;
            let q = back.image_points[k];
            let d = [q[0] - x, q[1] - y, q[2] - u_pre[k]];
            (back.valid[k] && t.is_interior(k) && d.iter().all(|v| v.is_finite())).then_some(d)
        })
        .collect();
    let reference = diffs.iter().flatten().next().copied().unwrap_or([0.0; 3]);
    Ok(FieldStats::of(
        diffs.iter().flatten().flat_map(|d| (0..3).map(move |c| d[c] - reference[c])),
    )
    .max)
}

/// Result of fitting the exponent of a log weight a·log(b·w) to a graph.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExponentFit {
    pub a: f64,
    pub residual_max: f64,
}

/// The a in [a_lo, a_hi] minimising the max interior residual of the graph
/// equation under φ = a·log(b·w). φ̇ = a/w does not depend on b, and the
/// residual is affine in a, so its max-norm is convex and golden-section
/// search finds the minimax value.
pub fn fit_log_exponent(s: &GraphSurface, a_lo: f64, a_hi: f64) -> ExponentFit {
    fit_log_exponent_where(s, a_lo, a_hi, |k| s.grid.is_interior(k))
}

/// [`fit_log_exponent`] over the nodes selected by `keep`.
pub fn fit_log_exponent_where<P: Fn(usize) -> bool>(s: &GraphSurface, a_lo: f64, a_hi: f64, keep: P) -> ExponentFit {
    let u: Vec<f64> = s.u.iter().zip(&s.valid).map(|(&v, &ok)| if ok { v } else { f64::NAN }).collect();
    let d = gradient_and_hessian(&s.grid, &u);
    // residual = op + a·c at each node
    let terms: Vec<(f64, f64)> = (0..s.grid.len())
        .filter(|&k| keep(k) && d.finite_at(k) && u[k] != 0.0 && u[k].is_finite())
        .map(|k| {
            let (ux, uy, uxx, uxy, uyy) = (d.fx[k], d.fy[k], d.fxx[k], d.fxy[k], d.fyy[k]);
            match s.signature {
                Signature::Euclidean => (
                    (1.0 + ux * ux) * uyy + (1.0 + uy * uy) * uxx - 2.0 * ux * uy * uxy,
                    -(1.0 + ux * ux + uy * uy) / u[k],
                ),
                Signature::Lorentzian => (
                    (1.0 - ux * ux) * uyy + (1.0 - uy * uy) * uxx + 2.0 * ux * uy * uxy,
                    (1.0 - ux * ux - uy * uy) / u[k],
                ),
            }
        })
        .collect();
    let cost = |a: f64| terms.iter().map(|&(o, c)| (o + a * c).abs()).fold(0.0, f64::max);
    let a = crate::numeric::golden_section(cost, a_lo, a_hi, 1e-12);
    ExponentFit { a, residual_max: cost(a) }
}
