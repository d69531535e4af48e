//! Forward (R³ → L³) and inverse (L³ → R³) correspondence on graphs.

use serde::{Deserialize, Serialize};

use super::potential::{hessian_fields, integrate_potential_gradient, PotentialGradient};
use crate::diffgeom::{gradient_and_hessian, GraphSurface, Signature};
use crate::error::{Error, Result};
use crate::grid::ScalarField;
use crate::weights::WeightFunction;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    EuclidToLorentz,
    LorentzToEuclid,
}

impl Direction {
    pub fn image_signature(self) -> Signature {
        match self {
            Direction::EuclidToLorentz => Signature::Lorentzian,
            Direction::LorentzToEuclid => Signature::Euclidean,
        }
    }
}

/// A source graph together with its image under the correspondence, sampled
/// on the source grid.
#[derive(Debug, Clone, PartialEq)]
pub struct CalabiPair {
    pub source: GraphSurface,
    pub weight: WeightFunction,
    pub potential: PotentialGradient,
    /// (Φ_x, Φ_y, ϑ(u)) per source node.
    pub image_points: Vec<[f64; 3]>,
    /// Gauss map of the image, expressed through the source gradient.
    pub image_normal: Vec<[f64; 3]>,
    pub dual: WeightFunction,
    pub direction: Direction,
    pub valid: Vec<bool>,
}

impl CalabiPair {
    /// ⟪Ñ,Ñ⟫ + 1 for a Lorentzian image, |Ñ|² − 1 for a Euclidean one.
    pub fn gaussmap_defect(&self) -> ScalarField {
        let v = self
            .image_normal
            .iter()
            .map(|n| match self.direction {
                Direction::EuclidToLorentz => n[0] * n[0] + n[1] * n[1] - n[2] * n[2] + 1.0,
                Direction::LorentzToEuclid => n[0] * n[0] + n[1] * n[1] + n[2] * n[2] - 1.0,
            })
            .collect();
        ScalarField::with_mask(self.source.grid, v, self.valid.clone())
    }

    /// Image height as a field on the source grid.
    pub fn image_height(&self) -> Vec<f64> {
        self.image_points.iter().map(|p| p[2]).collect()
    }
}

fn transform(s: &GraphSurface, w: &WeightFunction, direction: Direction) -> Result<CalabiPair> {
    let h = hessian_fields(s, w)?;
    let potential = integrate_potential_gradient(&h)?;
    let u: Vec<f64> = s.u.iter().zip(&s.valid).map(|(&v, &ok)| if ok { v } else { f64::NAN }).collect();
    let d = gradient_and_hessian(&s.grid, &u);
    let n = s.grid.len();
    let nan3 = [f64::NAN; 3];
    let (mut pts, mut nrm, mut valid) = (vec![nan3; n], vec![nan3; n], vec![false; n]);
    for k in 0..n {
        if !potential.valid[k] {
            continue;
        }
        let (ux, uy) = (d.fx[k], d.fy[k]);
        pts[k] = [potential.px[k], potential.py[k], w.theta_unchecked(u[k])];
        nrm[k] = match direction {
            Direction::EuclidToLorentz => [ux, uy, (1.0 + ux * ux + uy * uy).sqrt()],
            Direction::LorentzToEuclid => [-ux, -uy, (1.0 - ux * ux - uy * uy).sqrt()],
        };
        valid[k] = pts[k].iter().chain(&nrm[k]).all(|v| v.is_finite());
    }
    Ok(CalabiPair {
        source: s.clone(),
        weight: *w,
        potential,
        image_points: pts,
        image_normal: nrm,
        dual: w.dual(),
        direction,
        valid,
    })
}

/// Euclidean graph → spacelike graph: ψ̃ = (Φ_x, Φ_y, ϑ(u)), Ñ = (u_x, u_y, W).
pub fn forward_transform(s: &GraphSurface, w: &WeightFunction) -> Result<CalabiPair> {
    if s.signature != Signature::Euclidean {
        return Err(Error::InvalidParameter("forward transform needs a Euclidean graph".into()));
    }
    transform(s, w, Direction::EuclidToLorentz)
}

/// Spacelike graph → Euclidean graph: ψ = (Φ̄_x, Φ̄_y, ϑ(ū)), N = (−ū_x, −ū_y, W̄).
pub fn inverse_transform(s: &GraphSurface, w: &WeightFunction) -> Result<CalabiPair> {
    if s.signature != Signature::Lorentzian {
        return Err(Error::InvalidParameter("inverse transform needs a Lorentzian graph".into()));
    }
    transform(s, w, Direction::LorentzToEuclid)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Grid2D;

    #[test]
    fn plane_identity() {
        let g = Grid2D::spanning(-1.0, 1.0, 9, -1.0, 1.0, 9).unwrap();
        let s = GraphSurface::from_fn(g, Signature::Euclidean, |_, _| 0.0);
        let p = forward_transform(&s, &WeightFunction::minimal()).unwrap();
        for k in 0..g.len() {
            let (x, y) = g.point(k);
            let q = p.image_points[k];
            assert!((q[0] - (x + 1.0)).abs() < 1e-14 && (q[1] - (y + 1.0)).abs() < 1e-14 && q[2] == 0.0);
        }
        assert_eq!(p.gaussmap_defect().stats(true).max, 0.0);
        assert_eq!(p.dual, WeightFunction::minimal());
        assert!(inverse_transform(&s, &WeightFunction::minimal()).is_err());
    }

    #[test]
    fn normals_are_unit_in_the_image_metric() {
        let g = Grid2D::spanning(-0.5, 0.5, 15, -0.5, 0.5, 15).unwrap();
        let w = WeightFunction::linear(1.0).unwrap();
        let s = GraphSurface::from_fn(g, Signature::Euclidean, |x, y| 3.0 * x * x - x * y + y.sin());
        let p = forward_transform(&s, &w).unwrap();
        assert!(p.gaussmap_defect().stats(true).max < 1e-12);
        let s = GraphSurface::from_fn(g, Signature::Lorentzian, |x, y| 0.4 * x * x + 0.3 * y);
        let p = inverse_transform(&s, &w).unwrap();
        assert!(p.gaussmap_defect().stats(true).max < 1e-12);
        assert_eq!(p.direction.image_signature(), Signature::Euclidean);
    }
}
