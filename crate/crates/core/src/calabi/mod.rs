//! The correspondence between weighted minimal graphs in R³ and weighted
//! maximal spacelike graphs in L³.

pub mod potential;
pub mod resample;
pub mod transform;
pub mod verify;

pub use potential::{curl_field, hessian_fields, integrate_potential_gradient, potential_jacobian, HessianFields, PotentialGradient};
pub use resample::{check_fold_over, image_box, locate_preimages, resample_image_graph, resample_onto, ResampleOptions};
pub use transform::{forward_transform, inverse_transform, CalabiPair, Direction};
pub use verify::{
    fit_log_exponent, fit_log_exponent_where, invariant_fields, round_trip_defect, verify_pair, verify_pair_with, ExponentFit, InvariantFields,
    InvariantReport, ReportEntry, Tolerances,
};

/// Default threshold on |cos z| for [`singular_set`].
pub const SINGULAR_ANGLE_TOL: f64 = 1e-8;

/// Indices where the angle function cos z vanishes (to `tol`): there the
/// correspondence degenerates.
pub fn singular_set(turning_angles: &[f64], tol: f64) -> Vec<usize> {
    turning_angles
        .iter()
        .enumerate()
        .filter(|(_, z)| z.cos().abs() < tol)
        .map(|(i, _)| i)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn singular_set_examples() {
        assert!(singular_set(&[0.0, 0.3, -0.2], SINGULAR_ANGLE_TOL).is_empty());
        assert!(singular_set(&[0.7; 5], SINGULAR_ANGLE_TOL).is_empty());
        let half = std::f64::consts::FRAC_PI_2;
        assert_eq!(singular_set(&[half, 0.1, -half], SINGULAR_ANGLE_TOL), vec![0, 2]);
    }
}
