//! Grid-halving convergence checks.

use serde::{Deserialize, Serialize};

use crate::calabi::{image_box, invariant_fields, resample_onto, CalabiPair, InvariantFields, ResampleOptions};
use crate::error::Result;
use crate::grid::{Grid2D, ScalarField};

/// Ratio window accepted as second order.
pub const SECOND_ORDER_WINDOW: (f64, f64) = (3.5, 4.5);

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Convergence {
    pub coarse: f64,
    pub fine: f64,
    /// coarse / fine, NaN when both sit below the floor.
    pub ratio: f64,
    /// log₂ of the ratio.
    pub order: f64,
    pub pass: bool,
}

/// Judge coarse/fine errors under halving. Both at or below `floor` (round-off)
/// counts as a pass: there is nothing left to converge.
pub fn second_order(coarse: f64, fine: f64, floor: f64) -> Convergence {
    ratio_check(coarse, fine, floor, SECOND_ORDER_WINDOW)
}

pub fn ratio_check(coarse: f64, fine: f64, floor: f64, window: (f64, f64)) -> Convergence {
    if coarse <= floor && fine <= floor {
        return Convergence { coarse, fine, ratio: f64::NAN, order: f64::NAN, pass: true };
    }
    let ratio = coarse / fine;
    Convergence { coarse, fine, ratio, order: ratio.log2(), pass: ratio >= window.0 && ratio <= window.1 }
}

/// A pair built on a grid and on its halving, with invariant fields for both.
/// The fine image is resampled onto the halving of the coarse target grid,
/// so both levels share nodes.
#[derive(Debug, Clone)]
pub struct Halving {
    pub coarse_pair: CalabiPair,
    pub fine_pair: CalabiPair,
    pub coarse: InvariantFields,
    pub fine: InvariantFields,
}

pub fn pair_halving<F>(grid: Grid2D, make: F) -> Result<Halving>
where
    F: Fn(&Grid2D) -> Result<CalabiPair>,
{
    let coarse_pair = make(&grid)?;
    let target = image_box(&coarse_pair, &ResampleOptions::default())?;
    let coarse = invariant_fields(&coarse_pair, &resample_onto(&coarse_pair, &target)?)?;
    let fine_pair = make(&grid.refined())?;
    let fine = invariant_fields(&fine_pair, &resample_onto(&fine_pair, &target.refined())?)?;
    Ok(Halving { coarse_pair, fine_pair, coarse, fine })
}

/// Max over coarse nodes `ring` rings from the edge, on both levels. Nodes next
/// to the boundary use one-sided stencils whose error constants differ between
/// levels, so they are left out of convergence ratios.
pub fn shared_maxima(coarse: &ScalarField, fine: &ScalarField, ring: usize) -> (f64, f64) {
    (coarse.stats_inner(ring).max, fine.stats_on_coarse_nodes_inner(ring).max)
}
