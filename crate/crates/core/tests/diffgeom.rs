use calabi_core::*;
use proptest::prelude::*;

fn grid() -> Grid2D {
    Grid2D::spanning(-0.5, 0.5, 11, -0.5, 0.5, 11).unwrap()
}

/// Closed-form H and K of u = a x²/2 + b xy + c y²/2 + d x + e y.
fn quadratic_curvatures(sig: Signature, q: [f64; 5], x: f64, y: f64) -> (f64, f64) {
    let [a, b, c, d, e] = q;
    let (ux, uy) = (a * x + b * y + d, b * x + c * y + e);
    let det = a * c - b * b;
    match sig {
        Signature::Euclidean => {
            let w2 = 1.0 + ux * ux + uy * uy;
            (-((1.0 + ux * ux) * c + (1.0 + uy * uy) * a - 2.0 * ux * uy * b) / w2.powf(1.5), det / (w2 * w2))
        }
        Signature::Lorentzian => {
            let w2 = 1.0 - ux * ux - uy * uy;
            (((1.0 - ux * ux) * c + (1.0 - uy * uy) * a + 2.0 * ux * uy * b) / w2.powf(1.5), -det / (w2 * w2))
        }
    }
}

proptest! {
    #[test]
    fn quadratics_are_exact(q in prop::array::uniform5(-0.4f64..0.4), lorentz in any::<bool>()) {
        let sig = if lorentz { Signature::Lorentzian } else { Signature::Euclidean };
        let g = grid();
        let [a, b, c, d, e] = q;
        let s = GraphSurface::from_fn(g, sig, move |x, y| 0.5 * a * x * x + b * x * y + 0.5 * c * y * y + d * x + e * y);
        let geo = geometry(&s).unwrap();
        for k in (0..g.len()).filter(|&k| g.is_interior(k) && geo.valid[k]) {
            let (x, y) = g.point(k);
            let (h, kk) = quadratic_curvatures(sig, q, x, y);
            prop_assert!((geo.h[k] - h).abs() < 1e-12);
            prop_assert!((geo.k[k] - kk).abs() < 1e-12);
        }
    }

    #[test]
    fn gauss_map_is_unit(q in prop::array::uniform3(-2.0f64..2.0), lorentz in any::<bool>()) {
        let sig = if lorentz { Signature::Lorentzian } else { Signature::Euclidean };
        let [a, b, c] = q;
        let scale = if lorentz { 0.3 } else { 1.0 };
        let s = GraphSurface::from_fn(grid(), sig, move |x, y| scale * ((a * x).sin() + b * x * y + (c * y).cos()));
        let geo = geometry(&s).unwrap();
        prop_assert!(geo.normal_defect().stats(true).max <= 1e-12);
    }
}

#[test]
fn scherk_residual_is_second_order() {
    // Scherk's surface u = log(cos y / cos x) is minimal
    let w = WeightFunction::minimal();
    let res = |n: usize| {
        let g = Grid2D::spanning(-1.0, 1.0, n, -1.0, 1.0, n).unwrap();
        pde_residual(&GraphSurface::from_fn(g, Signature::Euclidean, |x, y| (y.cos() / x.cos()).ln()), &w)
    };
    let (a, b) = (res(41).stats(false).max, res(81).stats_on_coarse_nodes(false).max);
    assert!((3.5..4.5).contains(&(a / b)), "{a} {b}");
}
