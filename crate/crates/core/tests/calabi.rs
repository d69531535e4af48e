use calabi_core::calabi::*;
use calabi_core::*;
use proptest::prelude::*;

fn round_trip(n: usize, f: fn(f64, f64) -> f64, target: Option<Grid2D>) -> (f64, Grid2D) {
    let g = Grid2D::spanning(-0.5, 0.5, n, -0.5, 0.5, n).unwrap();
    let p = forward_transform(&GraphSurface::from_fn(g, Signature::Euclidean, f), &WeightFunction::minimal()).unwrap();
    let t = target.unwrap_or_else(|| image_box(&p, &ResampleOptions::default()).unwrap());
    let r = resample_onto(&p, &t).unwrap();
    (round_trip_defect(&p, &r).unwrap(), t)
}

#[test]
fn minimal_involution_on_tilted_plane() {
    let (d, _) = round_trip(21, |x, _| x, None);
    assert!(d < 1e-10, "{d}");
}

#[test]
fn minimal_involution_on_scherk_is_second_order() {
    let scherk = |x: f64, y: f64| (y.cos() / x.cos()).ln();
    let (a, t) = round_trip(21, scherk, None);
    let (b, _) = round_trip(41, scherk, Some(t.refined()));
    assert!((3.0..5.0).contains(&(a / b)), "{a} {b}");
}

#[test]
fn potential_jacobian_is_symmetric_and_positive() {
    let asym = |n: usize| {
        let g = Grid2D::spanning(-0.5, 0.5, n, -0.5, 0.5, n).unwrap();
        let s = GraphSurface::from_fn(g, Signature::Euclidean, |x, y| -(x.cos() * y.cos()).ln());
        let p = forward_transform(&s, &WeightFunction::linear(1.0).unwrap()).unwrap();
        let [pxx, pxy, pyx, pyy] = potential_jacobian(&p.potential);
        let mut worst: f64 = 0.0;
        for k in (0..g.len()).filter(|&k| g.is_inner(k, 2)) {
            assert!(pxx[k] > 0.0 && pxx[k] * pyy[k] - pxy[k] * pyx[k] > 0.0);
            worst = worst.max((pxy[k] - pyx[k]).abs());
        }
        worst
    };
    let (a, b) = (asym(21), asym(41));
    assert!(b < a && a / b > 3.0, "{a} {b}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn image_normals_are_unit(q in prop::array::uniform3(-1.0f64..1.0), c in 0.2f64..2.0) {
        let [a, b, e] = q;
        let g = Grid2D::spanning(-0.5, 0.5, 15, -0.5, 0.5, 15).unwrap();
        let s = GraphSurface::from_fn(g, Signature::Euclidean, move |x, y| a * x * x + b * x * y + e * y * y);
        let p = forward_transform(&s, &WeightFunction::linear(c).unwrap()).unwrap();
        prop_assert!(p.gaussmap_defect().stats(true).max <= 1e-12);
        let ls = GraphSurface::from_fn(g, Signature::Lorentzian, move |x, y| 0.5 * (a * x * x + b * x * y + e * y * y));
        let lp = inverse_transform(&ls, &WeightFunction::linear(-c).unwrap()).unwrap();
        prop_assert!(lp.gaussmap_defect().stats(true).max <= 1e-12);
    }

    #[test]
    fn plane_images_are_exact(a in -2.0f64..2.0, b in -2.0f64..2.0) {
        // a plane's Hessian system is constant, so its potential is linear
        let g = Grid2D::spanning(0.0, 1.0, 11, 0.0, 1.0, 11).unwrap();
        let s = GraphSurface::from_fn(g, Signature::Euclidean, move |x, y| a * x + b * y);
        let p = forward_transform(&s, &WeightFunction::minimal()).unwrap();
        let w = (1.0 + a * a + b * b).sqrt();
        for k in 0..g.len() {
            let (x, y) = g.point(k);
            let px = ((1.0 + a * a) * x + a * b * y) / w;
            let py = (a * b * x + (1.0 + b * b) * y) / w;
            prop_assert!((p.image_points[k][0] - px).abs() < 1e-12);
            prop_assert!((p.image_points[k][1] - py).abs() < 1e-12);
        }
    }
}
