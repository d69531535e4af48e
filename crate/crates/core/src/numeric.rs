//! Small scalar utilities.

/// Minimiser of a unimodal `f` on `[a, b]` by golden-section search.
pub fn golden_section<F: Fn(f64) -> f64>(f: F, mut a: f64, mut b: f64, tol: f64) -> f64 {
    let r = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = b - r * (b - a);
    let mut d = a + r * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    while (b - a).abs() > tol * (1.0 + a.abs() + b.abs()) {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - r * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + r * (b - a);
            fd = f(d);
        }
    }
    0.5 * (a + b)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finds_parabola_vertex() {
        let x = golden_section(|x| (x - 1.25).powi(2), -4.0, 4.0, 1e-12);
        assert!((x - 1.25).abs() < 1e-8);
    }

    #[test]
    fn finds_kink_of_abs() {
        let x = golden_section(|x| (2.0 * x + 4.0).abs().max((x - 1.0).abs()), -4.0, 4.0, 1e-13);
        // |2x+4| = |x−1| at x = −1
        assert!((x + 1.0).abs() < 1e-9);
    }
}
