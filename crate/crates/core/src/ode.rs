//! Fixed-step classical Runge-Kutta for small autonomous-in-form systems.

/// One RK4 step of `y' = f(t, y)`.
pub fn rk4_step<const N: usize, F>(f: &F, t: f64, y: &[f64; N], h: f64) -> [f64; N]
where
    F: Fn(f64, &[f64; N]) -> [f64; N],
{
    let inc = rk4_increment(f, t, y, h);
    axpy(y, 1.0, &inc)
}

/// The change `y(t+h) − y(t)` of one RK4 step, without adding it to `y`.
pub fn rk4_increment<const N: usize, F>(f: &F, t: f64, y: &[f64; N], h: f64) -> [f64; N]
where
    F: Fn(f64, &[f64; N]) -> [f64; N],
{
    let k1 = f(t, y);
    let y2 = axpy(y, 0.5 * h, &k1);
    let k2 = f(t + 0.5 * h, &y2);
    let y3 = axpy(y, 0.5 * h, &k2);
    let k3 = f(t + 0.5 * h, &y3);
    let y4 = axpy(y, h, &k3);
    let k4 = f(t + h, &y4);
    let mut out = [0.0; N];
    for i in 0..N {
        out[i] = h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
    out
}

/// Compensated (Kahan) accumulator for long fixed-step runs.
#[derive(Debug, Clone, Copy)]
pub struct KahanState<const N: usize> {
    pub sum: [f64; N],
    carry: [f64; N],
}

impl<const N: usize> KahanState<N> {
    pub fn new(y: [f64; N]) -> Self {
        Self { sum: y, carry: [0.0; N] }
    }

    pub fn add(&mut self, inc: &[f64; N]) {
        for (i, d) in inc.iter().enumerate() {
            let y = d - self.carry[i];
            let t = self.sum[i] + y;
            self.carry[i] = (t - self.sum[i]) - y;
            self.sum[i] = t;
        }
    }
}

fn axpy<const N: usize>(y: &[f64; N], a: f64, k: &[f64; N]) -> [f64; N] {
    let mut out = *y;
    for i in 0..N {
        out[i] += a * k[i];
    }
    out
}

/// Integrate with constant step `h` (sign gives direction) while `keep_going`
/// accepts the new state. Returns every accepted `(t, y)` including the start.
pub fn integrate_while<const N: usize, F, C>(
    f: F,
    t0: f64,
    y0: [f64; N],
    h: f64,
    max_steps: usize,
    mut keep_going: C,
) -> Vec<(f64, [f64; N])>
where
    F: Fn(f64, &[f64; N]) -> [f64; N],
    C: FnMut(f64, &[f64; N]) -> bool,
{
    let mut out = Vec::with_capacity(max_steps.min(1 << 20) + 1);
    out.push((t0, y0));
    let (mut t, mut y) = (t0, y0);
    for n in 1..=max_steps {
        let next = rk4_step(&f, t, &y, h);
        // recompute t from the step count so long runs do not accumulate drift
        let tn = t0 + n as f64 * h;
        if !next.iter().all(|v| v.is_finite()) || !keep_going(tn, &next) {
            break;
        }
        t = tn;
        y = next;
        out.push((t, y));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn harmonic_oscillator_energy() {
        let f = |_t: f64, y: &[f64; 2]| [y[1], -y[0]];
        let path = integrate_while(f, 0.0, [1.0, 0.0], 1e-3, 6283, |_, _| true);
        let (t, y) = path.last().unwrap();
        assert!((y[0] - t.cos()).abs() < 1e-11);
        assert!((y[0] * y[0] + y[1] * y[1] - 1.0).abs() < 1e-11);
    }

    #[test]
    fn fourth_order() {
        let f = |_t: f64, y: &[f64; 1]| [y[0]];
        let err = |h: f64| {
            let n = (1.0 / h).round() as usize;
            let p = integrate_while(f, 0.0, [1.0], h, n, |_, _| true);
            (p.last().unwrap().1[0] - 1f64.exp()).abs()
        };
        let ratio = err(0.1) / err(0.05);
        assert!((14.0..18.0).contains(&ratio), "ratio {ratio}");
    }

    #[test]
    fn stops_when_predicate_fails() {
        let f = |_t: f64, _y: &[f64; 1]| [-1.0];
        let p = integrate_while(f, 0.0, [1.0], 0.1, 100, |_, y| y[0] > 0.0);
        assert!(p.last().unwrap().1[0] > 0.0);
        assert!(p.len() <= 11);
    }
}
