//! Embedded Dormand–Prince 5(4) stepper with step-level access.

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;

const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

const SAFETY: f64 = 0.9;
const MIN_FACTOR: f64 = 0.2;
const MAX_FACTOR: f64 = 5.0;

/// Result of one trial step.
#[derive(Debug, Clone, Copy)]
pub struct Trial<const N: usize> {
    pub y: [f64; N],
    /// Derivative at the new point (first stage of the next step).
    pub dy: [f64; N],
    /// Weighted RMS error estimate; the step is acceptable when `≤ 1`.
    pub err: f64,
}

fn lin<const N: usize>(y: &[f64; N], h: f64, terms: &[(f64, &[f64; N])]) -> [f64; N] {
    let mut out = *y;
    for (i, o) in out.iter_mut().enumerate() {
        let mut s = 0.0;
        for (c, k) in terms {
            s += c * k[i];
        }
        *o += h * s;
    }
    out
}

/// One Dormand–Prince step of size `h` from `(t, y)` with `k1 = f(t, y)`.
pub fn dp45_step<F, const N: usize>(
    f: &F,
    t: f64,
    y: &[f64; N],
    k1: &[f64; N],
    h: f64,
    rtol: f64,
    atol: f64,
) -> Trial<N>
where
    F: Fn(f64, &[f64; N]) -> [f64; N],
{
    let k2 = f(t + C2 * h, &lin(y, h, &[(A21, k1)]));
    let k3 = f(t + C3 * h, &lin(y, h, &[(A31, k1), (A32, &k2)]));
    let k4 = f(t + C4 * h, &lin(y, h, &[(A41, k1), (A42, &k2), (A43, &k3)]));
    let k5 = f(
        t + C5 * h,
        &lin(y, h, &[(A51, k1), (A52, &k2), (A53, &k3), (A54, &k4)]),
    );
    let k6 = f(
        t + h,
        &lin(
            y,
            h,
            &[(A61, k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)],
        ),
    );
    let y_new = lin(
        y,
        h,
        &[(B1, k1), (B3, &k3), (B4, &k4), (B5, &k5), (B6, &k6)],
    );
    let k7 = f(t + h, &y_new);
    let mut sum = 0.0;
    for i in 0..N {
        let e = h
            * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
        let sc = atol + rtol * y[i].abs().max(y_new[i].abs());
        sum += (e / sc).powi(2);
    }
    Trial {
        y: y_new,
        dy: k7,
        err: (sum / N as f64).sqrt(),
    }
}

/// Step-size factor from an error estimate.
pub fn step_factor(err: f64) -> f64 {
    if err == 0.0 {
        MAX_FACTOR
    } else {
        (SAFETY * err.powf(-0.2)).clamp(MIN_FACTOR, MAX_FACTOR)
    }
}

/// Starting step from the initial derivative.
pub fn initial_step<const N: usize>(y: &[f64; N], dy: &[f64; N], rtol: f64, atol: f64) -> f64 {
    let mut d0 = 0.0;
    let mut d1 = 0.0;
    for i in 0..N {
        let sc = atol + rtol * y[i].abs();
        d0 += (y[i] / sc).powi(2);
        d1 += (dy[i] / sc).powi(2);
    }
    let (d0, d1) = ((d0 / N as f64).sqrt(), (d1 / N as f64).sqrt());
    if d0 < 1e-5 || d1 < 1e-5 {
        1e-6
    } else {
        0.01 * d0 / d1
    }
}

/// Find `s ∈ (lo, hi]` with `g(s) ≈ 0` given `g(lo)` and `g(hi)` of opposite
/// sign (Illinois false position). Returns the best iterate and its residual.
pub fn illinois<G>(
    mut g: G,
    lo: f64,
    hi: f64,
    g_lo: f64,
    g_hi: f64,
    tol: f64,
    max_iter: usize,
) -> (f64, f64)
where
    G: FnMut(f64) -> f64,
{
    let h = hi - lo;
    let (mut a, mut fa) = (lo, g_lo);
    let (mut b, mut fb) = (hi, g_hi);
    let mut side = 0i8;
    let mut best = (b, fb);
    for _ in 0..max_iter {
        let s = if fb != fa {
            (a * fb - b * fa) / (fb - fa)
        } else {
            0.5 * (a + b)
        };
        let s = if s <= a.min(b) || s >= a.max(b) {
            0.5 * (a + b)
        } else {
            s
        };
        let fs = g(s);
        if fs.abs() < best.1.abs() {
            best = (s, fs);
        }
        if fs.abs() < tol || (b - a).abs() < 1e-15 * h.abs().max(1.0) {
            return (s, fs);
        }
        if fs * fb < 0.0 {
            a = b;
            fa = fb;
            b = s;
            fb = fs;
            side = 0;
        } else {
            b = s;
            fb = fs;
            if side == -1 {
                fa *= 0.5;
            }
            side = -1;
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponential_decay_is_fifth_order() {
        let f = |_t: f64, y: &[f64; 1]| [-y[0]];
        let err_at = |h: f64| {
            let mut y = [1.0];
            let mut t = 0.0;
            while t < 1.0 - 1e-12 {
                let k1 = f(t, &y);
                y = dp45_step(&f, t, &y, &k1, h, 1e-6, 1e-6).y;
                t += h;
            }
            (y[0] - (-1.0f64).exp()).abs()
        };
        let ratio = err_at(0.1) / err_at(0.05);
        assert!(ratio > 25.0 && ratio < 40.0, "ratio {ratio}");
    }

    #[test]
    fn error_estimate_is_small_for_smooth_problem() {
        let f = |_t: f64, y: &[f64; 2]| [y[1], -y[0]];
        let y = [1.0, 0.0];
        let k1 = f(0.0, &y);
        let tr = dp45_step(&f, 0.0, &y, &k1, 0.01, 1e-8, 1e-10);
        assert!(tr.err < 1.0);
        let big = dp45_step(&f, 0.0, &y, &k1, 1.0, 1e-8, 1e-10);
        assert!(big.err > 1.0);
    }

    #[test]
    fn illinois_finds_root() {
        let (s, g) = illinois(|s| s * s - 0.3, 0.0, 1.0, -0.3, 0.7, 1e-14, 100);
        assert!(g.abs() < 1e-14);
        assert!((s - 0.3f64.sqrt()).abs() < 1e-13);
    }
}
