#![allow(dead_code)]

//! Independent reference implementations used only by tests.

/// Logistic map written directly, without the library's helpers.
fn sigma_pair(y: f64) -> (f64, f64) {
    if y >= 0.0 {
        let e = (-y).exp();
        (1.0 / (1.0 + e), e / (1.0 + e))
    } else {
        let e = y.exp();
        (e / (1.0 + e), 1.0 / (1.0 + e))
    }
}

/// Drift as a function of log-odds `y`.
pub fn drift_y(y: f64, gamma: f64, alpha: f64, t: f64) -> f64 {
    let (x, w) = sigma_pair(y);
    x.powf(alpha - 1.0) - w.powf(alpha - 1.0) - gamma - t * y
}

/// All QRE for `T > 0`: dense uniform scan in log-odds with `n` subintervals,
/// each sign change refined by plain bisection.
pub fn oracle_roots(gamma: f64, alpha: f64, t: f64, n: usize) -> Vec<f64> {
    assert!(t > 0.0);
    // |x^(a-1) - w^(a-1)| <= 1, so f has fixed sign beyond these.
    let lo = -(1.0 + gamma) / t - 1.0;
    let hi = (1.0 - gamma) / t + 1.0;
    let f = |y: f64| drift_y(y, gamma, alpha, t);
    let mut roots = Vec::new();
    let mut y0 = lo;
    let mut f0 = f(y0);
    for i in 1..=n {
        let y1 = lo + (hi - lo) * i as f64 / n as f64;
        let f1 = f(y1);
        if f1 == 0.0 {
            roots.push(y1);
        } else if f0 != 0.0 && (f0 < 0.0) != (f1 < 0.0) {
            let (mut a, mut b, mut fa) = (y0, y1, f0);
            for _ in 0..200 {
                let m = 0.5 * (a + b);
                if m == a || m == b {
                    break;
                }
                let fm = f(m);
                if fm == 0.0 {
                    a = m;
                    b = m;
                    break;
                }
                if (fm < 0.0) == (fa < 0.0) {
                    a = m;
                    fa = fm;
                } else {
                    b = m;
                }
            }
            roots.push(0.5 * (a + b));
        }
        y0 = y1;
        f0 = f1;
    }
    roots.into_iter().map(|y| sigma_pair(y).0).collect()
}

/// `T_c` by bisection of the fold condition written in `T` directly:
/// `sqrt(1-2T) - gamma - T ln((1+s)/(1-s)) = 0`, decreasing in `T`.
pub fn oracle_tc(gamma: f64) -> f64 {
    let h = |t: f64| {
        let s = (1.0 - 2.0 * t).sqrt();
        s - gamma - t * ((1.0 + s) / (1.0 - s)).ln()
    };
    let (mut a, mut b) = (1e-300, 0.5);
    for _ in 0..2000 {
        let m = 0.5 * (a + b);
        if m == a || m == b {
            break;
        }
        if h(m) > 0.0 {
            a = m;
        } else {
            b = m;
        }
    }
    0.5 * (a + b)
}
