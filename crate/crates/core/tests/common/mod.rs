//! Independent oracles shared by the integration tests.
#![allow(dead_code, clippy::excessive_precision)]

use nalgebra::{Matrix2, Vector2};

const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
];
const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];
const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

fn kronrod(f: &dyn Fn(f64) -> f64, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut k = WGK[7] * fc;
    let mut g = WG[3] * fc;
    for j in 0..7 {
        let s = f(c - h * XGK[j]) + f(c + h * XGK[j]);
        k += WGK[j] * s;
        if j % 2 == 1 {
            g += WG[j / 2] * s;
        }
    }
    (k * h, ((k - g) * h).abs())
}

fn adapt(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64, depth: u32) -> f64 {
    let (k, err) = kronrod(f, a, b);
    if err <= tol || depth == 0 {
        return k;
    }
    let m = 0.5 * (a + b);
    adapt(f, a, m, 0.5 * tol, depth - 1) + adapt(f, m, b, 0.5 * tol, depth - 1)
}

/// Adaptive Gauss–Kronrod (7, 15) quadrature of `f` on `[a, b]`.
pub fn integrate(f: impl Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    adapt(&f, a, b, tol, 50)
}

/// Best Hardy constant `sup ∫u²/x^α / ∫u'²` over `u(0) = 0`, from the
/// Frobenius series of `-u'' = λ u / x^α`, `u'(1) = 0`:
/// `u = Σ c_k x^{1 + k m}`, `m = 2 - α`, `c_k = -λ c_{k-1} / ((1 + k m) k m)`.
pub fn hardy_power_law(alpha: f64) -> f64 {
    1.0 / smallest_frobenius_root(alpha)
}

fn slope_at_one(alpha: f64, lambda: f64) -> f64 {
    let m = 2.0 - alpha;
    let (mut c, mut sum) = (1.0, 1.0);
    for k in 1..200 {
        let kf = k as f64;
        c *= -lambda / ((1.0 + kf * m) * kf * m);
        let term = (1.0 + kf * m) * c;
        sum += term;
        if term.abs() < 1e-18 * sum.abs().max(1e-300) && k > 5 {
            break;
        }
    }
    sum
}

pub fn smallest_frobenius_root(alpha: f64) -> f64 {
    let f = |l: f64| slope_at_one(alpha, l);
    let (mut lo, mut hi) = (0.0, 0.01);
    while f(hi).signum() == f(lo).signum() {
        lo = hi;
        hi += 0.01;
        assert!(hi < 100.0, "no root below 100");
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if f(mid).signum() == f(lo).signum() {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Frobenius eigenfunction and its derivative (unnormalized).
pub fn frobenius_mode(alpha: f64) -> (impl Fn(f64) -> f64, impl Fn(f64) -> f64) {
    let lambda = smallest_frobenius_root(alpha);
    let m = 2.0 - alpha;
    let mut coef = vec![1.0];
    for k in 1..60 {
        let kf = k as f64;
        let prev = coef[k - 1];
        coef.push(-lambda * prev / ((1.0 + kf * m) * kf * m));
    }
    let c2 = coef.clone();
    (
        move |x: f64| {
            coef.iter()
                .enumerate()
                .map(|(k, c)| c * x.powf(1.0 + k as f64 * m))
                .sum()
        },
        move |x: f64| {
            c2.iter()
                .enumerate()
                .map(|(k, c)| {
                    let p = 1.0 + k as f64 * m;
                    c * p * x.powf(p - 1.0)
                })
                .sum()
        },
    )
}

/// Static solution `z = p x² + q x³` from the boundary rows
/// `β z(1) − z'''(1) = λ`, `z''(1) + γ z'(1) = μ`.
pub fn static_cubic(lambda: f64, mu: f64, beta: f64, gamma: f64) -> (f64, f64) {
    let a = Matrix2::new(beta, beta - 6.0, 2.0 + 2.0 * gamma, 6.0 + 3.0 * gamma);
    let s = a
        .lu()
        .solve(&Vector2::new(lambda, mu))
        .expect("regular boundary system");
    (s[0], s[1])
}

/// Least-squares slope of `-ln E` against `t` over samples with `t ≥ from`
/// and `E` above `floor`.
pub fn fitted_decay_rate(t: &[f64], e: &[f64], from: f64, floor: f64) -> Option<f64> {
    let pts: Vec<(f64, f64)> = t
        .iter()
        .zip(e)
        .filter(|(&ti, &ei)| ti >= from && ei > floor)
        .map(|(&ti, &ei)| (ti, ei.ln()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let mt = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let ml = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mt) * (p.1 - ml)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mt).powi(2)).sum();
    Some(-sxy / sxx)
}

#[test]
fn oracles_self_check() {
    assert!((integrate(|x| x.sqrt(), 0.0, 1.0, 1e-13) - 2.0 / 3.0).abs() < 1e-12);
    // a ≡ 1 limit: λ = (π/2)²
    let l = smallest_frobenius_root(0.0);
    assert!((l - std::f64::consts::FRAC_PI_2.powi(2)).abs() < 1e-10);
    let (p, q) = static_cubic(1.0, 0.0, 0.0, 0.0);
    assert!((p - 0.5).abs() < 1e-14 && (q + 1.0 / 6.0).abs() < 1e-14);
}
