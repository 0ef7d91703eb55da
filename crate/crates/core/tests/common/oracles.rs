//! Independent reference computations for tests. Standard library only;
//! nothing here calls into the crate under test.
#![allow(dead_code, clippy::too_many_arguments)]

use std::f64::consts::{FRAC_1_SQRT_2, PI};

/// Recursive adaptive Simpson on `[a, b]` to absolute tolerance `tol`.
pub fn adaptive_simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    fn step(f: &dyn Fn(f64) -> f64, a: f64, b: f64, fa: f64, fm: f64, fb: f64, whole: f64, tol: f64, depth: u32) -> f64 {
        let m = 0.5 * (a + b);
        let lm = 0.5 * (a + m);
        let rm = 0.5 * (m + b);
        let flm = f(lm);
        let frm = f(rm);
        let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
        let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= 15.0 * tol {
            left + right + delta / 15.0
        } else {
            step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
                + step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
        }
    }
    let fa = f(a);
    let fb = f(b);
    let m = 0.5 * (a + b);
    let fm = f(m);
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    step(f, a, b, fa, fm, fb, whole, tol, 48)
}

/// `∫_a^b f` split into `pieces` equal adaptive-Simpson subintervals with a
/// relative target, for integrands with a known rough scale.
pub fn adaptive_simpson_pieces(f: &dyn Fn(f64) -> f64, a: f64, b: f64, pieces: usize, rel_tol: f64) -> f64 {
    let h = (b - a) / pieces as f64;
    // Coarse pass to fix an absolute tolerance.
    let coarse: f64 = (0..pieces)
        .map(|i| {
            let x0 = a + i as f64 * h;
            h / 6.0 * (f(x0) + 4.0 * f(x0 + 0.5 * h) + f(x0 + h))
        })
        .sum();
    let tol = rel_tol * coarse.abs() / pieces as f64;
    (0..pieces).map(|i| adaptive_simpson(f, a + i as f64 * h, a + (i + 1) as f64 * h, tol)).sum()
}

/// `φ(x)/x · Σ (-1)^k (2k-1)!!/x^{2k}` truncated at its smallest term.
pub fn normal_tail_asymptotic(x: f64) -> f64 {
    let mut sum = 1.0;
    let mut term: f64 = 1.0;
    let mut k = 1.0;
    loop {
        let next = -term * (2.0 * k - 1.0) / (x * x);
        if next.abs() >= term.abs() || next.abs() < 1e-20 {
            break;
        }
        sum += next;
        term = next;
        k += 1.0;
    }
    (-0.5 * x * x).exp() / ((2.0 * PI).sqrt() * x) * sum
}

/// Standard normal upper tail by the erf Maclaurin series, for |x| ≲ 6.
pub fn normal_tail_series(x: f64) -> f64 {
    let phi = (-0.5 * x * x).exp() / (2.0 * PI).sqrt();
    let mut term = x;
    let mut sum = x;
    let mut n = 0.0;
    while term.abs() > 1e-18 * sum.abs().max(1e-300) {
        n += 1.0;
        term *= x * x / (2.0 * n + 1.0);
        sum += term;
    }
    0.5 - phi * sum
}

/// Standard normal CDF `Φ(z)` via the series / asymptotic tail oracles.
pub fn normal_cdf(z: f64) -> f64 {
    if z < -6.0 {
        normal_tail_asymptotic(-z)
    } else if z > 6.0 {
        1.0 - normal_tail_asymptotic(z)
    } else {
        1.0 - normal_tail_series(z)
    }
}

fn ln_factorials(n: usize) -> Vec<f64> {
    let mut v = vec![0.0; n + 1];
    for i in 1..=n {
        v[i] = v[i - 1] + (i as f64).ln();
    }
    v
}

/// Gray-coded DQPSK bit error probability from the Marcum-Q closed form
/// `Q₁(a, b) - ½ I₀(ab) e^{-(a²+b²)/2}`, `a, b = √(2γ(1 ∓ 1/√2))`,
/// summed as `e^{-(a²+b²)/2} [½ I₀(ab) + Σ_{k≥1} (a/b)^k I_k(ab)]`.
pub fn dqpsk_marcum(gamma: f64) -> f64 {
    if gamma == 0.0 {
        return 0.5;
    }
    let a = (2.0 * gamma * (1.0 - FRAC_1_SQRT_2)).sqrt();
    let b = (2.0 * gamma * (1.0 + FRAC_1_SQRT_2)).sqrt();
    let x = a * b;
    let damp = -0.5 * (a * a + b * b);
    let lf = ln_factorials(4000);
    // e^{damp} I_k(x) as a sum of positive log-terms.
    let scaled_bessel = |k: usize| -> f64 {
        let mut s = 0.0;
        for j in 0..3000 {
            let lt = damp + (2 * j + k) as f64 * (0.5 * x).ln() - lf[j] - lf[j + k];
            let t = lt.exp();
            s += t;
            if j as f64 > 0.5 * x && t < 1e-18 * s {
                break;
            }
        }
        s
    };
    let mut total = 0.5 * scaled_bessel(0);
    let ratio = a / b;
    let mut w = 1.0;
    for k in 1..400 {
        w *= ratio;
        let t = w * scaled_bessel(k);
        total += t;
        if t < 1e-18 * total {
            break;
        }
    }
    total
}
