use crate::error::{domain, Result};
use crate::real::{lit, Real};

/// Switch point between `ln Q` from `erfc` and the continued-fraction tail.
const TAIL_SWITCH: f64 = 5.0;

/// Upper tail of the standard normal, `Q(x) = ½ erfc(x/√2)`.
///
/// Underflows to a subnormal and then to zero past `x ≈ 38`; use
/// [`q_function_log`] when the tail itself is needed.
pub fn q_function<T: Real>(x: T) -> Result<T> {
    if !x.is_finite() {
        return Err(domain(format!("Q(x) needs a finite argument, got {x}")));
    }
    Ok(lit::<T>(0.5) * (x * T::FRAC_1_SQRT_2()).erfc())
}

/// Natural log of `Q(x)`, finite for every finite `x`.
pub fn q_function_log<T: Real>(x: T) -> Result<T> {
    if !x.is_finite() {
        return Err(domain(format!("ln Q(x) needs a finite argument, got {x}")));
    }
    if x < T::zero() {
        // ln(1 - Q(|x|))
        return Ok((-q_function(-x)?).ln_1p());
    }
    if x <= lit(TAIL_SWITCH) {
        return Ok(q_function(x)?.ln());
    }
    // Q(x) = φ(x) R(x) with R the Mills ratio.
    let ln_phi = -x * x * lit(0.5) - lit::<T>(0.5) * (T::TAU()).ln();
    Ok(ln_phi + mills_ratio(x).ln())
}

/// Mills ratio `Q(x)/φ(x)` by the continued fraction
/// `1/(x + 1/(x + 2/(x + 3/(x + …))))`, evaluated with modified Lentz.
fn mills_ratio<T: Real>(x: T) -> T {
    let tiny = lit::<T>(1e-300).max(T::min_positive_value());
    let eps = T::epsilon();
    let mut f = x;
    let mut c = f;
    let mut d = T::zero();
    for k in 1..500 {
        let a = T::from_usize(k).unwrap();
        d = x + a * d;
        if d.abs() < tiny {
            d = tiny;
        }
        d = d.recip();
        c = x + a / c;
        if c.abs() < tiny {
            c = tiny;
        }
        let delta = c * d;
        f = f * delta;
        if (delta - T::one()).abs() <= eps {
            break;
        }
    }
    f.recip()
}

/// `ln Γ(x)` for `x > 0`.
pub fn log_gamma<T: Real>(x: T) -> Result<T> {
    if !(x > T::zero()) || !x.is_finite() {
        return Err(domain(format!("ln Γ(x) needs x > 0, got {x}")));
    }
    Ok(x.ln_gamma())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    /// Normal tail from the erf Maclaurin series, `Q = ½ - φ(x) Σ x^{2n+1}/(2n+1)!!`.
    fn q_series(x: f64) -> f64 {
        let phi = (-0.5 * x * x).exp() / (2.0 * std::f64::consts::PI).sqrt();
        let mut term = x;
        let mut sum = x;
        let mut n = 0.0;
        while term.abs() > 1e-18 * sum.abs() {
            n += 1.0;
            term *= x * x / (2.0 * n + 1.0);
            sum += term;
        }
        0.5 - phi * sum
    }

    /// Asymptotic tail `φ(x)/x · Σ (-1)^k (2k-1)!!/x^{2k}`, truncated at the smallest term.
    fn ln_q_asymptotic(x: f64) -> f64 {
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
        -0.5 * x * x - 0.5 * (2.0 * std::f64::consts::PI).ln() - x.ln() + sum.ln()
    }

    #[test]
    fn q_at_known_points() {
        assert_eq!(q_function(0.0_f64).unwrap(), 0.5);
        assert!((q_function(-30.0_f64).unwrap() - 1.0).abs() < 1e-15);
        let q = q_function(1.2815515655_f64).unwrap();
        assert!((q - q_series(1.2815515655)).abs() < 1e-14);
        assert!((q - 0.1).abs() < 1e-7);
    }

    #[test]
    fn q_matches_series_oracle() {
        for &x in &[-3.0, -1.0, 0.3, 1.0, 2.0, 3.5] {
            let q = q_function(x).unwrap();
            let r = q_series(x);
            assert!(((q - r) / r).abs() < 1e-12, "x = {x}: {q} vs {r}");
        }
    }

    #[test]
    fn ln_q_tail_matches_asymptotic_oracle() {
        let v = q_function_log(10.0_f64).unwrap();
        assert!((v - ln_q_asymptotic(10.0)).abs() < 1e-12);
        assert!((v + 53.23).abs() < 0.01);
        for &x in &[12.0, 20.0, 40.0, 60.0] {
            let v = q_function_log(x).unwrap();
            assert!((v - ln_q_asymptotic(x)).abs() < 1e-10, "x = {x}");
        }
        assert!(q_function(40.0_f64).unwrap() < 1e-300);
    }

    #[test]
    fn ln_q_routes_agree_around_switch() {
        for &x in &[3.0_f64, 4.0, TAIL_SWITCH, 6.0, 7.0] {
            let direct = q_function(x).unwrap().ln();
            let tail = -0.5 * x * x - 0.5 * std::f64::consts::TAU.ln() + mills_ratio(x).ln();
            assert!((direct - tail).abs() < 1e-12, "x = {x}");
        }
    }

    #[test]
    fn ln_q_lower_tail() {
        assert_eq!(q_function_log(0.0_f64).unwrap(), 0.5_f64.ln());
        let v = q_function_log(-10.0_f64).unwrap();
        assert!(v < 0.0 && v > -1e-22);
    }

    #[test]
    fn non_finite_arguments_are_rejected() {
        assert!(q_function(f64::NAN).is_err());
        assert!(q_function_log(f64::INFINITY).is_err());
        assert!(log_gamma(0.0_f64).is_err());
        assert!(log_gamma(-1.5_f64).is_err());
    }

    #[test]
    fn log_gamma_known_values() {
        assert_eq!(log_gamma(1.0_f64).unwrap(), 0.0);
        let half = log_gamma(0.5_f64).unwrap();
        assert!((half - std::f64::consts::PI.sqrt().ln()).abs() < 1e-15);
        // Stirling series with 7 correction terms.
        let x: f64 = 101.0;
        let b = [1.0 / 12.0, -1.0 / 360.0, 1.0 / 1260.0, -1.0 / 1680.0, 1.0 / 1188.0, -691.0 / 360360.0, 1.0 / 156.0];
        let mut corr = 0.0;
        for (k, c) in b.iter().enumerate() {
            corr += c / x.powi(2 * k as i32 + 1);
        }
        let stirling = (x - 0.5) * x.ln() - x + 0.5 * std::f64::consts::TAU.ln() + corr;
        let v = log_gamma(x).unwrap();
        assert!(((v - stirling) / stirling).abs() < 1e-12);
    }

    #[test]
    fn log_gamma_recurrence() {
        for &x in &[0.5_f64, 1.0, 2.5, 10.0, 100.5] {
            let r = (log_gamma(x + 1.0).unwrap() - log_gamma(x).unwrap()).exp();
            assert!(((r - x) / x).abs() < 1e-11, "x = {x}");
        }
    }

    #[test]
    fn single_precision_is_usable() {
        let q = q_function(1.281_551_6_f32).unwrap();
        assert!((q - 0.1).abs() < 1e-6);
        assert!((q_function_log(10.0_f32).unwrap() + 53.23).abs() < 0.01);
    }

    proptest! {
        #[test]
        fn q_symmetry(x in -8.0_f64..8.0) {
            let s = q_function(x).unwrap() + q_function(-x).unwrap();
            prop_assert!((s - 1.0).abs() < 1e-14);
        }

        #[test]
        fn ln_q_agrees_with_q(x in -5.0_f64..30.0) {
            let q = q_function(x).unwrap();
            let lq = q_function_log(x).unwrap();
            prop_assert!(((lq.exp() - q) / q).abs() < 1e-10);
        }
    }
}
