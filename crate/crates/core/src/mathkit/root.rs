use crate::error::{Error, Result};
use crate::real::{lit, to_f64, Real};

const MAX_ITER: usize = 400;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RootBracket<T> {
    pub lo: T,
    pub hi: T,
    pub tol: T,
}

impl<T: Real> RootBracket<T> {
    pub fn new(lo: T, hi: T, tol: T) -> Result<Self> {
        if !(lo < hi) || !(tol > T::zero()) || !lo.is_finite() || !hi.is_finite() {
            return Err(Error::Config(format!(
                "bracket needs lo < hi and tol > 0, got [{lo}, {hi}] tol {tol}"
            )));
        }
        Ok(Self { lo, hi, tol })
    }
}

/// Root of a continuous, strictly monotone `f` inside `bracket`.
///
/// Illinois false position safeguarded by bisection. Returns the midpoint
/// of a final bracket of width `≤ tol`.
pub fn find_root_monotone<T: Real, F: FnMut(T) -> T>(mut f: F, bracket: RootBracket<T>) -> Result<T> {
    try_find_root_monotone(|x| Ok(f(x)), bracket)
}

/// As [`find_root_monotone`] for fallible objectives; errors from `f`
/// abort the search unchanged.
pub fn try_find_root_monotone<T, F>(mut f: F, bracket: RootBracket<T>) -> Result<T>
where
    T: Real,
    F: FnMut(T) -> Result<T>,
{
    let RootBracket { mut lo, mut hi, tol } = RootBracket::new(bracket.lo, bracket.hi, bracket.tol)?;
    let mut eval = |x: T| -> Result<T> {
        let y = f(x)?;
        if y.is_finite() {
            Ok(y)
        } else {
            Err(Error::Evaluation { x: to_f64(x) })
        }
    };
    let mut f_lo = eval(lo)?;
    let f_hi = eval(hi)?;
    if f_lo == T::zero() {
        return Ok(lo);
    }
    if f_hi == T::zero() {
        return Ok(hi);
    }
    if f_lo.signum() == f_hi.signum() {
        return Err(Error::Bracket {
            lo: to_f64(lo),
            hi: to_f64(hi),
            f_lo: to_f64(f_lo),
            f_hi: to_f64(f_hi),
        });
    }
    let half = lit::<T>(0.5);
    // Illinois false position: the endpoint kept twice in a row has its
    // value halved, so the bracket closes from both sides. Bisection takes
    // over when three steps fail to halve the bracket.
    let (mut g_lo, mut g_hi) = (f_lo, f_hi);
    let mut kept: Option<bool> = None;
    let mut slow_steps = 0;
    let mut window = hi - lo;
    for _ in 0..MAX_ITER {
        let width = hi - lo;
        if width <= tol {
            break;
        }
        let mid = lo + width * half;
        let x = if slow_steps < 3 {
            let s = hi - g_hi * width / (g_hi - g_lo);
            let margin = tol * lit(0.25);
            if s.is_finite() && s > lo + margin && s < hi - margin {
                s
            } else {
                mid
            }
        } else {
            mid
        };
        let fx = eval(x)?;
        if fx == T::zero() {
            return Ok(x);
        }
        let moved_lo = fx.signum() == f_lo.signum();
        if moved_lo {
            lo = x;
            f_lo = fx;
            g_lo = fx;
            if kept == Some(true) {
                g_hi = g_hi * half;
            }
        } else {
            hi = x;
            g_hi = fx;
            if kept == Some(false) {
                g_lo = g_lo * half;
            }
        }
        kept = Some(moved_lo);
        if hi - lo <= window * half || slow_steps == 3 {
            slow_steps = 0;
            window = hi - lo;
        } else {
            slow_steps += 1;
        }
    }
    Ok(lo + (hi - lo) * half)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mathkit::q_function;
    use proptest::prelude::*;

    #[test]
    fn sqrt_two() {
        let b = RootBracket::new(0.0, 2.0, 1e-12).unwrap();
        let r = find_root_monotone(|x: f64| x * x - 2.0, b).unwrap();
        assert!((r - 2.0_f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn q_half() {
        let b = RootBracket::new(-1.0, 1.0, 1e-12).unwrap();
        let r = try_find_root_monotone(|x: f64| Ok(q_function(x)? - 0.5), b).unwrap();
        assert!(r.abs() < 1e-12);
    }

    #[test]
    fn awgn_bpsk_inversion_against_tabulation() {
        let ber_db = |d: f64| q_function((2.0 * 10f64.powf(d / 10.0)).sqrt()).unwrap();
        let b = RootBracket::new(0.0, 20.0, 1e-10).unwrap();
        let r = find_root_monotone(|d| ber_db(d).log10() + 6.0, b).unwrap();
        // Dense table on a 1e-4 dB grid with linear interpolation in log10 BER.
        let mut prev = (0.0, ber_db(0.0).log10());
        let mut oracle = f64::NAN;
        for i in 1..=200_000 {
            let d = i as f64 * 1e-4;
            let y = ber_db(d).log10();
            if prev.1 > -6.0 && y <= -6.0 {
                oracle = prev.0 + (d - prev.0) * (-6.0 - prev.1) / (y - prev.1);
                break;
            }
            prev = (d, y);
        }
        assert!((r - oracle).abs() < 1e-6, "{r} vs {oracle}");
        assert!((r - 10.5298).abs() < 1e-3);
    }

    #[test]
    fn errors() {
        let b = RootBracket::new(0.0, 1.0, 1e-9).unwrap();
        assert!(matches!(find_root_monotone(|x: f64| x + 1.0, b), Err(Error::Bracket { .. })));
        assert!(matches!(
            find_root_monotone(|x: f64| if x > 0.4 { f64::NAN } else { x - 0.7 }, b),
            Err(Error::Evaluation { .. })
        ));
        assert!(RootBracket::new(1.0, 0.0, 1e-9).is_err());
        assert!(RootBracket::new(0.0, 1.0, 0.0).is_err());
    }

    #[test]
    fn converges_superlinearly_on_smooth_functions() {
        let mut calls = 0;
        let b = RootBracket::new(-10.0, 120.0, 1e-9).unwrap();
        let r = find_root_monotone(
            |d: f64| {
                calls += 1;
                -(d / 10.0) - 0.3 * (d / 10.0).sin() + 4.0
            },
            b,
        )
        .unwrap();
        assert!((-(r / 10.0) - 0.3 * (r / 10.0).sin() + 4.0).abs() < 1e-9);
        assert!(calls < 30, "{calls} evaluations");
    }

    #[test]
    fn decreasing_functions() {
        let b = RootBracket::new(-5.0, 5.0, 1e-13).unwrap();
        let r = find_root_monotone(|x: f64| (-x).exp() - 2.0, b).unwrap();
        assert!((r + 2.0_f64.ln()).abs() < 1e-12);
    }

    proptest! {
        #[test]
        fn deterministic_and_within_tolerance(c in 0.1_f64..50.0, tol in 1e-12_f64..1e-3) {
            let b = RootBracket::new(0.0, 10.0, tol).unwrap();
            let f = |x: f64| x.powi(3) - c;
            let r1 = find_root_monotone(f, b).unwrap();
            let r2 = find_root_monotone(f, b).unwrap();
            prop_assert_eq!(r1.to_bits(), r2.to_bits());
            prop_assert!((r1 - c.cbrt()).abs() <= tol);
        }
    }
}
