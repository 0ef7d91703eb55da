//! Gauss–Legendre on panels that grow geometrically away from an endpoint
//! peak, accumulated in the log domain.

use crate::error::{Error, Result};
use crate::mathkit::quadrature::{cached_rule, RuleKind, MAX_RULE_ORDER};
use crate::real::{lit, log_sum_exp, to_f64, Real};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum PeakSide {
    Lower,
    Upper,
    /// No concentration; one panel.
    Flat,
}

/// `ln ∫_a^b exp(log_f(x, d)) dx` with panels `[0, w], [w, 2w], [2w, 4w], …`
/// measured from the peaked endpoint. `d` is the exact distance of `x` from
/// that endpoint (from `a` when flat), so kernels can avoid forming `b - x`.
/// `width` is the distance over which `log_f` drops by about one unit.
pub(crate) fn log_graded_legendre<T: Real, F: Fn(T, T) -> T>(
    log_f: F,
    a: T,
    b: T,
    side: PeakSide,
    width: T,
    order: usize,
) -> Result<T> {
    let rule = cached_rule(RuleKind::Legendre, order)?;
    let span = b - a;
    let w = if side == PeakSide::Flat || !(width > T::zero()) || !width.is_finite() {
        span
    } else {
        width.min(span)
    };
    let half = lit::<T>(0.5);
    let mut terms = Vec::with_capacity(order * 8);
    let mut start = T::zero();
    let mut end = w;
    loop {
        let end_c = end.min(span);
        let h = (end_c - start) * half;
        let centre = (start + end_c) * half;
        let ln_h = h.ln();
        for (x, wt) in rule.pairs() {
            let d = centre + h * lit(x);
            let pt = match side {
                PeakSide::Upper => b - d,
                _ => a + d,
            };
            terms.push(ln_h + lit::<T>(wt).ln() + log_f(pt, d));
        }
        if end_c >= span {
            break;
        }
        start = end_c;
        end = end_c + end_c;
    }
    Ok(log_sum_exp(&terms))
}

/// Doubles the order from `start` until successive log-estimates differ by
/// less than `tol` (a relative tolerance on the integral), capped at 512.
/// Returns the finer estimate and its order.
pub(crate) fn converge_log<T, F>(start: usize, tol: f64, mut eval: F) -> Result<(T, usize)>
where
    T: Real,
    F: FnMut(usize) -> Result<T>,
{
    let mut order = if start >= MAX_RULE_ORDER { MAX_RULE_ORDER / 2 } else { start.max(2) };
    let mut prev = eval(order)?;
    loop {
        let next = (order * 2).min(MAX_RULE_ORDER);
        let cur = eval(next)?;
        let diff = to_f64(cur - prev).abs();
        if diff < tol || cur == prev {
            return Ok((cur, next));
        }
        if next == MAX_RULE_ORDER {
            return Err(Error::Accuracy { estimate: to_f64(cur.exp()), error_bound: diff, order: next });
        }
        prev = cur;
        order = next;
    }
}
