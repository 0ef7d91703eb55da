use crate::channel::{ChannelModel, DiversityConfig, LognormalChannel};
use crate::error::{domain, Error, Result};
use crate::mathkit::{cached_rule, converge_log, log_graded_legendre, q_function_log, PeakSide, RuleKind, MAX_RULE_ORDER};
use crate::modulation::{angular_a_min, log_angular_integral, Scheme, DEFAULT_ORDER};
use crate::real::{lit, log_add_exp, log_sum_exp, to_f64, Real};

use super::db_to_linear;

/// Starting Gauss–Hermite order of the outer (fading) integral.
pub const DEFAULT_OUTER_ORDER: usize = 64;
/// Relative agreement required between successive outer orders.
pub const REL_TOL: f64 = 1e-8;
/// Relaxed tolerance below [`DEEP_BER`].
pub const DEEP_BER_REL_TOL: f64 = 1e-6;
pub const DEEP_BER: f64 = 1e-25;

/// Tolerance of the inner angular integrals.
const INNER_TOL: f64 = 1e-12;
/// Iteration cap of the mode search.
const MODE_MAX_ITER: usize = 200;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct QuadratureOptions {
    /// Starting order of the outer Gauss–Hermite rule (doubled until converged).
    pub outer_order: usize,
    /// Starting order of inner Gauss–Legendre rules (DQPSK, Nakagami averaging).
    pub inner_order: usize,
}

impl Default for QuadratureOptions {
    fn default() -> Self {
        Self { outer_order: DEFAULT_OUTER_ORDER, inner_order: DEFAULT_ORDER }
    }
}

/// Average BER and the outer order at which it converged.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AverageBer<T> {
    pub value: T,
    pub log_value: T,
    pub order: usize,
}

impl<T: Real> AverageBer<T> {
    pub fn log10(&self) -> T {
        self.log_value / T::LN_10()
    }
}

/// Average BER of `scheme` at average SNR `gbar_db`.
///
/// The fading variable is the standard normal `z` of
/// `γ = γ̄ exp(2σz − σ²)` (the mean SNR `Ω` for lognormal-Nakagami, whose
/// Gamma law is averaged in closed form or by an inner angular rule). The
/// `z`-integral uses a Gauss–Hermite rule centred on the maximum of the
/// integrand and scaled by its curvature, in the log domain, with the order
/// doubled from `opts.outer_order` until successive values agree to
/// [`REL_TOL`] ([`DEEP_BER_REL_TOL`] below [`DEEP_BER`]).
///
/// Selection combining is supported for lognormal branches only; MIMO is not
/// supported. Both return [`Error::Capability`].
pub fn average_ber<T: Real>(
    scheme: Scheme,
    channel: &ChannelModel<T>,
    diversity: DiversityConfig,
    gbar_db: T,
    opts: QuadratureOptions,
) -> Result<AverageBer<T>> {
    if !gbar_db.is_finite() {
        return Err(domain(format!("average SNR must be finite, got {gbar_db} dB")));
    }
    diversity.validate()?;
    let gbar = db_to_linear(gbar_db);
    let inner = opts.inner_order;
    let half = lit::<T>(0.5);
    let (log_value, order) = match (channel, diversity) {
        (_, DiversityConfig::Mimo { .. }) => {
            return Err(Error::Capability("average BER of a MIMO link is not supported".into()))
        }
        (ChannelModel::Lognormal(c), d) => {
            let l = d.branches();
            let lf = lit::<T>(l as f64);
            let h = |z: T| -> Result<T> {
                let mut v = scheme.log_conditional_ber(c.snr_at(z, gbar), inner)? - half * z * z;
                if l > 1 {
                    v = v + lf.ln() + (lf - T::one()) * q_function_log(-z)?;
                }
                Ok(v)
            };
            log_gauss_average(h, z_window(c, gbar), opts.outer_order)?
        }
        (ChannelModel::LognormalNakagami(c), DiversityConfig::None) => {
            let shadow = c.shadowing();
            let m = c.m();
            let h = |z: T| -> Result<T> {
                Ok(log_nakagami_ber(scheme, m, shadow.snr_at(z, gbar), inner)? - half * z * z)
            };
            log_gauss_average(h, z_window(&shadow, gbar), opts.outer_order)?
        }
        (ChannelModel::LognormalNakagami(_), _) => {
            return Err(Error::Capability(
                "selection combining over lognormal-Nakagami branches is not supported".into(),
            ))
        }
    };
    Ok(AverageBer { value: log_value.exp(), log_value, order })
}

/// Search interval for the integrand maximum in `z`.
fn z_window<T: Real>(c: &LognormalChannel<T>, gbar: T) -> (T, T) {
    let reach = (gbar.ln().abs() + lit(50.0)) / (lit::<T>(2.0) * c.sigma());
    (-reach - lit(10.0), lit(10.0))
}

/// Maximiser of a unimodal `h` on `[a, b]` by golden-section search.
fn argmax_unimodal<T: Real, H: Fn(T) -> Result<T>>(h: &H, mut a: T, mut b: T) -> Result<T> {
    let r = lit::<T>(0.5 * (5f64.sqrt() - 1.0));
    let tol = lit::<T>(1e-6);
    let mut c = b - r * (b - a);
    let mut d = a + r * (b - a);
    let mut fc = h(c)?;
    let mut fd = h(d)?;
    for _ in 0..MODE_MAX_ITER {
        if b - a <= tol * (T::one() + c.abs()) {
            break;
        }
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - r * (b - a);
            fc = h(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + r * (b - a);
            fd = h(d)?;
        }
    }
    Ok((a + b) * lit(0.5))
}

/// `ln((2π)^{-1/2} ∫ exp(h(z)) dz)` for a unimodal, roughly Gaussian `exp(h)`.
fn log_gauss_average<T: Real, H: Fn(T) -> Result<T>>(h: H, window: (T, T), start: usize) -> Result<(T, usize)> {
    let z0 = argmax_unimodal(&h, window.0, window.1)?;
    let h0 = h(z0)?;
    let mut scale = T::one();
    for _ in 0..2 {
        let step = (lit::<T>(0.2) * scale).min(lit(0.1));
        let k = -(h(z0 + step)? - lit::<T>(2.0) * h0 + h(z0 - step)?) / (step * step);
        scale = if k > T::zero() && k.is_finite() { k.sqrt().recip() } else { T::one() };
    }
    let spread = lit::<T>(2.0).sqrt() * scale;
    let offset = spread.ln() - lit::<T>(0.5) * T::TAU().ln();
    let eval = |n: usize| -> Result<T> {
        let rule = cached_rule(RuleKind::Hermite, n)?;
        let mut terms = Vec::with_capacity(n);
        for (u, w) in rule.pairs() {
            let u = lit::<T>(u);
            terms.push(lit::<T>(w).ln() + u * u + h(z0 + spread * u)?);
        }
        Ok(offset + log_sum_exp(&terms))
    };
    let mut order = if start >= MAX_RULE_ORDER { MAX_RULE_ORDER / 2 } else { start.max(2) };
    let mut prev = eval(order)?;
    let deep = lit::<T>(DEEP_BER).ln();
    loop {
        let next = (order * 2).min(MAX_RULE_ORDER);
        let cur = eval(next)?;
        let tol = if cur < deep { DEEP_BER_REL_TOL } else { REL_TOL };
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

/// Log BER after averaging the conditional BER over `γ ~ Gamma(m, Ω/m)`.
pub(crate) fn log_nakagami_ber<T: Real>(scheme: Scheme, m: T, omega: T, order: usize) -> Result<T> {
    if !(omega >= T::zero()) || !omega.is_finite() {
        return Err(domain(format!("mean SNR must be finite and ≥ 0, got {omega}")));
    }
    let half = lit::<T>(0.5);
    match scheme {
        Scheme::Dpsk => Ok(half.ln() - m * (omega / m).ln_1p()),
        Scheme::Bpsk | Scheme::Qpsk => {
            // (1/π) ∫_0^{π/2} (1 + x / sin²φ)^{-m} dφ: largest at φ = π/2 and
            // switching on over φ ~ √x near 0. Each half is graded towards
            // its own end.
            let x = omega / m;
            if x == T::zero() {
                return Ok(half.ln());
            }
            let q = T::FRAC_PI_4();
            let (low, _) = converge_log(order, INNER_TOL, |n| {
                log_graded_legendre(
                    |phi: T, _| {
                        let s = phi.sin();
                        -m * (x / (s * s)).ln_1p()
                    },
                    T::zero(),
                    q,
                    PeakSide::Lower,
                    x.sqrt(),
                    n,
                )
            })?;
            // 1 + x/cos²d = (1 + x)(1 + x tan²d/(1 + x)) with d = π/2 − φ.
            let width = ((T::one() + x) / (m * x)).sqrt();
            let (high, _) = converge_log(order, INNER_TOL, |n| {
                log_graded_legendre(
                    |_, d: T| {
                        let tan = d.tan();
                        -m * (x * tan * tan / (T::one() + x)).ln_1p()
                    },
                    q,
                    T::FRAC_PI_2(),
                    PeakSide::Upper,
                    width,
                    n,
                )
            })?;
            Ok(log_add_exp(low, high - m * x.ln_1p()) - T::PI().ln())
        }
        Scheme::Dqpsk => {
            // Each F(ψ, ·) averages to (sin ψ / 2π) ∫ (1 + b a)^{-m} / a dθ, b = 2Ω/m.
            let b = lit::<T>(2.0) * omega / m;
            let log_abs_f = |psi: T| -> Result<T> {
                let a_min = angular_a_min(psi)?;
                let base = T::one() + b * a_min;
                let rate = m * b / base + a_min.recip();
                let integral = log_angular_integral(psi, rate, order, INNER_TOL, |a, da| {
                    -m * (b * da / base).ln_1p() - a.ln()
                })?;
                Ok(psi.sin().abs().ln() - T::TAU().ln() - m * base.ln() + integral)
            };
            let q = T::FRAC_PI_4();
            let l1 = log_abs_f(q)?;
            let l2 = log_abs_f(lit::<T>(5.0) * q)?;
            Ok(log_add_exp(l1, l2).min(half.ln()))
        }
    }
}
