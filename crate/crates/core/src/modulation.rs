//! Conditional bit-error probabilities at a fixed instantaneous SNR γ
//! (linear, per bit) for BPSK, DPSK, Gray-coded QPSK and DQPSK.
//!
//! Every result carries its natural log computed without forming the
//! probability first, so curves can be followed far below `1e-300`.

use std::fmt;
use std::str::FromStr;

use crate::error::{domain, Error, Result};
use crate::mathkit::{converge_log, log_graded_legendre, q_function, q_function_log, PeakSide};
use crate::real::{lit, log_add_exp, Real};

/// Default Gauss–Legendre order for the angular integrals.
pub const DEFAULT_ORDER: usize = 64;

/// Order-doubling tolerance for `F(ψ, γ)`.
const F_PSI_TOL: f64 = 1e-12;
/// Order-doubling tolerance for `g(t, ψ)`.
const G_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Scheme {
    Bpsk,
    Dpsk,
    Qpsk,
    Dqpsk,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Detection {
    Coherent,
    Differential,
}

impl Scheme {
    pub const ALL: [Scheme; 4] = [Scheme::Bpsk, Scheme::Dpsk, Scheme::Qpsk, Scheme::Dqpsk];

    pub fn detection(self) -> Detection {
        match self {
            Scheme::Bpsk | Scheme::Qpsk => Detection::Coherent,
            Scheme::Dpsk | Scheme::Dqpsk => Detection::Differential,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Scheme::Bpsk => "BPSK",
            Scheme::Dpsk => "DPSK",
            Scheme::Qpsk => "QPSK",
            Scheme::Dqpsk => "DQPSK",
        }
    }

    pub fn bits_per_symbol(self) -> usize {
        match self {
            Scheme::Bpsk | Scheme::Dpsk => 1,
            Scheme::Qpsk | Scheme::Dqpsk => 2,
        }
    }

    /// Coherent scheme with the same constellation (identity for coherent ones).
    pub fn coherent_counterpart(self) -> Scheme {
        match self {
            Scheme::Dpsk => Scheme::Bpsk,
            Scheme::Dqpsk => Scheme::Qpsk,
            s => s,
        }
    }

    /// Conditional BER at SNR `gamma`; `order` is only used by DQPSK.
    pub fn conditional_ber<T: Real>(self, gamma: T, order: usize) -> Result<ConditionalBer<T>> {
        match self {
            Scheme::Bpsk => ber_bpsk_cond(gamma),
            Scheme::Dpsk => ber_dpsk_cond(gamma),
            Scheme::Qpsk => ber_qpsk_cond(gamma),
            Scheme::Dqpsk => ber_dqpsk_cond(gamma, order),
        }
    }

    /// Natural log of the conditional BER only.
    pub fn log_conditional_ber<T: Real>(self, gamma: T, order: usize) -> Result<T> {
        match self {
            Scheme::Bpsk | Scheme::Qpsk => {
                check_gamma(gamma)?;
                q_function_log((lit::<T>(2.0) * gamma).sqrt())
            }
            Scheme::Dpsk => {
                check_gamma(gamma)?;
                Ok(lit::<T>(0.5).ln() - gamma)
            }
            Scheme::Dqpsk => log_ber_dqpsk(gamma, order),
        }
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "bpsk" => Ok(Scheme::Bpsk),
            "dpsk" => Ok(Scheme::Dpsk),
            "qpsk" => Ok(Scheme::Qpsk),
            "dqpsk" => Ok(Scheme::Dqpsk),
            other => Err(Error::Config(format!("unknown scheme `{other}`"))),
        }
    }
}

/// Bit-error probability at a fixed SNR together with its natural log.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConditionalBer<T> {
    pub gamma: T,
    pub value: T,
    pub log_value: T,
}

fn check_gamma<T: Real>(gamma: T) -> Result<()> {
    if gamma >= T::zero() && gamma.is_finite() {
        Ok(())
    } else {
        Err(domain(format!("instantaneous SNR must be finite and ≥ 0, got {gamma}")))
    }
}

/// `Q(√(2γ))`.
pub fn ber_bpsk_cond<T: Real>(gamma: T) -> Result<ConditionalBer<T>> {
    check_gamma(gamma)?;
    let x = (lit::<T>(2.0) * gamma).sqrt();
    Ok(ConditionalBer { gamma, value: q_function(x)?, log_value: q_function_log(x)? })
}

/// `½ e^{-γ}`.
pub fn ber_dpsk_cond<T: Real>(gamma: T) -> Result<ConditionalBer<T>> {
    check_gamma(gamma)?;
    let half = lit::<T>(0.5);
    Ok(ConditionalBer { gamma, value: half * (-gamma).exp(), log_value: half.ln() - gamma })
}

/// Per-bit BER of Gray-coded QPSK, identical to BPSK at the same bit SNR.
pub fn ber_qpsk_cond<T: Real>(gamma: T) -> Result<ConditionalBer<T>> {
    ber_bpsk_cond(gamma)
}

/// Geometry of `a(θ) = 1 - cos ψ cos θ` on `[0, π/2]`.
#[derive(Debug, Clone, Copy)]
struct AngularShape<T> {
    cos_psi: T,
    side: PeakSide,
    a_min: T,
}

impl<T: Real> AngularShape<T> {
    fn new(psi: T) -> Result<Self> {
        if !psi.is_finite() {
            return Err(domain(format!("angle must be finite, got {psi}")));
        }
        let c = psi.cos();
        if !(T::one() - c > lit(1e-14)) {
            return Err(domain(format!("1 - cos ψ cos θ vanishes on [0, π/2] for ψ = {psi}")));
        }
        let (side, a_min) = if c > T::zero() {
            (PeakSide::Lower, T::one() - c)
        } else if c < T::zero() {
            (PeakSide::Upper, T::one())
        } else {
            (PeakSide::Flat, T::one())
        };
        Ok(Self { cos_psi: c, side, a_min })
    }

    /// `(a, a - a_min)` at distance `d` from the peaked endpoint.
    fn at(&self, theta: T, d: T) -> (T, T) {
        let c = self.cos_psi;
        match self.side {
            PeakSide::Lower => {
                let s = (d * lit(0.5)).sin();
                let da = lit::<T>(2.0) * c * s * s;
                (self.a_min + da, da)
            }
            PeakSide::Upper => {
                let da = -c * d.sin();
                (T::one() + da, da)
            }
            PeakSide::Flat => (T::one() - c * theta.cos(), T::zero()),
        }
    }

    /// Distance over which `exp(-rate · (a - a_min))` falls by `e`.
    fn width(&self, rate: T) -> T {
        let c = self.cos_psi.abs();
        if !(rate > T::zero()) || c == T::zero() {
            return T::FRAC_PI_2();
        }
        match self.side {
            PeakSide::Lower => (lit::<T>(2.0) / (rate * c)).sqrt(),
            PeakSide::Upper => (rate * c).recip(),
            PeakSide::Flat => T::FRAC_PI_2(),
        }
    }
}

/// `ln ∫_0^{π/2} exp(kernel(a, a - a_min)) dθ` with `a = 1 - cos ψ cos θ`.
///
/// `rate` is the local decay of `-kernel` in `a` at `a_min`; it sets the
/// panel grading. Converged by order doubling to `tol`.
pub(crate) fn log_angular_integral<T, K>(psi: T, rate: T, order: usize, tol: f64, kernel: K) -> Result<T>
where
    T: Real,
    K: Fn(T, T) -> T,
{
    let shape = AngularShape::new(psi)?;
    let width = shape.width(rate);
    let (v, _) = converge_log(order, tol, |n| {
        log_graded_legendre(
            |theta, d| {
                let (a, da) = shape.at(theta, d);
                kernel(a, da)
            },
            T::zero(),
            T::FRAC_PI_2(),
            shape.side,
            width,
            n,
        )
    })?;
    Ok(v)
}

pub(crate) fn angular_a_min<T: Real>(psi: T) -> Result<T> {
    Ok(AngularShape::new(psi)?.a_min)
}

/// `(sign, ln |F(ψ, γ)|)`.
fn log_abs_f_psi<T: Real>(psi: T, gamma: T, order: usize) -> Result<(T, T)> {
    check_gamma(gamma)?;
    let a_min = angular_a_min(psi)?;
    let two_g = lit::<T>(2.0) * gamma;
    let integral = log_angular_integral(psi, two_g + a_min.recip(), order, F_PSI_TOL, |a, da| {
        -two_g * da - a.ln()
    })?;
    let s = psi.sin();
    Ok((s.signum(), s.abs().ln() - T::TAU().ln() - two_g * a_min + integral))
}

/// `F(ψ, γ) = (sin ψ / 2π) ∫_0^{π/2} exp(-2γ(1 - cos ψ cos θ)) / (1 - cos ψ cos θ) dθ`.
pub fn f_psi<T: Real>(psi: T, gamma: T, order: usize) -> Result<T> {
    let (sign, log_abs) = log_abs_f_psi(psi, gamma, order)?;
    Ok(sign * log_abs.exp())
}

fn log_ber_dqpsk<T: Real>(gamma: T, order: usize) -> Result<T> {
    let quarter = T::FRAC_PI_4();
    let (_, l1) = log_abs_f_psi(quarter, gamma, order)?;
    let (_, l2) = log_abs_f_psi(lit::<T>(5.0) * quarter, gamma, order)?;
    // F(5π/4, γ) < 0, so the difference is a sum of magnitudes.
    Ok(log_add_exp(l1, l2).min(lit::<T>(0.5).ln()))
}

/// Gray-coded DQPSK: `F(π/4, γ) - F(5π/4, γ)`.
pub fn ber_dqpsk_cond<T: Real>(gamma: T, order: usize) -> Result<ConditionalBer<T>> {
    let log_value = log_ber_dqpsk(gamma, order)?;
    Ok(ConditionalBer { gamma, value: log_value.exp(), log_value })
}

/// `ln g(t, ψ)` with `g(t, ψ) = ∫_0^{π/2} (1 - cos ψ cos θ)^{-(t+2)} dθ`.
pub fn log_g_integral<T: Real>(t: T, psi: T, order: usize) -> Result<T> {
    let power = t + lit(2.0);
    if !t.is_finite() || !(power > T::zero()) {
        return Err(domain(format!("g(t, ψ) needs finite t > -2, got {t}")));
    }
    let a_min = angular_a_min(psi)?;
    let integral = log_angular_integral(psi, power / a_min, order, G_TOL, |_, da| {
        -power * (da / a_min).ln_1p()
    })?;
    Ok(integral - power * a_min.ln())
}

/// `g(t, ψ)`; overflows to `+∞` for very large `t` at `ψ = π/4`, where
/// [`log_g_integral`] stays finite.
pub fn g_integral<T: Real>(t: T, psi: T, order: usize) -> Result<T> {
    Ok(log_g_integral(t, psi, order)?.exp())
}
