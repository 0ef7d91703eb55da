use crate::channel::SmallGammaExpansion;
use crate::error::{domain, Result};
use crate::modulation::log_g_integral;
use crate::real::{lit, log_add_exp, Real};

use super::Ber;

fn ln_gbar<T: Real>(gbar_db: T) -> Result<T> {
    if !gbar_db.is_finite() {
        return Err(domain(format!("average SNR must be finite, got {gbar_db} dB")));
    }
    Ok(gbar_db * lit::<T>(0.1) * T::LN_10())
}

/// `ln c − ln(t+1) − (t+1) ln γ̄`, the part shared by all leading terms.
fn common<T: Real>(e: &SmallGammaExpansion<T>, gbar_db: T) -> Result<T> {
    let t1 = e.diversity_order();
    Ok(e.log_c()? - t1.ln() - t1 * ln_gbar(gbar_db)?)
}

/// `c Γ(t+3/2) / (2√π (t+1) γ̄^{t+1})`; BPSK and QPSK.
pub fn asym_ber_coherent<T: Real>(e: &SmallGammaExpansion<T>, gbar_db: T) -> Result<Ber<T>> {
    let t = e.t();
    let two = lit::<T>(2.0);
    let l = common(e, gbar_db)? + (t + lit(1.5)).ln_gamma() - (two * T::PI().sqrt()).ln();
    Ok(Ber::from_log(l))
}

/// `c Γ(t+2) / (2 (t+1) γ̄^{t+1})`.
pub fn asym_ber_dpsk<T: Real>(e: &SmallGammaExpansion<T>, gbar_db: T) -> Result<Ber<T>> {
    let t = e.t();
    let l = common(e, gbar_db)? + (t + lit(2.0)).ln_gamma() - T::LN_2();
    Ok(Ber::from_log(l))
}

/// `ln(g(t, π/4) + g(t, 5π/4))`.
fn log_g_sum<T: Real>(t: T, order: usize) -> Result<T> {
    let q = T::FRAC_PI_4();
    Ok(log_add_exp(log_g_integral(t, q, order)?, log_g_integral(t, lit::<T>(5.0) * q, order)?))
}

/// `c Γ(t+2) [g(t, π/4) + g(t, 5π/4)] / (2^{t+2} √2 π (t+1) γ̄^{t+1})`.
pub fn asym_ber_dqpsk<T: Real>(e: &SmallGammaExpansion<T>, gbar_db: T, order: usize) -> Result<Ber<T>> {
    let t = e.t();
    let two = lit::<T>(2.0);
    let l = common(e, gbar_db)? + (t + two).ln_gamma() + log_g_sum(t, order)?
        - (t + two + lit(0.5)) * T::LN_2()
        - T::PI().ln();
    Ok(Ber::from_log(l))
}

fn check_t<T: Real>(t: T) -> Result<()> {
    if t >= T::zero() && t.is_finite() {
        Ok(())
    } else {
        Err(domain(format!("penalty factors need finite t ≥ 0, got {t}")))
    }
}

fn check_m<T: Real>(m: T) -> Result<()> {
    if m >= lit(0.5) && m.is_finite() {
        Ok(())
    } else {
        Err(domain(format!("Nakagami m must be finite and ≥ 0.5, got {m}")))
    }
}

fn to_db_per_order<T: Real>(t: T, ln_ratio: T) -> T {
    lit::<T>(10.0) / (t + T::one()) * ln_ratio / T::LN_10()
}

// Valid for any t > −1; the public entry points restrict the domain.
fn dpsk_penalty<T: Real>(t: T) -> T {
    let ln_ratio = T::PI().sqrt().ln() + (t + lit(2.0)).ln_gamma() - (t + lit(1.5)).ln_gamma();
    to_db_per_order(t, ln_ratio)
}

fn dqpsk_penalty<T: Real>(t: T, order: usize) -> Result<T> {
    let two = lit::<T>(2.0);
    let ln_ratio = (t + two).ln_gamma() + log_g_sum(t, order)?
        - (t + T::one()) * T::LN_2()
        - (T::TAU().sqrt()).ln()
        - (t + lit(1.5)).ln_gamma();
    Ok(to_db_per_order(t, ln_ratio))
}

/// Asymptotic SNR penalty of DPSK relative to BPSK (dB):
/// `(10/(t+1)) log10(√π Γ(t+2) / Γ(t+3/2))`.
pub fn penalty_dpsk_bpsk<T: Real>(t: T) -> Result<T> {
    check_t(t)?;
    Ok(dpsk_penalty(t))
}

/// Asymptotic SNR penalty of DQPSK relative to QPSK (dB):
/// `(10/(t+1)) log10(Γ(t+2) [g(t, π/4) + g(t, 5π/4)] / (2^{t+1} √(2π) Γ(t+3/2)))`.
pub fn penalty_dqpsk_qpsk<T: Real>(t: T, order: usize) -> Result<T> {
    check_t(t)?;
    dqpsk_penalty(t, order)
}

/// DPSK penalty over lognormal-Nakagami with parameter `m`, i.e. at `t = m − 1`.
pub fn penalty_ln_nakagami_dpsk<T: Real>(m: T) -> Result<T> {
    check_m(m)?;
    Ok(dpsk_penalty(m - T::one()))
}

/// DQPSK penalty over lognormal-Nakagami with parameter `m`.
pub fn penalty_ln_nakagami_dqpsk<T: Real>(m: T, order: usize) -> Result<T> {
    check_m(m)?;
    dqpsk_penalty(m - T::one(), order)
}

/// The DQPSK penalty split into its three additive parts (dB).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DqpskPenaltyTerms<T> {
    /// `(10/m) log10(Γ(m+1) / (√(2π) Γ(m+1/2)))`, tends to 0.
    pub gamma_ratio: T,
    /// `−10 log10 2`.
    pub constant: T,
    /// `(10/m) log10(g(m−1, π/4) + g(m−1, 5π/4))`, tends to `10 log10(2+√2)`.
    pub angular: T,
}

impl<T: Real> DqpskPenaltyTerms<T> {
    pub fn total(&self) -> T {
        self.gamma_ratio + self.constant + self.angular
    }
}

pub fn penalty_ln_nakagami_dqpsk_terms<T: Real>(m: T, order: usize) -> Result<DqpskPenaltyTerms<T>> {
    check_m(m)?;
    let t = m - T::one();
    let gamma = (m + T::one()).ln_gamma() - T::TAU().sqrt().ln() - (m + lit(0.5)).ln_gamma();
    Ok(DqpskPenaltyTerms {
        gamma_ratio: to_db_per_order(t, gamma),
        constant: lit::<T>(-10.0) * lit::<T>(2.0).log10(),
        angular: to_db_per_order(t, log_g_sum(t, order)?),
    })
}

/// `10 log10(1 + √2/2)`: the DQPSK penalty as `m → ∞`.
pub fn dqpsk_penalty_limit_db<T: Real>() -> T {
    lit::<T>(10.0) * (T::one() + T::FRAC_1_SQRT_2()).log10()
}
