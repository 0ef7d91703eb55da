//! Average BER over fading by quadrature, leading-order asymptotic BER of
//! the lognormal-Nakagami channel, SNR penalty factors and SNR-gap solvers.
//!
//! SNRs at this level are in dB, `10·log10(γ̄)`.

mod asymptotic;
mod average;
mod curve;
pub mod reference;
mod solve;

pub use asymptotic::{
    asym_ber_coherent, asym_ber_dpsk, asym_ber_dqpsk, dqpsk_penalty_limit_db, penalty_dpsk_bpsk,
    penalty_dqpsk_qpsk, penalty_ln_nakagami_dpsk, penalty_ln_nakagami_dqpsk, penalty_ln_nakagami_dqpsk_terms,
    DqpskPenaltyTerms,
};
pub use average::{average_ber, AverageBer, QuadratureOptions, DEEP_BER, DEEP_BER_REL_TOL, DEFAULT_OUTER_ORDER, REL_TOL};
pub use curve::{BerCurve, CurveMethod, CurvePoint};
pub use solve::{
    snr_at_ber, snr_gap_at_ber, snr_range_for_gap, SnrGapResult, SnrRange, SolveOptions, DEFAULT_BRACKET_DB,
    DEFAULT_SNR_TOL_DB, GAP_SCAN_LEVELS, GAP_SCAN_WINDOW,
};

use crate::real::{lit, Real};

/// `10^{dB/10}`.
pub fn db_to_linear<T: Real>(db: T) -> T {
    (db * lit::<T>(0.1) * T::LN_10()).exp()
}

/// `10·log10(x)`.
pub fn linear_to_db<T: Real>(x: T) -> T {
    lit::<T>(10.0) * x.log10()
}

/// A probability with its natural log.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Ber<T> {
    pub value: T,
    pub log_value: T,
}

impl<T: Real> Ber<T> {
    pub fn from_log(log_value: T) -> Self {
        Self { value: log_value.exp(), log_value }
    }

    pub fn log10(&self) -> T {
        self.log_value / T::LN_10()
    }
}
