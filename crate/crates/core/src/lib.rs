//! Bit-error rates of coherent and differential PSK over lognormal and
//! lognormal-Nakagami fading, with selection-combining diversity.
//!
//! The numerical kernels are generic over [`Real`] (`f32` or `f64`); the
//! aliases below fix the scalar to `f64`, which is what the accuracy targets
//! of the library are stated for. Monte Carlo estimation is `f64` only.

// `!(x > 0)` style guards are used on purpose so that NaN is rejected.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod mathkit;
pub mod real;

pub use error::{Error, Result};
pub use real::Real;
pub mod analysis;
pub mod channel;
pub mod modulation;
pub mod montecarlo;

pub use analysis::{average_ber, snr_at_ber, snr_gap_at_ber, snr_range_for_gap, CurveMethod, QuadratureOptions, SolveOptions};
pub use channel::DiversityConfig;
pub use modulation::Scheme;
pub use montecarlo::{bit_level_ber, confidence_interval, semi_analytic_ber, ConfidenceLevel, McEstimate, McMethod};

pub type LognormalChannel64 = channel::LognormalChannel<f64>;
pub type LognormalNakagamiChannel64 = channel::LognormalNakagamiChannel<f64>;
pub type ChannelModel64 = channel::ChannelModel<f64>;
pub type SmallGammaExpansion64 = channel::SmallGammaExpansion<f64>;
pub type AverageBer64 = analysis::AverageBer<f64>;
pub type Ber64 = analysis::Ber<f64>;
pub type BerCurve64 = analysis::BerCurve<f64>;
pub type CurvePoint64 = analysis::CurvePoint<f64>;
pub type SnrGapResult64 = analysis::SnrGapResult<f64>;
pub type SnrRange64 = analysis::SnrRange<f64>;
pub type DqpskPenaltyTerms64 = analysis::DqpskPenaltyTerms<f64>;

#[cfg(test)]
#[path = "../tests/common/oracles.rs"]
pub(crate) mod oracles;
