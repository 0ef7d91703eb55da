use rayon::prelude::*;

use crate::channel::{ChannelModel, DiversityConfig};
use crate::error::{config, domain, Error, Result};
use crate::mathkit::{try_find_root_monotone, RootBracket};
use crate::modulation::{Detection, Scheme};
use crate::real::{lit, to_f64, Real};

use super::average::{average_ber, QuadratureOptions};

/// Default search interval for average SNRs (dB).
pub const DEFAULT_BRACKET_DB: (f64, f64) = (-10.0, 120.0);
/// Default final bracket width of SNR solves (dB).
pub const DEFAULT_SNR_TOL_DB: f64 = 1e-6;
/// log10 BER window searched by [`snr_range_for_gap`].
pub const GAP_SCAN_WINDOW: (f64, f64) = (-60.0, -2.0);
/// Levels sampled across [`GAP_SCAN_WINDOW`] before refining.
pub const GAP_SCAN_LEVELS: usize = 30;

/// Tolerances of the nested solves in [`snr_range_for_gap`].
const RANGE_SNR_TOL_DB: f64 = 1e-9;
const RANGE_LEVEL_TOL: f64 = 1e-7;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolveOptions {
    pub bracket_db: (f64, f64),
    pub tol_db: f64,
    pub quadrature: QuadratureOptions,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self { bracket_db: DEFAULT_BRACKET_DB, tol_db: DEFAULT_SNR_TOL_DB, quadrature: QuadratureOptions::default() }
    }
}

/// Average SNR (dB) at which the average BER equals `target_ber`.
///
/// Solved on `log10 BER` against dB, which is close to linear.
pub fn snr_at_ber<T: Real>(
    scheme: Scheme,
    channel: &ChannelModel<T>,
    diversity: DiversityConfig,
    target_ber: T,
    opts: &SolveOptions,
) -> Result<T> {
    if !(target_ber > T::zero() && target_ber < lit(0.5)) {
        return Err(domain(format!("target BER must lie in (0, 0.5), got {target_ber}")));
    }
    let goal = target_ber.log10();
    let bracket = RootBracket::new(lit(opts.bracket_db.0), lit(opts.bracket_db.1), lit(opts.tol_db))?;
    try_find_root_monotone(
        |db: T| Ok(average_ber(scheme, channel, diversity, db, opts.quadrature)?.log10() - goal),
        bracket,
    )
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SnrGapResult<T> {
    pub target_ber: T,
    /// SNR of the coherent scheme (dB).
    pub snr_ref_db: T,
    /// SNR of the differential scheme (dB).
    pub snr_diff_db: T,
    pub gap_db: T,
}

fn check_pair(coherent: Scheme, differential: Scheme) -> Result<()> {
    if coherent.detection() != Detection::Coherent || differential.detection() != Detection::Differential {
        return Err(config(format!(
            "gap needs a coherent and a differential scheme, got {coherent} and {differential}"
        )));
    }
    Ok(())
}

/// Horizontal distance (dB) between the two BER curves at `target_ber`.
pub fn snr_gap_at_ber<T: Real>(
    coherent: Scheme,
    differential: Scheme,
    channel: &ChannelModel<T>,
    diversity: DiversityConfig,
    target_ber: T,
    opts: &SolveOptions,
) -> Result<SnrGapResult<T>> {
    check_pair(coherent, differential)?;
    let snr_ref_db = snr_at_ber(coherent, channel, diversity, target_ber, opts)?;
    let snr_diff_db = snr_at_ber(differential, channel, diversity, target_ber, opts)?;
    Ok(SnrGapResult { target_ber, snr_ref_db, snr_diff_db, gap_db: snr_diff_db - snr_ref_db })
}

/// SNR interval `[coherent, differential]` over which the two schemes are
/// `gap_target_db` apart, with the BER level where that happens.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SnrRange<T> {
    pub snr_lo_db: T,
    pub snr_hi_db: T,
    pub log10_ber: T,
    pub gap_db: T,
}

/// Finds the BER level at which the gap equals `gap_target_db`.
///
/// The gap is sampled at [`GAP_SCAN_LEVELS`] levels spanning
/// [`GAP_SCAN_WINDOW`]; a single crossing is refined, several crossings are
/// reported as [`Error::NonMonotone`] and none as [`Error::Range`].
pub fn snr_range_for_gap<T: Real>(
    coherent: Scheme,
    differential: Scheme,
    channel: &ChannelModel<T>,
    diversity: DiversityConfig,
    gap_target_db: T,
    opts: &SolveOptions,
) -> Result<SnrRange<T>> {
    check_pair(coherent, differential)?;
    if !gap_target_db.is_finite() {
        return Err(domain(format!("gap target must be finite, got {gap_target_db}")));
    }
    let fine = SolveOptions { tol_db: RANGE_SNR_TOL_DB.min(opts.tol_db), ..*opts };
    let gap_at = |level: T| -> Result<SnrGapResult<T>> {
        snr_gap_at_ber(coherent, differential, channel, diversity, lit::<T>(10.0).powf(level), &fine)
    };
    let (w0, w1) = GAP_SCAN_WINDOW;
    let step = (w1 - w0) / (GAP_SCAN_LEVELS - 1) as f64;
    let levels: Vec<f64> = (0..GAP_SCAN_LEVELS).map(|i| w0 + step * i as f64).collect();
    let gaps: Vec<f64> = levels
        .par_iter()
        .map(|&l| gap_at(lit(l)).map(|g| to_f64(g.gap_db)))
        .collect::<Result<_>>()?;
    let target = to_f64(gap_target_db);
    let crossings: Vec<usize> = (0..GAP_SCAN_LEVELS - 1)
        .filter(|&i| (gaps[i] - target).signum() != (gaps[i + 1] - target).signum() || gaps[i] == target)
        .collect();
    match crossings.as_slice() {
        [] => Err(Error::Range {
            target,
            min_gap: gaps.iter().copied().fold(f64::INFINITY, f64::min),
            max_gap: gaps.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        }),
        &[i] => {
            let bracket = RootBracket::new(lit(levels[i]), lit(levels[i + 1]), lit(RANGE_LEVEL_TOL))?;
            let level = try_find_root_monotone(|l: T| Ok(gap_at(l)?.gap_db - gap_target_db), bracket)?;
            let g = gap_at(level)?;
            Ok(SnrRange { snr_lo_db: g.snr_ref_db, snr_hi_db: g.snr_diff_db, log10_ber: level, gap_db: g.gap_db })
        }
        many => Err(Error::NonMonotone {
            target,
            crossings: many
                .iter()
                .map(|&i| {
                    let (a, b) = (gaps[i] - target, gaps[i + 1] - target);
                    if a == b {
                        levels[i]
                    } else {
                        levels[i] + step * a / (a - b)
                    }
                })
                .collect(),
        }),
    }
}
