//! Monte Carlo BER estimates used to validate the quadrature results.
//!
//! Semi-analytic estimation averages the conditional BER over sampled
//! channel SNRs; bit-level estimation simulates symbols through complex
//! AWGN. Samples are split into fixed generator streams that are reduced in
//! stream order, so estimates are identical for any thread count.

use std::fmt;

use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::analysis::{average_ber, db_to_linear, QuadratureOptions};
use crate::channel::{ChannelModel, DiversityConfig, GainSampler, STREAM_LEN};
use crate::error::{config, domain, Error, Result};
use crate::modulation::{Scheme, DEFAULT_ORDER};

/// Smallest sample count accepted by [`semi_analytic_ber`].
pub const MIN_SEMI_ANALYTIC_SAMPLES: usize = 1_000;
/// Smallest bit count accepted by [`bit_level_ber`].
pub const MIN_BITS: u64 = 10_000;
/// Lowest BER [`bit_level_ber`] is asked to resolve.
pub const BIT_LEVEL_FLOOR: f64 = 1e-5;
/// Data symbols sharing one channel gain (after one reference symbol for
/// differential schemes).
pub const SYMBOLS_PER_FRAME: usize = 8;
/// Fewest samples for a normal-approximation interval.
pub const MIN_CI_SAMPLES: u64 = 30;

/// Frames simulated per generator stream.
const FRAMES_PER_STREAM: usize = 4096;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum McMethod {
    SemiAnalytic,
    BitLevel,
}

impl McMethod {
    pub fn name(self) -> &'static str {
        match self {
            McMethod::SemiAnalytic => "semi-analytic",
            McMethod::BitLevel => "bit-level",
        }
    }
}

impl fmt::Display for McMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Sample mean with its standard error.
///
/// `samples` counts the independent units behind `std_error`: channel draws
/// for semi-analytic estimates, frames for bit-level ones.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McEstimate {
    pub mean: f64,
    pub std_error: f64,
    pub samples: u64,
    pub seed: u64,
    pub method: McMethod,
}

impl McEstimate {
    /// Estimate from i.i.d. values in `[0, 1]`.
    pub fn from_values(values: &[f64], seed: u64, method: McMethod) -> Result<Self> {
        let mut acc = LogMoments::default();
        for &v in values {
            acc.push(v.ln());
        }
        acc.finish(seed, method)
    }
}

/// Running mean and squared deviations of `e^l` for log inputs `l`, kept
/// relative to the largest `l` seen so that tiny values do not underflow.
#[derive(Debug, Clone, Copy)]
struct LogMoments {
    shift: f64,
    count: u64,
    mean: f64,
    m2: f64,
}

impl Default for LogMoments {
    fn default() -> Self {
        Self { shift: f64::NEG_INFINITY, count: 0, mean: 0.0, m2: 0.0 }
    }
}

impl LogMoments {
    fn rescale(&mut self, shift: f64) {
        if shift > self.shift {
            let r = if self.shift == f64::NEG_INFINITY { 0.0 } else { (self.shift - shift).exp() };
            self.mean *= r;
            self.m2 *= r * r;
            self.shift = shift;
        }
    }

    fn push(&mut self, log_value: f64) {
        self.rescale(log_value);
        let x = if self.shift == f64::NEG_INFINITY { 0.0 } else { (log_value - self.shift).exp() };
        self.count += 1;
        let delta = x - self.mean;
        self.mean += delta / self.count as f64;
        self.m2 += delta * (x - self.mean);
    }

    fn merge(mut self, mut other: Self) -> Self {
        if other.count == 0 {
            return self;
        }
        if self.count == 0 {
            return other;
        }
        let shift = self.shift.max(other.shift);
        self.rescale(shift);
        other.rescale(shift);
        let n = self.count + other.count;
        let delta = other.mean - self.mean;
        let (na, nb) = (self.count as f64, other.count as f64);
        self.mean += delta * nb / n as f64;
        self.m2 += other.m2 + delta * delta * na * nb / n as f64;
        self.count = n;
        self
    }

    fn finish(self, seed: u64, method: McMethod) -> Result<McEstimate> {
        if self.count < 2 {
            return Err(config("an estimate needs at least two samples"));
        }
        let scale = if self.shift == f64::NEG_INFINITY { 0.0 } else { self.shift.exp() };
        let var = (self.m2 / (self.count - 1) as f64).max(0.0);
        Ok(McEstimate {
            mean: self.mean * scale,
            std_error: (var / self.count as f64).sqrt() * scale,
            samples: self.count,
            seed,
            method,
        })
    }
}

/// Mean conditional BER over `samples` sampled SNRs.
pub fn semi_analytic_ber(
    scheme: Scheme,
    channel: &ChannelModel<f64>,
    diversity: DiversityConfig,
    gbar_db: f64,
    samples: usize,
    seed: u64,
) -> Result<McEstimate> {
    if samples < MIN_SEMI_ANALYTIC_SAMPLES {
        return Err(config(format!("semi-analytic estimation needs ≥ {MIN_SEMI_ANALYTIC_SAMPLES} samples, got {samples}")));
    }
    if !gbar_db.is_finite() {
        return Err(domain(format!("average SNR must be finite, got {gbar_db} dB")));
    }
    let sampler = GainSampler::new(*channel, diversity, db_to_linear(gbar_db), seed)?;
    let streams = samples.div_ceil(STREAM_LEN);
    let parts = (0..streams)
        .into_par_iter()
        .map(|k| {
            let len = STREAM_LEN.min(samples - k * STREAM_LEN);
            let mut rng = sampler.stream_rng(k as u64);
            let mut acc = LogMoments::default();
            for _ in 0..len {
                let g = sampler.draw(&mut rng);
                acc.push(scheme.log_conditional_ber(g, DEFAULT_ORDER)?);
            }
            Ok(acc)
        })
        .collect::<Result<Vec<_>>>()?;
    let acc = parts.into_iter().fold(LogMoments::default(), LogMoments::merge);
    acc.finish(seed, McMethod::SemiAnalytic)
}

#[derive(Debug, Clone, Copy)]
struct Complex {
    re: f64,
    im: f64,
}

impl Complex {
    /// `a · b̄`.
    fn mul_conj(self, b: Complex) -> Complex {
        Complex { re: self.re * b.re + self.im * b.im, im: self.im * b.re - self.re * b.im }
    }
}

/// Unit phasor `e^{jπk/2}`.
fn quarter_turn(k: u8) -> (f64, f64) {
    match k & 3 {
        0 => (1.0, 0.0),
        1 => (0.0, 1.0),
        2 => (-1.0, 0.0),
        _ => (0.0, -1.0),
    }
}

/// Gray map of a dibit to quarter turns: 00→0, 01→1, 11→2, 10→3.
fn gray_turns(b1: bool, b0: bool) -> u8 {
    match (b1, b0) {
        (false, false) => 0,
        (false, true) => 1,
        (true, true) => 2,
        (true, false) => 3,
    }
}

fn gray_bits(turns: u8) -> (bool, bool) {
    match turns & 3 {
        0 => (false, false),
        1 => (false, true),
        2 => (true, true),
        _ => (true, false),
    }
}

/// Received sample `amp · e^{jπk/2} + n` with `n` complex Gaussian, `N0 = 1`.
fn receive<R: Rng + ?Sized>(rng: &mut R, amp: f64, turns: u8) -> Complex {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let (c, s) = quarter_turn(turns);
    let nr: f64 = rng.sample(StandardNormal);
    let ni: f64 = rng.sample(StandardNormal);
    Complex { re: amp * c + h * nr, im: amp * s + h * ni }
}

/// Bit errors in one frame at bit SNR `gamma`.
fn frame_errors<R: Rng + ?Sized>(scheme: Scheme, gamma: f64, rng: &mut R) -> u32 {
    let mut errors = 0;
    match scheme {
        Scheme::Bpsk => {
            let amp = gamma.sqrt();
            for _ in 0..SYMBOLS_PER_FRAME {
                let bit: bool = rng.random();
                let r = receive(rng, amp, if bit { 2 } else { 0 });
                errors += u32::from((r.re < 0.0) != bit);
            }
        }
        Scheme::Qpsk => {
            // ±√γ per quadrature component; symbol energy 2γ.
            let amp = gamma.sqrt();
            let h = std::f64::consts::FRAC_1_SQRT_2;
            for _ in 0..SYMBOLS_PER_FRAME {
                let (bi, bq): (bool, bool) = (rng.random(), rng.random());
                let nr: f64 = rng.sample(StandardNormal);
                let ni: f64 = rng.sample(StandardNormal);
                let re = if bi { -amp } else { amp } + h * nr;
                let im = if bq { -amp } else { amp } + h * ni;
                errors += u32::from((re < 0.0) != bi) + u32::from((im < 0.0) != bq);
            }
        }
        Scheme::Dpsk => {
            let amp = gamma.sqrt();
            let mut phase = 0u8;
            let mut prev = receive(rng, amp, phase);
            for _ in 0..SYMBOLS_PER_FRAME {
                let bit: bool = rng.random();
                phase = phase.wrapping_add(if bit { 2 } else { 0 });
                let r = receive(rng, amp, phase);
                errors += u32::from((r.mul_conj(prev).re < 0.0) != bit);
                prev = r;
            }
        }
        Scheme::Dqpsk => {
            let amp = (2.0 * gamma).sqrt();
            let mut phase = 0u8;
            let mut prev = receive(rng, amp, phase);
            for _ in 0..SYMBOLS_PER_FRAME {
                let (b1, b0): (bool, bool) = (rng.random(), rng.random());
                phase = phase.wrapping_add(gray_turns(b1, b0));
                let r = receive(rng, amp, phase);
                let d = r.mul_conj(prev);
                let turns = if d.re.abs() >= d.im.abs() {
                    if d.re >= 0.0 { 0 } else { 2 }
                } else if d.im >= 0.0 {
                    1
                } else {
                    3
                };
                let (d1, d0) = gray_bits(turns);
                errors += u32::from(d1 != b1) + u32::from(d0 != b0);
                prev = r;
            }
        }
    }
    errors
}

/// Bit-error count estimate over `bits` simulated bits without diversity.
///
/// Each frame draws one channel SNR and carries
/// [`SYMBOLS_PER_FRAME`] data symbols (plus a reference symbol for the
/// differential schemes); the standard error is taken over frames.
pub fn bit_level_ber(scheme: Scheme, channel: &ChannelModel<f64>, gbar_db: f64, bits: u64, seed: u64) -> Result<McEstimate> {
    if bits < MIN_BITS {
        return Err(config(format!("bit-level simulation needs ≥ {MIN_BITS} bits, got {bits}")));
    }
    let expected = average_ber(scheme, channel, DiversityConfig::None, gbar_db, QuadratureOptions::default())?;
    if expected.value < BIT_LEVEL_FLOOR {
        return Err(Error::Capability(format!(
            "expected BER {:e} is below the bit-level floor {BIT_LEVEL_FLOOR:e}",
            expected.value
        )));
    }
    let sampler = GainSampler::new(*channel, DiversityConfig::None, db_to_linear(gbar_db), seed)?;
    let per_frame = (SYMBOLS_PER_FRAME * scheme.bits_per_symbol()) as u64;
    let frames = bits.div_ceil(per_frame) as usize;
    let streams = frames.div_ceil(FRAMES_PER_STREAM);
    let parts: Vec<LogMoments> = (0..streams)
        .into_par_iter()
        .map(|k| {
            let len = FRAMES_PER_STREAM.min(frames - k * FRAMES_PER_STREAM);
            let mut rng = sampler.stream_rng(k as u64);
            let mut acc = LogMoments::default();
            for _ in 0..len {
                let g = sampler.draw(&mut rng);
                let e = frame_errors(scheme, g, &mut rng);
                acc.push((e as f64 / per_frame as f64).ln());
            }
            acc
        })
        .collect();
    let acc = parts.into_iter().fold(LogMoments::default(), LogMoments::merge);
    acc.finish(seed, McMethod::BitLevel)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ConfidenceLevel {
    P95,
    P99,
}

impl ConfidenceLevel {
    /// Two-sided standard normal quantile.
    pub fn z(self) -> f64 {
        match self {
            ConfidenceLevel::P95 => 1.959963984540054,
            ConfidenceLevel::P99 => 2.5758293035489004,
        }
    }
}

impl TryFrom<f64> for ConfidenceLevel {
    type Error = Error;

    fn try_from(level: f64) -> Result<Self> {
        if (level - 0.95).abs() < 1e-12 {
            Ok(Self::P95)
        } else if (level - 0.99).abs() < 1e-12 {
            Ok(Self::P99)
        } else {
            Err(config(format!("confidence level must be 0.95 or 0.99, got {level}")))
        }
    }
}

/// `mean ± z·std_error`, clipped to `[0, 0.5]`.
pub fn confidence_interval(estimate: &McEstimate, level: ConfidenceLevel) -> Result<(f64, f64)> {
    if estimate.samples < MIN_CI_SAMPLES {
        return Err(Error::Capability(format!(
            "a normal interval needs ≥ {MIN_CI_SAMPLES} samples, got {}",
            estimate.samples
        )));
    }
    let half = level.z() * estimate.std_error;
    Ok(((estimate.mean - half).clamp(0.0, 0.5), (estimate.mean + half).clamp(0.0, 0.5)))
}
