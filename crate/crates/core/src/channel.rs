//! Fading SNR distributions: lognormal and the auxiliary lognormal-Gamma
//! (lognormal-Nakagami) model, selection combining, the small-γ expansion
//! `f(γ) ≈ c γ^t / γ̄^{t+1}`, and seeded gain sampling.
//!
//! Internally the lognormal SNR is written `γ = γ̄ exp(2σz − σ²)` with `z`
//! standard normal, so the SNR CDF is exactly `Φ(z)`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Gamma, StandardNormal};
use rayon::prelude::*;

use crate::error::{config, domain, Error, Result};
use crate::mathkit::{cached_rule, converge_log, find_root_monotone, q_function, q_function_log, RootBracket, RuleKind};
use crate::real::{lit, log_sum_exp, Real};

/// Largest σ accepted; above 0.5 is allowed but atypical for optical links.
pub const MAX_SIGMA: f64 = 1.0;
/// Upper end of the usual weak-turbulence regime.
pub const TYPICAL_SIGMA: f64 = 0.5;
/// Relative order-doubling tolerance of [`ln_gamma_snr_pdf`].
pub const LG_PDF_TOL: f64 = 1e-9;
/// Samples drawn from one generator stream.
pub const STREAM_LEN: usize = 1 << 16;

fn check_sigma<T: Real>(sigma: T) -> Result<()> {
    if sigma > T::zero() && sigma <= lit(MAX_SIGMA) {
        Ok(())
    } else {
        Err(domain(format!("σ must lie in (0, {MAX_SIGMA}], got {sigma}")))
    }
}

fn check_positive<T: Real>(what: &str, x: T) -> Result<()> {
    if x > T::zero() && x.is_finite() {
        Ok(())
    } else {
        Err(domain(format!("{what} must be finite and > 0, got {x}")))
    }
}

/// Gain `I = e^X`, `X ~ N(μ, σ²)`, with `μ = −σ²/2` so that `E[I] = 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LognormalChannel<T> {
    sigma: T,
}

impl<T: Real> LognormalChannel<T> {
    pub fn new(sigma: T) -> Result<Self> {
        check_sigma(sigma)?;
        Ok(Self { sigma })
    }

    pub fn sigma(&self) -> T {
        self.sigma
    }

    pub fn mu(&self) -> T {
        -self.sigma * self.sigma * lit(0.5)
    }

    pub fn outside_typical_regime(&self) -> bool {
        self.sigma > lit(TYPICAL_SIGMA)
    }

    /// `γ̄ exp(2σz − σ²)`.
    pub fn snr_at(&self, z: T, gbar: T) -> T {
        let s = self.sigma;
        gbar * (lit::<T>(2.0) * s * z - s * s).exp()
    }

    /// Inverse of [`Self::snr_at`].
    pub fn normal_at(&self, gamma: T, gbar: T) -> T {
        let s = self.sigma;
        ((gamma / gbar).ln() + s * s) / (lit::<T>(2.0) * s)
    }
}

/// SNR `γ ~ Gamma(m, Ω/m)` with `Ω = γ̄ I²` and `I` as in [`LognormalChannel`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LognormalNakagamiChannel<T> {
    shadow: LognormalChannel<T>,
    m: T,
}

impl<T: Real> LognormalNakagamiChannel<T> {
    pub fn new(sigma: T, m: T) -> Result<Self> {
        let shadow = LognormalChannel::new(sigma)?;
        if !(m >= lit(0.5)) || !m.is_finite() {
            return Err(domain(format!("Nakagami m must be finite and ≥ 0.5, got {m}")));
        }
        Ok(Self { shadow, m })
    }

    pub fn sigma(&self) -> T {
        self.shadow.sigma
    }

    pub fn m(&self) -> T {
        self.m
    }

    pub fn shadowing(&self) -> LognormalChannel<T> {
        self.shadow
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ChannelModel<T> {
    Lognormal(LognormalChannel<T>),
    LognormalNakagami(LognormalNakagamiChannel<T>),
}

impl<T: Real> ChannelModel<T> {
    pub fn lognormal(sigma: T) -> Result<Self> {
        Ok(Self::Lognormal(LognormalChannel::new(sigma)?))
    }

    pub fn lognormal_nakagami(sigma: T, m: T) -> Result<Self> {
        Ok(Self::LognormalNakagami(LognormalNakagamiChannel::new(sigma, m)?))
    }

    pub fn sigma(&self) -> T {
        match self {
            Self::Lognormal(c) => c.sigma(),
            Self::LognormalNakagami(c) => c.sigma(),
        }
    }

    pub fn nakagami_m(&self) -> Option<T> {
        match self {
            Self::Lognormal(_) => None,
            Self::LognormalNakagami(c) => Some(c.m()),
        }
    }
}

impl<T: Real> From<LognormalChannel<T>> for ChannelModel<T> {
    fn from(c: LognormalChannel<T>) -> Self {
        Self::Lognormal(c)
    }
}

impl<T: Real> From<LognormalNakagamiChannel<T>> for ChannelModel<T> {
    fn from(c: LognormalNakagamiChannel<T>) -> Self {
        Self::LognormalNakagami(c)
    }
}

/// Receiver diversity. Branches are i.i.d.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum DiversityConfig {
    #[default]
    None,
    SelectionCombining { branches: u32 },
    Mimo { tx: u32, rx: u32 },
}

impl DiversityConfig {
    /// `L = 1` collapses to [`DiversityConfig::None`].
    pub fn selection(branches: u32) -> Result<Self> {
        match branches {
            0 => Err(config("selection combining needs at least one branch")),
            1 => Ok(Self::None),
            l => Ok(Self::SelectionCombining { branches: l }),
        }
    }

    pub fn mimo(tx: u32, rx: u32) -> Result<Self> {
        if tx == 0 || rx == 0 {
            return Err(config(format!("MIMO needs positive antenna counts, got {tx}x{rx}")));
        }
        Ok(Self::Mimo { tx, rx })
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            Self::None => Ok(()),
            Self::SelectionCombining { branches } => Self::selection(branches).map(|_| ()),
            Self::Mimo { tx, rx } => Self::mimo(tx, rx).map(|_| ()),
        }
    }

    /// Factor multiplying `m` in the diversity order: `1`, `L` or `MN`.
    pub fn multiplier(&self) -> u32 {
        match *self {
            Self::None => 1,
            Self::SelectionCombining { branches } => branches,
            Self::Mimo { tx, rx } => tx * rx,
        }
    }

    /// Number of SC branches; 1 unless selection combining.
    pub fn branches(&self) -> u32 {
        match *self {
            Self::SelectionCombining { branches } => branches,
            _ => 1,
        }
    }
}

/// Leading behaviour `f(γ) = c γ^t / γ̄^{t+1} + o(γ^t)` at the origin.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SmallGammaExpansion<T> {
    t: T,
    log_c: Option<T>,
}

impl<T: Real> SmallGammaExpansion<T> {
    pub fn new(t: T, c: T) -> Result<Self> {
        check_positive("c", c)?;
        Ok(Self { t: Self::check_t(t)?, log_c: Some(c.ln()) })
    }

    /// Expansion whose coefficient is not known.
    pub fn without_c(t: T) -> Result<Self> {
        Ok(Self { t: Self::check_t(t)?, log_c: None })
    }

    fn check_t(t: T) -> Result<T> {
        // t in (-1, 0) arises for Nakagami m in [0.5, 1).
        if t > -T::one() && t.is_finite() {
            Ok(t)
        } else {
            Err(domain(format!("diversity parameter t must be finite and > -1, got {t}")))
        }
    }

    pub fn t(&self) -> T {
        self.t
    }

    pub fn diversity_order(&self) -> T {
        self.t + T::one()
    }

    pub fn has_c(&self) -> bool {
        self.log_c.is_some()
    }

    pub fn log_c(&self) -> Result<T> {
        self.log_c.ok_or_else(|| {
            Error::Capability("the coefficient c is only defined without diversity".into())
        })
    }

    pub fn c(&self) -> Result<T> {
        Ok(self.log_c()?.exp())
    }
}

/// Density of the gain `I`.
pub fn lognormal_gain_pdf<T: Real>(channel: &LognormalChannel<T>, gain: T) -> Result<T> {
    check_positive("gain", gain)?;
    let s = channel.sigma;
    let x = (gain.ln() - channel.mu()) / s;
    Ok((-x * x * lit(0.5)).exp() / (T::TAU().sqrt() * s * gain))
}

fn snr_log_pdf<T: Real>(channel: &LognormalChannel<T>, gamma: T, gbar: T) -> Result<T> {
    check_positive("SNR", gamma)?;
    check_positive("average SNR", gbar)?;
    let s = channel.sigma;
    let z = channel.normal_at(gamma, gbar);
    Ok(-z * z * lit(0.5) - (lit::<T>(2.0) * T::TAU().sqrt() * s * gamma).ln())
}

/// Density of `γ = γ̄ I²`.
pub fn snr_pdf<T: Real>(channel: &LognormalChannel<T>, gamma: T, gbar: T) -> Result<T> {
    Ok(snr_log_pdf(channel, gamma, gbar)?.exp())
}

/// `P(γ_inst ≤ γ) = Φ(z)`.
pub fn snr_cdf<T: Real>(channel: &LognormalChannel<T>, gamma: T, gbar: T) -> Result<T> {
    check_positive("SNR", gamma)?;
    check_positive("average SNR", gbar)?;
    q_function(-channel.normal_at(gamma, gbar))
}

fn check_branches(branches: u32) -> Result<()> {
    if branches == 0 {
        Err(config("selection combining needs at least one branch"))
    } else {
        Ok(())
    }
}

/// Density of the largest of `branches` i.i.d. lognormal SNRs.
pub fn sc_output_pdf<T: Real>(channel: &LognormalChannel<T>, branches: u32, gamma: T, gbar: T) -> Result<T> {
    check_branches(branches)?;
    let log_f = snr_log_pdf(channel, gamma, gbar)?;
    if branches == 1 {
        return Ok(log_f.exp());
    }
    let l = lit::<T>(branches as f64);
    let log_cdf = q_function_log(-channel.normal_at(gamma, gbar))?;
    Ok((l.ln() + log_f + (l - T::one()) * log_cdf).exp())
}

/// `F(γ)^L`.
pub fn sc_output_cdf<T: Real>(channel: &LognormalChannel<T>, branches: u32, gamma: T, gbar: T) -> Result<T> {
    check_branches(branches)?;
    check_positive("SNR", gamma)?;
    check_positive("average SNR", gbar)?;
    let log_cdf = q_function_log(-channel.normal_at(gamma, gbar))?;
    Ok((lit::<T>(branches as f64) * log_cdf).exp())
}

/// lognormal-Gamma density, the Gamma(m, Ω/m) density averaged over the
/// lognormal `Ω`.
///
/// Evaluated in `v = ln Ω` with a Gauss–Hermite rule centred on the mode
/// of the integrand and scaled by its curvature, doubling `order` until
/// successive values agree to [`LG_PDF_TOL`].
pub fn ln_gamma_snr_pdf<T: Real>(channel: &LognormalNakagamiChannel<T>, gamma: T, gbar: T, order: usize) -> Result<T> {
    check_positive("SNR", gamma)?;
    check_positive("average SNR", gbar)?;
    let two = lit::<T>(2.0);
    let m = channel.m;
    let s = channel.sigma();
    let var4 = lit::<T>(4.0) * s * s;
    let centre = gbar.ln() - s * s;
    let ln_gamma = gamma.ln();
    let constant = m * m.ln() + (m - T::one()) * ln_gamma
        - m.ln_gamma()
        - (two * T::TAU().sqrt() * s).ln();
    let log_f = move |v: T| {
        let dv = v - centre;
        constant - m * v - m * (ln_gamma - v).exp() - dv * dv / (two * var4)
    };
    // Stationary point of log_f: decreasing slope, bracketed by `centre` and ln γ.
    let slope = |v: T| -m + m * (ln_gamma - v).exp() - (v - centre) / var4;
    let (lo, hi) = if centre < ln_gamma { (centre, ln_gamma) } else { (ln_gamma, centre) };
    let mode = if lo < hi {
        let tol = lit::<T>(1e-12) * (T::one() + lo.abs().max(hi.abs()));
        find_root_monotone(slope, RootBracket::new(lo, hi, tol.min((hi - lo) * lit(0.5)))?)?
    } else {
        lo
    };
    let curvature = m * (ln_gamma - mode).exp() + var4.recip();
    let scale = two.sqrt() / curvature.sqrt();
    let (log_pdf, _) = converge_log(order, LG_PDF_TOL, |n| {
        let rule = cached_rule(RuleKind::Hermite, n)?;
        let terms: Vec<T> = rule
            .pairs()
            .map(|(u, w)| {
                let u = lit::<T>(u);
                lit::<T>(w).ln() + u * u + log_f(mode + scale * u)
            })
            .collect();
        Ok(scale.ln() + log_sum_exp(&terms))
    })?;
    Ok(log_pdf.exp())
}

/// Diversity parameter `t = m·(1, L or MN) − 1`, with the coefficient
/// `c = m^m e^{mσ²(2m+1)} / Γ(m)` when there is no diversity.
///
/// `c` does not depend on `gbar`; `gbar` is only validated.
pub fn small_gamma_expansion<T: Real>(
    channel: &LognormalNakagamiChannel<T>,
    gbar: T,
    diversity: DiversityConfig,
) -> Result<SmallGammaExpansion<T>> {
    check_positive("average SNR", gbar)?;
    diversity.validate()?;
    let m = channel.m;
    let t = m * lit(diversity.multiplier() as f64) - T::one();
    if diversity != DiversityConfig::None {
        return SmallGammaExpansion::without_c(t);
    }
    let s2 = channel.sigma() * channel.sigma();
    let log_c = m * m.ln() + m * s2 * (lit::<T>(2.0) * m + T::one()) - m.ln_gamma();
    Ok(SmallGammaExpansion { t: SmallGammaExpansion::check_t(t)?, log_c: Some(log_c) })
}

/// Draws instantaneous SNRs in fixed-length generator streams.
///
/// Stream `k` is ChaCha8 seeded from `seed` with stream id `k`, so any
/// range of samples can be regenerated independently of thread count.
#[derive(Debug, Clone)]
pub struct GainSampler {
    channel: ChannelModel<f64>,
    branches: u32,
    gbar: f64,
    seed: u64,
    gamma: Option<Gamma<f64>>,
}

impl GainSampler {
    pub fn new(channel: ChannelModel<f64>, diversity: DiversityConfig, gbar: f64, seed: u64) -> Result<Self> {
        check_positive("average SNR", gbar)?;
        diversity.validate()?;
        if let DiversityConfig::Mimo { .. } = diversity {
            return Err(Error::Capability("sampling a MIMO channel is not supported".into()));
        }
        let gamma = match channel {
            ChannelModel::Lognormal(_) => None,
            ChannelModel::LognormalNakagami(c) => Some(
                Gamma::new(c.m(), 1.0 / c.m()).map_err(|e| domain(format!("Gamma sampler: {e}")))?,
            ),
        };
        Ok(Self { channel, branches: diversity.branches(), gbar, seed, gamma })
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream_rng(&self, stream: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(stream);
        rng
    }

    fn branch<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match (&self.channel, &self.gamma) {
            (ChannelModel::Lognormal(c), _) => c.snr_at(rng.sample(StandardNormal), self.gbar),
            (ChannelModel::LognormalNakagami(c), Some(g)) => {
                let omega = c.shadowing().snr_at(rng.sample(StandardNormal), self.gbar);
                omega * g.sample(rng)
            }
            (ChannelModel::LognormalNakagami(_), None) => unreachable!("Gamma sampler built in new"),
        }
    }

    /// One post-combining SNR.
    pub fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        if let ChannelModel::Lognormal(c) = &self.channel {
            // The maximum SNR belongs to the maximum z.
            let z = (0..self.branches).map(|_| rng.sample::<f64, _>(StandardNormal)).fold(f64::NEG_INFINITY, f64::max);
            return c.snr_at(z, self.gbar);
        }
        (0..self.branches).map(|_| self.branch(rng)).fold(f64::NEG_INFINITY, f64::max)
    }

    /// `len` draws from stream `stream`.
    pub fn stream(&self, stream: u64, len: usize) -> Vec<f64> {
        let mut rng = self.stream_rng(stream);
        (0..len).map(|_| self.draw(&mut rng)).collect()
    }

    /// `count` draws: streams of [`STREAM_LEN`] concatenated in order.
    pub fn sample(&self, count: usize) -> Result<Vec<f64>> {
        if count == 0 {
            return Err(config("sample count must be at least 1"));
        }
        let streams = count.div_ceil(STREAM_LEN);
        let chunks: Vec<Vec<f64>> = (0..streams)
            .into_par_iter()
            .map(|k| self.stream(k as u64, STREAM_LEN.min(count - k * STREAM_LEN)))
            .collect();
        Ok(chunks.concat())
    }
}

/// `count` seeded SNR samples of `channel` after `diversity`.
pub fn sample_gain(
    channel: ChannelModel<f64>,
    diversity: DiversityConfig,
    gbar: f64,
    count: usize,
    seed: u64,
) -> Result<Vec<f64>> {
    GainSampler::new(channel, diversity, gbar, seed)?.sample(count)
}
