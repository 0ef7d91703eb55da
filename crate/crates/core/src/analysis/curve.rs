use std::fmt;

use rayon::prelude::*;

use crate::channel::{small_gamma_expansion, ChannelModel, DiversityConfig, LognormalNakagamiChannel};
use crate::error::{config, Result};
use crate::modulation::Scheme;
use crate::real::{lit, Real};

use super::asymptotic::{asym_ber_coherent, asym_ber_dpsk, asym_ber_dqpsk};
use super::average::{average_ber, QuadratureOptions};
use super::{db_to_linear, Ber};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CurveMethod {
    Quadrature,
    Asymptotic,
    MonteCarlo,
}

impl CurveMethod {
    pub fn name(self) -> &'static str {
        match self {
            CurveMethod::Quadrature => "quadrature",
            CurveMethod::Asymptotic => "asymptotic",
            CurveMethod::MonteCarlo => "monte-carlo",
        }
    }
}

impl fmt::Display for CurveMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurvePoint<T> {
    pub gbar_db: T,
    pub ber: T,
    pub log10_ber: T,
}

/// BER against average SNR, strictly decreasing in `log10_ber`.
#[derive(Debug, Clone, PartialEq)]
pub struct BerCurve<T> {
    scheme: Scheme,
    channel: ChannelModel<T>,
    diversity: DiversityConfig,
    method: CurveMethod,
    points: Vec<CurvePoint<T>>,
}

impl<T: Real> BerCurve<T> {
    /// Validates ordering: SNR strictly increasing, BER strictly decreasing.
    pub fn new(
        scheme: Scheme,
        channel: ChannelModel<T>,
        diversity: DiversityConfig,
        method: CurveMethod,
        points: Vec<CurvePoint<T>>,
    ) -> Result<Self> {
        if points.is_empty() {
            return Err(config("a BER curve needs at least one point"));
        }
        for w in points.windows(2) {
            if !(w[1].gbar_db > w[0].gbar_db) {
                return Err(config(format!("SNR grid not increasing at {} dB", w[1].gbar_db)));
            }
            if !(w[1].log10_ber < w[0].log10_ber) {
                return Err(config(format!("BER not decreasing at {} dB", w[1].gbar_db)));
            }
        }
        Ok(Self { scheme, channel, diversity, method, points })
    }

    /// Exact curve; grid points are evaluated in parallel.
    pub fn quadrature(
        scheme: Scheme,
        channel: ChannelModel<T>,
        diversity: DiversityConfig,
        grid_db: &[T],
        opts: QuadratureOptions,
    ) -> Result<Self> {
        let points = grid_db
            .par_iter()
            .map(|&db| {
                let b = average_ber(scheme, &channel, diversity, db, opts)?;
                Ok(point(db, Ber { value: b.value, log_value: b.log_value }))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(scheme, channel, diversity, CurveMethod::Quadrature, points)
    }

    /// Leading-order curve of a lognormal-Nakagami channel without diversity.
    pub fn asymptotic(
        scheme: Scheme,
        channel: LognormalNakagamiChannel<T>,
        grid_db: &[T],
        inner_order: usize,
    ) -> Result<Self> {
        let first = grid_db.first().copied().unwrap_or_else(T::zero);
        let e = small_gamma_expansion(&channel, db_to_linear(first), DiversityConfig::None)?;
        let points = grid_db
            .iter()
            .map(|&db| {
                let b = match scheme {
                    Scheme::Bpsk | Scheme::Qpsk => asym_ber_coherent(&e, db)?,
                    Scheme::Dpsk => asym_ber_dpsk(&e, db)?,
                    Scheme::Dqpsk => asym_ber_dqpsk(&e, db, inner_order)?,
                };
                Ok(point(db, b))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(scheme, channel.into(), DiversityConfig::None, CurveMethod::Asymptotic, points)
    }

    pub fn scheme(&self) -> Scheme {
        self.scheme
    }

    pub fn channel(&self) -> &ChannelModel<T> {
        &self.channel
    }

    pub fn diversity(&self) -> DiversityConfig {
        self.diversity
    }

    pub fn method(&self) -> CurveMethod {
        self.method
    }

    pub fn points(&self) -> &[CurvePoint<T>] {
        &self.points
    }

    /// SNR where the curve reaches `target_ber`, interpolating linearly in
    /// `log10 BER`; `None` outside the sampled range.
    pub fn snr_at_ber(&self, target_ber: T) -> Option<T> {
        let y = target_ber.log10();
        self.points.windows(2).find_map(|w| {
            let (a, b) = (w[0], w[1]);
            (a.log10_ber >= y && y >= b.log10_ber)
                .then(|| a.gbar_db + (b.gbar_db - a.gbar_db) * (a.log10_ber - y) / (a.log10_ber - b.log10_ber))
        })
    }

    /// Interpolated BER at `gbar_db`; `None` outside the grid.
    pub fn ber_at(&self, gbar_db: T) -> Option<T> {
        self.points.windows(2).find_map(|w| {
            let (a, b) = (w[0], w[1]);
            (a.gbar_db <= gbar_db && gbar_db <= b.gbar_db).then(|| {
                let f = (gbar_db - a.gbar_db) / (b.gbar_db - a.gbar_db);
                lit::<T>(10.0).powf(a.log10_ber + f * (b.log10_ber - a.log10_ber))
            })
        })
    }
}

fn point<T: Real>(gbar_db: T, b: Ber<T>) -> CurvePoint<T> {
    CurvePoint { gbar_db, ber: b.value, log10_ber: b.log10() }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::{snr_at_ber, SolveOptions};

    fn grid(a: f64, b: f64, step: f64) -> Vec<f64> {
        let n = ((b - a) / step).round() as usize;
        (0..=n).map(|i| a + step * i as f64).collect()
    }

    #[test]
    fn quadrature_curve_invariants() {
        let ch = ChannelModel::lognormal(0.2).unwrap();
        let g = grid(0.0, 40.0, 0.5);
        let c = BerCurve::quadrature(Scheme::Dpsk, ch, DiversityConfig::None, &g, QuadratureOptions::default()).unwrap();
        assert_eq!(c.points().len(), g.len());
        for p in c.points() {
            if p.ber > 1e-300 {
                assert!((p.ber.log10() - p.log10_ber).abs() < 1e-9);
            }
        }
        let exact = snr_at_ber(Scheme::Dpsk, &ch, DiversityConfig::None, 1e-6, &SolveOptions::default()).unwrap();
        assert!((c.snr_at_ber(1e-6).unwrap() - exact).abs() < 0.02);
        assert!(c.snr_at_ber(1e-200).is_none());
        assert!(c.ber_at(50.0).is_none());
        assert!((c.ber_at(10.0).unwrap() / c.points()[20].ber - 1.0).abs() < 1e-12);
    }

    #[test]
    fn single_point_and_order_checks() {
        let ch = ChannelModel::lognormal(0.2).unwrap();
        let c = BerCurve::quadrature(Scheme::Bpsk, ch, DiversityConfig::None, &[7.0], QuadratureOptions::default()).unwrap();
        assert_eq!(c.points().len(), 1);
        assert!(BerCurve::quadrature(Scheme::Bpsk, ch, DiversityConfig::None, &[7.0, 7.0], QuadratureOptions::default()).is_err());
        assert!(BerCurve::<f64>::new(Scheme::Bpsk, ch, DiversityConfig::None, CurveMethod::Quadrature, vec![]).is_err());
    }

    #[test]
    fn parallel_evaluation_is_order_independent() {
        let ch = ChannelModel::lognormal(0.1).unwrap();
        let g = grid(0.0, 20.0, 2.0);
        let d = DiversityConfig::selection(3).unwrap();
        let a = BerCurve::quadrature(Scheme::Dqpsk, ch, d, &g, QuadratureOptions::default()).unwrap();
        let pool = rayon::ThreadPoolBuilder::new().num_threads(4).build().unwrap();
        let b = pool.install(|| BerCurve::quadrature(Scheme::Dqpsk, ch, d, &g, QuadratureOptions::default()).unwrap());
        assert_eq!(a, b);
        for (p, &x) in a.points().iter().zip(&g) {
            let single = average_ber(Scheme::Dqpsk, &ch, d, x, QuadratureOptions::default()).unwrap();
            assert_eq!(p.log10_ber, single.log10());
        }
    }

    #[test]
    fn asymptotic_curve_slope() {
        let ch = LognormalNakagamiChannel::new(0.1, 2.0).unwrap();
        let c = BerCurve::asymptotic(Scheme::Bpsk, ch, &grid(10.0, 50.0, 10.0), 64).unwrap();
        assert_eq!(c.method(), CurveMethod::Asymptotic);
        for w in c.points().windows(2) {
            assert!((w[0].log10_ber - w[1].log10_ber - 2.0).abs() < 1e-9);
        }
    }
}
