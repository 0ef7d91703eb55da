use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use lnfade::Scheme;
use serde::{Serialize, Serializer};

pub const DEFAULT_MC_SAMPLES: usize = 1_000_000;
pub const DEFAULT_ORDER: usize = 64;

#[derive(Debug, Parser)]
#[command(name = "lnfade", version, about = "BER of coherent and differential PSK over lognormal fading")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CommandKind {
    Sweep,
    Table1,
    Table2,
    Fig1,
    Fig2,
    Penalty,
    Gap,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// BER against average SNR on a grid.
    Sweep(Opts),
    /// DPSK-vs-BPSK loss at fixed BER levels for several σ.
    Table1(Opts),
    /// SNR range where the DPSK-vs-BPSK gap equals a target, per σ and L.
    Table2(Opts),
    /// BPSK and DPSK curves over lognormal fading.
    Fig1(Opts),
    /// QPSK and DQPSK curves over lognormal fading.
    Fig2(Opts),
    /// High-SNR penalty factors against m or t.
    Penalty(Opts),
    /// Coherent-vs-differential SNR gap at chosen BER levels.
    Gap(Opts),
}

impl Command {
    pub fn split(self) -> (CommandKind, Opts) {
        match self {
            Command::Sweep(o) => (CommandKind::Sweep, o),
            Command::Table1(o) => (CommandKind::Table1, o),
            Command::Table2(o) => (CommandKind::Table2, o),
            Command::Fig1(o) => (CommandKind::Fig1, o),
            Command::Fig2(o) => (CommandKind::Fig2, o),
            Command::Penalty(o) => (CommandKind::Penalty, o),
            Command::Gap(o) => (CommandKind::Gap, o),
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct Opts {
    /// Schemes, comma separated (bpsk, dpsk, qpsk, dqpsk).
    #[arg(long, value_delimiter = ',', value_parser = parse_scheme)]
    pub scheme: Vec<Scheme>,
    /// Lognormal σ values.
    #[arg(long, value_delimiter = ',')]
    pub sigma: Vec<f64>,
    /// Nakagami m values; selects the lognormal-Nakagami channel.
    #[arg(long, value_delimiter = ',')]
    pub m: Vec<f64>,
    /// Diversity parameters t (penalty only).
    #[arg(long, value_delimiter = ',')]
    pub t: Vec<f64>,
    /// Selection-combining branch counts.
    #[arg(long, value_delimiter = ',')]
    pub branches: Vec<u32>,
    /// MIMO configuration as MxN.
    #[arg(long)]
    pub mimo: Option<Mimo>,
    /// Average SNR grid in dB as start:stop:step.
    #[arg(long)]
    pub snr: Option<Grid>,
    /// Target BER levels.
    #[arg(long = "ber-levels", value_delimiter = ',')]
    pub ber_levels: Vec<f64>,
    /// Gap target in dB (table2).
    #[arg(long)]
    pub gap: Option<f64>,
    /// Quadrature order.
    #[arg(long, default_value_t = DEFAULT_ORDER)]
    pub order: usize,
    /// Add semi-analytic Monte Carlo columns (sweep, fig1, fig2).
    #[arg(long)]
    pub mc: bool,
    /// Monte Carlo sample count.
    #[arg(long = "mc-samples", default_value_t = DEFAULT_MC_SAMPLES)]
    pub mc_samples: usize,
    /// Generator seed, decimal or 0x-prefixed hex.
    #[arg(long, default_value = "0x5EED", value_parser = parse_seed)]
    pub seed: u64,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Output file; standard output when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Add published reference values and deviations (table1, table2).
    #[arg(long = "compare-paper")]
    pub compare_paper: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

fn parse_scheme(s: &str) -> Result<Scheme, String> {
    s.parse().map_err(|e: lnfade::Error| e.to_string())
}

fn parse_seed(s: &str) -> Result<u64, String> {
    let s = s.trim();
    match s.strip_prefix("0x").or_else(|| s.strip_prefix("0X")) {
        Some(hex) => u64::from_str_radix(hex, 16),
        None => s.parse(),
    }
    .map_err(|e| format!("invalid seed `{s}`: {e}"))
}

/// `start:stop:step` in dB, inclusive of `stop` when it lies on the grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    pub start: f64,
    pub stop: f64,
    pub step: f64,
}

impl Grid {
    pub fn points(&self) -> Vec<f64> {
        let n = ((self.stop - self.start) / self.step + 1e-9).floor() as usize;
        (0..=n).map(|i| self.start + self.step * i as f64).collect()
    }
}

impl FromStr for Grid {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let parts: Vec<&str> = s.split(':').collect();
        let [a, b, c] = parts.as_slice() else {
            return Err(format!("grid must be start:stop:step, got `{s}`"));
        };
        let num = |x: &str| x.trim().parse::<f64>().map_err(|e| format!("bad number `{x}`: {e}"));
        let g = Grid { start: num(a)?, stop: num(b)?, step: num(c)? };
        if !(g.start.is_finite() && g.stop.is_finite()) || g.stop < g.start {
            return Err(format!("grid needs finite start ≤ stop, got `{s}`"));
        }
        if !(g.step > 0.0 && g.step.is_finite()) {
            return Err(format!("grid step must be positive, got `{s}`"));
        }
        Ok(g)
    }
}

impl fmt::Display for Grid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}", self.start, self.stop, self.step)
    }
}

impl Serialize for Grid {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Mimo {
    pub tx: u32,
    pub rx: u32,
}

impl FromStr for Mimo {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let (a, b) = s
            .split_once(['x', 'X'])
            .ok_or_else(|| format!("MIMO must be MxN, got `{s}`"))?;
        let tx = a.trim().parse().map_err(|e| format!("bad M in `{s}`: {e}"))?;
        let rx = b.trim().parse().map_err(|e| format!("bad N in `{s}`: {e}"))?;
        if tx == 0 || rx == 0 {
            return Err(format!("MIMO dimensions must be positive, got `{s}`"));
        }
        Ok(Mimo { tx, rx })
    }
}
