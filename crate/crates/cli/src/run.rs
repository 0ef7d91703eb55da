use rayon::prelude::*;
use serde::Serialize;

use lnfade::analysis::reference::{
    gap_table_value, range_table_value, GAP_TABLE_BERS, GAP_TABLE_OUTLIER, GAP_TABLE_SIGMAS, RANGE_TABLE_BRANCHES,
    RANGE_TABLE_GAP_DB, RANGE_TABLE_SIGMAS,
};
use lnfade::analysis::{
    dqpsk_penalty_limit_db, penalty_dpsk_bpsk, penalty_dqpsk_qpsk, penalty_ln_nakagami_dpsk, penalty_ln_nakagami_dqpsk,
};
use lnfade::modulation::Detection;
use lnfade::{
    average_ber, semi_analytic_ber, snr_gap_at_ber, snr_range_for_gap, ChannelModel64, DiversityConfig,
    QuadratureOptions, Scheme, SolveOptions,
};

use crate::args::{CommandKind, Format, Grid, Opts};
use crate::output::{Field, Table};
use crate::VERSION;

const FIG_SIGMAS: [f64; 4] = [0.5, 0.2, 0.1, 0.05];
const DEFAULT_GRID: Grid = Grid { start: 0.0, stop: 40.0, step: 0.5 };

/// Fully resolved run parameters, echoed into JSON output.
#[derive(Debug, Clone, Serialize)]
pub struct RunConfig {
    pub command: CommandKind,
    pub schemes: Vec<&'static str>,
    pub sigma: Vec<f64>,
    pub m: Vec<f64>,
    pub t: Vec<f64>,
    pub branches: Vec<u32>,
    pub snr: Option<Grid>,
    pub ber_levels: Vec<f64>,
    pub gap_db: Option<f64>,
    pub order: usize,
    pub mc_samples: Option<usize>,
    pub seed: u64,
    pub format: Format,
    pub compare_paper: bool,
    #[serde(skip)]
    scheme_list: Vec<Scheme>,
}

impl RunConfig {
    fn quadrature(&self) -> QuadratureOptions {
        QuadratureOptions { outer_order: self.order, inner_order: self.order }
    }

    fn solve(&self) -> SolveOptions {
        SolveOptions { quadrature: self.quadrature(), ..SolveOptions::default() }
    }

    fn pair(&self) -> (Scheme, Scheme) {
        (self.scheme_list[0], self.scheme_list[1])
    }
}

/// Applies per-command defaults and rejects flags the command does not use.
pub fn resolve(kind: CommandKind, o: Opts) -> Result<RunConfig, String> {
    if let Some(mm) = o.mimo {
        return Err(format!("MIMO ({}x{}) is not supported by the BER analysis; use --branches", mm.tx, mm.rx));
    }
    use CommandKind::*;
    let present = [
        ("--scheme", !o.scheme.is_empty()),
        ("--sigma", !o.sigma.is_empty()),
        ("--m", !o.m.is_empty()),
        ("--t", !o.t.is_empty()),
        ("--branches", !o.branches.is_empty()),
        ("--snr", o.snr.is_some()),
        ("--ber-levels", !o.ber_levels.is_empty()),
        ("--gap", o.gap.is_some()),
        ("--mc", o.mc),
        ("--compare-paper", o.compare_paper),
    ];
    let allowed: &[&str] = match kind {
        Sweep | Fig1 | Fig2 => &["--scheme", "--sigma", "--m", "--branches", "--snr", "--mc"],
        Table1 => &["--scheme", "--sigma", "--branches", "--ber-levels", "--compare-paper"],
        Table2 => &["--scheme", "--sigma", "--branches", "--gap", "--compare-paper"],
        Penalty => &["--m", "--t"],
        Gap => &["--scheme", "--sigma", "--m", "--branches", "--ber-levels"],
    };
    if let Some((flag, _)) = present.iter().find(|(f, on)| *on && !allowed.contains(f)) {
        return Err(format!("{flag} cannot be used with this command"));
    }
    if let Some(s) = o.sigma.iter().find(|s| !(**s > 0.0 && s.is_finite())) {
        return Err(format!("σ values must be positive, got {s}"));
    }
    if let Some(p) = o.ber_levels.iter().find(|p| !(**p > 0.0 && **p < 0.5)) {
        return Err(format!("BER levels must lie in (0, 0.5), got {p}"));
    }
    if o.branches.contains(&0) {
        return Err("branch counts must be at least 1".into());
    }
    if !o.m.is_empty() && o.branches.iter().any(|&l| l > 1) {
        return Err("selection combining is only available for the lognormal channel (drop --m)".into());
    }
    if o.mc && o.mc_samples < lnfade::montecarlo::MIN_SEMI_ANALYTIC_SAMPLES {
        return Err(format!(
            "--mc-samples must be at least {}",
            lnfade::montecarlo::MIN_SEMI_ANALYTIC_SAMPLES
        ));
    }
    if kind == Penalty && o.m.is_empty() && o.t.is_empty() {
        return Err("penalty needs --m or --t values".into());
    }

    let or = |v: Vec<f64>, d: &[f64]| if v.is_empty() { d.to_vec() } else { v };
    let schemes = if !o.scheme.is_empty() {
        o.scheme.clone()
    } else {
        match kind {
            Fig2 => vec![Scheme::Qpsk, Scheme::Dqpsk],
            Penalty => vec![],
            _ => vec![Scheme::Bpsk, Scheme::Dpsk],
        }
    };
    if matches!(kind, Table1 | Table2 | Gap) {
        let ok = schemes.len() == 2
            && schemes[0].detection() == Detection::Coherent
            && schemes[1].detection() == Detection::Differential;
        if !ok {
            return Err("--scheme must name a coherent then a differential scheme, e.g. bpsk,dpsk".into());
        }
    }
    let sigma = match kind {
        Table1 => or(o.sigma, &GAP_TABLE_SIGMAS),
        Table2 => or(o.sigma, &RANGE_TABLE_SIGMAS),
        Fig1 | Fig2 => or(o.sigma, &FIG_SIGMAS),
        Penalty => vec![],
        Sweep | Gap => or(o.sigma, &[0.2]),
    };
    let branches = match (kind, o.branches.is_empty()) {
        (Penalty, _) => vec![],
        (Table2, true) => RANGE_TABLE_BRANCHES.to_vec(),
        (_, true) => vec![1],
        (_, false) => o.branches,
    };
    let ber_levels = match kind {
        Table1 | Gap => or(o.ber_levels, &GAP_TABLE_BERS),
        _ => vec![],
    };
    Ok(RunConfig {
        command: kind,
        schemes: schemes.iter().map(|s| s.name()).collect(),
        sigma,
        m: o.m,
        t: o.t,
        branches,
        snr: matches!(kind, Sweep | Fig1 | Fig2).then(|| o.snr.unwrap_or(DEFAULT_GRID)),
        ber_levels,
        gap_db: (kind == Table2).then(|| o.gap.unwrap_or(RANGE_TABLE_GAP_DB)),
        order: o.order,
        mc_samples: o.mc.then_some(o.mc_samples),
        seed: o.seed,
        format: o.format,
        compare_paper: o.compare_paper,
        scheme_list: schemes,
    })
}

pub fn run(cfg: &RunConfig) -> Table {
    match cfg.command {
        CommandKind::Sweep | CommandKind::Fig1 | CommandKind::Fig2 => sweep(cfg),
        CommandKind::Table1 => table1(cfg),
        CommandKind::Table2 => table2(cfg),
        CommandKind::Penalty => penalty(cfg),
        CommandKind::Gap => gap(cfg),
    }
}

fn channel(sigma: f64, m: Option<f64>) -> lnfade::Result<ChannelModel64> {
    match m {
        None => ChannelModel64::lognormal(sigma),
        Some(m) => ChannelModel64::lognormal_nakagami(sigma, m),
    }
}

fn m_values(cfg: &RunConfig) -> Vec<Option<f64>> {
    if cfg.m.is_empty() {
        vec![None]
    } else {
        cfg.m.iter().copied().map(Some).collect()
    }
}

fn status<T>(r: &lnfade::Result<T>) -> Field {
    match r {
        Ok(_) => Field::str("ok"),
        Err(e) => Field::Str(format!("error: {e}")),
    }
}

/// Evaluates cells in parallel, keeping them in input order.
fn collect<C: Sync>(columns: Vec<&'static str>, cells: &[C], eval: impl Fn(&C) -> Vec<Field> + Sync + Send) -> Table {
    let rows: Vec<Vec<Field>> = cells.par_iter().map(eval).collect();
    let mut table = Table::new(columns);
    let status_col = table.columns.iter().position(|c| *c == "status").expect("status column");
    for (i, row) in rows.into_iter().enumerate() {
        if let Field::Str(s) = &row[status_col] {
            if s != "ok" {
                table.failures.push(format!("row {}: {s}", i + 1));
            }
        }
        table.push(row);
    }
    table
}

fn sweep(cfg: &RunConfig) -> Table {
    let grid = cfg.snr.unwrap_or(DEFAULT_GRID).points();
    let mut cells = Vec::new();
    for &sigma in &cfg.sigma {
        for m in m_values(cfg) {
            for &l in &cfg.branches {
                for &scheme in &cfg.scheme_list {
                    for &db in &grid {
                        cells.push((sigma, m, l, scheme, db));
                    }
                }
            }
        }
    }
    let columns = vec![
        "gbar_db", "ber", "log10_ber", "method", "scheme", "sigma", "m", "L", "order", "mc_ber", "mc_std_error",
        "mc_samples", "seed", "status", "version",
    ];
    collect(columns, &cells, |&(sigma, m, l, scheme, db)| {
        let r = channel(sigma, m).and_then(|ch| {
            let d = DiversityConfig::selection(l)?;
            let q = average_ber(scheme, &ch, d, db, cfg.quadrature())?;
            let mc = cfg.mc_samples.map(|n| semi_analytic_ber(scheme, &ch, d, db, n, cfg.seed)).transpose()?;
            Ok((q, mc))
        });
        let (q, mc) = match &r {
            Ok((q, mc)) => (Some(q), *mc),
            Err(_) => (None, None),
        };
        vec![
            Field::Float(db),
            Field::opt_ber(q.map(|q| q.value)),
            Field::opt_float(q.map(|q| q.log10())),
            Field::str("quadrature"),
            Field::str(scheme.name()),
            Field::Float(sigma),
            Field::opt_float(m),
            Field::Int(l.into()),
            Field::Int(q.map_or(cfg.order, |q| q.order) as i64),
            Field::opt_ber(mc.map(|e| e.mean)),
            Field::opt_ber(mc.map(|e| e.std_error)),
            cfg.mc_samples.map_or(Field::Null, |n| Field::Int(n as i64)),
            Field::Int(cfg.seed as i64),
            status(&r),
            Field::str(VERSION),
        ]
    })
}

fn is_reference_pair(cfg: &RunConfig) -> bool {
    cfg.pair() == (Scheme::Bpsk, Scheme::Dpsk)
}

fn table1(cfg: &RunConfig) -> Table {
    let (coherent, differential) = cfg.pair();
    let mut cells = Vec::new();
    for &sigma in &cfg.sigma {
        for &l in &cfg.branches {
            for &p in &cfg.ber_levels {
                cells.push((sigma, l, p));
            }
        }
    }
    let mut columns = vec![
        "sigma", "L", "target_ber", "coherent", "differential", "snr_coherent_db", "snr_differential_db", "gap_db",
    ];
    if cfg.compare_paper {
        columns.extend(["published_gap_db", "deviation_db", "advisory"]);
    }
    columns.extend(["order", "status", "version"]);
    let advisory = (GAP_TABLE_SIGMAS[GAP_TABLE_OUTLIER.0], GAP_TABLE_BERS[GAP_TABLE_OUTLIER.1]);
    collect(columns, &cells, |&(sigma, l, p)| {
        let r = ChannelModel64::lognormal(sigma).and_then(|ch| {
            snr_gap_at_ber(coherent, differential, &ch, DiversityConfig::selection(l)?, p, &cfg.solve())
        });
        let g = r.as_ref().ok();
        let mut row = vec![
            Field::Float(sigma),
            Field::Int(l.into()),
            Field::Ber(p),
            Field::str(coherent.name()),
            Field::str(differential.name()),
            Field::opt_float(g.map(|g| g.snr_ref_db)),
            Field::opt_float(g.map(|g| g.snr_diff_db)),
            Field::opt_float(g.map(|g| g.gap_db)),
        ];
        if cfg.compare_paper {
            let published = (is_reference_pair(cfg) && l == 1).then(|| gap_table_value(sigma, p)).flatten();
            row.push(Field::opt_float(published));
            row.push(Field::opt_float(published.zip(g).map(|(v, g)| g.gap_db - v)));
            row.push(match published {
                Some(_) => Field::str(if (sigma, p) == advisory { "yes" } else { "no" }),
                None => Field::Null,
            });
        }
        row.extend([Field::Int(cfg.order as i64), status(&r), Field::str(VERSION)]);
        row
    })
}

fn table2(cfg: &RunConfig) -> Table {
    let (coherent, differential) = cfg.pair();
    let target = cfg.gap_db.unwrap_or(RANGE_TABLE_GAP_DB);
    let mut cells = Vec::new();
    for &sigma in &cfg.sigma {
        for &l in &cfg.branches {
            cells.push((sigma, l));
        }
    }
    let mut columns = vec![
        "sigma", "L", "gap_target_db", "coherent", "differential", "snr_lo_db", "snr_hi_db", "width_db", "log10_ber",
    ];
    if cfg.compare_paper {
        columns.extend(["published_lo_db", "published_hi_db", "deviation_lo_db", "deviation_hi_db"]);
    }
    columns.extend(["order", "status", "version"]);
    collect(columns, &cells, |&(sigma, l)| {
        let r = ChannelModel64::lognormal(sigma).and_then(|ch| {
            snr_range_for_gap(coherent, differential, &ch, DiversityConfig::selection(l)?, target, &cfg.solve())
        });
        let g = r.as_ref().ok();
        let mut row = vec![
            Field::Float(sigma),
            Field::Int(l.into()),
            Field::Float(target),
            Field::str(coherent.name()),
            Field::str(differential.name()),
            Field::opt_float(g.map(|g| g.snr_lo_db)),
            Field::opt_float(g.map(|g| g.snr_hi_db)),
            Field::opt_float(g.map(|g| g.snr_hi_db - g.snr_lo_db)),
            Field::opt_float(g.map(|g| g.log10_ber)),
        ];
        if cfg.compare_paper {
            let published = (is_reference_pair(cfg) && target == RANGE_TABLE_GAP_DB)
                .then(|| range_table_value(sigma, l))
                .flatten();
            row.push(Field::opt_float(published.map(|p| p.0)));
            row.push(Field::opt_float(published.map(|p| p.1)));
            row.push(Field::opt_float(published.zip(g).map(|(p, g)| g.snr_lo_db - p.0)));
            row.push(Field::opt_float(published.zip(g).map(|(p, g)| g.snr_hi_db - p.1)));
        }
        row.extend([Field::Int(cfg.order as i64), status(&r), Field::str(VERSION)]);
        row
    })
}

#[derive(Clone, Copy)]
enum PenaltyCell {
    M(f64),
    T(f64),
    Limit,
}

fn penalty(cfg: &RunConfig) -> Table {
    let mut cells: Vec<(PenaltyCell, bool)> = Vec::new();
    for &m in &cfg.m {
        cells.extend([(PenaltyCell::M(m), false), (PenaltyCell::M(m), true)]);
    }
    for &t in &cfg.t {
        cells.extend([(PenaltyCell::T(t), false), (PenaltyCell::T(t), true)]);
    }
    cells.extend([(PenaltyCell::Limit, false), (PenaltyCell::Limit, true)]);
    let columns = vec!["parameter", "value", "pair", "penalty_db", "order", "status", "version"];
    collect(columns, &cells, |&(cell, quaternary)| {
        let (name, value, r) = match (cell, quaternary) {
            (PenaltyCell::M(m), false) => ("m", m, penalty_ln_nakagami_dpsk(m)),
            (PenaltyCell::M(m), true) => ("m", m, penalty_ln_nakagami_dqpsk(m, cfg.order)),
            (PenaltyCell::T(t), false) => ("t", t, penalty_dpsk_bpsk(t)),
            (PenaltyCell::T(t), true) => ("t", t, penalty_dqpsk_qpsk(t, cfg.order)),
            (PenaltyCell::Limit, false) => ("limit", f64::INFINITY, Ok(0.0)),
            (PenaltyCell::Limit, true) => ("limit", f64::INFINITY, Ok(dqpsk_penalty_limit_db())),
        };
        vec![
            Field::str(name),
            Field::Float(value),
            Field::str(if quaternary { "DQPSK-QPSK" } else { "DPSK-BPSK" }),
            Field::opt_float(r.as_ref().ok().copied()),
            Field::Int(cfg.order as i64),
            status(&r),
            Field::str(VERSION),
        ]
    })
}

fn gap(cfg: &RunConfig) -> Table {
    let (coherent, differential) = cfg.pair();
    let mut cells = Vec::new();
    for &sigma in &cfg.sigma {
        for m in m_values(cfg) {
            for &l in &cfg.branches {
                for &p in &cfg.ber_levels {
                    cells.push((sigma, m, l, p));
                }
            }
        }
    }
    let columns = vec![
        "sigma", "m", "L", "target_ber", "coherent", "differential", "snr_coherent_db", "snr_differential_db", "gap_db",
        "order", "status", "version",
    ];
    collect(columns, &cells, |&(sigma, m, l, p)| {
        let r = channel(sigma, m)
            .and_then(|ch| snr_gap_at_ber(coherent, differential, &ch, DiversityConfig::selection(l)?, p, &cfg.solve()));
        let g = r.as_ref().ok();
        vec![
            Field::Float(sigma),
            Field::opt_float(m),
            Field::Int(l.into()),
            Field::Ber(p),
            Field::str(coherent.name()),
            Field::str(differential.name()),
            Field::opt_float(g.map(|g| g.snr_ref_db)),
            Field::opt_float(g.map(|g| g.snr_diff_db)),
            Field::opt_float(g.map(|g| g.gap_db)),
            Field::Int(cfg.order as i64),
            status(&r),
            Field::str(VERSION),
        ]
    })
}
