use std::process::{Command, Output};

fn lnfade(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lnfade")).args(args).output().expect("run lnfade")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn csv_rows(o: &Output) -> (Vec<String>, Vec<Vec<String>>) {
    let mut r = csv::Reader::from_reader(o.stdout.as_slice());
    let header = r.headers().unwrap().iter().map(String::from).collect();
    let rows = r.records().map(|rec| rec.unwrap().iter().map(String::from).collect()).collect();
    (header, rows)
}

fn column(header: &[String], name: &str) -> usize {
    header.iter().position(|h| h == name).unwrap_or_else(|| panic!("no column {name}"))
}

/// SNR at `target` on a sampled curve, interpolating in log10 BER.
fn crossing(db: &[f64], log10: &[f64], target: f64) -> f64 {
    let y = target.log10();
    let i = (0..db.len() - 1).find(|&i| log10[i] >= y && y >= log10[i + 1]).expect("target within curve");
    db[i] + (db[i + 1] - db[i]) * (log10[i] - y) / (log10[i] - log10[i + 1])
}

fn sweep_gap(schemes: &str, sigma: &str, target: f64) -> f64 {
    let o = lnfade(&["sweep", "--scheme", schemes, "--sigma", sigma, "--snr", "0:40:0.25"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let (h, rows) = csv_rows(&o);
    let (s, g, l) = (column(&h, "scheme"), column(&h, "gbar_db"), column(&h, "log10_ber"));
    let names: Vec<&str> = schemes.split(',').collect();
    let at = |name: &str| {
        let pts: Vec<(f64, f64)> = rows
            .iter()
            .filter(|r| r[s].eq_ignore_ascii_case(name))
            .map(|r| (r[g].parse().unwrap(), r[l].parse().unwrap()))
            .collect();
        let (db, lg): (Vec<f64>, Vec<f64>) = pts.into_iter().unzip();
        crossing(&db, &lg, target)
    };
    at(names[1]) - at(names[0])
}

#[test]
fn sweep_gaps_read_from_curves() {
    let g = sweep_gap("bpsk,dpsk", "0.2", 1e-10);
    assert!((g - 0.7).abs() < 0.15, "{g}");
    let g = sweep_gap("qpsk,dqpsk", "0.05", 1e-10);
    assert!((g - 2.3).abs() < 0.15, "{g}");
}

#[test]
fn degenerate_grid_gives_one_row() {
    let o = lnfade(&["sweep", "--snr", "7:7:1", "--scheme", "bpsk"]);
    assert!(o.status.success());
    let (h, rows) = csv_rows(&o);
    assert_eq!(
        h,
        [
            "gbar_db", "ber", "log10_ber", "method", "scheme", "sigma", "m", "L", "order", "mc_ber", "mc_std_error",
            "mc_samples", "seed", "status", "version"
        ]
    );
    assert_eq!(rows.len(), 1);
    assert!(rows[0][1].contains('e'), "BER in scientific notation: {}", rows[0][1]);
    assert_eq!(rows[0][12], "24301");
}

#[test]
fn table1_cells_and_comparison() {
    let o = lnfade(&["table1", "--compare-paper", "--sigma", "0.5,0.1"]);
    assert!(o.status.success());
    let (h, rows) = csv_rows(&o);
    assert_eq!(rows.len(), 10);
    let gap = column(&h, "gap_db");
    let gaps: Vec<f64> = rows.iter().map(|r| r[gap].parse().unwrap()).collect();
    assert!((gaps[0] - 2.29).abs() < 0.15);
    assert!((gaps[9] - 0.54).abs() < 0.15);
    for row in gaps.chunks(5) {
        assert!(row.windows(2).all(|w| w[1] < w[0]), "{row:?}");
    }
    let dev = column(&h, "deviation_db");
    assert!(rows.iter().all(|r| r[dev].parse::<f64>().unwrap().abs() < 0.15));
}

#[test]
fn table2_ranges() {
    let o = lnfade(&["table2", "--sigma", "0.1", "--branches", "3,5", "--compare-paper"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let (h, rows) = csv_rows(&o);
    assert_eq!(rows.len(), 2);
    let (lo, w) = (column(&h, "snr_lo_db"), column(&h, "width_db"));
    for r in &rows {
        assert!((r[w].parse::<f64>().unwrap() - 0.5).abs() < 1e-6);
    }
    let lo3: f64 = rows[0][lo].parse().unwrap();
    let lo5: f64 = rows[1][lo].parse().unwrap();
    assert!(lo5 < lo3);
    assert!(h.contains(&"published_lo_db".to_string()));
}

#[test]
fn penalty_reference_rows() {
    let o = lnfade(&["penalty", "--m", "1"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert!(text.contains("m,1,DPSK-BPSK,3.01029995664"));
    assert!(text.contains("limit,inf,DPSK-BPSK,0,"));
    assert!(text.contains("limit,inf,DQPSK-QPSK,2.3226"));
}

#[test]
fn json_layout() {
    let o = lnfade(&["gap", "--sigma", "0.1", "--ber-levels", "1e-6", "--format", "json"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["version"], env!("CARGO_PKG_VERSION"));
    assert_eq!(v["config"]["command"], "gap");
    assert_eq!(v["config"]["seed"], 0x5EED);
    let rec = &v["records"][0];
    assert!((rec["gap_db"].as_f64().unwrap() - 0.75).abs() < 0.15);
    assert_eq!(rec["coherent"], "BPSK");
}

#[test]
fn output_is_deterministic_and_written_to_file() {
    let dir = std::env::temp_dir().join(format!("lnfade-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let run = |name: &str| {
        let path = dir.join(name);
        let o = lnfade(&[
            "sweep", "--scheme", "dpsk", "--snr", "8:10:1", "--mc", "--mc-samples", "20000", "--out",
            path.to_str().unwrap(),
        ]);
        assert!(o.status.success());
        assert!(o.stdout.is_empty());
        std::fs::read(path).unwrap()
    };
    let (a, b) = (run("a.csv"), run("b.csv"));
    assert_eq!(a, b);
    assert!(String::from_utf8(a).unwrap().lines().nth(1).unwrap().contains(",20000,24301,ok,"));
    std::fs::remove_dir_all(dir).unwrap();
}

#[test]
fn usage_and_partial_failures() {
    let o = lnfade(&["sweep", "--snr", "0:1:0"]);
    assert!(!o.status.success());
    let o = lnfade(&["sweep", "--mimo", "2x2"]);
    assert_eq!(o.status.code(), Some(2));
    let o = lnfade(&["table1", "--m", "2"]);
    assert_eq!(o.status.code(), Some(2));
    let o = lnfade(&["sweep", "--sigma", "0.2,3", "--snr", "5:5:1", "--scheme", "bpsk"]);
    assert_eq!(o.status.code(), Some(1));
    let (h, rows) = csv_rows(&o);
    let st = column(&h, "status");
    assert_eq!(rows[0][st], "ok");
    assert!(rows[1][st].starts_with("error"));
    assert!(String::from_utf8_lossy(&o.stderr).contains("row 2"));
}
