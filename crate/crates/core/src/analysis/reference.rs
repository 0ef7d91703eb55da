//! Published reference values for the DPSK/BPSK gap and gap-range tables.

/// Fading parameters σ of the gap table rows.
pub const GAP_TABLE_SIGMAS: [f64; 4] = [0.5, 0.2, 0.1, 0.05];
/// BER levels of the gap table columns.
pub const GAP_TABLE_BERS: [f64; 5] = [1e-2, 1e-4, 1e-6, 1e-8, 1e-10];
/// DPSK − BPSK SNR gap (dB), `[σ][BER]`.
pub const GAP_TABLE_DB: [[f64; 5]; 4] = [
    [2.29, 1.65, 1.38, 1.24, 1.10],
    [1.84, 1.56, 0.89, 0.79, 0.68],
    [1.67, 0.98, 0.75, 0.63, 0.54],
    [1.61, 0.92, 0.66, 0.55, 0.48],
];
/// Cell that departs from the smooth trend of its row: (σ index, BER index).
pub const GAP_TABLE_OUTLIER: (usize, usize) = (1, 1);

/// Gap target of the range table (dB).
pub const RANGE_TABLE_GAP_DB: f64 = 0.5;
pub const RANGE_TABLE_SIGMAS: [f64; 2] = [0.2, 0.1];
pub const RANGE_TABLE_BRANCHES: [u32; 4] = [1, 3, 4, 5];
/// `(BPSK SNR, DPSK SNR)` in dB, `[σ][L]`.
pub const RANGE_TABLE_DB: [[(f64, f64); 4]; 2] = [
    [(27.5, 28.0), (16.8, 17.3), (13.6, 14.1), (12.8, 13.3)],
    [(14.6, 15.1), (11.9, 12.4), (11.7, 12.2), (11.5, 12.0)],
];

/// Published gap for `(σ, BER)`, if tabulated.
pub fn gap_table_value(sigma: f64, ber: f64) -> Option<f64> {
    let i = GAP_TABLE_SIGMAS.iter().position(|&s| (s - sigma).abs() < 1e-12)?;
    let j = GAP_TABLE_BERS.iter().position(|&b| (b / ber - 1.0).abs() < 1e-9)?;
    Some(GAP_TABLE_DB[i][j])
}

/// Published range for `(σ, L)`, if tabulated.
pub fn range_table_value(sigma: f64, branches: u32) -> Option<(f64, f64)> {
    let i = RANGE_TABLE_SIGMAS.iter().position(|&s| (s - sigma).abs() < 1e-12)?;
    let j = RANGE_TABLE_BRANCHES.iter().position(|&l| l == branches)?;
    Some(RANGE_TABLE_DB[i][j])
}
