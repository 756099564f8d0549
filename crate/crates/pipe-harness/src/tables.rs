//! Reference encoding tables, as printed to two decimals.
//!
//! Row order is arbitrary and LapPE column signs are arbitrary; matching is
//! up to row permutation and per-column sign.

/// LapPE, two smallest non-trivial eigenpairs, six-vertex graph K.
pub const SIX_K_LAP: &[[f64; 2]] = &[
    [-0.50, -0.32],
    [-0.50, 0.32],
    [0.0, 0.53],
    [0.0, -0.53],
    [0.50, -0.32],
    [0.50, 0.32],
];

/// LapPE, two smallest non-trivial eigenpairs, six-vertex graph K'.
pub const SIX_K_PRIME_LAP: &[[f64; 2]] = &[
    [-0.37, 0.0],
    [-0.17, 0.62],
    [-0.37, 0.0],
    [-0.17, -0.62],
    [0.58, -0.35],
    [0.58, 0.35],
];

/// RW return probabilities, k = 2, six-vertex graph K.
pub const SIX_K_RW: &[[f64; 2]] = &[
    [0.0, 0.41],
    [0.0, 0.41],
    [0.0, 0.44],
    [0.0, 0.44],
    [0.0, 0.41],
    [0.0, 0.41],
];

/// RW return probabilities, k = 2, six-vertex graph K'.
pub const SIX_K_PRIME_RW: &[[f64; 2]] = &[
    [0.0, 0.33],
    [0.0, 0.50],
    [0.0, 0.33],
    [0.0, 0.50],
    [0.0, 0.41],
    [0.0, 0.41],
];

/// RW return probabilities, k = 4, every row of both C10 and C5 u C5.
pub const CYCLE_RW_ROW: [f64; 4] = [0.0, 0.50, 0.0, 0.37];

/// LapPE, two smallest non-trivial eigenpairs, ten-vertex graph G.
pub const TEN_G_LAP: &[[f64; 2]] = &[
    [-0.42, -0.18],
    [-0.42, 0.18],
    [-0.26, 0.39],
    [0.0, 0.34],
    [0.26, 0.39],
    [0.42, 0.18],
    [0.42, -0.18],
    [0.26, -0.39],
    [0.0, -0.34],
    [-0.26, -0.39],
];

/// LapPE, two smallest non-trivial eigenpairs, ten-vertex graph G'.
pub const TEN_G_PRIME_LAP: &[[f64; 2]] = &[
    [-0.37, 0.35],
    [-0.37, 0.35],
    [-0.29, -0.05],
    [-0.19, -0.49],
    [-0.29, -0.05],
    [0.19, -0.49],
    [0.29, -0.05],
    [0.37, 0.35],
    [0.37, 0.35],
    [0.29, -0.05],
];

/// RW return probabilities, k = 5, ten-vertex graph G.
pub const TEN_G_RW: &[[f64; 5]] = &[
    [0.0, 0.50, 0.0, 0.35, 0.0],
    [0.0, 0.50, 0.0, 0.35, 0.0],
    [0.0, 0.41, 0.0, 0.28, 0.0],
    [0.0, 0.44, 0.0, 0.31, 0.0],
    [0.0, 0.41, 0.0, 0.28, 0.0],
    [0.0, 0.50, 0.0, 0.35, 0.0],
    [0.0, 0.50, 0.0, 0.35, 0.0],
    [0.0, 0.41, 0.0, 0.28, 0.0],
    [0.0, 0.44, 0.0, 0.31, 0.0],
    [0.0, 0.41, 0.0, 0.28, 0.0],
];

/// RW return probabilities, k = 5, ten-vertex graph G'.
pub const TEN_G_PRIME_RW: &[[f64; 5]] = &[
    [0.0, 0.50, 0.0, 0.35, 0.04],
    [0.0, 0.50, 0.0, 0.35, 0.04],
    [0.0, 0.41, 0.0, 0.28, 0.04],
    [0.0, 0.44, 0.0, 0.31, 0.04],
    [0.0, 0.41, 0.0, 0.28, 0.04],
    [0.0, 0.44, 0.0, 0.31, 0.04],
    [0.0, 0.41, 0.0, 0.28, 0.04],
    [0.0, 0.50, 0.0, 0.35, 0.04],
    [0.0, 0.50, 0.0, 0.35, 0.04],
    [0.0, 0.41, 0.0, 0.28, 0.04],
];

/// RW return probabilities, k = 4, cospectral 4-regular graph K.
pub const COSPECTRAL_K_RW: &[[f64; 4]] = &[
    [0.0, 0.25, 0.62, 0.14],
    [0.0, 0.25, 0.62, 0.14],
    [0.0, 0.25, 0.62, 0.14],
    [0.0, 0.25, 0.93, 0.14],
    [0.0, 0.25, 0.93, 0.14],
    [0.0, 0.25, 0.62, 0.14],
    [0.0, 0.25, 0.62, 0.14],
    [0.0, 0.25, 0.93, 0.14],
    [0.0, 0.25, 0.62, 0.14],
    [0.0, 0.25, 0.93, 0.14],
];

/// RW return probabilities, k = 4, cospectral 4-regular graph K'.
pub const COSPECTRAL_K_PRIME_RW: &[[f64; 4]] = &[
    [0.0, 0.25, 0.93, 0.14],
    [0.0, 0.25, 0.62, 0.14],
    [0.0, 0.25, 0.93, 0.14],
    [0.0, 0.25, 0.93, 0.14],
    [0.0, 0.25, 0.93, 0.14],
    [0.0, 0.25, 0.62, 0.14],
    [0.0, 0.25, 0.62, 0.14],
    [0.0, 0.25, 0.62, 0.14],
    [0.0, 0.25, 0.62, 0.14],
    [0.0, 0.25, 0.62, 0.14],
];

/// Column of the cospectral tables printed ten times too large.
pub const COSPECTRAL_SHIFTED_COLUMN: usize = 2;

pub fn rows<const W: usize>(table: &[[f64; W]]) -> Vec<Vec<f64>> {
    table.iter().map(|r| r.to_vec()).collect()
}

/// A cospectral table with the shifted column divided by ten.
pub fn cospectral_corrected(table: &[[f64; 4]]) -> Vec<Vec<f64>> {
    table
        .iter()
        .map(|r| {
            let mut r = r.to_vec();
            r[COSPECTRAL_SHIFTED_COLUMN] /= 10.0;
            r
        })
        .collect()
}
