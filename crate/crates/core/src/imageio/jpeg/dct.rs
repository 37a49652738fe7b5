// SPDX-License-Identifier: Apache-2.0

//! Separable 8x8 forward/inverse DCT used by the baseline codec.

use std::sync::OnceLock;

/// cos((2x + 1) * u * pi / 16) for x, u in 0..8.
fn cos_table() -> &'static [[f64; 8]; 8] {
    static TABLE: OnceLock<[[f64; 8]; 8]> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut t = [[0.0; 8]; 8];
        for (x, row) in t.iter_mut().enumerate() {
            for (u, v) in row.iter_mut().enumerate() {
                *v = ((2 * x + 1) as f64 * u as f64 * std::f64::consts::PI
                    / 16.0)
                    .cos();
            }
        }
        t
    })
}

#[inline]
fn norm(u: usize) -> f64 {
    if u == 0 {
        std::f64::consts::FRAC_1_SQRT_2
    } else {
        1.0
    }
}

/// Forward DCT of a level-shifted 8x8 block (row-major).
pub fn forward(block: &[f64; 64]) -> [f64; 64] {
    let cos = cos_table();
    // Rows: tmp[y][u] = sum_x block[y][x] cos[x][u]
    let mut tmp = [0.0f64; 64];
    for y in 0..8 {
        for u in 0..8 {
            let mut acc = 0.0;
            for x in 0..8 {
                acc += block[y * 8 + x] * cos[x][u];
            }
            tmp[y * 8 + u] = acc;
        }
    }
    // Columns with normalization.
    let mut out = [0.0f64; 64];
    for v in 0..8 {
        for u in 0..8 {
            let mut acc = 0.0;
            for y in 0..8 {
                acc += tmp[y * 8 + u] * cos[y][v];
            }
            out[v * 8 + u] = 0.25 * norm(u) * norm(v) * acc;
        }
    }
    out
}

/// Inverse DCT producing a level-shifted 8x8 block (row-major).
pub fn inverse(coef: &[f64; 64]) -> [f64; 64] {
    let cos = cos_table();
    // Columns: tmp[y][u] = sum_v C(v) coef[v][u] cos[y][v]
    let mut tmp = [0.0f64; 64];
    for u in 0..8 {
        for y in 0..8 {
            let mut acc = 0.0;
            for v in 0..8 {
                acc += norm(v) * coef[v * 8 + u] * cos[y][v];
            }
            tmp[y * 8 + u] = acc;
        }
    }
    let mut out = [0.0f64; 64];
    for y in 0..8 {
        for x in 0..8 {
            let mut acc = 0.0;
            for u in 0..8 {
                acc += norm(u) * tmp[y * 8 + u] * cos[x][u];
            }
            out[y * 8 + x] = 0.25 * acc;
        }
    }
    out
}
