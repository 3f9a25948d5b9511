//! Thin FFT helpers over `rustfft`.
//!
//! Sign convention: `forward` computes `sum_j x_j exp(-2 pi i k j / n)` and
//! `inverse` computes `sum_k X_k exp(+2 pi i k j / n)`, both unnormalized.

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use std::sync::Arc;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Forward,
    Inverse,
}

fn plan(n: usize, dir: Direction) -> Arc<dyn Fft<f64>> {
    let mut planner = FftPlanner::new();
    match dir {
        Direction::Forward => planner.plan_fft_forward(n),
        Direction::Inverse => planner.plan_fft_inverse(n),
    }
}

pub fn fft_in_place(data: &mut [Complex64], dir: Direction) {
    if data.is_empty() {
        return;
    }
    plan(data.len(), dir).process(data);
}

/// 2-D transform of a row-major `rows x cols` buffer.
pub fn fft2_in_place(data: &mut [Complex64], rows: usize, cols: usize, dir: Direction) {
    assert_eq!(data.len(), rows * cols);
    let row_fft = plan(cols, dir);
    for row in data.chunks_exact_mut(cols) {
        row_fft.process(row);
    }
    let col_fft = plan(rows, dir);
    let mut column = vec![Complex64::new(0.0, 0.0); rows];
    for c in 0..cols {
        for r in 0..rows {
            column[r] = data[r * cols + c];
        }
        col_fft.process(&mut column);
        for r in 0..rows {
            data[r * cols + c] = column[r];
        }
    }
}

/// Maps a signed index onto `0..n` modulo `n`.
#[inline]
pub fn wrap(index: i64, n: usize) -> usize {
    index.rem_euclid(n as i64) as usize
}
