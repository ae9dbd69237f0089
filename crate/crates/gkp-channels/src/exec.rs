//! Execution strategy for the embarrassingly parallel loops (quadrature panels,
//! decoder grids, raster points).
//!
//! Results are always collected in index order and reduced with a fixed
//! pairwise tree, so the parallel and sequential strategies produce
//! bit-identical sums.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Exec {
    Sequential,
    /// Uses rayon when the `parallel` feature is enabled, otherwise runs sequentially.
    #[default]
    Parallel,
}

impl Exec {
    /// True when work is actually distributed over threads.
    pub fn is_threaded(self) -> bool {
        cfg!(feature = "parallel") && self == Exec::Parallel
    }

    /// Maps `f` over `0..n`, returning results in index order.
    pub fn map<R, F>(self, n: usize, f: F) -> Vec<R>
    where
        R: Send,
        F: Fn(usize) -> R + Sync + Send,
    {
        #[cfg(feature = "parallel")]
        if self == Exec::Parallel {
            use rayon::prelude::*;
            return (0..n).into_par_iter().map(f).collect();
        }
        (0..n).map(f).collect()
    }
}

/// Pairwise (tree) summation of 4x4 accumulators in slice order.
pub fn pairwise_sum(parts: &[[[f64; 4]; 4]]) -> [[f64; 4]; 4] {
    match parts.len() {
        0 => [[0.0; 4]; 4],
        1 => parts[0],
        n => {
            let (l, r) = parts.split_at(n / 2);
            let a = pairwise_sum(l);
            let b = pairwise_sum(r);
            let mut out = [[0.0; 4]; 4];
            for i in 0..4 {
                for j in 0..4 {
                    out[i][j] = a[i][j] + b[i][j];
                }
            }
            out
        }
    }
}

/// Pairwise summation of scalars in slice order.
pub fn pairwise_sum_f64(xs: &[f64]) -> f64 {
    match xs.len() {
        0 => 0.0,
        1 => xs[0],
        n => {
            let (l, r) = xs.split_at(n / 2);
            pairwise_sum_f64(l) + pairwise_sum_f64(r)
        }
    }
}
