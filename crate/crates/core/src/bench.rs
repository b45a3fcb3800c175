//! Scaling harness: timed sweeps over triangulated-grid bifiltrations and
//! the streamed signed-bar counts that go with them.

use std::time::Instant;

use crate::bifiltration::GradedComplex;
use crate::generators::triangulated_grid_bifiltration;
use crate::table::{sweep_metarank, Bar};
use crate::vineyard::CheckLevel;

#[derive(Debug, Clone, PartialEq)]
pub struct BenchRow {
    pub n: usize,
    pub seconds: f64,
    pub positive_bars: u64,
    pub negative_bars: u64,
}

/// Total signed-bar multiplicities of the meta-diagram, computed with a
/// two-column window over the streamed table so memory stays O(n²).
pub fn signed_bar_counts_streamed(complex: &GradedComplex) -> (u64, u64) {
    let mut pos = 0u64;
    let mut neg = 0u64;
    let mut prev: Option<Vec<Vec<Option<Bar>>>> = None;
    let n = complex.n();
    let mut tally = |cells: Vec<((usize, usize), crate::signed::SignedBarcode)>| {
        for (_, bc) in cells {
            let (p, m) = bc.counts();
            pos += p;
            neg += m;
        }
    };
    sweep_metarank(complex, CheckLevel::None, |col| {
        if let Some(prev_cells) = prev.take() {
            tally(crate::signed::invert_streamed_column(
                col.i - 1,
                &prev_cells,
                Some(col.cells),
                col.slot_dims,
            ));
        }
        if col.i == n {
            tally(crate::signed::invert_streamed_column(
                n,
                col.cells,
                None,
                col.slot_dims,
            ));
        }
        prev = Some(col.cells.to_vec());
    });
    (pos, neg)
}

/// Times the full sweep (table construction included, columns discarded) for
/// each requested size; the reported time is the minimum of `repeats` runs.
/// Signed-bar counts come from a separate untimed streaming pass.
pub fn run_bench(sizes: &[usize], seed: u64, repeats: usize) -> Vec<BenchRow> {
    let mut rows = Vec::new();
    for &n in sizes {
        let (complex, _) = triangulated_grid_bifiltration(n, seed);
        let mut best = f64::INFINITY;
        for _ in 0..repeats.max(1) {
            let start = Instant::now();
            sweep_metarank(&complex, CheckLevel::None, |col| {
                std::hint::black_box(col.cells.len());
            });
            best = best.min(start.elapsed().as_secs_f64());
        }
        let (positive_bars, negative_bars) = signed_bar_counts_streamed(&complex);
        rows.push(BenchRow {
            n,
            seconds: best,
            positive_bars,
            negative_bars,
        });
    }
    rows
}

/// Least-squares slope of `log y` against `log x`.
pub fn fit_log_slope(points: &[(f64, f64)]) -> f64 {
    let logs: Vec<(f64, f64)> = points.iter().map(|&(x, y)| (x.ln(), y.ln())).collect();
    let n = logs.len() as f64;
    let mean_x = logs.iter().map(|p| p.0).sum::<f64>() / n;
    let mean_y = logs.iter().map(|p| p.1).sum::<f64>() / n;
    let cov: f64 = logs.iter().map(|p| (p.0 - mean_x) * (p.1 - mean_y)).sum();
    let var: f64 = logs.iter().map(|p| (p.0 - mean_x).powi(2)).sum();
    cov / var
}
