use std::fmt::Write as _;
use std::time::Instant;

use super::{bi_query, bi_query_from_scratch, BiRomModel};
use crate::error::Result;
use crate::interp::TangentInterpolator;
use crate::itsgm::SampleSet;
use crate::linalg::counters;

/// Timed passes over the query set; the fastest pass is reported.
const ROUNDS: usize = 3;

/// Measured cost of the online query against the from-scratch path.
#[derive(Clone, Debug, PartialEq)]
pub struct CostReport {
    pub queries: usize,
    /// Seconds per query.
    pub online_seconds: f64,
    pub scratch_seconds: f64,
    /// Floating-point operations per query, counted by the kernels.
    pub online_flops: u64,
    pub scratch_flops: u64,
    /// Largest matrix dimension handed to an SVD in any online query.
    pub online_max_svd_dim: usize,
    pub scratch_max_svd_dim: usize,
    /// `scratch_seconds / online_seconds`.
    pub speedup: f64,
    pub flop_ratio: f64,
}

impl CostReport {
    /// Plain-text table, one metric per row.
    pub fn table(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "{:<22} {:>14} {:>14}", "metric", "online", "from-scratch");
        let _ = writeln!(s, "{:<22} {:>14.6e} {:>14.6e}", "seconds/query", self.online_seconds, self.scratch_seconds);
        let _ = writeln!(s, "{:<22} {:>14} {:>14}", "flops/query", self.online_flops, self.scratch_flops);
        let _ =
            writeln!(s, "{:<22} {:>14} {:>14}", "max svd dimension", self.online_max_svd_dim, self.scratch_max_svd_dim);
        let _ = writeln!(s, "queries {}", self.queries);
        let _ = writeln!(s, "speedup {:.3}", self.speedup);
        let _ = writeln!(s, "flop ratio {:.3}", self.flop_ratio);
        s
    }
}

/// `n` deterministic query points between consecutive samples (in index
/// order), cycling through the sample pairs.
pub fn query_points(samples: &SampleSet, n: usize) -> Vec<Vec<f64>> {
    let p = samples.params();
    let mut order: Vec<usize> = (0..p.len()).collect();
    if samples.param_dim() == 1 {
        order.sort_by(|&a, &b| p[a][0].total_cmp(&p[b][0]));
    }
    (0..n)
        .map(|k| {
            let i = k % (p.len() - 1);
            let (a, b) = (&p[order[i]], &p[order[i + 1]]);
            // Alternate between the midpoint and a point off-centre.
            let t = if (k / (p.len() - 1)).is_multiple_of(2) { 0.5 } else { 0.3 };
            a.iter().zip(b).map(|(x, y)| x + t * (y - x)).collect()
        })
        .collect()
}

/// Times `n_queries` online queries against the same queries recomputed
/// from scratch with the model's configuration.
pub fn online_cost_report(model: &BiRomModel, n_queries: usize, method: &TangentInterpolator) -> Result<CostReport> {
    let n_queries = n_queries.max(1);
    let points = query_points(model.samples(), n_queries);
    let config = *model.config();

    let online = |g: &[f64]| bi_query(model, g, method).map(|_| ());
    let scratch = |g: &[f64]| bi_query_from_scratch(model.samples(), g, method, &config).map(|_| ());

    let (online_counts, online_seconds) = measure(&points, online)?;
    let (scratch_counts, scratch_seconds) = measure(&points, scratch)?;
    let n = n_queries as u64;
    let report = CostReport {
        queries: n_queries,
        online_seconds,
        scratch_seconds,
        online_flops: online_counts.flops / n,
        scratch_flops: scratch_counts.flops / n,
        online_max_svd_dim: online_counts.max_svd_dim(),
        scratch_max_svd_dim: scratch_counts.max_svd_dim(),
        speedup: scratch_seconds / online_seconds,
        flop_ratio: scratch_counts.flops as f64 / online_counts.flops.max(1) as f64,
    };
    log::info!("online cost: speedup {:.2}, flop ratio {:.2}", report.speedup, report.flop_ratio);
    Ok(report)
}

/// Operation counts of one pass and the best per-query time over
/// [`ROUNDS`] passes.
fn measure(points: &[Vec<f64>], f: impl Fn(&[f64]) -> Result<()>) -> Result<(counters::OpCounts, f64)> {
    let (result, counts) = counters::measure(|| points.iter().try_for_each(|g| f(g)));
    result?;
    let mut best = f64::INFINITY;
    for _ in 0..ROUNDS {
        let start = Instant::now();
        for g in points {
            f(g)?;
        }
        best = best.min(start.elapsed().as_secs_f64());
    }
    Ok((counts, best / points.len() as f64))
}
