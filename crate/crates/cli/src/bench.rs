//! `maxrs bench`: dynamic update timings against the `alpha * ln n` model.

use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use maxrs_core::{DynamicMaxRS, PointD, SamplerParams, WeightedBall};

#[derive(Clone, Debug, clap::Args)]
pub struct BenchArgs {
    /// Comma separated live-set sizes.
    #[arg(long, value_delimiter = ',', default_values_t = [1000usize, 10_000, 100_000])]
    pub sizes: Vec<usize>,
    /// Insert/delete pairs timed per size.
    #[arg(long, default_value_t = 200)]
    pub updates: usize,
    #[arg(long, default_value_t = 2)]
    pub d: usize,
    #[arg(long, default_value_t = 0.25)]
    pub eps: f64,
    #[arg(long, default_value_t = 0.05)]
    pub c_sample: f64,
    /// Balls per unit volume.
    #[arg(long, default_value_t = 50.0)]
    pub density: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Clone, Debug, Serialize)]
pub struct BenchRow {
    pub n: usize,
    pub d: usize,
    pub updates: usize,
    pub build_ms: f64,
    pub median_us: f64,
    pub p95_us: f64,
    /// Median over sizes of `median / ln n`, in microseconds.
    pub alpha_us: f64,
    /// `median / (alpha * ln n)`.
    pub fit_ratio: f64,
}

fn quantile(sorted: &[Duration], q: f64) -> f64 {
    let i = ((sorted.len() - 1) as f64 * q).round() as usize;
    sorted[i].as_secs_f64() * 1e6
}

pub fn bench(args: &BenchArgs) -> Result<Vec<BenchRow>, String> {
    if args.sizes.is_empty() || args.sizes.contains(&0) {
        return Err("sizes must be positive".into());
    }
    if args.updates == 0 {
        return Err("updates must be positive".into());
    }
    if !(args.density > 0.0 && args.density.is_finite()) {
        return Err("density must be positive".into());
    }
    let mut rows = Vec::new();
    for (i, &n) in args.sizes.iter().enumerate() {
        let side = (n as f64 / args.density).powf(1.0 / args.d as f64);
        let mut r = ChaCha8Rng::seed_from_u64(args.seed.wrapping_add(i as u64));
        let mut pts: Vec<Vec<f64>> = (0..n)
            .map(|_| (0..args.d).map(|_| r.random_range(0.0..side)).collect())
            .collect();
        // slab order by the last coordinate keeps the build cache friendly
        pts.sort_by(|a, b| {
            let (sa, sb) = ((a[args.d - 1] / 2.0).floor(), (b[args.d - 1] / 2.0).floor());
            sa.total_cmp(&sb).then(a[0].total_cmp(&b[0]))
        });
        let balls = pts
            .iter()
            .enumerate()
            .map(|(id, p)| WeightedBall::new(id as u64, PointD::new(p)?, 1.0))
            .collect::<Result<Vec<_>, _>>()
            .map_err(|e| e.to_string())?;
        let params = SamplerParams::new(args.d, args.eps, args.seed).with_c_sample(args.c_sample);
        let t0 = Instant::now();
        let mut dynm = DynamicMaxRS::from_balls(params, &balls).map_err(|e| e.to_string())?;
        let build_ms = t0.elapsed().as_secs_f64() * 1e3;
        let mut samples = Vec::with_capacity(2 * args.updates);
        for u in 0..args.updates {
            let c: Vec<f64> = (0..args.d).map(|_| r.random_range(0.0..side)).collect();
            let b = WeightedBall::new((n + u) as u64, PointD::new(&c).map_err(|e| e.to_string())?, 1.0)
                .map_err(|e| e.to_string())?;
            let t0 = Instant::now();
            dynm.insert(b).map_err(|e| e.to_string())?;
            samples.push(t0.elapsed());
            let t0 = Instant::now();
            dynm.delete(b.id).map_err(|e| e.to_string())?;
            samples.push(t0.elapsed());
        }
        samples.sort();
        rows.push(BenchRow {
            n,
            d: args.d,
            updates: args.updates,
            build_ms,
            median_us: quantile(&samples, 0.5),
            p95_us: quantile(&samples, 0.95),
            alpha_us: 0.0,
            fit_ratio: 0.0,
        });
    }
    let mut per_log: Vec<f64> = rows.iter().map(|r| r.median_us / (r.n.max(2) as f64).ln()).collect();
    per_log.sort_by(f64::total_cmp);
    let alpha = per_log[per_log.len() / 2];
    for row in &mut rows {
        row.alpha_us = alpha;
        row.fit_ratio = row.median_us / (alpha * (row.n.max(2) as f64).ln());
    }
    Ok(rows)
}
