//! `maxrs run`: execute one algorithm on one instance for several trials.

use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::Instant;

use serde::Serialize;

use maxrs_core::colored_approx::approx_colored_maxrs;
use maxrs_core::colored_exact::{exact_colored_maxrs, max_depth_first_algorithm};
use maxrs_core::colored_sample::colored_solve;
use maxrs_core::convolution::{
    exhaustive_batched_1d, minplus_bruteforce, minplus_via_batched, minplus_via_bsei, solve_batched_1d,
    Batched1DInstance,
};
use maxrs_core::dynamic::{static_solve_with, DynamicMaxRS};
use maxrs_core::oracles::{brute_colored_depth, brute_colored_maxrs_disks, brute_depth, brute_maxrs_disks_2d};
use maxrs_core::sampling::{SamplerParams, SearchStrategy, DEFAULT_C_SAMPLE};
use maxrs_core::{PointD, WeightedBall};

use crate::schema::{num, Instance, Payload, TraceOp};

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Algo {
    /// (1/2 - eps) static solver for weighted balls.
    Static,
    /// Dynamic structure: bulk insert then query, or replay a trace.
    Dynamic,
    /// (1/2 - eps) colored sampler.
    ColoredSample,
    /// Exact colored disk solver through the shifted-grid reduction.
    ColoredExact,
    /// Exact colored disk solver by a single arrangement sweep.
    FirstAlgorithm,
    /// (1 - eps) colored disk solver by color sampling.
    ColoredApprox,
    /// Brute-force oracle for the instance kind.
    Brute,
    /// (min,+)-convolution through batched interval MaxRS.
    MinplusBatched,
    /// (min,+)-convolution through batched smallest enclosing intervals.
    MinplusBsei,
    /// Sweep solver for batched 1D MaxRS.
    Batched1d,
    /// Batched smallest k-enclosing intervals.
    Bsei,
}

impl Algo {
    fn name(self) -> &'static str {
        match self {
            Algo::Static => "static",
            Algo::Dynamic => "dynamic",
            Algo::ColoredSample => "colored-sample",
            Algo::ColoredExact => "colored-exact",
            Algo::FirstAlgorithm => "first-algorithm",
            Algo::ColoredApprox => "colored-approx",
            Algo::Brute => "brute",
            Algo::MinplusBatched => "minplus-batched",
            Algo::MinplusBsei => "minplus-bsei",
            Algo::Batched1d => "batched1d",
            Algo::Bsei => "bsei",
        }
    }

    fn default_eps(self) -> Option<f64> {
        match self {
            Algo::Static | Algo::Dynamic | Algo::ColoredSample => Some(0.2),
            Algo::ColoredApprox => Some(0.3),
            _ => None,
        }
    }
}

#[derive(Clone, Debug)]
pub struct RunConfig {
    pub algo: Algo,
    pub eps: Option<f64>,
    pub c_sample: f64,
    pub c1: f64,
    pub m: Option<usize>,
    pub seed: u64,
    pub trials: usize,
    pub check: bool,
    pub threads: usize,
}

/// One output record.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct Row {
    pub trial: usize,
    pub algorithm: String,
    pub kind: String,
    pub n: usize,
    pub m: Option<usize>,
    pub d: usize,
    pub eps: Option<f64>,
    pub c_sample: Option<f64>,
    pub c1: Option<f64>,
    pub seed: u64,
    /// Query index in a trace, or pair index for sequence instances.
    pub item: Option<usize>,
    pub value: Option<f64>,
    pub opt_if_known: Option<f64>,
    pub ratio: Option<f64>,
    pub exact_match: Option<bool>,
    pub oracle_pass: Option<bool>,
    pub point: Option<String>,
    pub output: Option<String>,
    pub wall_ms: f64,
}

fn fmt_point(p: &PointD) -> String {
    p.coords().iter().map(|c| num(*c)).collect::<Vec<_>>().join(" ")
}

fn fmt_seq(v: &[f64]) -> String {
    v.iter().map(|c| num(*c)).collect::<Vec<_>>().join(" ")
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-9 * a.abs().max(b.abs()).max(1.0)
}

fn at_least(value: f64, factor: f64, opt: f64) -> bool {
    value >= factor * opt - 1e-9 * opt.abs().max(1.0)
}

fn incompatible(algo: Algo, inst: &Instance) -> String {
    format!("algorithm {} does not accept {} instances", algo.name(), inst.kind().name())
}

fn need_planar(algo: Algo, d: usize) -> Result<(), String> {
    if d == 2 {
        Ok(())
    } else {
        Err(format!("{} works on planar disks only (d = 2)", algo.name()))
    }
}

/// Run all trials; rows come back in trial order.
pub fn run(inst: &Instance, cfg: &RunConfig) -> Result<Vec<Row>, String> {
    if cfg.trials == 0 {
        return Err("trials must be positive".into());
    }
    let next = AtomicUsize::new(0);
    let slots: Mutex<Vec<Option<Result<Vec<Row>, String>>>> = Mutex::new(vec![None; cfg.trials]);
    let workers = cfg.threads.clamp(1, cfg.trials);
    std::thread::scope(|s| {
        for _ in 0..workers {
            s.spawn(|| loop {
                let t = next.fetch_add(1, Ordering::Relaxed);
                if t >= cfg.trials {
                    break;
                }
                let out = trial(inst, cfg, t);
                slots.lock().expect("no poisoned workers")[t] = Some(out);
            });
        }
    });
    let mut rows = Vec::new();
    for slot in slots.into_inner().expect("no poisoned workers") {
        rows.extend(slot.expect("every trial ran")?);
    }
    Ok(rows)
}

fn trial(inst: &Instance, cfg: &RunConfig, t: usize) -> Result<Vec<Row>, String> {
    let seed = cfg.seed.wrapping_add(t as u64);
    let eps = cfg.eps.or(cfg.algo.default_eps());
    let uses_sampling = matches!(cfg.algo, Algo::Static | Algo::Dynamic | Algo::ColoredSample);
    let base = Row {
        trial: t,
        algorithm: cfg.algo.name().to_string(),
        kind: inst.kind().name().to_string(),
        n: inst.len(),
        d: inst.d,
        eps,
        c_sample: uses_sampling.then_some(cfg.c_sample),
        c1: (cfg.algo == Algo::ColoredApprox).then_some(cfg.c1),
        seed,
        ..Row::default()
    };
    let e = |x: maxrs_core::MaxRsError| x.to_string();
    let start = Instant::now();
    let ms = |start: Instant| start.elapsed().as_secs_f64() * 1e3;
    match (&inst.payload, cfg.algo) {
        (Payload::Balls(balls), Algo::Static | Algo::Dynamic | Algo::Brute) => {
            let eps = eps.unwrap_or(0.2);
            let got = match cfg.algo {
                Algo::Static => {
                    let params = SamplerParams::new(inst.d, eps, seed).with_c_sample(cfg.c_sample);
                    static_solve_with(balls, params, SearchStrategy::BranchAndBound)
                        .map_err(e)?
                        .map(|p| (p.point, p.depth))
                }
                Algo::Dynamic => {
                    let mut dynm = DynamicMaxRS::new(inst.d, eps, cfg.c_sample, seed).map_err(e)?;
                    for b in balls {
                        dynm.insert(*b).map_err(e)?;
                    }
                    dynm.query().map(|p| (p.point, p.depth))
                }
                _ => {
                    need_planar(cfg.algo, inst.d)?;
                    brute_maxrs_disks_2d(balls).map_err(e)?
                }
            };
            let wall_ms = ms(start);
            let mut row = Row {
                value: Some(got.map_or(0.0, |g| g.1)),
                point: got.map(|g| fmt_point(&g.0)),
                wall_ms,
                ..base
            };
            if cfg.algo == Algo::Brute {
                row.eps = None;
                row.c_sample = None;
            }
            if cfg.check {
                let opt = if inst.d == 2 {
                    brute_maxrs_disks_2d(balls).map_err(e)?.map_or(0.0, |o| o.1)
                } else {
                    inst.opt.ok_or("no known optimum for d != 2; omit --check")?
                };
                let value = row.value.unwrap_or(0.0);
                let honest = got.is_none_or(|g| close(brute_depth(&g.0, balls), g.1));
                let factor = if cfg.algo == Algo::Brute { 1.0 } else { 0.5 - eps };
                row.opt_if_known = Some(opt);
                row.ratio = (opt > 0.0).then(|| value / opt);
                row.oracle_pass = Some(honest && at_least(value, factor, opt));
            } else if let Some(opt) = inst.opt {
                row.opt_if_known = Some(opt);
                row.ratio = (opt > 0.0).then(|| row.value.unwrap_or(0.0) / opt);
            }
            Ok(vec![row])
        }
        (Payload::Trace(ops), Algo::Dynamic) => {
            let eps = eps.unwrap_or(0.2);
            let mut dynm = DynamicMaxRS::new(inst.d, eps, cfg.c_sample, seed).map_err(e)?;
            let mut live: Vec<WeightedBall> = Vec::new();
            let mut rows = Vec::new();
            let mut q = 0;
            for op in ops {
                let start = Instant::now();
                match op {
                    TraceOp::Insert(b) => {
                        dynm.insert(*b).map_err(e)?;
                        live.push(*b);
                    }
                    TraceOp::Delete(id) => {
                        dynm.delete(*id).map_err(e)?;
                        live.retain(|b| b.id != *id);
                    }
                    TraceOp::Query => {
                        let got = dynm.query();
                        let mut row = Row {
                            n: live.len(),
                            item: Some(q),
                            value: Some(got.map_or(0.0, |g| g.depth)),
                            point: got.map(|g| fmt_point(&g.point)),
                            wall_ms: ms(start),
                            ..base.clone()
                        };
                        if cfg.check {
                            let honest = got.is_none_or(|g| close(brute_depth(&g.point, &live), g.depth));
                            let mut pass = honest;
                            if inst.d == 2 {
                                let opt = brute_maxrs_disks_2d(&live).map_err(e)?.map_or(0.0, |o| o.1);
                                row.opt_if_known = Some(opt);
                                row.ratio = (opt > 0.0).then(|| row.value.unwrap_or(0.0) / opt);
                                pass &= at_least(row.value.unwrap_or(0.0), 0.5 - eps, opt);
                            }
                            row.oracle_pass = Some(pass);
                        }
                        rows.push(row);
                        q += 1;
                    }
                }
            }
            Ok(rows)
        }
        (
            Payload::ColoredDisks(disks),
            Algo::ColoredSample | Algo::ColoredExact | Algo::FirstAlgorithm | Algo::ColoredApprox | Algo::Brute,
        ) => {
            let colors = {
                let mut c: Vec<u32> = disks.iter().map(|d| d.color).collect();
                c.sort_unstable();
                c.dedup();
                c.len()
            };
            let got = match cfg.algo {
                Algo::ColoredSample => colored_solve(disks, inst.d, eps.unwrap_or(0.2), cfg.c_sample, seed)
                    .map_err(e)?
                    .map(|p| (p.point, p.depth)),
                Algo::ColoredExact => {
                    need_planar(cfg.algo, inst.d)?;
                    exact_colored_maxrs(disks).map_err(e)?.map(|p| (p.point, p.depth))
                }
                Algo::FirstAlgorithm => {
                    need_planar(cfg.algo, inst.d)?;
                    max_depth_first_algorithm(disks).map_err(e)?.map(|p| (p.point, p.depth))
                }
                Algo::ColoredApprox => {
                    need_planar(cfg.algo, inst.d)?;
                    approx_colored_maxrs(disks, eps.unwrap_or(0.3), cfg.c1, seed)
                        .map_err(e)?
                        .map(|r| (r.placement.point, r.placement.depth))
                }
                _ => {
                    need_planar(cfg.algo, inst.d)?;
                    brute_colored_maxrs_disks(disks).map_err(e)?
                }
            };
            let value = got.map_or(0, |g| g.1) as f64;
            let mut row = Row {
                m: Some(colors),
                value: Some(value),
                point: got.map(|g| fmt_point(&g.0)),
                wall_ms: ms(start),
                ..base
            };
            let opt = if cfg.check {
                if inst.d == 2 {
                    Some(brute_colored_maxrs_disks(disks).map_err(e)?.map_or(0, |o| o.1) as f64)
                } else {
                    Some(inst.opt.ok_or("no known optimum for d != 2; omit --check")?)
                }
            } else {
                inst.opt
            };
            if let Some(opt) = opt {
                row.opt_if_known = Some(opt);
                row.ratio = (opt > 0.0).then(|| value / opt);
            }
            if cfg.check {
                let opt = opt.unwrap_or(0.0);
                let honest = got.is_none_or(|g| brute_colored_depth(&g.0, disks) == g.1);
                let pass = match cfg.algo {
                    Algo::ColoredSample => at_least(value, 0.5 - eps.unwrap_or(0.2), opt),
                    Algo::ColoredApprox => at_least(value, 1.0 - eps.unwrap_or(0.3), opt),
                    _ => value == opt,
                };
                row.oracle_pass = Some(honest && pass);
            }
            Ok(vec![row])
        }
        (Payload::Sequences(pairs), Algo::MinplusBatched | Algo::MinplusBsei | Algo::Brute) => {
            let mut rows = Vec::new();
            for (i, (a, b)) in pairs.iter().enumerate() {
                let start = Instant::now();
                let m = cfg.m.unwrap_or(a.len());
                let got = match cfg.algo {
                    Algo::MinplusBatched => minplus_via_batched(a, b, m),
                    Algo::MinplusBsei => minplus_via_bsei(a, b),
                    _ => minplus_bruteforce(a, b),
                }
                .map_err(e)?;
                let wall_ms = ms(start);
                let want = minplus_bruteforce(a, b).map_err(e)?;
                let exact = got == want;
                rows.push(Row {
                    n: a.len(),
                    m: (cfg.algo == Algo::MinplusBatched).then_some(m),
                    item: Some(i),
                    exact_match: Some(exact),
                    oracle_pass: cfg.check.then_some(exact),
                    output: Some(fmt_seq(&got)),
                    wall_ms,
                    ..base.clone()
                });
            }
            Ok(rows)
        }
        (Payload::Batched1d { points, lengths }, Algo::Batched1d | Algo::Brute) => {
            let bi = Batched1DInstance {
                points: points.clone(),
                lengths: lengths.clone(),
            };
            let got = if cfg.algo == Algo::Brute {
                exhaustive_batched_1d(&bi)
            } else {
                solve_batched_1d(&bi)
            };
            let wall_ms = ms(start);
            let mut row = Row {
                m: Some(lengths.len()),
                output: Some(fmt_seq(&got)),
                wall_ms,
                ..base
            };
            if cfg.check {
                let exact = got == exhaustive_batched_1d(&bi);
                row.exact_match = Some(exact);
                row.oracle_pass = Some(exact);
            }
            Ok(vec![row])
        }
        (Payload::Bsei(points), Algo::Bsei) => {
            let got = maxrs_core::convolution::solve_bsei(points);
            Ok(vec![Row {
                output: Some(fmt_seq(&got)),
                wall_ms: ms(start),
                ..base
            }])
        }
        _ => Err(incompatible(cfg.algo, inst)),
    }
}

/// Default sample constant for the sampling solvers.
pub const C_SAMPLE: f64 = DEFAULT_C_SAMPLE;

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeMap;

    fn cfg(algo: Algo, trials: usize) -> RunConfig {
        RunConfig {
            algo,
            eps: None,
            c_sample: C_SAMPLE,
            c1: 8.0,
            m: None,
            seed: 3,
            trials,
            check: true,
            threads: 3,
        }
    }

    fn balls() -> Instance {
        let items = (0..6)
            .map(|i| WeightedBall::new(i, PointD::xy(0.4 * i as f64, 0.0), 1.0 + i as f64).unwrap())
            .collect();
        Instance {
            d: 2,
            seed: None,
            generator: BTreeMap::new(),
            opt: None,
            payload: Payload::Balls(items),
        }
    }

    #[test]
    fn trials_come_back_in_order_with_shifted_seeds() {
        let rows = run(&balls(), &cfg(Algo::Static, 5)).unwrap();
        assert_eq!(rows.iter().map(|r| r.trial).collect::<Vec<_>>(), [0, 1, 2, 3, 4]);
        assert_eq!(rows.iter().map(|r| r.seed).collect::<Vec<_>>(), [3, 4, 5, 6, 7]);
        assert!(rows.iter().all(|r| r.oracle_pass == Some(true)));
    }

    #[test]
    fn brute_reports_the_optimum() {
        let rows = run(&balls(), &cfg(Algo::Brute, 1)).unwrap();
        // centers span [0, 2], so (1, 0) is in every ball
        assert_eq!(rows[0].value, Some(21.0));
        assert_eq!(rows[0].ratio, Some(1.0));
        assert_eq!(rows[0].eps, None);
    }

    #[test]
    fn mismatched_algorithm_is_an_error() {
        assert!(run(&balls(), &cfg(Algo::Bsei, 1)).is_err());
        assert!(run(&balls(), &cfg(Algo::ColoredExact, 1)).is_err());
        assert!(run(&balls(), &cfg(Algo::Static, 0)).is_err());
    }
}
