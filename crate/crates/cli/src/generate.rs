//! Seeded instance generators.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use maxrs_core::convolution::build_batched_instance;
use maxrs_core::oracles::{make_planted, make_planted_colored};
use maxrs_core::{ColoredBall, PointD, WeightedBall};

use crate::schema::{num, Instance, Payload, TraceOp};

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum GenKind {
    /// Planted weighted balls: k unit-weight balls around one point plus decoys.
    Planted,
    /// Planted colored balls: k colors around one point plus decoys.
    PlantedColored,
    /// Uniform balls with integer weights in a cube.
    RandomBalls,
    /// Uniform colored disks in a square.
    RandomColored,
    /// Pairs of integer sequences for the convolution reductions.
    Sequences,
    /// Batched 1D MaxRS built from a random sequence pair.
    Batched1d,
    /// Random points on a line for batched smallest enclosing intervals.
    Bsei,
    /// Random insert/delete/query script.
    Trace,
}

#[derive(Clone, Debug, clap::Args)]
pub struct GenSpec {
    /// What to generate.
    #[arg(long)]
    pub kind: GenKind,
    #[arg(long, default_value_t = 2)]
    pub d: usize,
    /// Items (balls, disks, sequence length, points, or trace operations).
    #[arg(long, default_value_t = 100)]
    pub n: usize,
    /// Planted cluster size.
    #[arg(long, default_value_t = 20)]
    pub k: usize,
    /// Decoy count for planted instances.
    #[arg(long, default_value_t = 200)]
    pub decoys: usize,
    /// Decoy colors cycle through 1..=this; 0 gives each decoy its own color.
    #[arg(long, default_value_t = 0)]
    pub decoy_colors: u32,
    /// Number of colors for random colored disks.
    #[arg(long, default_value_t = 5)]
    pub colors: u32,
    /// Side of the sampling cube.
    #[arg(long, default_value_t = 10.0)]
    pub side: f64,
    /// Number of sequence pairs.
    #[arg(long, default_value_t = 1)]
    pub pairs: usize,
    /// Output indices for batched 1D instances (default: all).
    #[arg(long)]
    pub m: Option<usize>,
    /// Largest live set of a trace.
    #[arg(long, default_value_t = 100)]
    pub max_live: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

fn cube(r: &mut ChaCha8Rng, d: usize, side: f64) -> PointD {
    let c: Vec<f64> = (0..d).map(|_| r.random_range(0.0..side)).collect();
    PointD::new(&c).expect("valid dimension checked earlier")
}

pub fn generate(spec: &GenSpec) -> Result<Instance, String> {
    if spec.d == 0 || spec.d > maxrs_core::MAX_DIM {
        return Err(format!("d must lie in 1..={}", maxrs_core::MAX_DIM));
    }
    if !(spec.side > 0.0 && spec.side.is_finite()) {
        return Err("side must be positive".into());
    }
    let mut r = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut generator = BTreeMap::from([
        ("name".to_string(), format!("{:?}", spec.kind).to_lowercase()),
        ("seed".to_string(), spec.seed.to_string()),
    ]);
    let mut put = |k: &str, v: String| {
        generator.insert(k.to_string(), v);
    };
    let mut opt = None;
    let payload = match spec.kind {
        GenKind::Planted => {
            put("k", spec.k.to_string());
            put("decoys", spec.decoys.to_string());
            let inst = make_planted(spec.d, spec.k, spec.decoys, spec.seed).map_err(|e| e.to_string())?;
            opt = Some(inst.value);
            Payload::Balls(inst.balls)
        }
        GenKind::PlantedColored => {
            put("k", spec.k.to_string());
            put("decoys", spec.decoys.to_string());
            put("decoy_colors", spec.decoy_colors.to_string());
            let inst = make_planted_colored(spec.d, spec.k, spec.decoys, spec.decoy_colors, spec.seed)
                .map_err(|e| e.to_string())?;
            opt = Some(inst.value as f64);
            Payload::ColoredDisks(inst.balls)
        }
        GenKind::RandomBalls => {
            put("n", spec.n.to_string());
            put("side", num(spec.side));
            Payload::Balls(
                (0..spec.n)
                    .map(|i| {
                        let c = cube(&mut r, spec.d, spec.side);
                        WeightedBall::new(i as u64, c, r.random_range(1..=5) as f64).expect("valid weight")
                    })
                    .collect(),
            )
        }
        GenKind::RandomColored => {
            if spec.colors == 0 {
                return Err("colors must be positive".into());
            }
            put("n", spec.n.to_string());
            put("colors", spec.colors.to_string());
            put("side", num(spec.side));
            Payload::ColoredDisks(
                (0..spec.n)
                    .map(|i| {
                        let c = cube(&mut r, spec.d, spec.side);
                        ColoredBall::new(i as u64, c, r.random_range(1..=spec.colors)).expect("valid color")
                    })
                    .collect(),
            )
        }
        GenKind::Sequences => {
            if spec.n == 0 {
                return Err("sequences need n >= 1".into());
            }
            put("n", spec.n.to_string());
            put("pairs", spec.pairs.to_string());
            let mut seq = || (0..spec.n).map(|_| r.random_range(-1000..=1000) as f64).collect::<Vec<_>>();
            Payload::Sequences((0..spec.pairs).map(|_| (seq(), seq())).collect())
        }
        GenKind::Batched1d => {
            if spec.n == 0 {
                return Err("batched1d needs n >= 1".into());
            }
            let m = spec.m.unwrap_or(spec.n).min(spec.n);
            put("n", spec.n.to_string());
            put("m", m.to_string());
            let a: Vec<f64> = (0..spec.n).map(|_| r.random_range(0..=1000) as f64).collect();
            let b: Vec<f64> = (0..spec.n).map(|_| r.random_range(0..=1000) as f64).collect();
            let mask: Vec<usize> = (0..m).collect();
            let inst = build_batched_instance(&a, &b, &mask).map_err(|e| e.to_string())?;
            Payload::Batched1d {
                points: inst.points,
                lengths: inst.lengths,
            }
        }
        GenKind::Bsei => {
            put("n", spec.n.to_string());
            Payload::Bsei((0..spec.n).map(|_| r.random_range(-1000..=1000) as f64).collect())
        }
        GenKind::Trace => {
            put("ops", spec.n.to_string());
            put("max_live", spec.max_live.to_string());
            put("side", num(spec.side));
            let mut live: Vec<u64> = Vec::new();
            let mut next = 0u64;
            let mut ops = Vec::with_capacity(spec.n);
            for _ in 0..spec.n {
                let roll: f64 = r.random();
                if roll < 0.2 {
                    ops.push(TraceOp::Query);
                } else if live.is_empty() || (live.len() < spec.max_live && roll < 0.65) {
                    let c = cube(&mut r, spec.d, spec.side);
                    let b = WeightedBall::new(next, c, r.random_range(1..=5) as f64).expect("valid weight");
                    live.push(next);
                    next += 1;
                    ops.push(TraceOp::Insert(b));
                } else {
                    let i = r.random_range(0..live.len());
                    ops.push(TraceOp::Delete(live.swap_remove(i)));
                }
            }
            ops.push(TraceOp::Query);
            Payload::Trace(ops)
        }
    };
    let d = match spec.kind {
        GenKind::Sequences | GenKind::Batched1d | GenKind::Bsei => 1,
        _ => spec.d,
    };
    Ok(Instance {
        d,
        seed: Some(spec.seed),
        generator,
        opt,
        payload,
    })
}
