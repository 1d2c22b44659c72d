//! Shifted-grid point sampling shared by the weighted and colored
//! (1/2 - eps)-approximations.
//!
//! Every nonempty grid cell `X` (a cell whose closed box is within distance 1
//! of some ball center) carries `t` points drawn uniformly from its
//! circumsphere. The points of a cell come from a ChaCha stream seeded by
//! `(seed, epoch, grid, lattice)`, so the dynamic structure, which stores
//! them, and the static solvers, which regenerate them on demand, see the same
//! sample set.
//!
//! The static solvers never materialize all samples. Cells are grouped by
//! coarse boxes of side [`COARSE_SIDE`]; boxes and then cells are visited in
//! order of an upper bound on the depth any of their samples can reach, and
//! the search stops once that bound drops below the best depth found. The
//! answer is the same as a full scan, tie-breaking included.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rustc_hash::FxHashMap;

use crate::error::{invalid, Result};
use crate::geom::{for_each_lattice, mix_seed, sphere_point, CellKey, GridCollection, PointD, MAX_DIM};

/// Default multiplier in `t = c_sample * eps^-2 * ln n`.
pub const DEFAULT_C_SAMPLE: f64 = 4.0;

/// Side of the coarse boxes used to group cells during the static search.
pub const COARSE_SIDE: f64 = 0.5;

/// Parameters shared by the grid-sampling algorithms.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SamplerParams {
    pub dim: usize,
    pub eps: f64,
    pub c_sample: f64,
    pub seed: u64,
}

impl SamplerParams {
    pub fn new(dim: usize, eps: f64, seed: u64) -> Self {
        Self {
            dim,
            eps,
            c_sample: DEFAULT_C_SAMPLE,
            seed,
        }
    }

    pub fn with_c_sample(mut self, c_sample: f64) -> Self {
        self.c_sample = c_sample;
        self
    }

    pub(crate) fn validate(&self) -> Result<()> {
        crate::geom::check_dim(self.dim)?;
        if !(self.eps > 0.0 && self.eps < 0.5) {
            return Err(invalid(format!("eps must lie in (0, 1/2), got {}", self.eps)));
        }
        if !(self.c_sample.is_finite() && self.c_sample > 0.0) {
            return Err(invalid("c_sample must be positive"));
        }
        Ok(())
    }

    /// Grid family with cell side `2 eps / sqrt(d)` and nearness `eps^2`;
    /// cell circumspheres then have radius `eps`.
    pub fn grid(&self) -> Result<GridCollection> {
        self.validate()?;
        GridCollection::new(self.dim, 2.0 * self.eps / (self.dim as f64).sqrt(), self.eps * self.eps)
    }
}

/// `ceil(c_sample * eps^-2 * ln(max(n, 2)))`.
pub fn samples_per_cell(c_sample: f64, eps: f64, n: usize) -> usize {
    let n = n.max(2) as f64;
    (c_sample * n.ln() / (eps * eps)).ceil().max(1.0) as usize
}

/// Deterministic per-cell sample streams for one epoch.
#[derive(Clone, Debug)]
pub(crate) struct CellSampler {
    pub seed: u64,
    pub epoch: u64,
    pub radius: f64,
    pub t: usize,
}

impl CellSampler {
    pub fn rng(&self, key: &CellKey) -> ChaCha8Rng {
        let parts = [self.seed, self.epoch, key.grid as u64]
            .into_iter()
            .chain(key.lattice.iter().map(|l| *l as u32 as u64));
        ChaCha8Rng::seed_from_u64(mix_seed(parts))
    }

    /// Append the `t` sample coordinates of cell `key` to `out`.
    pub fn draw(&self, key: &CellKey, center: &PointD, out: &mut Vec<f64>) {
        let mut rng = self.rng(key);
        let dim = center.dim();
        out.reserve(self.t * dim);
        for _ in 0..self.t {
            let p = sphere_point(center, self.radius, &mut rng).expect("ChaCha yields nonzero Gaussians");
            out.extend_from_slice(p.coords());
        }
    }
}

#[inline]
pub(crate) fn inside(p: &[f64], c: &PointD) -> bool {
    let mut acc = 0.0;
    for (i, x) in p.iter().enumerate() {
        let t = x - c.coords()[i];
        acc += t * t;
    }
    acc <= 1.0
}

#[inline]
pub(crate) fn point_from(p: &[f64]) -> PointD {
    let mut arr = [0.0; MAX_DIM];
    arr[..p.len()].copy_from_slice(p);
    PointD::from_array(p.len(), arr)
}

/// How the static search visits cells.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum SearchStrategy {
    /// Bound-ordered search with pruning; same answer as a full scan.
    #[default]
    BranchAndBound,
    /// Evaluate every sample of every nonempty cell.
    Exhaustive,
}

/// Depth objective evaluated by the search: weighted depth or colored depth.
pub(crate) trait Objective {
    fn centers(&self) -> &[PointD];
    /// Largest value a point could get from the candidate balls `cands`.
    fn bound(&self, cands: &[usize]) -> f64;
    /// `out[i]` = bound of `cands[i..]`, with a trailing 0.
    fn suffix(&self, cands: &[usize], out: &mut Vec<f64>);
    /// Value of `p` over `cands`, or `None` as soon as it provably stays
    /// below `need`.
    fn eval(&self, p: &[f64], cands: &[usize], suffix: &[f64], need: Option<f64>) -> Option<f64>;
    /// Smallest value that is strictly better than `value`, when the value
    /// set is discrete; `value` itself otherwise.
    fn next_above(&self, value: f64) -> f64;
}

/// Best sample found so far; ordered by value, then lowest key and index.
#[derive(Clone, Copy, Debug, PartialEq)]
pub(crate) struct Best {
    pub value: f64,
    pub key: CellKey,
    pub idx: u32,
    pub point: PointD,
}

impl Best {
    pub fn beats(&self, other: &Best) -> bool {
        self.value > other.value || (self.value == other.value && (self.key, self.idx) < (other.key, other.idx))
    }
}

fn offer(best: &mut Option<Best>, cand: Best) {
    if best.as_ref().is_none_or(|b| cand.beats(b)) {
        *best = Some(cand);
    }
}

type BoxKey = [i32; MAX_DIM];

fn coarse_buckets(dim: usize, centers: &[PointD], reach: f64) -> FxHashMap<BoxKey, Vec<usize>> {
    let mut boxes: FxHashMap<BoxKey, Vec<usize>> = FxHashMap::default();
    let h = COARSE_SIDE;
    for (b, c) in centers.iter().enumerate() {
        let mut lo = [0; MAX_DIM];
        let mut hi = [0; MAX_DIM];
        for i in 0..dim {
            lo[i] = ((c[i] - reach) / h).floor() as i32;
            hi[i] = ((c[i] + reach) / h).floor() as i32;
        }
        for_each_lattice(dim, &lo, &hi, |k| {
            let mut d2 = 0.0;
            for i in 0..dim {
                let a = k[i] as f64 * h;
                let x = c[i];
                let t = if x < a {
                    a - x
                } else if x > a + h {
                    x - a - h
                } else {
                    0.0
                };
                d2 += t * t;
            }
            if d2 <= reach * reach {
                boxes.entry(*k).or_default().push(b);
            }
        });
    }
    boxes
}

/// Visit the nonempty cells whose center lies in coarse box `bk`, passing the
/// candidate balls (center within `reach`) in ascending index order.
fn for_each_cell_in_box(
    gc: &GridCollection,
    bk: &BoxKey,
    pool: &[usize],
    centers: &[PointD],
    reach: f64,
    cands: &mut Vec<usize>,
    mut f: impl FnMut(CellKey, PointD, &[usize]),
) {
    let dim = gc.dim();
    let h = COARSE_SIDE;
    let s = gc.side();
    let reach2 = reach * reach;
    for g in 0..gc.len() {
        let off = gc.offset_array(g);
        let mut lo = [0; MAX_DIM];
        let mut hi = [0; MAX_DIM];
        for i in 0..dim {
            let a = bk[i] as f64 * h;
            lo[i] = ((a - off[i]) / s - 0.5).floor() as i32;
            hi[i] = ((a + h - off[i]) / s - 0.5).ceil() as i32;
        }
        for_each_lattice(dim, &lo, &hi, |lat| {
            let key = CellKey {
                grid: g as u32,
                lattice: *lat,
            };
            let center = gc.center_with_offset(&key, &off);
            for i in 0..dim {
                if (center[i] / h).floor() as i32 != bk[i] {
                    return;
                }
            }
            cands.clear();
            let mut touches = false;
            for &b in pool {
                if centers[b].dist2(&center) <= reach2 {
                    cands.push(b);
                    touches = touches || gc.box_dist2_with_offset(&key, &off, &centers[b]) <= 1.0;
                }
            }
            if touches {
                f(key, center, cands);
            }
        });
    }
}

/// Best sample over all nonempty cells for the given objective.
pub(crate) fn search<O: Objective>(
    gc: &GridCollection,
    sampler: &CellSampler,
    obj: &O,
    strategy: SearchStrategy,
) -> Option<Best> {
    let centers = obj.centers();
    if centers.is_empty() {
        return None;
    }
    let dim = gc.dim();
    let reach = 1.0 + sampler.radius;
    let prune = strategy == SearchStrategy::BranchAndBound;
    let boxes = coarse_buckets(dim, centers, reach);
    let mut order: Vec<(f64, BoxKey)> = boxes.iter().map(|(k, v)| (obj.bound(v), *k)).collect();
    order.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)));

    // Bounds are sums over candidates in evaluation order, so with
    // nonnegative terms no sample value can exceed them, even in floating
    // point.
    let below = |bound: f64, best: &Option<Best>| match best {
        Some(b) if prune => bound < b.value,
        _ => false,
    };
    // A cell whose bound only ties the best can win only on a lower key.
    let cannot_win = |bound: f64, key: &CellKey, best: &Option<Best>| match best {
        Some(b) if prune => bound < b.value || (bound == b.value && *key > b.key),
        _ => false,
    };

    let mut best: Option<Best> = None;
    let mut cands = Vec::new();
    let mut suffix = Vec::new();
    let mut cells: Vec<(f64, CellKey, PointD)> = Vec::new();
    for (bound, bk) in order {
        if below(bound, &best) {
            break;
        }
        let pool = &boxes[&bk];
        cells.clear();
        for_each_cell_in_box(gc, &bk, pool, centers, reach, &mut cands, |key, center, cs| {
            let ub = obj.bound(cs);
            if !cannot_win(ub, &key, &best) {
                cells.push((ub, key, center));
            }
        });
        cells.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)));
        for &(ub, key, center) in &cells {
            if below(ub, &best) {
                break;
            }
            if cannot_win(ub, &key, &best) {
                continue;
            }
            let reach2 = reach * reach;
            cands.clear();
            cands.extend(pool.iter().copied().filter(|&b| centers[b].dist2(&center) <= reach2));
            obj.suffix(&cands, &mut suffix);
            let mut rng = sampler.rng(&key);
            for idx in 0..sampler.t {
                let p = sphere_point(&center, sampler.radius, &mut rng).expect("nonzero Gaussian draw");
                // samples of a cell at or above the best key must improve strictly
                let need = match best {
                    Some(b) if prune && key >= b.key => Some(obj.next_above(b.value)),
                    Some(b) if prune => Some(b.value),
                    _ => None,
                };
                if let Some(v) = obj.eval(p.coords(), &cands, &suffix, need) {
                    offer(
                        &mut best,
                        Best {
                            value: v,
                            key,
                            idx: idx as u32,
                            point: p,
                        },
                    );
                }
            }
        }
    }
    best
}

/// Every nonempty cell of `gc` for the given ball centers, in key order.
pub(crate) fn nonempty_cells(gc: &GridCollection, centers: &[PointD]) -> Vec<CellKey> {
    let mut keys: Vec<CellKey> = Vec::new();
    for c in centers {
        for g in 0..gc.len() {
            keys.extend(gc.cells_intersecting_ball(g, c));
        }
    }
    keys.sort_unstable();
    keys.dedup();
    keys
}
