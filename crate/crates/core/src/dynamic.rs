//! Fully dynamic (1/2 - eps)-approximate MaxRS for weighted unit balls, and
//! the static solver with the same sample set.
//!
//! The structure works in epochs. An epoch starts with a rebuild that draws
//! `t = ceil(c_sample * eps^-2 * ln max(n_j, 2))` points on the circumsphere
//! of every nonempty cell of every shifted grid and computes their depths.
//! Updates then adjust the depths of the stored points they reach. A rebuild
//! fires as soon as the ball count leaves `[n_j / 2, 2 n_j]`.
//!
//! A sample on the circumsphere of `X` can lie in a ball that misses the box
//! of `X`, so updates touch every cell whose center is within `1 + eps` of the
//! ball center, not only the cells the ball intersects. Cells are nonempty
//! while at least one stored ball comes within distance 1 of their box; a
//! cell that becomes nonempty mid-epoch gets fresh samples whose depth is
//! computed from all stored balls nearby.

use rustc_hash::FxHashMap;

use crate::error::{invalid, MaxRsError, Result};
use crate::geom::{for_each_lattice, CellKey, GridCollection, PointD, WeightedBall, MAX_DIM};
use crate::sampling::{
    inside, point_from, samples_per_cell, search, CellSampler, Objective, SamplerParams, SearchStrategy,
};

/// A point together with its weighted depth.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Placement {
    pub point: PointD,
    pub depth: f64,
}

#[derive(Clone, Debug)]
struct CellSamples {
    center: PointD,
    coords: Vec<f64>,
    depth: Vec<f64>,
    /// Stored balls within distance 1 of the cell's box.
    box_count: u32,
    best: usize,
}

impl CellSamples {
    fn refresh_best(&mut self) {
        let mut best = 0;
        for (i, d) in self.depth.iter().enumerate() {
            if *d > self.depth[best] {
                best = i;
            }
        }
        self.best = best;
    }
}

/// One stored sample, as seen by [`DynamicMaxRS::for_each_sample`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SampleView {
    pub cell: CellKey,
    pub index: usize,
    pub point: PointD,
    pub depth: f64,
}

/// Dynamic (1/2 - eps)-approximate MaxRS over weighted unit balls.
#[derive(Clone, Debug)]
pub struct DynamicMaxRS {
    params: SamplerParams,
    grid: GridCollection,
    balls: FxHashMap<u64, WeightedBall>,
    /// Ball ids bucketed by their center's unit world cell.
    buckets: FxHashMap<[i32; MAX_DIM], Vec<u64>>,
    cells: FxHashMap<CellKey, CellSamples>,
    sampler: CellSampler,
    epoch_base: usize,
    rebuilds: u64,
    updates: u64,
    work: u64,
}

/// Margin keeping the "whole sphere inside the ball" shortcut consistent
/// with per-sample containment tests.
const FULL_MARGIN: f64 = 1e-9;

impl DynamicMaxRS {
    pub fn new(dim: usize, eps: f64, c_sample: f64, seed: u64) -> Result<Self> {
        Self::with_params(SamplerParams::new(dim, eps, seed).with_c_sample(c_sample))
    }

    pub fn with_params(params: SamplerParams) -> Result<Self> {
        let grid = params.grid()?;
        let sampler = CellSampler {
            seed: params.seed,
            epoch: 0,
            radius: grid.circumradius(),
            t: samples_per_cell(params.c_sample, params.eps, 0),
        };
        Ok(Self {
            params,
            grid,
            balls: FxHashMap::default(),
            buckets: FxHashMap::default(),
            cells: FxHashMap::default(),
            sampler,
            epoch_base: 0,
            rebuilds: 0,
            updates: 0,
            work: 0,
        })
    }

    /// Bulk load: one rebuild over all balls, starting epoch 1 with
    /// `n_1 = balls.len()`.
    pub fn from_balls(params: SamplerParams, balls: &[WeightedBall]) -> Result<Self> {
        let mut st = Self::with_params(params)?;
        for b in balls {
            st.check_ball(b)?;
            if st.balls.insert(b.id, *b).is_some() {
                return Err(MaxRsError::DuplicateId(b.id));
            }
            st.bucket_add(b);
        }
        st.rebuild();
        Ok(st)
    }

    pub fn params(&self) -> &SamplerParams {
        &self.params
    }

    pub fn grid(&self) -> &GridCollection {
        &self.grid
    }

    pub fn len(&self) -> usize {
        self.balls.len()
    }

    pub fn is_empty(&self) -> bool {
        self.balls.is_empty()
    }

    pub fn contains_id(&self, id: u64) -> bool {
        self.balls.contains_key(&id)
    }

    pub fn balls(&self) -> impl Iterator<Item = &WeightedBall> {
        self.balls.values()
    }

    /// Index of the current epoch; 0 before the first update.
    pub fn epoch(&self) -> u64 {
        self.sampler.epoch
    }

    /// Ball count `n_j` at the start of the current epoch.
    pub fn epoch_base(&self) -> usize {
        self.epoch_base
    }

    /// Samples per nonempty cell in the current epoch.
    pub fn samples_per_cell(&self) -> usize {
        self.sampler.t
    }

    pub fn rebuild_count(&self) -> u64 {
        self.rebuilds
    }

    pub fn update_count(&self) -> u64 {
        self.updates
    }

    /// Elementary operations so far: samples drawn plus sample/ball tests.
    pub fn work(&self) -> u64 {
        self.work
    }

    pub fn active_cells(&self) -> usize {
        self.cells.len()
    }

    pub fn sample_count(&self) -> usize {
        self.cells.values().map(|c| c.depth.len()).sum()
    }

    /// Visit every stored sample (in no particular order).
    pub fn for_each_sample(&self, mut f: impl FnMut(SampleView)) {
        let dim = self.params.dim;
        for (key, cell) in &self.cells {
            for (i, d) in cell.depth.iter().enumerate() {
                f(SampleView {
                    cell: *key,
                    index: i,
                    point: point_from(&cell.coords[i * dim..(i + 1) * dim]),
                    depth: *d,
                });
            }
        }
    }

    /// Keys of the nonempty cells, sorted.
    pub fn cell_keys(&self) -> Vec<CellKey> {
        let mut keys: Vec<CellKey> = self.cells.keys().copied().collect();
        keys.sort_unstable();
        keys
    }

    fn check_ball(&self, b: &WeightedBall) -> Result<()> {
        if b.center.dim() != self.params.dim {
            return Err(MaxRsError::DimensionMismatch {
                expected: self.params.dim,
                got: b.center.dim(),
            });
        }
        if !(b.weight.is_finite() && b.weight >= 0.0) {
            return Err(invalid("ball weight must be finite and >= 0"));
        }
        Ok(())
    }

    fn bucket_key(&self, p: &PointD) -> [i32; MAX_DIM] {
        let mut k = [0; MAX_DIM];
        for (i, ki) in k.iter_mut().enumerate().take(self.params.dim) {
            *ki = p[i].floor() as i32;
        }
        k
    }

    fn bucket_add(&mut self, b: &WeightedBall) {
        let k = self.bucket_key(&b.center);
        self.buckets.entry(k).or_default().push(b.id);
    }

    fn bucket_remove(&mut self, b: &WeightedBall) {
        let k = self.bucket_key(&b.center);
        if let Some(v) = self.buckets.get_mut(&k) {
            if let Some(pos) = v.iter().position(|id| *id == b.id) {
                v.swap_remove(pos);
            }
            if v.is_empty() {
                self.buckets.remove(&k);
            }
        }
    }

    /// Stored balls whose center is within `reach` of `p`.
    fn balls_near(&self, p: &PointD, reach: f64, out: &mut Vec<WeightedBall>) {
        out.clear();
        let dim = self.params.dim;
        let mut lo = [0; MAX_DIM];
        let mut hi = [0; MAX_DIM];
        for i in 0..dim {
            lo[i] = (p[i] - reach).floor() as i32;
            hi[i] = (p[i] + reach).floor() as i32;
        }
        let reach2 = reach * reach;
        for_each_lattice(dim, &lo, &hi, |k| {
            if let Some(ids) = self.buckets.get(k) {
                for id in ids {
                    let b = &self.balls[id];
                    if b.center.dist2(p) <= reach2 {
                        out.push(*b);
                    }
                }
            }
        });
    }

    fn reach(&self) -> f64 {
        1.0 + self.sampler.radius
    }

    /// Insert a ball; rebuilds when the count exceeds twice the epoch base.
    pub fn insert(&mut self, ball: WeightedBall) -> Result<()> {
        self.check_ball(&ball)?;
        if self.balls.contains_key(&ball.id) {
            return Err(MaxRsError::DuplicateId(ball.id));
        }
        self.balls.insert(ball.id, ball);
        self.bucket_add(&ball);
        self.updates += 1;
        if self.epoch_base == 0 || self.balls.len() > 2 * self.epoch_base {
            self.rebuild();
            return Ok(());
        }
        self.apply(&ball, true);
        Ok(())
    }

    /// Delete a ball by id; rebuilds when the count drops below half the
    /// epoch base.
    pub fn delete(&mut self, id: u64) -> Result<WeightedBall> {
        let ball = self.balls.remove(&id).ok_or(MaxRsError::UnknownId(id))?;
        self.bucket_remove(&ball);
        self.updates += 1;
        if 2 * self.balls.len() < self.epoch_base {
            self.rebuild();
            return Ok(ball);
        }
        self.apply(&ball, false);
        Ok(ball)
    }

    /// Propagate one insertion or deletion to the cells within reach.
    fn apply(&mut self, ball: &WeightedBall, adding: bool) {
        let dim = self.params.dim;
        let reach = self.reach();
        let reach2 = reach * reach;
        let full = (1.0 - self.sampler.radius - FULL_MARGIN).max(0.0);
        let full2 = full * full;
        let c = ball.center;
        let w = if adding { ball.weight } else { -ball.weight };
        let mut near = Vec::new();
        for g in 0..self.grid.len() {
            let off = self.grid.offset_array(g);
            let (lo, hi) = self.grid.center_span(&off, &c, reach);
            for_each_lattice(dim, &lo, &hi, |lat| {
                let key = CellKey {
                    grid: g as u32,
                    lattice: *lat,
                };
                let center = self.grid.center_with_offset(&key, &off);
                let d2 = center.dist2(&c);
                if d2 > reach2 {
                    return;
                }
                let touches = self.grid.box_dist2_with_offset(&key, &off, &c) <= 1.0;
                if let Some(cell) = self.cells.get_mut(&key) {
                    let mut changed = false;
                    if d2 <= full2 {
                        for d in cell.depth.iter_mut() {
                            *d += w;
                        }
                        changed = true;
                    } else {
                        self.work += cell.depth.len() as u64;
                        for (i, p) in cell.coords.chunks_exact(dim).enumerate() {
                            if inside(p, &c) {
                                cell.depth[i] += w;
                                changed = true;
                                if adding {
                                    let b = cell.best;
                                    if cell.depth[i] > cell.depth[b] || (cell.depth[i] == cell.depth[b] && i < b) {
                                        cell.best = i;
                                    }
                                }
                            }
                        }
                    }
                    if touches {
                        if adding {
                            cell.box_count += 1;
                        } else {
                            cell.box_count -= 1;
                            if cell.box_count == 0 {
                                self.cells.remove(&key);
                                return;
                            }
                        }
                    }
                    if changed && !adding {
                        cell.refresh_best();
                    }
                } else if touches && adding {
                    self.activate(key, center, &mut near);
                }
            });
        }
    }

    /// Draw samples for a newly nonempty cell and compute their full depth.
    fn activate(&mut self, key: CellKey, center: PointD, near: &mut Vec<WeightedBall>) {
        let dim = self.params.dim;
        let mut coords = Vec::new();
        self.sampler.draw(&key, &center, &mut coords);
        self.balls_near(&center, self.reach(), near);
        near.sort_unstable_by_key(|b| b.id);
        let t = self.sampler.t;
        let mut depth = vec![0.0; t];
        let mut box_count = 0;
        let full = (1.0 - self.sampler.radius - FULL_MARGIN).max(0.0);
        let full2 = full * full;
        self.work += t as u64;
        for b in near.iter() {
            if self.grid.box_dist2(&key, &b.center) <= 1.0 {
                box_count += 1;
            }
            if center.dist2(&b.center) <= full2 {
                for d in depth.iter_mut() {
                    *d += b.weight;
                }
                continue;
            }
            self.work += t as u64;
            for (i, p) in coords.chunks_exact(dim).enumerate() {
                if inside(p, &b.center) {
                    depth[i] += b.weight;
                }
            }
        }
        let mut cell = CellSamples {
            center,
            coords,
            depth,
            box_count,
            best: 0,
        };
        cell.refresh_best();
        self.cells.insert(key, cell);
    }

    /// Start a new epoch: discard all samples, resample every nonempty cell
    /// and recompute depths by adding the balls in id order.
    pub fn rebuild(&mut self) {
        self.rebuilds += 1;
        self.cells.clear();
        self.sampler.epoch += 1;
        self.epoch_base = self.balls.len();
        self.sampler.t = samples_per_cell(self.params.c_sample, self.params.eps, self.epoch_base);
        if self.balls.is_empty() {
            return;
        }
        let dim = self.params.dim;
        let mut balls: Vec<WeightedBall> = self.balls.values().copied().collect();
        balls.sort_unstable_by_key(|b| b.id);

        for b in &balls {
            for g in 0..self.grid.len() {
                let off = self.grid.offset_array(g);
                let (lo, hi) = self.grid.lattice_span(&off, &b.center, 1.0);
                for_each_lattice(dim, &lo, &hi, |lat| {
                    let key = CellKey {
                        grid: g as u32,
                        lattice: *lat,
                    };
                    if self.grid.box_dist2_with_offset(&key, &off, &b.center) > 1.0 {
                        return;
                    }
                    let cell = self.cells.entry(key).or_insert_with(|| {
                        let center = self.grid.center_with_offset(&key, &off);
                        let mut coords = Vec::new();
                        self.sampler.draw(&key, &center, &mut coords);
                        self.work += self.sampler.t as u64;
                        CellSamples {
                            center,
                            depth: vec![0.0; self.sampler.t],
                            coords,
                            box_count: 0,
                            best: 0,
                        }
                    });
                    cell.box_count += 1;
                });
            }
        }

        let reach = self.reach();
        let reach2 = reach * reach;
        let full = (1.0 - self.sampler.radius - FULL_MARGIN).max(0.0);
        let full2 = full * full;
        for b in &balls {
            for g in 0..self.grid.len() {
                let off = self.grid.offset_array(g);
                let (lo, hi) = self.grid.center_span(&off, &b.center, reach);
                for_each_lattice(dim, &lo, &hi, |lat| {
                    let key = CellKey {
                        grid: g as u32,
                        lattice: *lat,
                    };
                    let Some(cell) = self.cells.get_mut(&key) else {
                        return;
                    };
                    let d2 = cell.center.dist2(&b.center);
                    if d2 > reach2 {
                        return;
                    }
                    if d2 <= full2 {
                        for d in cell.depth.iter_mut() {
                            *d += b.weight;
                        }
                    } else {
                        self.work += cell.depth.len() as u64;
                        for (i, p) in cell.coords.chunks_exact(dim).enumerate() {
                            if inside(p, &b.center) {
                                cell.depth[i] += b.weight;
                            }
                        }
                    }
                });
            }
        }
        for cell in self.cells.values_mut() {
            cell.refresh_best();
        }
    }

    /// The stored sample of maximum depth; ties go to the lowest
    /// `(grid, lattice, sample index)`. `None` when no ball is stored.
    pub fn query(&self) -> Option<Placement> {
        let dim = self.params.dim;
        let mut best: Option<(f64, CellKey, usize)> = None;
        for (key, cell) in &self.cells {
            let d = cell.depth[cell.best];
            let better = match best {
                None => true,
                Some((bd, bk, bi)) => d > bd || (d == bd && (*key, cell.best) < (bk, bi)),
            };
            if better {
                best = Some((d, *key, cell.best));
            }
        }
        best.map(|(depth, key, i)| Placement {
            point: point_from(&self.cells[&key].coords[i * dim..(i + 1) * dim]),
            depth,
        })
    }

    /// Check the epoch invariant `n_j / 2 <= n <= 2 n_j`.
    pub fn epoch_invariant_holds(&self) -> bool {
        let n = self.balls.len();
        if self.epoch_base == 0 {
            n == 0
        } else {
            2 * n >= self.epoch_base && n <= 2 * self.epoch_base
        }
    }
}

struct WeightedObjective<'a> {
    centers: Vec<PointD>,
    weights: &'a [f64],
}

impl Objective for WeightedObjective<'_> {
    fn centers(&self) -> &[PointD] {
        &self.centers
    }

    fn bound(&self, cands: &[usize]) -> f64 {
        cands.iter().map(|b| self.weights[*b]).sum()
    }

    fn suffix(&self, cands: &[usize], out: &mut Vec<f64>) {
        out.clear();
        out.resize(cands.len() + 1, 0.0);
        for i in (0..cands.len()).rev() {
            out[i] = out[i + 1] + self.weights[cands[i]];
        }
    }

    fn eval(&self, p: &[f64], cands: &[usize], suffix: &[f64], need: Option<f64>) -> Option<f64> {
        let mut depth = 0.0;
        for (i, &b) in cands.iter().enumerate() {
            if let Some(need) = need {
                // suffix sums round differently from the running sum
                if depth + suffix[i] < need - 1e-9 * need.abs().max(1.0) {
                    return None;
                }
            }
            if inside(p, &self.centers[b]) {
                depth += self.weights[b];
            }
        }
        Some(depth)
    }

    fn next_above(&self, value: f64) -> f64 {
        value
    }
}

/// Static (1/2 - eps)-approximate MaxRS with the default `c_sample`.
pub fn static_solve(balls: &[WeightedBall], dim: usize, eps: f64, seed: u64) -> Result<Option<Placement>> {
    static_solve_with(balls, SamplerParams::new(dim, eps, seed), SearchStrategy::BranchAndBound)
}

/// Static solver: same answer as [`DynamicMaxRS::from_balls`] followed by
/// [`DynamicMaxRS::query`], computed without storing the samples.
pub fn static_solve_with(
    balls: &[WeightedBall],
    params: SamplerParams,
    strategy: SearchStrategy,
) -> Result<Option<Placement>> {
    let grid = params.grid()?;
    if balls.is_empty() {
        return Ok(None);
    }
    let mut sorted = balls.to_vec();
    sorted.sort_unstable_by_key(|b| b.id);
    for (i, b) in sorted.iter().enumerate() {
        if b.center.dim() != params.dim {
            return Err(MaxRsError::DimensionMismatch {
                expected: params.dim,
                got: b.center.dim(),
            });
        }
        if i > 0 && sorted[i - 1].id == b.id {
            return Err(MaxRsError::DuplicateId(b.id));
        }
    }
    let weights: Vec<f64> = sorted.iter().map(|b| b.weight).collect();
    let obj = WeightedObjective {
        centers: sorted.iter().map(|b| b.center).collect(),
        weights: &weights,
    };
    let sampler = CellSampler {
        seed: params.seed,
        epoch: 1,
        radius: grid.circumradius(),
        t: samples_per_cell(params.c_sample, params.eps, sorted.len()),
    };
    Ok(search(&grid, &sampler, &obj, strategy).map(|b| Placement {
        point: b.point,
        depth: b.value,
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracles::{brute_depth, brute_maxrs_disks_2d, make_planted};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn ball(id: u64, c: &[f64], w: f64) -> WeightedBall {
        WeightedBall::new(id, PointD::new(c).unwrap(), w).unwrap()
    }

    fn audit(st: &DynamicMaxRS) {
        let balls: Vec<WeightedBall> = st.balls().copied().collect();
        st.for_each_sample(|s| {
            assert_eq!(s.depth, brute_depth(&s.point, &balls), "sample {:?}", s.cell);
            let center = st.grid().cell_center(&s.cell);
            assert!((s.point.dist(&center) - st.grid().circumradius()).abs() < 1e-9);
        });
        // nonempty cells are exactly those some ball comes within 1 of
        let mut want = crate::sampling::nonempty_cells(
            st.grid(),
            &balls.iter().map(|b| b.center).collect::<Vec<_>>(),
        );
        want.sort_unstable();
        assert_eq!(st.cell_keys(), want);
    }

    #[test]
    fn empty_structure() {
        let st = DynamicMaxRS::new(2, 0.25, 4.0, 0).unwrap();
        assert!(st.query().is_none());
        assert!(DynamicMaxRS::new(2, 0.6, 4.0, 0).is_err());
        assert!(DynamicMaxRS::new(0, 0.2, 4.0, 0).is_err());
    }

    #[test]
    fn single_ball_depth_one() {
        let mut st = DynamicMaxRS::new(2, 0.45, 1.0, 3).unwrap();
        st.insert(ball(7, &[0.0, 0.0], 1.0)).unwrap();
        assert_eq!(st.query().unwrap().depth, 1.0);
        assert_eq!(st.epoch(), 1);
        audit(&st);
        assert!(matches!(st.insert(ball(7, &[1.0, 0.0], 1.0)), Err(MaxRsError::DuplicateId(7))));
        st.delete(7).unwrap();
        assert!(st.query().is_none());
        assert_eq!(st.active_cells(), 0);
        assert!(matches!(st.delete(7), Err(MaxRsError::UnknownId(7))));
    }

    #[test]
    fn disjoint_balls_report_heavier() {
        let mut st = DynamicMaxRS::new(2, 0.45, 1.0, 3).unwrap();
        st.insert(ball(1, &[0.0, 0.0], 2.0)).unwrap();
        st.insert(ball(2, &[10.0, 0.0], 5.0)).unwrap();
        let q = st.query().unwrap();
        assert_eq!(q.depth, 5.0);
        assert!(q.point.dist(&PointD::xy(10.0, 0.0)) <= 1.0);
        audit(&st);
    }

    #[test]
    fn identical_centers_give_full_depth() {
        let mut st = DynamicMaxRS::new(3, 0.45, 1.0, 11).unwrap();
        for i in 0..6 {
            st.insert(ball(i, &[1.0, 2.0, 3.0], 1.0)).unwrap();
        }
        assert_eq!(st.query().unwrap().depth, 6.0);
        audit(&st);
    }

    #[test]
    fn overlap_then_delete_matches_oracle() {
        let mut st = DynamicMaxRS::new(2, 0.4, 1.0, 5).unwrap();
        st.insert(ball(1, &[0.0, 0.0], 1.0)).unwrap();
        st.insert(ball(2, &[0.8, 0.3], 2.0)).unwrap();
        st.insert(ball(3, &[0.5, -0.4], 3.0)).unwrap();
        audit(&st);
        st.delete(1).unwrap();
        audit(&st);
    }

    #[test]
    fn epoch_rule() {
        let mut st = DynamicMaxRS::new(2, 0.45, 0.5, 1).unwrap();
        let mut rebuild_sizes = Vec::new();
        for i in 0..20 {
            let before = st.rebuild_count();
            st.insert(ball(i, &[i as f64 * 0.3, 0.0], 1.0)).unwrap();
            if st.rebuild_count() > before {
                rebuild_sizes.push(st.len());
            }
            assert!(st.epoch_invariant_holds());
        }
        assert_eq!(rebuild_sizes, vec![1, 3, 7, 15]);
        assert_eq!(st.epoch_base(), 15);
        let before = st.rebuild_count();
        for i in 0..13 {
            st.delete(i).unwrap();
            assert!(st.epoch_invariant_holds());
        }
        // 20 -> 7 balls crosses below 15 / 2 on the thirteenth deletion
        assert_eq!(st.rebuild_count(), before + 1);
        assert_eq!(st.epoch_base(), 7);
        audit(&st);
    }

    #[test]
    fn random_updates_stay_consistent() {
        let mut rng = ChaCha8Rng::seed_from_u64(2024);
        let mut st = DynamicMaxRS::new(2, 0.45, 0.5, 9).unwrap();
        let mut live: Vec<u64> = Vec::new();
        for step in 0..400u64 {
            if live.len() < 3 || rng.random_bool(0.6) {
                let w = rng.random_range(1..=4) as f64;
                st.insert(ball(step, &[rng.random_range(0.0..4.0), rng.random_range(0.0..4.0)], w))
                    .unwrap();
                live.push(step);
            } else {
                let i = rng.random_range(0..live.len());
                st.delete(live.swap_remove(i)).unwrap();
            }
            if step % 50 == 0 {
                audit(&st);
            }
        }
        audit(&st);
    }

    #[test]
    fn replay_is_deterministic() {
        let run = || {
            let mut st = DynamicMaxRS::new(2, 0.45, 1.0, 77).unwrap();
            for i in 0..12 {
                st.insert(ball(i, &[(i % 4) as f64 * 0.5, (i / 4) as f64 * 0.5], 1.0)).unwrap();
            }
            st.delete(3).unwrap();
            st.query().unwrap()
        };
        assert_eq!(run(), run());
    }

    #[test]
    fn static_matches_bulk_load_and_full_scan() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for trial in 0..6 {
            let dim = 2 + trial % 2;
            let balls: Vec<WeightedBall> = (0..25)
                .map(|i| {
                    let c: Vec<f64> = (0..dim).map(|_| rng.random_range(0.0..3.0)).collect();
                    ball(i * 3 + 1, &c, rng.random_range(1..=3) as f64)
                })
                .collect();
            let params = SamplerParams::new(dim, 0.4, trial as u64).with_c_sample(0.5);
            let st = DynamicMaxRS::from_balls(params, &balls).unwrap();
            audit(&st);
            let bulk = st.query().unwrap();
            let bnb = static_solve_with(&balls, params, SearchStrategy::BranchAndBound).unwrap().unwrap();
            let full = static_solve_with(&balls, params, SearchStrategy::Exhaustive).unwrap().unwrap();
            assert_eq!(bnb, full);
            assert_eq!(bnb, bulk);
        }
    }

    #[test]
    fn static_edge_cases() {
        assert!(static_solve(&[], 2, 0.2, 0).unwrap().is_none());
        let one = static_solve(&[ball(0, &[0.5, 0.5], 3.0)], 2, 0.3, 0).unwrap().unwrap();
        assert_eq!(one.depth, 3.0);
        let dup = [ball(0, &[0.0, 0.0], 1.0), ball(0, &[1.0, 0.0], 1.0)];
        assert!(static_solve(&dup, 2, 0.3, 0).is_err());
    }

    #[test]
    fn static_planted_half_approximation() {
        for seed in 0..5 {
            let inst = make_planted(2, 20, 20, seed).unwrap();
            let got = static_solve(&inst.balls, 2, 0.2, seed).unwrap().unwrap();
            assert!(got.depth >= 0.3 * 20.0, "{}", got.depth);
            assert_eq!(got.depth, brute_depth(&got.point, &inst.balls));
            let (_, opt) = brute_maxrs_disks_2d(&inst.balls).unwrap().unwrap();
            assert!(got.depth <= opt);
        }
    }
}
