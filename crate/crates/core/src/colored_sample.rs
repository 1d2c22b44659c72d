//! (1/2 - eps)-approximate colored MaxRS for unit balls.
//!
//! Uses the sample scaffold of the weighted solver. Balls are processed in
//! color order; each sample keeps a flag holding the last color that counted
//! for it, so a color adds at most 1 to a sample however many of its balls
//! contain it.

use crate::error::{MaxRsError, Result};
use crate::geom::{ColoredBall, PointD};
use crate::sampling::{
    inside, nonempty_cells, samples_per_cell, search, CellSampler, Objective, SamplerParams, SearchStrategy,
};

/// A point together with its colored depth.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ColoredPlacement {
    pub point: PointD,
    pub depth: u32,
}

/// A sample with its running colored depth and color flag.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FlaggedSample {
    pub location: PointD,
    pub colored_depth: u32,
    /// Last color counted for this sample, -1 before any.
    pub flag: i64,
}

impl FlaggedSample {
    pub fn new(location: PointD) -> Self {
        Self {
            location,
            colored_depth: 0,
            flag: -1,
        }
    }

    /// Account for one ball; balls must arrive grouped by color.
    #[inline]
    pub fn absorb(&mut self, ball: &ColoredBall) {
        if self.flag != ball.color as i64 && ball.contains(&self.location) {
            self.colored_depth += 1;
            self.flag = ball.color as i64;
        }
    }
}

/// Colored depths of `samples` by the flag rule, after a stable sort of
/// `balls` by color.
pub fn flag_colored_depths(samples: &[PointD], balls: &[ColoredBall]) -> Vec<FlaggedSample> {
    let mut sorted = balls.to_vec();
    sorted.sort_by_key(|b| b.color);
    let mut out: Vec<FlaggedSample> = samples.iter().map(|p| FlaggedSample::new(*p)).collect();
    for b in &sorted {
        for s in out.iter_mut() {
            s.absorb(b);
        }
    }
    out
}

struct ColoredObjective {
    centers: Vec<PointD>,
    colors: Vec<u32>,
}

impl Objective for ColoredObjective {
    fn centers(&self) -> &[PointD] {
        &self.centers
    }

    fn bound(&self, cands: &[usize]) -> f64 {
        // candidates are in color order
        let mut n = 0u32;
        let mut last = None;
        for &b in cands {
            if last != Some(self.colors[b]) {
                n += 1;
                last = Some(self.colors[b]);
            }
        }
        n as f64
    }

    fn suffix(&self, cands: &[usize], out: &mut Vec<f64>) {
        out.clear();
        out.resize(cands.len() + 1, 0.0);
        for i in (0..cands.len()).rev() {
            let fresh = i + 1 == cands.len() || self.colors[cands[i + 1]] != self.colors[cands[i]];
            out[i] = out[i + 1] + if fresh { 1.0 } else { 0.0 };
        }
    }

    fn eval(&self, p: &[f64], cands: &[usize], suffix: &[f64], need: Option<f64>) -> Option<f64> {
        let mut depth = 0u32;
        let mut flag = -1i64;
        for (i, &b) in cands.iter().enumerate() {
            if let Some(need) = need {
                if depth as f64 + suffix[i] < need {
                    return None;
                }
            }
            let color = self.colors[b] as i64;
            if flag != color && inside(p, &self.centers[b]) {
                depth += 1;
                flag = color;
            }
        }
        Some(depth as f64)
    }

    fn next_above(&self, value: f64) -> f64 {
        value + 1.0
    }
}

fn prepare(balls: &[ColoredBall], params: &SamplerParams) -> Result<(Vec<ColoredBall>, CellSampler)> {
    let grid = params.grid()?;
    for b in balls {
        if b.center.dim() != params.dim {
            return Err(MaxRsError::DimensionMismatch {
                expected: params.dim,
                got: b.center.dim(),
            });
        }
    }
    let mut sorted = balls.to_vec();
    sorted.sort_by_key(|b| (b.color, b.id));
    let sampler = CellSampler {
        seed: params.seed,
        epoch: 1,
        radius: grid.circumradius(),
        t: samples_per_cell(params.c_sample, params.eps, balls.len()),
    };
    Ok((sorted, sampler))
}

/// Colored (1/2 - eps)-approximation with the default search.
pub fn colored_solve(
    balls: &[ColoredBall],
    dim: usize,
    eps: f64,
    c_sample: f64,
    seed: u64,
) -> Result<Option<ColoredPlacement>> {
    colored_solve_with(
        balls,
        SamplerParams::new(dim, eps, seed).with_c_sample(c_sample),
        SearchStrategy::BranchAndBound,
    )
}

/// Best sample by colored depth over all nonempty cells; ties go to the
/// lowest `(grid, lattice, sample index)`.
pub fn colored_solve_with(
    balls: &[ColoredBall],
    params: SamplerParams,
    strategy: SearchStrategy,
) -> Result<Option<ColoredPlacement>> {
    let (sorted, sampler) = prepare(balls, &params)?;
    if sorted.is_empty() {
        return Ok(None);
    }
    let grid = params.grid()?;
    let obj = ColoredObjective {
        centers: sorted.iter().map(|b| b.center).collect(),
        colors: sorted.iter().map(|b| b.color).collect(),
    };
    Ok(search(&grid, &sampler, &obj, strategy).map(|b| ColoredPlacement {
        point: b.point,
        depth: b.value as u32,
    }))
}

/// Every sample of every nonempty cell with its flag-rule colored depth, in
/// `(cell, index)` order. Materializes the full sample set; meant for
/// inspection on small inputs.
pub fn colored_sample_depths(balls: &[ColoredBall], params: SamplerParams) -> Result<Vec<FlaggedSample>> {
    let (sorted, sampler) = prepare(balls, &params)?;
    let grid = params.grid()?;
    let centers: Vec<PointD> = sorted.iter().map(|b| b.center).collect();
    let mut samples = Vec::new();
    let mut coords = Vec::new();
    for key in nonempty_cells(&grid, &centers) {
        coords.clear();
        sampler.draw(&key, &grid.cell_center(&key), &mut coords);
        samples.extend(coords.chunks_exact(params.dim).map(crate::sampling::point_from));
    }
    Ok(flag_colored_depths(&samples, &sorted))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracles::{brute_colored_depth, brute_colored_maxrs_disks, make_planted_colored};
    use rand::{seq::SliceRandom, Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn disk(id: u64, x: f64, y: f64, color: u32) -> ColoredBall {
        ColoredBall::new(id, PointD::xy(x, y), color).unwrap()
    }

    fn random_disks(rng: &mut ChaCha8Rng, n: usize, colors: u32, side: f64) -> Vec<ColoredBall> {
        (0..n)
            .map(|i| {
                disk(
                    i as u64,
                    rng.random_range(0.0..side),
                    rng.random_range(0.0..side),
                    rng.random_range(1..=colors),
                )
            })
            .collect()
    }

    #[test]
    fn duplicate_colors_count_once() {
        let balls: Vec<ColoredBall> = (0..5).map(|i| disk(i, 0.05 * i as f64, 0.0, 1)).collect();
        let got = colored_solve(&balls, 2, 0.3, 1.0, 0).unwrap().unwrap();
        assert_eq!(got.depth, 1);
        assert!(colored_solve(&[], 2, 0.3, 1.0, 0).unwrap().is_none());
    }

    #[test]
    fn flag_depths_match_recount() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let balls = random_disks(&mut rng, 30, 4, 3.0);
        let params = SamplerParams::new(2, 0.45, 1).with_c_sample(0.3);
        let samples = colored_sample_depths(&balls, params).unwrap();
        assert!(!samples.is_empty());
        for s in &samples {
            assert_eq!(s.colored_depth, brute_colored_depth(&s.location, &balls));
        }
    }

    #[test]
    fn order_within_color_groups_is_irrelevant() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let balls = random_disks(&mut rng, 40, 5, 3.0);
        let probes: Vec<PointD> = (0..300)
            .map(|_| PointD::xy(rng.random_range(0.0..3.0), rng.random_range(0.0..3.0)))
            .collect();
        let base = flag_colored_depths(&probes, &balls);
        let mut shuffled = balls.clone();
        shuffled.shuffle(&mut rng);
        let again = flag_colored_depths(&probes, &shuffled);
        let depth = |v: &[FlaggedSample]| v.iter().map(|s| s.colored_depth).collect::<Vec<_>>();
        assert_eq!(depth(&base), depth(&again));
    }

    #[test]
    fn adding_a_ball_never_lowers_depth() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let mut balls = random_disks(&mut rng, 20, 4, 3.0);
        let probes: Vec<PointD> = (0..200)
            .map(|_| PointD::xy(rng.random_range(0.0..3.0), rng.random_range(0.0..3.0)))
            .collect();
        let mut prev = flag_colored_depths(&probes, &balls);
        for i in 0..10 {
            balls.push(disk(100 + i, rng.random_range(0.0..3.0), rng.random_range(0.0..3.0), rng.random_range(1..=6)));
            let next = flag_colored_depths(&probes, &balls);
            for (a, b) in prev.iter().zip(&next) {
                assert!(b.colored_depth >= a.colored_depth);
            }
            prev = next;
        }
    }

    #[test]
    fn search_matches_full_sample_scan() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for trial in 0..4 {
            let balls = random_disks(&mut rng, 25, 4, 2.5);
            let params = SamplerParams::new(2, 0.4, trial).with_c_sample(0.4);
            let bnb = colored_solve_with(&balls, params, SearchStrategy::BranchAndBound).unwrap().unwrap();
            let full = colored_solve_with(&balls, params, SearchStrategy::Exhaustive).unwrap().unwrap();
            assert_eq!(bnb, full);
            let scan = colored_sample_depths(&balls, params).unwrap();
            let max = scan.iter().map(|s| s.colored_depth).max().unwrap();
            assert_eq!(bnb.depth, max);
            assert_eq!(bnb.depth, brute_colored_depth(&bnb.point, &balls));
        }
    }

    #[test]
    fn planted_half_approximation() {
        for seed in 0..5 {
            let inst = make_planted_colored(2, 15, 20, 15, seed).unwrap();
            let got = colored_solve(&inst.balls, 2, 0.2, 4.0, seed).unwrap().unwrap();
            assert!(got.depth as f64 >= 0.3 * 15.0, "{}", got.depth);
            assert!(got.depth <= brute_colored_maxrs_disks(&inst.balls).unwrap().unwrap().1);
        }
    }
}
