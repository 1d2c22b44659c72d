//! Brute-force ground truth: direct depth evaluation, quadratic candidate
//! enumeration for planar disk arrangements, and planted instances whose
//! optimum is known by construction.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rustc_hash::{FxHashMap, FxHashSet};

use crate::error::{invalid, Result};
use crate::geom::{check_dim, ColoredBall, PointD, WeightedBall, MAX_DIM};

/// Containment slack used when a candidate was computed from circle
/// intersections and may sit a rounding error outside a third circle.
const CANDIDATE_TOL: f64 = 1e-9;

/// Sum of the weights of the closed unit balls containing `p`.
pub fn brute_depth(p: &PointD, balls: &[WeightedBall]) -> f64 {
    balls.iter().filter(|b| b.contains(p)).map(|b| b.weight).sum()
}

/// Number of distinct colors with at least one closed disk containing `p`.
pub fn brute_colored_depth(p: &PointD, disks: &[ColoredBall]) -> u32 {
    let colors: FxHashSet<u32> = disks.iter().filter(|b| b.contains(p)).map(|b| b.color).collect();
    colors.len() as u32
}

/// Intersection points of two unit circles, `None` when they miss or coincide.
pub fn unit_circle_intersections(a: &PointD, b: &PointD) -> Option<[PointD; 2]> {
    let dx = b.x() - a.x();
    let dy = b.y() - a.y();
    let d2 = dx * dx + dy * dy;
    if d2 == 0.0 || d2 > 4.0 {
        return None;
    }
    let d = d2.sqrt();
    let h = (1.0 - d2 / 4.0).max(0.0).sqrt();
    let (ux, uy) = (dx / d, dy / d);
    let (mx, my) = (a.x() + dx / 2.0, a.y() + dy / 2.0);
    Some([
        PointD::xy(mx - h * uy, my + h * ux),
        PointD::xy(mx + h * uy, my - h * ux),
    ])
}

/// Bucket index over planar centers with unit-2 buckets, used so candidate
/// scans only touch nearby disks.
struct Buckets {
    map: FxHashMap<(i64, i64), Vec<usize>>,
}

impl Buckets {
    const SIDE: f64 = 2.0;

    fn new(centers: impl Iterator<Item = PointD>) -> Self {
        let mut map: FxHashMap<(i64, i64), Vec<usize>> = FxHashMap::default();
        for (i, c) in centers.enumerate() {
            map.entry(Self::key(&c)).or_default().push(i);
        }
        Self { map }
    }

    fn key(p: &PointD) -> (i64, i64) {
        ((p.x() / Self::SIDE).floor() as i64, (p.y() / Self::SIDE).floor() as i64)
    }

    fn near(&self, p: &PointD, mut f: impl FnMut(usize)) {
        let (kx, ky) = Self::key(p);
        for ix in kx - 1..=kx + 1 {
            for iy in ky - 1..=ky + 1 {
                if let Some(v) = self.map.get(&(ix, iy)) {
                    v.iter().copied().for_each(&mut f);
                }
            }
        }
    }
}

/// Candidate points of a planar unit-disk arrangement: every center and every
/// pairwise boundary intersection, tagged with the indices of the generating
/// disks (which contain the candidate by definition).
fn for_each_candidate(centers: &[PointD], buckets: &Buckets, mut f: impl FnMut(PointD, usize, usize)) {
    for (i, c) in centers.iter().enumerate() {
        f(*c, i, i);
    }
    for (i, c) in centers.iter().enumerate() {
        buckets.near(c, |j| {
            if j > i {
                if let Some(pts) = unit_circle_intersections(c, &centers[j]) {
                    for p in pts {
                        f(p, i, j);
                    }
                }
            }
        });
    }
}

fn check_planar(dim: usize) -> Result<()> {
    if dim != 2 {
        return Err(invalid(format!("planar oracle needs d = 2, got {dim}")));
    }
    Ok(())
}

/// Exact weighted MaxRS for unit disks by candidate enumeration.
///
/// Returns `None` on empty input. Among candidates of equal depth the first
/// enumerated wins (centers in input order, then intersection pairs).
pub fn brute_maxrs_disks_2d(balls: &[WeightedBall]) -> Result<Option<(PointD, f64)>> {
    let Some(first) = balls.first() else {
        return Ok(None);
    };
    check_planar(first.center.dim())?;
    let centers: Vec<PointD> = balls.iter().map(|b| b.center).collect();
    let buckets = Buckets::new(centers.iter().copied());
    let mut best: Option<(PointD, f64)> = None;
    for_each_candidate(&centers, &buckets, |p, gi, gj| {
        let mut depth = 0.0;
        buckets.near(&p, |k| {
            if k == gi || k == gj || centers[k].dist2(&p) <= 1.0 + CANDIDATE_TOL {
                depth += balls[k].weight;
            }
        });
        if best.is_none_or(|(_, v)| depth > v) {
            best = Some((p, depth));
        }
    });
    Ok(best)
}

/// Exact colored MaxRS for unit disks by candidate enumeration.
pub fn brute_colored_maxrs_disks(disks: &[ColoredBall]) -> Result<Option<(PointD, u32)>> {
    let Some(first) = disks.first() else {
        return Ok(None);
    };
    check_planar(first.center.dim())?;
    let centers: Vec<PointD> = disks.iter().map(|b| b.center).collect();
    let buckets = Buckets::new(centers.iter().copied());
    let mut best: Option<(PointD, u32)> = None;
    let mut seen: Vec<u32> = Vec::new();
    for_each_candidate(&centers, &buckets, |p, gi, gj| {
        seen.clear();
        buckets.near(&p, |k| {
            if k == gi || k == gj || centers[k].dist2(&p) <= 1.0 + CANDIDATE_TOL {
                seen.push(disks[k].color);
            }
        });
        seen.sort_unstable();
        seen.dedup();
        let depth = seen.len() as u32;
        if best.is_none_or(|(_, v)| depth > v) {
            best = Some((p, depth));
        }
    });
    Ok(best)
}

/// Weighted MaxRS value on a square lattice of probe points with spacing
/// `step` over the bounding box of the disks; a cross-check for the exact
/// oracle.
pub fn grid_scan_maxrs_2d(balls: &[WeightedBall], step: f64) -> f64 {
    if balls.is_empty() {
        return 0.0;
    }
    let (mut x0, mut y0, mut x1, mut y1) = (f64::MAX, f64::MAX, f64::MIN, f64::MIN);
    for b in balls {
        x0 = x0.min(b.center.x() - 1.0);
        y0 = y0.min(b.center.y() - 1.0);
        x1 = x1.max(b.center.x() + 1.0);
        y1 = y1.max(b.center.y() + 1.0);
    }
    let nx = ((x1 - x0) / step).ceil() as usize;
    let ny = ((y1 - y0) / step).ceil() as usize;
    let mut best: f64 = 0.0;
    for i in 0..=nx {
        for j in 0..=ny {
            let p = PointD::xy(x0 + i as f64 * step, y0 + j as f64 * step);
            best = best.max(brute_depth(&p, balls));
        }
    }
    best
}

/// An instance whose optimum is known: `k` unit balls around `point`, plus
/// decoys that are pairwise disjoint and disjoint from every planted ball.
#[derive(Clone, Debug)]
pub struct PlantedInstance {
    pub balls: Vec<WeightedBall>,
    pub point: PointD,
    pub value: f64,
    /// Number of planted balls; the planted ones come first in `balls`.
    pub planted: usize,
}

/// Colored counterpart of [`PlantedInstance`]. The planted disks carry colors
/// `1..=k`; decoy colors are chosen by the generator.
#[derive(Clone, Debug)]
pub struct PlantedColoredInstance {
    pub balls: Vec<ColoredBall>,
    pub point: PointD,
    pub value: u32,
    pub planted: usize,
}

/// Minimum distance from the planted point to any decoy center, and between
/// decoy centers. Anything above 2 keeps the unit balls disjoint.
pub const DECOY_SEPARATION: f64 = 3.0;

/// Radius of the ball around the planted point that holds planted centers.
pub const PLANTED_SPREAD: f64 = 0.9;

/// Weighted planted instance with unit weights.
pub fn make_planted(dim: usize, k: usize, n_decoys: usize, seed: u64) -> Result<PlantedInstance> {
    let (point, centers) = planted_centers(dim, k, n_decoys, seed)?;
    let balls = centers
        .iter()
        .enumerate()
        .map(|(i, c)| WeightedBall::new(i as u64, *c, 1.0))
        .collect::<Result<Vec<_>>>()?;
    Ok(PlantedInstance {
        balls,
        point,
        value: k as f64,
        planted: k,
    })
}

/// Colored planted instance. Decoys cycle through colors `1..=decoy_colors`;
/// with `decoy_colors == 0` every decoy gets its own fresh color after `k`.
pub fn make_planted_colored(
    dim: usize,
    k: usize,
    n_decoys: usize,
    decoy_colors: u32,
    seed: u64,
) -> Result<PlantedColoredInstance> {
    let (point, centers) = planted_centers(dim, k, n_decoys, seed)?;
    let balls = centers
        .iter()
        .enumerate()
        .map(|(i, c)| {
            let color = if i < k {
                i as u32 + 1
            } else if decoy_colors == 0 {
                i as u32 + 1
            } else {
                ((i - k) as u32 % decoy_colors) + 1
            };
            ColoredBall::new(i as u64, *c, color)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(PlantedColoredInstance {
        balls,
        point,
        value: k as u32,
        planted: k,
    })
}

fn uniform_in_ball<R: Rng>(dim: usize, radius: f64, rng: &mut R) -> [f64; MAX_DIM] {
    let mut v = [0.0; MAX_DIM];
    let mut n2 = 0.0;
    while n2 == 0.0 {
        n2 = 0.0;
        for x in v.iter_mut().take(dim) {
            *x = rng.sample(StandardNormal);
            n2 += *x * *x;
        }
    }
    let r = radius * rng.random::<f64>().powf(1.0 / dim as f64) / f64::sqrt(n2);
    for x in v.iter_mut().take(dim) {
        *x *= r;
    }
    v
}

fn planted_centers(dim: usize, k: usize, n_decoys: usize, seed: u64) -> Result<(PointD, Vec<PointD>)> {
    check_dim(dim)?;
    if k == 0 {
        return Err(invalid("planted instances need k >= 1"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut q = [0.0; MAX_DIM];
    for x in q.iter_mut().take(dim) {
        *x = rng.random_range(0.0..10.0);
    }
    let point = PointD::from_array(dim, q);
    let mut centers = Vec::with_capacity(k + n_decoys);
    for _ in 0..k {
        let off = uniform_in_ball(dim, PLANTED_SPREAD, &mut rng);
        centers.push(point.translated(&off[..dim]));
    }

    // Rejection sampling in a box sized for a sparse packing; the box grows
    // if the generator keeps failing.
    let sep2 = DECOY_SEPARATION * DECOY_SEPARATION;
    let mut half = DECOY_SEPARATION * (4.0 * n_decoys.max(1) as f64).powf(1.0 / dim as f64) / 2.0 + 2.0 * DECOY_SEPARATION;
    let mut grid: FxHashMap<[i64; MAX_DIM], Vec<PointD>> = FxHashMap::default();
    let key = |p: &PointD| {
        let mut k = [0i64; MAX_DIM];
        for (i, ki) in k.iter_mut().enumerate().take(dim) {
            *ki = (p[i] / DECOY_SEPARATION).floor() as i64;
        }
        k
    };
    let mut placed = 0;
    let mut failures = 0usize;
    while placed < n_decoys {
        let mut c = [0.0; MAX_DIM];
        for i in 0..dim {
            c[i] = q[i] + rng.random_range(-half..half);
        }
        let c = PointD::from_array(dim, c);
        let mut ok = c.dist2(&point) >= sep2;
        if ok {
            let base = key(&c);
            let mut lo = base;
            let mut hi = base;
            for i in 0..dim {
                lo[i] -= 1;
                hi[i] += 1;
            }
            ok = !any_in_range(dim, &lo, &hi, &grid, |o| o.dist2(&c) < sep2);
        }
        if ok {
            grid.entry(key(&c)).or_default().push(c);
            centers.push(c);
            placed += 1;
            failures = 0;
        } else {
            failures += 1;
            if failures > 1000 {
                half *= 1.5;
                failures = 0;
            }
        }
    }
    Ok((point, centers))
}

fn any_in_range(
    dim: usize,
    lo: &[i64; MAX_DIM],
    hi: &[i64; MAX_DIM],
    grid: &FxHashMap<[i64; MAX_DIM], Vec<PointD>>,
    pred: impl Fn(&PointD) -> bool,
) -> bool {
    let mut cur = *lo;
    loop {
        if let Some(v) = grid.get(&cur) {
            if v.iter().any(&pred) {
                return true;
            }
        }
        let mut axis = 0;
        loop {
            if axis == dim {
                return false;
            }
            if cur[axis] < hi[axis] {
                cur[axis] += 1;
                break;
            }
            cur[axis] = lo[axis];
            axis += 1;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ball(id: u64, x: f64, y: f64, w: f64) -> WeightedBall {
        WeightedBall::new(id, PointD::xy(x, y), w).unwrap()
    }

    #[test]
    fn depth_basics() {
        let balls = vec![ball(0, 0.0, 0.0, 1.0), ball(1, 0.0, 0.0, 1.0), ball(2, 0.0, 0.0, 1.0)];
        assert_eq!(brute_depth(&PointD::xy(0.0, 0.0), &balls), 3.0);
        assert_eq!(brute_depth(&PointD::xy(5.0, 0.0), &balls), 0.0);
        // closed balls
        assert_eq!(brute_depth(&PointD::xy(1.0, 0.0), &balls), 3.0);
    }

    #[test]
    fn colored_depth_counts_colors_once() {
        let disks: Vec<ColoredBall> = (0..5)
            .map(|i| ColoredBall::new(i, PointD::xy(0.1 * i as f64, 0.0), 1).unwrap())
            .collect();
        assert_eq!(brute_colored_depth(&PointD::xy(0.2, 0.0), &disks), 1);
        assert_eq!(brute_colored_depth(&PointD::xy(9.0, 0.0), &disks), 0);
    }

    #[test]
    fn brute_maxrs_small_cases() {
        assert!(brute_maxrs_disks_2d(&[]).unwrap().is_none());
        let (_, v) = brute_maxrs_disks_2d(&[ball(0, 3.0, 3.0, 2.5)]).unwrap().unwrap();
        assert_eq!(v, 2.5);
        let (p, v) = brute_maxrs_disks_2d(&[ball(0, 0.0, 0.0, 1.0), ball(1, 1.5, 0.0, 1.0)])
            .unwrap()
            .unwrap();
        assert_eq!(v, 2.0);
        assert!(p.dist(&PointD::xy(0.0, 0.0)) <= 1.0 + 1e-9);
        assert!(p.dist(&PointD::xy(1.5, 0.0)) <= 1.0 + 1e-9);
    }

    #[test]
    fn brute_maxrs_rejects_other_dimensions() {
        let b = WeightedBall::new(0, PointD::new(&[0.0, 0.0, 0.0]).unwrap(), 1.0).unwrap();
        assert!(brute_maxrs_disks_2d(&[b]).is_err());
    }

    #[test]
    fn circle_intersection_closed_form() {
        let [p, q] = unit_circle_intersections(&PointD::xy(0.0, 0.0), &PointD::xy(1.0, 0.0)).unwrap();
        let s = 3f64.sqrt() / 2.0;
        assert!((p.x() - 0.5).abs() < 1e-12 && (p.y() - s).abs() < 1e-12);
        assert!((q.x() - 0.5).abs() < 1e-12 && (q.y() + s).abs() < 1e-12);
        assert!(unit_circle_intersections(&PointD::xy(0.0, 0.0), &PointD::xy(2.5, 0.0)).is_none());
    }

    #[test]
    fn colored_oracle_examples() {
        let disks = vec![
            ColoredBall::new(0, PointD::xy(0.0, 0.0), 1).unwrap(),
            ColoredBall::new(1, PointD::xy(0.5, 0.0), 1).unwrap(),
            ColoredBall::new(2, PointD::xy(1.0, 0.0), 2).unwrap(),
        ];
        assert_eq!(brute_colored_maxrs_disks(&disks).unwrap().unwrap().1, 2);
        assert_eq!(brute_colored_depth(&PointD::xy(0.5, 0.0), &disks), 2);

        let star: Vec<ColoredBall> = (0..7)
            .map(|i| {
                let a = i as f64;
                ColoredBall::new(i, PointD::xy(a.cos(), a.sin()), i as u32 + 1).unwrap()
            })
            .collect();
        assert_eq!(brute_colored_maxrs_disks(&star).unwrap().unwrap().1, 7);
    }

    #[test]
    fn brute_matches_grid_scan() {
        let mut rng = ChaCha8Rng::seed_from_u64(77);
        for _ in 0..20 {
            let balls: Vec<WeightedBall> = (0..10)
                .map(|i| ball(i, rng.random_range(0.0..4.0), rng.random_range(0.0..4.0), 1.0))
                .collect();
            let exact = brute_maxrs_disks_2d(&balls).unwrap().unwrap().1;
            let scan = grid_scan_maxrs_2d(&balls, 0.01);
            assert!(exact >= scan, "{exact} < {scan}");
            // a probe lattice this fine misses only very thin lenses
            assert!(exact - scan <= 1.0, "{exact} vs {scan}");
        }
    }

    #[test]
    fn planted_instances_are_certified() {
        for seed in 0..10 {
            let inst = make_planted(2, 10, 40, seed).unwrap();
            assert_eq!(inst.balls.len(), 50);
            assert_eq!(brute_depth(&inst.point, &inst.balls), 10.0);
            let (_, opt) = brute_maxrs_disks_2d(&inst.balls).unwrap().unwrap();
            assert_eq!(opt, 10.0);
        }
        let one = make_planted(2, 1, 0, 3).unwrap();
        assert_eq!(one.value, 1.0);
        assert!(make_planted(2, 0, 5, 3).is_err());
    }

    #[test]
    fn planted_decoys_are_separated_in_three_dimensions() {
        let inst = make_planted(3, 20, 200, 4).unwrap();
        assert_eq!(brute_depth(&inst.point, &inst.balls), 20.0);
        let decoys = &inst.balls[inst.planted..];
        for (i, a) in decoys.iter().enumerate() {
            assert!(a.center.dist(&inst.point) >= DECOY_SEPARATION);
            for b in &decoys[i + 1..] {
                assert!(a.center.dist(&b.center) >= DECOY_SEPARATION);
            }
        }
    }

    #[test]
    fn planted_colored_instance() {
        let inst = make_planted_colored(2, 12, 30, 5, 8).unwrap();
        assert_eq!(brute_colored_depth(&inst.point, &inst.balls), 12);
        assert_eq!(brute_colored_maxrs_disks(&inst.balls).unwrap().unwrap().1, 12);
        assert!(inst.balls[12..].iter().all(|b| (1..=5).contains(&b.color)));
    }
}
