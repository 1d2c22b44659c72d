//! Exact colored MaxRS for unit disks in the plane.
//!
//! Two solvers. The first builds the vertical decomposition of the
//! arrangement of the per-color union boundaries with a left-to-right sweep,
//! then walks the cell adjacency graph from the cell on the left wall of the
//! bounding box (depth 0), adding or removing one color whenever an arc is
//! crossed. The second overlays 36 shifted unit grids, keeps per cell only
//! the disks that contain a cell corner, and runs the first solver on the
//! cells in decreasing order of their distinct-color count.

use std::collections::VecDeque;

use rustc_hash::FxHashMap;

use crate::colored_sample::ColoredPlacement;
use crate::disk_union::{arc_intersections, boundary_arcs, prepare_disks, ArcSegment, IntersectionPoint};
use crate::error::{invalid, precondition, Result};
use crate::geom::{ColoredBall, GridCollection, PointD};

/// Margin added around the disk centers to get the sweep box.
pub const BOX_MARGIN: f64 = 3.0;

/// Axis-aligned box.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BBox {
    pub min: (f64, f64),
    pub max: (f64, f64),
}

impl BBox {
    /// Bounding box of the centers, grown by [`BOX_MARGIN`] on every side.
    pub fn around(disks: &[ColoredBall]) -> Option<BBox> {
        let first = disks.first()?;
        let mut b = BBox {
            min: (first.center.x(), first.center.y()),
            max: (first.center.x(), first.center.y()),
        };
        for d in disks {
            b.min.0 = b.min.0.min(d.center.x());
            b.min.1 = b.min.1.min(d.center.y());
            b.max.0 = b.max.0.max(d.center.x());
            b.max.1 = b.max.1.max(d.center.y());
        }
        b.min.0 -= BOX_MARGIN;
        b.min.1 -= BOX_MARGIN;
        b.max.0 += BOX_MARGIN;
        b.max.1 += BOX_MARGIN;
        Some(b)
    }
}

/// Lower or upper side of a decomposition cell.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Boundary {
    Box,
    Arc(usize),
}

/// A pseudo-trapezoid of the vertical decomposition.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DecompositionCell {
    pub x_range: (f64, f64),
    pub bottom: Boundary,
    pub top: Boundary,
    /// Interior point: the x-midpoint, halfway between the two sides.
    pub witness: PointD,
    /// Colored depth, set by [`assign_depths`].
    pub depth: Option<u32>,
}

/// Cells of the vertical decomposition and their adjacencies. Cell 0 is the
/// one on the left wall of the box.
#[derive(Clone, Debug)]
pub struct Decomposition {
    pub bbox: BBox,
    pub arcs: Vec<ArcSegment>,
    pub cells: Vec<DecompositionCell>,
    /// Pairs of cells sharing a piece of a vertical wall.
    pub walls: Vec<(usize, usize)>,
    /// `(below, above, arc)`: the cells on the two sides of a piece of arc.
    pub crossings: Vec<(usize, usize, usize)>,
}

#[derive(Default)]
struct Event {
    point: Option<PointD>,
    starts: Vec<usize>,
    ends: Vec<usize>,
    crosses: Vec<usize>,
}

impl Event {
    fn passes(&self, a: usize) -> bool {
        self.ends.contains(&a) || self.crosses.contains(&a)
    }
}

fn events(arcs: &[ArcSegment], crossings: &[IntersectionPoint]) -> Vec<Event> {
    let mut map: FxHashMap<(u64, u64), Event> = FxHashMap::default();
    let key = |p: &PointD| (p.x().to_bits(), p.y().to_bits());
    for (k, a) in arcs.iter().enumerate() {
        let e = map.entry(key(&a.left.point)).or_default();
        e.point = Some(a.left.point);
        e.starts.push(k);
        let e = map.entry(key(&a.right.point)).or_default();
        e.point = Some(a.right.point);
        e.ends.push(k);
    }
    for x in crossings {
        let e = map.entry(key(&x.location)).or_default();
        e.point = Some(x.location);
        e.crosses.push(x.arcs.0);
        e.crosses.push(x.arcs.1);
    }
    let mut out: Vec<Event> = map.into_values().collect();
    out.sort_by(|a, b| {
        let (p, q) = (a.point.unwrap(), b.point.unwrap());
        p.x().total_cmp(&q.x()).then(p.y().total_cmp(&q.y()))
    });
    out
}

/// Vertical decomposition of the arrangement of `arcs` by a sweep over the
/// arc endpoints and `crossings`. Arcs must lie strictly inside `bbox`.
pub fn vertical_decomposition(
    arcs: &[ArcSegment],
    crossings: &[IntersectionPoint],
    bbox: BBox,
) -> Result<Decomposition> {
    for a in arcs {
        let (x0, x1) = (a.left.point.x(), a.right.point.x());
        let (y0, y1) = (a.center.y() - 1.0, a.center.y() + 1.0);
        if !(x0 > bbox.min.0 && x1 < bbox.max.0 && y0 > bbox.min.1 && y1 < bbox.max.1) {
            return Err(precondition("arc leaves the bounding box"));
        }
    }
    let evs = events(arcs, crossings);
    let mut cells = vec![DecompositionCell {
        x_range: (bbox.min.0, bbox.max.0),
        bottom: Boundary::Box,
        top: Boundary::Box,
        witness: PointD::origin(2),
        depth: None,
    }];
    let mut walls = Vec::new();
    let mut cross = Vec::new();
    let mut active: Vec<usize> = Vec::new();
    let mut gaps: Vec<usize> = vec![0];
    let mut next_x = bbox.max.0;
    for (ei, ev) in evs.iter().enumerate() {
        let p = ev.point.unwrap();
        let (x, y) = (p.x(), p.y());
        if ei == 0 || evs[ei - 1].point.unwrap().x() != x {
            next_x = evs[ei + 1..]
                .iter()
                .map(|e| e.point.unwrap().x())
                .find(|&nx| nx > x)
                .unwrap_or(bbox.max.0);
        }
        let yv = |a: usize| if ev.passes(a) { y } else { arcs[a].y_at(x) };
        let lo = active.partition_point(|&a| !ev.passes(a) && yv(a) < y);
        let mut hi = lo;
        while hi < active.len() && ev.passes(active[hi]) {
            hi += 1;
        }
        if hi - lo != ev.ends.len() + ev.crosses.len() {
            return Err(precondition("arrangement is not in general position"));
        }
        let below = if lo == 0 { f64::NEG_INFINITY } else { yv(active[lo - 1]) };
        let above = if hi == active.len() { f64::INFINITY } else { yv(active[hi]) };
        // gaps closing at x, as (cell, interval at x)
        let old: Vec<(usize, f64, f64)> = (lo..=hi)
            .map(|g| {
                let b = if g == lo { below } else { y };
                let t = if g == hi { above } else { y };
                (gaps[g], b, t)
            })
            .collect();
        for &(c, _, _) in &old {
            cells[c].x_range.1 = x;
        }
        let xm = 0.5 * (x + next_x);
        let mut fresh: Vec<usize> = ev.crosses.iter().chain(&ev.starts).copied().collect();
        fresh.sort_by(|&a, &b| arcs[a].y_at(xm).total_cmp(&arcs[b].y_at(xm)).then(a.cmp(&b)));
        fresh.dedup();
        let k = fresh.len();
        active.splice(lo..hi, fresh);
        let first = cells.len();
        for g in lo..=lo + k {
            cells.push(DecompositionCell {
                x_range: (x, bbox.max.0),
                bottom: if g == 0 { Boundary::Box } else { Boundary::Arc(active[g - 1]) },
                top: if g == active.len() { Boundary::Box } else { Boundary::Arc(active[g]) },
                witness: PointD::origin(2),
                depth: None,
            });
        }
        gaps.splice(lo..=hi, first..first + k + 1);
        for g in lo..=lo + k {
            let b = if g == lo { below } else { y };
            let t = if g == lo + k { above } else { y };
            if b < t {
                for &(c, ob, ot) in &old {
                    if b.max(ob) < t.min(ot) {
                        walls.push((c, gaps[g]));
                    }
                }
            }
            if g > 0 {
                cross.push((gaps[g - 1], gaps[g], active[g - 1]));
            }
            if g < active.len() {
                cross.push((gaps[g], gaps[g + 1], active[g]));
            }
        }
    }
    if !active.is_empty() {
        return Err(precondition("sweep ended with open arcs"));
    }
    cross.sort_unstable();
    cross.dedup();
    for c in cells.iter_mut() {
        let xm = 0.5 * (c.x_range.0 + c.x_range.1);
        let side = |b: Boundary, dflt: f64| match b {
            Boundary::Box => dflt,
            Boundary::Arc(a) => arcs[a].y_at(xm),
        };
        let yb = side(c.bottom, bbox.min.1);
        let yt = side(c.top, bbox.max.1);
        c.witness = PointD::xy(xm, 0.5 * (yb + yt));
    }
    Ok(Decomposition {
        bbox,
        arcs: arcs.to_vec(),
        cells,
        walls,
        crossings: cross,
    })
}

/// Order in which [`assign_depths`] visits cells.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Traversal {
    #[default]
    Bfs,
    Dfs,
}

/// Depth of every cell from the left-wall cell (depth 0). Crossing an arc
/// into the interior side of its color's union adds 1, out of it removes 1.
/// Fails if two paths disagree.
pub fn assign_depths(dec: &mut Decomposition, order: Traversal) -> Result<()> {
    let n = dec.cells.len();
    let mut adj: Vec<Vec<(usize, i64)>> = vec![Vec::new(); n];
    for &(a, b) in &dec.walls {
        adj[a].push((b, 0));
        adj[b].push((a, 0));
    }
    for &(below, above, arc) in &dec.crossings {
        let up = if dec.arcs[arc].interior_below() { -1 } else { 1 };
        adj[below].push((above, up));
        adj[above].push((below, -up));
    }
    let mut depth: Vec<Option<i64>> = vec![None; n];
    depth[0] = Some(0);
    let mut queue = VecDeque::from([0usize]);
    while let Some(c) = match order {
        Traversal::Bfs => queue.pop_front(),
        Traversal::Dfs => queue.pop_back(),
    } {
        let dc = depth[c].unwrap();
        for &(o, delta) in &adj[c] {
            let want = dc + delta;
            match depth[o] {
                None => {
                    depth[o] = Some(want);
                    queue.push_back(o);
                }
                Some(have) if have != want => return Err(precondition("inconsistent cell depths")),
                Some(_) => {}
            }
        }
    }
    for (cell, d) in dec.cells.iter_mut().zip(depth) {
        match d {
            Some(v) if v >= 0 => cell.depth = Some(v as u32),
            _ => return Err(precondition("cell not reached or negative depth")),
        }
    }
    Ok(())
}

impl Decomposition {
    /// Deepest cell; ties go to the lexicographically smallest witness.
    pub fn deepest(&self) -> Option<ColoredPlacement> {
        self.cells
            .iter()
            .filter_map(|c| c.depth.map(|d| (d, c.witness)))
            .max_by(|a, b| {
                a.0.cmp(&b.0)
                    .then(b.1.x().total_cmp(&a.1.x()))
                    .then(b.1.y().total_cmp(&a.1.y()))
            })
            .map(|(depth, point)| ColoredPlacement { point, depth })
    }
}

/// First algorithm on disks already in general position.
pub fn first_algorithm_prepared(disks: &[ColoredBall], order: Traversal) -> Result<Option<ColoredPlacement>> {
    let Some(bbox) = BBox::around(disks) else {
        return Ok(None);
    };
    let arcs = boundary_arcs(disks);
    let crossings = arc_intersections(disks, &arcs);
    let mut dec = vertical_decomposition(&arcs, &crossings, bbox)?;
    assign_depths(&mut dec, order)?;
    Ok(dec.deepest())
}

/// Maximum colored depth over the plane by a full arrangement sweep.
pub fn max_depth_first_algorithm(disks: &[ColoredBall]) -> Result<Option<ColoredPlacement>> {
    let prepared = prepare_disks(disks)?;
    first_algorithm_prepared(&prepared.disks, Traversal::Bfs)
}

/// Disks containing at least one corner of the axis-aligned square with
/// lower-left corner `min` and side `side`.
pub fn discard_noncorner_disks(disks: &[ColoredBall], min: (f64, f64), side: f64) -> Vec<ColoredBall> {
    let corners = [
        PointD::xy(min.0, min.1),
        PointD::xy(min.0 + side, min.1),
        PointD::xy(min.0, min.1 + side),
        PointD::xy(min.0 + side, min.1 + side),
    ];
    disks
        .iter()
        .filter(|d| corners.iter().any(|c| d.contains(c)))
        .copied()
        .collect()
}

/// Counters from one run of [`exact_colored_maxrs_with_stats`].
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct ExactStats {
    /// Grid cells, over all shifts, holding a corner in some disk.
    pub cells: usize,
    /// Cells on which the first algorithm ran.
    pub solved: usize,
    /// Largest number of distinct colors left in one cell after discarding.
    pub max_cell_colors: usize,
}

/// Side and shift resolution of the grid family of the second algorithm.
pub const EXACT_GRID_SIDE: f64 = 1.0;
pub const EXACT_GRID_DELTA: f64 = 0.25;

/// Exact colored MaxRS through the shifted-grid reduction.
pub fn exact_colored_maxrs(disks: &[ColoredBall]) -> Result<Option<ColoredPlacement>> {
    exact_colored_maxrs_with_stats(disks).map(|r| r.0)
}

pub fn exact_colored_maxrs_with_stats(disks: &[ColoredBall]) -> Result<(Option<ColoredPlacement>, ExactStats)> {
    let prepared = prepare_disks(disks)?.disks;
    let mut stats = ExactStats::default();
    if prepared.is_empty() {
        return Ok((None, stats));
    }
    let gc = GridCollection::new(2, EXACT_GRID_SIDE, EXACT_GRID_DELTA)?;
    // Per grid, (cell, disk) pairs for every disk holding a corner of the
    // cell: each grid vertex inside a disk is a corner of four cells.
    let mut pairs: Vec<Vec<(i32, i32, u32)>> = Vec::with_capacity(gc.len());
    let mut work: Vec<(usize, usize, usize, usize)> = Vec::new();
    let mut colors: Vec<u32> = Vec::new();
    for g in 0..gc.len() {
        let off = gc.offset(g);
        let mut list = Vec::new();
        for (i, d) in prepared.iter().enumerate() {
            let (cx, cy) = (d.center.x() - off.x(), d.center.y() - off.y());
            for vx in (cx - 1.0).ceil() as i32..=(cx + 1.0).floor() as i32 {
                for vy in (cy - 1.0).ceil() as i32..=(cy + 1.0).floor() as i32 {
                    let v = PointD::xy(off.x() + vx as f64, off.y() + vy as f64);
                    if d.contains(&v) {
                        for (a, b) in [(vx - 1, vy - 1), (vx - 1, vy), (vx, vy - 1), (vx, vy)] {
                            list.push((a, b, i as u32));
                        }
                    }
                }
            }
        }
        list.sort_unstable();
        list.dedup();
        let mut s = 0;
        while s < list.len() {
            let mut e = s;
            colors.clear();
            while e < list.len() && (list[e].0, list[e].1) == (list[s].0, list[s].1) {
                colors.push(prepared[list[e].2 as usize].color);
                e += 1;
            }
            colors.sort_unstable();
            colors.dedup();
            work.push((colors.len(), g, s, e));
            s = e;
        }
        pairs.push(list);
    }
    stats.cells = work.len();
    stats.max_cell_colors = work.iter().map(|w| w.0).max().unwrap_or(0);
    let key = |w: &(usize, usize, usize, usize)| {
        let (a, b, _) = pairs[w.1][w.2];
        (w.1, a, b)
    };
    work.sort_by(|x, y| y.0.cmp(&x.0).then(key(x).cmp(&key(y))));
    let mut best: Option<ColoredPlacement> = None;
    for &(ub, g, s, e) in &work {
        if ub as u32 <= best.map_or(0, |b| b.depth) {
            break;
        }
        stats.solved += 1;
        let kept: Vec<ColoredBall> = pairs[g][s..e].iter().map(|p| prepared[p.2 as usize]).collect();
        if let Some(found) = first_algorithm_prepared(&kept, Traversal::Bfs)? {
            if found.depth > best.map_or(0, |b| b.depth) {
                best = Some(found);
            }
        }
    }
    if best.is_none() {
        // every disk misses every corner of every cell it meets; impossible
        // for unit disks and unit cells, kept as a guard
        return Err(invalid("no cell produced a candidate"));
    }
    Ok((best, stats))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracles::{brute_colored_depth, brute_colored_maxrs_disks, make_planted_colored};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn disk(id: u64, x: f64, y: f64, color: u32) -> ColoredBall {
        ColoredBall::new(id, PointD::xy(x, y), color).unwrap()
    }

    fn random_disks(rng: &mut ChaCha8Rng, n: usize, colors: u32, side: f64) -> Vec<ColoredBall> {
        (0..n)
            .map(|i| disk(i as u64, rng.random_range(0.0..side), rng.random_range(0.0..side), rng.random_range(1..=colors)))
            .collect()
    }

    fn decompose(disks: &[ColoredBall]) -> Decomposition {
        let p = prepare_disks(disks).unwrap().disks;
        let arcs = boundary_arcs(&p);
        let x = arc_intersections(&p, &arcs);
        vertical_decomposition(&arcs, &x, BBox::around(&p).unwrap()).unwrap()
    }

    #[test]
    fn small_examples() {
        let one = max_depth_first_algorithm(&[disk(0, 0.0, 0.0, 1)]).unwrap().unwrap();
        assert_eq!(one.depth, 1);
        assert!(one.point.dist(&PointD::xy(0.0, 0.0)) <= 1.0);
        let two = [disk(0, 0.0, 0.0, 1), disk(1, 1.0, 0.0, 2)];
        assert_eq!(max_depth_first_algorithm(&two).unwrap().unwrap().depth, 2);
        let same = [disk(0, 0.0, 0.0, 1), disk(1, 1.0, 0.0, 1)];
        assert_eq!(max_depth_first_algorithm(&same).unwrap().unwrap().depth, 1);
        let far = [disk(0, 0.0, 0.0, 1), disk(1, 5.0, 0.0, 2)];
        assert_eq!(max_depth_first_algorithm(&far).unwrap().unwrap().depth, 1);
        assert!(max_depth_first_algorithm(&[]).unwrap().is_none());
        assert!(exact_colored_maxrs(&[]).unwrap().is_none());
    }

    #[test]
    fn cell_depths_match_witness_counts() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        for trial in 0..15 {
            let raw = random_disks(&mut rng, 8 + 3 * trial, 4, 4.0);
            let p = prepare_disks(&raw).unwrap().disks;
            let mut dec = decompose(&raw);
            assign_depths(&mut dec, Traversal::Bfs).unwrap();
            for c in &dec.cells {
                assert!(c.x_range.0 < c.x_range.1);
                assert_eq!(c.depth.unwrap(), brute_colored_depth(&c.witness, &p), "{c:?}");
            }
        }
    }

    #[test]
    fn traversal_order_does_not_matter() {
        let mut rng = ChaCha8Rng::seed_from_u64(32);
        for _ in 0..10 {
            let raw = random_disks(&mut rng, 30, 5, 4.0);
            let mut a = decompose(&raw);
            let mut b = a.clone();
            assign_depths(&mut a, Traversal::Bfs).unwrap();
            assign_depths(&mut b, Traversal::Dfs).unwrap();
            assert_eq!(a.cells, b.cells);
        }
    }

    #[test]
    fn both_algorithms_match_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(33);
        for trial in 0..25 {
            let raw = random_disks(&mut rng, 10 + 2 * trial, 1 + (trial % 6) as u32, 3.0 + trial as f64 / 5.0);
            let want = brute_colored_maxrs_disks(&raw).unwrap().unwrap().1;
            let first = max_depth_first_algorithm(&raw).unwrap().unwrap();
            let (second, stats) = exact_colored_maxrs_with_stats(&raw).unwrap();
            let second = second.unwrap();
            assert_eq!(first.depth, want);
            assert_eq!(second.depth, want);
            assert_eq!(brute_colored_depth(&first.point, &raw), want);
            assert_eq!(brute_colored_depth(&second.point, &raw), want);
            assert!(stats.max_cell_colors <= 4 * want as usize);
            assert!(stats.solved >= 1);
        }
    }

    #[test]
    fn planted_exact() {
        for seed in 0..4 {
            let inst = make_planted_colored(2, 12, 30, 6, seed).unwrap();
            let got = exact_colored_maxrs(&inst.balls).unwrap().unwrap();
            assert_eq!(got.depth, inst.value);
        }
    }

    #[test]
    fn corner_filter() {
        let d = [disk(0, 0.5, 0.5, 1), disk(1, 2.2, 0.5, 1), disk(2, -0.7, -0.7, 2)];
        let kept = discard_noncorner_disks(&d, (0.0, 0.0), 1.0);
        assert_eq!(kept.iter().map(|k| k.id).collect::<Vec<_>>(), vec![0, 2]);
    }

    #[test]
    fn rejects_arcs_outside_box() {
        let p = prepare_disks(&[disk(0, 0.0, 0.0, 1)]).unwrap().disks;
        let arcs = boundary_arcs(&p);
        let tight = BBox {
            min: (-0.5, -2.0),
            max: (2.0, 2.0),
        };
        assert!(vertical_decomposition(&arcs, &[], tight).is_err());
    }
}
