//! Boundaries of unions of unit disks, as x-monotone circular arcs, and the
//! crossings between boundaries of different colors.
//!
//! Inputs are first put in general position by [`prepare_disks`]: duplicate
//! disks of one color are merged, centers are snapped to a `2^-30` lattice
//! and then nudged by a distinct offset below `2^-40`. After that no two
//! circles are tangent or concentric and no three meet in a point, for any
//! input that is not adversarially built at the `1e-9` scale.
//!
//! Every vertex is computed once per circle pair and shared by all arcs that
//! end or cross there, so the sweep in the exact colored solver can match
//! events by exact coordinates.

use std::f64::consts::{PI, TAU};

use rustc_hash::{FxHashMap, FxHashSet};

use crate::error::{invalid, Result};
use crate::geom::{splitmix, ColoredBall, PointD};

const SNAP: f64 = 1.0 / (1u64 << 30) as f64;
const NUDGE: f64 = 1.0 / (1u64 << 41) as f64;

/// Disks in general position, with the input index each one came from.
#[derive(Clone, Debug)]
pub struct PreparedDisks {
    pub disks: Vec<ColoredBall>,
    pub source: Vec<usize>,
}

/// Snap, deduplicate and perturb planar colored unit disks.
pub fn prepare_disks(disks: &[ColoredBall]) -> Result<PreparedDisks> {
    let mut seen: FxHashSet<(u32, i64, i64)> = FxHashSet::default();
    let mut out = PreparedDisks {
        disks: Vec::with_capacity(disks.len()),
        source: Vec::with_capacity(disks.len()),
    };
    for (i, d) in disks.iter().enumerate() {
        if d.center.dim() != 2 {
            return Err(invalid("disk algorithms need planar input"));
        }
        let sx = (d.center.x() / SNAP).round();
        let sy = (d.center.y() / SNAP).round();
        if !seen.insert((d.color, sx as i64, sy as i64)) {
            continue;
        }
        let h = splitmix(d.id ^ splitmix(i as u64));
        let ux = (h >> 11) as f64 / (1u64 << 53) as f64 * 2.0 - 1.0;
        let uy = (splitmix(h) >> 11) as f64 / (1u64 << 53) as f64 * 2.0 - 1.0;
        let center = PointD::xy(sx * SNAP + ux * NUDGE, sy * SNAP + uy * NUDGE);
        out.disks.push(ColoredBall { center, ..*d });
        out.source.push(i);
    }
    Ok(out)
}

/// Identity of a vertex of the arrangement.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum VertexId {
    /// Leftmost (`right == false`) or rightmost point of a circle.
    Extreme { circle: usize, right: bool },
    /// One of the two crossings of circles `i < j`; `plus` is the one to the
    /// left of the direction from `i` to `j`.
    Cross { i: usize, j: usize, plus: bool },
}

/// An arc endpoint.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ArcEnd {
    pub id: VertexId,
    pub point: PointD,
}

/// An x-monotone arc of the boundary of one color's union.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ArcSegment {
    /// Index of the supporting circle in the prepared disk list.
    pub circle: usize,
    pub center: PointD,
    pub color: u32,
    /// Counterclockwise angle range, `theta.0` in `[0, 2 pi)`,
    /// `theta.0 < theta.1 <= theta.0 + pi`.
    pub theta: (f64, f64),
    /// Upper half of the circle (interior of the union below the arc) or
    /// lower half (interior above).
    pub upper: bool,
    pub left: ArcEnd,
    pub right: ArcEnd,
}

impl ArcSegment {
    /// The union interior lies below this arc.
    pub fn interior_below(&self) -> bool {
        self.upper
    }

    /// Height of the arc at `x`; exact at the endpoints.
    #[inline]
    pub fn y_at(&self, x: f64) -> f64 {
        if x == self.left.point.x() {
            return self.left.point.y();
        }
        if x == self.right.point.x() {
            return self.right.point.y();
        }
        let dx = x - self.center.x();
        let h = (1.0 - dx * dx).max(0.0).sqrt();
        if self.upper {
            self.center.y() + h
        } else {
            self.center.y() - h
        }
    }

    /// Whether the point at angle `phi` of the supporting circle is on the arc.
    pub fn contains_angle(&self, phi: f64) -> bool {
        let rel = (phi - self.theta.0).rem_euclid(TAU);
        rel <= self.theta.1 - self.theta.0
    }
}

/// Crossing of two unit circles with centers `a` (index `i`) and `b`
/// (index `j`), `i < j`, in canonical form.
fn cross_points(a: &PointD, b: &PointD) -> Option<(PointD, PointD)> {
    let dx = b.x() - a.x();
    let dy = b.y() - a.y();
    let d2 = dx * dx + dy * dy;
    if d2 >= 4.0 || d2 == 0.0 {
        return None;
    }
    let d = d2.sqrt();
    let (ux, uy) = (dx / d, dy / d);
    let h = (1.0 - d2 / 4.0).sqrt();
    let (mx, my) = (a.x() + dx / 2.0, a.y() + dy / 2.0);
    Some((PointD::xy(mx - h * uy, my + h * ux), PointD::xy(mx + h * uy, my - h * ux)))
}

/// Vertex where circle `me` enters (`entering == false`: leaves) the disk
/// `other` when walking counterclockwise, i.e. at angle `alpha - beta`
/// (`alpha + beta`) with `alpha` the direction to `other`.
fn cross_vertex(disks: &[ColoredBall], me: usize, other: usize, at_plus_beta: bool) -> ArcEnd {
    let (i, j) = (me.min(other), me.max(other));
    let (pp, pm) = cross_points(&disks[i].center, &disks[j].center).expect("circles cross");
    // On circle i, alpha + beta is the plus point; on circle j it is the minus one.
    let plus = if me == i { at_plus_beta } else { !at_plus_beta };
    ArcEnd {
        id: VertexId::Cross { i, j, plus },
        point: if plus { pp } else { pm },
    }
}

fn extreme(disks: &[ColoredBall], circle: usize, right: bool) -> ArcEnd {
    let c = disks[circle].center;
    ArcEnd {
        id: VertexId::Extreme { circle, right },
        point: PointD::xy(if right { c.x() + 1.0 } else { c.x() - 1.0 }, c.y()),
    }
}

/// Angle ranges of the x-monotone pieces of the arc from `start` to `end`
/// (counterclockwise, `end - start` in `(0, 2 pi]`): the arc is cut where it
/// passes angle 0 or pi.
pub fn split_x_monotone(start: f64, end: f64) -> Vec<(f64, f64)> {
    let mut cuts = vec![start];
    let mut k = (start / PI).floor() + 1.0;
    while k * PI < end {
        cuts.push(k * PI);
        k += 1.0;
    }
    cuts.push(end);
    cuts.windows(2).filter(|w| w[1] > w[0]).map(|w| (w[0], w[1])).collect()
}

/// Covered angular interval of circle `me` by disk `other`, with the
/// vertices at its ends.
struct Cover {
    a: f64,
    b: f64,
    other: usize,
}

/// Boundary arcs of the union of same-color disks, as x-monotone pieces.
/// `circles` lists indices into `disks`; the disks must be in general
/// position (see [`prepare_disks`]).
pub fn union_boundary_of(disks: &[ColoredBall], circles: &[usize]) -> Vec<ArcSegment> {
    let mut out = Vec::new();
    let mut near: FxHashMap<(i64, i64), Vec<usize>> = FxHashMap::default();
    let key = |p: &PointD| ((p.x() / 2.0).floor() as i64, (p.y() / 2.0).floor() as i64);
    for &i in circles {
        near.entry(key(&disks[i].center)).or_default().push(i);
    }
    let mut covers: Vec<Cover> = Vec::new();
    for &i in circles {
        let c = disks[i].center;
        covers.clear();
        let (kx, ky) = key(&c);
        for bx in kx - 1..=kx + 1 {
            for by in ky - 1..=ky + 1 {
                for &j in near.get(&(bx, by)).map(|v| v.as_slice()).unwrap_or(&[]) {
                    if j == i {
                        continue;
                    }
                    let o = disks[j].center;
                    let d = c.dist(&o);
                    if d >= 2.0 || d == 0.0 {
                        continue;
                    }
                    let alpha = (o.y() - c.y()).atan2(o.x() - c.x());
                    let beta = (d / 2.0).acos();
                    let a = (alpha - beta).rem_euclid(TAU);
                    covers.push(Cover {
                        a,
                        b: a + 2.0 * beta,
                        other: j,
                    });
                }
            }
        }
        out.extend(circle_arcs(disks, i, &covers));
    }
    out
}

/// Boundary arcs of the union of `disks`, which must share one color and
/// be in general position.
pub fn union_boundary(disks: &[ColoredBall]) -> Vec<ArcSegment> {
    let idx: Vec<usize> = (0..disks.len()).collect();
    union_boundary_of(disks, &idx)
}

fn circle_arcs(disks: &[ColoredBall], i: usize, covers: &[Cover]) -> Vec<ArcSegment> {
    if covers.is_empty() {
        return pieces(disks, i, 0.0, TAU, extreme(disks, i, true), extreme(disks, i, true));
    }
    // Unroll three turns so every gap that starts in [0, 2 pi) is bounded on
    // both sides by covering intervals.
    let mut iv: Vec<(f64, f64, usize)> = Vec::with_capacity(3 * covers.len());
    for shift in [-TAU, 0.0, TAU] {
        iv.extend(covers.iter().map(|c| (c.a + shift, c.b + shift, c.other)));
    }
    iv.sort_by(|p, q| p.0.total_cmp(&q.0));
    let mut out = Vec::new();
    let mut cur = iv[0];
    for &next in &iv[1..] {
        if next.0 <= cur.1 {
            if next.1 > cur.1 {
                cur.1 = next.1;
                cur.2 = next.2;
            }
            continue;
        }
        // gap (cur.1, next.0): leaves disk cur.2, enters disk next.2
        if (0.0..TAU).contains(&cur.1) {
            let start = cross_vertex(disks, i, cur.2, true);
            let end = cross_vertex(disks, i, next.2, false);
            out.extend(pieces(disks, i, cur.1, next.0, start, end));
        }
        cur = next;
    }
    out
}

/// Split the uncovered arc `(start, end)` of circle `i` into x-monotone
/// arcs, attaching the given end vertices and extreme points at the cuts.
fn pieces(disks: &[ColoredBall], i: usize, start: f64, end: f64, v0: ArcEnd, v1: ArcEnd) -> Vec<ArcSegment> {
    let parts = split_x_monotone(start, end);
    let last = parts.len() - 1;
    let c = disks[i].center;
    parts
        .iter()
        .enumerate()
        .map(|(k, &(a, b))| {
            let from = if k == 0 { v0 } else { extreme(disks, i, angle_is_zero(a)) };
            let to = if k == last { v1 } else { extreme(disks, i, angle_is_zero(b)) };
            let mid = 0.5 * (a + b);
            let upper = mid.rem_euclid(TAU) < PI;
            // counterclockwise on the upper half runs right to left
            let (left, right) = if upper { (to, from) } else { (from, to) };
            let a0 = a.rem_euclid(TAU);
            ArcSegment {
                circle: i,
                center: c,
                color: disks[i].color,
                theta: (a0, a0 + (b - a)),
                upper,
                left,
                right,
            }
        })
        .collect()
}

fn angle_is_zero(theta: f64) -> bool {
    let r = (theta / PI).round() as i64;
    r.rem_euclid(2) == 0
}

/// A crossing between arcs of two different colors.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct IntersectionPoint {
    pub location: PointD,
    pub id: VertexId,
    /// Indices of the two arcs in the arc list.
    pub arcs: (usize, usize),
}

/// All crossings between arcs of different colors, each reported once.
pub fn arc_intersections(disks: &[ColoredBall], arcs: &[ArcSegment]) -> Vec<IntersectionPoint> {
    let mut by_circle: FxHashMap<usize, Vec<usize>> = FxHashMap::default();
    for (k, a) in arcs.iter().enumerate() {
        by_circle.entry(a.circle).or_default().push(k);
    }
    let mut circles: Vec<usize> = by_circle.keys().copied().collect();
    circles.sort_unstable();
    let mut grid: FxHashMap<(i64, i64), Vec<usize>> = FxHashMap::default();
    let key = |p: &PointD| ((p.x() / 2.0).floor() as i64, (p.y() / 2.0).floor() as i64);
    for &i in &circles {
        grid.entry(key(&disks[i].center)).or_default().push(i);
    }
    let find = |circle: usize, p: &PointD| -> Option<usize> {
        let c = disks[circle].center;
        let phi = (p.y() - c.y()).atan2(p.x() - c.x());
        by_circle[&circle].iter().copied().find(|&k| arcs[k].contains_angle(phi))
    };
    let mut out = Vec::new();
    for &i in &circles {
        let (kx, ky) = key(&disks[i].center);
        for bx in kx - 1..=kx + 1 {
            for by in ky - 1..=ky + 1 {
                let Some(list) = grid.get(&(bx, by)) else { continue };
                for &j in list {
                    if j <= i || disks[i].color == disks[j].color {
                        continue;
                    }
                    let Some((pp, pm)) = cross_points(&disks[i].center, &disks[j].center) else {
                        continue;
                    };
                    for (p, plus) in [(pp, true), (pm, false)] {
                        if let (Some(a), Some(b)) = (find(i, &p), find(j, &p)) {
                            out.push(IntersectionPoint {
                                location: p,
                                id: VertexId::Cross { i, j, plus },
                                arcs: (a, b),
                            });
                        }
                    }
                }
            }
        }
    }
    out
}

/// Union boundaries of every color of prepared disks, concatenated in
/// color order.
pub fn boundary_arcs(disks: &[ColoredBall]) -> Vec<ArcSegment> {
    let mut by_color: FxHashMap<u32, Vec<usize>> = FxHashMap::default();
    for (i, d) in disks.iter().enumerate() {
        by_color.entry(d.color).or_default().push(i);
    }
    let mut colors: Vec<u32> = by_color.keys().copied().collect();
    colors.sort_unstable();
    colors.iter().flat_map(|c| union_boundary_of(disks, &by_color[c])).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::TOL_GEOM;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn disk(id: u64, x: f64, y: f64, color: u32) -> ColoredBall {
        ColoredBall::new(id, PointD::xy(x, y), color).unwrap()
    }

    fn prepared(disks: &[ColoredBall]) -> Vec<ColoredBall> {
        prepare_disks(disks).unwrap().disks
    }

    /// Number of arcs of `color` crossed by the upward vertical ray from `p`.
    fn ray_crossings(arcs: &[ArcSegment], p: &PointD) -> usize {
        arcs.iter()
            .filter(|a| a.left.point.x() < p.x() && p.x() < a.right.point.x() && a.y_at(p.x()) > p.y())
            .count()
    }

    #[test]
    fn single_disk_has_two_halves() {
        let d = prepared(&[disk(0, 0.0, 0.0, 1)]);
        let arcs = union_boundary(&d);
        assert_eq!(arcs.len(), 2);
        assert!(arcs.iter().any(|a| a.upper) && arcs.iter().any(|a| !a.upper));
        for a in &arcs {
            assert!((a.right.point.x() - a.left.point.x() - 2.0).abs() < 1e-12);
        }
    }

    #[test]
    fn two_disks_unit_apart() {
        let d = prepared(&[disk(0, 0.0, 0.0, 1), disk(1, 1.0, 0.0, 1)]);
        let arcs = union_boundary(&d);
        assert_eq!(arcs.len(), 4);
        let s = 3f64.sqrt() / 2.0;
        for a in &arcs {
            for end in [a.left, a.right] {
                let p = end.point;
                let at_cross = (p.x() - 0.5).abs() < 1e-8 && (p.y().abs() - s).abs() < 1e-8;
                let at_extreme = matches!(end.id, VertexId::Extreme { .. });
                assert!(at_cross || at_extreme, "{p:?}");
            }
        }
    }

    #[test]
    fn covered_disk_contributes_nothing() {
        let d = prepared(&[disk(0, 0.0, 0.0, 1), disk(1, 0.0, 0.0, 1), disk(2, 0.05, 0.0, 1)]);
        assert_eq!(d.len(), 2);
        let arcs = union_boundary(&d);
        // the nudged disk at 0.05 covers everything of the other but a sliver
        // on the left, and vice versa; both stay on the boundary
        for a in &arcs {
            for o in &d {
                let mid = a.y_at(0.5 * (a.left.point.x() + a.right.point.x()));
                let p = PointD::xy(0.5 * (a.left.point.x() + a.right.point.x()), mid);
                assert!(p.dist(&o.center) >= 1.0 - TOL_GEOM);
            }
        }
        let inner = prepared(&[disk(0, 0.0, 0.0, 1), disk(1, 0.3, 0.0, 1), disk(2, -0.3, 0.0, 1), disk(3, 0.0, 0.3, 1), disk(4, 0.0, -0.3, 1)]);
        let arcs = union_boundary(&inner);
        assert!(arcs.iter().all(|a| a.circle != 0));
    }

    #[test]
    fn split_examples() {
        assert_eq!(split_x_monotone(0.0, PI), vec![(0.0, PI)]);
        let parts = split_x_monotone(TAU - PI / 4.0, TAU + PI / 4.0);
        assert_eq!(parts.len(), 2);
        assert_eq!(parts[0].1, TAU);
        assert_eq!(split_x_monotone(0.0, 1.5 * PI).len(), 2);
        assert_eq!(split_x_monotone(PI / 4.0, 1.75 * PI).len(), 2);
    }

    #[test]
    fn two_color_crossings() {
        let d = prepared(&[disk(0, 0.0, 0.0, 1), disk(1, 1.0, 0.0, 2)]);
        let arcs = boundary_arcs(&d);
        let x = arc_intersections(&d, &arcs);
        assert_eq!(x.len(), 2);
        let s = 3f64.sqrt() / 2.0;
        for p in &x {
            assert!((p.location.x() - 0.5).abs() < 1e-8 && (p.location.y().abs() - s).abs() < 1e-8);
        }
        let far = prepared(&[disk(0, 0.0, 0.0, 1), disk(1, 5.0, 0.0, 2)]);
        assert!(arc_intersections(&far, &boundary_arcs(&far)).is_empty());
    }

    #[test]
    fn boundary_parity_and_vertex_checks() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for trial in 0..20 {
            let n = 5 + trial * 4;
            let raw: Vec<ColoredBall> = (0..n)
                .map(|i| disk(i as u64, rng.random_range(0.0..4.0), rng.random_range(0.0..4.0), 1))
                .collect();
            let d = prepared(&raw);
            let arcs = union_boundary(&d);
            for a in &arcs {
                assert!(a.left.point.x() < a.right.point.x());
                for end in [a.left, a.right] {
                    assert!((end.point.dist(&a.center) - 1.0).abs() < TOL_GEOM);
                    if let VertexId::Cross { i, j, .. } = end.id {
                        assert!((end.point.dist(&d[i].center) - 1.0).abs() < TOL_GEOM);
                        assert!((end.point.dist(&d[j].center) - 1.0).abs() < TOL_GEOM);
                    }
                    for o in &d {
                        assert!(end.point.dist(&o.center) >= 1.0 - TOL_GEOM);
                    }
                }
            }
            for _ in 0..1000 {
                let p = PointD::xy(rng.random_range(-1.5..5.5), rng.random_range(-1.5..5.5));
                let inside = d.iter().any(|o| o.center.dist(&p) < 1.0);
                assert_eq!(inside, ray_crossings(&arcs, &p) % 2 == 1, "{p:?}");
            }
        }
    }

    #[test]
    fn crossing_count_bound() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for _ in 0..20 {
            let raw: Vec<ColoredBall> = (0..60)
                .map(|i| disk(i, rng.random_range(0.0..6.0), rng.random_range(0.0..6.0), 1 + (i % 2) as u32))
                .collect();
            let d = prepared(&raw);
            let arcs = boundary_arcs(&d);
            let x = arc_intersections(&d, &arcs);
            assert!(x.len() <= 6 * 60, "{}", x.len());
            for p in &x {
                let (a, b) = p.arcs;
                assert_ne!(arcs[a].color, arcs[b].color);
                assert!((p.location.dist(&arcs[a].center) - 1.0).abs() < TOL_GEOM);
                assert!((p.location.dist(&arcs[b].center) - 1.0).abs() < TOL_GEOM);
            }
        }
    }

    #[test]
    fn preparation_moves_centers_only_slightly() {
        let raw = vec![disk(0, 0.1, 0.2, 1), disk(1, 0.1, 0.2, 2), disk(2, 0.1, 0.2, 1)];
        let p = prepare_disks(&raw).unwrap();
        assert_eq!(p.disks.len(), 2);
        assert_eq!(p.source, vec![0, 1]);
        assert_ne!(p.disks[0].center, p.disks[1].center);
        for (d, s) in p.disks.iter().zip(&p.source) {
            assert!(d.center.dist(&raw[*s].center) < 1e-9);
        }
        assert!(prepare_disks(&[ColoredBall::new(0, PointD::new(&[0.0]).unwrap(), 1).unwrap()]).is_err());
    }
}
