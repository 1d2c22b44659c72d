//! (min,+)-convolution and its reductions to geometric problems.
//!
//! Two chains are provided as executable programs:
//!
//! * masked (min,+) -> (max,+) by negation -> nonnegative (max,+) by a shift
//!   -> batched one-dimensional interval MaxRS with guard points;
//! * (min,+) -> strictly decreasing (min,+) -> batched smallest k-enclosing
//!   interval (BSEI).
//!
//! The geometric endpoints are solved directly, so running a chain and
//! comparing against [`minplus_bruteforce`] checks the reduction itself.

use crate::error::{invalid, precondition, MaxRsError, Result};

/// `C_k = min_{i+j=k} (A_i + B_j)` for `k` in `0..n`.
pub fn minplus_bruteforce(a: &[f64], b: &[f64]) -> Result<Vec<f64>> {
    check_pair(a, b)?;
    let n = a.len();
    let mut c = vec![f64::INFINITY; n];
    for (i, ai) in a.iter().enumerate() {
        for (j, bj) in b.iter().enumerate().take(n - i) {
            c[i + j] = c[i + j].min(ai + bj);
        }
    }
    Ok(c)
}

/// `C_k = max_{i+j=k} (A_i + B_j)` for `k` in `0..n`.
pub fn maxplus_bruteforce(a: &[f64], b: &[f64]) -> Result<Vec<f64>> {
    let na: Vec<f64> = a.iter().map(|v| -v).collect();
    let nb: Vec<f64> = b.iter().map(|v| -v).collect();
    Ok(minplus_bruteforce(&na, &nb)?.into_iter().map(|v| -v).collect())
}

fn check_pair(a: &[f64], b: &[f64]) -> Result<()> {
    if a.len() != b.len() {
        return Err(MaxRsError::LengthMismatch {
            left: a.len(),
            right: b.len(),
        });
    }
    if a.is_empty() {
        return Err(invalid("sequences must be nonempty"));
    }
    if a.iter().chain(b).any(|v| !v.is_finite()) {
        return Err(invalid("sequence values must be finite"));
    }
    Ok(())
}

/// Split the output indices `0..n` into `ceil(n/m)` consecutive blocks of at
/// most `m` indices.
pub fn partition_mask(n: usize, m: usize) -> Result<Vec<Vec<usize>>> {
    if m == 0 || m > n {
        return Err(invalid(format!("need 1 <= m <= n, got m = {m}, n = {n}")));
    }
    Ok((0..n.div_ceil(m))
        .map(|s| (s * m..((s + 1) * m).min(n)).collect())
        .collect())
}

/// Negate both sequences, turning a (min,+) instance into a (max,+) one.
/// The (min,+) answer is the negation of the (max,+) answer.
pub fn masked_min_to_max(d: &[f64], e: &[f64]) -> (Vec<f64>, Vec<f64>) {
    (d.iter().map(|v| -v).collect(), e.iter().map(|v| -v).collect())
}

/// Shift both sequences by their common minimum `delta` when it is negative,
/// making every entry nonnegative. Returns `delta` (0 when no shift was
/// needed); the original answer is the shifted answer plus `2 * delta`.
pub fn shift_to_positive(a: &[f64], b: &[f64]) -> (Vec<f64>, Vec<f64>, f64) {
    let delta = a.iter().chain(b).copied().fold(f64::INFINITY, f64::min);
    if delta >= 0.0 {
        return (a.to_vec(), b.to_vec(), 0.0);
    }
    (
        a.iter().map(|v| v - delta).collect(),
        b.iter().map(|v| v - delta).collect(),
        delta,
    )
}

/// Add a common constant `lift >= 0` to nonnegative sequences so that
/// `2 * min >= max`. Returns the lifted sequences and `lift`; the original
/// (max,+) answer is the lifted answer minus `2 * lift`.
///
/// Without it the batched construction can lose: an interval that swallows
/// every `A`-point together with its guard contributes 0 from `A` and can
/// still pick up a lone `B_b` larger than every `A_i + B_j` with
/// `i + j = k`. After lifting, any pair sum is at least any single entry.
pub fn lift_for_pairs(a: &[f64], b: &[f64]) -> (Vec<f64>, Vec<f64>, f64) {
    let lo = a.iter().chain(b).copied().fold(f64::INFINITY, f64::min);
    let hi = a.iter().chain(b).copied().fold(f64::NEG_INFINITY, f64::max);
    let lift = (hi - 2.0 * lo).max(0.0);
    (
        a.iter().map(|v| v + lift).collect(),
        b.iter().map(|v| v + lift).collect(),
        lift,
    )
}

/// A weighted point on the line.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WeightedPoint1D {
    pub x: f64,
    pub w: f64,
}

/// Interval MaxRS on one weighted point set for a batch of interval lengths.
#[derive(Clone, Debug, PartialEq)]
pub struct Batched1DInstance {
    pub points: Vec<WeightedPoint1D>,
    pub lengths: Vec<f64>,
}

/// Build the batched interval instance for nonnegative `A`, `B` and the
/// output indices `mask`.
///
/// `A_i` becomes a point at `x = i` with a guard of weight `-A_i` at
/// `i - 0.5`; `B_j` becomes a point at `2n - 1 - j` with a guard of weight
/// `-B_j` half a unit to its right. Output index `k` asks for length
/// `2n - 1 - k`; the closed interval `[i, 2n - 1 - j]` then weighs exactly
/// `A_i + B_j`.
pub fn build_batched_instance(a: &[f64], b: &[f64], mask: &[usize]) -> Result<Batched1DInstance> {
    check_pair(a, b)?;
    if a.iter().chain(b).any(|v| *v < 0.0) {
        return Err(precondition("batched construction needs nonnegative sequences"));
    }
    let n = a.len();
    if let Some(k) = mask.iter().find(|k| **k >= n) {
        return Err(invalid(format!("mask index {k} out of range for n = {n}")));
    }
    let x_offset = (2 * n - 1) as f64;
    let mut points = Vec::with_capacity(4 * n);
    for (i, ai) in a.iter().enumerate() {
        let x = i as f64;
        points.push(WeightedPoint1D { x, w: *ai });
        points.push(WeightedPoint1D { x: x - 0.5, w: -ai });
    }
    for (j, bj) in b.iter().enumerate() {
        let x = x_offset - j as f64;
        points.push(WeightedPoint1D { x, w: *bj });
        points.push(WeightedPoint1D { x: x + 0.5, w: -bj });
    }
    let lengths = mask.iter().map(|k| x_offset - *k as f64).collect();
    Ok(Batched1DInstance { points, lengths })
}

/// Total weight of the points in the closed interval `[lo, hi]`, by scan.
pub fn interval_weight(points: &[WeightedPoint1D], lo: f64, hi: f64) -> f64 {
    points.iter().filter(|p| lo <= p.x && p.x <= hi).map(|p| p.w).sum()
}

/// Sorted coordinates with prefix sums, for O(log n) interval weights.
struct PrefixLine {
    xs: Vec<f64>,
    prefix: Vec<f64>,
}

impl PrefixLine {
    fn new(points: &[WeightedPoint1D]) -> Self {
        let mut pts = points.to_vec();
        pts.sort_by(|p, q| p.x.total_cmp(&q.x));
        let mut prefix = Vec::with_capacity(pts.len() + 1);
        prefix.push(0.0);
        let mut acc = 0.0;
        for p in &pts {
            acc += p.w;
            prefix.push(acc);
        }
        Self {
            xs: pts.iter().map(|p| p.x).collect(),
            prefix,
        }
    }

    fn weight(&self, lo: f64, hi: f64) -> f64 {
        let a = self.xs.partition_point(|x| *x < lo);
        let b = self.xs.partition_point(|x| *x <= hi);
        if b <= a {
            0.0
        } else {
            self.prefix[b] - self.prefix[a]
        }
    }
}

/// Left endpoints of every combinatorially distinct placement of a closed
/// interval of length `len`: each breakpoint `x_p` or `x_p - len`, and one
/// point strictly between each pair of consecutive breakpoints.
fn placement_starts(xs: impl Iterator<Item = f64>, len: f64) -> Vec<f64> {
    let mut events: Vec<f64> = xs.flat_map(|x| [x, x - len]).collect();
    events.sort_by(f64::total_cmp);
    events.dedup();
    let mut out = Vec::with_capacity(2 * events.len());
    for (i, e) in events.iter().enumerate() {
        out.push(*e);
        if let Some(next) = events.get(i + 1) {
            out.push(0.5 * (e + next));
        }
    }
    out
}

/// Best total weight of a closed interval of each requested length.
///
/// The coverage of `[l, l + L]` only changes when `l` crosses some `x_p` or
/// `x_p - L`, so the breakpoints and one position inside each gap between
/// them cover every placement. An interval far from all points covers
/// nothing, so every answer is at least 0.
pub fn solve_batched_1d(inst: &Batched1DInstance) -> Vec<f64> {
    let line = PrefixLine::new(&inst.points);
    inst.lengths
        .iter()
        .map(|&len| {
            placement_starts(line.xs.iter().copied(), len)
                .into_iter()
                .map(|l| line.weight(l, l + len))
                .fold(0.0, f64::max)
        })
        .collect()
}

/// Direct-scan reference for [`solve_batched_1d`]: every interval with an
/// endpoint at an input point, every gap between such placements, and the
/// empty placement, each weighed by a full scan.
pub fn exhaustive_batched_1d(inst: &Batched1DInstance) -> Vec<f64> {
    inst.lengths
        .iter()
        .map(|&len| {
            let mut starts: Vec<f64> = inst.points.iter().flat_map(|p| [p.x, p.x - len]).collect();
            starts.sort_by(f64::total_cmp);
            let mut best: f64 = 0.0;
            for (i, s) in starts.iter().enumerate() {
                best = best.max(interval_weight(&inst.points, *s, s + len));
                if let Some(t) = starts.get(i + 1) {
                    let m = 0.5 * (s + t);
                    best = best.max(interval_weight(&inst.points, m, m + len));
                }
            }
            best
        })
        .collect()
}

/// (min,+)-convolution through the batched interval MaxRS chain, using
/// output blocks of size `m`.
pub fn minplus_via_batched(a: &[f64], b: &[f64], m: usize) -> Result<Vec<f64>> {
    check_pair(a, b)?;
    let n = a.len();
    let mut c = vec![f64::NAN; n];
    let (na, nb) = masked_min_to_max(a, b);
    let (pa, pb, delta) = shift_to_positive(&na, &nb);
    let (la, lb, lift) = lift_for_pairs(&pa, &pb);
    for mask in partition_mask(n, m)? {
        let inst = build_batched_instance(&la, &lb, &mask)?;
        let best = solve_batched_1d(&inst);
        for (k, w) in mask.iter().zip(best) {
            // undo the lift, the shift, then the negation
            c[*k] = -(w - 2.0 * lift + 2.0 * delta);
        }
    }
    Ok(c)
}

/// Make both sequences strictly decreasing by subtracting `i * delta` from
/// entry `i`, with `delta = max(1 + largest consecutive increase, 1)`.
/// The original answer is `F_k + k * delta` where `F` convolves the outputs.
pub fn make_monotone(a: &[f64], b: &[f64]) -> Result<(Vec<f64>, Vec<f64>, f64)> {
    check_pair(a, b)?;
    if a.len() == 1 {
        return Ok((a.to_vec(), b.to_vec(), 0.0));
    }
    let rise = a
        .windows(2)
        .chain(b.windows(2))
        .map(|w| w[1] - w[0])
        .fold(f64::NEG_INFINITY, f64::max);
    let delta = (1.0 + rise).max(1.0);
    let tilt = |s: &[f64]| s.iter().enumerate().map(|(i, v)| v - i as f64 * delta).collect();
    Ok((tilt(a), tilt(b), delta))
}

/// The BSEI point set for strictly decreasing `D`, `E`: `n` negative points
/// `-D_i + D_{n-1} - 1` followed by `n` positive points
/// `E_{n-1-i} + 1 - E_{n-1}`, increasing overall.
pub fn build_bsei_instance(d: &[f64], e: &[f64]) -> Result<Vec<f64>> {
    check_pair(d, e)?;
    if d.windows(2).chain(e.windows(2)).any(|w| w[1] >= w[0]) {
        return Err(precondition("BSEI construction needs strictly decreasing sequences"));
    }
    let n = d.len();
    let dl = d[n - 1];
    let el = e[n - 1];
    let mut pts: Vec<f64> = d.iter().map(|di| -di + dl - 1.0).collect();
    pts.extend((0..n).map(|i| e[n - 1 - i] + 1.0 - el));
    Ok(pts)
}

/// `G_k` for `k = 1..=len`: the shortest window of `k` consecutive sorted
/// points. Entry `k - 1` holds `G_k`.
pub fn solve_bsei(points: &[f64]) -> Vec<f64> {
    let mut pts = points.to_vec();
    pts.sort_by(f64::total_cmp);
    (1..=pts.len())
        .map(|k| {
            pts.windows(k)
                .map(|w| w[k - 1] - w[0])
                .fold(f64::INFINITY, f64::min)
        })
        .collect()
}

/// (min,+)-convolution through the BSEI chain.
pub fn minplus_via_bsei(a: &[f64], b: &[f64]) -> Result<Vec<f64>> {
    let (d, e, delta) = make_monotone(a, b)?;
    let n = d.len();
    let g = solve_bsei(&build_bsei_instance(&d, &e)?);
    Ok((0..n)
        .map(|k| {
            let f = g[2 * n - k - 1] + d[n - 1] + e[n - 1] - 2.0;
            f + k as f64 * delta
        })
        .collect())
}
