//! Shared geometric primitives: points, unit balls, families of shifted
//! uniform grids, uniform sampling on spheres and the spherical-cap measure
//! formulas behind the half-approximation analysis.

use std::fmt;
use std::ops::Index;

use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{invalid, MaxRsError, Result};

/// Largest supported ambient dimension.
pub const MAX_DIM: usize = 8;

/// Tolerance for point-on-surface assertions.
pub const TOL_GEOM: f64 = 1e-9;

/// A location in `d`-dimensional space, `1 <= d <= MAX_DIM`.
#[derive(Clone, Copy, PartialEq)]
pub struct PointD {
    dim: u8,
    coords: [f64; MAX_DIM],
}

impl PointD {
    pub fn new(coords: &[f64]) -> Result<Self> {
        let dim = coords.len();
        check_dim(dim)?;
        if coords.iter().any(|c| !c.is_finite()) {
            return Err(invalid("point coordinates must be finite"));
        }
        let mut arr = [0.0; MAX_DIM];
        arr[..dim].copy_from_slice(coords);
        Ok(Self {
            dim: dim as u8,
            coords: arr,
        })
    }

    /// Two-dimensional shorthand; panics on non-finite input.
    pub fn xy(x: f64, y: f64) -> Self {
        Self::new(&[x, y]).expect("finite planar point")
    }

    pub fn origin(dim: usize) -> Self {
        assert!((1..=MAX_DIM).contains(&dim), "dimension out of range");
        Self {
            dim: dim as u8,
            coords: [0.0; MAX_DIM],
        }
    }

    pub(crate) fn from_array(dim: usize, coords: [f64; MAX_DIM]) -> Self {
        Self {
            dim: dim as u8,
            coords,
        }
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim as usize
    }

    #[inline]
    pub fn coords(&self) -> &[f64] {
        &self.coords[..self.dim as usize]
    }

    #[inline]
    pub fn x(&self) -> f64 {
        self.coords[0]
    }

    #[inline]
    pub fn y(&self) -> f64 {
        self.coords[1]
    }

    #[inline]
    pub fn dist2(&self, other: &PointD) -> f64 {
        debug_assert_eq!(self.dim, other.dim);
        let mut acc = 0.0;
        for i in 0..self.dim as usize {
            let t = self.coords[i] - other.coords[i];
            acc += t * t;
        }
        acc
    }

    #[inline]
    pub fn dist(&self, other: &PointD) -> f64 {
        self.dist2(other).sqrt()
    }

    /// Translate by `delta` along every axis listed in `offset`.
    pub fn translated(&self, offset: &[f64]) -> PointD {
        let mut out = *self;
        for (c, o) in out.coords.iter_mut().zip(offset) {
            *c += o;
        }
        out
    }
}

impl Index<usize> for PointD {
    type Output = f64;

    fn index(&self, i: usize) -> &f64 {
        assert!(i < self.dim as usize, "coordinate index out of range");
        &self.coords[i]
    }
}

impl fmt::Debug for PointD {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_tuple("PointD").field(&self.coords()).finish()
    }
}

pub(crate) fn check_dim(dim: usize) -> Result<()> {
    if (1..=MAX_DIM).contains(&dim) {
        Ok(())
    } else {
        Err(invalid(format!("dimension {dim} outside 1..={MAX_DIM}")))
    }
}

/// A closed unit ball with a nonnegative weight.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WeightedBall {
    pub id: u64,
    pub center: PointD,
    pub weight: f64,
}

impl WeightedBall {
    pub const RADIUS: f64 = 1.0;

    pub fn new(id: u64, center: PointD, weight: f64) -> Result<Self> {
        if !(weight.is_finite() && weight >= 0.0) {
            return Err(invalid(format!("ball weight must be finite and >= 0, got {weight}")));
        }
        Ok(Self { id, center, weight })
    }

    /// Closed containment: boundary points count as inside.
    #[inline]
    pub fn contains(&self, p: &PointD) -> bool {
        self.center.dist2(p) <= 1.0
    }
}

/// A closed unit ball carrying a color in `1..=m`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ColoredBall {
    pub id: u64,
    pub center: PointD,
    pub color: u32,
}

impl ColoredBall {
    pub fn new(id: u64, center: PointD, color: u32) -> Result<Self> {
        if color == 0 {
            return Err(invalid("colors start at 1"));
        }
        Ok(Self { id, center, color })
    }

    #[inline]
    pub fn contains(&self, p: &PointD) -> bool {
        self.center.dist2(p) <= 1.0
    }
}

/// Colored unit disks are colored balls in the plane.
pub type ColoredDisk = ColoredBall;

/// Address of one cell of one grid in a [`GridCollection`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CellKey {
    pub grid: u32,
    pub lattice: [i32; MAX_DIM],
}

/// The family of uniform grids `G_s(step * z)` for `z` in `{0..r-1}^d`.
///
/// Every point of space is within distance `delta` of the center of its cell
/// in at least one member grid.
#[derive(Clone, Debug, PartialEq)]
pub struct GridCollection {
    dim: usize,
    side: f64,
    step: f64,
    shifts: u32,
    count: usize,
}

/// Build the shifted grid family for cell side `side` and nearness `delta`.
pub fn make_grid_collection(dim: usize, side: f64, delta: f64) -> Result<GridCollection> {
    GridCollection::new(dim, side, delta)
}

impl GridCollection {
    pub fn new(dim: usize, side: f64, delta: f64) -> Result<Self> {
        check_dim(dim)?;
        if !(side.is_finite() && delta.is_finite() && delta > 0.0 && side > 0.0) {
            return Err(invalid("grid side and delta must be positive and finite"));
        }
        if delta > side {
            return Err(invalid(format!("delta {delta} exceeds cell side {side}")));
        }
        let ratio = side * (dim as f64).sqrt() / delta;
        // s*sqrt(d)/delta is usually meant to be an integer; absorb float noise
        // before rounding up.
        let nearest = ratio.round();
        let shifts = if (ratio - nearest).abs() <= 1e-9 * ratio.max(1.0) {
            nearest
        } else {
            ratio.ceil()
        };
        if shifts < 1.0 || shifts > u32::MAX as f64 {
            return Err(invalid("shift count out of range"));
        }
        let shifts = shifts as u32;
        let count = (shifts as u128).pow(dim as u32);
        if count > u32::MAX as u128 {
            return Err(invalid(format!("{count} grids is more than this build can address")));
        }
        Ok(Self {
            dim,
            side,
            step: side / shifts as f64,
            shifts,
            count: count as usize,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn side(&self) -> f64 {
        self.side
    }

    /// Offset increment between consecutive shifts along one axis.
    pub fn step(&self) -> f64 {
        self.step
    }

    pub fn shifts_per_axis(&self) -> u32 {
        self.shifts
    }

    /// Number of grids, `shifts_per_axis^d`.
    pub fn len(&self) -> usize {
        self.count
    }

    pub fn is_empty(&self) -> bool {
        self.count == 0
    }

    /// Radius of the sphere through the corners of a cell.
    pub fn circumradius(&self) -> f64 {
        self.side * (self.dim as f64).sqrt() / 2.0
    }

    /// Offset vector `c` of grid `grid`.
    pub fn offset(&self, grid: usize) -> PointD {
        PointD::from_array(self.dim, self.offset_array(grid))
    }

    #[inline]
    pub(crate) fn offset_array(&self, grid: usize) -> [f64; MAX_DIM] {
        debug_assert!(grid < self.count);
        let mut out = [0.0; MAX_DIM];
        let r = self.shifts as usize;
        let mut g = grid;
        for o in out.iter_mut().take(self.dim) {
            *o = (g % r) as f64 * self.step;
            g /= r;
        }
        out
    }

    /// The cell of grid `grid` containing `p` (half-open per axis) and its center.
    pub fn cell_of(&self, grid: usize, p: &PointD) -> (CellKey, PointD) {
        assert_eq!(p.dim(), self.dim, "point dimension");
        let off = self.offset_array(grid);
        let mut key = CellKey {
            grid: grid as u32,
            lattice: [0; MAX_DIM],
        };
        for i in 0..self.dim {
            key.lattice[i] = ((p.coords[i] - off[i]) / self.side).floor() as i32;
        }
        (key, self.center_with_offset(&key, &off))
    }

    pub fn cell_center(&self, key: &CellKey) -> PointD {
        let off = self.offset_array(key.grid as usize);
        self.center_with_offset(key, &off)
    }

    #[inline]
    pub(crate) fn center_with_offset(&self, key: &CellKey, off: &[f64; MAX_DIM]) -> PointD {
        let mut c = [0.0; MAX_DIM];
        for i in 0..self.dim {
            c[i] = off[i] + (key.lattice[i] as f64 + 0.5) * self.side;
        }
        PointD::from_array(self.dim, c)
    }

    /// Squared distance from `p` to the closed box of cell `key`.
    pub fn box_dist2(&self, key: &CellKey, p: &PointD) -> f64 {
        let off = self.offset_array(key.grid as usize);
        self.box_dist2_with_offset(key, &off, p)
    }

    #[inline]
    pub(crate) fn box_dist2_with_offset(&self, key: &CellKey, off: &[f64; MAX_DIM], p: &PointD) -> f64 {
        let mut acc = 0.0;
        for i in 0..self.dim {
            let lo = off[i] + key.lattice[i] as f64 * self.side;
            let hi = lo + self.side;
            let x = p.coords[i];
            let t = if x < lo {
                lo - x
            } else if x > hi {
                x - hi
            } else {
                0.0
            };
            acc += t * t;
        }
        acc
    }

    /// Cells of grid `grid` whose closed box is within distance 1 of `center`.
    pub fn cells_intersecting_ball(&self, grid: usize, center: &PointD) -> Vec<CellKey> {
        let mut out = Vec::new();
        let off = self.offset_array(grid);
        let (lo, hi) = self.lattice_span(&off, center, 1.0);
        for_each_lattice(self.dim, &lo, &hi, |lattice| {
            let key = CellKey {
                grid: grid as u32,
                lattice: *lattice,
            };
            if self.box_dist2_with_offset(&key, &off, center) <= 1.0 {
                out.push(key);
            }
        });
        out
    }

    /// Lattice bounds of all cells whose closed box reaches within `radius`
    /// of `center` along every axis.
    #[inline]
    pub(crate) fn lattice_span(
        &self,
        off: &[f64; MAX_DIM],
        center: &PointD,
        radius: f64,
    ) -> ([i32; MAX_DIM], [i32; MAX_DIM]) {
        let mut lo = [0; MAX_DIM];
        let mut hi = [0; MAX_DIM];
        for i in 0..self.dim {
            let a = (center.coords[i] - radius - off[i]) / self.side;
            let b = (center.coords[i] + radius - off[i]) / self.side;
            lo[i] = (a - 1.0).ceil() as i32;
            hi[i] = b.floor() as i32;
        }
        (lo, hi)
    }

    /// Lattice bounds of cells whose center can be within `radius` of `p`.
    #[inline]
    pub(crate) fn center_span(
        &self,
        off: &[f64; MAX_DIM],
        p: &PointD,
        radius: f64,
    ) -> ([i32; MAX_DIM], [i32; MAX_DIM]) {
        let mut lo = [0; MAX_DIM];
        let mut hi = [0; MAX_DIM];
        for i in 0..self.dim {
            let a = (p.coords[i] - radius - off[i]) / self.side - 0.5;
            let b = (p.coords[i] + radius - off[i]) / self.side - 0.5;
            lo[i] = a.ceil() as i32;
            hi[i] = b.floor() as i32;
        }
        (lo, hi)
    }

    /// Grid index and cell center distance of the member grid whose cell
    /// center is closest to `p`.
    pub fn nearest_center(&self, p: &PointD) -> (usize, f64) {
        let mut best = (0, f64::INFINITY);
        for g in 0..self.count {
            let (_, c) = self.cell_of(g, p);
            let dist = c.dist(p);
            if dist < best.1 {
                best = (g, dist);
            }
        }
        best
    }
}

/// Visit every lattice point of the box `lo..=hi` (first `dim` axes) in
/// lexicographic order.
pub(crate) fn for_each_lattice(
    dim: usize,
    lo: &[i32; MAX_DIM],
    hi: &[i32; MAX_DIM],
    mut f: impl FnMut(&[i32; MAX_DIM]),
) {
    if (0..dim).any(|i| lo[i] > hi[i]) {
        return;
    }
    let mut cur = *lo;
    loop {
        f(&cur);
        // odometer with the last axis fastest so the visit order is lexicographic
        let mut axis = dim;
        loop {
            if axis == 0 {
                return;
            }
            axis -= 1;
            if cur[axis] < hi[axis] {
                cur[axis] += 1;
                break;
            }
            cur[axis] = lo[axis];
        }
    }
}

/// Draw `t` points independently and uniformly from the sphere of the given
/// radius around `center`, by normalizing vectors of independent Gaussians.
pub fn sample_on_sphere<R: Rng + ?Sized>(
    center: &PointD,
    radius: f64,
    t: usize,
    rng: &mut R,
) -> Result<Vec<PointD>> {
    if !(radius.is_finite() && radius > 0.0) {
        return Err(invalid("sphere radius must be positive"));
    }
    if t == 0 {
        return Err(invalid("sample count must be at least 1"));
    }
    let mut out = Vec::with_capacity(t);
    for _ in 0..t {
        out.push(sphere_point(center, radius, rng)?);
    }
    Ok(out)
}

#[inline]
pub(crate) fn sphere_point<R: Rng + ?Sized>(center: &PointD, radius: f64, rng: &mut R) -> Result<PointD> {
    let dim = center.dim();
    for _ in 0..64 {
        let mut g = [0.0; MAX_DIM];
        let mut norm2 = 0.0;
        for gi in g.iter_mut().take(dim) {
            let v: f64 = rng.sample(StandardNormal);
            *gi = v;
            norm2 += v * v;
        }
        if norm2 > 1e-200 {
            let scale = radius / norm2.sqrt();
            let mut c = center.coords;
            for i in 0..dim {
                c[i] += g[i] * scale;
            }
            return Ok(PointD::from_array(dim, c));
        }
    }
    Err(MaxRsError::Precondition("random source produced only zero vectors".into()))
}

/// Fraction of the circle of radius `eps` (centered at the origin) covered by
/// a unit disk whose boundary passes at distance `eps^2` from the origin.
pub fn cap_fraction_2d(eps: f64) -> Result<f64> {
    if !(eps > 0.0 && eps < 0.5) {
        return Err(invalid(format!("eps must lie in (0, 1/2), got {eps}")));
    }
    let arg = (3.0 * eps + eps.powi(3)) / (2.0 + 2.0 * eps * eps);
    Ok(arg.acos() / std::f64::consts::PI)
}

/// Height of the cutting plane `x_d = b` where the unit sphere centered at
/// `(0,..,0,1+eps^2)` meets the sphere of radius `eps` at the origin.
pub fn cap_plane_height(eps: f64) -> f64 {
    (3.0 * eps * eps + eps.powi(4)) / (2.0 + 2.0 * eps * eps)
}

/// `G_k(x) = integral_0^x (1 - t^2)^((k-1)/2) dt`.
pub fn cap_integral(k: usize, x: f64) -> f64 {
    let expo = (k as f64 - 1.0) / 2.0;
    if k == 1 {
        return x;
    }
    adaptive_simpson(&|t: f64| (1.0 - t * t).max(0.0).powf(expo), 0.0, x, 1e-10)
}

/// Lower bound on the covered cap fraction in dimension `d >= 3`:
/// `1/2 - G_{d-2}(q) / (2 G_{d-2}(1))` with `q = b / eps`.
pub fn cap_fraction_bound(dim: usize, eps: f64) -> Result<f64> {
    if dim < 3 {
        return Err(invalid("cap_fraction_bound needs d >= 3; use cap_fraction_2d in the plane"));
    }
    check_dim(dim)?;
    if !(eps > 0.0 && eps < 0.5) {
        return Err(invalid(format!("eps must lie in (0, 1/2), got {eps}")));
    }
    let q = cap_plane_height(eps) / eps;
    let k = dim - 2;
    Ok(0.5 - cap_integral(k, q) / (2.0 * cap_integral(k, 1.0)))
}

/// Adaptive Simpson quadrature with absolute tolerance `tol`.
pub fn adaptive_simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    fn simpson(fa: f64, fm: f64, fb: f64, a: f64, b: f64) -> f64 {
        (b - a) / 6.0 * (fa + 4.0 * fm + fb)
    }
    #[allow(clippy::too_many_arguments)]
    fn rec(
        f: &dyn Fn(f64) -> f64,
        a: f64,
        b: f64,
        fa: f64,
        fm: f64,
        fb: f64,
        whole: f64,
        tol: f64,
        depth: u32,
    ) -> f64 {
        let m = 0.5 * (a + b);
        let lm = 0.5 * (a + m);
        let rm = 0.5 * (m + b);
        let flm = f(lm);
        let frm = f(rm);
        let left = simpson(fa, flm, fm, a, m);
        let right = simpson(fm, frm, fb, m, b);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= 15.0 * tol {
            left + right + delta / 15.0
        } else {
            rec(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1)
                + rec(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1)
        }
    }
    if a == b {
        return 0.0;
    }
    let fa = f(a);
    let fb = f(b);
    let fm = f(0.5 * (a + b));
    let whole = simpson(fa, fm, fb, a, b);
    rec(f, a, b, fa, fm, fb, whole, tol, 50)
}

/// SplitMix64 finalizer, used to derive independent per-cell seeds.
#[inline]
pub(crate) fn splitmix(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    x = (x ^ (x >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    x ^ (x >> 31)
}

#[inline]
pub(crate) fn mix_seed(parts: impl IntoIterator<Item = u64>) -> u64 {
    parts
        .into_iter()
        .fold(0x6A09_E667_F3BC_C909, |acc, p| splitmix(acc ^ splitmix(p)))
}
