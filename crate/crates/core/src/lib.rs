//! Maximum range sum (MaxRS) for unit balls and colored unit disks.
//!
//! * [`dynamic`]: a fully dynamic (1/2 - eps)-approximation for weighted
//!   unit balls in `R^d`, and the static solver built on it.
//! * [`colored_sample`]: the (1/2 - eps)-approximation for colored balls.
//! * [`disk_union`], [`colored_exact`], [`colored_approx`]: exact and
//!   (1 - eps)-approximate colored MaxRS for unit disks in the plane.
//! * [`convolution`]: the reductions from (min,+)-convolution to batched
//!   one-dimensional MaxRS and to batched smallest k-enclosing intervals.
//! * [`oracles`]: brute-force ground truth and planted instances.

pub mod colored_approx;
pub mod colored_exact;
pub mod colored_sample;
pub mod convolution;
pub mod disk_union;
pub mod dynamic;
pub mod error;
pub mod geom;
pub mod oracles;
pub mod sampling;

pub use error::{MaxRsError, Result};
pub use geom::{
    cap_fraction_2d, cap_fraction_bound, make_grid_collection, sample_on_sphere, CellKey,
    ColoredBall, ColoredDisk, GridCollection, PointD, WeightedBall, MAX_DIM, TOL_GEOM,
};
pub use colored_approx::{approx_colored_maxrs, ApproxColored, ColorSamplePlan};
pub use colored_exact::{exact_colored_maxrs, max_depth_first_algorithm};
pub use colored_sample::{colored_solve, ColoredPlacement};
pub use dynamic::{static_solve, DynamicMaxRS, Placement};
pub use sampling::{SamplerParams, SearchStrategy};
