//! (1 - eps)-approximate colored MaxRS for unit disks by sampling colors.
//!
//! A rough estimate from the sampling solver decides the branch: small
//! optima are solved exactly; otherwise each color is kept with probability
//! lambda and the exact solver runs on the kept disks. The returned point's
//! depth is always recounted against the full input.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::colored_exact::exact_colored_maxrs;
use crate::colored_sample::{colored_solve, ColoredPlacement};
use crate::error::{invalid, Result};
use crate::geom::{mix_seed, ColoredBall};
use crate::oracles::brute_colored_depth;
use crate::sampling::DEFAULT_C_SAMPLE;

pub const DEFAULT_C1: f64 = 8.0;
/// Accuracy used for the opt estimate.
pub const ESTIMATE_EPS: f64 = 0.25;

/// Branch parameters of one run.
#[derive(Clone, Debug, PartialEq)]
pub struct ColorSamplePlan {
    /// Colored depth found by the sampling solver at eps = 1/4.
    pub opt_estimate: u32,
    /// `c1 * ln(n) / eps^2`.
    pub tau: f64,
    /// `min(1, c1 * ln(n) / (eps^2 * opt_estimate))`.
    pub lambda: f64,
    pub c1: f64,
    /// True when `opt_estimate <= tau` and the exact solver ran on everything.
    pub exact_branch: bool,
    /// Kept colors, ascending; every color on the exact branch.
    pub sampled_colors: Vec<u32>,
    /// Number of kept disks.
    pub sampled_disks: usize,
}

/// Output of [`approx_colored_maxrs`].
#[derive(Clone, Debug, PartialEq)]
pub struct ApproxColored {
    pub placement: ColoredPlacement,
    pub plan: ColorSamplePlan,
}

fn log_n(n: usize) -> f64 {
    (n.max(2) as f64).ln()
}

/// Estimate opt, choose the branch and, off the exact branch, draw the
/// kept colors. `None` on empty input.
pub fn plan_color_sample(disks: &[ColoredBall], eps: f64, c1: f64, seed: u64) -> Result<Option<ColorSamplePlan>> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(invalid("eps must lie in (0, 1)"));
    }
    if !(c1 > 0.0 && c1.is_finite()) {
        return Err(invalid("c1 must be positive"));
    }
    if disks.is_empty() {
        return Ok(None);
    }
    let n = disks.len();
    let estimate = colored_solve(disks, 2, ESTIMATE_EPS, DEFAULT_C_SAMPLE, mix_seed([seed, 1]))?
        .map_or(0, |p| p.depth);
    let tau = c1 * log_n(n) / (eps * eps);
    let mut colors: Vec<u32> = disks.iter().map(|d| d.color).collect();
    colors.sort_unstable();
    colors.dedup();
    let exact_branch = estimate as f64 <= tau;
    let lambda = if exact_branch { 1.0 } else { (tau / estimate as f64).min(1.0) };
    if !exact_branch {
        let mut rng = ChaCha8Rng::seed_from_u64(mix_seed([seed, 2]));
        colors.retain(|_| rng.random::<f64>() < lambda);
    }
    let sampled_disks = disks.iter().filter(|d| colors.binary_search(&d.color).is_ok()).count();
    Ok(Some(ColorSamplePlan {
        opt_estimate: estimate,
        tau,
        lambda,
        c1,
        exact_branch,
        sampled_colors: colors,
        sampled_disks,
    }))
}

/// Run the color-sampling algorithm. `None` on empty input.
pub fn approx_colored_maxrs(disks: &[ColoredBall], eps: f64, c1: f64, seed: u64) -> Result<Option<ApproxColored>> {
    let Some(plan) = plan_color_sample(disks, eps, c1, seed)? else {
        return Ok(None);
    };
    if plan.exact_branch {
        let placement = exact_colored_maxrs(disks)?.expect("nonempty input");
        return Ok(Some(ApproxColored { placement, plan }));
    }
    let kept: Vec<ColoredBall> = disks
        .iter()
        .filter(|d| plan.sampled_colors.binary_search(&d.color).is_ok())
        .copied()
        .collect();
    let point = match exact_colored_maxrs(&kept)? {
        Some(p) => p.point,
        // nothing sampled: any disk center has depth >= 1
        None => disks[0].center,
    };
    let placement = ColoredPlacement {
        point,
        depth: brute_colored_depth(&point, disks),
    };
    Ok(Some(ApproxColored { placement, plan }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::PointD;
    use crate::oracles::make_planted_colored;

    #[test]
    fn small_inputs_take_the_exact_branch() {
        let disks: Vec<ColoredBall> = (0..12)
            .map(|i| ColoredBall::new(i, PointD::xy(0.3 * i as f64, 0.1 * (i % 3) as f64), 1 + (i % 4) as u32).unwrap())
            .collect();
        let got = approx_colored_maxrs(&disks, 0.3, DEFAULT_C1, 5).unwrap().unwrap();
        assert!(got.plan.exact_branch);
        assert_eq!(got.plan.lambda, 1.0);
        assert_eq!(got.plan.sampled_disks, disks.len());
        assert_eq!(got.placement, exact_colored_maxrs(&disks).unwrap().unwrap());
        assert!(approx_colored_maxrs(&[], 0.3, 8.0, 0).unwrap().is_none());
        assert!(approx_colored_maxrs(&disks, 1.0, 8.0, 0).is_err());
    }

    #[test]
    fn sampling_branch_reports_true_depth() {
        let inst = make_planted_colored(2, 200, 800, 200, 3).unwrap();
        let got = approx_colored_maxrs(&inst.balls, 0.3, 1.0, 3).unwrap().unwrap();
        let plan = &got.plan;
        assert!(!plan.exact_branch, "{plan:?}");
        assert!(plan.lambda > 0.0 && plan.lambda < 1.0);
        assert!(plan.opt_estimate as f64 >= inst.value as f64 / 4.0 && plan.opt_estimate <= inst.value);
        assert_eq!(got.placement.depth, brute_colored_depth(&got.placement.point, &inst.balls));
        assert!(got.placement.depth as f64 >= 0.7 * inst.value as f64, "{}", got.placement.depth);
    }

    #[test]
    fn sampled_size_tracks_lambda_n() {
        let inst = make_planted_colored(2, 200, 800, 200, 9).unwrap();
        let n = inst.balls.len() as f64;
        let (mut sizes, mut expected) = (0.0, 0.0);
        for seed in 0..100 {
            let plan = plan_color_sample(&inst.balls, 0.3, 1.0, seed).unwrap().unwrap();
            assert!(!plan.exact_branch);
            sizes += plan.sampled_disks as f64;
            expected += plan.lambda * n;
        }
        let ratio = sizes / expected;
        assert!((0.5..=2.0).contains(&ratio), "{ratio}");
    }
}
