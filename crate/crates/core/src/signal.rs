//! Step functions, their flat parameter vector, and the distances used by
//! the estimator and the experiment harness.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// A right-continuous step function on the real line with `k` jumps inside
/// (0,1), constant outside `[0,1]`: level `i` holds on `[jump_{i-1}, jump_i)`.
///
/// Values are canonical on construction: adjacent equal levels are merged
/// (a zero-height jump is no jump), jumps are strictly increasing and
/// strictly interior, and every level is strictly below the sup-norm
/// budget `bound` in absolute value.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepFunction {
    levels: Vec<f64>,
    jumps: Vec<f64>,
    bound: f64,
}

impl StepFunction {
    /// Build from `k+1` levels, `k` strictly increasing jumps in (0,1) and
    /// a sup-norm budget. Zero-height jumps are collapsed.
    pub fn new(levels: Vec<f64>, jumps: Vec<f64>, bound: f64) -> Result<Self> {
        if levels.len() != jumps.len() + 1 {
            return Err(Error::InvalidStepFunction(format!(
                "need k+1 levels for k jumps, got {} levels and {} jumps",
                levels.len(),
                jumps.len()
            )));
        }
        if !(bound > 0.0) {
            return Err(Error::InvalidStepFunction("bound must be positive".into()));
        }
        for w in jumps.windows(2) {
            if !(w[0] < w[1]) {
                return Err(Error::InvalidStepFunction(format!(
                    "jumps must be strictly increasing, got {} then {}",
                    w[0], w[1]
                )));
            }
        }
        for &t in &jumps {
            if !(t > 0.0 && t < 1.0) {
                return Err(Error::InvalidStepFunction(format!(
                    "jumps must lie strictly inside (0,1), got {t}"
                )));
            }
        }
        for &b in &levels {
            if !b.is_finite() {
                return Err(Error::InvalidStepFunction("levels must be finite".into()));
            }
            if b.abs() >= bound {
                return Err(Error::InvalidStepFunction(format!(
                    "level {b} violates the sup-norm budget {bound}"
                )));
            }
        }
        // Canonical form: merge runs of equal adjacent levels.
        let mut c_levels = vec![levels[0]];
        let mut c_jumps = Vec::new();
        for (i, &t) in jumps.iter().enumerate() {
            let next = levels[i + 1];
            if next != *c_levels.last().unwrap() {
                c_levels.push(next);
                c_jumps.push(t);
            }
        }
        Ok(StepFunction { levels: c_levels, jumps: c_jumps, bound })
    }

    pub fn constant(level: f64, bound: f64) -> Result<Self> {
        Self::new(vec![level], vec![], bound)
    }

    /// Rebuild from the flat parameter vector
    /// (level_1, jump_1, level_2, ..., jump_k, level_{k+1}).
    pub fn from_theta(theta: &[f64], bound: f64) -> Result<Self> {
        if theta.len() % 2 == 0 {
            return Err(Error::InvalidStepFunction(format!(
                "parameter vector must have odd length 2k+1, got {}",
                theta.len()
            )));
        }
        let k = theta.len() / 2;
        let mut levels = Vec::with_capacity(k + 1);
        let mut jumps = Vec::with_capacity(k);
        for i in 0..=k {
            levels.push(theta[2 * i]);
            if i < k {
                jumps.push(theta[2 * i + 1]);
            }
        }
        Self::new(levels, jumps, bound)
    }

    /// Flatten to (level_1, jump_1, level_2, ..., jump_k, level_{k+1}).
    pub fn to_theta(&self) -> Vec<f64> {
        let mut theta = Vec::with_capacity(2 * self.jumps.len() + 1);
        for i in 0..self.levels.len() {
            theta.push(self.levels[i]);
            if i < self.jumps.len() {
                theta.push(self.jumps[i]);
            }
        }
        theta
    }

    pub fn levels(&self) -> &[f64] {
        &self.levels
    }

    /// The jump locations; together with `num_segments` this is the jump
    /// set and its (count + 1) complexity measure.
    pub fn jump_set(&self) -> &[f64] {
        &self.jumps
    }

    pub fn num_jumps(&self) -> usize {
        self.jumps.len()
    }

    /// Number of constant segments, i.e. jump count plus one. This is the
    /// complexity the penalized objective charges for.
    pub fn num_segments(&self) -> usize {
        self.jumps.len() + 1
    }

    pub fn bound(&self) -> f64 {
        self.bound
    }

    /// Smallest absolute jump height; `None` for a constant function.
    pub fn min_jump_height(&self) -> Option<f64> {
        self.levels
            .windows(2)
            .map(|w| (w[1] - w[0]).abs())
            .fold(None, |acc, h| Some(acc.map_or(h, |a: f64| a.min(h))))
    }

    /// Right-continuous evaluation: returns level `i` for
    /// x in [jump_{i-1}, jump_i).
    pub fn evaluate(&self, x: f64) -> f64 {
        // partition_point = number of jumps <= x, which is exactly the
        // segment index under right continuity.
        let idx = self.jumps.partition_point(|&t| t <= x);
        self.levels[idx]
    }

    /// Hausdorff distance between the two jump sets. If either set is
    /// empty the distance is +inf: a missing jump is maximally wrong,
    /// which keeps fit errors totally ordered when compared across
    /// different jump counts.
    pub fn hausdorff_jump_distance(&self, other: &StepFunction) -> f64 {
        hausdorff(&self.jumps, &other.jumps)
    }

    /// Exact L2 distance between two step functions over `[lo, hi]`
    /// (finite, lo < hi). Both are piecewise constant, so the integral is
    /// a finite sum; no quadrature is involved.
    pub fn l2_distance(&self, other: &StepFunction, lo: f64, hi: f64) -> f64 {
        assert!(
            lo.is_finite() && hi.is_finite() && lo < hi,
            "l2_distance requires a finite interval with lo < hi"
        );
        let mut cuts: Vec<f64> = Vec::with_capacity(self.jumps.len() + other.jumps.len() + 2);
        cuts.push(lo);
        cuts.extend(self.jumps.iter().chain(other.jumps.iter()).copied().filter(|t| *t > lo && *t < hi));
        cuts.push(hi);
        cuts.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let mut total = 0.0;
        for w in cuts.windows(2) {
            let len = w[1] - w[0];
            if len <= 0.0 {
                continue;
            }
            let mid = 0.5 * (w[0] + w[1]);
            let d = self.evaluate(mid) - other.evaluate(mid);
            total += d * d * len;
        }
        total.sqrt()
    }
}

fn directed_sup_inf(from: &[f64], to: &[f64]) -> f64 {
    from.iter()
        .map(|&a| {
            to.iter()
                .map(|&b| (a - b).abs())
                .fold(f64::INFINITY, f64::min)
        })
        .fold(0.0, f64::max)
}

fn hausdorff(a: &[f64], b: &[f64]) -> f64 {
    if a.is_empty() || b.is_empty() {
        return f64::INFINITY;
    }
    directed_sup_inf(a, b).max(directed_sup_inf(b, a))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn two_level(jump: f64) -> StepFunction {
        StepFunction::new(vec![0.0, 1.0], vec![jump], 10.0).unwrap()
    }

    #[test]
    fn evaluation_is_right_continuous() {
        let f = two_level(0.5);
        assert_eq!(f.evaluate(0.3), 0.0);
        // half-open segments: the jump point takes the right level
        assert_eq!(f.evaluate(0.5), 1.0);
        assert_eq!(f.evaluate(-3.0), 0.0);
        assert_eq!(f.evaluate(42.0), 1.0);
    }

    #[test]
    fn jump_sets_and_segment_counts() {
        let f = StepFunction::new(vec![0.0, 1.0, 0.0], vec![0.3, 0.7], 10.0).unwrap();
        assert_eq!(f.jump_set(), &[0.3, 0.7]);
        assert_eq!(f.num_segments(), 3);
        let c = StepFunction::constant(2.0, 10.0).unwrap();
        assert!(c.jump_set().is_empty());
        assert_eq!(c.num_segments(), 1);
        assert_eq!(two_level(0.5).num_segments(), 2);
    }

    #[test]
    fn zero_height_jumps_collapse() {
        let f = StepFunction::new(vec![1.0, 1.0, 2.0], vec![0.2, 0.6], 10.0).unwrap();
        assert_eq!(f.jump_set(), &[0.6]);
        assert_eq!(f.levels(), &[1.0, 2.0]);
    }

    #[test]
    fn canonicalization_is_idempotent() {
        let f = StepFunction::new(vec![0.0, 1.0, 0.5], vec![0.3, 0.8], 5.0).unwrap();
        let again =
            StepFunction::new(f.levels().to_vec(), f.jump_set().to_vec(), f.bound()).unwrap();
        assert_eq!(f, again);
    }

    #[test]
    fn construction_rejects_bad_input() {
        assert!(StepFunction::new(vec![0.0, 1.0], vec![0.0], 10.0).is_err());
        assert!(StepFunction::new(vec![0.0, 1.0], vec![1.0], 10.0).is_err());
        assert!(StepFunction::new(vec![0.0, 1.0, 2.0], vec![0.7, 0.3], 10.0).is_err());
        assert!(StepFunction::new(vec![0.0, 11.0], vec![0.5], 10.0).is_err());
        assert!(StepFunction::new(vec![0.0, 1.0], vec![], 10.0).is_err());
    }

    #[test]
    fn theta_round_trip() {
        let f = StepFunction::new(vec![0.0, 1.5, -0.5], vec![0.25, 0.75], 10.0).unwrap();
        let theta = f.to_theta();
        assert_eq!(theta, vec![0.0, 0.25, 1.5, 0.75, -0.5]);
        let back = StepFunction::from_theta(&theta, 10.0).unwrap();
        assert_eq!(f, back);
        assert!(StepFunction::from_theta(&[0.0, 0.5], 10.0).is_err());
    }

    #[test]
    fn hausdorff_examples() {
        let f = two_level(0.3);
        let g = two_level(0.4);
        assert_abs_diff_eq!(f.hausdorff_jump_distance(&g), 0.1, epsilon = 1e-15);
        let f2 = StepFunction::new(vec![0.0, 1.0, 0.0], vec![0.3, 0.7], 10.0).unwrap();
        let g2 = StepFunction::new(vec![0.0, 1.0, 0.0], vec![0.35, 0.7], 10.0).unwrap();
        assert_abs_diff_eq!(f2.hausdorff_jump_distance(&g2), 0.05, epsilon = 1e-15);
        assert_eq!(f.hausdorff_jump_distance(&f), 0.0);
        let c = StepFunction::constant(0.0, 10.0).unwrap();
        assert_eq!(f.hausdorff_jump_distance(&c), f64::INFINITY);
        assert_eq!(c.hausdorff_jump_distance(&f), f64::INFINITY);
    }

    #[test]
    fn l2_distance_examples() {
        let f = two_level(0.5);
        let zero = StepFunction::constant(0.0, 10.0).unwrap();
        assert_abs_diff_eq!(f.l2_distance(&zero, 0.0, 1.0), 0.5f64.sqrt(), epsilon = 1e-15);
        assert_eq!(f.l2_distance(&f, 0.0, 1.0), 0.0);
        // jump moved from 0.3 to 0.5: the functions differ by 1 on [0.3, 0.5)
        let a = two_level(0.3);
        let b = two_level(0.5);
        assert_abs_diff_eq!(a.l2_distance(&b, 0.0, 1.0), 0.2f64.sqrt(), epsilon = 1e-15);
    }

    #[test]
    fn l2_distance_matches_riemann_sum() {
        let f = StepFunction::new(vec![0.3, -1.0, 2.0], vec![0.21, 0.64], 10.0).unwrap();
        let g = StepFunction::new(vec![0.0, 1.2], vec![0.47], 10.0).unwrap();
        let (lo, hi) = (-0.5, 1.5);
        let m = 2_000_000;
        let h = (hi - lo) / m as f64;
        let mut acc = 0.0;
        for i in 0..m {
            let x = lo + (i as f64 + 0.5) * h;
            let d = f.evaluate(x) - g.evaluate(x);
            acc += d * d * h;
        }
        assert_abs_diff_eq!(f.l2_distance(&g, lo, hi), acc.sqrt(), epsilon = 1e-5);
    }

    proptest! {
        #[test]
        fn theta_round_trip_random(levels in prop::collection::vec(-5.0f64..5.0, 1..5)) {
            // build strictly increasing jumps to match the level count
            let k = levels.len() - 1;
            let jumps: Vec<f64> = (0..k).map(|i| (i as f64 + 1.0) / (k as f64 + 1.0)).collect();
            if let Ok(f) = StepFunction::new(levels, jumps, 6.0) {
                let g = StepFunction::from_theta(&f.to_theta(), 6.0).unwrap();
                prop_assert_eq!(f, g);
            }
        }

        #[test]
        fn evaluate_right_continuous_at_jumps(j1 in 0.05f64..0.45, j2 in 0.55f64..0.95) {
            let f = StepFunction::new(vec![0.0, 1.0, -1.0], vec![j1, j2], 10.0).unwrap();
            prop_assert_eq!(f.evaluate(j1), 1.0);
            prop_assert_eq!(f.evaluate(j2), -1.0);
        }
    }
}
