//! Piecewise stability index functions alpha: R -> (0, 2).
//!
//! A function is described by a finite, strictly increasing list of
//! breakpoints and one continuous branch per resulting interval. The value
//! at a breakpoint comes from the branch on its left, matching the
//! left-closed split used for the glued operator.

use crate::error::{LevyError, Result};
use serde::{Deserialize, Serialize};

/// One continuous branch of a piecewise stability index.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Branch {
    Const { value: f64 },
    /// Linear between the branch interval's endpoints; only valid on
    /// bounded intervals.
    Linear { left_value: f64, right_value: f64 },
}

impl Branch {
    fn bounds(&self) -> (f64, f64) {
        match *self {
            Branch::Const { value } => (value, value),
            Branch::Linear {
                left_value,
                right_value,
            } => (left_value.min(right_value), left_value.max(right_value)),
        }
    }
}

/// Measurable alpha with an explicit finite discontinuity set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StabilityIndexFn {
    /// Strictly increasing breakpoints; may be empty.
    pub breakpoints: Vec<f64>,
    /// One branch per interval, `breakpoints.len() + 1` entries, covering
    /// (-inf, d_1], (d_1, d_2], ..., (d_K, inf).
    pub branches: Vec<Branch>,
}

impl StabilityIndexFn {
    pub fn new(breakpoints: Vec<f64>, branches: Vec<Branch>) -> Result<Self> {
        let f = StabilityIndexFn {
            breakpoints,
            branches,
        };
        f.validate()?;
        Ok(f)
    }

    pub fn constant(value: f64) -> Result<Self> {
        StabilityIndexFn::new(vec![], vec![Branch::Const { value }])
    }

    /// Step function jumping at `threshold` from `left` to `right`.
    pub fn step(threshold: f64, left: f64, right: f64) -> Result<Self> {
        StabilityIndexFn::new(
            vec![threshold],
            vec![Branch::Const { value: left }, Branch::Const { value: right }],
        )
    }

    /// Step function with the given breakpoints and K+1 constant values.
    pub fn steps(breakpoints: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        let branches = values
            .into_iter()
            .map(|value| Branch::Const { value })
            .collect();
        StabilityIndexFn::new(breakpoints, branches)
    }

    pub fn validate(&self) -> Result<()> {
        if self.branches.len() != self.breakpoints.len() + 1 {
            return Err(LevyError::InvalidStabilityIndex(format!(
                "{} breakpoints require {} branches, got {}",
                self.breakpoints.len(),
                self.breakpoints.len() + 1,
                self.branches.len()
            )));
        }
        for w in self.breakpoints.windows(2) {
            if !(w[1] > w[0]) {
                return Err(LevyError::InvalidStabilityIndex(
                    "breakpoints must be strictly increasing (duplicates not allowed)".into(),
                ));
            }
        }
        for (i, b) in self.branches.iter().enumerate() {
            let unbounded = i == 0 || i == self.branches.len() - 1;
            if unbounded && matches!(b, Branch::Linear { .. }) && !self.breakpoints.is_empty() {
                return Err(LevyError::InvalidStabilityIndex(
                    "linear branches are only valid on bounded intervals".into(),
                ));
            }
            if self.breakpoints.is_empty() && matches!(b, Branch::Linear { .. }) {
                return Err(LevyError::InvalidStabilityIndex(
                    "a single branch on all of R must be constant".into(),
                ));
            }
        }
        let (lo, hi) = self.range();
        if !(lo > 0.0 && hi < 2.0) {
            return Err(LevyError::InvalidStabilityIndex(format!(
                "stability index range [{lo}, {hi}] violates 0 < inf alpha <= sup alpha < 2 (S2)"
            )));
        }
        Ok(())
    }

    /// Index of the branch containing x (value at a breakpoint from the left).
    fn branch_index(&self, x: f64) -> usize {
        // first breakpoint >= x bounds the interval (d_{i-1}, d_i]
        self.breakpoints.partition_point(|&d| d < x)
    }

    pub fn eval(&self, x: f64) -> f64 {
        let i = self.branch_index(x);
        match self.branches[i] {
            Branch::Const { value } => value,
            Branch::Linear {
                left_value,
                right_value,
            } => {
                let a = self.breakpoints[i - 1];
                let b = self.breakpoints[i];
                let t = (x - a) / (b - a);
                left_value + t * (right_value - left_value)
            }
        }
    }

    /// (inf alpha, sup alpha) over all of R.
    pub fn range(&self) -> (f64, f64) {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for b in &self.branches {
            let (a, c) = b.bounds();
            lo = lo.min(a);
            hi = hi.max(c);
        }
        (lo, hi)
    }

    /// The discontinuity set D: breakpoints where left and right limits differ.
    pub fn discontinuities(&self) -> Vec<f64> {
        let mut d = Vec::new();
        for (i, &bp) in self.breakpoints.iter().enumerate() {
            let left = self.eval(bp);
            let right = match self.branches[i + 1] {
                Branch::Const { value } => value,
                Branch::Linear { left_value, .. } => left_value,
            };
            if (left - right).abs() > 0.0 {
                d.push(bp);
            }
        }
        d
    }

    /// Points where the function is not smooth (all breakpoints), used to
    /// split quadrature panels.
    pub fn kinks(&self) -> &[f64] {
        &self.breakpoints
    }
}
