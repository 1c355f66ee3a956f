//! Symbols q(x, xi) of the operators handled by this crate.
//!
//! A `SymbolFn` bundles an evaluator with the metadata the diagnostics need:
//! a growth constant C with |q(x, xi)| <= C (1 + xi^2), and flags for
//! x-independence and real-valuedness.

use crate::approx::glue_weight_left;
use crate::error::Result;
use crate::levy::{JumpDist, JumpMeasure, LevyTriplet};
use crate::stability::StabilityIndexFn;
use num_complex::Complex64;
use std::sync::Arc;

/// State-dependent stability index in either exact or mollified form.
#[derive(Clone)]
pub enum AlphaFn {
    Piecewise(StabilityIndexFn),
    Smooth(Arc<crate::approx::MollifiedAlpha>),
}

impl std::fmt::Debug for AlphaFn {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            AlphaFn::Piecewise(p) => write!(f, "AlphaFn::Piecewise({} breakpoints)", p.breakpoints.len()),
            AlphaFn::Smooth(_) => write!(f, "AlphaFn::Smooth"),
        }
    }
}

impl AlphaFn {
    pub fn eval(&self, x: f64) -> f64 {
        match self {
            AlphaFn::Piecewise(p) => p.eval(x),
            AlphaFn::Smooth(m) => m.eval(x),
        }
    }

    pub fn range(&self) -> (f64, f64) {
        match self {
            AlphaFn::Piecewise(p) => p.range(),
            AlphaFn::Smooth(m) => m.range(),
        }
    }
}

type CustomEval = Arc<dyn Fn(f64, f64) -> Complex64 + Send + Sync>;

#[derive(Clone)]
pub enum SymbolKind {
    /// x-independent symbol of a Levy triplet.
    Levy(LevyTriplet),
    /// q(x, xi) = |xi|^{alpha(x)}.
    StableLike(AlphaFn),
    /// Left triplet on (-inf, 0], right triplet on (0, inf).
    Glued {
        left: LevyTriplet,
        right: LevyTriplet,
    },
    /// q^n(x, xi) = q1(g1^n(x) xi) + q2(g2^n(x) xi).
    GluedApprox {
        left: LevyTriplet,
        right: LevyTriplet,
        n: u32,
    },
    /// Arbitrary evaluator, for diagnostics of hand-written symbols.
    Custom(CustomEval),
}

impl std::fmt::Debug for SymbolKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            SymbolKind::Levy(t) => write!(f, "Levy({t:?})"),
            SymbolKind::StableLike(a) => write!(f, "StableLike({a:?})"),
            SymbolKind::Glued { .. } => write!(f, "Glued"),
            SymbolKind::GluedApprox { n, .. } => write!(f, "GluedApprox(n={n})"),
            SymbolKind::Custom(_) => write!(f, "Custom"),
        }
    }
}

/// Evaluator for q(x, xi) plus the metadata used by the diagnostics.
#[derive(Debug, Clone)]
pub struct SymbolFn {
    pub kind: SymbolKind,
    /// Claimed growth constant: |q(x, xi)| <= c_growth (1 + xi^2).
    pub c_growth: f64,
    pub x_independent: bool,
    pub real_valued: bool,
}

impl SymbolFn {
    pub fn from_triplet(triplet: LevyTriplet) -> Result<Self> {
        triplet.validate()?;
        let c = triplet.growth_constant();
        let real = triplet.is_symmetric();
        Ok(SymbolFn {
            kind: SymbolKind::Levy(triplet),
            c_growth: c.max(1e-12),
            x_independent: true,
            real_valued: real,
        })
    }

    /// q(x, xi) = |xi|^{alpha(x)}; C = 2 covers |xi|^a <= 1 + xi^2 for a in (0,2).
    pub fn stable_like(alpha: StabilityIndexFn) -> Result<Self> {
        alpha.validate()?;
        Ok(SymbolFn {
            kind: SymbolKind::StableLike(AlphaFn::Piecewise(alpha)),
            c_growth: 2.0,
            x_independent: false,
            real_valued: true,
        })
    }

    pub fn stable_like_smooth(alpha: Arc<crate::approx::MollifiedAlpha>) -> Self {
        SymbolFn {
            kind: SymbolKind::StableLike(AlphaFn::Smooth(alpha)),
            c_growth: 2.0,
            x_independent: false,
            real_valued: true,
        }
    }

    pub fn glued(left: LevyTriplet, right: LevyTriplet) -> Result<Self> {
        left.validate()?;
        right.validate()?;
        let c = left.growth_constant().max(right.growth_constant());
        let real = left.is_symmetric() && right.is_symmetric();
        Ok(SymbolFn {
            kind: SymbolKind::Glued { left, right },
            c_growth: c.max(1e-12),
            x_independent: false,
            real_valued: real,
        })
    }

    pub fn glued_approx(left: LevyTriplet, right: LevyTriplet, n: u32) -> Result<Self> {
        left.validate()?;
        right.validate()?;
        if n == 0 {
            return Err(crate::error::LevyError::InvalidInput(
                "glue index n must be >= 1".into(),
            ));
        }
        // |q1(g1 xi)| + |q2(g2 xi)| <= (C1 + C2)(1 + xi^2) since |g_i| <= 1.
        let c = left.growth_constant() + right.growth_constant();
        let real = left.is_symmetric() && right.is_symmetric();
        Ok(SymbolFn {
            kind: SymbolKind::GluedApprox { left, right, n },
            c_growth: c.max(1e-12),
            x_independent: false,
            real_valued: real,
        })
    }

    /// Wraps an arbitrary evaluator; the caller owns the metadata claims.
    pub fn from_fn<F>(f: F, c_growth: f64, x_independent: bool, real_valued: bool) -> Self
    where
        F: Fn(f64, f64) -> Complex64 + Send + Sync + 'static,
    {
        SymbolFn {
            kind: SymbolKind::Custom(Arc::new(f)),
            c_growth,
            x_independent,
            real_valued,
        }
    }

    pub fn eval(&self, x: f64, xi: f64) -> Complex64 {
        self.row(x).eval(xi)
    }

    /// Prepares the x-dependent part once for a sweep over xi.
    pub fn row(&self, x: f64) -> SymbolRow<'_> {
        match &self.kind {
            SymbolKind::Levy(t) => SymbolRow::Levy(t),
            SymbolKind::StableLike(a) => SymbolRow::Power(a.eval(x)),
            SymbolKind::Glued { left, right } => {
                if x <= 0.0 {
                    SymbolRow::Levy(left)
                } else {
                    SymbolRow::Levy(right)
                }
            }
            SymbolKind::GluedApprox { left, right, n } => {
                let g1 = glue_weight_left(*n, x);
                if g1 == 1.0 {
                    SymbolRow::Levy(left)
                } else if g1 == 0.0 {
                    SymbolRow::Levy(right)
                } else {
                    SymbolRow::Mixed {
                        left,
                        right,
                        g1,
                        g2: 1.0 - g1,
                    }
                }
            }
            SymbolKind::Custom(f) => SymbolRow::Custom { f, x },
        }
    }
}

/// The xi-evaluator of a symbol at fixed x.
pub enum SymbolRow<'a> {
    Levy(&'a LevyTriplet),
    Power(f64),
    Mixed {
        left: &'a LevyTriplet,
        right: &'a LevyTriplet,
        g1: f64,
        g2: f64,
    },
    Custom {
        f: &'a CustomEval,
        x: f64,
    },
}

impl SymbolRow<'_> {
    pub fn eval(&self, xi: f64) -> Complex64 {
        match self {
            SymbolRow::Levy(t) => levy_exponent(t, xi),
            SymbolRow::Power(alpha) => Complex64::new(xi.abs().powf(*alpha), 0.0),
            SymbolRow::Mixed {
                left,
                right,
                g1,
                g2,
            } => levy_exponent(left, g1 * xi) + levy_exponent(right, g2 * xi),
            SymbolRow::Custom { f, x } => f(*x, xi),
        }
    }
}

/// q(xi) of a validated triplet; constructors exclude invalid triplets, so
/// evaluation loops skip re-validation.
pub fn levy_exponent(t: &LevyTriplet, xi: f64) -> Complex64 {
    crate::levy::eval_levy_khinchine_unchecked(t, xi)
}

/// Fast check whether the triplet's exponent is cheap to evaluate pointwise
/// (closed form) rather than by quadrature.
pub fn has_closed_form(t: &LevyTriplet) -> bool {
    match &t.jumps {
        JumpMeasure::None | JumpMeasure::Stable { .. } | JumpMeasure::Table { .. } => true,
        JumpMeasure::TemperedStable { alpha, .. } => (alpha - 1.0).abs() > 0.05,
        JumpMeasure::CompoundPoisson { jumps, .. } => matches!(jumps, JumpDist::Point { .. }),
    }
}

/// Grid verification of the `SymbolFn` invariants: q(x, 0) = 0,
/// Re q >= 0, growth |q| <= C (1 + xi^2), and Im q = 0 when real_valued.
pub fn validate_symbol_on_grid(sym: &SymbolFn, xs: &[f64], xis: &[f64]) -> Result<()> {
    for &x in xs {
        let row = sym.row(x);
        let q0 = row.eval(0.0);
        if q0.norm() > 1e-12 {
            return Err(crate::error::LevyError::Diagnostic(format!(
                "q(x, 0) = {q0} at x = {x} violates (A1)"
            )));
        }
        for &xi in xis {
            let q = row.eval(xi);
            if q.re < -1e-12 {
                return Err(crate::error::LevyError::Diagnostic(format!(
                    "Re q({x}, {xi}) = {} < 0",
                    q.re
                )));
            }
            if q.norm() > sym.c_growth * (1.0 + xi * xi) * (1.0 + 1e-9) {
                return Err(crate::error::LevyError::Diagnostic(format!(
                    "|q({x}, {xi})| = {} exceeds C(1+xi^2) with C = {} (A2)",
                    q.norm(),
                    sym.c_growth
                )));
            }
            if sym.real_valued && q.im.abs() > 1e-10 * (1.0 + q.re.abs()) {
                return Err(crate::error::LevyError::Diagnostic(format!(
                    "Im q({x}, {xi}) = {} but symbol is flagged real",
                    q.im
                )));
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid(a: f64, b: f64, n: usize) -> Vec<f64> {
        (0..=n).map(|i| a + (b - a) * i as f64 / n as f64).collect()
    }

    #[test]
    fn stable_like_constant_matches_power() {
        let sym = SymbolFn::stable_like(StabilityIndexFn::constant(1.5).unwrap()).unwrap();
        let q = sym.eval(0.0, 2.0);
        assert!((q.re - 2.0f64.powf(1.5)).abs() < 1e-14);
        assert_eq!(q.im, 0.0);
    }

    #[test]
    fn stable_like_zero_frequency() {
        let sym = SymbolFn::stable_like(StabilityIndexFn::step(0.0, 1.2, 1.8).unwrap()).unwrap();
        for x in [-3.0, 0.0, 0.5] {
            assert_eq!(sym.eval(x, 0.0), Complex64::ZERO);
        }
    }

    #[test]
    fn stable_like_branchwise() {
        let sym = SymbolFn::stable_like(StabilityIndexFn::step(0.0, 1.2, 1.8).unwrap()).unwrap();
        let q = sym.eval(-1.0, 2.0);
        assert!((q.re - 2.0f64.powf(1.2)).abs() < 1e-14);
    }

    #[test]
    fn glued_switches_at_threshold() {
        let left = LevyTriplet::stable(1.2).unwrap();
        let right = LevyTriplet::stable(1.8).unwrap();
        let sym = SymbolFn::glued(left.clone(), right.clone()).unwrap();
        let ql = sym.eval(0.0, 3.0); // threshold belongs to the left
        let qr = sym.eval(1e-9, 3.0);
        assert!((ql.re - 3.0f64.powf(1.2)).abs() < 1e-12);
        assert!((qr.re - 3.0f64.powf(1.8)).abs() < 1e-12);
    }

    #[test]
    fn invariants_hold_on_grid() {
        let xs = grid(-5.0, 5.0, 40);
        let xis = grid(-50.0, 50.0, 100);
        let syms = vec![
            SymbolFn::from_triplet(LevyTriplet::brownian(1.0)).unwrap(),
            SymbolFn::stable_like(StabilityIndexFn::step(0.0, 1.2, 1.8).unwrap()).unwrap(),
            SymbolFn::glued_approx(
                LevyTriplet::stable(1.2).unwrap(),
                LevyTriplet::stable(1.8).unwrap(),
                10,
            )
            .unwrap(),
        ];
        for s in &syms {
            validate_symbol_on_grid(s, &xs, &xis).unwrap();
        }
    }
}
